//! Point-cloud text files and CSV output.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use shapeservo_core::servo::LogRecord;
use shapeservo_core::{FitResult, PointCloud, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub enum CloudError {
    Io(String),
    Parse { line: usize, text: String },
}

impl fmt::Display for CloudError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CloudError::Io(msg) => write!(f, "cannot read cloud: {msg}"),
            CloudError::Parse { line, text } => write!(f, "line {line}: expected three finite numbers, got `{text}`"),
        }
    }
}

impl std::error::Error for CloudError {}

/// One `x y z` triple per line; `#` lines and blank lines are skipped.
pub fn parse_cloud(text: &str) -> Result<PointCloud, CloudError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || CloudError::Parse {
            line: idx + 1,
            text: line.to_string(),
        };
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad))
            .collect::<Result<_, _>>()?;
        if nums.len() != 3 {
            return Err(bad());
        }
        points.push(Vec3::new(nums[0], nums[1], nums[2]));
    }
    Ok(PointCloud::new(points))
}

pub fn read_cloud(path: &Path) -> Result<PointCloud, CloudError> {
    let text = std::fs::read_to_string(path).map_err(|e| CloudError::Io(format!("{}: {e}", path.display())))?;
    parse_cloud(&text)
}

pub fn format_cloud(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.iter() {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
    }
    out
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> std::io::Result<()> {
    std::fs::write(path, format_cloud(cloud))
}

pub const FIT_HEADER: &str = "r,cx,cy,cz,nx,ny,nz,res_mean,res_var,n_points";

pub const SERVO_HEADER: &str =
    "step,t,x1,x2,x3,x4,x5,x6,r,cx,cy,cz,nx,ny,nz,e_r,e_n,e_c,e_cx,e_cy,e_cz,e_norm,res_mean,res_var,saturated,fault";

pub fn fit_row(fit: &FitResult) -> String {
    let f = &fit.feature;
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        f.radius,
        f.center.x,
        f.center.y,
        f.center.z,
        f.normal.x,
        f.normal.y,
        f.normal.z,
        fit.mean,
        fit.variance,
        fit.residuals.len()
    )
}

pub fn servo_row(rec: &LogRecord) -> String {
    let mut cols: Vec<String> = vec![rec.step.to_string(), rec.t.to_string()];
    cols.extend(rec.pose.iter().map(|v| v.to_string()));
    cols.extend(rec.y.iter().map(|v| v.to_string()));
    let e = &rec.errors;
    cols.extend(
        [
            e.radius_err,
            e.normal_angle_err,
            e.center_dist_err,
            e.center_axis_errs[0],
            e.center_axis_errs[1],
            e.center_axis_errs[2],
            e.e_norm,
        ]
        .iter()
        .map(|v| v.to_string()),
    );
    match rec.residual {
        Some((mean, var)) => {
            cols.push(mean.to_string());
            cols.push(var.to_string());
        }
        None => {
            cols.push(String::new());
            cols.push(String::new());
        }
    }
    cols.push(u8::from(rec.saturated).to_string());
    cols.push(rec.fault.map(|f| f.to_string().replace(',', ";")).unwrap_or_default());
    cols.join(",")
}

/// Writes `header` and `rows` to `path`, one line each.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> std::io::Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()
}

/// Equal-width histogram of `values` over `[0, max]`.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    let width = if max > 0.0 {
        max / bins as f64
    } else {
        1.0 / bins as f64
    };
    let mut counts = vec![0usize; bins];
    for v in values {
        let i = ((v / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as f64 * width, (i + 1) as f64 * width, c))
        .collect()
}
