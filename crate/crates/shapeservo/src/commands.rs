//! The three experiment commands. Each writes CSVs into the output directory
//! and returns a short human-readable summary.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapeservo_core::fitting::{denoise, downsample, fit_arc};
use shapeservo_core::nalgebra::Unit;
use shapeservo_core::servo::{run_servo_loop, ServoRun, Termination};
use shapeservo_core::validation::{
    fd_block_errors, random_consistent_state, scenario_states, sign_consistency, ScriptedTrajectory, SignConsistency,
    JACOBIAN_BLOCKS,
};
use shapeservo_core::{FitResult, PointCloud, RodPlant, ServoTarget, TopologyCase};

use crate::config::{ConfigError, RunConfig, TargetSpec};
use crate::io::{self, CloudError};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Cloud(CloudError),
    Output(PathBuf, std::io::Error),
    /// Input that the core rejected as unusable (degenerate cloud, impossible scenario).
    Input(&'static str, shapeservo_core::Error),
    /// Numerical failure while running.
    Numerical(&'static str, shapeservo_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(..) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config: {e}"),
            CliError::Cloud(e) => write!(f, "{e}"),
            CliError::Output(path, e) => write!(f, "cannot write {}: {e}", path.display()),
            CliError::Input(what, e) => write!(f, "{what}: {e}"),
            CliError::Numerical(what, e) => write!(f, "{what}: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<CloudError> for CliError {
    fn from(e: CloudError) -> Self {
        CliError::Cloud(e)
    }
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Output(dir.to_path_buf(), e))
}

fn write_csv<I: IntoIterator<Item = String>>(dir: &Path, name: &str, header: &str, rows: I) -> Result<(), CliError> {
    let path = dir.join(name);
    io::write_csv(&path, header, rows).map_err(|e| CliError::Output(path, e))
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub fit: FitResult,
    pub input_points: usize,
    pub removed: usize,
    pub median_seconds: f64,
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.fit.feature;
        write!(
            f,
            "fit: r={:.6} center=({:.6}, {:.6}, {:.6}) normal=({:.6}, {:.6}, {:.6}) res_mean={:.3e} res_var={:.3e} points={} removed={} three_sigma={} median_time_ms={:.3}",
            s.radius,
            s.center.x,
            s.center.y,
            s.center.z,
            s.normal.x,
            s.normal.y,
            s.normal.z,
            self.fit.mean,
            self.fit.variance,
            self.fit.residuals.len(),
            self.removed,
            if self.fit.three_sigma_ok { "ok" } else { "violated" },
            self.median_seconds * 1e3
        )
    }
}

fn estimate(cloud: &PointCloud, cfg: &RunConfig) -> Result<(FitResult, usize), shapeservo_core::Error> {
    let reference = Unit::try_new(cfg.hemisphere_ref, 1e-12).unwrap_or(shapeservo_core::Vec3::z_axis());
    let thinned = downsample(cloud, cfg.downsample)?;
    let cleaned = denoise(&thinned, cfg.denoise_k, cfg.denoise_sigma);
    Ok((fit_arc(&cleaned.cloud, &reference)?, cleaned.removed))
}

/// Median wall-clock time of `repeats` runs of `f`.
pub fn median_time<F: FnMut()>(repeats: usize, mut f: F) -> f64 {
    let mut times: Vec<f64> = (0..repeats.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[times.len() / 2]
}

pub fn cmd_fit(cloud_path: &Path, cfg: &RunConfig) -> Result<FitReport, CliError> {
    let cloud = io::read_cloud(cloud_path)?;
    let (fit, removed) = estimate(&cloud, cfg).map_err(|e| CliError::Input("fit", e))?;
    let median_seconds = median_time(cfg.fit_repeats, || {
        std::hint::black_box(estimate(std::hint::black_box(&cloud), cfg).ok());
    });

    prepare_dir(&cfg.out_dir)?;
    write_csv(&cfg.out_dir, "fit.csv", io::FIT_HEADER, [io::fit_row(&fit)])?;
    write_csv(
        &cfg.out_dir,
        "residuals.csv",
        "index,residual",
        fit.residuals.iter().enumerate().map(|(i, r)| format!("{i},{r}")),
    )?;
    write_csv(
        &cfg.out_dir,
        "residual_histogram.csv",
        "bin_start,bin_end,count",
        io::histogram(&fit.residuals, 20)
            .into_iter()
            .map(|(a, b, c)| format!("{a},{b},{c}")),
    )?;
    Ok(FitReport {
        fit,
        input_points: cloud.len(),
        removed,
        median_seconds,
    })
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub random_states: usize,
    pub scenario_states: usize,
    pub skipped: usize,
    /// Largest entrywise error per topology case over the random states.
    pub case_max: [f64; 4],
    pub scenario_max: f64,
    pub signs: Result<SignConsistency, shapeservo_core::Error>,
}

impl CheckReport {
    pub fn max_error(&self) -> f64 {
        self.case_max.iter().cloned().fold(self.scenario_max, f64::max)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "jacobian-check: states={} scenario_states={} skipped={} max_fd_error={:.3e}",
            self.random_states,
            self.scenario_states,
            self.skipped,
            self.max_error()
        )?;
        match &self.signs {
            Ok(s) => {
                write!(f, " sign_agreement=")?;
                let parts: Vec<String> = s
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if c.included {
                            format!("x{}:{:.3}", i + 1, c.fraction())
                        } else {
                            format!("x{}:excluded", i + 1)
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" "))
            }
            Err(e) => write!(f, " sign_check_skipped=({e})"),
        }
    }
}

pub fn cmd_jacobian_check(cfg: &RunConfig) -> Result<CheckReport, CliError> {
    let opts = cfg.jacobian_options();
    let plant = RodPlant::with_options(&cfg.plant_setup(), opts).map_err(|e| CliError::Input("scenario", e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    let mut case_max = [0.0f64; 4];
    let mut skipped = 0;
    let mut random_states = 0;
    for (ci, case) in TopologyCase::ALL.into_iter().enumerate() {
        for i in 0..cfg.check_states_per_case {
            let state = random_consistent_state(&mut rng, case);
            match fd_block_errors(&state, &opts) {
                Ok(errs) => {
                    random_states += 1;
                    for (name, e) in JACOBIAN_BLOCKS.iter().zip(errs) {
                        case_max[ci] = case_max[ci].max(e);
                        rows.push(format!("random,{case},{i},{name},{e}"));
                    }
                }
                Err(_) => skipped += 1,
            }
        }
    }
    let (states, scenario_skipped) = scenario_states(&plant, &mut rng, cfg.check_scenario_states);
    skipped += scenario_skipped;
    let mut scenario_max = 0.0f64;
    let mut scenario_ok = 0;
    for (i, state) in states.iter().enumerate() {
        match fd_block_errors(state, &opts) {
            Ok(errs) => {
                scenario_ok += 1;
                for (name, e) in JACOBIAN_BLOCKS.iter().zip(errs) {
                    scenario_max = scenario_max.max(e);
                    rows.push(format!("scenario,{},{i},{name},{e}", state.topology.case()));
                }
            }
            Err(_) => skipped += 1,
        }
    }

    let script = ScriptedTrajectory {
        steps: cfg.check_trajectory_steps,
        dt: cfg.dt,
        ..ScriptedTrajectory::default()
    };
    let reference = Unit::try_new(cfg.hemisphere_ref, 1e-12).unwrap_or(shapeservo_core::Vec3::z_axis());
    let signs = sign_consistency(&plant, &script, &cfg.noise(), &reference, &opts);

    prepare_dir(&cfg.out_dir)?;
    write_csv(
        &cfg.out_dir,
        "jacobian_errors.csv",
        "source,case,state,block,max_abs_err",
        rows,
    )?;
    if let Ok(s) = &signs {
        write_csv(
            &cfg.out_dir,
            "sign_agreement.csv",
            "component,range,samples,agreeing,fraction,included",
            s.components.iter().enumerate().map(|(i, c)| {
                format!(
                    "x{},{},{},{},{},{}",
                    i + 1,
                    c.range,
                    c.samples,
                    c.agreeing,
                    c.fraction(),
                    u8::from(c.included)
                )
            }),
        )?;
        let header = "step,f1,f2,f3,f4,f5,f6,c1,c2,c3,c4,c5,c6";
        write_csv(
            &cfg.out_dir,
            "sign_trajectory.csv",
            header,
            s.samples.iter().map(|p| {
                let f: Vec<String> = p.feedback.iter().map(|v| v.to_string()).collect();
                let c: Vec<String> = p.computed.iter().map(|v| v.to_string()).collect();
                format!("{},{},{}", p.step, f.join(","), c.join(","))
            }),
        )?;
    }
    Ok(CheckReport {
        random_states,
        scenario_states: scenario_ok,
        skipped,
        case_max,
        scenario_max,
        signs,
    })
}

#[derive(Debug, Clone)]
pub struct ServoReport {
    pub run: ServoRun,
}

impl ServoReport {
    pub fn fault(&self) -> Option<shapeservo_core::Error> {
        match self.run.termination {
            Termination::Fault(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for ServoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.run.last();
        let e = &last.errors;
        let status = match self.run.termination {
            Termination::Converged => "converged".to_string(),
            Termination::MaxSteps => "max_steps".to_string(),
            Termination::Plateau => "plateau".to_string(),
            Termination::Fault(err) => format!("fault ({err})"),
        };
        write!(
            f,
            "servo: steps={} status={} case={} rod_length={:.6} e_r={:.6} e_n_deg={:.4} e_c={:.6} e_norm={:.3e} topology_flips={}",
            last.step,
            status,
            self.run.topology.case(),
            self.run.topology.arc_length(),
            e.radius_err,
            e.normal_angle_err.to_degrees(),
            e.center_dist_err,
            e.e_norm,
            self.run.topology_flips.len()
        )
    }
}

pub fn cmd_servo(cfg: &RunConfig) -> Result<ServoReport, CliError> {
    let plant = RodPlant::with_options(&cfg.plant_setup(), cfg.jacobian_options())
        .map_err(|e| CliError::Input("scenario", e))?;
    let target = match cfg.target {
        TargetSpec::Pose(_) => {
            let pose = cfg.target_pose().expect("pose target");
            let rod = plant.project(&pose).map_err(|e| CliError::Input("target pose", e))?;
            ServoTarget::new(&rod.feature)
        }
        TargetSpec::Feature(y) => ServoTarget {
            y_d: y,
            ydot_d: shapeservo_core::FeatureVector::zeros(),
        },
    };
    let run = run_servo_loop(plant, &target, &cfg.servo_config()).map_err(|e| CliError::Numerical("servo start", e))?;
    prepare_dir(&cfg.out_dir)?;
    write_csv(
        &cfg.out_dir,
        "servo_log.csv",
        io::SERVO_HEADER,
        run.records.iter().map(io::servo_row),
    )?;
    Ok(ServoReport { run })
}
