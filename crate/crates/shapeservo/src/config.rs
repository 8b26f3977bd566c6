//! Flat `key = value` run configuration.
//!
//! Vectors are whitespace-separated numbers. `#` starts a comment that runs to
//! the end of the line; unknown keys and repeated keys are errors. Numbers are
//! written with Rust's shortest round-trip formatting, so
//! `parse(serialize(c)) == c` exactly.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use shapeservo_core::controller::{GainMatrix, VelocityLimits};
use shapeservo_core::nalgebra::SVector;
use shapeservo_core::servo::{EstimatorMode, ServoConfig};
use shapeservo_core::simulator::{CloudNoiseModel, PlantMode, PlantSetup, Winding};
use shapeservo_core::{FeatureVector, JacobianOptions, PoseVector, RobotPose, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    Syntax {
        line: usize,
        text: String,
    },
    UnknownKey {
        line: usize,
        key: String,
    },
    DuplicateKey {
        line: usize,
        key: String,
    },
    BadValue {
        key: String,
        value: String,
        expected: &'static str,
    },
    OutOfRange {
        key: String,
        reason: &'static str,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(msg) => write!(f, "cannot read config: {msg}"),
            ConfigError::Syntax { line, text } => write!(f, "line {line}: expected `key = value`, got `{text}`"),
            ConfigError::UnknownKey { line, key } => write!(f, "line {line}: unknown key `{key}`"),
            ConfigError::DuplicateKey { line, key } => write!(f, "line {line}: key `{key}` given twice"),
            ConfigError::BadValue { key, value, expected } => {
                write!(f, "`{key}`: cannot parse `{value}` as {expected}")
            }
            ConfigError::OutOfRange { key, reason } => write!(f, "`{key}`: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// What the servo loop should reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetSpec {
    /// Pose pushed through the plant; always reachable when it projects.
    Pose(PoseVector),
    Feature(FeatureVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub out_dir: PathBuf,

    pub fixed_point: Vec3,
    pub rod_length: f64,
    pub grasp: Vec3,
    pub normal_hint: Vec3,
    pub winding: Winding,
    pub euler: Vec3,
    pub plant_mode: PlantMode,

    pub noise_sigma: f64,
    pub noise_samples: usize,
    pub rod_radius_bias: f64,

    pub estimator: EstimatorMode,
    pub downsample: usize,
    pub denoise_k: usize,
    pub denoise_sigma: f64,
    pub delta: f64,
    pub hemisphere_ref: Vec3,

    pub gain: SVector<f64, 7>,
    pub dt: f64,
    pub max_steps: usize,
    pub tolerance: f64,
    pub plateau_window: usize,
    pub plateau_rel: f64,
    pub clamp_angular: f64,
    pub clamp_linear: f64,
    pub exact_norm: bool,
    pub grasp_coupling: bool,

    pub target: TargetSpec,

    pub fit_repeats: usize,
    pub check_states_per_case: usize,
    pub check_scenario_states: usize,
    pub check_trajectory_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out_dir: PathBuf::from("out"),
            fixed_point: Vec3::zeros(),
            rod_length: 0.5,
            grasp: Vec3::new(0.38, 0.0, 0.18),
            normal_hint: Vec3::new(0.0, 0.6, 0.8),
            winding: Winding::Counterclockwise,
            euler: Vec3::new(0.4, 1.2, -0.3),
            plant_mode: PlantMode::RodGeometry,
            noise_sigma: 0.002,
            noise_samples: 200,
            rod_radius_bias: 0.0,
            estimator: EstimatorMode::PointCloudFit,
            downsample: 1,
            denoise_k: 0,
            denoise_sigma: 1.0,
            delta: 0.2,
            hemisphere_ref: Vec3::z(),
            gain: SVector::from_element(0.5),
            dt: 0.1,
            max_steps: 500,
            tolerance: 1e-3,
            plateau_window: 0,
            plateau_rel: 1e-3,
            clamp_angular: 0.5,
            clamp_linear: 0.2,
            exact_norm: false,
            grasp_coupling: true,
            target: TargetSpec::Pose(PoseVector::new(0.5, 1.1, -0.15, 0.35, 0.04, 0.2)),
            fit_repeats: 50,
            check_states_per_case: 100,
            check_scenario_states: 100,
            check_trajectory_steps: 200,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, expected: &'static str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        expected,
    })
}

fn parse_vec<const N: usize>(key: &str, value: &str) -> Result<SVector<f64, N>, ConfigError> {
    let bad = || ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        expected: "a whitespace-separated list of numbers",
    };
    let nums: Vec<f64> = value
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if nums.len() != N {
        return Err(bad());
    }
    Ok(SVector::from_column_slice(&nums))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            expected: "true or false",
        }),
    }
}

fn fmt_vec<const N: usize>(v: &SVector<f64, N>) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn enum_error(key: &str, value: &str, expected: &'static str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        expected,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        let mut target_set = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.split('#').next().unwrap_or_default().trim();
            if trimmed.is_empty() {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line,
                    text: trimmed.to_string(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::Syntax {
                    line,
                    text: trimmed.to_string(),
                });
            }
            let duplicate =
                seen.iter().any(|k| k == key) || (target_set && (key == "target.pose" || key == "target.feature"));
            if duplicate {
                return Err(ConfigError::DuplicateKey {
                    line,
                    key: key.to_string(),
                });
            }
            seen.push(key.to_string());
            if key.starts_with("target.") {
                target_set = true;
            }
            if !cfg.set(key, value)? {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one entry; `Ok(false)` for an unknown key.
    fn set(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        match key {
            "seed" => self.seed = parse_num(key, value, "an unsigned integer")?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "scenario.fixed_point" => self.fixed_point = parse_vec(key, value)?,
            "scenario.rod_length" => self.rod_length = parse_num(key, value, "a number")?,
            "scenario.grasp" => self.grasp = parse_vec(key, value)?,
            "scenario.normal_hint" => self.normal_hint = parse_vec(key, value)?,
            "scenario.winding" => {
                self.winding = match value {
                    "ccw" => Winding::Counterclockwise,
                    "cw" => Winding::Clockwise,
                    _ => return Err(enum_error(key, value, "ccw or cw")),
                }
            }
            "scenario.euler" => self.euler = parse_vec(key, value)?,
            "scenario.mode" => {
                self.plant_mode = match value {
                    "rod_geometry" => PlantMode::RodGeometry,
                    "exact_shape_space" => PlantMode::ExactShapeSpace,
                    _ => return Err(enum_error(key, value, "rod_geometry or exact_shape_space")),
                }
            }
            "noise.sigma" => self.noise_sigma = parse_num(key, value, "a number")?,
            "noise.samples" => self.noise_samples = parse_num(key, value, "an unsigned integer")?,
            "noise.rod_radius_bias" => self.rod_radius_bias = parse_num(key, value, "a number")?,
            "estimator.mode" => {
                self.estimator = match value {
                    "fit" => EstimatorMode::PointCloudFit,
                    "truth" => EstimatorMode::Truth,
                    _ => return Err(enum_error(key, value, "fit or truth")),
                }
            }
            "estimator.downsample" => self.downsample = parse_num(key, value, "an unsigned integer")?,
            "estimator.denoise_k" => self.denoise_k = parse_num(key, value, "an unsigned integer")?,
            "estimator.denoise_sigma" => self.denoise_sigma = parse_num(key, value, "a number")?,
            "estimator.delta" => self.delta = parse_num(key, value, "a number")?,
            "estimator.hemisphere_ref" => self.hemisphere_ref = parse_vec(key, value)?,
            "controller.gain" => self.gain = parse_vec(key, value)?,
            "controller.dt" => self.dt = parse_num(key, value, "a number")?,
            "controller.max_steps" => self.max_steps = parse_num(key, value, "an unsigned integer")?,
            "controller.tolerance" => self.tolerance = parse_num(key, value, "a number")?,
            "controller.plateau_window" => self.plateau_window = parse_num(key, value, "an unsigned integer")?,
            "controller.plateau_rel" => self.plateau_rel = parse_num(key, value, "a number")?,
            "controller.clamp_angular" => self.clamp_angular = parse_num(key, value, "a number")?,
            "controller.clamp_linear" => self.clamp_linear = parse_num(key, value, "a number")?,
            "jacobian.exact_norm" => self.exact_norm = parse_bool(key, value)?,
            "jacobian.grasp_coupling" => self.grasp_coupling = parse_bool(key, value)?,
            "target.pose" => self.target = TargetSpec::Pose(parse_vec(key, value)?),
            "target.feature" => self.target = TargetSpec::Feature(parse_vec(key, value)?),
            "fit.repeats" => self.fit_repeats = parse_num(key, value, "an unsigned integer")?,
            "check.states_per_case" => self.check_states_per_case = parse_num(key, value, "an unsigned integer")?,
            "check.scenario_states" => self.check_scenario_states = parse_num(key, value, "an unsigned integer")?,
            "check.trajectory_steps" => self.check_trajectory_steps = parse_num(key, value, "an unsigned integer")?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |key: &str, ok: bool, reason: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: key.to_string(),
                    reason,
                })
            }
        };
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        range(
            "scenario.rod_length",
            self.rod_length > 0.0 && self.rod_length.is_finite(),
            "must be positive",
        )?;
        range(
            "scenario",
            finite(self.fixed_point.as_slice()) && finite(self.grasp.as_slice()) && finite(self.euler.as_slice()),
            "vectors must be finite",
        )?;
        range("scenario.normal_hint", self.normal_hint.norm() > 0.0, "must be nonzero")?;
        range(
            "noise.sigma",
            self.noise_sigma >= 0.0 && self.noise_sigma.is_finite(),
            "must be non-negative",
        )?;
        range("noise.samples", self.noise_samples >= 4, "must be at least 4")?;
        range(
            "noise.rod_radius_bias",
            self.rod_radius_bias.is_finite(),
            "must be finite",
        )?;
        range("estimator.downsample", self.downsample >= 1, "must be at least 1")?;
        range(
            "estimator.denoise_sigma",
            self.denoise_sigma >= 0.0,
            "must be non-negative",
        )?;
        range(
            "estimator.delta",
            self.delta > 0.0 && self.delta < std::f64::consts::FRAC_PI_4,
            "must lie in (0, pi/4)",
        )?;
        range(
            "estimator.hemisphere_ref",
            self.hemisphere_ref.norm() > 0.0,
            "must be nonzero",
        )?;
        range(
            "controller.gain",
            self.gain.iter().all(|k| *k > 0.0 && k.is_finite()),
            "entries must be positive",
        )?;
        range(
            "controller.dt",
            self.dt > 0.0 && self.dt.is_finite(),
            "must be positive",
        )?;
        range("controller.tolerance", self.tolerance >= 0.0, "must be non-negative")?;
        range(
            "controller.plateau_rel",
            self.plateau_rel >= 0.0,
            "must be non-negative",
        )?;
        range("controller.clamp_angular", self.clamp_angular > 0.0, "must be positive")?;
        range("controller.clamp_linear", self.clamp_linear > 0.0, "must be positive")?;
        range("fit.repeats", self.fit_repeats >= 1, "must be at least 1")?;
        match self.target {
            TargetSpec::Pose(p) => range("target.pose", finite(p.as_slice()), "must be finite"),
            TargetSpec::Feature(y) => range(
                "target.feature",
                finite(y.as_slice()) && y[0] > 0.0 && y.fixed_rows::<3>(4).norm() > 0.0,
                "needs a positive radius and a nonzero normal",
            ),
        }
    }

    pub fn serialize(&self) -> String {
        let winding = match self.winding {
            Winding::Counterclockwise => "ccw",
            Winding::Clockwise => "cw",
        };
        let mode = match self.plant_mode {
            PlantMode::RodGeometry => "rod_geometry",
            PlantMode::ExactShapeSpace => "exact_shape_space",
        };
        let estimator = match self.estimator {
            EstimatorMode::PointCloudFit => "fit",
            EstimatorMode::Truth => "truth",
        };
        let target = match &self.target {
            TargetSpec::Pose(p) => format!("target.pose = {}", fmt_vec(p)),
            TargetSpec::Feature(y) => format!("target.feature = {}", fmt_vec(y)),
        };
        let lines = [
            format!("seed = {}", self.seed),
            format!("out_dir = {}", self.out_dir.display()),
            String::new(),
            "# plant".to_string(),
            format!("scenario.fixed_point = {}", fmt_vec(&self.fixed_point)),
            format!("scenario.rod_length = {}", self.rod_length),
            format!("scenario.grasp = {}", fmt_vec(&self.grasp)),
            format!("scenario.normal_hint = {}", fmt_vec(&self.normal_hint)),
            format!("scenario.winding = {winding}"),
            format!("scenario.euler = {}", fmt_vec(&self.euler)),
            format!("scenario.mode = {mode}"),
            format!("noise.sigma = {}", self.noise_sigma),
            format!("noise.samples = {}", self.noise_samples),
            format!("noise.rod_radius_bias = {}", self.rod_radius_bias),
            String::new(),
            "# estimator".to_string(),
            format!("estimator.mode = {estimator}"),
            format!("estimator.downsample = {}", self.downsample),
            format!("estimator.denoise_k = {}", self.denoise_k),
            format!("estimator.denoise_sigma = {}", self.denoise_sigma),
            format!("estimator.delta = {}", self.delta),
            format!("estimator.hemisphere_ref = {}", fmt_vec(&self.hemisphere_ref)),
            String::new(),
            "# controller".to_string(),
            format!("controller.gain = {}", fmt_vec(&self.gain)),
            format!("controller.dt = {}", self.dt),
            format!("controller.max_steps = {}", self.max_steps),
            format!("controller.tolerance = {}", self.tolerance),
            format!("controller.plateau_window = {}", self.plateau_window),
            format!("controller.plateau_rel = {}", self.plateau_rel),
            format!("controller.clamp_angular = {}", self.clamp_angular),
            format!("controller.clamp_linear = {}", self.clamp_linear),
            format!("jacobian.exact_norm = {}", self.exact_norm),
            format!("jacobian.grasp_coupling = {}", self.grasp_coupling),
            target,
            String::new(),
            "# harness".to_string(),
            format!("fit.repeats = {}", self.fit_repeats),
            format!("check.states_per_case = {}", self.check_states_per_case),
            format!("check.scenario_states = {}", self.check_scenario_states),
            format!("check.trajectory_steps = {}", self.check_trajectory_steps),
        ];
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    pub fn plant_setup(&self) -> PlantSetup {
        PlantSetup {
            fixed_point: self.fixed_point,
            rod_length: self.rod_length,
            grasp: self.grasp,
            normal_hint: self.normal_hint,
            winding: self.winding,
            euler: self.euler,
            mode: self.plant_mode,
            seed: self.seed,
        }
    }

    pub fn noise(&self) -> CloudNoiseModel {
        CloudNoiseModel {
            sigma: self.noise_sigma,
            samples: self.noise_samples,
            rod_radius_bias: self.rod_radius_bias,
        }
    }

    pub fn jacobian_options(&self) -> JacobianOptions {
        JacobianOptions {
            exact_norm: self.exact_norm,
            grasp_coupling: self.grasp_coupling,
        }
    }

    pub fn servo_config(&self) -> ServoConfig {
        ServoConfig {
            // validate() has already checked the entries
            gain: GainMatrix::new(self.gain).expect("validated gain"),
            dt: self.dt,
            max_steps: self.max_steps,
            tolerance: self.tolerance,
            plateau_window: self.plateau_window,
            plateau_rel: self.plateau_rel,
            limits: VelocityLimits {
                angular: self.clamp_angular,
                linear: self.clamp_linear,
            },
            jacobian: self.jacobian_options(),
            estimator: self.estimator,
            noise: self.noise(),
            downsample: self.downsample,
            denoise_k: self.denoise_k,
            denoise_sigma: self.denoise_sigma,
            delta: self.delta,
            hemisphere_ref: self.hemisphere_ref,
        }
    }

    pub fn target_pose(&self) -> Option<RobotPose> {
        match self.target {
            TargetSpec::Pose(p) => Some(RobotPose::from_vector(&p)),
            TargetSpec::Feature(_) => None,
        }
    }
}
