//! Closed loop: observe, estimate, build `J_S`, command, step the plant.

use alloc::vec::Vec;

use nalgebra::{DMatrix, Unit};

use crate::controller::{control_step, shape_errors, ErrorReport, GainMatrix, ServoTarget, VelocityLimits};
use crate::error::{Error, Result};
use crate::fitting::{denoise, downsample, fit_arc, PointCloud};
use crate::geometry::{pseudoinverse, FeatureVector, PoseVector, ShapeFeature, UnitVec3, Vec3, PINV_TOLERANCE};
use crate::jacobian::{init_calibration, pose_shape_jacobian, GraspCalibration, JacobianOptions};
use crate::simulator::{CloudNoiseModel, RodPlant};
use crate::topology::{ArcTopology, TopologyCase, DEFAULT_DELTA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    /// Fit the arc to the plant's point cloud every step.
    PointCloudFit,
    /// Read the plant's true feature; isolates the controller from fit noise.
    Truth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoConfig {
    pub gain: GainMatrix,
    pub dt: f64,
    pub max_steps: usize,
    /// Converged once `e_norm` drops below this.
    pub tolerance: f64,
    /// Steps without relative improvement of `plateau_rel` before stopping; 0 disables.
    pub plateau_window: usize,
    pub plateau_rel: f64,
    pub limits: VelocityLimits,
    pub jacobian: JacobianOptions,
    pub estimator: EstimatorMode,
    pub noise: CloudNoiseModel,
    pub downsample: usize,
    /// Neighbour count for outlier removal; 0 disables it.
    pub denoise_k: usize,
    pub denoise_sigma: f64,
    pub delta: f64,
    pub hemisphere_ref: Vec3,
}

impl Default for ServoConfig {
    fn default() -> Self {
        Self {
            gain: GainMatrix::default(),
            dt: 0.1,
            max_steps: 500,
            tolerance: 1e-3,
            plateau_window: 0,
            plateau_rel: 1e-3,
            limits: VelocityLimits::default(),
            jacobian: JacobianOptions::default(),
            estimator: EstimatorMode::PointCloudFit,
            noise: CloudNoiseModel::default(),
            downsample: 1,
            denoise_k: 0,
            denoise_sigma: 1.0,
            delta: DEFAULT_DELTA,
            hemisphere_ref: Vec3::z(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub step: usize,
    pub t: f64,
    pub pose: PoseVector,
    /// Feature the controller acted on.
    pub y: FeatureVector,
    /// Plant ground truth, with its normal sign matched to `y`.
    pub y_true: FeatureVector,
    pub errors: ErrorReport,
    pub true_errors: ErrorReport,
    /// `(mean, variance)` of the fit residuals; `None` in truth mode.
    pub residual: Option<(f64, f64)>,
    /// `|(I - J_S^+ J_S) e|`: error the pose cannot act on this step.
    pub null_residual: f64,
    pub saturated: bool,
    pub fault: Option<Error>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Converged,
    MaxSteps,
    Plateau,
    Fault(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServoRun {
    pub records: Vec<LogRecord>,
    pub termination: Termination,
    pub topology: ArcTopology,
    pub calibration: GraspCalibration,
    /// Steps where the classifier disagreed with the frozen case.
    pub topology_flips: Vec<(usize, TopologyCase)>,
    pub plant: RodPlant,
}

impl ServoRun {
    pub fn last(&self) -> &LogRecord {
        // run_servo_loop always records step 0
        self.records.last().expect("servo log is never empty")
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

struct Estimate {
    y: FeatureVector,
    residual: Option<(f64, f64)>,
    cloud: Option<PointCloud>,
}

fn estimate(plant: &RodPlant, cfg: &ServoConfig, reference: &UnitVec3) -> Result<Estimate> {
    match cfg.estimator {
        EstimatorMode::Truth => Ok(Estimate {
            y: plant.feature_vector(),
            residual: None,
            cloud: None,
        }),
        EstimatorMode::PointCloudFit => {
            let raw = plant.observe(&cfg.noise);
            let thinned = downsample(&raw, cfg.downsample)?;
            let cloud = denoise(&thinned, cfg.denoise_k, cfg.denoise_sigma).cloud;
            let fit = fit_arc(&cloud, reference)?;
            Ok(Estimate {
                y: fit.feature.to_vector(),
                residual: Some((fit.mean, fit.variance)),
                cloud: Some(cloud),
            })
        }
    }
}

fn matched_truth(plant: &RodPlant, y: &FeatureVector) -> FeatureVector {
    let mut t = plant.feature_vector();
    if t.fixed_rows::<3>(4).dot(&y.fixed_rows::<3>(4)) < 0.0 {
        for i in 4..7 {
            t[i] = -t[i];
        }
    }
    t
}

fn null_residual(j_s: &crate::jacobian::Matrix6x7, e: &FeatureVector) -> f64 {
    let j = DMatrix::from_column_slice(6, 7, j_s.as_slice());
    let p = pseudoinverse(&j, PINV_TOLERANCE) * &j;
    let e = DMatrix::from_column_slice(7, 1, e.as_slice());
    (&e - p * &e).norm()
}

/// Runs the loop until convergence, `max_steps`, a plateau or a fault.
///
/// Faults during the loop end it with a partial log; only failures before
/// the first record (initial fit, topology detection, calibration) are
/// returned as `Err`.
pub fn run_servo_loop(plant: RodPlant, target: &ServoTarget, cfg: &ServoConfig) -> Result<ServoRun> {
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(Error::DegenerateInput("time step must be positive"));
    }
    let start_ref =
        Unit::try_new(cfg.hemisphere_ref, 1e-12).ok_or(Error::DegenerateInput("hemisphere reference is zero"))?;
    let first = estimate(&plant, cfg, &start_ref)?;
    let feature0 = ShapeFeature::from_vector(&first.y)?;
    let pose0 = *plant.pose();
    let calibration = init_calibration(&pose0, &feature0, &pose0.position)?;
    let topology = match &first.cloud {
        Some(cloud) => ArcTopology::detect(cloud, &feature0, &plant.fixed_point(), &pose0.position, cfg.delta)?,
        None => *plant.true_topology(),
    };

    // the fitted normal follows the hemisphere convention; bring the target onto it
    let mut target = *target;
    if target.y_d.fixed_rows::<3>(4).dot(&first.y.fixed_rows::<3>(4)) < 0.0 {
        for i in 4..7 {
            target.y_d[i] = -target.y_d[i];
            target.ydot_d[i] = -target.ydot_d[i];
        }
    }

    let mut records = Vec::new();
    let mut flips = Vec::new();
    let mut plant = plant;
    let mut est = first;
    let mut best_history: Vec<f64> = Vec::new();
    let termination = loop {
        let step = records.len();
        let pose = *plant.pose();
        let y_true = matched_truth(&plant, &est.y);
        let errors = shape_errors(&est.y, &target.y_d);
        let mut record = LogRecord {
            step,
            t: step as f64 * cfg.dt,
            pose: pose.to_vector(),
            y: est.y,
            y_true,
            errors,
            true_errors: shape_errors(&y_true, &target.y_d),
            residual: est.residual,
            null_residual: 0.0,
            saturated: false,
            fault: None,
        };
        if let Some(cloud) = &est.cloud {
            if let Ok(feature) = ShapeFeature::from_vector(&est.y) {
                if let Some(case) = topology.flipped_case(cloud, &feature, &pose.position) {
                    flips.push((step, case));
                }
            }
        }

        let best = best_history
            .last()
            .map_or(errors.e_norm, |b: &f64| b.min(errors.e_norm));
        best_history.push(best);
        if errors.e_norm < cfg.tolerance {
            records.push(record);
            break Termination::Converged;
        }
        if step >= cfg.max_steps {
            records.push(record);
            break Termination::MaxSteps;
        }
        if cfg.plateau_window > 0 && step >= cfg.plateau_window {
            let before = best_history[step - cfg.plateau_window];
            if before - best <= cfg.plateau_rel * before {
                records.push(record);
                break Termination::Plateau;
            }
        }

        let jac = match pose_shape_jacobian(&est.y, &record.pose, &calibration, &topology, &cfg.jacobian) {
            Ok(j) => j,
            Err(e) => {
                record.fault = Some(e);
                records.push(record);
                break Termination::Fault(e);
            }
        };
        record.null_residual = null_residual(&jac.j_s, &(est.y - target.y_d));
        let command = match control_step(&est.y, &target, &jac.j_s, &cfg.gain, &cfg.limits) {
            Ok(c) => c,
            Err(e) => {
                record.fault = Some(e);
                records.push(record);
                break Termination::Fault(e);
            }
        };
        record.saturated = command.saturated;
        let next = plant.step(&command.dx, cfg.dt).and_then(|p| {
            let reference = Unit::try_new(est.y.fixed_rows::<3>(4).into_owned(), 1e-12).unwrap_or(start_ref);
            estimate(&p, cfg, &reference).map(|e| (p, e))
        });
        match next {
            Ok((p, e)) => {
                records.push(record);
                plant = p;
                est = e;
            }
            Err(e) => {
                record.fault = Some(e);
                records.push(record);
                break Termination::Fault(e);
            }
        }
    };
    Ok(ServoRun {
        records,
        termination,
        topology,
        calibration,
        topology_flips: flips,
        plant,
    })
}
