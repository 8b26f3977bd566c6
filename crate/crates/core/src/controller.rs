//! Task-space velocity law `dx = J_S (ydot_d - K (y - y_d))`, pose
//! integration and shape-error metrics.

use nalgebra::SVector;

use crate::error::{Error, Result};
use crate::geometry::{FeatureVector, PoseVector, RobotPose, ShapeFeature};
use crate::jacobian::Matrix6x7;
use crate::math::acos;

/// Diagonal positive gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMatrix {
    diagonal: SVector<f64, 7>,
}

impl GainMatrix {
    pub fn new(diagonal: SVector<f64, 7>) -> Result<Self> {
        if !diagonal.iter().all(|k| k.is_finite() && *k > 0.0) {
            return Err(Error::DegenerateInput("gain entries must be positive and finite"));
        }
        Ok(Self { diagonal })
    }

    pub fn uniform(k: f64) -> Result<Self> {
        Self::new(SVector::from_element(k))
    }

    pub fn diagonal(&self) -> &SVector<f64, 7> {
        &self.diagonal
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.diagonal.max()
    }

    pub fn apply(&self, e: &FeatureVector) -> FeatureVector {
        self.diagonal.component_mul(e)
    }
}

impl Default for GainMatrix {
    fn default() -> Self {
        Self {
            diagonal: SVector::from_element(0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoTarget {
    pub y_d: FeatureVector,
    pub ydot_d: FeatureVector,
}

impl ServoTarget {
    pub fn new(target: &ShapeFeature) -> Self {
        Self {
            y_d: target.to_vector(),
            ydot_d: FeatureVector::zeros(),
        }
    }
}

/// Per-component pose-velocity clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityLimits {
    /// rad/s on each Euler rate.
    pub angular: f64,
    /// m/s on each position rate.
    pub linear: f64,
}

impl Default for VelocityLimits {
    fn default() -> Self {
        Self {
            angular: 0.5,
            linear: 0.2,
        }
    }
}

impl VelocityLimits {
    pub fn unlimited() -> Self {
        Self {
            angular: f64::INFINITY,
            linear: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub dx: PoseVector,
    pub saturated: bool,
}

pub fn control_step(
    y: &FeatureVector,
    target: &ServoTarget,
    j_s: &Matrix6x7,
    gain: &GainMatrix,
    limits: &VelocityLimits,
) -> Result<ControlOutput> {
    let finite = |m: &[f64]| m.iter().all(|v| v.is_finite());
    if !(finite(y.as_slice()) && finite(target.y_d.as_slice()) && finite(target.ydot_d.as_slice())) {
        return Err(Error::NonFinite("controller input"));
    }
    if !finite(j_s.as_slice()) {
        return Err(Error::NonFinite("pose-shape Jacobian"));
    }
    let e = y - target.y_d;
    let raw = j_s * (target.ydot_d - gain.apply(&e));
    let mut dx = raw;
    for (i, v) in dx.iter_mut().enumerate() {
        let limit = if i < 3 { limits.angular } else { limits.linear };
        *v = v.clamp(-limit, limit);
    }
    Ok(ControlOutput {
        saturated: dx != raw,
        dx,
    })
}

/// Explicit Euler step; Euler angles are left unwrapped.
pub fn integrate_pose(pose: &RobotPose, dx: &PoseVector, dt: f64) -> RobotPose {
    RobotPose::from_vector(&(pose.to_vector() + dx * dt))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub radius_err: f64,
    pub normal_angle_err: f64,
    pub center_dist_err: f64,
    pub center_axis_errs: [f64; 3],
    pub e_norm: f64,
}

pub fn shape_errors(y: &FeatureVector, y_d: &FeatureVector) -> ErrorReport {
    let n = y.fixed_rows::<3>(4);
    let n_d = y_d.fixed_rows::<3>(4);
    let denom = n.norm() * n_d.norm();
    let cosine = if denom > 0.0 { n.dot(&n_d) / denom } else { 1.0 };
    let dc = y.fixed_rows::<3>(1) - y_d.fixed_rows::<3>(1);
    ErrorReport {
        radius_err: (y[0] - y_d[0]).abs(),
        normal_angle_err: acos(cosine.clamp(-1.0, 1.0)),
        center_dist_err: dc.norm(),
        center_axis_errs: [dc.x.abs(), dc.y.abs(), dc.z.abs()],
        e_norm: (y - y_d).norm(),
    }
}
