//! Deterministic stand-in for the rod, gripper and depth camera.
//!
//! The rod is inextensible with length `L` and always bends into a circular
//! arc between the fixed tip `F` and the grasp `G`. A commanded pose is first
//! projected onto the poses the rod can actually take:
//!
//! * the grasp position is kept as commanded,
//! * the arc plane contains the chord `G - F` and is the plane closest to the
//!   one implied by the commanded gripper orientation,
//! * the radius and swept angle follow from the chord and `L`,
//! * the reported orientation is `ERB R_B` for the resulting body frame.
//!
//! The projected state satisfies both implicit constraint maps exactly.

use nalgebra::{DMatrix, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::controller::integrate_pose;
use crate::error::{Error, Result};
use crate::fitting::PointCloud;
use crate::geometry::{
    axis_angle, body_frame, pseudoinverse, rot_zyz, zyz_from_rotation_near, FeatureVector, PoseVector, RobotPose,
    ShapeFeature, Vec3, PINV_TOLERANCE,
};
use crate::jacobian::{init_calibration, pose_shape_jacobian, GraspCalibration, JacobianOptions};
use crate::math::{cos, sin, sqrt, PI};
use crate::topology::{ArcTopology, TopologyCase, DEFAULT_DELTA};

/// Chord/length ratios above this are rejected as a straight rod.
pub const STRAIGHT_RATIO: f64 = 1.0 - 1e-6;

const PHI_MIN: f64 = 1e-6;
const PHI_MAX: f64 = PI - 1e-6;

/// Sense of the sweep from the fixed tip, seen along `+n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winding {
    Counterclockwise,
    Clockwise,
}

impl Winding {
    pub fn sign(self) -> f64 {
        match self {
            Winding::Counterclockwise => 1.0,
            Winding::Clockwise => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantMode {
    /// Full arc geometry from the commanded pose.
    RodGeometry,
    /// Feature integrates `pinv(J_S) dx`; the controller's modelling assumption.
    ExactShapeSpace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudNoiseModel {
    /// Isotropic Gaussian standard deviation, meters.
    pub sigma: f64,
    pub samples: usize,
    /// Outward radial offset of every sample, meters.
    pub rod_radius_bias: f64,
}

impl Default for CloudNoiseModel {
    fn default() -> Self {
        Self {
            sigma: 0.002,
            samples: 200,
            rod_radius_bias: 0.0,
        }
    }
}

impl CloudNoiseModel {
    pub fn noiseless(samples: usize) -> Self {
        Self {
            sigma: 0.0,
            samples,
            rod_radius_bias: 0.0,
        }
    }
}

/// Solves `c = 2 r sin(theta / 2)`, `L = r theta` for `(r, theta)`, `theta` in `(0, 2 pi)`.
///
/// Equivalent to `sin(phi) / phi = c / L` with `phi = theta / 2`; Newton steps
/// on `g(phi) = sin(phi) - q phi` inside a shrinking bisection bracket.
pub fn solve_chord_arc(chord: f64, length: f64) -> Result<(f64, f64)> {
    if !(chord.is_finite() && length.is_finite()) {
        return Err(Error::NonFinite("chord/length"));
    }
    if !(length > 0.0 && chord > 0.0) {
        return Err(Error::DegenerateInput("chord and rod length must be positive"));
    }
    let q = chord / length;
    if q >= 1.0 {
        return Err(Error::ImpossibleConfiguration);
    }
    if q > STRAIGHT_RATIO {
        return Err(Error::NearStraight);
    }
    let g = |phi: f64| sin(phi) - q * phi;
    let (mut lo, mut hi) = (PHI_MIN, PHI_MAX);
    if g(hi) >= 0.0 {
        // chord shorter than the bracket resolves: rod nearly closed into a loop
        return Err(Error::DegenerateInput("chord too short for the rod length"));
    }
    // sin(phi)/phi is decreasing, so g > 0 left of the root
    let mut phi = 0.5 * (lo + hi);
    for _ in 0..200 {
        let value = g(phi);
        if value > 0.0 {
            lo = phi;
        } else {
            hi = phi;
        }
        if value.abs() < 1e-15 || hi - lo < 1e-15 {
            break;
        }
        let slope = cos(phi) - q;
        let newton = phi - value / slope;
        phi = if slope != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    let theta = 2.0 * phi;
    Ok((length / theta, theta))
}

/// One rod configuration: feature, signed swept angle and the realized pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RodState {
    pub feature: ShapeFeature,
    pub theta: f64,
    pub pose: RobotPose,
}

fn arc_through(
    fixed: &Vec3,
    grasp: &Vec3,
    normal_hint: &Vec3,
    length: f64,
    winding: Winding,
) -> Result<(ShapeFeature, f64)> {
    let chord = grasp - fixed;
    let c = chord.norm();
    let (r, theta_abs) = solve_chord_arc(c, length)?;
    let c_hat = chord / c;
    let n = normal_hint - c_hat * normal_hint.dot(&c_hat);
    let n = Unit::try_new(n, 1e-6).ok_or(Error::DegenerateInput("arc plane normal parallel to the chord"))?;
    let long = theta_abs > PI;
    let ccw = winding == Winding::Counterclockwise;
    let side = if ccw != long { 1.0 } else { -1.0 };
    let apothem = sqrt((r * r - 0.25 * c * c).max(0.0));
    let center = fixed + chord * 0.5 + n.cross(&c_hat) * (side * apothem);
    Ok((ShapeFeature::new(r, center, n), winding.sign() * theta_abs))
}

/// Projects a commanded pose onto a rod configuration.
pub fn rod_from_pose(
    commanded: &RobotPose,
    fixed: &Vec3,
    length: f64,
    cal: &GraspCalibration,
    winding: Winding,
) -> Result<RodState> {
    if !commanded.is_finite() {
        return Err(Error::NonFinite("commanded pose"));
    }
    let grasp = commanded.position;
    let body = cal.body_from_effector(&rot_zyz(&commanded.euler));
    let hint = body.column(2).into_owned();
    let (feature, theta) = arc_through(fixed, &grasp, &hint, length, winding)?;
    let rb = body_frame(&feature, &grasp)?;
    let euler = zyz_from_rotation_near(&(cal.erb() * rb), &commanded.euler).angles;
    Ok(RodState {
        feature,
        theta,
        pose: RobotPose::new(euler, grasp),
    })
}

/// Samples `noise.samples` points at equal angular spacing from the fixed tip
/// through the signed sweep `theta`.
pub fn sample_cloud(
    feature: &ShapeFeature,
    theta: f64,
    fixed: &Vec3,
    noise: &CloudNoiseModel,
    seed: u64,
) -> PointCloud {
    let n = feature.normal.into_inner();
    let cf = fixed - feature.center;
    let in_plane = cf - n * n.dot(&cf);
    let start = Unit::try_new(in_plane, 1e-12).unwrap_or_else(|| {
        let seed_axis = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        Unit::new_normalize(n.cross(&seed_axis))
    });
    let m = noise.samples.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|i| {
            let angle = theta * i as f64 / (m - 1) as f64;
            let radial = axis_angle(&feature.normal, angle) * start.into_inner();
            let mut p = feature.center + radial * (feature.radius + noise.rod_radius_bias);
            if noise.sigma > 0.0 {
                let e = Vec3::new(
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                );
                p += e * noise.sigma;
            }
            p
        })
        .collect()
}

/// Initial scenario for [`RodPlant::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantSetup {
    pub fixed_point: Vec3,
    pub rod_length: f64,
    pub grasp: Vec3,
    /// Approximate plane normal; projected perpendicular to the chord.
    pub normal_hint: Vec3,
    pub winding: Winding,
    /// Initial gripper ZYZ angles; the grasp calibration absorbs them.
    pub euler: Vec3,
    pub mode: PlantMode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RodPlant {
    fixed: Vec3,
    length: f64,
    winding: Winding,
    pose: RobotPose,
    calibration: GraspCalibration,
    feature: ShapeFeature,
    /// Raw feature vector; in exact mode the normal is not renormalized.
    y: FeatureVector,
    theta: f64,
    mode: PlantMode,
    seed: u64,
    steps: u64,
    jacobian: JacobianOptions,
    topology: ArcTopology,
}

impl RodPlant {
    pub fn new(setup: &PlantSetup) -> Result<Self> {
        Self::with_options(setup, JacobianOptions::default())
    }

    pub fn with_options(setup: &PlantSetup, jacobian: JacobianOptions) -> Result<Self> {
        if !(setup.rod_length > 0.0) {
            return Err(Error::DegenerateInput("rod length must be positive"));
        }
        let (feature, theta) = arc_through(
            &setup.fixed_point,
            &setup.grasp,
            &setup.normal_hint,
            setup.rod_length,
            setup.winding,
        )?;
        let pose = RobotPose::new(setup.euler, setup.grasp);
        let calibration = init_calibration(&pose, &feature, &setup.grasp)?;
        let case = TopologyCase::from_parts(setup.winding == Winding::Counterclockwise, theta.abs() > PI);
        let topology = ArcTopology::new(case, setup.rod_length, setup.fixed_point, DEFAULT_DELTA)?;
        Ok(Self {
            fixed: setup.fixed_point,
            length: setup.rod_length,
            winding: setup.winding,
            pose,
            calibration,
            feature,
            y: feature.to_vector(),
            theta,
            mode: setup.mode,
            seed: setup.seed,
            steps: 0,
            jacobian,
            topology,
        })
    }

    pub fn pose(&self) -> &RobotPose {
        &self.pose
    }

    pub fn feature(&self) -> &ShapeFeature {
        &self.feature
    }

    /// Feature as a raw 7-vector (exact mode keeps it unnormalized).
    pub fn feature_vector(&self) -> FeatureVector {
        self.y
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn fixed_point(&self) -> Vec3 {
        self.fixed
    }

    pub fn rod_length(&self) -> f64 {
        self.length
    }

    pub fn winding(&self) -> Winding {
        self.winding
    }

    pub fn calibration(&self) -> &GraspCalibration {
        &self.calibration
    }

    pub fn mode(&self) -> PlantMode {
        self.mode
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Topology of the true rod at construction.
    pub fn true_topology(&self) -> &ArcTopology {
        &self.topology
    }

    /// Feature the current pose would produce; exact for `RodGeometry`.
    pub fn project(&self, commanded: &RobotPose) -> Result<RodState> {
        rod_from_pose(commanded, &self.fixed, self.length, &self.calibration, self.winding)
    }

    /// Point cloud of the current rod; seeded by the plant seed and step count.
    pub fn observe(&self, noise: &CloudNoiseModel) -> PointCloud {
        let seed = self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ self.steps;
        sample_cloud(&self.feature, self.theta, &self.fixed, noise, seed)
    }

    /// Advances the plant by commanding pose velocity `dx` for `dt` seconds.
    pub fn step(&self, dx: &PoseVector, dt: f64) -> Result<Self> {
        if !dx.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("pose velocity"));
        }
        let mut next = self.clone();
        next.steps += 1;
        match self.mode {
            PlantMode::RodGeometry => {
                let commanded = integrate_pose(&self.pose, dx, dt);
                let state = self.project(&commanded)?;
                next.pose = state.pose;
                next.feature = state.feature;
                next.y = state.feature.to_vector();
                next.theta = state.theta;
            }
            PlantMode::ExactShapeSpace => {
                let js = pose_shape_jacobian(
                    &self.y,
                    &self.pose.to_vector(),
                    &self.calibration,
                    &self.topology,
                    &self.jacobian,
                )?;
                let pinv = pseudoinverse(&DMatrix::from_column_slice(6, 7, js.j_s.as_slice()), PINV_TOLERANCE);
                let dy = FeatureVector::from_column_slice(
                    (pinv * DMatrix::from_column_slice(6, 1, dx.as_slice())).as_slice(),
                );
                next.y = self.y + dy * dt;
                next.feature = ShapeFeature::from_vector(&next.y)?;
                next.pose = integrate_pose(&self.pose, dx, dt);
                next.theta = self.winding.sign() * self.length / next.y[0];
            }
        }
        Ok(next)
    }
}
