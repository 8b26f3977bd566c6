//! Numerical checks of the Jacobian against the constraint maps and the plant.
//!
//! These are used by the unit tests, the acceptance suite and the
//! `jacobian-check` command, so they return plain data rather than asserting.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SMatrix, Unit};
use rand::Rng;

use crate::controller::integrate_pose;
use crate::error::{Error, Result};
use crate::fitting::fit_arc;
use crate::geometry::{
    axis_angle, body_frame, zyz_from_rotation, FeatureVector, PoseVector, RobotPose, RotationMatrix, ShapeFeature,
    UnitVec3, Vec3,
};
use crate::jacobian::{
    fd_constraint_jacobian, h_orientation, h_position, init_calibration, orientation_jacobians, pose_shape_jacobian,
    position_jacobians, Constraint, GraspCalibration, JacobianOptions, Wrt, FD_STEP,
};
use crate::math::{sin, PI, TAU};
use crate::simulator::{rod_from_pose, CloudNoiseModel, RodPlant, RodState, Winding};
use crate::topology::{ArcTopology, TopologyCase, DEFAULT_DELTA};

/// A feature/pose pair on the constraint manifold, with everything needed to
/// evaluate both constraint maps and to move along the manifold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistentState {
    pub feature: ShapeFeature,
    pub pose: RobotPose,
    pub y: FeatureVector,
    pub x: PoseVector,
    pub calibration: GraspCalibration,
    pub topology: ArcTopology,
}

impl ConsistentState {
    pub fn from_rod(state: &RodState, calibration: GraspCalibration, fixed: Vec3, length: f64) -> Result<Self> {
        let case = TopologyCase::from_parts(state.theta > 0.0, state.theta.abs() > PI);
        Ok(Self {
            feature: state.feature,
            pose: state.pose,
            y: state.feature.to_vector(),
            x: state.pose.to_vector(),
            calibration,
            topology: ArcTopology::new(case, length, fixed, DEFAULT_DELTA)?,
        })
    }

    pub fn winding(&self) -> Winding {
        if self.topology.case().is_counterclockwise() {
            Winding::Counterclockwise
        } else {
            Winding::Clockwise
        }
    }

    /// Rod configuration reached by commanding `pose`.
    pub fn project(&self, pose: &RobotPose) -> Result<RodState> {
        rod_from_pose(
            pose,
            &self.topology.fixed_point(),
            self.topology.arc_length(),
            &self.calibration,
            self.winding(),
        )
    }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> UnitVec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return Unit::new_normalize(v);
        }
    }
}

fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix {
    axis_angle(&random_unit(rng), rng.random_range(0.0..PI))
}

/// Random state of the given case, away from the straight, closed-loop and
/// gimbal-lock singularities.
pub fn random_consistent_state<R: Rng + ?Sized>(rng: &mut R, case: TopologyCase) -> ConsistentState {
    loop {
        let r = rng.random_range(0.1..0.4);
        let center = Vec3::new(
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
        );
        let n = random_unit(rng);
        let seed_axis = random_unit(rng).into_inner();
        let Some(u) = Unit::try_new(seed_axis - n.into_inner() * n.dot(&seed_axis), 1e-3) else {
            continue;
        };
        let span = if case.is_long_arc() {
            rng.random_range(PI + 0.5..TAU - 0.5)
        } else {
            rng.random_range(0.5..PI - 0.5)
        };
        let theta = if case.is_counterclockwise() { span } else { -span };
        let fixed = center + u.into_inner() * r;
        let grasp = center + axis_angle(&n, theta) * u.into_inner() * r;
        let feature = ShapeFeature::new(r, center, n);
        let rb = body_frame(&feature, &grasp).expect("grasp lies on the circle");
        let erb = random_rotation(rng);
        let angles = zyz_from_rotation(&(erb * rb));
        if sin(angles.angles.y).abs() < 0.2 {
            continue;
        }
        let pose = RobotPose::new(angles.angles, grasp);
        let calibration = init_calibration(&pose, &feature, &grasp).expect("valid rotation");
        let topology = ArcTopology::new(case, r * span, fixed, DEFAULT_DELTA).expect("positive length");
        return ConsistentState {
            feature,
            pose,
            y: feature.to_vector(),
            x: pose.to_vector(),
            calibration,
            topology,
        };
    }
}

/// Names of the analytic blocks compared by [`fd_block_errors`].
pub const JACOBIAN_BLOCKS: [&str; 5] = ["hO_dy", "hO_deuler", "hO_dpos", "hP_dy", "hP_dpos"];

/// Largest entrywise `|analytic - central difference|` per block, in
/// [`JACOBIAN_BLOCKS`] order.
pub fn fd_block_errors(state: &ConsistentState, opts: &JacobianOptions) -> Result<[f64; 5]> {
    fn diff<const R: usize, const C: usize>(a: &SMatrix<f64, R, C>, b: &DMatrix<f64>) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..R {
            for j in 0..C {
                m = m.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        m
    }
    let o = orientation_jacobians(&state.y, &state.x, &state.calibration, opts)?;
    let p = position_jacobians(&state.y, &state.x, &state.topology)?;
    let ori = Constraint::Orientation(&state.calibration, *opts);
    let pos = Constraint::Position(&state.topology);
    let fd = |c, w| fd_constraint_jacobian(c, w, &state.y, &state.x, FD_STEP);
    Ok([
        diff(&o.j1, &fd(ori, Wrt::Feature)?),
        diff(&o.j2, &fd(ori, Wrt::Euler)?),
        diff(&o.j2_position, &fd(ori, Wrt::Position)?),
        diff(&p.j1, &fd(pos, Wrt::Feature)?),
        diff(&p.j2, &fd(pos, Wrt::Position)?),
    ])
}

/// Random states near a plant's current pose; configurations the plant or
/// the Jacobian cannot handle are counted, not returned.
pub fn scenario_states<R: Rng + ?Sized>(plant: &RodPlant, rng: &mut R, count: usize) -> (Vec<ConsistentState>, usize) {
    let mut states = Vec::new();
    let mut skipped = 0;
    for _ in 0..count {
        let mut pose = *plant.pose();
        pose.euler += Vec3::new(
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
            rng.random_range(-0.3..0.3),
        );
        pose.position += Vec3::new(
            rng.random_range(-0.05..0.05),
            rng.random_range(-0.05..0.05),
            rng.random_range(-0.05..0.05),
        );
        let state = plant
            .project(&pose)
            .and_then(|rod| {
                ConsistentState::from_rod(&rod, *plant.calibration(), plant.fixed_point(), plant.rod_length())
            })
            .and_then(|s| position_jacobians(&s.y, &s.x, &s.topology).map(|_| s));
        match state {
            Ok(s) => states.push(s),
            Err(_) => skipped += 1,
        }
    }
    (states, skipped)
}

/// Unit feature direction tangent to the constraint manifold, obtained by
/// central differences of the plant along pose direction `v`.
pub fn tangent_direction(state: &ConsistentState, v: &PoseVector) -> Result<FeatureVector> {
    let h = 1e-5;
    let plus = state.project(&integrate_pose(&state.pose, v, h))?;
    let minus = state.project(&integrate_pose(&state.pose, v, -h))?;
    let d = (plus.feature.to_vector() - minus.feature.to_vector()) / (2.0 * h);
    let n = d.norm();
    if !(n > 1e-9) {
        return Err(Error::DegenerateInput("pose direction does not move the rod"));
    }
    Ok(d / n)
}

/// `|h(y + eps dy, x + J_S eps dy)|` for each step size in `eps`.
pub fn consistency_residuals(
    state: &ConsistentState,
    direction: &FeatureVector,
    eps: &[f64],
    opts: &JacobianOptions,
) -> Result<Vec<f64>> {
    let js = pose_shape_jacobian(&state.y, &state.x, &state.calibration, &state.topology, opts)?.j_s;
    eps.iter()
        .map(|&e| {
            let dy = direction * e;
            let y = state.y + dy;
            let x = state.x + js * dy;
            let ho = h_orientation(&y, &x, &state.calibration, opts)?;
            let hp = h_position(&y, &x, &state.topology)?;
            Ok(crate::math::sqrt(ho.norm_squared() + hp.norm_squared()))
        })
        .collect()
}

/// Least-squares slope of `log(residual)` against `log(eps)`.
pub fn observed_order(eps: &[f64], residuals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(residuals)
        .map(|(e, r)| (crate::math::ln(*e), crate::math::ln(*r)))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Smooth commanded trajectory: each pose component oscillates around the
/// start with its own amplitude and frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedTrajectory {
    pub amplitude: PoseVector,
    pub frequency: PoseVector,
    pub steps: usize,
    pub dt: f64,
}

impl Default for ScriptedTrajectory {
    fn default() -> Self {
        Self {
            amplitude: PoseVector::new(0.2, 0.15, 0.25, 0.04, 0.03, 0.002),
            frequency: PoseVector::new(0.05, 0.07, 0.04, 0.06, 0.045, 0.08),
            steps: 200,
            dt: 0.1,
        }
    }
}

impl ScriptedTrajectory {
    pub fn pose_at(&self, start: &RobotPose, k: usize) -> RobotPose {
        let t = k as f64 * self.dt;
        let offset = PoseVector::from_fn(|i, _| self.amplitude[i] * sin(TAU * self.frequency[i] * t));
        RobotPose::from_vector(&(start.to_vector() + offset))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentAgreement {
    /// Range (max - min) of the feedback displacement.
    pub range: f64,
    /// Samples whose feedback displacement exceeded 10% of the range.
    pub samples: usize,
    pub agreeing: usize,
    /// False for components that barely move compared with their peers.
    pub included: bool,
}

impl ComponentAgreement {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            1.0
        } else {
            self.agreeing as f64 / self.samples as f64
        }
    }
}

/// Per-step normalized displacements, as plotted side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignSample {
    pub step: usize,
    pub feedback: PoseVector,
    pub computed: PoseVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignConsistency {
    pub components: [ComponentAgreement; 6],
    pub samples: Vec<SignSample>,
}

/// Drives the plant along `script`, fits each noisy cloud and integrates
/// `x_hat += J_S(y_k, x_k) (y_{k+1} - y_k)`; compares the signs of the
/// computed and fed-back displacements from the start pose.
pub fn sign_consistency(
    plant: &RodPlant,
    script: &ScriptedTrajectory,
    noise: &CloudNoiseModel,
    hemisphere_ref: &UnitVec3,
    opts: &JacobianOptions,
) -> Result<SignConsistency> {
    let start = *plant.pose();
    let mut fit = fit_arc(&plant.observe(noise), hemisphere_ref)?;
    let calibration = init_calibration(&start, &fit.feature, &start.position)?;
    let topology = ArcTopology::detect(
        &plant.observe(noise),
        &fit.feature,
        &plant.fixed_point(),
        &start.position,
        DEFAULT_DELTA,
    )?;
    let mut plant = plant.clone();
    let mut computed = PoseVector::zeros();
    let mut feedback_track = Vec::with_capacity(script.steps);
    let mut computed_track = Vec::with_capacity(script.steps);
    for k in 1..=script.steps {
        let y_prev = fit.feature.to_vector();
        let x_prev = plant.pose().to_vector();
        let target = script.pose_at(&start, k);
        let dx = (target.to_vector() - x_prev) / script.dt;
        plant = plant.step(&dx, script.dt)?;
        fit = fit_arc(&plant.observe(noise), &fit.feature.normal)?;
        let js = pose_shape_jacobian(&y_prev, &x_prev, &calibration, &topology, opts)?.j_s;
        computed += js * (fit.feature.to_vector() - y_prev);
        feedback_track.push(plant.pose().to_vector() - start.to_vector());
        computed_track.push(computed);
    }

    let range = |track: &[PoseVector], i: usize| {
        let (lo, hi) = track.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v[i]), hi.max(v[i]))
        });
        hi - lo
    };
    let ranges: [f64; 6] = core::array::from_fn(|i| range(&feedback_track, i));
    let angular_max = ranges[..3].iter().cloned().fold(0.0, f64::max);
    let linear_max = ranges[3..].iter().cloned().fold(0.0, f64::max);
    let components = core::array::from_fn(|i| {
        let peer_max = if i < 3 { angular_max } else { linear_max };
        let threshold = 0.1 * ranges[i];
        let mut samples = 0;
        let mut agreeing = 0;
        for (f, c) in feedback_track.iter().zip(&computed_track) {
            if f[i].abs() > threshold {
                samples += 1;
                if f[i].signum() == c[i].signum() {
                    agreeing += 1;
                }
            }
        }
        ComponentAgreement {
            range: ranges[i],
            samples,
            agreeing,
            included: ranges[i] >= 0.1 * peer_max,
        }
    });

    let scale = |track: &[PoseVector], i: usize| track.iter().map(|v| v[i].abs()).fold(0.0, f64::max);
    let fs: [f64; 6] = core::array::from_fn(|i| scale(&feedback_track, i));
    let cs: [f64; 6] = core::array::from_fn(|i| scale(&computed_track, i));
    let norm = |v: &PoseVector, s: &[f64; 6]| PoseVector::from_fn(|i, _| if s[i] > 0.0 { v[i] / s[i] } else { 0.0 });
    let samples = feedback_track
        .iter()
        .zip(&computed_track)
        .enumerate()
        .map(|(k, (f, c))| SignSample {
            step: k + 1,
            feedback: norm(f, &fs),
            computed: norm(c, &cs),
        })
        .collect();
    Ok(SignConsistency { components, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{PlantMode, PlantSetup};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_states_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let opts = JacobianOptions::default();
        for case in TopologyCase::ALL {
            for _ in 0..50 {
                let s = random_consistent_state(&mut rng, case);
                assert!(h_orientation(&s.y, &s.x, &s.calibration, &opts).unwrap().norm() <= 1e-9);
                assert!(h_position(&s.y, &s.x, &s.topology).unwrap().norm() <= 1e-9);
                let back = s.project(&s.pose).unwrap();
                assert!((back.feature.to_vector() - s.y).amax() < 1e-9);
                assert!((back.pose.to_vector() - s.x).amax() < 1e-9);
            }
        }
    }

    #[test]
    fn consistency_is_second_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eps = [1e-3, 5e-4, 2.5e-4];
        for case in TopologyCase::ALL {
            for _ in 0..5 {
                let s = random_consistent_state(&mut rng, case);
                let v = PoseVector::from_fn(|_, _| rng.random_range(-1.0..1.0));
                let dir = tangent_direction(&s, &v).unwrap();
                let res = consistency_residuals(&s, &dir, &eps, &JacobianOptions::default()).unwrap();
                let order = observed_order(&eps, &res);
                assert!(order >= 1.9, "{case} order {order} {res:?}");
            }
        }
    }

    #[test]
    fn jacobian_predicts_plant_to_first_order() {
        // J_S applied to the plant's feature change recovers the realized pose change
        let setup = PlantSetup {
            fixed_point: Vec3::zeros(),
            rod_length: 0.5,
            grasp: Vec3::new(0.38, 0.0, 0.18),
            normal_hint: Vec3::new(0.0, 0.6, 0.8),
            winding: Winding::Counterclockwise,
            euler: Vec3::new(0.4, 1.2, -0.3),
            mode: PlantMode::RodGeometry,
            seed: 0,
        };
        let plant = RodPlant::new(&setup).unwrap();
        let js = pose_shape_jacobian(
            &plant.feature_vector(),
            &plant.pose().to_vector(),
            plant.calibration(),
            plant.true_topology(),
            &JacobianOptions::default(),
        )
        .unwrap()
        .j_s;
        let dx = PoseVector::new(0.3, -0.2, 0.1, 0.05, 0.02, -0.04);
        let mut errs = Vec::new();
        for dt in [0.04, 0.02, 0.01, 0.005] {
            let next = plant.step(&dx, dt).unwrap();
            let dy = next.feature_vector() - plant.feature_vector();
            let dxr = next.pose().to_vector() - plant.pose().to_vector();
            errs.push((js * dy - dxr).norm() / dxr.norm());
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 0.9, "{errs:?}");
        }
    }

    #[test]
    fn fd_blocks_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in TopologyCase::ALL {
            let s = random_consistent_state(&mut rng, case);
            let e = fd_block_errors(&s, &JacobianOptions::default()).unwrap();
            assert!(e.iter().all(|v| *v < 1e-5), "{e:?}");
        }
    }

    #[test]
    fn scenario_sampling_skips_straight_rods() {
        let mut setup = PlantSetup {
            fixed_point: Vec3::zeros(),
            rod_length: 0.5,
            grasp: Vec3::new(0.38, 0.0, 0.18),
            normal_hint: Vec3::new(0.0, 0.6, 0.8),
            winding: Winding::Counterclockwise,
            euler: Vec3::new(0.4, 1.2, -0.3),
            mode: PlantMode::RodGeometry,
            seed: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (ok, skipped) = scenario_states(&RodPlant::new(&setup).unwrap(), &mut rng, 50);
        assert_eq!(ok.len() + skipped, 50);
        assert!(ok.len() > 40);
        setup.grasp = Vec3::new(0.4995, 0.0, 0.0);
        let (_, skipped) = scenario_states(&RodPlant::new(&setup).unwrap(), &mut rng, 50);
        assert!(skipped > 0);
    }
}
