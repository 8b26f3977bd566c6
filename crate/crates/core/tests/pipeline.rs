//! End-to-end checks across fitting, topology, Jacobian and plant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shapeservo_core::controller::{integrate_pose, ServoTarget};
use shapeservo_core::fitting::fit_arc;
use shapeservo_core::jacobian::{h_orientation, h_position, pose_shape_jacobian};
use shapeservo_core::servo::{run_servo_loop, EstimatorMode, ServoConfig, Termination};
use shapeservo_core::simulator::{CloudNoiseModel, PlantMode, PlantSetup};
use shapeservo_core::validation::random_consistent_state;
use shapeservo_core::{ArcTopology, JacobianOptions, PoseVector, RodPlant, TopologyCase, Vec3, Winding};

fn setup(winding: Winding, mode: PlantMode) -> PlantSetup {
    PlantSetup {
        fixed_point: Vec3::new(0.1, -0.2, 0.05),
        rod_length: 0.6,
        grasp: Vec3::new(0.45, -0.1, 0.25),
        normal_hint: Vec3::new(0.2, -0.5, 0.8),
        winding,
        euler: Vec3::new(-0.7, 0.9, 0.4),
        mode,
        seed: 11,
    }
}

#[test]
fn fitted_first_frame_recovers_plant_topology() {
    for winding in [Winding::Counterclockwise, Winding::Clockwise] {
        let plant = RodPlant::new(&setup(winding, PlantMode::RodGeometry)).unwrap();
        let cloud = plant.observe(&CloudNoiseModel::default());
        let fit = fit_arc(&cloud, &plant.feature().normal).unwrap();
        let topo =
            ArcTopology::detect(&cloud, &fit.feature, &plant.fixed_point(), &plant.pose().position, 0.2).unwrap();
        assert_eq!(topo.case(), plant.true_topology().case());
        assert!((topo.arc_length() - 0.6).abs() / 0.6 < 0.01);
    }
}

#[test]
fn plant_states_stay_on_both_constraints() {
    let plant = RodPlant::new(&setup(Winding::Clockwise, PlantMode::RodGeometry)).unwrap();
    let mut p = plant.clone();
    for k in 0..50 {
        let dx = PoseVector::new(0.05, -0.03, 0.04, 0.01 * (k as f64 * 0.3).sin(), 0.01, -0.005);
        p = p.step(&dx, 0.1).unwrap();
        let y = p.feature_vector();
        let x = p.pose().to_vector();
        assert!(
            h_orientation(&y, &x, p.calibration(), &JacobianOptions::default())
                .unwrap()
                .norm()
                <= 1e-9
        );
        assert!(h_position(&y, &x, p.true_topology()).unwrap().norm() <= 1e-9);
    }
}

#[test]
fn exact_mode_tracks_truth_estimator() {
    for winding in [Winding::Counterclockwise, Winding::Clockwise] {
        let plant = RodPlant::new(&setup(winding, PlantMode::ExactShapeSpace)).unwrap();
        let cmd = integrate_pose(plant.pose(), &PoseVector::new(0.1, 0.05, -0.1, 0.02, 0.03, -0.02), 1.0);
        let target = ServoTarget::new(&plant.project(&cmd).unwrap().feature);
        let cfg = ServoConfig {
            estimator: EstimatorMode::Truth,
            max_steps: 300,
            tolerance: 0.0,
            ..ServoConfig::default()
        };
        let run = run_servo_loop(plant, &target, &cfg).unwrap();
        assert_eq!(run.termination, Termination::MaxSteps);
        let e: Vec<f64> = run.records.iter().map(|r| r.errors.e_norm).collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}

#[test]
fn jacobian_is_finite_across_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in TopologyCase::ALL {
        for _ in 0..20 {
            let s = random_consistent_state(&mut rng, case);
            let b = pose_shape_jacobian(&s.y, &s.x, &s.calibration, &s.topology, &JacobianOptions::default()).unwrap();
            assert!(b.j_s.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn clockwise_long_arc_servo_converges() {
    // grasp close to the fixed tip: chord/L below 2/pi, so the arc is long
    let mut s = setup(Winding::Clockwise, PlantMode::RodGeometry);
    s.grasp = Vec3::new(0.25, -0.15, 0.12);
    let plant = RodPlant::new(&s).unwrap();
    assert_eq!(plant.true_topology().case(), TopologyCase::Case4);
    let cmd = integrate_pose(
        plant.pose(),
        &PoseVector::new(0.05, -0.05, 0.05, 0.01, -0.01, 0.01),
        1.0,
    );
    let target = ServoTarget::new(&plant.project(&cmd).unwrap().feature);
    let cfg = ServoConfig {
        noise: CloudNoiseModel::noiseless(200),
        max_steps: 1000,
        ..ServoConfig::default()
    };
    let run = run_servo_loop(plant, &target, &cfg).unwrap();
    assert_eq!(run.topology.case(), TopologyCase::Case4);
    assert!(run.converged(), "{:?} {}", run.termination, run.last().errors.e_norm);
}
