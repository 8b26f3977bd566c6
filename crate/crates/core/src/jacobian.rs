//! Pose-shape Jacobian from implicit constraints.
//!
//! Two constraint maps tie the arc feature `y` to the end-effector pose `x`:
//!
//! * orientation, `h_O = T V1 - V2 = 0`, where `V1 = [d_C / r; n]` stacks the
//!   body-frame `X` and `Z` axes, `V2` stacks the `X` and `Z` columns of the
//!   end-effector rotation and `T = blockdiag(ERB, ERB)` is the fixed grasp
//!   offset;
//! * position, `h_P = (acos(eta) - |theta|, n . d_C, d_C . d_C - r^2) = 0` with
//!   `eta = CF . d_C / r^2`.
//!
//! Differentiating `h(y, x) = 0` gives `J1 dy + J2 dx = 0`, hence
//! `dx = -J2^+ J1 dy`.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6, SMatrix, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::geometry::{
    is_rotation, pseudoinverse, rot_zyz, FeatureVector, PoseVector, RobotPose, RotationMatrix, ShapeFeature, Vec3,
    PINV_TOLERANCE,
};
use crate::math::{acos, cos, sin, sqrt};
use crate::topology::{abs_theta_dr, ArcTopology, COSINE_TOLERANCE};

/// `|eta|` at or beyond this makes the position Jacobian singular.
pub const ETA_LIMIT: f64 = 1.0 - 1e-9;

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-6;

pub type Matrix6x7 = SMatrix<f64, 6, 7>;
pub type Matrix6x3 = SMatrix<f64, 6, 3>;
pub type Matrix3x7 = SMatrix<f64, 3, 7>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JacobianOptions {
    /// Use `d_C / |d_C|` in `V1` instead of approximating `|d_C| = r`.
    pub exact_norm: bool,
    /// Carry the grasp-position dependence of `h_O` into the orientation rows.
    ///
    /// `h_O` depends on the grasp through `d_C`, but its `J2` only spans the
    /// Euler angles. With coupling on, the orientation rows solve
    /// `J2_O dx_e = -(J1_O dy + dh_O/dp_G dx_p)` using the position rows'
    /// `dx_p`, which is the exact implicit-function solution on the
    /// constraint manifold. With it off, the dependence is dropped.
    pub grasp_coupling: bool,
}

impl Default for JacobianOptions {
    fn default() -> Self {
        Self {
            exact_norm: false,
            grasp_coupling: true,
        }
    }
}

/// Constant rotation between the grasped body frame and the end-effector frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspCalibration {
    erb: RotationMatrix,
}

impl GraspCalibration {
    pub fn new(erb: RotationMatrix) -> Result<Self> {
        if !is_rotation(&erb, 1e-9) {
            return Err(Error::InconsistentGeometry("grasp calibration is not a rotation"));
        }
        Ok(Self { erb })
    }

    pub fn erb(&self) -> &RotationMatrix {
        &self.erb
    }

    pub fn etb(&self) -> Matrix6<f64> {
        let mut t = Matrix6::zeros();
        t.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.erb);
        t.fixed_view_mut::<3, 3>(3, 3).copy_from(&self.erb);
        t
    }

    /// Body-frame orientation implied by an end-effector orientation.
    pub fn body_from_effector(&self, effector: &RotationMatrix) -> RotationMatrix {
        self.erb.transpose() * effector
    }
}

/// `ERB = R_E0 R_B0^T`, fixed for the rest of the run.
pub fn init_calibration(pose0: &RobotPose, feature0: &ShapeFeature, grasp0: &Vec3) -> Result<GraspCalibration> {
    let rb = crate::geometry::body_frame(feature0, grasp0)?;
    GraspCalibration::new(pose0.rotation() * rb.transpose())
}

struct Parts {
    r: f64,
    center: Vec3,
    n: Vec3,
    grasp: Vec3,
    euler: Vec3,
}

fn split(y: &FeatureVector, x: &PoseVector) -> Result<Parts> {
    if !y.iter().chain(x.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("constraint arguments"));
    }
    if !(y[0] > 0.0) {
        return Err(Error::InconsistentGeometry("radius must be positive"));
    }
    Ok(Parts {
        r: y[0],
        center: Vec3::new(y[1], y[2], y[3]),
        n: Vec3::new(y[4], y[5], y[6]),
        grasp: Vec3::new(x[3], x[4], x[5]),
        euler: Vec3::new(x[0], x[1], x[2]),
    })
}

fn v1_top(p: &Parts, opts: &JacobianOptions) -> Vec3 {
    let d = p.grasp - p.center;
    if opts.exact_norm {
        d / d.norm()
    } else {
        d / p.r
    }
}

/// `h_O = T V1 - V2`.
pub fn h_orientation(
    y: &FeatureVector,
    x: &PoseVector,
    cal: &GraspCalibration,
    opts: &JacobianOptions,
) -> Result<Vector6<f64>> {
    let p = split(y, x)?;
    let re = rot_zyz(&p.euler);
    let top = cal.erb * v1_top(&p, opts) - re.column(0);
    let bottom = cal.erb * p.n - re.column(2);
    Ok(Vector6::new(top.x, top.y, top.z, bottom.x, bottom.y, bottom.z))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientationJacobians {
    /// `dh_O / dy` (6x7).
    pub j1: Matrix6x7,
    /// `dh_O / d(x1, x2, x3)` (6x3).
    pub j2: Matrix6x3,
    /// `dh_O / d(x4, x5, x6)` (6x3); zero in the bottom block.
    pub j2_position: Matrix6x3,
}

pub fn orientation_jacobians(
    y: &FeatureVector,
    x: &PoseVector,
    cal: &GraspCalibration,
    opts: &JacobianOptions,
) -> Result<OrientationJacobians> {
    let p = split(y, x)?;
    let d = p.grasp - p.center;

    // d(V1 top)/dr and d(V1 top)/dp_C; d/dp_G is minus the latter
    let (col_r, dtop_dc) = if opts.exact_norm {
        let len = d.norm();
        let u = d / len;
        (Vec3::zeros(), -(Matrix3::identity() - u * u.transpose()) / len)
    } else {
        (-d / (p.r * p.r), -Matrix3::identity() / p.r)
    };
    let mut j1_tilde = Matrix6x7::zeros();
    j1_tilde.fixed_view_mut::<3, 1>(0, 0).copy_from(&col_r);
    j1_tilde.fixed_view_mut::<3, 3>(0, 1).copy_from(&dtop_dc);
    j1_tilde.fixed_view_mut::<3, 3>(3, 4).copy_from(&Matrix3::identity());
    let j1 = cal.etb() * j1_tilde;

    let (s1, c1) = (sin(p.euler.x), cos(p.euler.x));
    let (s2, c2) = (sin(p.euler.y), cos(p.euler.y));
    let (s3, c3) = (sin(p.euler.z), cos(p.euler.z));
    #[rustfmt::skip]
    let j2 = Matrix6x3::new(
        s1 * c2 * c3 + c1 * s3,  c1 * s2 * c3, c1 * c2 * s3 + s1 * c3,
        -c1 * c2 * c3 + s1 * s3, s1 * s2 * c3, s1 * c2 * s3 - c1 * c3,
        0.0,                     c2 * c3,      -s2 * s3,
        s1 * s2,                 -c1 * c2,     0.0,
        -c1 * s2,                -s1 * c2,     0.0,
        0.0,                     s2,           0.0,
    );

    let mut j2_position = Matrix6x3::zeros();
    j2_position
        .fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(cal.erb * (-dtop_dc)));
    Ok(OrientationJacobians { j1, j2, j2_position })
}

fn eta(p: &Parts, cf: &Vec3, d: &Vec3) -> f64 {
    cf.dot(d) / (p.r * p.r)
}

/// `h_P = (acos(eta) - |theta|, n . d_C, d_C . d_C - r^2)`.
///
/// `acos` only reports the unsigned angle between `CF` and `d_C`, so it is
/// compared with the magnitude of the signed swept angle.
pub fn h_position(y: &FeatureVector, x: &PoseVector, topo: &ArcTopology) -> Result<Vector3<f64>> {
    let p = split(y, x)?;
    let cf = topo.fixed_point() - p.center;
    let d = p.grasp - p.center;
    let e = crate::math::clamp_cosine(eta(&p, &cf, &d), COSINE_TOLERANCE)
        .ok_or(Error::InconsistentGeometry("acos argument out of range"))?;
    let theta = topo.theta(p.r)?;
    Ok(Vector3::new(acos(e) - theta.abs(), p.n.dot(&d), d.dot(&d) - p.r * p.r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionJacobians {
    /// `dh_P / dy` (3x7).
    pub j1: Matrix3x7,
    /// `dh_P / d(x4, x5, x6)` (3x3).
    pub j2: Matrix3<f64>,
}

/// Analytic derivatives of [`h_position`].
///
/// With `gamma = -1 / sqrt(1 - eta^2)`:
///
/// ```text
/// J1 = [ -2 gamma eta / r - d|theta|/dr   -gamma (CF + d_C)^T / r^2   0     ]
///      [  0                               -n^T                        d_C^T ]
///      [ -2 r                             -2 d_C^T                    0     ]
/// J2 = [ gamma CF / r^2,  n,  2 d_C ]^T
/// ```
///
/// `d|theta|/dr` is `-L/r^2` for short arcs and `+L/r^2` for long ones.
/// The `1/r^2` factors on the `gamma` rows come from `d eta`; they are checked
/// against central differences in the tests.
pub fn position_jacobians(y: &FeatureVector, x: &PoseVector, topo: &ArcTopology) -> Result<PositionJacobians> {
    let p = split(y, x)?;
    let cf = topo.fixed_point() - p.center;
    let d = p.grasp - p.center;
    let e = eta(&p, &cf, &d);
    if !(e.abs() < ETA_LIMIT) {
        return Err(Error::SingularConfiguration);
    }
    let gamma = -1.0 / sqrt(1.0 - e * e);
    let r2 = p.r * p.r;
    let dtheta_dr = abs_theta_dr(p.r, topo.arc_length(), topo.case());

    let mut j1 = Matrix3x7::zeros();
    j1[(0, 0)] = -2.0 * gamma * e / p.r - dtheta_dr;
    j1.fixed_view_mut::<1, 3>(0, 1)
        .copy_from(&(-(cf + d) * gamma / r2).transpose());
    j1.fixed_view_mut::<1, 3>(1, 1).copy_from(&(-p.n).transpose());
    j1.fixed_view_mut::<1, 3>(1, 4).copy_from(&d.transpose());
    j1[(2, 0)] = -2.0 * p.r;
    j1.fixed_view_mut::<1, 3>(2, 1).copy_from(&(-d * 2.0).transpose());

    let j2 = Matrix3::from_rows(&[(cf * gamma / r2).transpose(), p.n.transpose(), (d * 2.0).transpose()]);
    Ok(PositionJacobians { j1, j2 })
}

/// `J_S = [J_SO; J_SP]` mapping feature velocity to pose velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianBundle {
    pub j_so: Matrix3x7,
    pub j_sp: Matrix3x7,
    pub j_s: Matrix6x7,
}

fn pinv_static<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> SMatrix<f64, C, R> {
    let dynamic = DMatrix::from_column_slice(R, C, m.as_slice());
    SMatrix::<f64, C, R>::from_column_slice(pseudoinverse(&dynamic, PINV_TOLERANCE).as_slice())
}

pub fn pose_shape_jacobian(
    y: &FeatureVector,
    x: &PoseVector,
    cal: &GraspCalibration,
    topo: &ArcTopology,
    opts: &JacobianOptions,
) -> Result<JacobianBundle> {
    let pos = position_jacobians(y, x, topo)?;
    let ori = orientation_jacobians(y, x, cal, opts)?;
    let j_sp = -pinv_static(&pos.j2) * pos.j1;
    let rhs = if opts.grasp_coupling {
        ori.j1 + ori.j2_position * j_sp
    } else {
        ori.j1
    };
    let j_so = -pinv_static(&ori.j2) * rhs;
    let mut j_s = Matrix6x7::zeros();
    j_s.fixed_view_mut::<3, 7>(0, 0).copy_from(&j_so);
    j_s.fixed_view_mut::<3, 7>(3, 0).copy_from(&j_sp);
    if !j_s.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("pose-shape Jacobian"));
    }
    Ok(JacobianBundle { j_so, j_sp, j_s })
}

/// Central-difference Jacobian of `h` at `point`.
pub fn fd_jacobian<F>(h: F, point: &DVector<f64>, step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    if !(step > 0.0) {
        return Err(Error::DegenerateInput("finite-difference step must be positive"));
    }
    let rows = h(point)?.len();
    let mut out = DMatrix::zeros(rows, point.len());
    let mut probe = point.clone();
    for i in 0..point.len() {
        probe[i] = point[i] + step;
        let plus = h(&probe)?;
        probe[i] = point[i] - step;
        let minus = h(&probe)?;
        probe[i] = point[i];
        out.set_column(i, &((plus - minus) / (2.0 * step)));
    }
    Ok(out)
}

/// Which block of variables a finite-difference Jacobian is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wrt {
    Feature,
    Euler,
    Position,
}

/// Which constraint map to differentiate numerically.
#[derive(Debug, Clone, Copy)]
pub enum Constraint<'a> {
    Orientation(&'a GraspCalibration, JacobianOptions),
    Position(&'a ArcTopology),
}

/// [`fd_jacobian`] of one constraint map with respect to one variable block.
pub fn fd_constraint_jacobian(
    constraint: Constraint<'_>,
    wrt: Wrt,
    y: &FeatureVector,
    x: &PoseVector,
    step: f64,
) -> Result<DMatrix<f64>> {
    let eval = |yy: &FeatureVector, xx: &PoseVector| -> Result<DVector<f64>> {
        Ok(match constraint {
            Constraint::Orientation(cal, opts) => {
                DVector::from_column_slice(h_orientation(yy, xx, cal, &opts)?.as_slice())
            }
            Constraint::Position(topo) => DVector::from_column_slice(h_position(yy, xx, topo)?.as_slice()),
        })
    };
    match wrt {
        Wrt::Feature => fd_jacobian(
            |v| eval(&FeatureVector::from_column_slice(v.as_slice()), x),
            &DVector::from_column_slice(y.as_slice()),
            step,
        ),
        Wrt::Euler | Wrt::Position => {
            let offset = if wrt == Wrt::Euler { 0 } else { 3 };
            let base = DVector::from_column_slice(&x.as_slice()[offset..offset + 3]);
            fd_jacobian(
                |v| {
                    let mut xx = *x;
                    xx.fixed_rows_mut::<3>(offset).copy_from_slice(v.as_slice());
                    eval(y, &xx)
                },
                &base,
                step,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyCase;
    use crate::validation::random_consistent_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_diff<const R: usize, const C: usize>(a: &SMatrix<f64, R, C>, b: &DMatrix<f64>) -> f64 {
        assert_eq!(b.shape(), (R, C));
        let mut m: f64 = 0.0;
        for i in 0..R {
            for j in 0..C {
                m = m.max((a[(i, j)] - b[(i, j)]).abs());
            }
        }
        m
    }

    #[test]
    fn fd_on_simple_functions() {
        let p = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let grad = fd_jacobian(|v| Ok(DVector::from_element(1, v.dot(v))), &p, 1e-6).unwrap();
        assert!((grad.row(0).transpose() - DVector::from_vec(vec![2.0, 4.0, 6.0])).amax() < 1e-8);

        let a = DMatrix::from_row_slice(2, 3, &[1.0, -2.0, 0.5, 3.0, 0.0, -1.5]);
        let lin = fd_jacobian(|v| Ok(&a * v), &p, 1e-6).unwrap();
        assert!((lin - &a).amax() < 1e-8);
        assert!(fd_jacobian(|v| Ok(v.clone()), &p, 0.0).is_err());
    }

    #[test]
    fn calibration_examples() {
        let feature = ShapeFeature::new(0.3, Vec3::zeros(), Vec3::z_axis());
        let g = Vec3::new(0.3, 0.0, 0.0);
        let rb = crate::geometry::body_frame(&feature, &g).unwrap();
        let aligned = RobotPose::new(crate::geometry::zyz_from_rotation(&rb).angles, g);
        let cal = init_calibration(&aligned, &feature, &g).unwrap();
        assert!((cal.erb() - Matrix3::identity()).amax() < 1e-12);

        let rz = crate::geometry::axis_angle(&Vec3::z_axis(), core::f64::consts::FRAC_PI_2);
        let rotated = RobotPose::new(crate::geometry::zyz_from_rotation(&(rz * rb)).angles, g);
        let cal = init_calibration(&rotated, &feature, &g).unwrap();
        assert!((cal.erb() - rz).amax() < 1e-12);
        let etb = cal.etb();
        assert_eq!(etb.fixed_view::<3, 3>(0, 3), Matrix3::zeros());
        assert_eq!(etb.fixed_view::<3, 3>(3, 3), *cal.erb());
    }

    #[test]
    fn calibration_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for case in TopologyCase::ALL {
            let s = random_consistent_state(&mut rng, case);
            let rb = crate::geometry::body_frame(&s.feature, &s.pose.position).unwrap();
            assert!((s.calibration.erb() * rb - s.pose.rotation()).amax() < 1e-12);
        }
    }

    #[test]
    fn orientation_zero_on_aligned_frames() {
        let cal = GraspCalibration::new(Matrix3::identity()).unwrap();
        // R_E = identity: X column (1,0,0), Z column (0,0,1)
        let y = FeatureVector::from_column_slice(&[2.0, -2.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let x = PoseVector::zeros();
        let h = h_orientation(&y, &x, &cal, &JacobianOptions::default()).unwrap();
        assert!(h.norm() < 1e-15);
    }

    #[test]
    fn orientation_residual_on_consistent_and_perturbed_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let opts = JacobianOptions::default();
        for case in TopologyCase::ALL {
            let s = random_consistent_state(&mut rng, case);
            let h = h_orientation(&s.y, &s.x, &s.calibration, &opts).unwrap();
            assert!(h.norm() <= 1e-9, "{h}");
            let mut y = s.y;
            y[5] += 0.01;
            let h = h_orientation(&y, &s.x, &s.calibration, &opts).unwrap();
            assert!(h.norm() > 0.0 && h.norm() <= 0.02);
        }
    }

    #[test]
    fn printed_entries_present() {
        // J2 last row at x2 = pi/2 is (0, s2, 0)
        let cal = GraspCalibration::new(Matrix3::identity()).unwrap();
        let y = FeatureVector::from_column_slice(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let x = PoseVector::new(0.0, core::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0, 0.0);
        let o = orientation_jacobians(&y, &x, &cal, &JacobianOptions::default()).unwrap();
        assert!((o.j2.row(5) - nalgebra::RowVector3::new(0.0, 1.0, 0.0)).amax() < 1e-15);
        // r = 1, d_C = (1,0,0): first column top block is (-1, 0, 0)
        assert!((o.j1.fixed_view::<3, 1>(0, 0) - Vector3::new(-1.0, 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn position_residual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for case in TopologyCase::ALL {
            let s = random_consistent_state(&mut rng, case);
            assert!(h_position(&s.y, &s.x, &s.topology).unwrap().norm() <= 1e-9);

            let r = s.feature.radius;
            let d = s.pose.position - s.feature.center;
            let eps = 1e-5;
            let mut out = s.x;
            out.fixed_rows_mut::<3>(3)
                .copy_from(&(s.pose.position + d.normalize() * eps));
            let h = h_position(&s.y, &out, &s.topology).unwrap();
            assert!((h[2] - (2.0 * r * eps + eps * eps)).abs() < 1e-15);

            let mut lifted = s.x;
            lifted
                .fixed_rows_mut::<3>(3)
                .copy_from(&(s.pose.position + s.feature.normal.into_inner() * eps));
            let h = h_position(&s.y, &lifted, &s.topology).unwrap();
            assert!((h[1] - eps).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_position_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_consistent_state(&mut rng, TopologyCase::Case2);
        let pj = position_jacobians(&s.y, &s.x, &s.topology).unwrap();
        let d = s.pose.position - s.feature.center;
        assert_eq!(pj.j1[(2, 0)], -2.0 * s.feature.radius);
        for k in 0..3 {
            assert_eq!(pj.j1[(2, 1 + k)], -2.0 * d[k]);
            assert_eq!(pj.j1[(2, 4 + k)], 0.0);
            assert_eq!(pj.j2[(1, k)], s.feature.normal[k]);
        }
    }

    #[test]
    fn analytic_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for opts in [
            JacobianOptions::default(),
            JacobianOptions {
                exact_norm: true,
                grasp_coupling: true,
            },
        ] {
            for case in TopologyCase::ALL {
                for _ in 0..25 {
                    let s = random_consistent_state(&mut rng, case);
                    let o = orientation_jacobians(&s.y, &s.x, &s.calibration, &opts).unwrap();
                    let p = position_jacobians(&s.y, &s.x, &s.topology).unwrap();
                    let ori = Constraint::Orientation(&s.calibration, opts);
                    let pos = Constraint::Position(&s.topology);
                    let fd = |c, w| fd_constraint_jacobian(c, w, &s.y, &s.x, FD_STEP).unwrap();
                    assert!(max_diff(&o.j1, &fd(ori, Wrt::Feature)) < 1e-5);
                    assert!(max_diff(&o.j2, &fd(ori, Wrt::Euler)) < 1e-5);
                    assert!(max_diff(&o.j2_position, &fd(ori, Wrt::Position)) < 1e-5);
                    assert!(max_diff(&p.j1, &fd(pos, Wrt::Feature)) < 1e-5);
                    assert!(max_diff(&p.j2, &fd(pos, Wrt::Position)) < 1e-5);
                    assert!(fd(pos, Wrt::Euler).amax() == 0.0);
                }
            }
        }
    }

    #[test]
    fn bundle_shape_and_stacking() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let s = random_consistent_state(&mut rng, TopologyCase::Case3);
        let b = pose_shape_jacobian(&s.y, &s.x, &s.calibration, &s.topology, &JacobianOptions::default()).unwrap();
        assert_eq!(b.j_s.fixed_view::<3, 7>(0, 0), b.j_so);
        assert_eq!(b.j_s.fixed_view::<3, 7>(3, 0), b.j_sp);
        assert!(b.j_s.iter().all(|v| v.is_finite()));
        assert_eq!(b.j_s * FeatureVector::zeros(), PoseVector::zeros());
    }

    #[test]
    fn singular_when_grasp_opposite_fixed_tip() {
        let topo = ArcTopology::new(
            TopologyCase::Case1,
            core::f64::consts::PI,
            Vec3::new(1.0, 0.0, 0.0),
            0.2,
        )
        .unwrap();
        let y = FeatureVector::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let x = PoseVector::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0);
        assert_eq!(position_jacobians(&y, &x, &topo), Err(Error::SingularConfiguration));
    }
}
