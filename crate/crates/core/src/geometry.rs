//! Vectors, ZYZ Euler kinematics, the arc body frame and the SVD pseudoinverse.

use nalgebra::{DMatrix, Matrix3, SVector, Unit, Vector3, Vector6, SVD};

use crate::error::{Error, Result};
use crate::math::{atan2, cos, sin, sqrt, wrap_angle, PI, TAU};

pub type Vec3 = Vector3<f64>;
pub type UnitVec3 = Unit<Vector3<f64>>;
pub type RotationMatrix = Matrix3<f64>;
/// `y = [r, p_Cx, p_Cy, p_Cz, n_x, n_y, n_z]`.
pub type FeatureVector = SVector<f64, 7>;
/// `x = [x1, x2, x3, x4, x5, x6]`: ZYZ angles then grasp position.
pub type PoseVector = Vector6<f64>;

/// Relative singular-value cutoff used wherever a pseudoinverse is taken.
pub const PINV_TOLERANCE: f64 = 1e-10;

/// Below this `|sin x2|` the ZYZ decomposition is treated as gimbal-locked.
pub const GIMBAL_EPS: f64 = 1e-8;

/// End-effector pose: ZYZ Euler angles (rad) and Cartesian position (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotPose {
    pub euler: Vec3,
    pub position: Vec3,
}

impl RobotPose {
    pub fn new(euler: Vec3, position: Vec3) -> Self {
        Self { euler, position }
    }

    pub fn from_vector(x: &PoseVector) -> Self {
        Self {
            euler: Vec3::new(x[0], x[1], x[2]),
            position: Vec3::new(x[3], x[4], x[5]),
        }
    }

    pub fn to_vector(&self) -> PoseVector {
        PoseVector::new(
            self.euler.x,
            self.euler.y,
            self.euler.z,
            self.position.x,
            self.position.y,
            self.position.z,
        )
    }

    /// Copy with every angle wrapped to `(-pi, pi]`, for logging.
    pub fn wrapped(&self) -> Self {
        Self {
            euler: self.euler.map(wrap_angle),
            position: self.position,
        }
    }

    pub fn rotation(&self) -> RotationMatrix {
        rot_zyz(&self.euler)
    }

    pub fn is_finite(&self) -> bool {
        self.euler.iter().chain(self.position.iter()).all(|v| v.is_finite())
    }
}

/// Spatial arc feature: radius, circle center and unit plane normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeFeature {
    pub radius: f64,
    pub center: Vec3,
    pub normal: UnitVec3,
}

impl ShapeFeature {
    pub fn new(radius: f64, center: Vec3, normal: UnitVec3) -> Self {
        Self { radius, center, normal }
    }

    /// Builds a feature from a raw 7-vector, renormalizing the normal.
    pub fn from_vector(y: &FeatureVector) -> Result<Self> {
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("feature vector"));
        }
        if y[0] <= 0.0 {
            return Err(Error::InconsistentGeometry("radius must be positive"));
        }
        let n = Vec3::new(y[4], y[5], y[6]);
        let normal = Unit::try_new(n, 1e-12).ok_or(Error::DegenerateInput("zero normal"))?;
        Ok(Self {
            radius: y[0],
            center: Vec3::new(y[1], y[2], y[3]),
            normal,
        })
    }

    pub fn to_vector(&self) -> FeatureVector {
        let n = self.normal.as_ref();
        FeatureVector::from_column_slice(&[self.radius, self.center.x, self.center.y, self.center.z, n.x, n.y, n.z])
    }
}

/// `R_Z(x1) R_Y(x2) R_Z(x3)`, written out entrywise.
pub fn rot_zyz(euler: &Vec3) -> RotationMatrix {
    let (s1, c1) = (sin(euler.x), cos(euler.x));
    let (s2, c2) = (sin(euler.y), cos(euler.y));
    let (s3, c3) = (sin(euler.z), cos(euler.z));
    Matrix3::new(
        c1 * c2 * c3 - s1 * s3,
        -c1 * c2 * s3 - s1 * c3,
        c1 * s2,
        s1 * c2 * c3 + c1 * s3,
        -s1 * c2 * s3 + c1 * c3,
        s1 * s2,
        -s2 * c3,
        s2 * s3,
        c2,
    )
}

/// ZYZ angles recovered from a rotation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZyzAngles {
    pub angles: Vec3,
    /// Set when `|sin x2| < GIMBAL_EPS`; `x3` is then pinned to zero.
    pub gimbal: bool,
}

/// Inverse of [`rot_zyz`] with `x2` in `[0, pi]`.
pub fn zyz_from_rotation(r: &RotationMatrix) -> ZyzAngles {
    let s2 = sqrt(r[(0, 2)] * r[(0, 2)] + r[(1, 2)] * r[(1, 2)]);
    let x2 = atan2(s2, r[(2, 2)]);
    if s2 < GIMBAL_EPS {
        let x1 = if r[(2, 2)] > 0.0 {
            // R = Rz(x1 + x3)
            atan2(r[(1, 0)], r[(0, 0)])
        } else {
            // R = Rz(x1) Ry(pi) Rz(x3); first column is (-cos(x1 - x3), -sin(x1 - x3), 0)
            atan2(-r[(1, 0)], -r[(0, 0)])
        };
        return ZyzAngles {
            angles: Vec3::new(x1, x2, 0.0),
            gimbal: true,
        };
    }
    let x1 = atan2(r[(1, 2)], r[(0, 2)]);
    let x3 = atan2(r[(2, 1)], -r[(2, 0)]);
    ZyzAngles {
        angles: Vec3::new(x1, x2, x3),
        gimbal: false,
    }
}

/// Like [`zyz_from_rotation`] but picks the equivalent angle triple closest to
/// `reference`, so integrated (unwrapped) angles stay continuous.
pub fn zyz_from_rotation_near(r: &RotationMatrix, reference: &Vec3) -> ZyzAngles {
    let base = zyz_from_rotation(r);
    let a = base.angles;
    let unwrap = |v: f64, target: f64| v + TAU * crate::math::round((target - v) / TAU);
    let mut best = base;
    let mut best_dist = f64::INFINITY;
    // (x1, x2, x3) and (x1 + pi, -x2, x3 + pi) describe the same rotation.
    for candidate in [a, Vec3::new(a.x + PI, -a.y, a.z + PI)] {
        let c = Vec3::new(
            unwrap(candidate.x, reference.x),
            unwrap(candidate.y, reference.y),
            unwrap(candidate.z, reference.z),
        );
        let d = (c - reference).norm_squared();
        if d < best_dist {
            best_dist = d;
            best = ZyzAngles {
                angles: c,
                gimbal: base.gimbal,
            };
        }
    }
    best
}

/// Body frame at the grasp: `X` toward the grasp from the center, `Z` the
/// plane normal, `Y = Z x X`.
///
/// The center-to-grasp vector is projected into the arc plane first, so a
/// grasp slightly off the fitted plane still yields an orthonormal frame.
pub fn body_frame(feature: &ShapeFeature, grasp: &Vec3) -> Result<RotationMatrix> {
    let n = feature.normal.into_inner();
    let d = grasp - feature.center;
    let in_plane = d - n * n.dot(&d);
    let len = in_plane.norm();
    if !(len > 1e-9) {
        return Err(Error::DegenerateFrame);
    }
    let x = in_plane / len;
    let y = n.cross(&x);
    Ok(Matrix3::from_columns(&[x, y, n]))
}

/// Moore-Penrose pseudoinverse via SVD. Singular values below `tol * sigma_max`
/// are treated as zero.
pub fn pseudoinverse(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let svd = SVD::new(m.clone(), true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max <= 0.0 {
        return DMatrix::zeros(cols, rows);
    }
    let cutoff = tol * sigma_max;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut out = DMatrix::zeros(cols, rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            out += (v_t.row(k).transpose() * u.column(k).transpose()) / s;
        }
    }
    out
}

/// Checks orthonormal columns and `det = +1` within `tol`.
pub fn is_rotation(r: &RotationMatrix, tol: f64) -> bool {
    let gram = r.transpose() * r;
    (gram - Matrix3::identity()).abs().max() <= tol && (r.determinant() - 1.0).abs() <= tol
}

/// Rotation of angle `angle` about unit `axis` (Rodrigues).
pub fn axis_angle(axis: &UnitVec3, angle: f64) -> RotationMatrix {
    let k = axis.into_inner();
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * sin(angle) + kx * kx * (1.0 - cos(angle))
}
