//! Which way the rod sweeps from its fixed tip, and its frozen length.
//!
//! Seen along `+n`, the rod leaves the fixed tip `F` either counterclockwise
//! or clockwise, and reaches the grasp `G` either the short way (`|theta| < pi`)
//! or the long way around. The four combinations are told apart by counting
//! cloud points in four narrow sectors around the center: two hugging `CF` on
//! either side, one on the bisector of the short angle between `CF` and `CG`,
//! one opposite to it.

use crate::error::{Error, Result};
use crate::fitting::PointCloud;
use crate::geometry::{ShapeFeature, Vec3};
use crate::math::{acos, atan2, clamp_cosine, PI, TAU};

/// Cosine arguments may overshoot `[-1, 1]` by this much before it is an error.
pub const COSINE_TOLERANCE: f64 = 1e-6;

/// Default sector half-width.
pub const DEFAULT_DELTA: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TopologyCase {
    /// Counterclockwise, short arc: `theta = L / r`.
    Case1,
    /// Counterclockwise, long arc: `theta = 2 pi - L / r`.
    Case2,
    /// Clockwise, short arc: `theta = -L / r`.
    Case3,
    /// Clockwise, long arc: `theta = -2 pi + L / r`.
    Case4,
}

impl TopologyCase {
    pub const ALL: [TopologyCase; 4] = [Self::Case1, Self::Case2, Self::Case3, Self::Case4];

    pub fn from_parts(counterclockwise: bool, long_arc: bool) -> Self {
        match (counterclockwise, long_arc) {
            (true, false) => Self::Case1,
            (true, true) => Self::Case2,
            (false, false) => Self::Case3,
            (false, true) => Self::Case4,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Case1 => 1,
            Self::Case2 => 2,
            Self::Case3 => 3,
            Self::Case4 => 4,
        }
    }

    pub fn is_counterclockwise(self) -> bool {
        matches!(self, Self::Case1 | Self::Case2)
    }

    pub fn is_long_arc(self) -> bool {
        matches!(self, Self::Case2 | Self::Case4)
    }

    /// The case seen with the plane normal flipped.
    pub fn mirrored(self) -> Self {
        Self::from_parts(!self.is_counterclockwise(), self.is_long_arc())
    }
}

impl core::fmt::Display for TopologyCase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Case{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SectorCounts {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
}

fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    atan2(a.cross(b).norm(), a.dot(b))
}

/// Counts cloud points inside the four sectors of half-width `delta`.
pub fn sector_counts(
    cloud: &PointCloud,
    feature: &ShapeFeature,
    fixed: &Vec3,
    grasp: &Vec3,
    delta: f64,
) -> Result<SectorCounts> {
    let n = feature.normal.into_inner();
    let cf = fixed - feature.center;
    let dc = grasp - feature.center;
    let sep = angle_between(&cf, &dc);
    if !(sep > delta && sep < PI - delta) {
        return Err(Error::AmbiguousConfiguration(
            "grasp direction parallel to fixed-tip direction",
        ));
    }
    let v = n.cross(&cf);
    let axes = [cf + v * delta, cf - v * delta, cf + dc, -(cf + dc)];
    let mut counts = [0usize; 4];
    for s in cloud.iter() {
        let d = s - feature.center;
        for (count, axis) in counts.iter_mut().zip(&axes) {
            if angle_between(&d, axis) < delta {
                *count += 1;
            }
        }
    }
    Ok(SectorCounts {
        n1: counts[0],
        n2: counts[1],
        n3: counts[2],
        n4: counts[3],
    })
}

pub fn classify_case(counts: &SectorCounts) -> Result<TopologyCase> {
    if counts.n1 == counts.n2 {
        return Err(Error::AmbiguousConfiguration("N1 == N2"));
    }
    if counts.n3 == counts.n4 {
        return Err(Error::AmbiguousConfiguration("N3 == N4"));
    }
    Ok(TopologyCase::from_parts(counts.n1 > counts.n2, counts.n3 < counts.n4))
}

/// Initial rod length from the first fitted arc.
///
/// The angle between `C0F0` and `C0G0` is taken with the actual vector norms
/// rather than `r0^2`, which keeps the cosine inside `[-1, 1]` when the fitted
/// radius is slightly off.
pub fn initialize_arc_length(feature0: &ShapeFeature, fixed0: &Vec3, grasp0: &Vec3, case: TopologyCase) -> Result<f64> {
    let cf = fixed0 - feature0.center;
    let cg = grasp0 - feature0.center;
    let denom = cf.norm() * cg.norm();
    if !(denom > 0.0) {
        return Err(Error::DegenerateInput("fixed or grasp point on the center"));
    }
    let cosine = clamp_cosine(cf.dot(&cg) / denom, COSINE_TOLERANCE)
        .ok_or(Error::InconsistentGeometry("arc-length cosine out of range"))?;
    let short = feature0.radius * acos(cosine);
    Ok(if case.is_long_arc() {
        TAU * feature0.radius - short
    } else {
        short
    })
}

/// Signed swept angle for radius `r` and rod length `arc_length`.
pub fn theta(r: f64, arc_length: f64, case: TopologyCase) -> Result<f64> {
    if !(r > 0.0 && arc_length > 0.0) {
        return Err(Error::InconsistentGeometry("radius and arc length must be positive"));
    }
    let ratio = arc_length / r;
    let t = match case {
        TopologyCase::Case1 => ratio,
        TopologyCase::Case2 => TAU - ratio,
        TopologyCase::Case3 => -ratio,
        TopologyCase::Case4 => -TAU + ratio,
    };
    if t.abs() > TAU {
        return Err(Error::InconsistentGeometry("arc longer than a full circle"));
    }
    Ok(t)
}

/// `d|theta| / dr`: `-L/r^2` for short arcs, `+L/r^2` for long ones.
pub fn abs_theta_dr(r: f64, arc_length: f64, case: TopologyCase) -> f64 {
    let d = arc_length / (r * r);
    if case.is_long_arc() {
        d
    } else {
        -d
    }
}

/// Case label, rod length and fixed tip, frozen after initialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcTopology {
    case: TopologyCase,
    arc_length: f64,
    fixed_point: Vec3,
    delta: f64,
}

impl ArcTopology {
    pub fn new(case: TopologyCase, arc_length: f64, fixed_point: Vec3, delta: f64) -> Result<Self> {
        if !(arc_length > 0.0) {
            return Err(Error::InconsistentGeometry("arc length must be positive"));
        }
        if !(delta > 0.0 && delta < PI / 4.0) {
            return Err(Error::InconsistentGeometry("sector half-width must lie in (0, pi/4)"));
        }
        Ok(Self {
            case,
            arc_length,
            fixed_point,
            delta,
        })
    }

    /// Classifies the first frame and freezes the rod length from it.
    pub fn detect(
        cloud: &PointCloud,
        feature0: &ShapeFeature,
        fixed: &Vec3,
        grasp0: &Vec3,
        delta: f64,
    ) -> Result<Self> {
        let counts = sector_counts(cloud, feature0, fixed, grasp0, delta)?;
        let case = classify_case(&counts)?;
        let length = initialize_arc_length(feature0, fixed, grasp0, case)?;
        Self::new(case, length, *fixed, delta)
    }

    pub fn case(&self) -> TopologyCase {
        self.case
    }

    pub fn arc_length(&self) -> f64 {
        self.arc_length
    }

    pub fn fixed_point(&self) -> Vec3 {
        self.fixed_point
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta(&self, r: f64) -> Result<f64> {
        theta(r, self.arc_length, self.case)
    }

    /// Re-runs the classifier on a later frame. Returns the new case when it
    /// disagrees with the frozen one; the frozen case is never changed.
    pub fn flipped_case(&self, cloud: &PointCloud, feature: &ShapeFeature, grasp: &Vec3) -> Option<TopologyCase> {
        let counts = sector_counts(cloud, feature, &self.fixed_point, grasp, self.delta).ok()?;
        let case = classify_case(&counts).ok()?;
        (case != self.case).then_some(case)
    }
}
