use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every numerical stage of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// Not enough points, collinear points or a singular normal-equation system.
    DegenerateInput(&'static str),
    /// The body frame cannot be built (grasp point on top of the center).
    DegenerateFrame,
    /// Sector counts tie, or the grasp is (anti)parallel to the fixed tip.
    AmbiguousConfiguration(&'static str),
    /// Values that should describe one arc disagree beyond tolerance.
    InconsistentGeometry(&'static str),
    /// `|eta| -> 1`: fixed tip, center and grasp are collinear.
    SingularConfiguration,
    /// The chord is at least as long as the rod.
    ImpossibleConfiguration,
    /// The rod is too close to straight for the arc model.
    NearStraight,
    /// A NaN or infinity reached an input.
    NonFinite(&'static str),
    /// A statistic was requested over an empty set.
    Empty,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateInput(what) => write!(f, "degenerate input: {what}"),
            Error::DegenerateFrame => write!(f, "degenerate body frame: grasp coincides with center"),
            Error::AmbiguousConfiguration(what) => write!(f, "ambiguous configuration: {what}"),
            Error::InconsistentGeometry(what) => write!(f, "inconsistent geometry: {what}"),
            Error::SingularConfiguration => {
                write!(f, "singular configuration: fixed point, center and grasp collinear")
            }
            Error::ImpossibleConfiguration => write!(f, "impossible configuration: chord >= rod length"),
            Error::NearStraight => write!(f, "rod is nearly straight"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::Empty => write!(f, "empty input"),
        }
    }
}

impl core::error::Error for Error {}
