use core::fmt;

/// Errors raised by model construction and evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Spatial dimension outside 1..=3.
    Dimension(usize),
    DimensionMismatch { expected: usize, found: usize },
    NonFinite(&'static str),
    InvalidShape(&'static str),
    InvalidSpeed(&'static str),
    InvalidMeasure(&'static str),
    InvalidWindow(&'static str),
    InvalidArgument(&'static str),
    /// The speed profile has no finite bound, so the speed constant M does not exist.
    UnboundedSpeed,
    /// The cumulative distance V is not strictly increasing.
    NonMonotoneSpeed,
    BeforeBirth { t: f64, birth: f64 },
    /// F never reached the requested level below the search ceiling.
    QuantileUnreachable { target: f64, ceiling: f64 },
    /// Enclosed-cube geometry needs b >= 2(H-1)a.
    EnclosedGeometry { a: f64, b: f64, h: f64 },
    /// A series did not converge within the summation cap.
    Unconverged { terms: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(d) => write!(f, "unsupported dimension {d} (expected 1, 2 or 3)"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite(what) => write!(f, "non-finite {what}"),
            Error::InvalidShape(why) => write!(f, "invalid shape: {why}"),
            Error::InvalidSpeed(why) => write!(f, "invalid speed profile: {why}"),
            Error::InvalidMeasure(why) => write!(f, "invalid birth measure: {why}"),
            Error::InvalidWindow(why) => write!(f, "invalid window: {why}"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
            Error::UnboundedSpeed => write!(f, "growth speed is unbounded, no finite constant M"),
            Error::NonMonotoneSpeed => write!(f, "cumulative distance V is not strictly increasing"),
            Error::BeforeBirth { t, birth } => {
                write!(f, "time {t} precedes the germ birth time {birth}")
            }
            Error::QuantileUnreachable { target, ceiling } => write!(
                f,
                "cone measure does not reach {target} below t = {ceiling} (degenerate measure?)"
            ),
            Error::EnclosedGeometry { a, b, h } => write!(
                f,
                "enclosed geometry requires b >= 2(H-1)a, got a = {a}, b = {b}, H = {h}"
            ),
            Error::Unconverged { terms } => write!(f, "series unconverged after {terms} terms"),
        }
    }
}

impl core::error::Error for Error {}
