use thiserror::Error;

use crate::plane::AffinePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus {0} is outside the supported range [3, 2^31)")]
    OutOfRange(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different prime fields")]
    ModulusMismatch,
    #[error("the two points coincide")]
    CoincidentPoints,
    #[error("the line set contains a vertical line")]
    VerticalLinePresent,
    #[error("point {0} is sent to the line at infinity")]
    PointSentToInfinity(AffinePoint),
    #[error("a line is sent to the line at infinity")]
    LineSentToInfinity,
    #[error("projective map is singular")]
    SingularMap,
    #[error("construction needs 2ac < p, got 2*{a}*{c} >= {p}")]
    CharacteristicTooSmall { a: u64, c: u64, p: u64 },
    #[error("requested {requested} distinct elements but only {available} exist")]
    TooManyRequested { requested: u64, available: u64 },
    #[error("instance has no points")]
    EmptyInstance,
    #[error("extraction produced an empty grid")]
    EmptyGrid,
    #[error("point set and line set have no incidences")]
    NoIncidences,
    #[error("input set is empty")]
    EmptyInput,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("need at least two points")]
    TooFewPoints,
    #[error("need at least two data points, got {0}")]
    InsufficientData(usize),
    #[error("log-log fit requires positive values, got {0}")]
    NonPositiveValue(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
