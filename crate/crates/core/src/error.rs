use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field too large: degree {degree} exceeds bound {bound}")]
    FieldTooLarge { degree: usize, bound: usize },
    #[error("invalid number field: {0}")]
    InvalidField(String),
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid angle: {0}")]
    InvalidAngle(String),
    #[error("angle and length lists differ in length or have fewer than 3 entries")]
    LengthMismatch,
    #[error("angle sum is not (n-2)π")]
    AngleSum,
    #[error("edge vectors do not close up")]
    NotClosed,
    #[error("boundary is self-intersecting")]
    SelfIntersecting,
    #[error("side length is not positive")]
    NonpositiveLength,
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("surface was not produced by unfolding this polygon")]
    NotAnUnfolding,
    #[error("surface is disconnected")]
    Disconnected,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polygon has an angle other than π/2 or 3π/2")]
    NotK2,
    #[error("coefficients do not give integral periods")]
    NotAWitness,
    #[error("orbit hits a singularity before returning: {0}")]
    SaddleConnectionHit(String),
    #[error("length tie in Rauzy induction (saddle connection)")]
    Tie,
    #[error("interval length reached zero")]
    Degenerate,
    #[error("direction not certified periodic: {0}")]
    NotPeriodic(String),
    #[error("precision failure: {0}")]
    Precision(String),
    #[error("direction is parallel to the transversal")]
    ParallelTransversal,
    #[error("flow budget exhausted: {0}")]
    NoReturn(String),
    #[error("L is below the prong length L0 for this surface")]
    BelowL0,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable upper-case tag used in JSON output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::FieldTooLarge { .. } => "FIELD_TOO_LARGE",
            Error::InvalidField(_) => "INVALID_FIELD",
            Error::FieldMismatch => "FIELD_MISMATCH",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::InvalidAngle(_) => "INVALID_ANGLE",
            Error::LengthMismatch => "LENGTH_MISMATCH",
            Error::AngleSum => "ANGLE_SUM",
            Error::NotClosed => "NOT_CLOSED",
            Error::SelfIntersecting => "SELF_INTERSECTING",
            Error::NonpositiveLength => "NONPOSITIVE_LENGTH",
            Error::InvalidSurface(_) => "INVALID_SURFACE",
            Error::NotAnUnfolding => "NOT_AN_UNFOLDING",
            Error::Disconnected => "DISCONNECTED",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::NotK2 => "NOT_K2",
            Error::NotAWitness => "NOT_A_WITNESS",
            Error::SaddleConnectionHit(_) => "SADDLE_CONNECTION_HIT",
            Error::Tie => "TIE",
            Error::Degenerate => "DEGENERATE",
            Error::NotPeriodic(_) => "NOT_PERIODIC",
            Error::Precision(_) => "PRECISION",
            Error::ParallelTransversal => "PARALLEL_TRANSVERSAL",
            Error::NoReturn(_) => "NO_RETURN",
            Error::BelowL0 => "BELOW_L0",
            Error::Parse(_) => "PARSE",
        }
    }

    /// True for errors caused by the numerical engine rather than the input.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
