use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter a = {a} is outside the open interval ({min}, {max})")]
    ParameterOutOfRange { a: f64, min: f64, max: f64 },
    #[error("{p}/{q} is not a reduced fraction with positive denominator")]
    NonCoprime { p: i64, q: i64 },
    #[error("bisection bracket [{lo}, {hi}] does not straddle zero at a = {a} (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    BracketFailure { a: f64, lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("second derivative {g2} at the witness point is numerically zero")]
    DegenerateWitness { g2: f64 },
    #[error("need at least {needed} usable samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("width {width} at a = {a} is at the solver tolerance")]
    UnderflowedWidths { a: f64, width: f64 },
    #[error("series truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("inner series has nonzero constant term {re}+{im}i")]
    NonvanishingConstantTerm { re: f64, im: f64 },
    #[error("series order {order} is too low, need at least {needed}")]
    OrderTooLow { order: usize, needed: usize },
    #[error("multiplier is not a {q}-th root of unity")]
    NotRootOfUnity { q: u32 },
    #[error("q-th iterate equals the identity up to order {order}")]
    IdentityToTruncation { order: usize },
    #[error("first nonzero coefficient of the iterate has index {index}, not 1 mod {q}")]
    NonresonantLeadingTerm { index: usize, q: u32 },
    #[error("width law needs parabolic multiplicity 1, got {nu}")]
    MultiplicityNotOne { nu: usize },
    #[error("finite-difference step {h} collapsed")]
    StepUnderflow { h: f64 },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Variant name, used as the machine-readable error tag on stderr.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            Error::NonCoprime { .. } => "NonCoprime",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::DegenerateWitness { .. } => "DegenerateWitness",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::UnderflowedWidths { .. } => "UnderflowedWidths",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::NonvanishingConstantTerm { .. } => "NonvanishingConstantTerm",
            Error::OrderTooLow { .. } => "OrderTooLow",
            Error::NotRootOfUnity { .. } => "NotRootOfUnity",
            Error::IdentityToTruncation { .. } => "IdentityToTruncation",
            Error::NonresonantLeadingTerm { .. } => "NonresonantLeadingTerm",
            Error::MultiplicityNotOne { .. } => "MultiplicityNotOne",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BracketFailure { .. }
                | Error::DegenerateWitness { .. }
                | Error::InsufficientData { .. }
                | Error::UnderflowedWidths { .. }
                | Error::NotRootOfUnity { .. }
                | Error::IdentityToTruncation { .. }
                | Error::NonresonantLeadingTerm { .. }
                | Error::MultiplicityNotOne { .. }
                | Error::StepUnderflow { .. }
        )
    }
}
