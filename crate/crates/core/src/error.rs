use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite entry in input")]
    NonFinite,

    #[error("coordinate degeneracy at (r={r}, theta={theta}): phi = {phi:e}")]
    DomainError { r: f64, theta: f64, phi: f64 },

    #[error("jet order {requested} requested, only {available} available")]
    JetOrder { requested: u8, available: u8 },

    #[error("unknown catalog name `{0}`")]
    UnknownCatalogName(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("twist vanishes at (r={r}, theta={theta}); inequality undefined")]
    TwistZero { r: f64, theta: f64 },

    #[error("vector field is not unit length (|g(V,V)| - 1 = {0:e})")]
    NotUnitLength(f64),

    #[error("empty grid")]
    EmptyGrid,

    #[error("empty curvature profile")]
    EmptyProfile,

    #[error("inadmissible family parameters: {0}")]
    InadmissibleParams(String),

    #[error("energy drift {drift:e} exceeded tolerance at r = {r}")]
    EnergyDriftExceeded { r: f64, drift: f64 },

    #[error("phi = h(theta) * omega_r vanishes at r = {0}")]
    PhiVanishes(f64),

    #[error("geodesic left the admissible domain at s = {s}")]
    BlowUp { s: f64 },

    #[error("step size underflow at s = {s}")]
    StepFailure { s: f64 },

    #[error("metric is already Lorentzian")]
    AlreadyLorentzian,

    #[error("operation requires {expected} signature")]
    SignatureMismatch { expected: &'static str },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Process exit codes used by the command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: parse failures, unknown names, invalid parameters.
    Config,
    /// A numerical failure inside the geometry (degenerate chart, step failure).
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. }
            | Error::UnknownCatalogName(_)
            | Error::BadParams(_)
            | Error::InadmissibleParams(_)
            | Error::AlreadyLorentzian
            | Error::SignatureMismatch { .. }
            | Error::EmptyGrid
            | Error::EmptyProfile
            | Error::Io(_) => ErrorClass::Config,
            _ => ErrorClass::Numeric,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Config => 2,
            ErrorClass::Numeric => 3,
        }
    }
}
