use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("unknown form label {0}")]
    UnknownForm(String),
    #[error("unsupported twist of {form} by character mod {modulus} (index {index})")]
    UnsupportedTwist { form: String, modulus: u64, index: usize },
    #[error("degenerate interval: {0}")]
    DegenerateInterval(String),
    #[error("budget exhausted in {what}: achieved error {achieved:e}")]
    Budget { what: &'static str, achieved: f64 },
    #[error("coefficient table too short: need {need}, have {have}")]
    TableTooShort { need: usize, have: usize },
    #[error("not coprime: gcd({0}, {1}) != 1")]
    NotCoprime(i64, i64),
    #[error("pole of gamma at {0}")]
    Pole(f64),
    #[error("noise floor: {0}")]
    NoiseFloor(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::UnsupportedTwist { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
