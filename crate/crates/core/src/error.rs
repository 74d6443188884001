use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A geometric parameter was zero, negative or not finite.
    #[error("invalid parameter {name} = {value}: must be finite and strictly positive")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("resolution {got} is below the minimum of {min}")]
    ResolutionTooLow { got: usize, min: usize },

    #[error("invalid range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("calibration table: {0}")]
    Table(String),
}

pub type Result<T> = std::result::Result<T, Error>;
