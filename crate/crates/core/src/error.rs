use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("acausal kernel arguments: {0}")]
    Acausal(String),

    #[error("negative kernel radicand {radicand:e} (population inversion turned q(t) downward)")]
    NegativeRadicand { radicand: f64 },

    #[error("time {t} outside grid range [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
