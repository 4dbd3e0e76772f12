use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown code `{0}` (known: 15-1-7-3, 31-6-7-5, 23-1-7, 5-1-3)")]
    UnknownCode(String),

    #[error("posterior vanished on every grid cell")]
    DegeneratePosterior,

    #[error("every channel candidate was eliminated by the observations")]
    GridExhausted,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("all {0} trials were censored")]
    AllCensored(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
