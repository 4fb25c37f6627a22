use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its refinement cap. The best estimate is kept.
    #[error("quadrature did not converge: estimate {value} with error estimate {error:e}")]
    NonConvergence { value: f64, error: f64 },

    #[error(transparent)]
    Data(#[from] crate::model::DataError),

    #[error(transparent)]
    Sampler(#[from] crate::sampler::SamplerError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
