use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial estimate {estimate:e}, error estimate {error:e})"
    )]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("degenerate truncation: serving-distance cdf {cdf:e} leaves no mass on one side")]
    DegenerateTruncation { cdf: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable code, used in CSV error rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "ERR_DOMAIN",
            Error::NonConvergence { .. } => "ERR_NONCONVERGENCE",
            Error::DegenerateTruncation { .. } => "ERR_DEGENERATE_TRUNCATION",
            Error::Unsupported(_) => "ERR_UNSUPPORTED",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
