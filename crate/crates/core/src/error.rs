use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// that the command-line front end surfaces verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant `{invariant}` violated (residual {residual:.3e})")]
    Invariant { invariant: &'static str, residual: f64 },

    #[error("degenerate lattice: {0}")]
    Degenerate(String),

    #[error("enumeration would exceed the capacity ceiling of {limit} vectors")]
    Capacity { limit: u64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("s = {re}+{im}i is a pole")]
    Pole { re: f64, im: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("result cannot be certified for {0}; pass the override flag for a best-effort answer")]
    Uncertified(String),

    #[error("missing field data: {0}")]
    MissingData(&'static str),

    #[error("quadrature did not converge: estimated error {err:.3e} > tolerance {tol:.3e}")]
    NoConvergence { err: f64, tol: f64 },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "E_IO",
            Error::Parse(_) => "E_PARSE",
            Error::Invariant { .. } => "E_INVARIANT",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Capacity { .. } => "E_CAPACITY",
            Error::Domain(_) => "E_DOMAIN",
            Error::Pole { .. } => "E_POLE",
            Error::Unsupported(_) => "E_UNSUPPORTED",
            Error::Uncertified(_) => "E_UNCERTIFIED",
            Error::MissingData(_) => "E_MISSING_DATA",
            Error::NoConvergence { .. } => "E_NO_CONVERGENCE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
