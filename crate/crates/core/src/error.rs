use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what} = {value} outside domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("unsupported state kind: {0}")]
    Unsupported(String),
    #[error("exclusion band half-width {0} leaves no measure")]
    DegenerateBand(f64),
    #[error("every sample was rejected")]
    AllRejected,
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("model inconsistency: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by numeric domains rather than malformed input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Parameter(_)
                | Error::DegenerateBand(_)
                | Error::AllRejected
                | Error::Bracket { .. }
                | Error::Inconsistent(_)
        )
    }
}
