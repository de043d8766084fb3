use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter or argument outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A coefficient, grid point or table entry needed by the computation is missing.
    #[error("incomplete input: missing {0}")]
    IncompleteInput(String),

    #[error("no moment oracle available for measure {measure}")]
    UnsupportedOracle { measure: usize },

    /// The eigenvalues could not be certified real at this precision.
    #[error("non-real eigenvalue near {near} (imaginary part {imag}); retry with more digits")]
    RealityFailure { near: String, imag: String },

    #[error(
        "coincident roots near {near} (separation {gap}); the system is not perfect at this size"
    )]
    Multiplicity { near: String, gap: String },

    #[error(
        "{which} residual {residual} exceeds bound {bound} at node {node}; retry with more digits"
    )]
    Residual {
        which: &'static str,
        node: String,
        residual: String,
        bound: String,
    },

    #[error("inner product of left and right eigenvectors vanishes at node {node}")]
    InnerProductCollapse { node: String },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("integrand failed at node {node}: {reason}")]
    Integrand { node: String, reason: String },

    #[error("root polishing did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that stem from arithmetic (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::RealityFailure { .. }
                | Error::Multiplicity { .. }
                | Error::Residual { .. }
                | Error::InnerProductCollapse { .. }
                | Error::Singular(_)
                | Error::Integrand { .. }
                | Error::NoConvergence(_)
        )
    }
}
