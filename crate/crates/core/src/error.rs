use std::path::PathBuf;

/// Errors raised by the numerical kernels, the pipeline stages and the I/O layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("series did not converge after {terms} terms (partial sum {partial_sum:e})")]
    SeriesConvergence { partial_sum: f64, terms: usize },

    #[error("quadrature did not converge: estimated error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("singular radius: J+ vanishes at r = {r:e}")]
    SingularRadius { r: f64 },

    #[error("ambiguous rotation: image is azimuthally uniform")]
    AmbiguousRotation,

    #[error("fit did not converge: {message} (best cost {best_cost:e}, D = {best_d}, dkz = {best_dkz:e}, phi0 = {best_phi0})")]
    FitConvergence {
        message: String,
        best_cost: f64,
        best_d: f64,
        best_dkz: f64,
        best_phi0: f64,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the numerical non-convergence family.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::SeriesConvergence { .. }
                | Error::Quadrature { .. }
                | Error::FitConvergence { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
