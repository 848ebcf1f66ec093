use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument or constructed value violates a model invariant.
    #[error("{0}")]
    InvalidParameter(String),

    /// Occupation at or above one half: the level pair is inverted and has
    /// no positive temperature.
    #[error("population inversion: p = {0} has no positive temperature")]
    PopulationInversion(f64),

    #[error("degenerate spectrum: {0}")]
    Degenerate(String),

    #[error("no positive-work region: nu = {nu} does not exceed theta = {theta}")]
    NoExtraction { nu: f64, theta: f64 },

    #[error("no finite contact temperature: target energy {target} >= infinite-temperature energy {limit}")]
    UnreachableEnergy { target: f64, limit: f64 },

    #[error("canonical energy is not increasing in temperature near T = {temperature}")]
    NonMonotonic { temperature: f64 },

    #[error("{method} did not converge: {detail}")]
    NonConvergence {
        method: &'static str,
        detail: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the caller's inputs rather than by
    /// numerics or I/O.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::PopulationInversion(_)
                | Error::Degenerate(_)
                | Error::NoExtraction { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Json(_))
    }
}
