use thiserror::Error;

/// Errors raised by the library.
///
/// Decoder failures and CRC mismatches are not errors: they are ordinary
/// outcomes of a noisy link and are returned as values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{state}-state mean is infinite (shape {shape} <= 1)")]
    InfiniteMean { state: &'static str, shape: f64 },

    #[error("degenerate trace: all {count} samples are equal, shape is undefined")]
    DegenerateTrace { count: usize },

    #[error("trace contains no complete on/off runs")]
    EmptyTrace,

    #[error("infeasible channel: {0}")]
    InfeasibleChannel(String),

    #[error("no admissible RS code meets p_e <= {threshold:e} (best p_e {best_pe:e} with RS({best_n},{best_k}))")]
    InfeasibleCode {
        threshold: f64,
        best_pe: f64,
        best_n: usize,
        best_k: usize,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for the errors that mean "this scenario cannot be served" rather
    /// than "the input was malformed".
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleChannel(_) | Error::InfeasibleCode { .. } | Error::InfiniteMean { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
