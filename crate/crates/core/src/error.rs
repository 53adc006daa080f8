use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A denominator fell below the pole threshold.
    #[error("resonance pole: |{what}| = {magnitude:e} is below threshold {threshold:e}")]
    Pole {
        what: &'static str,
        magnitude: f64,
        threshold: f64,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Successive Richardson levels disagree; the step straddles structure
    /// the stencil cannot resolve.
    #[error("finite-difference step too large: levels differ by {relative:e} (relative)")]
    StepTooLarge { relative: f64 },

    #[error("invalid scan spec: {0}")]
    InvalidSpec(String),

    #[error("quantity {quantity} masked at {masked} of {total} grid points")]
    AllPoles {
        quantity: String,
        masked: usize,
        total: usize,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors raised while evaluating a single grid point. The scan engine
    /// masks these instead of aborting.
    pub fn is_pointwise(&self) -> bool {
        matches!(
            self,
            Error::Pole { .. } | Error::StepTooLarge { .. } | Error::DegenerateInput(_)
        )
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::AllPoles { .. } => 3,
            Error::Io { .. } => 4,
            _ => 2,
        }
    }
}
