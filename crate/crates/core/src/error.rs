use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: pulse FWHM {fwhm_ps} ps spans fewer than 16 samples of {dt_ps} ps")]
    GridTooCoarse { fwhm_ps: f64, dt_ps: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("closed-form figures of merit need a symmetric medium: {0}")]
    AsymmetricMedium(String),

    #[error(
        "optical depth at the data edges is {edge_fraction:.3e} of the peak (limit {limit:.0e}); \
         the principal-value integral would be corrupted by truncation"
    )]
    TruncationRisk { edge_fraction: f64, limit: f64 },

    #[error(
        "solver resolution refused: {reason}; need nz >= {min_nz} and dt <= {max_dt_ps:.6} ps"
    )]
    Resolution {
        reason: String,
        min_nz: usize,
        max_dt_ps: f64,
    },

    #[error("ambiguous FWHM: {} half-maximum crossing pairs at {candidates:?}", candidates.len())]
    AmbiguousFwhm { candidates: Vec<(f64, f64)> },

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("invalid input data: {0}")]
    InvalidData(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures caused by the numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationRisk { .. }
                | Error::Resolution { .. }
                | Error::AmbiguousFwhm { .. }
                | Error::DegenerateCurve(_)
        )
    }
}
