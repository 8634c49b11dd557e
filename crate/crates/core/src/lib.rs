//! Slow-light pulse propagation through a two-line Raman medium.
//!
//! The crate covers the closed-form figures of merit of a symmetric Lorentzian
//! doublet, Kramers–Kronig reconstruction of dispersion from absorption data,
//! frequency-domain and Maxwell–Bloch time-domain propagation, and the
//! cross-correlation analysis used to turn fields into delays and durations.

pub mod analysis;
pub mod error;
pub mod fd;
pub mod io;
pub mod kk;
pub mod medium;
pub mod spectral;
pub mod td;

pub use error::{Error, Result};
pub use kk::{OpticalDepthSpectrum, Susceptibility};
pub use medium::{FiguresOfMerit, LineParams, RamanMedium};
pub use spectral::{ComplexEnvelope, FrequencyGrid, SpectralEnvelope, TimeGrid};
