//! Uniform time and detuning grids, complex envelopes, and the Fourier pair
//! linking them.
//!
//! Units: time in ps, detunings and linewidths in 1/ps, lengths in mm.
//! The detuning axis is angular (`dω = 2π / (n·dt)`); pulse bandwidths are
//! given as ordinary-frequency FWHM (1/ps, i.e. THz).
//!
//! Sign convention: fields carry `e^{i(ωt − kz)}` and an envelope is rebuilt
//! from its spectrum as `E(t) = (dω/2π) Σ Ẽ(ω) e^{−iωt}`, so a spectral factor
//! `e^{iωτ}` delays the envelope by `τ`. Spectra are stored in ascending
//! detuning order with zero detuning at index `n/2`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Speed of light in nm/ps.
pub const C_NM_PER_PS: f64 = 2.997_924_58e5;
/// Speed of light in mm/ps.
pub const C_MM_PER_PS: f64 = 0.299_792_458;

/// Temporal intensity FWHM × spectral intensity FWHM for a Gaussian pulse.
pub const GAUSSIAN_TBP: f64 = 2.0 * LN_2 / PI;
/// Temporal intensity FWHM × bandwidth for an ideal flat-top spectrum (sinc²).
pub const FLAT_TOP_TBP: f64 = 0.885_892_941_378_904;

/// Width of the cos² roll-off at each edge of a flat-top spectrum, as a
/// fraction of its FWHM bandwidth. Keeps the temporal tails integrable.
pub const FLAT_TOP_EDGE_FRACTION: f64 = 0.02;

/// Minimum number of samples across a synthesized pulse's FWHM.
pub const MIN_SAMPLES_PER_FWHM: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    dt: f64,
    n: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidGrid(format!("dt must be positive, got {dt}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "sample count must be a power of two >= 8, got {n}"
            )));
        }
        if !t_start.is_finite() {
            return Err(Error::InvalidGrid("t_start must be finite".into()));
        }
        Ok(Self { t_start, dt, n })
    }

    /// Grid with `t = 0` at index `n/2`.
    pub fn centered(dt: f64, n: usize) -> Result<Self> {
        Self::new(-((n / 2) as f64) * dt, dt, n)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn span(&self) -> f64 {
        self.n as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }

    pub fn frequency_grid(&self) -> FrequencyGrid {
        FrequencyGrid {
            d_omega: 2.0 * PI / (self.n as f64 * self.dt),
            n: self.n,
        }
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.n == other.n
            && rel_close(self.dt, other.dt, 1e-12)
            && (self.t_start - other.t_start).abs() <= 1e-9 * self.dt
    }
}

/// Angular detuning grid, ascending, with zero detuning at index `n/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    d_omega: f64,
    n: usize,
}

impl FrequencyGrid {
    pub fn new(d_omega: f64, n: usize) -> Result<Self> {
        if !(d_omega.is_finite() && d_omega > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "detuning step must be positive, got {d_omega}"
            )));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "sample count must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Self { d_omega, n })
    }

    /// Grid of `n` points covering at least `[-half_width, half_width]`.
    pub fn spanning(half_width: f64, n: usize) -> Result<Self> {
        Self::new(half_width / ((n / 2 - 1) as f64), n)
    }

    pub fn d_omega(&self) -> f64 {
        self.d_omega
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn zero_index(&self) -> usize {
        self.n / 2
    }

    pub fn detuning(&self, m: usize) -> f64 {
        (m as f64 - (self.n / 2) as f64) * self.d_omega
    }

    pub fn detunings(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.detuning(m)).collect()
    }

    pub fn min(&self) -> f64 {
        self.detuning(0)
    }

    pub fn max(&self) -> f64 {
        self.detuning(self.n - 1)
    }

    /// Time step of the conjugate time grid.
    pub fn conjugate_dt(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.d_omega)
    }

    pub fn same_as(&self, other: &FrequencyGrid) -> bool {
        self.n == other.n && rel_close(self.d_omega, other.d_omega, 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEnvelope {
    grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl ComplexEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidData(format!(
                "envelope has {} samples, grid has {}",
                samples.len(),
                grid.len()
            )));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::InvalidData("envelope contains non-finite samples".into()));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = (0..grid.len()).map(|k| f(grid.time(k))).collect();
        Self { grid, samples }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// `∫|E|² dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    /// Intensity-weighted mean time.
    pub fn centroid(&self) -> Result<f64> {
        let intensity = self.intensity();
        let total: f64 = intensity.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateCurve("envelope has zero energy".into()));
        }
        let moment: f64 = intensity
            .iter()
            .enumerate()
            .map(|(k, i)| self.grid.time(k) * i)
            .sum();
        Ok(moment / total)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let energy = self.energy();
        if !(energy > 0.0) {
            return Err(Error::DegenerateCurve("cannot normalize a zero envelope".into()));
        }
        Ok(self.scaled(1.0 / energy.sqrt()))
    }

    /// Linear interpolation onto another time grid, zero outside the source span.
    pub fn resample(&self, grid: TimeGrid) -> Self {
        let src = &self.grid;
        let last = src.len() - 1;
        let samples = (0..grid.len())
            .map(|k| {
                let x = (grid.time(k) - src.t_start()) / src.dt();
                if x < 0.0 || x > last as f64 {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (x.floor() as usize).min(last);
                if i == last {
                    return self.samples[last];
                }
                let frac = x - i as f64;
                self.samples[i] * (1.0 - frac) + self.samples[i + 1] * frac
            })
            .collect();
        Self { grid, samples }
    }

    /// Relative L2 distance `‖self − other‖ / ‖other‖`.
    pub fn relative_l2_error(&self, reference: &ComplexEnvelope) -> Result<f64> {
        if !self.grid.same_as(&reference.grid) {
            return Err(Error::GridMismatch("envelopes are on different time grids".into()));
        }
        let num: f64 = self
            .samples
            .iter()
            .zip(&reference.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = reference.samples.iter().map(|b| b.norm_sqr()).sum();
        if den == 0.0 {
            return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
        }
        Ok((num / den).sqrt())
    }
}

/// Spectrum of an envelope, remembering the conjugate time grid so the
/// inverse transform restores the original time origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEnvelope {
    time_grid: TimeGrid,
    samples: Vec<Complex64>,
}

impl SpectralEnvelope {
    pub fn new(time_grid: TimeGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != time_grid.len() {
            return Err(Error::InvalidData(format!(
                "spectrum has {} samples, grid has {}",
                samples.len(),
                time_grid.len()
            )));
        }
        Ok(Self { time_grid, samples })
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.time_grid.frequency_grid()
    }

    pub fn time_grid(&self) -> &TimeGrid {
        &self.time_grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    /// `∫|Ẽ|² dω/2π`, equal to the temporal energy by Parseval.
    pub fn energy(&self) -> f64 {
        let d_omega = self.grid().d_omega();
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * d_omega / (2.0 * PI)
    }

    /// Pointwise product with a spectral filter sampled on the same grid.
    pub fn filtered(&self, filter: &[Complex64]) -> Result<Self> {
        if filter.len() != self.samples.len() {
            return Err(Error::GridMismatch(format!(
                "filter has {} samples, spectrum has {}",
                filter.len(),
                self.samples.len()
            )));
        }
        Ok(Self {
            time_grid: self.time_grid,
            samples: self.samples.iter().zip(filter).map(|(s, h)| s * h).collect(),
        })
    }
}

fn alternate_sign(buf: &mut [Complex64]) {
    for s in buf.iter_mut().skip(1).step_by(2) {
        *s = -*s;
    }
}

/// `Ẽ(ω_m) = Σ_k E(t_k) e^{iω_m t_k} dt`.
pub fn forward_transform(env: &ComplexEnvelope) -> SpectralEnvelope {
    let grid = env.grid;
    let n = grid.len();
    let mut buf = env.samples.clone();
    alternate_sign(&mut buf);
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let freq = grid.frequency_grid();
    for (m, s) in buf.iter_mut().enumerate() {
        *s *= Complex64::cis(freq.detuning(m) * grid.t_start()) * grid.dt();
    }
    SpectralEnvelope {
        time_grid: grid,
        samples: buf,
    }
}

/// `E(t_k) = (dω/2π) Σ_m Ẽ(ω_m) e^{−iω_m t_k}`.
pub fn inverse_transform(spec: &SpectralEnvelope) -> ComplexEnvelope {
    let grid = spec.time_grid;
    let n = grid.len();
    let freq = grid.frequency_grid();
    let mut buf: Vec<Complex64> = spec
        .samples
        .iter()
        .enumerate()
        .map(|(m, s)| s * Complex64::cis(-freq.detuning(m) * grid.t_start()))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    alternate_sign(&mut buf);
    let scale = 1.0 / (n as f64 * grid.dt());
    for s in buf.iter_mut() {
        *s *= scale;
    }
    ComplexEnvelope { grid, samples: buf }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Gaussian,
    /// Flat-top spectral intensity with a short cos² roll-off; sinc-like in time.
    FlatTopSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseWidth {
    /// FWHM of the spectral intensity in ordinary frequency (1/ps).
    Bandwidth(f64),
    /// FWHM of the temporal intensity (ps).
    Duration(f64),
}

impl PulseWidth {
    fn value(&self) -> f64 {
        match *self {
            PulseWidth::Bandwidth(v) | PulseWidth::Duration(v) => v,
        }
    }
}

/// Transform-limited temporal intensity FWHM for a pulse description.
pub fn transform_limited_duration(shape: PulseShape, width: PulseWidth) -> f64 {
    let tbp = match shape {
        PulseShape::Gaussian => GAUSSIAN_TBP,
        PulseShape::FlatTopSpectrum => FLAT_TOP_TBP,
    };
    match width {
        PulseWidth::Duration(d) => d,
        PulseWidth::Bandwidth(b) => tbp / b,
    }
}

fn spectral_bandwidth(shape: PulseShape, width: PulseWidth) -> f64 {
    let tbp = match shape {
        PulseShape::Gaussian => GAUSSIAN_TBP,
        PulseShape::FlatTopSpectrum => FLAT_TOP_TBP,
    };
    match width {
        PulseWidth::Bandwidth(b) => b,
        PulseWidth::Duration(d) => tbp / d,
    }
}

/// Flat-top spectral intensity of FWHM `bandwidth` at ordinary frequency `nu`.
pub fn flat_top_intensity(nu: f64, bandwidth: f64) -> f64 {
    let edge = FLAT_TOP_EDGE_FRACTION * bandwidth;
    let x = nu.abs();
    let inner = 0.5 * (bandwidth - edge);
    if x <= inner {
        1.0
    } else if x < inner + edge {
        (0.5 * PI * (x - inner) / edge).cos().powi(2)
    } else {
        0.0
    }
}

/// Unit-energy pulse centred at `t = 0`, with quadratic spectral phase
/// `φ(ω) = gdd·ω²/2`.
pub fn synthesize_pulse(
    shape: PulseShape,
    width: PulseWidth,
    gdd_ps2: f64,
    grid: TimeGrid,
) -> Result<ComplexEnvelope> {
    let w = width.value();
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::Domain(format!("pulse width must be positive, got {w}")));
    }
    if !gdd_ps2.is_finite() {
        return Err(Error::Domain("quadratic spectral phase must be finite".into()));
    }
    let fwhm = transform_limited_duration(shape, width);
    if fwhm < MIN_SAMPLES_PER_FWHM * grid.dt() {
        return Err(Error::GridTooCoarse {
            fwhm_ps: fwhm,
            dt_ps: grid.dt(),
        });
    }
    let freq = grid.frequency_grid();
    let chirp = |m: usize| {
        let omega = freq.detuning(m);
        Complex64::cis(0.5 * gdd_ps2 * omega * omega)
    };

    let env = match shape {
        PulseShape::Gaussian => {
            let a = 2.0 * LN_2 / (fwhm * fwhm);
            let tl = ComplexEnvelope::from_fn(grid, |t| Complex64::new((-a * t * t).exp(), 0.0));
            if gdd_ps2 == 0.0 {
                tl
            } else {
                let spec = forward_transform(&tl);
                let phase: Vec<Complex64> = (0..grid.len()).map(chirp).collect();
                inverse_transform(&spec.filtered(&phase)?)
            }
        }
        PulseShape::FlatTopSpectrum => {
            let bandwidth = spectral_bandwidth(shape, width);
            let samples = (0..grid.len())
                .map(|m| {
                    let nu = freq.detuning(m) / (2.0 * PI);
                    chirp(m) * flat_top_intensity(nu, bandwidth).sqrt()
                })
                .collect();
            inverse_transform(&SpectralEnvelope::new(grid, samples)?)
        }
    };
    env.normalized()
}

/// Ordinary frequency (1/ps, THz) of light at vacuum wavelength `lambda_nm`.
pub fn wavelength_to_frequency(lambda_nm: f64) -> Result<f64> {
    if !(lambda_nm.is_finite() && lambda_nm > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda_nm}")));
    }
    Ok(C_NM_PER_PS / lambda_nm)
}

/// `c·Δλ/λ₀²`: a wavelength FWHM converted to ordinary frequency (1/ps).
pub fn wavelength_bandwidth_to_frequency(lambda0_nm: f64, delta_lambda_nm: f64) -> Result<f64> {
    if !(lambda0_nm.is_finite() && lambda0_nm > 0.0) {
        return Err(Error::Domain(format!(
            "centre wavelength must be positive, got {lambda0_nm}"
        )));
    }
    if !(delta_lambda_nm.is_finite() && delta_lambda_nm >= 0.0 && delta_lambda_nm < lambda0_nm) {
        return Err(Error::Domain(format!(
            "wavelength bandwidth must lie in [0, λ₀), got {delta_lambda_nm}"
        )));
    }
    Ok(C_NM_PER_PS * delta_lambda_nm / (lambda0_nm * lambda0_nm))
}

/// Wavevector 2π/λ₀ in rad/mm.
pub fn wavevector_per_mm(lambda0_nm: f64) -> Result<f64> {
    if !(lambda0_nm.is_finite() && lambda0_nm > 0.0) {
        return Err(Error::Domain(format!("wavelength must be positive, got {lambda0_nm}")));
    }
    Ok(2.0 * PI / (lambda0_nm * 1e-6))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
