//! Dispersion from absorption: ingestion of measured absorption spectra and a
//! principal-value Hilbert transform giving `Re χ` from `Im χ`.
//!
//! With `χ = i c/(Γ − i(ω − ω₀))` the pair obeys `Re χ = −H[Im χ]`, where
//! `H[f](x) = (1/π) PV∫ f(y)/(x − y) dy`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::medium::RamanMedium;
use crate::spectral::{FrequencyGrid, C_NM_PER_PS};

/// Largest edge depth, relative to the peak, accepted without `force_taper`.
pub const EDGE_DECAY_LIMIT: f64 = 0.01;
/// Fraction of the measured support rolled off by the raised-cosine taper.
pub const TAPER_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorptionKind {
    /// Fractional absorption `A = 1 − I_on/I_off`.
    Absorption,
    /// Optical depth `d = −ln(1 − A)`.
    OpticalDepth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionRecord {
    pub wavelength_nm: f64,
    pub value: f64,
}

/// Optical depth `d(ω) = α(ω)L` on a detuning grid about `center_wavelength_nm`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalDepthSpectrum {
    grid: FrequencyGrid,
    depth: Vec<f64>,
    center_wavelength_nm: f64,
    support: (f64, f64),
}

impl OpticalDepthSpectrum {
    /// Spectrum defined over the whole grid.
    pub fn new(grid: FrequencyGrid, depth: Vec<f64>, center_wavelength_nm: f64) -> Result<Self> {
        let half = (grid.len() / 2) as f64 * grid.d_omega();
        Self::with_support(grid, depth, center_wavelength_nm, (-half, half))
    }

    /// Spectrum whose data are only meaningful on `support = (lo, hi)`.
    pub fn with_support(
        grid: FrequencyGrid,
        depth: Vec<f64>,
        center_wavelength_nm: f64,
        support: (f64, f64),
    ) -> Result<Self> {
        if depth.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "depth has {} samples, grid has {}",
                depth.len(),
                grid.len()
            )));
        }
        if depth.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidData(
                "optical depth must be finite and non-negative".into(),
            ));
        }
        if !(center_wavelength_nm.is_finite() && center_wavelength_nm > 0.0) {
            return Err(Error::Domain(format!(
                "centre wavelength must be positive, got {center_wavelength_nm}"
            )));
        }
        if !(support.1 > support.0) {
            return Err(Error::InvalidData("empty spectral support".into()));
        }
        Ok(Self {
            grid,
            depth,
            center_wavelength_nm,
            support,
        })
    }

    /// `k₀L·Im χ` of an analytic medium.
    pub fn from_medium(medium: &RamanMedium, grid: FrequencyGrid) -> Result<Self> {
        let depth = grid
            .detunings()
            .into_iter()
            .map(|w| medium.optical_depth(w).max(0.0))
            .collect();
        let lambda_nm = 2.0 * PI / medium.k0() * 1e6;
        Self::new(grid, depth, lambda_nm)
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn depth(&self) -> &[f64] {
        &self.depth
    }

    pub fn center_wavelength_nm(&self) -> f64 {
        self.center_wavelength_nm
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn peak(&self) -> f64 {
        self.depth.iter().cloned().fold(0.0, f64::max)
    }

    /// Largest depth among the samples closest to the support edges, relative
    /// to the peak.
    pub fn edge_fraction(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let inside: Vec<usize> = (0..self.grid.len())
            .filter(|&m| {
                let w = self.grid.detuning(m);
                w >= self.support.0 && w <= self.support.1
            })
            .collect();
        match (inside.first(), inside.last()) {
            (Some(&a), Some(&b)) => self.depth[a].max(self.depth[b]) / peak,
            _ => 0.0,
        }
    }

    /// Raised-cosine roll-off to zero over the outer `TAPER_FRACTION` of the
    /// support, zero outside it.
    pub fn tapered(&self) -> Vec<f64> {
        let (lo, hi) = self.support;
        let width = TAPER_FRACTION * (hi - lo);
        (0..self.grid.len())
            .map(|m| {
                let w = self.grid.detuning(m);
                let dist = (w - lo).min(hi - w);
                let weight = if dist <= 0.0 {
                    0.0
                } else if dist >= width {
                    1.0
                } else {
                    0.5 * (1.0 - (PI * dist / width).cos())
                };
                weight * self.depth[m]
            })
            .collect()
    }
}

/// Converts wavelength records into optical depth on `grid`. Records are
/// mapped to detuning `c/λ − c/λ_center` (ordinary frequency, placed
/// numerically on the grid axis), linearly interpolated, and zero outside the
/// measured range.
pub fn ingest_absorption(
    records: &[AbsorptionRecord],
    kind: AbsorptionKind,
    center_wavelength_nm: f64,
    grid: FrequencyGrid,
) -> Result<OpticalDepthSpectrum> {
    if records.len() < 2 {
        return Err(Error::InvalidData("need at least two absorption records".into()));
    }
    if !(center_wavelength_nm.is_finite() && center_wavelength_nm > 0.0) {
        return Err(Error::Domain(format!(
            "centre wavelength must be positive, got {center_wavelength_nm}"
        )));
    }
    for (i, r) in records.iter().enumerate() {
        if !(r.wavelength_nm.is_finite() && r.wavelength_nm > 0.0) {
            return Err(Error::InvalidData(format!(
                "record {i}: wavelength must be positive, got {}",
                r.wavelength_nm
            )));
        }
        let ok = match kind {
            AbsorptionKind::Absorption => r.value >= 0.0 && r.value < 1.0,
            AbsorptionKind::OpticalDepth => r.value >= 0.0 && r.value.is_finite(),
        };
        if !ok {
            return Err(Error::InvalidData(format!(
                "record {i} at {} nm: value {} outside the representable range",
                r.wavelength_nm, r.value
            )));
        }
    }
    let increasing = records[1].wavelength_nm > records[0].wavelength_nm;
    for (i, w) in records.windows(2).enumerate() {
        let step = w[1].wavelength_nm - w[0].wavelength_nm;
        if (increasing && !(step > 0.0)) || (!increasing && !(step < 0.0)) {
            return Err(Error::InvalidData(format!(
                "wavelengths are not strictly monotonic at record {}",
                i + 1
            )));
        }
    }

    let nu_center = C_NM_PER_PS / center_wavelength_nm;
    let mut points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            let d = match kind {
                AbsorptionKind::Absorption => -(1.0 - r.value).ln(),
                AbsorptionKind::OpticalDepth => r.value,
            };
            (C_NM_PER_PS / r.wavelength_nm - nu_center, d)
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, hi) = (points[0].0, points[points.len() - 1].0);

    let mut j = 0;
    let depth = grid
        .detunings()
        .into_iter()
        .map(|w| {
            if w < lo || w > hi {
                return 0.0;
            }
            while j + 2 < points.len() && points[j + 1].0 < w {
                j += 1;
            }
            let (x0, y0) = points[j];
            let (x1, y1) = points[j + 1];
            y0 + (w - x0) / (x1 - x0) * (y1 - y0)
        })
        .collect();
    OpticalDepthSpectrum::with_support(grid, depth, center_wavelength_nm, (lo, hi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Susceptibility {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl Susceptibility {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "susceptibility has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidData("susceptibility contains non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_medium(medium: &RamanMedium, grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: grid.detunings().into_iter().map(|w| medium.chi(w)).collect(),
        }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Sum of two susceptibilities on the same grid.
    pub fn plus(&self, other: &Susceptibility) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch("susceptibilities on different grids".into()));
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Linear interpolation onto another grid, zero outside this one.
    pub fn resample(&self, grid: FrequencyGrid) -> Self {
        let last = self.grid.len() - 1;
        let values = grid
            .detunings()
            .into_iter()
            .map(|w| {
                let x = (w - self.grid.min()) / self.grid.d_omega();
                if x < 0.0 || x > last as f64 {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (x.floor() as usize).min(last - 1);
                let f = x - i as f64;
                self.values[i] * (1.0 - f) + self.values[i + 1] * f
            })
            .collect();
        Self { grid, values }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KkOptions {
    /// Proceed even when the data do not decay at the support edges.
    pub force_taper: bool,
}

/// Zero padding of the Hilbert transform, in multiples of the input length.
/// The periodic kernel deviates from `1/(πx)` by about `(πx/P)²/3` relative
/// at separation `x` (in units of the input span).
pub const HILBERT_PADDING: usize = 8;

/// Discrete Hilbert transform `(1/π) PV∫ f(y)/(x − y) dy` of samples on a
/// uniform grid: multiplication by `−i·sgn(k)` in the DFT domain after zero
/// padding, with the zero-detuning sample at the origin of the periodic array.
pub fn hilbert_transform(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let m = HILBERT_PADDING * n;
    let half = n / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, &v) in samples.iter().enumerate() {
        let p = (k as isize - half as isize).rem_euclid(m as isize) as usize;
        buf[p] = Complex64::new(v, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        let sign = if k == 0 || k == m / 2 {
            0.0
        } else if k < m / 2 {
            1.0
        } else {
            -1.0
        };
        *b *= Complex64::new(0.0, -sign);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    (0..n)
        .map(|k| {
            let p = (k as isize - half as isize).rem_euclid(m as isize) as usize;
            buf[p].re / m as f64
        })
        .collect()
}

/// `Im χ = d/(k₀L)` and `Re χ = −H[Im χ]`, after tapering the depth to zero
/// at the support edges.
pub fn kk_real_from_imag(
    depth: &OpticalDepthSpectrum,
    k0: f64,
    length_mm: f64,
    options: KkOptions,
) -> Result<Susceptibility> {
    if !(k0.is_finite() && k0 > 0.0 && length_mm.is_finite() && length_mm > 0.0) {
        return Err(Error::Domain(format!(
            "k0 and length must be positive, got {k0} and {length_mm}"
        )));
    }
    let grid = depth.grid();
    if depth.peak() == 0.0 {
        return Ok(Susceptibility::zeros(grid));
    }
    let edge = depth.edge_fraction();
    if edge >= EDGE_DECAY_LIMIT && !options.force_taper {
        return Err(Error::TruncationRisk {
            edge_fraction: edge,
            limit: EDGE_DECAY_LIMIT,
        });
    }
    let scale = 1.0 / (k0 * length_mm);
    let imag: Vec<f64> = depth.tapered().iter().map(|d| d * scale).collect();
    let real = hilbert_transform(&imag);
    let values = real
        .iter()
        .zip(&imag)
        .map(|(r, i)| Complex64::new(-r, *i))
        .collect();
    Susceptibility::new(grid, values)
}

/// `(k₀L/2)·d Re χ/dω` at `omega`, from central differences interpolated
/// between grid points.
pub fn group_delay_from_susceptibility(
    chi: &Susceptibility,
    k0: f64,
    length_mm: f64,
    omega: f64,
) -> Result<f64> {
    let grid = chi.grid();
    let dw = grid.d_omega();
    let x = (omega - grid.min()) / dw;
    let n = grid.len();
    if !(x >= 1.0 && x <= (n - 2) as f64) {
        return Err(Error::Domain(format!(
            "detuning {omega} is not interior to the grid [{}, {}]",
            grid.detuning(1),
            grid.detuning(n - 2)
        )));
    }
    let re = |m: usize| chi.values()[m].re;
    let slope = |m: usize| (re(m + 1) - re(m - 1)) / (2.0 * dw);
    let i = x.floor() as usize;
    let f = x - i as f64;
    let s = if f == 0.0 {
        slope(i)
    } else {
        slope(i) * (1.0 - f) + slope(i + 1) * f
    };
    Ok(0.5 * k0 * length_mm * s)
}
