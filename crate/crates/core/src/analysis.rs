//! Experiment-facing metrics: intensity cross-correlation, first-moment
//! delays, FWHM, deconvolved durations, absorption spectra, and the
//! delay-versus-control linearity check.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::spectral::ComplexEnvelope;

/// Relative floor below which an off-spectrum sample is masked.
pub const ABSORPTION_MASK_FLOOR: f64 = 1e-6;

/// Intensity cross-correlation `I_xc(τ) = ∫ I_sig(t)·I_ref(t − τ) dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    pub delays: Vec<f64>,
    pub intensity: Vec<f64>,
    pub normalized: bool,
}

impl CorrelationCurve {
    pub fn new(delays: Vec<f64>, intensity: Vec<f64>) -> Result<Self> {
        if delays.len() != intensity.len() || delays.len() < 2 {
            return Err(Error::InvalidData(format!(
                "correlation curve needs matching delay/intensity columns of length >= 2 ({} vs {})",
                delays.len(),
                intensity.len()
            )));
        }
        if delays.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidData("correlation delays must increase strictly".into()));
        }
        if intensity.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidData(
                "correlation intensity must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            delays,
            intensity,
            normalized: false,
        })
    }

    /// Copy scaled to unit peak.
    pub fn normalized(&self) -> Result<Self> {
        let peak = self.intensity.iter().cloned().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::DegenerateCurve("curve is identically zero".into()));
        }
        Ok(Self {
            delays: self.delays.clone(),
            intensity: self.intensity.iter().map(|v| v / peak).collect(),
            normalized: true,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayMetrics {
    pub first_moment_ps: f64,
    pub fwhm_ps: f64,
    pub loss_db: f64,
}

/// Intensity cross-correlation of two envelopes on the same grid. The result
/// covers every lag of the linear correlation (`2n` samples, `−n·dt … (n−1)·dt`).
pub fn cross_correlate(signal: &ComplexEnvelope, reference: &ComplexEnvelope) -> Result<CorrelationCurve> {
    if !signal.grid().same_as(reference.grid()) {
        return Err(Error::GridMismatch(
            "signal and reference are on different time grids".into(),
        ));
    }
    let n = signal.grid().len();
    let dt = signal.grid().dt();
    let m = 2 * n;
    let pad = |env: &ComplexEnvelope| {
        let mut buf: Vec<Complex64> = env
            .samples()
            .iter()
            .map(|s| Complex64::new(s.norm_sqr(), 0.0))
            .collect();
        buf.resize(m, Complex64::new(0.0, 0.0));
        buf
    };
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut a = pad(signal);
    let mut b = pad(reference);
    fwd.process(&mut a);
    fwd.process(&mut b);
    // circular correlation: c[j] = Σ_k a[k]·b[k − j]
    let mut c: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y.conj()).collect();
    inv.process(&mut c);
    let scale = dt / m as f64;
    let mut delays = Vec::with_capacity(m);
    let mut intensity = Vec::with_capacity(m);
    for j in 0..m {
        let lag = j as isize - n as isize;
        let idx = lag.rem_euclid(m as isize) as usize;
        delays.push(lag as f64 * dt);
        intensity.push((c[idx].re * scale).max(0.0));
    }
    CorrelationCurve::new(delays, intensity)
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// `∫τI dτ / ∫I dτ`, optionally restricted to `window = (start, stop)`.
pub fn first_moment(curve: &CorrelationCurve, window: Option<(f64, f64)>) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = curve
        .delays
        .iter()
        .zip(&curve.intensity)
        .filter(|(d, _)| window.map_or(true, |(lo, hi)| **d >= lo && **d <= hi))
        .map(|(d, i)| (*d, *i))
        .unzip();
    let norm = trapezoid(&x, &y);
    if !(norm > 0.0) {
        return Err(Error::DegenerateCurve(
            "correlation curve has zero integral".into(),
        ));
    }
    let weighted: Vec<f64> = x.iter().zip(&y).map(|(d, i)| d * i).collect();
    Ok(trapezoid(&x, &weighted) / norm)
}

/// `⟨τ⟩ = moment(on) − moment(off)` over the full curves.
pub fn first_moment_delay(on: &CorrelationCurve, off: &CorrelationCurve) -> Result<f64> {
    first_moment_delay_windowed(on, off, None)
}

pub fn first_moment_delay_windowed(
    on: &CorrelationCurve,
    off: &CorrelationCurve,
    window: Option<(f64, f64)>,
) -> Result<f64> {
    Ok(first_moment(on, window)? - first_moment(off, window)?)
}

/// Full width at half maximum of sampled data, with linear interpolation of
/// the crossings.
pub fn fwhm_samples(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidData("FWHM needs matching columns of length >= 3".into()));
    }
    let peak = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(Error::DegenerateCurve("curve has no positive maximum".into()));
    }
    let half = 0.5 * peak;
    let cross = |i: usize| {
        let (y0, y1) = (y[i], y[i + 1]);
        x[i] + (half - y0) / (y1 - y0) * (x[i + 1] - x[i])
    };
    let mut rising = Vec::new();
    let mut falling = Vec::new();
    for i in 0..y.len() - 1 {
        if y[i] < half && y[i + 1] >= half {
            rising.push(cross(i));
        } else if y[i] >= half && y[i + 1] < half {
            falling.push(cross(i));
        }
    }
    if y[0] >= half || y[y.len() - 1] >= half {
        return Err(Error::DegenerateCurve(
            "curve does not fall below half maximum inside the grid".into(),
        ));
    }
    if rising.len() == 1 && falling.len() == 1 && rising[0] < falling[0] {
        return Ok(falling[0] - rising[0]);
    }
    let candidates = rising.into_iter().zip(falling).collect();
    Err(Error::AmbiguousFwhm { candidates })
}

pub fn fwhm(curve: &CorrelationCurve) -> Result<f64> {
    fwhm_samples(&curve.delays, &curve.intensity)
}

/// `τ_sig ≈ sqrt(τ_xc² − τ_ref²)`.
pub fn deconvolve_duration(tau_xc: f64, tau_ref: f64) -> Result<f64> {
    if !(tau_ref >= 0.0 && tau_xc > tau_ref && tau_xc.is_finite()) {
        return Err(Error::Domain(format!(
            "need τ_xc > τ_ref >= 0, got τ_xc = {tau_xc}, τ_ref = {tau_ref}"
        )));
    }
    Ok((tau_xc * tau_xc - tau_ref * tau_ref).sqrt())
}

/// `A = 1 − I_on/I_off`, `None` where the off spectrum is below
/// `ABSORPTION_MASK_FLOOR` of its peak.
pub fn absorption_spectrum(on: &[f64], off: &[f64]) -> Result<Vec<Option<f64>>> {
    if on.len() != off.len() {
        return Err(Error::GridMismatch(format!(
            "on spectrum has {} samples, off has {}",
            on.len(),
            off.len()
        )));
    }
    let peak = off.iter().cloned().fold(0.0, f64::max);
    let floor = ABSORPTION_MASK_FLOOR * peak;
    Ok(on
        .iter()
        .zip(off)
        .map(|(a, b)| if *b > floor && *b > 0.0 { Some(1.0 - a / b) } else { None })
        .collect())
}

/// Centroid delay and energy loss (dB) of `output` relative to `input`.
pub fn pulse_delay_and_loss(input: &ComplexEnvelope, output: &ComplexEnvelope) -> Result<(f64, f64)> {
    if !input.grid().same_as(output.grid()) {
        return Err(Error::GridMismatch("input and output grids differ".into()));
    }
    let delay = output.centroid()? - input.centroid()?;
    let loss = -10.0 * (output.energy() / input.energy()).log10();
    Ok((delay, loss))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub control_intensity: f64,
    pub delay_ps: f64,
    pub loss_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearityDiagnostic {
    /// Least-squares slope of a line through the origin.
    pub slope: f64,
    /// `max|delay − slope·intensity| / max|delay|`.
    pub residual_ratio: f64,
}

pub fn linearity_diagnostic(series: &[(f64, f64)]) -> Result<LinearityDiagnostic> {
    if series.len() < 3 {
        return Err(Error::InvalidData(format!(
            "linearity check needs at least 3 points, got {}",
            series.len()
        )));
    }
    let sxx: f64 = series.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = series.iter().map(|(x, y)| x * y).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateCurve("all intensities are zero".into()));
    }
    let slope = sxy / sxx;
    let max_y = series.iter().map(|(_, y)| y.abs()).fold(0.0, f64::max);
    let max_res = series
        .iter()
        .map(|(x, y)| (y - slope * x).abs())
        .fold(0.0, f64::max);
    let residual_ratio = if max_y > 0.0 { max_res / max_y } else { 0.0 };
    Ok(LinearityDiagnostic {
        slope,
        residual_ratio,
    })
}
