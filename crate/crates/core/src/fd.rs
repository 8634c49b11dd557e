//! Frequency-domain propagation through a linear susceptibility:
//! `Ẽ_out(ω) = Ẽ_in(ω)·exp(i k₀L χ(ω)/2)`, optionally times the vacuum
//! transit phase `exp(iωL/c)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{pulse_delay_and_loss, ScanPoint};
use crate::error::{Error, Result};
use crate::kk::Susceptibility;
use crate::spectral::{
    forward_transform, inverse_transform, ComplexEnvelope, FrequencyGrid, C_MM_PER_PS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl TransferFunction {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "transfer function has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn identity(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(1.0, 0.0); grid.len()],
        }
    }

    /// Pure delay `e^{iωτ}`.
    pub fn delay(grid: FrequencyGrid, tau_ps: f64) -> Self {
        Self {
            grid,
            values: grid
                .detunings()
                .into_iter()
                .map(|w| Complex64::cis(w * tau_ps))
                .collect(),
        }
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Intensity transmission `|H(ω)|²`.
    pub fn transmission(&self) -> Vec<f64> {
        self.values.iter().map(|h| h.norm_sqr()).collect()
    }

    /// Series combination.
    pub fn then(&self, other: &TransferFunction) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch("transfer functions on different grids".into()));
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }
}

pub fn transfer_function(
    chi: &Susceptibility,
    k0: f64,
    length_mm: f64,
    include_vacuum_transit: bool,
) -> Result<TransferFunction> {
    if !(k0.is_finite() && k0 > 0.0 && length_mm.is_finite() && length_mm >= 0.0) {
        return Err(Error::Domain(format!(
            "need k0 > 0 and length >= 0, got {k0} and {length_mm}"
        )));
    }
    let grid = chi.grid();
    let half_phase = 0.5 * k0 * length_mm;
    let values = chi
        .values()
        .iter()
        .zip(grid.detunings())
        .map(|(x, w)| {
            let mut h = (Complex64::i() * half_phase * x).exp();
            if include_vacuum_transit {
                h *= Complex64::cis(w * length_mm / C_MM_PER_PS);
            }
            h
        })
        .collect();
    TransferFunction::new(grid, values)
}

fn check_grid(env: &ComplexEnvelope, h: &TransferFunction) -> Result<()> {
    if env.grid().frequency_grid().same_as(&h.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "envelope spectrum grid (dω = {}, n = {}) differs from transfer function grid (dω = {}, n = {})",
            env.grid().frequency_grid().d_omega(),
            env.grid().len(),
            h.grid.d_omega(),
            h.grid.len()
        )))
    }
}

pub fn propagate(env: &ComplexEnvelope, h: &TransferFunction) -> Result<ComplexEnvelope> {
    check_grid(env, h)?;
    let spec = forward_transform(env).filtered(&h.values)?;
    Ok(inverse_transform(&spec))
}

/// Output intensity spectra `(on, off)`: `|H·Ẽ|²` and `|Ẽ|²`.
pub fn output_spectra(env: &ComplexEnvelope, h: &TransferFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    check_grid(env, h)?;
    let spec = forward_transform(env);
    let off = spec.intensity();
    let on = off.iter().zip(&h.values).map(|(s, h)| s * h.norm_sqr()).collect();
    Ok((on, off))
}

/// Centroid delay and loss for `chi` scaled by each factor (the control
/// intensity relative to the one `chi` was built for).
pub fn delay_vs_scale_scan(
    chi: &Susceptibility,
    k0: f64,
    length_mm: f64,
    scales: &[f64],
    input: &ComplexEnvelope,
) -> Result<Vec<ScanPoint>> {
    if let Some(bad) = scales.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::Domain(format!("control intensity must be non-negative, got {bad}")));
    }
    scales
        .par_iter()
        .map(|&s| {
            let h = transfer_function(&chi.scaled(s), k0, length_mm, false)?;
            let out = propagate(input, &h)?;
            let (delay_ps, loss_db) = pulse_delay_and_loss(input, &out)?;
            Ok(ScanPoint {
                control_intensity: s,
                delay_ps,
                loss_db,
            })
        })
        .collect()
}
