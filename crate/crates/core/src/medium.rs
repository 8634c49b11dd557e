//! Two-line Raman medium: susceptibility and closed-form figures of merit.
//!
//! The lines sit at `∓Δ/2` about the two-photon midpoint. Each line's
//! effective coupling is the product `g_ν = κ_{1ν}β_{ν1}` per unit control
//! intensity, so `c_ν = g_ν·|E_c|²` and
//!
//! ```text
//! χ(ω) = i Σ_ν c_ν / (Γ_ν − i(ω − ω_ν))
//! ```
//!
//! which is causal for the `e^{−iωt}` envelope convention used throughout the
//! crate. The optical depth is `d(ω) = k₀L·Im χ(ω)` and the peak depth of a
//! symmetric doublet is `d₀ = k₀L·c/Γ`.

use std::f64::consts::LN_10;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;

/// dB per neper of intensity attenuation.
pub const DB_PER_NEPER: f64 = 10.0 / LN_10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanLine {
    /// Detuning of the line centre from the two-photon midpoint (1/ps).
    pub center_detuning: f64,
    /// Linewidth Γ_ν (1/ps).
    pub linewidth: f64,
    /// Coupling κβ per unit control intensity.
    pub strength_per_intensity: f64,
}

impl RamanLine {
    fn validate(&self, name: &str) -> Result<()> {
        if !(self.linewidth.is_finite() && self.linewidth > 0.0) {
            return Err(Error::Domain(format!(
                "{name} linewidth must be positive, got {}",
                self.linewidth
            )));
        }
        if !(self.strength_per_intensity.is_finite() && self.strength_per_intensity >= 0.0) {
            return Err(Error::Domain(format!(
                "{name} strength must be non-negative, got {}",
                self.strength_per_intensity
            )));
        }
        Ok(())
    }
}

/// Linewidth and strength of one line, before it is placed at `±Δ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub linewidth: f64,
    pub strength_per_intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanMedium {
    lower: RamanLine,
    upper: RamanLine,
    splitting: f64,
    length_mm: f64,
    k0: f64,
    control_intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiguresOfMerit {
    pub peak_optical_depth: f64,
    pub group_delay_ps: f64,
    pub loss_db: f64,
    pub delay_per_loss_ps_per_db: f64,
    pub delay_bandwidth_product: f64,
}

impl RamanMedium {
    /// `lower` sits at `−Δ/2` (Γ₂, κ₁₂β₂₁), `upper` at `+Δ/2` (Γ₃, κ₁₃β₃₁).
    pub fn new(
        splitting: f64,
        lower: LineParams,
        upper: LineParams,
        length_mm: f64,
        k0: f64,
        control_intensity: f64,
    ) -> Result<Self> {
        if !(splitting.is_finite() && splitting > 0.0) {
            return Err(Error::Domain(format!("splitting Δ must be positive, got {splitting}")));
        }
        if !(length_mm.is_finite() && length_mm > 0.0) {
            return Err(Error::Domain(format!("length must be positive, got {length_mm}")));
        }
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::Domain(format!("k0 must be positive, got {k0}")));
        }
        if !(control_intensity.is_finite() && control_intensity >= 0.0) {
            return Err(Error::Domain(format!(
                "control intensity must be non-negative, got {control_intensity}"
            )));
        }
        let lower = RamanLine {
            center_detuning: -0.5 * splitting,
            linewidth: lower.linewidth,
            strength_per_intensity: lower.strength_per_intensity,
        };
        let upper = RamanLine {
            center_detuning: 0.5 * splitting,
            linewidth: upper.linewidth,
            strength_per_intensity: upper.strength_per_intensity,
        };
        lower.validate("lower line")?;
        upper.validate("upper line")?;
        Ok(Self {
            lower,
            upper,
            splitting,
            length_mm,
            k0,
            control_intensity,
        })
    }

    pub fn symmetric(
        gamma: f64,
        splitting: f64,
        strength_per_intensity: f64,
        length_mm: f64,
        k0: f64,
        control_intensity: f64,
    ) -> Result<Self> {
        let line = LineParams {
            linewidth: gamma,
            strength_per_intensity,
        };
        Self::new(splitting, line, line, length_mm, k0, control_intensity)
    }

    /// Symmetric medium at unit control intensity whose peak optical depth is `d0`.
    pub fn from_target_depth(d0: f64, gamma: f64, splitting: f64, k0: f64, length_mm: f64) -> Result<Self> {
        for (name, v) in [("d0", d0), ("gamma", gamma), ("delta", splitting), ("k0", k0), ("length", length_mm)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        let strength = d0 * gamma / (k0 * length_mm);
        Self::symmetric(gamma, splitting, strength, length_mm, k0, 1.0)
    }

    pub fn with_control_intensity(&self, control_intensity: f64) -> Result<Self> {
        if !(control_intensity.is_finite() && control_intensity >= 0.0) {
            return Err(Error::Domain(format!(
                "control intensity must be non-negative, got {control_intensity}"
            )));
        }
        Ok(Self {
            control_intensity,
            ..*self
        })
    }

    pub fn lower(&self) -> &RamanLine {
        &self.lower
    }

    pub fn upper(&self) -> &RamanLine {
        &self.upper
    }

    pub fn lines(&self) -> [&RamanLine; 2] {
        [&self.lower, &self.upper]
    }

    pub fn splitting(&self) -> f64 {
        self.splitting
    }

    pub fn length_mm(&self) -> f64 {
        self.length_mm
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn control_intensity(&self) -> f64 {
        self.control_intensity
    }

    /// `c_ν = g_ν·|E_c|²`.
    pub fn line_coefficient(&self, line: &RamanLine) -> f64 {
        line.strength_per_intensity * self.control_intensity
    }

    pub fn chi(&self, omega: f64) -> Complex64 {
        let i = Complex64::i();
        self.lines()
            .into_iter()
            .map(|line| {
                let c = self.line_coefficient(line);
                i * c / Complex64::new(line.linewidth, -(omega - line.center_detuning))
            })
            .sum()
    }

    /// `d(ω) = k₀L·Im χ(ω)`.
    pub fn optical_depth(&self, omega: f64) -> f64 {
        self.k0 * self.length_mm * self.chi(omega).im
    }

    /// Upper bound on `|χ|` over all detunings.
    pub fn chi_bound(&self) -> f64 {
        self.lines()
            .into_iter()
            .map(|l| self.line_coefficient(l) / l.linewidth)
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_params().is_ok()
    }

    /// `(Γ, c)` of a symmetric doublet.
    fn symmetric_params(&self) -> Result<(f64, f64)> {
        let (g2, g3) = (self.lower.linewidth, self.upper.linewidth);
        let (s2, s3) = (
            self.lower.strength_per_intensity,
            self.upper.strength_per_intensity,
        );
        if (g2 - g3).abs() > SYMMETRY_TOL * g2.max(g3) {
            return Err(Error::AsymmetricMedium(format!("linewidths {g2} and {g3} differ")));
        }
        if (s2 - s3).abs() > SYMMETRY_TOL * s2.max(s3) {
            return Err(Error::AsymmetricMedium(format!("strengths {s2} and {s3} differ")));
        }
        Ok((0.5 * (g2 + g3), 0.5 * (s2 + s3) * self.control_intensity))
    }

    pub fn peak_optical_depth(&self) -> Result<f64> {
        let (gamma, c) = self.symmetric_params()?;
        Ok(self.k0 * self.length_mm * c / gamma)
    }

    pub fn group_delay(&self) -> Result<f64> {
        let (gamma, _) = self.symmetric_params()?;
        Ok(group_delay_for_depth(self.peak_optical_depth()?, gamma, self.splitting))
    }

    pub fn loss_db(&self) -> Result<f64> {
        let (gamma, _) = self.symmetric_params()?;
        Ok(loss_db_for_depth(self.peak_optical_depth()?, gamma, self.splitting))
    }

    pub fn delay_bandwidth_product(&self) -> Result<f64> {
        let (gamma, _) = self.symmetric_params()?;
        dbp_for_depth(self.peak_optical_depth()?, gamma, self.splitting)
    }

    pub fn figures_of_merit(&self) -> Result<FiguresOfMerit> {
        let (gamma, _) = self.symmetric_params()?;
        Ok(FiguresOfMerit {
            peak_optical_depth: self.peak_optical_depth()?,
            group_delay_ps: self.group_delay()?,
            loss_db: self.loss_db()?,
            delay_per_loss_ps_per_db: delay_per_loss(gamma, self.splitting),
            delay_bandwidth_product: self.delay_bandwidth_product()?,
        })
    }
}

/// `τ_g = d₀·Γ(Δ²/4 − Γ²)/(Δ²/4 + Γ²)²`.
pub fn group_delay_for_depth(d0: f64, gamma: f64, splitting: f64) -> f64 {
    let q = 0.25 * splitting * splitting;
    let g2 = gamma * gamma;
    d0 * gamma * (q - g2) / ((q + g2) * (q + g2))
}

/// `η = d₀·(10/ln10)·2Γ²/(Δ²/4 + Γ²)`.
pub fn loss_db_for_depth(d0: f64, gamma: f64, splitting: f64) -> f64 {
    let q = 0.25 * splitting * splitting;
    let g2 = gamma * gamma;
    d0 * DB_PER_NEPER * 2.0 * g2 / (q + g2)
}

/// `τ_g·(Δ − Γ)`; the usable window is `Δ − Γ` wide.
pub fn dbp_for_depth(d0: f64, gamma: f64, splitting: f64) -> Result<f64> {
    if gamma >= splitting {
        return Err(Error::Domain(format!(
            "delay-bandwidth product needs Γ < Δ (Γ = {gamma}, Δ = {splitting})"
        )));
    }
    Ok(group_delay_for_depth(d0, gamma, splitting) * (splitting - gamma))
}

/// `τ/η = (ln10/20)·(Δ²/4 − Γ²)/(Γ(Γ² + Δ²/4))`, independent of `d₀`.
pub fn delay_per_loss(gamma: f64, splitting: f64) -> f64 {
    let q = 0.25 * splitting * splitting;
    let g2 = gamma * gamma;
    LN_10 / 20.0 * (q - g2) / (gamma * (g2 + q))
}

/// Peak depth at which the delay-bandwidth product reaches one.
pub fn depth_for_unit_dbp(gamma: f64, splitting: f64) -> Result<f64> {
    let per_depth = dbp_for_depth(1.0, gamma, splitting)?;
    if per_depth <= 0.0 {
        return Err(Error::Domain(
            "no positive delay-bandwidth product for Γ ≥ Δ/2".into(),
        ));
    }
    Ok(1.0 / per_depth)
}

/// Peak depth giving fractional intensity absorption `absorption` at ω = 0.
pub fn depth_for_center_absorption(absorption: f64, gamma: f64, splitting: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&absorption) {
        return Err(Error::Domain(format!("absorption must lie in [0, 1), got {absorption}")));
    }
    if !(gamma > 0.0 && splitting > 0.0) {
        return Err(Error::Domain("Γ and Δ must be positive".into()));
    }
    let q = 0.25 * splitting * splitting;
    let g2 = gamma * gamma;
    Ok(-(1.0 - absorption).ln() * (q + g2) / (2.0 * g2))
}
