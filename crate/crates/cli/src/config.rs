//! Strict TOML configuration and its resolution into core types.

use std::path::Path;

use serde::{Deserialize, Serialize};
use slowlight_core::medium::RamanMedium;
use slowlight_core::spectral::{synthesize_pulse, wavevector_per_mm, PulseShape, PulseWidth, TimeGrid};
use slowlight_core::td::{ControlField, Scheme, SolverSettings};
use slowlight_core::ComplexEnvelope;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub medium: MediumConfig,
    #[serde(default)]
    pub signal: SignalConfig,
    #[serde(default)]
    pub control: ControlConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

/// `d0` is the peak optical depth at unit control intensity; alternatively
/// `g_per_intensity` gives the line strength κβ directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub gamma_invps: f64,
    pub delta_invps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_per_intensity: Option<f64>,
    pub length_mm: f64,
    pub lambda0_nm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalShape {
    Gaussian,
    FlatTop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub shape: SignalShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_invps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ps: Option<f64>,
    #[serde(default)]
    pub gdd_ps2: f64,
}

impl Default for SignalConfig {
    fn default() -> Self {
        Self {
            shape: SignalShape::FlatTop,
            bandwidth_invps: Some(1.8),
            duration_ps: None,
            gdd_ps2: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    Constant,
    Gaussian,
    FlatTop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlConfig {
    pub kind: ControlKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fwhm_ps: Option<f64>,
    #[serde(default = "one")]
    pub intensity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity_list: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            kind: ControlKind::Constant,
            fwhm_ps: None,
            intensity: 1.0,
            intensity_list: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub dt_ps: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 1 << 14,
            dt_ps: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Euler,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub nz: usize,
    pub scheme: SchemeName,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nz: 256,
            scheme: SchemeName::Midpoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub d0_start: f64,
    pub d0_stop: f64,
    pub d0_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub reference_fwhm_ps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_ps: Option<[f64; 2]>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            reference_fwhm_ps: 0.16,
            window_ps: None,
        }
    }
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(format!("{key} must be positive, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(bad(format!("{key} must be non-negative, got {v}")))
    }
}

impl Config {
    /// Parses a config file, or the `config` table embedded in a run summary.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value: toml::Table = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let table = match value.get("config") {
            Some(toml::Value::Table(inner)) if !value.contains_key("medium") => inner.clone(),
            _ => value,
        };
        let config: Config = table.try_into().map_err(|e: toml::de::Error| bad(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => bad(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks every field before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let m = &self.medium;
        positive("medium.gamma_invps", m.gamma_invps)?;
        positive("medium.delta_invps", m.delta_invps)?;
        positive("medium.length_mm", m.length_mm)?;
        positive("medium.lambda0_nm", m.lambda0_nm)?;
        match (m.d0, m.g_per_intensity) {
            (Some(d0), None) => non_negative("medium.d0", d0)?,
            (None, Some(g)) => non_negative("medium.g_per_intensity", g)?,
            _ => return Err(bad("medium: give exactly one of d0 or g_per_intensity")),
        }

        let s = &self.signal;
        match (s.bandwidth_invps, s.duration_ps) {
            (Some(b), None) => positive("signal.bandwidth_invps", b)?,
            (None, Some(d)) => positive("signal.duration_ps", d)?,
            _ => return Err(bad("signal: give exactly one of bandwidth_invps or duration_ps")),
        }
        if !s.gdd_ps2.is_finite() {
            return Err(bad("signal.gdd_ps2 must be finite"));
        }

        let c = &self.control;
        non_negative("control.intensity", c.intensity)?;
        match (c.kind, c.fwhm_ps) {
            (ControlKind::Constant, None) => {}
            (ControlKind::Constant, Some(_)) => {
                return Err(bad("control.fwhm_ps is not used by a constant control"))
            }
            (_, Some(w)) => positive("control.fwhm_ps", w)?,
            (_, None) => return Err(bad("control.fwhm_ps is required for gaussian and flat_top controls")),
        }
        if let Some(list) = &c.intensity_list {
            for (i, v) in list.iter().enumerate() {
                non_negative(&format!("control.intensity_list[{i}]"), *v)?;
            }
        }

        if self.solver.nz == 0 {
            return Err(bad("solver.nz must be positive"));
        }
        if let Some(sw) = &self.sweep {
            non_negative("sweep.d0_start", sw.d0_start)?;
            positive("sweep.d0_step", sw.d0_step)?;
            if !(sw.d0_stop.is_finite() && sw.d0_stop >= sw.d0_start) {
                return Err(bad(format!(
                    "sweep.d0_stop must be >= d0_start, got {} < {}",
                    sw.d0_stop, sw.d0_start
                )));
            }
        }
        positive("analysis.reference_fwhm_ps", self.analysis.reference_fwhm_ps)?;
        if let Some([lo, hi]) = self.analysis.window_ps {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(bad(format!("analysis.window_ps must be increasing, got [{lo}, {hi}]")));
            }
        }

        self.time_grid()?;
        self.medium()?;
        self.signal_envelope()?;
        Ok(())
    }

    pub fn k0(&self) -> Result<f64, CliError> {
        Ok(wavevector_per_mm(self.medium.lambda0_nm)?)
    }

    /// Line strength κβ per unit control intensity.
    pub fn strength_per_intensity(&self) -> Result<f64, CliError> {
        let m = &self.medium;
        Ok(match (m.d0, m.g_per_intensity) {
            (Some(d0), _) => d0 * m.gamma_invps / (self.k0()? * m.length_mm),
            (None, Some(g)) => g,
            (None, None) => unreachable!("validated"),
        })
    }

    /// Medium at `control.intensity`.
    pub fn medium(&self) -> Result<RamanMedium, CliError> {
        self.medium_at(self.control.intensity)
    }

    pub fn medium_at(&self, intensity: f64) -> Result<RamanMedium, CliError> {
        let m = &self.medium;
        Ok(RamanMedium::symmetric(
            m.gamma_invps,
            m.delta_invps,
            self.strength_per_intensity()?,
            m.length_mm,
            self.k0()?,
            intensity,
        )?)
    }

    /// Peak depth at unit control intensity.
    pub fn unit_depth(&self) -> Result<f64, CliError> {
        Ok(self.medium_at(1.0)?.peak_optical_depth()?)
    }

    pub fn time_grid(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::centered(self.grid.dt_ps, self.grid.n)?)
    }

    pub fn signal_envelope(&self) -> Result<ComplexEnvelope, CliError> {
        let s = &self.signal;
        let shape = match s.shape {
            SignalShape::Gaussian => PulseShape::Gaussian,
            SignalShape::FlatTop => PulseShape::FlatTopSpectrum,
        };
        let width = match (s.bandwidth_invps, s.duration_ps) {
            (Some(b), _) => PulseWidth::Bandwidth(b),
            (None, Some(d)) => PulseWidth::Duration(d),
            (None, None) => unreachable!("validated"),
        };
        Ok(synthesize_pulse(shape, width, s.gdd_ps2, self.time_grid()?)?)
    }

    pub fn control_field(&self) -> ControlField {
        match (self.control.kind, self.control.fwhm_ps) {
            (ControlKind::Gaussian, Some(w)) => ControlField::gaussian(w),
            (ControlKind::FlatTop, Some(w)) => ControlField::flat_top(w),
            _ => ControlField::constant(),
        }
    }

    pub fn solver_settings(&self) -> SolverSettings {
        SolverSettings {
            nz: self.solver.nz,
            scheme: match self.solver.scheme {
                SchemeName::Euler => Scheme::Euler,
                SchemeName::Midpoint => Scheme::Midpoint,
            },
        }
    }

    /// Sweep values `start, start + step, …` up to `stop` inclusive.
    pub fn d0_values(&self) -> Vec<f64> {
        match &self.sweep {
            None => vec![self.medium.d0.unwrap_or(0.0) * self.control.intensity],
            Some(sw) => {
                let count = ((sw.d0_stop - sw.d0_start) / sw.d0_step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| sw.d0_start + k as f64 * sw.d0_step).collect()
            }
        }
    }

    pub fn to_value(&self) -> toml::Value {
        toml::Value::try_from(self).expect("config serializes")
    }
}
