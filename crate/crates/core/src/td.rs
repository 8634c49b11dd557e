//! Maxwell–Bloch integration in the retarded frame `τ = t − z/c`.
//!
//! ```text
//! ∂τ Q_ν = −Γ_ν Q_ν + iκ_ν E_c* E e^{+iσ_ν Δτ/2}
//! ∂z E   = i E_c Σ_ν β_ν Q_ν e^{−iσ_ν Δτ/2}
//! ```
//!
//! with `σ = +1` for the upper line (`Q₃₁`, at `+Δ/2`) and `σ = −1` for the
//! lower one (`Q₂₁`, at `−Δ/2`). For constant control this reproduces
//! `∂z Ẽ = i(k₀/2)χ(ω) Ẽ` when `κ_ν β_ν = k₀ g_ν/2`; the product is split
//! evenly, `κ_ν = β_ν = sqrt(k₀ g_ν/2)`.
//!
//! The coherences are advanced along τ by an exponential integrator with the
//! drive `E_c* E` linear between samples; the field is marched in z by
//! explicit midpoint (or forward Euler).

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{fwhm_samples, pulse_delay_and_loss, ScanPoint};
use crate::error::{Error, Result};
use crate::medium::RamanMedium;
use crate::spectral::{ComplexEnvelope, TimeGrid};

pub const MIN_Z_STEPS: usize = 16;
/// Largest accepted `k₀·max|χ|·L/(2·nz)`.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;
/// Coherence magnitude above which the weak-signal assumption is flagged.
pub const WEAK_SIGNAL_LIMIT: f64 = 0.1;
/// Control FWHM, in signal FWHMs, below which the control counts as short.
pub const LONG_CONTROL_RATIO: f64 = 5.0;
/// Super-Gaussian order of the flat-top control intensity.
pub const FLAT_TOP_CONTROL_ORDER: i32 = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum ControlShape {
    Constant,
    /// Gaussian intensity of the given FWHM, centred at τ = 0.
    Gaussian { fwhm_ps: f64 },
    /// Super-Gaussian intensity `exp(−ln2·(2τ/fwhm)^8)`, centred at τ = 0.
    FlatTop { fwhm_ps: f64 },
    /// Arbitrary amplitude envelope, resampled onto the signal grid.
    Envelope(ComplexEnvelope),
}

/// Control amplitude profile. The intensity seen by the medium is
/// `medium.control_intensity() · relative_scale · |shape(τ)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlField {
    pub shape: ControlShape,
    pub relative_scale: f64,
}

impl ControlField {
    pub fn constant() -> Self {
        Self {
            shape: ControlShape::Constant,
            relative_scale: 1.0,
        }
    }

    pub fn gaussian(fwhm_ps: f64) -> Self {
        Self {
            shape: ControlShape::Gaussian { fwhm_ps },
            relative_scale: 1.0,
        }
    }

    pub fn flat_top(fwhm_ps: f64) -> Self {
        Self {
            shape: ControlShape::FlatTop { fwhm_ps },
            relative_scale: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.relative_scale.is_finite() && self.relative_scale >= 0.0) {
            return Err(Error::Domain(format!(
                "control scale must be non-negative, got {}",
                self.relative_scale
            )));
        }
        match self.shape {
            ControlShape::Gaussian { fwhm_ps } | ControlShape::FlatTop { fwhm_ps }
                if !(fwhm_ps.is_finite() && fwhm_ps > 0.0) =>
            {
                Err(Error::Domain(format!("control FWHM must be positive, got {fwhm_ps}")))
            }
            _ => Ok(()),
        }
    }

    /// Shape amplitude on `grid` (peak 1 for the analytic shapes).
    pub fn shape_amplitude(&self, grid: &TimeGrid) -> Vec<Complex64> {
        match &self.shape {
            ControlShape::Constant => vec![Complex64::new(1.0, 0.0); grid.len()],
            ControlShape::Gaussian { fwhm_ps } => {
                let a = 2.0 * LN_2 / (fwhm_ps * fwhm_ps);
                grid.times()
                    .into_iter()
                    .map(|t| Complex64::new((-a * t * t).exp(), 0.0))
                    .collect()
            }
            ControlShape::FlatTop { fwhm_ps } => grid
                .times()
                .into_iter()
                .map(|t| {
                    let x = (2.0 * t / fwhm_ps).powi(2 * FLAT_TOP_CONTROL_ORDER);
                    Complex64::new((-0.5 * LN_2 * x).exp(), 0.0)
                })
                .collect(),
            ControlShape::Envelope(env) => {
                if env.grid().same_as(grid) {
                    env.samples().to_vec()
                } else {
                    env.resample(*grid).into_samples()
                }
            }
        }
    }

    fn fwhm_ps(&self, grid: &TimeGrid) -> Option<f64> {
        match &self.shape {
            ControlShape::Constant => None,
            ControlShape::Gaussian { fwhm_ps } | ControlShape::FlatTop { fwhm_ps } => Some(*fwhm_ps),
            ControlShape::Envelope(_) => {
                let intensity: Vec<f64> = self.shape_amplitude(grid).iter().map(|a| a.norm_sqr()).collect();
                fwhm_samples(&grid.times(), &intensity).ok()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    Midpoint,
}

impl Scheme {
    pub fn order(&self) -> u32 {
        match self {
            Scheme::Euler => 1,
            Scheme::Midpoint => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub nz: usize,
    pub scheme: Scheme,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            nz: 256,
            scheme: Scheme::Midpoint,
        }
    }
}

/// Coherences over the time grid at one propagation slice.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceState {
    pub q21: Vec<Complex64>,
    pub q31: Vec<Complex64>,
}

impl CoherenceState {
    pub fn max_magnitude(&self) -> f64 {
        self.q21
            .iter()
            .chain(&self.q31)
            .map(|q| q.norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolverWarning {
    StrongCoherence { max_magnitude: f64 },
    ShortControl { control_fwhm_ps: f64, signal_fwhm_ps: f64 },
}

impl fmt::Display for SolverWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverWarning::StrongCoherence { max_magnitude } => write!(
                f,
                "coherence magnitude reached {max_magnitude:.3} (> {WEAK_SIGNAL_LIMIT}); weak-signal assumption questionable"
            ),
            SolverWarning::ShortControl {
                control_fwhm_ps,
                signal_fwhm_ps,
            } => write!(
                f,
                "control FWHM {control_fwhm_ps} ps is less than {LONG_CONTROL_RATIO}x the signal FWHM {signal_fwhm_ps:.4} ps"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdSolution {
    pub output: ComplexEnvelope,
    pub coherences: CoherenceState,
    pub warnings: Vec<SolverWarning>,
}

/// One Raman line prepared for marching.
struct LineStepper {
    kappa: f64,
    beta: f64,
    decay: f64,
    w0: Complex64,
    w1: Complex64,
    /// `e^{iσΔτ_j/2}`.
    phase: Vec<Complex64>,
}

impl LineStepper {
    fn new(gamma: f64, sigma: f64, splitting: f64, coupling: f64, grid: &TimeGrid) -> Self {
        let h = grid.dt();
        let p = Complex64::new(gamma, 0.5 * sigma * splitting);
        let (i0, i1) = exp_weights(p, h);
        let decay = (-gamma * h).exp();
        let amp = coupling.sqrt();
        Self {
            kappa: amp,
            beta: amp,
            decay,
            w0: (i0 - i1) * decay,
            w1: i1 * decay,
            phase: grid
                .times()
                .into_iter()
                .map(|t| Complex64::cis(0.5 * sigma * splitting * t))
                .collect(),
        }
    }

    /// Coherence along τ driven by `a = E_c*·E`.
    fn coherence(&self, drive: &[Complex64], q: &mut [Complex64]) {
        let ik = Complex64::new(0.0, self.kappa);
        let mut cur = ZERO;
        q[0] = cur;
        for j in 0..drive.len() - 1 {
            cur = cur * self.decay + ik * self.phase[j] * (self.w0 * drive[j] + self.w1 * drive[j + 1]);
            q[j + 1] = cur;
        }
    }
}

/// `I0 = ∫₀ʰ e^{ps} ds` and `I1 = ∫₀ʰ (s/h) e^{ps} ds`.
fn exp_weights(p: Complex64, h: f64) -> (Complex64, Complex64) {
    let x = p * h;
    if x.norm() < 0.1 {
        let mut i0 = ZERO;
        let mut i1 = ZERO;
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for k in 0..12 {
            if k > 0 {
                pow *= x;
                fact *= k as f64;
            }
            i0 += pow / (fact * (k + 1) as f64);
            i1 += pow / (fact * (k + 2) as f64);
        }
        (i0 * h, i1 * h)
    } else {
        let e = x.exp();
        ((e - 1.0) / p, (e * (x - 1.0) + 1.0) / (p * p * h))
    }
}

struct System {
    control: Vec<Complex64>,
    lower: LineStepper,
    upper: LineStepper,
    drive: Vec<Complex64>,
    q21: Vec<Complex64>,
    q31: Vec<Complex64>,
    max_q: f64,
}

impl System {
    /// `∂z E` for the field `e`, leaving the coherences in `q21`/`q31`.
    fn rhs(&mut self, e: &[Complex64], out: &mut [Complex64]) {
        for (d, (c, x)) in self.drive.iter_mut().zip(self.control.iter().zip(e)) {
            *d = c.conj() * x;
        }
        self.lower.coherence(&self.drive, &mut self.q21);
        self.upper.coherence(&self.drive, &mut self.q31);
        let i = Complex64::i();
        for j in 0..e.len() {
            let s = self.lower.beta * self.q21[j] * self.lower.phase[j].conj()
                + self.upper.beta * self.q31[j] * self.upper.phase[j].conj();
            out[j] = i * self.control[j] * s;
        }
        let m = self
            .q21
            .iter()
            .chain(&self.q31)
            .map(|q| q.norm_sqr())
            .fold(0.0, f64::max)
            .sqrt();
        self.max_q = self.max_q.max(m);
    }
}

/// Resolution limits for `medium` under `control` on `grid`.
pub fn check_resolution(
    medium: &RamanMedium,
    control: &ControlField,
    grid: &TimeGrid,
    settings: &SolverSettings,
) -> Result<()> {
    let peak = control
        .shape_amplitude(grid)
        .iter()
        .map(|a| a.norm_sqr())
        .fold(0.0, f64::max);
    let chi_bound = medium.chi_bound() * control.relative_scale * peak;
    let total_phase = 0.5 * medium.k0() * chi_bound * medium.length_mm();
    let min_nz = ((total_phase / MAX_PHASE_PER_STEP).ceil() as usize + 1).max(MIN_Z_STEPS);
    let max_dt = 2.0 * PI / (8.0 * medium.splitting());
    let refuse = |reason: String| {
        Err(Error::Resolution {
            reason,
            min_nz,
            max_dt_ps: max_dt,
        })
    };
    if settings.nz < MIN_Z_STEPS {
        return refuse(format!("nz = {} is below {MIN_Z_STEPS}", settings.nz));
    }
    let per_step = total_phase / settings.nz as f64;
    if per_step >= MAX_PHASE_PER_STEP {
        return refuse(format!(
            "phase per z step {per_step:.4} rad exceeds {MAX_PHASE_PER_STEP}"
        ));
    }
    if grid.dt() > max_dt {
        return refuse(format!(
            "dt = {} ps does not resolve the line splitting",
            grid.dt()
        ));
    }
    Ok(())
}

pub fn solve(
    medium: &RamanMedium,
    control: &ControlField,
    input: &ComplexEnvelope,
    settings: &SolverSettings,
) -> Result<TdSolution> {
    control.validate()?;
    let grid = *input.grid();
    check_resolution(medium, control, &grid, settings)?;
    let n = grid.len();

    let amp = (medium.control_intensity() * control.relative_scale).sqrt();
    let ec: Vec<Complex64> = control.shape_amplitude(&grid).iter().map(|a| a * amp).collect();
    let k0 = medium.k0();
    let delta = medium.splitting();
    let lower = medium.lower();
    let upper = medium.upper();
    let mut sys = System {
        control: ec,
        lower: LineStepper::new(lower.linewidth, -1.0, delta, 0.5 * k0 * lower.strength_per_intensity, &grid),
        upper: LineStepper::new(upper.linewidth, 1.0, delta, 0.5 * k0 * upper.strength_per_intensity, &grid),
        drive: vec![ZERO; n],
        q21: vec![ZERO; n],
        q31: vec![ZERO; n],
        max_q: 0.0,
    };

    let h = medium.length_mm() / settings.nz as f64;
    let mut e = input.samples().to_vec();
    let mut k1 = vec![ZERO; n];
    let mut k2 = vec![ZERO; n];
    let mut mid = vec![ZERO; n];
    for _ in 0..settings.nz {
        sys.rhs(&e, &mut k1);
        match settings.scheme {
            Scheme::Euler => {
                for (x, k) in e.iter_mut().zip(&k1) {
                    *x += k * h;
                }
            }
            Scheme::Midpoint => {
                for ((m, x), k) in mid.iter_mut().zip(&e).zip(&k1) {
                    *m = x + k * (0.5 * h);
                }
                sys.rhs(&mid, &mut k2);
                for (x, k) in e.iter_mut().zip(&k2) {
                    *x += k * h;
                }
            }
        }
    }
    // coherences at z = L
    sys.rhs(&e, &mut k1);

    let mut warnings = Vec::new();
    if sys.max_q > WEAK_SIGNAL_LIMIT {
        warnings.push(SolverWarning::StrongCoherence {
            max_magnitude: sys.max_q,
        });
    }
    if let Some(control_fwhm) = control.fwhm_ps(&grid) {
        if let Ok(signal_fwhm) = fwhm_samples(&grid.times(), &input.intensity()) {
            if control_fwhm < LONG_CONTROL_RATIO * signal_fwhm {
                warnings.push(SolverWarning::ShortControl {
                    control_fwhm_ps: control_fwhm,
                    signal_fwhm_ps: signal_fwhm,
                });
            }
        }
    }
    Ok(TdSolution {
        output: ComplexEnvelope::new(grid, e)?,
        coherences: CoherenceState {
            q21: sys.q21,
            q31: sys.q31,
        },
        warnings,
    })
}

/// Centroid delay and loss of the TD output for each control intensity.
/// Points are independent and solved in parallel.
pub fn delay_vs_control_scan(
    medium: &RamanMedium,
    control: &ControlField,
    intensities: &[f64],
    input: &ComplexEnvelope,
    settings: &SolverSettings,
) -> Result<Vec<ScanPoint>> {
    let media = intensities
        .iter()
        .map(|&i| medium.with_control_intensity(i))
        .collect::<Result<Vec<_>>>()?;
    media
        .par_iter()
        .map(|m| {
            let sol = solve(m, control, input, settings)?;
            let (delay_ps, loss_db) = pulse_delay_and_loss(input, &sol.output)?;
            Ok(ScanPoint {
                control_intensity: m.control_intensity(),
                delay_ps,
                loss_db,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::{propagate, transfer_function};
    use crate::kk::Susceptibility;
    use crate::medium::{group_delay_for_depth, LineParams};
    use crate::spectral::{synthesize_pulse, PulseShape, PulseWidth};

    const K0: f64 = 8213.0;
    const L: f64 = 3.0;

    fn doublet(d0: f64) -> RamanMedium {
        RamanMedium::from_target_depth(d0, 1.0, 6.8, K0, L).unwrap()
    }

    fn fd_output(m: &RamanMedium, input: &ComplexEnvelope) -> ComplexEnvelope {
        let chi = Susceptibility::from_medium(m, input.grid().frequency_grid());
        propagate(input, &transfer_function(&chi, m.k0(), m.length_mm(), false).unwrap()).unwrap()
    }

    #[test]
    fn series_weights_match_closed_form() {
        for p in [Complex64::new(1.0, 3.4), Complex64::new(0.5, -3.4), Complex64::new(2.0, 0.0)] {
            for h in [0.02, 0.0299] {
                let x = p * h;
                let e = x.exp();
                let i0 = (e - 1.0) / p;
                let i1 = (e * (x - 1.0) + 1.0) / (p * p * h);
                let (s0, s1) = exp_weights(p, h);
                assert!((s0 - i0).norm() < 1e-12 * i0.norm());
                assert!((s1 - i1).norm() < 1e-9 * i1.norm());
            }
        }
    }

    #[test]
    fn control_off_is_identity() {
        let grid = TimeGrid::centered(0.01, 4096).unwrap();
        let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.3), 0.0, grid).unwrap();
        let m = doublet(2.5).with_control_intensity(0.0).unwrap();
        let sol = solve(&m, &ControlField::constant(), &input, &SolverSettings::default()).unwrap();
        assert_eq!(sol.output, input);
        assert_eq!(sol.coherences.max_magnitude(), 0.0);
    }

    #[test]
    fn matches_frequency_domain_for_constant_control() {
        let grid = TimeGrid::centered(0.01, 1 << 14).unwrap();
        let input =
            synthesize_pulse(PulseShape::FlatTopSpectrum, PulseWidth::Bandwidth(1.8), 0.0, grid).unwrap();
        let m = doublet(2.5);
        let td = solve(&m, &ControlField::constant(), &input, &SolverSettings::default()).unwrap();
        let fd = fd_output(&m, &input);
        let err = td.output.relative_l2_error(&fd).unwrap();
        assert!(err < 1e-3, "L2 {err}");
        let c0 = input.centroid().unwrap();
        let (dt_td, dt_fd) = (td.output.centroid().unwrap() - c0, fd.centroid().unwrap() - c0);
        assert!((dt_td - dt_fd).abs() < 0.01 * dt_fd.abs(), "{dt_td} vs {dt_fd}");
    }

    #[test]
    fn single_line_beer_lambert() {
        let grid = TimeGrid::centered(0.02, 1 << 14).unwrap();
        let d0 = 2.0;
        let m = RamanMedium::new(
            6.8,
            LineParams { linewidth: 1.0, strength_per_intensity: 0.0 },
            LineParams { linewidth: 1.0, strength_per_intensity: d0 / (K0 * L) },
            L,
            K0,
            1.0,
        )
        .unwrap();
        let base = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(30.0), 0.0, grid).unwrap();
        // spectrum centred on the upper line at +Δ/2
        let input = ComplexEnvelope::new(
            grid,
            base.samples()
                .iter()
                .zip(grid.times())
                .map(|(s, t)| s * Complex64::cis(-3.4 * t))
                .collect(),
        )
        .unwrap();
        let sol = solve(&m, &ControlField::constant(), &input, &SolverSettings { nz: 64, scheme: Scheme::Midpoint })
            .unwrap();
        let ratio = sol.output.energy() / input.energy();
        assert!((ratio / (-d0).exp() - 1.0).abs() < 0.02, "{ratio}");
        // the same pulse on the empty side of the spectrum passes
        let mirrored = ComplexEnvelope::new(
            grid,
            base.samples()
                .iter()
                .zip(grid.times())
                .map(|(s, t)| s * Complex64::cis(3.4 * t))
                .collect(),
        )
        .unwrap();
        let sol = solve(&m, &ControlField::constant(), &mirrored, &SolverSettings { nz: 64, scheme: Scheme::Midpoint })
            .unwrap();
        assert!(sol.output.energy() / mirrored.energy() > 0.9);
    }

    #[test]
    fn causal_response() {
        let grid = TimeGrid::centered(0.01, 4096).unwrap();
        let input = ComplexEnvelope::from_fn(grid, |t| {
            if t.abs() < 1.0 {
                Complex64::new((0.5 * PI * t).cos().powi(2), 0.0)
            } else {
                ZERO
            }
        });
        let sol = solve(&doublet(2.5), &ControlField::constant(), &input, &SolverSettings::default()).unwrap();
        let peak = sol.output.samples().iter().map(|s| s.norm()).fold(0.0, f64::max);
        for (k, s) in sol.output.samples().iter().enumerate() {
            if grid.time(k) < -1.0 - grid.dt() {
                assert!(s.norm() < 1e-8 * peak);
            }
        }
    }

    #[test]
    fn convergence_order() {
        let grid = TimeGrid::centered(0.02, 4096).unwrap();
        let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.4), 0.0, grid).unwrap();
        let m = doublet(2.5);
        let run = |nz: usize, scheme: Scheme| {
            solve(&m, &ControlField::constant(), &input, &SolverSettings { nz, scheme })
                .unwrap()
                .output
        };
        for scheme in [Scheme::Midpoint, Scheme::Euler] {
            let reference = run(2048, scheme);
            let e1 = run(32, scheme).relative_l2_error(&reference).unwrap();
            let e2 = run(64, scheme).relative_l2_error(&reference).unwrap();
            let expected = 2f64.powi(scheme.order() as i32);
            let ratio = e1 / e2;
            assert!((ratio / expected - 1.0).abs() < 0.3, "{scheme:?}: {e1} / {e2} = {ratio}");
        }
    }

    #[test]
    fn long_control_matches_constant() {
        let grid = TimeGrid::centered(0.01, 1 << 13).unwrap();
        let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.65), 0.0, grid).unwrap();
        let m = doublet(2.5);
        let settings = SolverSettings::default();
        let flat = solve(&m, &ControlField::flat_top(4.0), &input, &settings).unwrap();
        let constant = solve(&m, &ControlField::constant(), &input, &settings).unwrap();
        assert!(!flat.warnings.iter().any(|w| matches!(w, SolverWarning::ShortControl { .. })));
        let (d_flat, l_flat) = pulse_delay_and_loss(&input, &flat.output).unwrap();
        let (d_const, l_const) = pulse_delay_and_loss(&input, &constant.output).unwrap();
        assert!((d_flat - d_const).abs() < 0.02 * d_const, "{d_flat} vs {d_const}");
        assert!((l_flat - l_const).abs() < 0.02 * l_const, "{l_flat} vs {l_const}");
        assert!(flat.output.relative_l2_error(&constant.output).unwrap() < 0.02);
    }

    #[test]
    fn short_control_and_strong_coherence_warn() {
        let grid = TimeGrid::centered(0.01, 4096).unwrap();
        let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.65), 0.0, grid).unwrap();
        let sol = solve(&doublet(2.5), &ControlField::gaussian(1.0), &input, &SolverSettings::default()).unwrap();
        assert!(sol.warnings.iter().any(|w| matches!(w, SolverWarning::ShortControl { .. })));
        let strong = input.scaled(100.0);
        let sol = solve(&doublet(2.5), &ControlField::constant(), &strong, &SolverSettings::default()).unwrap();
        assert!(sol.warnings.iter().any(|w| matches!(w, SolverWarning::StrongCoherence { .. })));
        let weak = input.scaled(1e-3);
        let sol = solve(&doublet(2.5), &ControlField::constant(), &weak, &SolverSettings::default()).unwrap();
        assert!(sol.warnings.is_empty());
        assert!(sol.coherences.max_magnitude() < WEAK_SIGNAL_LIMIT);
    }

    #[test]
    fn resolution_refusals() {
        let grid = TimeGrid::centered(0.01, 1024).unwrap();
        let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.65), 0.0, grid).unwrap();
        let c = ControlField::constant();
        let few = solve(&doublet(2.5), &c, &input, &SolverSettings { nz: 8, scheme: Scheme::Midpoint });
        match few {
            Err(Error::Resolution { min_nz, .. }) => assert!(min_nz >= MIN_Z_STEPS),
            other => panic!("{other:?}"),
        }
        let deep = solve(&doublet(50.0), &c, &input, &SolverSettings { nz: 64, scheme: Scheme::Midpoint });
        match deep {
            Err(Error::Resolution { min_nz, .. }) => assert!(min_nz > 500),
            other => panic!("{other:?}"),
        }
        let coarse_grid = TimeGrid::centered(0.2, 1024).unwrap();
        let coarse = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(4.0), 0.0, coarse_grid).unwrap();
        let err = solve(&doublet(1.0), &c, &coarse, &SolverSettings::default());
        assert!(matches!(err, Err(Error::Resolution { .. })));
    }

    #[test]
    fn control_scan_is_linear() {
        let grid = TimeGrid::centered(0.01, 1 << 13).unwrap();
        let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(1.5), 0.0, grid).unwrap();
        let m = doublet(1.0);
        let c = ControlField::constant();
        let s = SolverSettings::default();
        assert!(delay_vs_control_scan(&m, &c, &[], &input, &s).unwrap().is_empty());
        let scan = delay_vs_control_scan(&m, &c, &[0.0, 1.0, 2.0], &input, &s).unwrap();
        let tau = group_delay_for_depth(1.0, 1.0, 6.8);
        assert_eq!(scan[0].delay_ps, 0.0);
        assert!((scan[1].delay_ps - tau).abs() < 0.05 * tau, "{}", scan[1].delay_ps);
        assert!((scan[2].delay_ps - 2.0 * scan[1].delay_ps).abs() < 0.02 * scan[2].delay_ps);
        assert!(scan.windows(2).all(|w| w[1].delay_ps >= w[0].delay_ps));
        assert!(delay_vs_control_scan(&m, &c, &[-1.0], &input, &s).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(8))]
            #[test]
            fn passive(
                g2 in 0.2f64..3.0, g3 in 0.2f64..3.0,
                d2 in 0.0f64..4.0, d3 in 0.0f64..4.0,
                delta in 2.0f64..10.0, width in 0.3f64..1.0,
            ) {
                let grid = TimeGrid::centered(0.02, 2048).unwrap();
                let m = RamanMedium::new(
                    delta,
                    LineParams { linewidth: g2, strength_per_intensity: d2 * g2 / (K0 * L) },
                    LineParams { linewidth: g3, strength_per_intensity: d3 * g3 / (K0 * L) },
                    L, K0, 1.0,
                ).unwrap();
                let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(width), 0.0, grid).unwrap();
                let sol = solve(&m, &ControlField::constant(), &input, &SolverSettings { nz: 128, scheme: Scheme::Midpoint }).unwrap();
                prop_assert!(sol.output.energy() <= input.energy() * (1.0 + 1e-9));
            }
        }
    }
}
