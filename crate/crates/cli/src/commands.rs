//! The five subcommands. Each validates its inputs, computes, and then writes
//! its CSVs and a `<command>_summary.toml` into the output directory.

use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use slowlight_core::analysis::{
    absorption_spectrum, cross_correlate, deconvolve_duration, first_moment, first_moment_delay_windowed,
    fwhm, linearity_diagnostic, pulse_delay_and_loss, CorrelationCurve, ScanPoint,
};
use slowlight_core::fd::{delay_vs_scale_scan, propagate, transfer_function};
use slowlight_core::io;
use slowlight_core::kk::{
    group_delay_from_susceptibility, ingest_absorption, kk_real_from_imag, KkOptions, OpticalDepthSpectrum,
};
use slowlight_core::medium::{
    dbp_for_depth, delay_per_loss, depth_for_unit_dbp, group_delay_for_depth, loss_db_for_depth,
};
use slowlight_core::spectral::{forward_transform, TimeGrid};
use slowlight_core::td::{self, delay_vs_control_scan, ControlShape};
use slowlight_core::{ComplexEnvelope, Susceptibility};

use crate::config::Config;
use crate::summary::Summary;
use crate::CliError;

pub const ANALYTIC_CSV: &str = "analytic.csv";
pub const SUSCEPTIBILITY_CSV: &str = "susceptibility.csv";
pub const INPUT_ENVELOPE_CSV: &str = "input_envelope.csv";
pub const OUTPUT_ENVELOPE_CSV: &str = "output_envelope.csv";
pub const SPECTRA_CSV: &str = "spectra.csv";
pub const XCORR_ON_CSV: &str = "xcorr_on.csv";
pub const XCORR_OFF_CSV: &str = "xcorr_off.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const XCORR_CSV: &str = "xcorr.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Fd,
    Td,
}

impl Domain {
    fn name(&self) -> &'static str {
        match self {
            Domain::Fd => "fd",
            Domain::Td => "td",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct KkArgs {
    pub absorption: Option<PathBuf>,
    pub force_taper: bool,
}

#[derive(Debug, Clone)]
pub struct PropagateArgs {
    pub domain: Domain,
    pub chi_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct XcorrArgs {
    pub signal: Option<PathBuf>,
    pub signal_off: Option<PathBuf>,
    pub correlation: Option<PathBuf>,
    pub reference_fwhm_ps: Option<f64>,
}

pub fn summary_path(out_dir: &Path, command: &str) -> PathBuf {
    out_dir.join(format!("{command}_summary.toml"))
}

fn prepare_out_dir(out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))
}

/// Closed-form delay, loss and delay-bandwidth product over a `d0` sweep.
pub fn analytic(config: &Config, out_dir: &Path) -> Result<Summary, CliError> {
    let gamma = config.medium.gamma_invps;
    let delta = config.medium.delta_invps;
    let depths = match config.sweep {
        Some(_) => config.d0_values(),
        None => vec![config.medium()?.peak_optical_depth()?],
    };
    let rows = depths
        .iter()
        .map(|&d0| {
            Ok(io::AnalyticRow {
                d0,
                delay_ps: group_delay_for_depth(d0, gamma, delta),
                loss_db: loss_db_for_depth(d0, gamma, delta),
                dbp: dbp_for_depth(d0, gamma, delta)?,
            })
        })
        .collect::<Result<Vec<_>, slowlight_core::Error>>()
        .map_err(|e| CliError::Config(e.to_string()))?;

    let medium = config.medium()?;
    let fom = medium.figures_of_merit()?;
    let mut s = Summary::new("analytic");
    s.integer("rows", rows.len());
    s.number("peak_optical_depth", fom.peak_optical_depth);
    s.number("group_delay_ps", fom.group_delay_ps);
    s.number("loss_db", fom.loss_db);
    s.number("delay_per_loss_ps_per_db", delay_per_loss(gamma, delta));
    s.number("delay_bandwidth_product", fom.delay_bandwidth_product);
    s.number("center_transmission", 10f64.powf(-fom.loss_db / 10.0));
    if let Ok(d) = depth_for_unit_dbp(gamma, delta) {
        s.number("d0_at_unit_dbp", d);
        s.number("loss_db_at_unit_dbp", loss_db_for_depth(d, gamma, delta));
    }
    if let Some(cross) = rows.windows(2).find(|w| w[0].dbp < 1.0 && w[1].dbp >= 1.0) {
        let (a, b) = (cross[0], cross[1]);
        s.number("sweep_dbp_crossing_d0", a.d0 + (1.0 - a.dbp) / (b.dbp - a.dbp) * (b.d0 - a.d0));
    }
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        s.number("sweep_d0_first", first.d0);
        s.number("sweep_d0_last", last.d0);
    }

    prepare_out_dir(out_dir)?;
    io::write_analytic(&out_dir.join(ANALYTIC_CSV), &rows)?;
    s.write(&summary_path(out_dir, "analytic"), config)?;
    Ok(s)
}

/// Dispersion from absorption: an ingested CSV, or the configured model.
pub fn kk(config: &Config, args: &KkArgs, out_dir: &Path) -> Result<Summary, CliError> {
    let k0 = config.k0()?;
    let length = config.medium.length_mm;
    let grid = config.time_grid()?.frequency_grid();
    let medium = config.medium()?;
    let depth = match &args.absorption {
        Some(path) => {
            let (kind, records) = io::read_absorption(path)?;
            ingest_absorption(&records, kind, config.medium.lambda0_nm, grid)?
        }
        None => OpticalDepthSpectrum::from_medium(&medium, grid)?,
    };
    let chi = kk_real_from_imag(&depth, k0, length, KkOptions { force_taper: args.force_taper })?;
    let tau = group_delay_from_susceptibility(&chi, k0, length, 0.0)?;

    let mut s = Summary::new("kk");
    s.text("source", if args.absorption.is_some() { "csv" } else { "model" });
    s.flag("force_taper", args.force_taper);
    s.number("center_wavelength_nm", depth.center_wavelength_nm());
    s.number("peak_optical_depth", depth.peak());
    s.number("edge_fraction", depth.edge_fraction());
    s.number("support_lo_invps", depth.support().0);
    s.number("support_hi_invps", depth.support().1);
    s.number("group_delay_ps", tau);
    if args.absorption.is_none() {
        let exact = Susceptibility::from_medium(&medium, grid);
        let peak = exact.values().iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        let err = chi
            .values()
            .iter()
            .zip(exact.values())
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0, f64::max);
        let analytic = medium.group_delay()?;
        s.number("analytic_group_delay_ps", analytic);
        if peak > 0.0 {
            s.number("kk_max_error_fraction", err / peak);
        }
        if analytic != 0.0 {
            s.number("group_delay_relative_error", (tau - analytic) / analytic);
        }
    }

    prepare_out_dir(out_dir)?;
    io::write_susceptibility(&out_dir.join(SUSCEPTIBILITY_CSV), &chi)?;
    s.write(&summary_path(out_dir, "kk"), config)?;
    Ok(s)
}

fn susceptibility_source(config: &Config, chi_csv: &Option<PathBuf>, grid: &TimeGrid, intensity: f64) -> Result<Susceptibility, CliError> {
    let fgrid = grid.frequency_grid();
    match chi_csv {
        Some(path) => {
            let chi = io::read_susceptibility(path)?;
            let chi = if chi.grid().same_as(&fgrid) { chi } else { chi.resample(fgrid) };
            Ok(chi.scaled(intensity))
        }
        None => Ok(Susceptibility::from_medium(&config.medium_at(intensity)?, fgrid)),
    }
}

/// Gaussian correlator gate of intensity FWHM `fwhm_ps`, unit energy.
pub fn reference_pulse(grid: TimeGrid, fwhm_ps: f64) -> Result<ComplexEnvelope, CliError> {
    let a = 2.0 * LN_2 / (fwhm_ps * fwhm_ps);
    Ok(ComplexEnvelope::from_fn(grid, |t| Complex64::new((-a * t * t).exp(), 0.0)).normalized()?)
}

fn correlation_metrics(s: &mut Summary, prefix: &str, curve: &CorrelationCurve, reference_fwhm: f64, warnings: &mut Vec<String>) {
    match fwhm(curve) {
        Ok(w) => {
            s.number(&format!("{prefix}fwhm_ps"), w);
            match deconvolve_duration(w, reference_fwhm) {
                Ok(d) => s.number(&format!("{prefix}deconvolved_duration_ps"), d),
                Err(e) => warnings.push(format!("{prefix}deconvolution: {e}")),
            }
        }
        Err(e) => warnings.push(format!("{prefix}fwhm: {e}")),
    }
}

/// Propagates the configured signal once, in the frequency or time domain.
pub fn propagate_cmd(config: &Config, args: &PropagateArgs, out_dir: &Path) -> Result<Summary, CliError> {
    let input = config.signal_envelope()?;
    let grid = *input.grid();
    let k0 = config.k0()?;
    let length = config.medium.length_mm;
    let intensity = config.control.intensity;
    let mut warnings = Vec::new();
    let mut s = Summary::new("propagate");
    s.text("domain", args.domain.name());
    s.text("chi_source", if args.chi_csv.is_some() { "csv" } else { "model" });

    let output = match args.domain {
        Domain::Fd => {
            if config.control.kind != crate::config::ControlKind::Constant {
                warnings.push("fd propagation treats the control as constant".into());
            }
            let chi = susceptibility_source(config, &args.chi_csv, &grid, intensity)?;
            propagate(&input, &transfer_function(&chi, k0, length, false)?)?
        }
        Domain::Td => {
            if args.chi_csv.is_some() {
                return Err(CliError::Config(
                    "td propagation needs the Lorentzian model; --chi-csv is fd-only".into(),
                ));
            }
            let medium = config.medium()?;
            let control = config.control_field();
            let sol = td::solve(&medium, &control, &input, &config.solver_settings())?;
            warnings.extend(sol.warnings.iter().map(|w| w.to_string()));
            s.number("output_max_coherence", sol.coherences.max_magnitude());
            if control.shape == ControlShape::Constant {
                let chi = Susceptibility::from_medium(&medium, grid.frequency_grid());
                let fd = propagate(&input, &transfer_function(&chi, k0, length, false)?)?;
                s.number("td_fd_l2_error", sol.output.relative_l2_error(&fd)?);
                let c0 = input.centroid()?;
                let (d_td, d_fd) = (sol.output.centroid()? - c0, fd.centroid()? - c0);
                s.number("td_fd_delay_ps", d_fd);
                if d_fd != 0.0 {
                    s.number("td_fd_delay_discrepancy", (d_td - d_fd) / d_fd);
                }
            }
            sol.output
        }
    };

    let off = forward_transform(&input).intensity();
    let on = forward_transform(&output).intensity();
    let absorption = absorption_spectrum(&on, &off)?;
    let z = grid.frequency_grid().zero_index();

    let (delay, loss) = pulse_delay_and_loss(&input, &output)?;
    s.number("delay_ps", delay);
    s.number("loss_db", loss);
    if let Some(a) = absorption[z] {
        s.number("center_transmission", 1.0 - a);
    }
    s.number("input_energy", input.energy());
    s.number("output_energy", output.energy());
    if args.chi_csv.is_none() {
        s.number("analytic_group_delay_ps", config.medium()?.group_delay()?);
        s.number("peak_optical_depth", config.medium()?.peak_optical_depth()?);
    }

    let reference_fwhm = config.analysis.reference_fwhm_ps;
    let reference = reference_pulse(grid, reference_fwhm)?;
    let xc_on = cross_correlate(&output, &reference)?;
    let xc_off = cross_correlate(&input, &reference)?;
    let window = config.analysis.window_ps.map(|[a, b]| (a, b));
    s.number("xcorr_delay_ps", first_moment_delay_windowed(&xc_on, &xc_off, window)?);
    correlation_metrics(&mut s, "xcorr_on_", &xc_on, reference_fwhm, &mut warnings);
    correlation_metrics(&mut s, "xcorr_off_", &xc_off, reference_fwhm, &mut warnings);
    s.texts("warnings", &warnings);

    prepare_out_dir(out_dir)?;
    io::write_envelope(&out_dir.join(INPUT_ENVELOPE_CSV), &input)?;
    io::write_envelope(&out_dir.join(OUTPUT_ENVELOPE_CSV), &output)?;
    io::write_spectra(&out_dir.join(SPECTRA_CSV), grid.frequency_grid(), &off, &on, &absorption)?;
    io::write_correlation(&out_dir.join(XCORR_ON_CSV), &xc_on)?;
    io::write_correlation(&out_dir.join(XCORR_OFF_CSV), &xc_off)?;
    s.write(&summary_path(out_dir, "propagate"), config)?;
    Ok(s)
}

/// Delay and loss versus control intensity, with the linearity diagnostic.
pub fn sweep(config: &Config, args: &PropagateArgs, out_dir: &Path) -> Result<Summary, CliError> {
    let intensities = config
        .control
        .intensity_list
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs control.intensity_list".into()))?;
    let input = config.signal_envelope()?;
    let grid = *input.grid();
    let points: Vec<ScanPoint> = match args.domain {
        Domain::Fd => {
            let chi = susceptibility_source(config, &args.chi_csv, &grid, 1.0)?;
            delay_vs_scale_scan(&chi, config.k0()?, config.medium.length_mm, &intensities, &input)?
        }
        Domain::Td => {
            if args.chi_csv.is_some() {
                return Err(CliError::Config(
                    "td sweeps need the Lorentzian model; --chi-csv is fd-only".into(),
                ));
            }
            delay_vs_control_scan(
                &config.medium_at(1.0)?,
                &config.control_field(),
                &intensities,
                &input,
                &config.solver_settings(),
            )?
        }
    };

    let mut s = Summary::new("sweep");
    s.text("domain", args.domain.name());
    s.text("chi_source", if args.chi_csv.is_some() { "csv" } else { "model" });
    s.integer("points", points.len());
    if args.chi_csv.is_none() {
        s.number("unit_intensity_d0", config.unit_depth()?);
    }
    s.number("max_delay_ps", points.iter().map(|p| p.delay_ps).fold(0.0, f64::max));
    s.number("max_loss_db", points.iter().map(|p| p.loss_db).fold(0.0, f64::max));
    if points.len() >= 3 {
        let series: Vec<(f64, f64)> = points.iter().map(|p| (p.control_intensity, p.delay_ps)).collect();
        let diag = linearity_diagnostic(&series)?;
        s.number("slope_ps_per_intensity", diag.slope);
        s.number("residual_ratio", diag.residual_ratio);
    }

    prepare_out_dir(out_dir)?;
    io::write_scan(&out_dir.join(SWEEP_CSV), &points)?;
    s.write(&summary_path(out_dir, "sweep"), config)?;
    Ok(s)
}

/// Cross-correlation of envelope CSVs with a Gaussian reference, or analysis
/// of a correlation curve given directly.
pub fn xcorr(config: &Config, args: &XcorrArgs, out_dir: &Path) -> Result<Summary, CliError> {
    let reference_fwhm = args.reference_fwhm_ps.unwrap_or(config.analysis.reference_fwhm_ps);
    if !(reference_fwhm.is_finite() && reference_fwhm > 0.0) {
        return Err(CliError::Config(format!("reference FWHM must be positive, got {reference_fwhm}")));
    }
    let window = config.analysis.window_ps.map(|[a, b]| (a, b));
    let mut s = Summary::new("xcorr");
    s.number("reference_fwhm_ps", reference_fwhm);
    let mut warnings = Vec::new();
    let mut curves = Vec::new();

    match (&args.correlation, &args.signal) {
        (Some(path), None) => {
            let curve = io::read_correlation(path)?;
            s.text("source", "correlation");
            s.number("first_moment_ps", first_moment(&curve, window)?);
            correlation_metrics(&mut s, "", &curve, reference_fwhm, &mut warnings);
        }
        (None, Some(path)) => {
            let on = io::read_envelope(path)?;
            let reference = reference_pulse(*on.grid(), reference_fwhm)?;
            let curve = cross_correlate(&on, &reference)?;
            s.text("source", "envelope");
            s.number("first_moment_ps", first_moment(&curve, window)?);
            correlation_metrics(&mut s, "", &curve, reference_fwhm, &mut warnings);
            if let Some(off_path) = &args.signal_off {
                let off = io::read_envelope(off_path)?;
                let off_curve = cross_correlate(&off, &reference)?;
                s.number("delay_ps", first_moment_delay_windowed(&curve, &off_curve, window)?);
                s.number("loss_db", pulse_delay_and_loss(&off, &on)?.1);
                curves.push((XCORR_OFF_CSV, off_curve));
            }
            curves.insert(0, (XCORR_CSV, curve));
        }
        _ => {
            return Err(CliError::Config(
                "xcorr needs exactly one of --signal or --correlation".into(),
            ))
        }
    }
    s.texts("warnings", &warnings);

    prepare_out_dir(out_dir)?;
    for (name, curve) in &curves {
        io::write_correlation(&out_dir.join(name), curve)?;
    }
    s.write(&summary_path(out_dir, "xcorr"), config)?;
    Ok(s)
}
