use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use slowlight_cli::commands::{self, Domain, KkArgs, PropagateArgs, XcorrArgs};
use slowlight_cli::config::Config;
use slowlight_cli::summary;
use slowlight_core::analysis::CorrelationCurve;
use slowlight_core::io;

const BASE: &str = r#"
[medium]
gamma_invps = 1.0
delta_invps = 6.8
d0 = 2.5
length_mm = 10.0
lambda0_nm = 765.0

[grid]
n = 4096
dt_ps = 0.02
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slowlight"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn in_window(extra: &str) -> Config {
    Config::parse(&format!(
        "{BASE}\n[signal]\nshape = \"flat_top\"\nbandwidth_invps = {}\n{extra}",
        1.8 / (2.0 * std::f64::consts::PI)
    ))
    .unwrap()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn analytic_row_at_design_depth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::parse(&format!("{BASE}\n[sweep]\nd0_start = 0.0\nd0_stop = 5.0\nd0_step = 0.1\n")).unwrap();
    let s = commands::analytic(&cfg, dir.path()).unwrap();
    let rows = io::read_analytic(&dir.path().join(commands::ANALYTIC_CSV)).unwrap();
    assert_eq!(rows.len(), 51);
    let r = rows.iter().find(|r| (r.d0 - 2.5).abs() < 1e-9).unwrap();
    assert!((r.delay_ps - 0.16735).abs() < 1e-5);
    assert!((r.loss_db - 1.729).abs() < 1e-3);
    assert!((r.dbp - 0.9706).abs() < 1e-4);
    let cross = s.get_number("sweep_dbp_crossing_d0").unwrap();
    assert!(cross > 2.5 && cross < 2.6);
}

#[test]
fn analytic_at_zero_depth_is_zero_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::parse(&BASE.replace("d0 = 2.5", "d0 = 0.0")).unwrap();
    commands::analytic(&cfg, dir.path()).unwrap();
    let rows = io::read_analytic(&dir.path().join(commands::ANALYTIC_CSV)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].d0, rows[0].delay_ps, rows[0].loss_db, rows[0].dbp), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn propagate_control_off_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_window("[control]\nkind = \"constant\"\nintensity = 0.0\n");
    let args = PropagateArgs { domain: Domain::Fd, chi_csv: None };
    let s = commands::propagate_cmd(&cfg, &args, dir.path()).unwrap();
    assert!(s.get_number("delay_ps").unwrap().abs() < 1e-12);
    let input = io::read_envelope(&dir.path().join(commands::INPUT_ENVELOPE_CSV)).unwrap();
    let output = io::read_envelope(&dir.path().join(commands::OUTPUT_ENVELOPE_CSV)).unwrap();
    assert!(output.relative_l2_error(&input).unwrap() < 1e-12);
    let spectra = fs::read_to_string(dir.path().join(commands::SPECTRA_CSV)).unwrap();
    for line in spectra.lines().skip(1) {
        let a = line.rsplit(',').next().unwrap();
        assert!(a.is_empty() || a.parse::<f64>().unwrap().abs() < 1e-12);
    }
}

#[test]
fn propagate_fd_delay_and_center_transmission() {
    let dir = tempfile::tempdir().unwrap();
    let args = PropagateArgs { domain: Domain::Fd, chi_csv: None };
    let s = commands::propagate_cmd(&in_window(""), &args, dir.path()).unwrap();
    assert!((s.get_number("delay_ps").unwrap() / 0.167 - 1.0).abs() < 0.05);
    assert!((s.get_number("center_transmission").unwrap() / 0.672 - 1.0).abs() < 0.01);
}

#[test]
fn propagate_td_reports_fd_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let text = BASE.replace("n = 4096\ndt_ps = 0.02", "n = 16384\ndt_ps = 0.01");
    let cfg = Config::parse(&format!("{text}\n[solver]\nnz = 256\nscheme = \"midpoint\"\n")).unwrap();
    let args = PropagateArgs { domain: Domain::Td, chi_csv: None };
    let s = commands::propagate_cmd(&cfg, &args, dir.path()).unwrap();
    assert!(s.get_number("td_fd_l2_error").unwrap() < 1e-3);
    assert!(s.get_number("td_fd_delay_discrepancy").unwrap().abs() < 0.01);
}

#[test]
fn propagate_from_reconstructed_susceptibility() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_window("");
    commands::kk(&cfg, &KkArgs::default(), dir.path()).unwrap();
    let args = PropagateArgs { domain: Domain::Fd, chi_csv: Some(dir.path().join(commands::SUSCEPTIBILITY_CSV)) };
    let s = commands::propagate_cmd(&cfg, &args, &dir.path().join("csv")).unwrap();
    let model = commands::propagate_cmd(&cfg, &PropagateArgs { domain: Domain::Fd, chi_csv: None }, &dir.path().join("model")).unwrap();
    let (a, b) = (s.get_number("delay_ps").unwrap(), model.get_number("delay_ps").unwrap());
    assert!((a / b - 1.0).abs() < 0.02, "{a} vs {b}");
}

#[test]
fn kk_model_matches_analytic_delay() {
    let dir = tempfile::tempdir().unwrap();
    let s = commands::kk(&in_window(""), &KkArgs::default(), dir.path()).unwrap();
    assert!(s.get_number("group_delay_relative_error").unwrap().abs() < 0.02);
    assert!(s.get_number("kk_max_error_fraction").unwrap() < 0.01);
}

#[test]
fn sweep_single_zero_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_window("[control]\nkind = \"constant\"\nintensity_list = [0.0]\n");
    let s = commands::sweep(&cfg, &PropagateArgs { domain: Domain::Fd, chi_csv: None }, dir.path()).unwrap();
    assert!(s.get("residual_ratio").is_none());
    let pts = io::read_scan(&dir.path().join(commands::SWEEP_CSV)).unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0].control_intensity, 0.0);
    assert!(pts[0].delay_ps.abs() < 1e-12 && pts[0].loss_db.abs() < 1e-12);
}

#[test]
fn sweep_lorentzian_is_linear() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_window("[control]\nkind = \"constant\"\nintensity_list = [0.0, 0.25, 0.5, 0.75, 1.0]\n");
    let s = commands::sweep(&cfg, &PropagateArgs { domain: Domain::Fd, chi_csv: None }, dir.path()).unwrap();
    assert!(s.get_number("residual_ratio").unwrap() < 0.02);
}

#[test]
fn sweep_without_list_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = commands::sweep(&in_window(""), &PropagateArgs { domain: Domain::Fd, chi_csv: None }, dir.path()).unwrap_err();
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn xcorr_deconvolves_measured_curve() {
    let dir = tempfile::tempdir().unwrap();
    let sigma = 0.675 / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
    let delays: Vec<f64> = (0..4001).map(|i| -4.0 + 0.002 * i as f64).collect();
    let intensity: Vec<f64> = delays.iter().map(|t| (-t * t / (2.0 * sigma * sigma)).exp()).collect();
    let path = dir.path().join("meas.csv");
    io::write_correlation(&path, &CorrelationCurve::new(delays, intensity).unwrap()).unwrap();
    let args = XcorrArgs { correlation: Some(path), ..Default::default() };
    let s = commands::xcorr(&in_window(""), &args, dir.path()).unwrap();
    assert!((s.get_number("fwhm_ps").unwrap() - 0.675).abs() < 1e-4);
    assert!((s.get_number("deconvolved_duration_ps").unwrap() - 0.6558).abs() < 1e-3);
}

#[test]
fn xcorr_identical_inputs_zero_delay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_window("");
    let path = dir.path().join("sig.csv");
    io::write_envelope(&path, &cfg.signal_envelope().unwrap()).unwrap();
    let args = XcorrArgs { signal: Some(path.clone()), signal_off: Some(path), ..Default::default() };
    let s = commands::xcorr(&cfg, &args, dir.path()).unwrap();
    assert!(s.get_number("delay_ps").unwrap().abs() < 1e-12);
}

#[test]
fn xcorr_of_propagated_pair_tracks_group_delay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = in_window("");
    commands::propagate_cmd(&cfg, &PropagateArgs { domain: Domain::Fd, chi_csv: None }, dir.path()).unwrap();
    let args = XcorrArgs {
        signal: Some(dir.path().join(commands::OUTPUT_ENVELOPE_CSV)),
        signal_off: Some(dir.path().join(commands::INPUT_ENVELOPE_CSV)),
        ..Default::default()
    };
    let s = commands::xcorr(&cfg, &args, &dir.path().join("x")).unwrap();
    let tau = cfg.medium().unwrap().group_delay().unwrap();
    assert!((s.get_number("delay_ps").unwrap() / tau - 1.0).abs() < 0.05);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = write_config(d, BASE);
    let out = d.join("out");
    assert_eq!(run(&["analytic", "--config", ok.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]).0, 0);
    assert!(out.join("analytic_summary.toml").exists());

    let bad = d.join("bad.toml");
    fs::write(&bad, format!("{BASE}\n[solver]\nnz = 64\nscheme = \"midpoint\"\nsubsteps = 2\n")).unwrap();
    let (code, err) = run(&["analytic", "--config", bad.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("substeps"), "{err}");

    let typed = d.join("typed.toml");
    fs::write(&typed, BASE.replace("length_mm = 10.0", "length_mm = \"ten\"")).unwrap();
    let (code, err) = run(&["analytic", "--config", typed.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("length_mm"), "{err}");

    let coarse = d.join("coarse.toml");
    fs::write(&coarse, format!("{BASE}\n[solver]\nnz = 4\nscheme = \"euler\"\n")).unwrap();
    let (code, _) = run(&["propagate", "--domain", "td", "--config", coarse.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn binary_kk_truncation_and_force_taper() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let records: String = (0..=400)
        .map(|i| {
            let lam = 760.0 + 0.025 * i as f64;
            format!("{lam},{}\n", 0.5 / (1.0 + ((lam - 765.0) / 2.0).powi(2)))
        })
        .collect();
    let csv = d.join("abs.csv");
    fs::write(&csv, format!("wavelength_nm,absorption\n{records}")).unwrap();
    let cfg = write_config(d, BASE);
    let base = ["kk", "--config", cfg.to_str().unwrap(), "--absorption", csv.to_str().unwrap(), "--out-dir"];
    let out = d.join("o");
    let mut args: Vec<&str> = base.to_vec();
    args.push(out.to_str().unwrap());
    assert_eq!(run(&args).0, 3);
    args.push("--force-taper");
    assert_eq!(run(&args).0, 0);
    assert!(out.join(commands::SUSCEPTIBILITY_CSV).exists());
}

#[test]
fn rerun_from_summary_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = write_config(
        d,
        &format!("{BASE}\n[signal]\nshape = \"gaussian\"\nduration_ps = 0.8\n[control]\nkind = \"constant\"\nintensity = 0.7\n"),
    );
    let (a, b) = (d.join("a"), d.join("b"));
    assert_eq!(run(&["propagate", "--config", cfg.to_str().unwrap(), "--out-dir", a.to_str().unwrap()]).0, 0);
    let summary = a.join("propagate_summary.toml");
    assert_eq!(run(&["propagate", "--config", summary.to_str().unwrap(), "--out-dir", b.to_str().unwrap()]).0, 0);
    for name in [commands::INPUT_ENVELOPE_CSV, commands::OUTPUT_ENVELOPE_CSV, commands::SPECTRA_CSV, commands::XCORR_ON_CSV] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(fs::read(summary).unwrap(), fs::read(b.join("propagate_summary.toml")).unwrap());
    let table = summary::read(&b.join("propagate_summary.toml")).unwrap();
    assert_eq!(table["config"]["control"]["intensity"].as_float(), Some(0.7));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        Config::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert!(n >= 5);
}
