use std::f64::consts::PI;

use slowlight_core::analysis::{cross_correlate, first_moment_delay, pulse_delay_and_loss};
use slowlight_core::fd::{propagate, transfer_function};
use slowlight_core::io;
use slowlight_core::kk::{kk_real_from_imag, KkOptions, OpticalDepthSpectrum};
use slowlight_core::medium::LineParams;
use slowlight_core::spectral::{synthesize_pulse, PulseShape, PulseWidth};
use slowlight_core::td::{self, ControlField, SolverSettings};
use slowlight_core::{RamanMedium, Susceptibility, TimeGrid};

const K0: f64 = 2.0 * PI / 765.0e-6;
const L: f64 = 10.0;

fn doublet(d0: f64) -> RamanMedium {
    RamanMedium::from_target_depth(d0, 1.0, 6.8, K0, L).unwrap()
}

fn in_window(grid: TimeGrid) -> slowlight_core::ComplexEnvelope {
    synthesize_pulse(PulseShape::FlatTopSpectrum, PulseWidth::Bandwidth(1.8 / (2.0 * PI)), 0.0, grid).unwrap()
}

#[test]
fn reconstructed_dispersion_propagates_like_the_model() {
    let grid = TimeGrid::centered(0.01, 1 << 14).unwrap();
    let medium = doublet(2.5);
    let depth = OpticalDepthSpectrum::from_medium(&medium, grid.frequency_grid()).unwrap();
    let chi_kk = kk_real_from_imag(&depth, K0, L, KkOptions::default()).unwrap();
    let chi = Susceptibility::from_medium(&medium, grid.frequency_grid());
    let input = in_window(grid);
    let a = propagate(&input, &transfer_function(&chi_kk, K0, L, false).unwrap()).unwrap();
    let b = propagate(&input, &transfer_function(&chi, K0, L, false).unwrap()).unwrap();
    assert!(a.relative_l2_error(&b).unwrap() < 5e-3);
}

#[test]
fn asymmetric_medium_td_matches_fd() {
    let grid = TimeGrid::centered(0.01, 1 << 14).unwrap();
    let strength = |d: f64, g: f64| d * g / (K0 * L);
    let lower = LineParams { linewidth: 0.8, strength_per_intensity: strength(2.0, 0.8) };
    let upper = LineParams { linewidth: 1.3, strength_per_intensity: strength(3.0, 1.3) };
    let medium = RamanMedium::new(6.8, lower, upper, L, K0, 1.0).unwrap();
    let input = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(1.5), 0.0, grid).unwrap();
    let sol = td::solve(&medium, &ControlField::constant(), &input, &SolverSettings::default()).unwrap();
    let chi = Susceptibility::from_medium(&medium, grid.frequency_grid());
    let fd = propagate(&input, &transfer_function(&chi, K0, L, false).unwrap()).unwrap();
    let err = sol.output.relative_l2_error(&fd).unwrap();
    assert!(err < 1e-3);
}

#[test]
fn correlation_delay_agrees_with_centroid_delay() {
    let grid = TimeGrid::centered(0.01, 1 << 14).unwrap();
    let input = in_window(grid);
    let chi = Susceptibility::from_medium(&doublet(2.5), grid.frequency_grid());
    let output = propagate(&input, &transfer_function(&chi, K0, L, false).unwrap()).unwrap();
    let reference = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.2), 0.0, grid).unwrap();
    let on = cross_correlate(&output, &reference).unwrap();
    let off = cross_correlate(&input, &reference).unwrap();
    let xc = first_moment_delay(&on, &off).unwrap();
    let (centroid, loss) = pulse_delay_and_loss(&input, &output).unwrap();
    assert!((xc - centroid).abs() < 1e-9);
    assert!((xc / doublet(2.5).group_delay().unwrap() - 1.0).abs() < 0.05);
    assert!(loss > 0.0);
}

#[test]
fn files_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let grid = TimeGrid::centered(0.02, 1 << 10).unwrap();
    let pulse = synthesize_pulse(PulseShape::Gaussian, PulseWidth::Duration(0.6), 0.1, grid).unwrap();
    let path = dir.path().join("env.csv");
    io::write_envelope(&path, &pulse).unwrap();
    assert_eq!(io::read_envelope(&path).unwrap(), pulse);

    let chi = Susceptibility::from_medium(&doublet(1.0), grid.frequency_grid());
    let path = dir.path().join("chi.csv");
    io::write_susceptibility(&path, &chi).unwrap();
    assert_eq!(io::read_susceptibility(&path).unwrap().values(), chi.values());
}
