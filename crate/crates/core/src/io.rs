//! CSV formats. Numbers are written as `{:.16e}`, which round-trips `f64`
//! exactly; files are written to a temporary sibling and renamed into place.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::analysis::{CorrelationCurve, ScanPoint};
use crate::error::{Error, Result};
use crate::kk::{AbsorptionKind, AbsorptionRecord, Susceptibility};
use crate::spectral::{ComplexEnvelope, FrequencyGrid, SpectralEnvelope, TimeGrid};

pub const ENVELOPE_HEADER: [&str; 3] = ["time_ps", "re", "im"];
pub const SPECTRUM_HEADER: [&str; 3] = ["detuning_invps", "re", "im"];
pub const SPECTRA_HEADER: [&str; 4] = ["detuning_invps", "intensity_off", "intensity_on", "absorption"];
pub const SUSCEPTIBILITY_HEADER: [&str; 3] = ["detuning_invps", "chi_re", "chi_im"];
pub const ANALYTIC_HEADER: [&str; 4] = ["d0", "delay_ps", "loss_db", "dbp"];
pub const SCAN_HEADER: [&str; 3] = ["control_intensity", "delay_ps", "loss_db"];
pub const CORRELATION_HEADER: [&str; 2] = ["delay_ps", "intensity"];
pub const ABSORPTION_HEADER: [&str; 2] = ["wavelength_nm", "absorption"];
pub const DEPTH_HEADER: [&str; 2] = ["wavelength_nm", "optical_depth"];

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidData(format!("not a file path: {}", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Rows of optional numbers; `None` is written as an empty field.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.map(format_number).unwrap_or_default()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    write_atomic(path, &bytes)
}

fn write_dense(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let rows: Vec<Vec<Option<f64>>> = rows.map(|r| r.into_iter().map(Some).collect()).collect();
    write_table(path, header, &rows)
}

/// Header and numeric rows of a CSV file; empty fields read as `None`.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse::<f64>().map(Some).map_err(|_| {
                        Error::InvalidData(format!(
                            "{}: row {}: '{f}' is not a number",
                            path.display(),
                            i + 1
                        ))
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn read_expecting(path: &Path, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    let (header, rows) = read_table(path)?;
    if header != expected {
        return Err(Error::InvalidData(format!(
            "{}: expected header {}, found {}",
            path.display(),
            expected.join(","),
            header.join(",")
        )));
    }
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::InvalidData(format!("{}: row {} has empty fields", path.display(), i + 1)))
        })
        .collect()
}

/// Checks a column is uniformly spaced and returns `(start, step)`.
fn uniform_axis(x: &[f64], what: &str) -> Result<(f64, f64)> {
    if x.len() < 2 {
        return Err(Error::InvalidData(format!("{what}: need at least two rows")));
    }
    let step = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    for (k, v) in x.iter().enumerate() {
        if (v - (x[0] + k as f64 * step)).abs() > 1e-6 * step.abs() {
            return Err(Error::InvalidData(format!("{what}: axis is not uniformly spaced at row {}", k + 1)));
        }
    }
    Ok((x[0], step))
}

pub fn write_envelope(path: &Path, env: &ComplexEnvelope) -> Result<()> {
    let grid = env.grid();
    write_dense(
        path,
        &ENVELOPE_HEADER,
        env.samples()
            .iter()
            .enumerate()
            .map(|(k, s)| vec![grid.time(k), s.re, s.im]),
    )
}

pub fn read_envelope(path: &Path) -> Result<ComplexEnvelope> {
    let rows = read_expecting(path, &ENVELOPE_HEADER)?;
    let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (t0, dt) = uniform_axis(&t, &path.display().to_string())?;
    let grid = TimeGrid::new(t0, dt, rows.len())?;
    ComplexEnvelope::new(grid, rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}

pub fn write_spectrum(path: &Path, spec: &SpectralEnvelope) -> Result<()> {
    let grid = spec.grid();
    write_dense(
        path,
        &SPECTRUM_HEADER,
        spec.samples()
            .iter()
            .enumerate()
            .map(|(m, s)| vec![grid.detuning(m), s.re, s.im]),
    )
}

/// On/off intensity spectra and the absorption `1 − on/off` (empty where masked).
pub fn write_spectra(
    path: &Path,
    grid: FrequencyGrid,
    off: &[f64],
    on: &[f64],
    absorption: &[Option<f64>],
) -> Result<()> {
    if off.len() != grid.len() || on.len() != grid.len() || absorption.len() != grid.len() {
        return Err(Error::GridMismatch("spectra columns differ in length from the grid".into()));
    }
    let rows: Vec<Vec<Option<f64>>> = (0..grid.len())
        .map(|m| vec![Some(grid.detuning(m)), Some(off[m]), Some(on[m]), absorption[m]])
        .collect();
    write_table(path, &SPECTRA_HEADER, &rows)
}

pub fn write_susceptibility(path: &Path, chi: &Susceptibility) -> Result<()> {
    let grid = chi.grid();
    write_dense(
        path,
        &SUSCEPTIBILITY_HEADER,
        chi.values()
            .iter()
            .enumerate()
            .map(|(m, v)| vec![grid.detuning(m), v.re, v.im]),
    )
}

/// Reads a susceptibility written on an ascending grid with zero detuning at
/// row `n/2`.
pub fn read_susceptibility(path: &Path) -> Result<Susceptibility> {
    let rows = read_expecting(path, &SUSCEPTIBILITY_HEADER)?;
    let w: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let (w0, dw) = uniform_axis(&w, &path.display().to_string())?;
    let grid = FrequencyGrid::new(dw, rows.len())?;
    if (grid.min() - w0).abs() > 1e-6 * dw {
        return Err(Error::InvalidData(format!(
            "{}: zero detuning must sit at row n/2 (first detuning {w0}, expected {})",
            path.display(),
            grid.min()
        )));
    }
    Susceptibility::new(grid, rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
}

/// Absorption records, with the kind detected from the header.
pub fn read_absorption(path: &Path) -> Result<(AbsorptionKind, Vec<AbsorptionRecord>)> {
    let (header, _) = read_table(path)?;
    let kind = if header == ABSORPTION_HEADER {
        AbsorptionKind::Absorption
    } else if header == DEPTH_HEADER {
        AbsorptionKind::OpticalDepth
    } else {
        return Err(Error::InvalidData(format!(
            "{}: header must be '{}' or '{}', found '{}'",
            path.display(),
            ABSORPTION_HEADER.join(","),
            DEPTH_HEADER.join(","),
            header.join(",")
        )));
    };
    let expected: &[&str] = match kind {
        AbsorptionKind::Absorption => &ABSORPTION_HEADER,
        AbsorptionKind::OpticalDepth => &DEPTH_HEADER,
    };
    let rows = read_expecting(path, expected)?;
    let records = rows
        .into_iter()
        .map(|r| AbsorptionRecord {
            wavelength_nm: r[0],
            value: r[1],
        })
        .collect();
    Ok((kind, records))
}

pub fn write_absorption(path: &Path, kind: AbsorptionKind, records: &[AbsorptionRecord]) -> Result<()> {
    let header = match kind {
        AbsorptionKind::Absorption => ABSORPTION_HEADER,
        AbsorptionKind::OpticalDepth => DEPTH_HEADER,
    };
    write_dense(path, &header, records.iter().map(|r| vec![r.wavelength_nm, r.value]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticRow {
    pub d0: f64,
    pub delay_ps: f64,
    pub loss_db: f64,
    pub dbp: f64,
}

pub fn write_analytic(path: &Path, rows: &[AnalyticRow]) -> Result<()> {
    write_dense(
        path,
        &ANALYTIC_HEADER,
        rows.iter().map(|r| vec![r.d0, r.delay_ps, r.loss_db, r.dbp]),
    )
}

pub fn read_analytic(path: &Path) -> Result<Vec<AnalyticRow>> {
    Ok(read_expecting(path, &ANALYTIC_HEADER)?
        .into_iter()
        .map(|r| AnalyticRow {
            d0: r[0],
            delay_ps: r[1],
            loss_db: r[2],
            dbp: r[3],
        })
        .collect())
}

pub fn write_scan(path: &Path, points: &[ScanPoint]) -> Result<()> {
    write_dense(
        path,
        &SCAN_HEADER,
        points.iter().map(|p| vec![p.control_intensity, p.delay_ps, p.loss_db]),
    )
}

pub fn read_scan(path: &Path) -> Result<Vec<ScanPoint>> {
    Ok(read_expecting(path, &SCAN_HEADER)?
        .into_iter()
        .map(|r| ScanPoint {
            control_intensity: r[0],
            delay_ps: r[1],
            loss_db: r[2],
        })
        .collect())
}

pub fn write_correlation(path: &Path, curve: &CorrelationCurve) -> Result<()> {
    write_dense(
        path,
        &CORRELATION_HEADER,
        curve.delays.iter().zip(&curve.intensity).map(|(d, i)| vec![*d, *i]),
    )
}

pub fn read_correlation(path: &Path) -> Result<CorrelationCurve> {
    let rows = read_expecting(path, &CORRELATION_HEADER)?;
    CorrelationCurve::new(rows.iter().map(|r| r[0]).collect(), rows.iter().map(|r| r[1]).collect())
}
