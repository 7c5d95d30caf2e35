//! Delimited time-series files: first column `time` in seconds on a uniform
//! grid, one further column per channel.

use std::io::{Read, Write};
use std::path::Path;

use thermocircuit::{Channel, Series, Trajectory};

use crate::error::{CliError, Location};

/// Sampling interval assumed for a file holding a single row, s.
pub const SINGLE_ROW_STEP: f64 = 600.0;

fn fail(path: &Path, line: u64, column: usize, message: impl Into<String>) -> CliError {
    let location = Location { path: path.to_path_buf(), line: line as usize, column };
    CliError::input("timeseries", Some(location), message)
}

/// Character column of field `k` in an unquoted record.
fn field_column(record: &csv::StringRecord, k: usize) -> usize {
    1 + record.iter().take(k).map(|f| f.chars().count() + 1).sum::<usize>()
}

pub fn ingest_timeseries(path: &Path) -> Result<Series, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    read_timeseries(path, file)
}

/// As [`ingest_timeseries`], reading from `reader`; `path` only labels errors.
pub fn read_timeseries<R: Read>(path: &Path, reader: R) -> Result<Series, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::None).from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    if names.first().map(String::as_str) != Some("time") {
        return Err(fail(path, 1, 1, "first column must be `time`"));
    }
    for (k, n) in names.iter().enumerate().skip(1) {
        if n.is_empty() {
            return Err(fail(path, 1, field_column(&header, k), format!("column {} has no name", k + 1)));
        }
        if names[1..k].contains(n) {
            return Err(fail(path, 1, field_column(&header, k), format!("duplicate channel name `{n}`")));
        }
    }

    let mut times = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len() - 1];
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        for (k, cell) in record.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                fail(path, line, field_column(&record, k), format!("`{}` in column `{}` is not a number", cell.trim(), names[k]))
            })?;
            if !v.is_finite() {
                return Err(fail(path, line, field_column(&record, k), format!("non-finite value in column `{}`", names[k])));
            }
            if k == 0 {
                times.push(v);
            } else {
                columns[k - 1].push(v);
            }
        }
        lines.push(line);
    }
    if times.is_empty() {
        return Err(fail(path, 2, 1, "no samples"));
    }
    let start = times[0];
    let dt = if times.len() == 1 { SINGLE_ROW_STEP } else { times[1] - times[0] };
    if !(dt > 0.0) {
        return Err(fail(path, lines[1], 1, "time must increase"));
    }
    for (k, &t) in times.iter().enumerate() {
        let expected = start + k as f64 * dt;
        if (t - expected).abs() > 1e-9 * expected.abs().max(dt) {
            return Err(fail(path, lines[k], 1, format!("non-uniform time step: expected t = {expected}, found {t}")));
        }
    }
    let channels = names[1..].iter().zip(columns).map(|(n, v)| Channel::new(n.clone(), v)).collect();
    Ok(Series::new(start, dt, channels)?)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("row has {len} fields, header has {expected_len}")
        }
        _ => e.to_string(),
    };
    fail(path, line, 1, message)
}

/// Writes `time` then one column per trajectory channel. Values use the
/// shortest representation that reads back exactly, so output is
/// reproducible byte for byte.
pub fn write_trajectory<W: Write>(writer: W, traj: &Trajectory<f64>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(std::iter::once("time").chain(traj.labels.iter().map(String::as_str)))?;
    for (k, t) in traj.times.iter().enumerate() {
        let row = std::iter::once(t.to_string()).chain(traj.values.iter().map(|c| c[k].to_string()));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
