use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::scenario::{LogMeta, SimOutcome, TrajectoryLog};
use crate::barrier::Membership;
use crate::error::Result;
use crate::scalar::Scalar;

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn fmt_float<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.to_f64_lossy())
}

fn fmt_opt<T: Scalar>(v: Option<T>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

/// Column names of the trajectory CSV for a state of dimension `n` and input
/// of dimension `m`.
pub fn log_header(n: usize, m: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend((0..n).map(|i| format!("x{i}")));
    h.extend((0..m).map(|i| format!("u{i}")));
    h.extend((0..m).map(|i| format!("w_u{i}")));
    h.extend((0..n).map(|i| format!("w_x{i}")));
    for c in ["h", "h_dot", "h_dot_w", "H1", "H0r", "H0l", "Hv", "W", "margin", "membership"] {
        h.push(c.to_string());
    }
    h
}

fn membership_name<T>(m: &Membership<T>) -> &'static str {
    match m {
        Membership::Interior => "interior",
        Membership::BoundaryLayer(_) => "boundary_layer",
        Membership::Outside => "outside",
    }
}

pub fn write_log_csv<T: Scalar, W: Write>(log: &TrajectoryLog<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let (n, m) = log.records.first().map(|r| (r.x.len(), r.u.len())).unwrap_or((0, 0));
    w.write_record(log_header(n, m))?;
    for r in &log.records {
        let mut row: Vec<String> = vec![fmt_float(r.t)];
        row.extend(r.x.iter().chain(&r.u).chain(&r.w_u).chain(&r.w_x).map(|&v| fmt_float(v)));
        row.extend([r.h, r.h_dot, r.h_dot_w, r.h1].map(fmt_float));
        row.extend([r.h0_right, r.h0_left, r.h_v].map(fmt_opt));
        row.push(fmt_float(r.w));
        row.push(fmt_float(r.margin));
        row.push(membership_name(&r.membership).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_log_csv_file<T: Scalar>(log: &TrajectoryLog<T>, path: &Path) -> Result<()> {
    write_log_csv(log, BufWriter::new(File::create(path)?))
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize, C: Serialize> {
    meta: &'a LogMeta,
    outcome: &'a SimOutcome<T>,
    success: bool,
    config: &'a C,
}

/// JSON summary of one run: metadata, outcome and the resolved config.
pub fn write_summary_json<T: Scalar + Serialize, C: Serialize>(
    path: &Path,
    meta: &LogMeta,
    outcome: &SimOutcome<T>,
    success: bool,
    config: &C,
) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(file, &Summary { meta, outcome, success, config })?;
    Ok(())
}

/// Writes rows of floats under a header.
pub fn write_table<T: Scalar>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<T>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_float))?;
    }
    w.flush()?;
    Ok(())
}
