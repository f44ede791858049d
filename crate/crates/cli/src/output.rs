//! Row schemas and writers for every file the CLI emits.
//!
//! CSVs have a single header row with the field order of the structs below.
//! `--format json` writes the same rows as a JSON array of objects.

use crate::error::CliError;
use crate::spec::Format;
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// One agent at one dumped step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentRow {
    pub t: u64,
    pub agent_id: u64,
    pub state: String,
    pub x: f64,
    pub y: f64,
}

/// Ensemble statistics; `sample_std` uses the n - 1 denominator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryCsvRow {
    pub t: u64,
    pub state: String,
    pub mean: f64,
    pub sample_std: f64,
    pub replicates: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrrRow {
    pub t: u64,
    pub state: String,
    pub grr_estimate: f64,
}

/// `rel_err = abs_err / max(sim_mean, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub t: u64,
    pub state: String,
    pub sim_mean: f64,
    pub sim_std: f64,
    pub grr_estimate: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl CompareRow {
    pub fn new(t: u64, state: String, sim_mean: f64, sim_std: f64, grr_estimate: f64) -> Self {
        let abs_err = (grr_estimate - sim_mean).abs();
        CompareRow {
            t,
            state,
            sim_mean,
            sim_std,
            grr_estimate,
            abs_err,
            rel_err: abs_err / sim_mean.max(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub t: u64,
    pub state: String,
    pub sim_mean: f64,
    pub sim_std: f64,
    pub grr_estimate: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl SweepRow {
    pub fn new(sweep_value: f64, row: CompareRow) -> Self {
        SweepRow {
            sweep_value,
            t: row.t,
            state: row.state,
            sim_mean: row.sim_mean,
            sim_std: row.sim_std,
            grr_estimate: row.grr_estimate,
            abs_err: row.abs_err,
            rel_err: row.rel_err,
        }
    }
}

/// Serializes `rows` into `sink`.
pub fn write_to<T: Serialize, W: Write>(rows: &[T], format: Format, mut sink: W) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for r in rows {
                w.serialize(r).map_err(io::Error::other)?;
            }
            w.flush()
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, rows).map_err(io::Error::other)?;
            writeln!(sink)?;
            sink.flush()
        }
    }
}

/// Writes `rows` to `path`, or to stdout when no path is given.
pub fn write_rows<T: Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            write_to(rows, format, BufWriter::new(file)).map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            write_to(rows, format, stdout.lock()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

/// Renders rows to a string, mainly for tests and comparisons.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> String {
    let mut buf = Vec::new();
    write_to(rows, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("utf-8 output")
}
