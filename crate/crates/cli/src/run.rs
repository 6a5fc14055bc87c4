//! `isotune run`: per-round CSV and a one-line summary.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use isotune_core::harness::{evaluate_run, ExperimentRecord, RunOptions, RunSpec, StreamKind};

use crate::config::RunFlags;
use crate::CliError;

pub const COLUMNS: [&str; 8] = ["t", "loss", "delta", "Delta", "eta", "null", "cum_regret", "bound"];

pub fn execute(spec: &RunSpec) -> Result<ExperimentRecord, CliError> {
    let opts = RunOptions { per_round: true, ..RunOptions::default() };
    evaluate_run(spec, opts).map_err(CliError::from_harness)
}

/// Writes the config as `#` comments, then the per-round rows.
pub fn write_csv(w: impl Write, spec: &RunSpec, rec: &ExperimentRecord) -> Result<(), CliError> {
    let mut w = io::BufWriter::new(w);
    let echo = serde_json::to_string_pretty(spec).map_err(CliError::config)?;
    for line in echo.lines() {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "# q = {}", rec.q)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(COLUMNS).map_err(csv_err)?;
    for r in &rec.rows {
        csv.write_record([
            r.t.to_string(),
            r.loss.to_string(),
            r.delta.to_string(),
            r.delta_total.to_string(),
            r.eta.to_string(),
            u8::from(r.was_null).to_string(),
            r.cum_regret.to_string(),
            r.bound.to_string(),
        ])
        .map_err(csv_err)?;
    }
    csv.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(io::Error::other(e))
}

/// `algo, T, N, q, regret, bound, ratio`
pub fn summary(rec: &ExperimentRecord) -> String {
    format!(
        "{}, {}, {}, {}, {:e}, {:e}, {:.6}",
        rec.algorithm.tag(),
        rec.rounds,
        rec.spec.stream.n,
        rec.q,
        rec.regret(),
        rec.bound(),
        rec.ratio()
    )
}

pub fn cmd_run(flags: &RunFlags, out: Option<PathBuf>) -> Result<(), CliError> {
    let mut cfg = flags.load()?;
    if out.is_some() {
        cfg.out = out;
    }
    let spec = cfg.resolve()?;
    let rec = execute(&spec)?;
    let mut lines = vec![summary(&rec)];
    if let StreamKind::PlateauExp { x_star } = spec.stream.kind {
        let x_t = rec.rows.last().map_or(rec.final_prediction[0], |r| r.x_first);
        lines.push(format!("|x_T - x*| = {:.6}", (x_t - x_star).abs()));
    }
    for v in &rec.violations {
        lines.push(format!("warning: {} at round {}: {}", v.check, v.round, v.detail));
    }
    match &cfg.out {
        Some(path) => {
            write_csv(File::create(path)?, &spec, &rec)?;
            lines.iter().for_each(|l| println!("{l}"));
        }
        None => {
            write_csv(io::stdout().lock(), &spec, &rec)?;
            lines.iter().for_each(|l| eprintln!("{l}"));
        }
    }
    Ok(())
}
