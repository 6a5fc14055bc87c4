//! `isotune sweep`: Cartesian grid over run parameters.

use std::fs::{self, File};
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, RunFlags, StreamArg};
use crate::run::{execute, summary, write_csv};
use crate::CliError;

/// One grid axis: a key and its values as written.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

const KEYS: [&str; 7] = ["algo", "stream", "N", "T", "q", "c", "seed"];

pub fn parse_axis(s: &str) -> Result<Axis, CliError> {
    let (key, rest) = s.split_once('=').ok_or_else(|| CliError::Config(format!("grid axis `{s}` is not key=values")))?;
    let key = key.trim();
    if !KEYS.contains(&key) {
        return Err(CliError::Config(format!("unknown grid key `{key}`; valid: {}", KEYS.join(", "))));
    }
    let mut values = Vec::new();
    for v in rest.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        match v.split_once("..") {
            Some((lo, hi)) if matches!(key, "N" | "T" | "seed") => {
                let parse = |x: &str| x.parse::<u64>().map_err(|e| CliError::Config(format!("range `{v}`: {e}")));
                let (lo, hi) = (parse(lo)?, parse(hi.trim_start_matches('='))?);
                values.extend((lo..=hi).map(|k| k.to_string()));
            }
            _ => values.push(v.to_string()),
        }
    }
    Ok(Axis { key: key.to_string(), values })
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::Config(format!("grid {key}={value}: {e}"));
    match key {
        "algo" => cfg.algo = Some(value.to_string()),
        "stream" => cfg.stream = Some(StreamArg::Name(value.to_string())),
        "N" => cfg.n = Some(value.parse().map_err(|e| bad(&e))?),
        "T" => cfg.t = Some(value.parse().map_err(|e| bad(&e))?),
        "q" => cfg.q = Some(value.parse().map_err(|e| bad(&e))?),
        "c" => cfg.c = Some(value.parse().map_err(|e| bad(&e))?),
        "seed" => cfg.seed = Some(value.parse().map_err(|e| bad(&e))?),
        _ => unreachable!("keys are checked when parsing"),
    }
    Ok(())
}

/// All grid points, first axis varying slowest.
pub fn expand(base: &RunConfig, axes: &[Axis]) -> Result<Vec<RunConfig>, CliError> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Err(CliError::Config("empty parameter grid".into()));
    }
    let mut points = vec![base.clone()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.values.len());
        for p in &points {
            for v in &axis.values {
                let mut c = p.clone();
                apply(&mut c, &axis.key, v)?;
                next.push(c);
            }
        }
        points = next;
    }
    Ok(points)
}

/// `<algo>_<stream>_<seed>_<hash>.csv`, the hash covering the whole
/// resolved spec.
pub fn file_name(spec: &isotune_core::harness::RunSpec) -> Result<String, CliError> {
    let json = serde_json::to_string(spec).map_err(CliError::config)?;
    let digest = Sha256::digest(json.as_bytes());
    Ok(format!(
        "{}_{}_{}_{}.csv",
        spec.learner.algorithm.tag(),
        spec.stream.kind.name(),
        spec.stream.seed,
        hex::encode(&digest[..6])
    ))
}

pub fn cmd_sweep(flags: &RunFlags, grid: &[String], out_dir: &Path, threads: Option<usize>) -> Result<(), CliError> {
    let axes = grid.iter().map(|g| parse_axis(g)).collect::<Result<Vec<_>, _>>()?;
    let base = flags.load()?;
    let specs = expand(&base, &axes)?.iter().map(RunConfig::resolve).collect::<Result<Vec<_>, _>>()?;
    fs::create_dir_all(out_dir)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.filter(|n| *n > 0) {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(CliError::config)?;
    let results: Vec<Result<(String, String), CliError>> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let name = file_name(spec)?;
                let rec = execute(spec)?;
                write_csv(File::create(out_dir.join(&name))?, spec, &rec)?;
                Ok((name, summary(&rec)))
            })
            .collect()
    });
    let mut index = String::from("file, algo, T, N, q, regret, bound, ratio\n");
    for r in results {
        let (name, line) = r?;
        println!("{name}: {line}");
        index.push_str(&format!("{name}, {line}\n"));
    }
    fs::write(out_dir.join("index.csv"), index)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        let a = parse_axis("seed=1..10").unwrap();
        assert_eq!(a.values.len(), 10);
        assert_eq!(parse_axis("q=0.25,1,4").unwrap().values, ["0.25", "1", "4"]);
        assert!(parse_axis("zeta=1").is_err());
    }

    #[test]
    fn empty_grids_are_rejected() {
        let base = RunConfig { algo: Some("isohedge".into()), ..RunConfig::default() };
        assert!(expand(&base, &[]).is_err());
        assert!(expand(&base, &[parse_axis("q=").unwrap()]).is_err());
    }

    #[test]
    fn names_separate_grid_points() {
        let base = RunConfig { algo: Some("isohedge".into()), ..RunConfig::default() };
        let pts = expand(&base, &[parse_axis("q=0.25,1").unwrap(), parse_axis("seed=1,2").unwrap()]).unwrap();
        assert_eq!(pts.len(), 4);
        let names: std::collections::BTreeSet<String> =
            pts.iter().map(|c| file_name(&c.resolve().unwrap()).unwrap()).collect();
        assert_eq!(names.len(), 4);
        assert!(names.iter().all(|n| n.starts_with("isohedge_iid_uniform_")));
    }
}
