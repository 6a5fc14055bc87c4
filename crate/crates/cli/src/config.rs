//! Run configuration: JSON file, command-line flags on top, then
//! validation into a harness [`RunSpec`].

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use isotune_core::harness::{LossStream, RunSpec, StreamData, StreamKind};
use isotune_core::learners::{Algorithm, LearnerSpec, MPivot};
use isotune_core::Domain;

use crate::CliError;

pub const DEFAULT_N: usize = 10;
pub const DEFAULT_T: usize = 1000;

/// A stream given either by name (default parameters) or as a full object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StreamArg {
    Full(StreamKind),
    Name(String),
}

impl StreamArg {
    fn resolve(&self) -> Result<StreamKind, CliError> {
        match self {
            StreamArg::Full(k) => Ok(k.clone()),
            StreamArg::Name(s) => StreamKind::from_str(s).map_err(CliError::config),
        }
    }
}

/// Named domains of the requested dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    Simplex,
    /// `[-1, 1]^N`
    Box,
    /// Unit Euclidean ball around the origin.
    Ball,
    Space,
}

impl DomainArg {
    fn build(self, n: usize) -> Domain {
        match self {
            DomainArg::Simplex => Domain::Simplex { dim: n },
            DomainArg::Box => Domain::unit_box(n),
            DomainArg::Ball => Domain::Ball { center: vec![0.0; n], radius: 1.0 },
            DomainArg::Space => Domain::AllOfSpace { dim: n },
        }
    }
}

/// Every field is optional so a file and the flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algo: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stream: Option<StreamArg>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_pivot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

/// Flags shared by `run` and `sweep`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// Learner tag, e.g. isohedge, isogd, isomlprod
    #[arg(long)]
    pub algo: Option<String>,
    /// Stream name: iid_uniform, iid_gaussian, scale_jump, tiny_scale, plateau_exp, adversarial, replay:<path>
    #[arg(long)]
    pub stream: Option<String>,
    /// Number of coordinates / experts [default: 10, 1 for plateau_exp]
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Number of rounds [default: 1000]
    #[arg(long = "T")]
    pub t: Option<usize>,
    /// Isotuning constant [default: ln N on the simplex, D^2 for aogd, 1 otherwise]
    #[arg(long)]
    pub q: Option<f64>,
    /// Null-update factor [default: 1]
    #[arg(long)]
    pub c: Option<f64>,
    /// Stream seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// isoHedge translation pivot: barloss or zero
    #[arg(long = "m-pivot")]
    pub m_pivot: Option<String>,
    /// Decision domain [default: per learner]
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    /// Starting point, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x1: Option<Vec<f64>>,
    /// AOGD strong-convexity parameter per round
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl RunFlags {
    /// The config file (if any) with the flags laid over it.
    pub fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => read_config(p)?,
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => { $( if self.$f.is_some() { cfg.$f = self.$f.clone(); } )* };
        }
        over!(algo, n, t, q, c, seed, m_pivot, domain, x1, alpha);
        if let Some(s) = &self.stream {
            cfg.stream = Some(StreamArg::Name(s.clone()));
        }
        Ok(cfg)
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Validated harness spec with all defaults filled in.
    pub fn resolve(&self) -> Result<RunSpec, CliError> {
        let algo_tag = self.algo.as_deref().ok_or_else(|| {
            let tags: Vec<&str> = Algorithm::ALL.iter().map(|a| a.tag()).collect();
            CliError::Config(format!("--algo is required; valid tags: {}", tags.join(", ")))
        })?;
        let algorithm = Algorithm::from_str(algo_tag).map_err(CliError::Config)?;
        let kind = match &self.stream {
            Some(s) => s.resolve()?,
            None => StreamKind::IidUniform { lo: 0.0, hi: 1.0 },
        };
        let replay = matches!(kind, StreamKind::Replay { .. });
        let plateau = matches!(kind, StreamKind::PlateauExp { .. });
        let n = match (self.n, plateau) {
            (Some(n), true) if n != 1 => return Err(CliError::Config("plateau_exp is one-dimensional; use --N 1".into())),
            (Some(n), _) => n,
            (None, true) => 1,
            (None, false) if replay => 0,
            (None, false) => DEFAULT_N,
        };
        let t = self.t.unwrap_or(if replay { 0 } else { DEFAULT_T });
        let mut stream = LossStream::new(kind, n, t, self.seed.unwrap_or(0));
        if replay {
            // Fill in the file's shape before sizing the learner.
            if let StreamData::Vectors(v) = stream.generate().map_err(|e| CliError::Config(e.to_string()))? {
                if stream.n == 0 {
                    stream.n = v.first().map_or(0, Vec::len);
                }
                stream.t = v.len();
            }
        }
        if stream.n == 0 || (stream.t == 0) {
            return Err(CliError::Config("N and T must be positive".into()));
        }
        if let Some(q) = self.q {
            if !(q > 0.0 && q.is_finite()) {
                return Err(CliError::Config(format!("q must be positive, got {q}")));
            }
        }
        let c = self.c.unwrap_or(1.0);
        if !(c > 0.0 && c.is_finite()) {
            return Err(CliError::Config(format!("c must be positive, got {c}")));
        }
        let mut learner = LearnerSpec::new(algorithm, stream.n);
        learner.q = self.q;
        learner.c = c;
        learner.domain = self.domain.map(|d| d.build(stream.n));
        learner.x1 = self.x1.clone();
        if let Some(p) = &self.m_pivot {
            learner.m_pivot = MPivot::from_str(p).map_err(CliError::Config)?;
        }
        if let Some(a) = self.alpha {
            learner.alpha = a;
        }
        // Surface learner-level configuration errors before any work.
        learner.build().map_err(|e| CliError::Config(e.to_string()))?;
        stream.kind.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(RunSpec { learner, stream })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(algo: &str) -> RunConfig {
        RunConfig { algo: Some(algo.into()), ..RunConfig::default() }
    }

    #[test]
    fn defaults_fill_in() {
        let spec = cfg("isohedge").resolve().unwrap();
        assert_eq!((spec.stream.n, spec.stream.t, spec.stream.seed), (DEFAULT_N, DEFAULT_T, 0));
        assert_eq!(spec.learner.q(), (DEFAULT_N as f64).ln());
    }

    #[test]
    fn plateau_is_one_dimensional() {
        let mut c = cfg("isogd");
        c.stream = Some(StreamArg::Name("plateau_exp".into()));
        assert_eq!(c.resolve().unwrap().stream.n, 1);
        c.n = Some(3);
        assert!(c.resolve().is_err());
    }

    #[test]
    fn unknown_tag_lists_the_valid_ones() {
        let err = cfg("hedgehog").resolve().unwrap_err().to_string();
        assert!(err.contains("isohedge") && err.contains("isosoftbayes"), "{err}");
    }

    #[test]
    fn file_round_trips() {
        let mut c = cfg("isoprod");
        c.stream = Some(StreamArg::Full(StreamKind::IidGaussian { sigma: 2.0 }));
        c.q = Some(0.5);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let named: RunConfig = serde_json::from_str(r#"{"algo": "isoprod", "stream": "adversarial", "N": 3}"#).unwrap();
        assert_eq!(named.resolve().unwrap().stream.kind, StreamKind::Adversarial);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"algo": "isoprod", "T": 50, "seed": 4}"#).unwrap();
        let flags = RunFlags { config: Some(path), t: Some(70), ..RunFlags::default() };
        let c = flags.load().unwrap();
        assert_eq!((c.t, c.seed), (Some(70), Some(4)));
    }
}
