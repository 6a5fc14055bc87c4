//! Deterministic loss streams.
//!
//! Every stream except the plateau is oblivious: [`LossStream::generate`]
//! materializes all `T` vectors up front from [`StreamRng`]. The plateau
//! loss is a fixed convex function of the played point, so the harness
//! queries its gradient at each `x_t`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rng::StreamRng;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StreamKind {
    IidUniform {
        lo: f64,
        hi: f64,
    },
    IidGaussian {
        sigma: f64,
    },
    /// Uniform `[0, 1)` losses multiplied by `scales[k]` on the k-th of
    /// `scales.len()` equal segments.
    ScaleJump {
        scales: Vec<f64>,
    },
    /// Uniform `[0, scale)`; the draws are those of `iid_uniform(0, 1)`.
    TinyScale {
        scale: f64,
    },
    /// `l(x) = x* - x` below `x*`, `e^(x - x*) - 1` above (scalar).
    PlateauExp {
        x_star: f64,
    },
    /// Segments of random length and scale with a leading coordinate that
    /// switches, plus rare spikes.
    Adversarial,
    /// CSV file with a header and one row per round.
    Replay {
        path: PathBuf,
    },
}

impl StreamKind {
    pub fn name(&self) -> &'static str {
        match self {
            StreamKind::IidUniform { .. } => "iid_uniform",
            StreamKind::IidGaussian { .. } => "iid_gaussian",
            StreamKind::ScaleJump { .. } => "scale_jump",
            StreamKind::TinyScale { .. } => "tiny_scale",
            StreamKind::PlateauExp { .. } => "plateau_exp",
            StreamKind::Adversarial => "adversarial_worstcase",
            StreamKind::Replay { .. } => "replay",
        }
    }

    pub fn default_scale_jump() -> Self {
        StreamKind::ScaleJump { scales: vec![1.0, 1e3, 1e-3, 1e6, 1.0] }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Stream(m));
        match self {
            StreamKind::IidUniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo <= hi) => {
                bad(format!("iid_uniform needs finite lo <= hi, got ({lo}, {hi})"))
            }
            StreamKind::IidGaussian { sigma } if !(*sigma >= 0.0 && sigma.is_finite()) => {
                bad(format!("iid_gaussian needs sigma >= 0, got {sigma}"))
            }
            StreamKind::ScaleJump { scales } if scales.is_empty() || scales.iter().any(|s| !(*s > 0.0 && s.is_finite())) => {
                bad("scale_jump needs a non-empty list of positive scales".into())
            }
            StreamKind::TinyScale { scale } if !(*scale > 0.0 && scale.is_finite()) => {
                bad(format!("tiny_scale needs a positive scale, got {scale}"))
            }
            StreamKind::PlateauExp { x_star } if !x_star.is_finite() => bad("plateau_exp needs a finite x*".into()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StreamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a stream name with default parameters; `replay:<path>` names a file.
impl FromStr for StreamKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("replay:") {
            return Ok(StreamKind::Replay { path: path.into() });
        }
        Ok(match s {
            "iid_uniform" => StreamKind::IidUniform { lo: 0.0, hi: 1.0 },
            "iid_gaussian" => StreamKind::IidGaussian { sigma: 1.0 },
            "scale_jump" => StreamKind::default_scale_jump(),
            "tiny_scale" => StreamKind::TinyScale { scale: 1e-300 },
            "plateau_exp" => StreamKind::PlateauExp { x_star: 3.0 },
            "adversarial_worstcase" | "adversarial" => StreamKind::Adversarial,
            _ => {
                return Err(HarnessError::Stream(format!(
                    "unknown stream `{s}`; valid: iid_uniform, iid_gaussian, scale_jump, tiny_scale, \
                     plateau_exp, adversarial_worstcase, replay:<path>"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossStream {
    #[serde(flatten)]
    pub kind: StreamKind,
    pub n: usize,
    pub t: usize,
    pub seed: u64,
}

/// Generated rounds.
#[derive(Debug, Clone, PartialEq)]
pub enum StreamData {
    Vectors(Vec<Vec<f64>>),
    Plateau { x_star: f64, rounds: usize },
}

impl StreamData {
    pub fn rounds(&self) -> usize {
        match self {
            StreamData::Vectors(v) => v.len(),
            StreamData::Plateau { rounds, .. } => *rounds,
        }
    }
}

pub fn plateau_loss(x: f64, x_star: f64) -> f64 {
    if x < x_star {
        x_star - x
    } else {
        (x - x_star).exp_m1()
    }
}

pub fn plateau_grad(x: f64, x_star: f64) -> f64 {
    if x < x_star {
        -1.0
    } else {
        (x - x_star).exp()
    }
}

impl LossStream {
    pub fn new(kind: StreamKind, n: usize, t: usize, seed: u64) -> Self {
        Self { kind, n, t, seed }
    }

    pub fn generate(&self) -> Result<StreamData, HarnessError> {
        self.kind.validate()?;
        if let StreamKind::Replay { path } = &self.kind {
            let rows = read_replay(path)?;
            if self.n != 0 && rows[0].len() != self.n {
                return Err(HarnessError::Stream(format!(
                    "replay file has {} columns, expected N = {}",
                    rows[0].len(),
                    self.n
                )));
            }
            let t = if self.t == 0 { rows.len() } else { self.t.min(rows.len()) };
            return Ok(StreamData::Vectors(rows.into_iter().take(t).collect()));
        }
        if self.t == 0 || self.n == 0 {
            return Err(HarnessError::Stream("T and N must be at least 1".into()));
        }
        let (n, t) = (self.n, self.t);
        let uniform_rows = |scale: &dyn Fn(usize) -> f64, lo: f64, hi: f64| -> Vec<Vec<f64>> {
            let mut rng = StreamRng::new(self.seed);
            (0..t).map(|s| (0..n).map(|_| rng.uniform_in(lo, hi) * scale(s)).collect()).collect()
        };
        Ok(match &self.kind {
            StreamKind::IidUniform { lo, hi } => StreamData::Vectors(uniform_rows(&|_| 1.0, *lo, *hi)),
            StreamKind::TinyScale { scale } => StreamData::Vectors(uniform_rows(&|_| *scale, 0.0, 1.0)),
            StreamKind::ScaleJump { scales } => {
                let k = scales.len();
                let seg = t.div_ceil(k);
                StreamData::Vectors(uniform_rows(&|s| scales[(s / seg).min(k - 1)], 0.0, 1.0))
            }
            StreamKind::IidGaussian { sigma } => {
                let mut rng = StreamRng::new(self.seed);
                StreamData::Vectors((0..t).map(|_| (0..n).map(|_| sigma * rng.gaussian()).collect()).collect())
            }
            StreamKind::PlateauExp { x_star } => {
                if n != 1 {
                    return Err(HarnessError::Stream(format!("plateau_exp is scalar, got N = {n}")));
                }
                StreamData::Plateau { x_star: *x_star, rounds: t }
            }
            StreamKind::Adversarial => StreamData::Vectors(adversarial(&mut StreamRng::new(self.seed), n, t)),
            StreamKind::Replay { .. } => unreachable!(),
        })
    }
}

fn adversarial(rng: &mut StreamRng, n: usize, t: usize) -> Vec<Vec<f64>> {
    let max_len = (t as u64 / 20).max(2);
    let mut out = Vec::with_capacity(t);
    let mut leader = 0usize;
    while out.len() < t {
        let len = 1 + rng.below(max_len) as usize;
        let scale = 10f64.powf(rng.uniform_in(-3.0, 3.0));
        // The leader alternates between segments, with an occasional jump
        // to a random coordinate.
        leader = if rng.uniform() < 0.25 { rng.below(n as u64) as usize } else { (leader + 1) % n };
        for _ in 0..len.min(t - out.len()) {
            if rng.uniform() < 0.05 {
                leader = rng.below(n as u64) as usize;
            }
            let spike = if rng.uniform() < 1e-3 { 1e4 } else { 1.0 };
            let row = (0..n)
                .map(|i| {
                    let noise = rng.uniform_in(-0.25, 0.25);
                    let base = if i == leader { -0.75 } else { 0.75 };
                    (base + noise) * scale * spike
                })
                .collect();
            out.push(row);
        }
    }
    out
}

/// Reads a replay CSV: header row, then `N` numeric columns per round.
pub fn read_replay(path: &std::path::Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| HarnessError::Stream(format!("{}: {e}", path.display())))?;
    let width = reader.headers().map_err(|e| HarnessError::Stream(e.to_string()))?.len();
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| HarnessError::Stream(format!("{}: {e}", path.display())))?;
        if rec.len() != width {
            return Err(HarnessError::Stream(format!("row {} has {} fields, header has {width}", k + 1, rec.len())));
        }
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| HarnessError::Stream(format!("row {}: bad number `{f}`", k + 1))))
            .collect::<Result<Vec<f64>, _>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Stream(format!("row {}: non-finite value", k + 1)));
        }
        rows.push(row);
    }
    if rows.is_empty() || width == 0 {
        return Err(HarnessError::Stream(format!("{}: no rounds", path.display())));
    }
    Ok(rows)
}

/// Writes losses in the replay format with columns `l1..lN`.
pub fn write_replay(path: &std::path::Path, rows: &[Vec<f64>]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::Stream(e.to_string()))?;
    let n = rows.first().map_or(0, Vec::len);
    w.write_record((1..=n).map(|i| format!("l{i}"))).map_err(|e| HarnessError::Stream(e.to_string()))?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:e}"))).map_err(|e| HarnessError::Stream(e.to_string()))?;
    }
    w.flush().map_err(|e| HarnessError::Stream(e.to_string()))
}

/// Price relatives fed to Soft-Bayes from a loss vector:
/// `p_i = max_j l_j - l_i`, or all ones when the losses are equal. The map
/// commutes with rescaling and ignores translation.
pub fn prices_from_losses(loss: &[f64]) -> Vec<f64> {
    let max = loss.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = loss.iter().map(|l| max - l).collect();
    if p.iter().all(|v| *v == 0.0) {
        vec![1.0; loss.len()]
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vectors(s: &LossStream) -> Vec<Vec<f64>> {
        match s.generate().unwrap() {
            StreamData::Vectors(v) => v,
            _ => panic!(),
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = LossStream::new(StreamKind::IidUniform { lo: 0.0, hi: 1.0 }, 3, 50, 11);
        assert_eq!(vectors(&a), vectors(&a));
        let b = LossStream { seed: 12, ..a.clone() };
        assert_ne!(vectors(&a), vectors(&b));
        let adv = LossStream::new(StreamKind::Adversarial, 4, 500, 1);
        assert_eq!(vectors(&adv), vectors(&adv));
    }

    #[test]
    fn tiny_scale_is_a_rescaled_uniform() {
        let base = vectors(&LossStream::new(StreamKind::IidUniform { lo: 0.0, hi: 1.0 }, 5, 200, 3));
        let tiny = vectors(&LossStream::new(StreamKind::TinyScale { scale: 1e-300 }, 5, 200, 3));
        for (b, t) in base.iter().flatten().zip(tiny.iter().flatten()) {
            assert!(*t >= 0.0 && *t <= 1e-300);
            assert!(*t > 0.0 || *b == 0.0);
            assert!(((t / 1e-300) - b).abs() <= 1e-12 * b.max(1e-300));
        }
    }

    #[test]
    fn scale_jump_segments() {
        let v = vectors(&LossStream::new(StreamKind::default_scale_jump(), 1, 10, 0));
        assert!(v[2][0] < 1e3 && v[7][0] < 1e6 && v[5][0] < 1e-3);
    }

    #[test]
    fn plateau_gradient() {
        assert_eq!(plateau_grad(1.0, 3.0), -1.0);
        assert!((plateau_grad(4.0, 3.0) - std::f64::consts::E).abs() < 1e-15);
        assert_eq!(plateau_loss(3.0, 3.0), 0.0);
        assert!(LossStream::new(StreamKind::PlateauExp { x_star: 3.0 }, 2, 5, 0).generate().is_err());
    }

    #[test]
    fn replay_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        let rows = vec![vec![0.5, -1e-300], vec![2.0, 3.25]];
        write_replay(&path, &rows).unwrap();
        let s = LossStream::new(StreamKind::Replay { path }, 2, 0, 0);
        assert_eq!(vectors(&s), rows);
    }

    #[test]
    fn names_parse() {
        for name in ["iid_uniform", "iid_gaussian", "scale_jump", "tiny_scale", "plateau_exp", "adversarial_worstcase"] {
            assert_eq!(name.parse::<StreamKind>().unwrap().name(), name);
        }
        assert!("nope".parse::<StreamKind>().is_err());
    }

    #[test]
    fn prices_are_invariant() {
        let l = [0.3, 1.0, -0.2];
        let p = prices_from_losses(&l);
        let shifted: Vec<f64> = l.iter().map(|v| v + 7.0).collect();
        assert_eq!(prices_from_losses(&shifted).iter().map(|v| (v * 1e9).round()).collect::<Vec<_>>(),
                   p.iter().map(|v| (v * 1e9).round()).collect::<Vec<_>>());
        assert_eq!(prices_from_losses(&[2.0, 2.0]), vec![1.0, 1.0]);
    }
}
