//! Verification suites shared by the CLI and the acceptance tests.
//!
//! Each suite returns a [`SuiteReport`] of named checks; a failed check
//! carries the seed that reproduces it when there is one.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::run::{evaluate_run, RunOptions, RunSpec};
use super::stream::{prices_from_losses, LossStream, StreamData, StreamKind};
use super::{HarnessError, StreamRng};
use crate::geometry::lemmas::{scalar_lemma_check, Lemma};
use crate::geometry::Domain;
use crate::iso::oracle::{hindsight_bound, sequential_hindsight_value};
use crate::iso::{isotuning_sequence, sqrt_bound, MonotoneFn};
use crate::learners::{Algorithm, Learner, LearnerSpec, MPivot};
use crate::numeric::rel_close;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seed: Option<u64>,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into(), seed: None }
    }

    fn seeded(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn ok(&self) -> bool {
        self.failed() == 0
    }
}

// ---------------------------------------------------------------- lemmas

pub const LEMMA_GRID: usize = 10_000;

/// Evaluates every scalar lemma on an evenly spaced grid of its domain.
pub fn verify_lemmas() -> SuiteReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    for lemma in Lemma::ALL {
        let (lo, hi) = lemma.grid_range();
        let mut bad = Vec::new();
        for k in 0..LEMMA_GRID {
            let x = lo + (hi - lo) * k as f64 / (LEMMA_GRID - 1) as f64;
            if !matches!(scalar_lemma_check(lemma, x), Ok(true)) {
                bad.push(x);
            }
        }
        let detail = match bad.first() {
            None => format!("{LEMMA_GRID} points on [{lo}, {hi}]"),
            Some(x) => format!("{} violations, first at x = {x:e}", bad.len()),
        };
        checks.push(CheckResult::new(lemma.name(), bad.is_empty(), detail));
    }
    SuiteReport { suite: "lemmas".into(), checks, elapsed: start.elapsed() }
}

// ---------------------------------------------------------------- bounds

/// The learner configurations exercised by the certificate suite.
pub fn certificate_variants(n: usize) -> Vec<(String, LearnerSpec)> {
    let quad = |a: Algorithm| {
        LearnerSpec::new(a, n).with_domain(Domain::unit_box(n)).with_q(1.0)
    };
    let mut v = vec![
        ("isogd/space".to_string(), LearnerSpec::new(Algorithm::IsoGd, n)),
        ("isogd/box".to_string(), LearnerSpec::new(Algorithm::IsoGd, n).with_domain(Domain::unit_box(n))),
        ("aogd/box".to_string(), LearnerSpec::new(Algorithm::Aogd, n)),
        ("seqoptgd/box".to_string(), LearnerSpec::new(Algorithm::SeqOptGd, n)),
        ("isoftrl/entropic".to_string(), LearnerSpec::new(Algorithm::IsoFtrl, n)),
        ("isoftrl/quadratic".to_string(), quad(Algorithm::IsoFtrl)),
        ("isomd/entropic".to_string(), LearnerSpec::new(Algorithm::IsoMd, n)),
        ("isomd/quadratic".to_string(), quad(Algorithm::IsoMd)),
    ];
    for a in [Algorithm::IsoProd, Algorithm::IsoMlProd, Algorithm::IsoHedge, Algorithm::IsoSoftBayes] {
        v.push((a.tag().to_string(), LearnerSpec::new(a, n)));
    }
    v
}

#[derive(Debug, Clone)]
pub struct BoundsConfig {
    pub streams: Vec<StreamKind>,
    pub seeds: Vec<u64>,
    pub rounds: usize,
    pub dims: Vec<usize>,
    pub tol: f64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            streams: vec![
                StreamKind::IidUniform { lo: 0.0, hi: 1.0 },
                StreamKind::default_scale_jump(),
                StreamKind::Adversarial,
            ],
            seeds: (1..=20).collect(),
            rounds: 10_000,
            dims: vec![2, 10],
            tol: 1e-6,
        }
    }
}

/// Aggregates of a certificate-suite run.
#[derive(Debug, Clone, Default)]
pub struct BoundsSummary {
    pub runs: usize,
    pub unsound_runs: usize,
    pub max_ratio: f64,
    pub violations: BTreeMap<&'static str, usize>,
    pub errors: usize,
}

/// Runs every certificate variant on every stream, seed and dimension.
/// Soundness, ratio and violation counts of one run.
type RunStats = (bool, f64, BTreeMap<&'static str, usize>);

pub fn verify_bounds(cfg: &BoundsConfig) -> (SuiteReport, BoundsSummary) {
    let start = Instant::now();
    let mut jobs = Vec::new();
    for &n in &cfg.dims {
        for (label, spec) in certificate_variants(n) {
            for kind in &cfg.streams {
                for &seed in &cfg.seeds {
                    jobs.push((label.clone(), spec.clone(), LossStream::new(kind.clone(), n, cfg.rounds, seed)));
                }
            }
        }
    }
    let tol = cfg.tol;
    let results: Vec<(CheckResult, Option<RunStats>)> = jobs
        .into_par_iter()
        .map(|(label, learner, stream)| {
            let name = format!("{label}/{}/N={}", stream.kind.name(), stream.n);
            let seed = stream.seed;
            match evaluate_run(&RunSpec { learner, stream }, RunOptions::default()) {
                Err(e) => (CheckResult::new(name, false, e.to_string()).seeded(seed), None),
                Ok(rec) => {
                    let unsound = rec.unsound(tol);
                    let passed = unsound.is_empty() && rec.violation_counts.is_empty();
                    let detail = if let Some(c) = unsound.first() {
                        format!(
                            "regret {:e} vs {} exceeds bound {:e} (generic {:e})",
                            c.regret + c.gap,
                            c.label,
                            c.bound.unwrap_or(f64::NAN),
                            c.generic
                        )
                    } else if let Some(v) = rec.violations.first() {
                        format!("{} at round {}: {}", v.check, v.round, v.detail)
                    } else {
                        format!("ratio {:.4}", rec.ratio())
                    };
                    let stats = (unsound.is_empty(), rec.ratio(), rec.violation_counts.clone());
                    (CheckResult::new(name, passed, detail).seeded(seed), Some(stats))
                }
            }
        })
        .collect();
    let mut summary = BoundsSummary::default();
    let mut checks = Vec::with_capacity(results.len());
    for (check, stats) in results {
        summary.runs += 1;
        match stats {
            None => summary.errors += 1,
            Some((sound, ratio, counts)) => {
                if !sound {
                    summary.unsound_runs += 1;
                }
                summary.max_ratio = summary.max_ratio.max(ratio);
                for (k, v) in counts {
                    *summary.violations.entry(k).or_default() += v;
                }
            }
        }
        checks.push(check);
    }
    (SuiteReport { suite: "bounds".into(), checks, elapsed: start.elapsed() }, summary)
}

// ---------------------------------------------------------------- invariance

fn vectors(stream: &LossStream) -> Result<Vec<Vec<f64>>, HarnessError> {
    match stream.generate()? {
        StreamData::Vectors(v) => Ok(v),
        StreamData::Plateau { .. } => Err(HarnessError::Stream("invariance needs an oblivious stream".into())),
    }
}

/// Predictions `x_1..x_{T+1}` of `spec` on `rows`.
pub fn prediction_path(spec: &LearnerSpec, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut learner = spec.build().map_err(HarnessError::Config)?;
    let mut path = Vec::with_capacity(rows.len() + 1);
    path.push(learner.prediction().to_vec());
    for (k, r) in rows.iter().enumerate() {
        learner.step(r).map_err(|source| HarnessError::Learner { round: k + 1, source })?;
        let x = learner.prediction();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Numeric { round: k + 1, what: "prediction".into() });
        }
        path.push(x.to_vec());
    }
    Ok(path)
}

/// Largest per-coordinate relative difference between two paths.
pub fn path_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y) {
            if u != v {
                worst = worst.max((u - v).abs() / u.abs().max(v.abs()));
            }
        }
    }
    if a.len() != b.len() {
        f64::INFINITY
    } else {
        worst
    }
}

/// The learners whose predictions ignore the loss scale.
pub fn scale_free_learners(n: usize) -> Vec<LearnerSpec> {
    [Algorithm::IsoHedge, Algorithm::IsoProd, Algorithm::IsoMlProd, Algorithm::IsoFtrl, Algorithm::IsoSoftBayes]
        .into_iter()
        .map(|a| LearnerSpec::new(a, n))
        .collect()
}

/// The learners whose predictions ignore per-round translation.
pub fn translation_free_learners(n: usize) -> Vec<LearnerSpec> {
    vec![
        LearnerSpec::new(Algorithm::IsoHedge, n).with_pivot(MPivot::BarLoss),
        LearnerSpec::new(Algorithm::IsoProd, n),
        LearnerSpec::new(Algorithm::IsoMlProd, n),
    ]
}

#[derive(Debug, Clone)]
pub struct InvarianceConfig {
    pub scales: Vec<f64>,
    pub streams: Vec<StreamKind>,
    pub seeds: Vec<u64>,
    pub rounds: usize,
    pub n: usize,
    pub scale_tol: f64,
    pub translation_tol: f64,
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        Self {
            scales: vec![1e-6, 1.0, 1e6],
            streams: vec![StreamKind::IidUniform { lo: 0.0, hi: 1.0 }, StreamKind::Adversarial],
            seeds: vec![1, 2, 3],
            rounds: 2_000,
            n: 5,
            scale_tol: 1e-6,
            translation_tol: 1e-9,
        }
    }
}

fn feed(spec: &LearnerSpec, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if spec.algorithm.is_portfolio() {
        rows.iter().map(|r| prices_from_losses(r)).collect()
    } else {
        rows.to_vec()
    }
}

fn scaled(rows: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|v| v * c).collect()).collect()
}

/// Scale invariance for [`scale_free_learners`] and translation
/// invariance for [`translation_free_learners`].
pub fn verify_invariance(cfg: &InvarianceConfig) -> SuiteReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    for kind in &cfg.streams {
        for &seed in &cfg.seeds {
            let stream = LossStream::new(kind.clone(), cfg.n, cfg.rounds, seed);
            let rows = match vectors(&stream) {
                Ok(r) => r,
                Err(e) => {
                    checks.push(CheckResult::new(format!("{}/generate", kind.name()), false, e.to_string()).seeded(seed));
                    continue;
                }
            };
            for spec in scale_free_learners(cfg.n) {
                // Soft-Bayes sees the prices, which are rescaled directly.
                let base = feed(&spec, &rows);
                let reference = prediction_path(&spec, &base);
                for &c in &cfg.scales {
                    let name = format!("scale/{}/{}/c={c:e}", spec.algorithm, kind.name());
                    let check = match (&reference, prediction_path(&spec, &scaled(&base, c))) {
                        (Ok(a), Ok(b)) => {
                            let d = path_distance(a, &b);
                            CheckResult::new(name, d <= cfg.scale_tol, format!("max relative difference {d:e}"))
                        }
                        (Err(e), _) => CheckResult::new(name, false, e.to_string()),
                        (_, Err(e)) => CheckResult::new(name, false, e.to_string()),
                    };
                    checks.push(check.seeded(seed));
                }
            }
            let mut rng = StreamRng::new(seed ^ 0x7A45_1A7E);
            let shifts: Vec<f64> = (0..rows.len()).map(|_| rng.uniform_in(-10.0, 10.0)).collect();
            let moved: Vec<Vec<f64>> =
                rows.iter().zip(&shifts).map(|(r, s)| r.iter().map(|v| v + s).collect()).collect();
            for spec in translation_free_learners(cfg.n) {
                let name = format!("translation/{}/{}", spec.algorithm, kind.name());
                let check = match (prediction_path(&spec, &rows), prediction_path(&spec, &moved)) {
                    (Ok(a), Ok(b)) => {
                        let d = path_distance(&a, &b);
                        CheckResult::new(name, d <= cfg.translation_tol, format!("max relative difference {d:e}"))
                    }
                    (Err(e), _) | (_, Err(e)) => CheckResult::new(name, false, e.to_string()),
                };
                checks.push(check.seeded(seed));
            }
        }
    }
    SuiteReport { suite: "invariance".into(), checks, elapsed: start.elapsed() }
}

/// Runs `algo` on uniform losses at scale 1 and at `scale`: returns the
/// path distance, whether the scaled run stayed finite and whether its
/// regret respects the bound.
pub fn tiny_scale_check(
    algo: Algorithm,
    n: usize,
    rounds: usize,
    seed: u64,
    scale: f64,
) -> Result<(f64, bool), HarnessError> {
    let spec = LearnerSpec::new(algo, n);
    let unit = LossStream::new(StreamKind::IidUniform { lo: 0.0, hi: 1.0 }, n, rounds, seed);
    let tiny = LossStream::new(StreamKind::TinyScale { scale }, n, rounds, seed);
    let a = prediction_path(&spec, &vectors(&unit)?)?;
    let b = prediction_path(&spec, &vectors(&tiny)?)?;
    let rec = evaluate_run(&RunSpec { learner: spec, stream: tiny }, RunOptions::default())?;
    let sound = rec.unsound(1e-6).is_empty() && rec.violation_counts.is_empty();
    Ok((path_distance(&a, &b), sound))
}

// ---------------------------------------------------------------- oracles

/// Reciprocal sequences `a_t ~ U[0, 1]` for the isotuning oracles.
pub fn reciprocal_sequences(count: usize, rounds: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = StreamRng::new(seed);
    (0..count).map(|_| (0..rounds).map(|_| rng.uniform()).collect()).collect()
}

/// Result of the factor-2 and square-root checks on one sequence.
#[derive(Debug, Clone, Copy)]
pub struct IsoOracleOutcome {
    pub x_t: f64,
    pub m_star: f64,
    pub factor_two: bool,
    pub sqrt_sandwich: bool,
    pub hindsight_sandwich: bool,
}

pub fn iso_oracle(a: &[f64], rel_tol: f64) -> Result<IsoOracleOutcome, HarnessError> {
    let gs: Vec<MonotoneFn> = a.iter().map(|&v| MonotoneFn::reciprocal(v)).collect();
    let xs = isotuning_sequence(&gs).map_err(|e| HarnessError::Config(e.into()))?;
    let x_t = xs.last().copied().unwrap_or(0.0);
    let (m_star, _) = hindsight_bound(&gs, 0.0);
    let factor_two = 0.5 * m_star * (1.0 - rel_tol) <= x_t && x_t <= m_star * (1.0 + rel_tol);
    let (lo, hi) = sqrt_bound(a);
    let exact = 1e-9;
    let sqrt_sandwich = lo * (1.0 - exact) <= x_t && x_t <= hi * (1.0 + exact);
    let seq = sequential_hindsight_value(a);
    let x_star_t = a.iter().sum::<f64>().sqrt();
    let hindsight_sandwich = m_star * (1.0 - rel_tol) <= seq && seq <= (x_star_t + m_star) * (1.0 + rel_tol);
    Ok(IsoOracleOutcome { x_t, m_star, factor_two, sqrt_sandwich, hindsight_sandwich })
}

/// One hand-traced value: `(name, implementation, expected)`.
pub type Trace = (&'static str, f64, f64);

fn learner(spec: LearnerSpec) -> Box<dyn Learner> {
    spec.build().expect("hand-trace configuration is valid")
}

/// The hand-traced step examples, computed by the implementation next to
/// their closed forms.
pub fn hand_traces() -> Result<Vec<Trace>, HarnessError> {
    let err = |round| move |source| HarnessError::Learner { round, source };
    let l2 = 2f64.ln();
    let l3 = 3f64.ln();
    let r2 = 2f64.sqrt();
    let mut out: Vec<Trace> = Vec::new();

    let mut gd = learner(LearnerSpec::new(Algorithm::IsoGd, 1).with_q(1.0));
    let o1 = gd.step(&[2.0]).map_err(err(1))?;
    out.push(("isogd delta_1", o1.delta, r2));
    out.push(("isogd Delta_1", o1.delta_total, r2));
    out.push(("isogd x_2", gd.prediction()[0], 0.0));
    out.push(("isogd null_1", f64::from(o1.was_null as u8), 1.0));
    let o2 = gd.step(&[1.0]).map_err(err(2))?;
    out.push(("isogd null_2", f64::from(o2.was_null as u8), 0.0));
    out.push(("isogd delta_2", o2.delta, 1.0 / (2.0 * r2)));
    out.push(("isogd Delta_2", o2.delta_total, 5.0 / (2.0 * r2)));
    out.push(("isogd x_3", gd.prediction()[0], -0.8 / r2));

    let mut sb = learner(LearnerSpec::new(Algorithm::IsoSoftBayes, 2));
    let o = sb.step(&[2.0, 0.0]).map_err(err(1))?;
    out.push(("isosoftbayes delta_1", o.delta, l3));
    out.push(("isosoftbayes Delta_1", o.delta_total, 2.0 * l2 + l3));
    out.push(("isosoftbayes x_2[0]", sb.prediction()[0], (1.5 * l2 + 0.5 * l3) / (2.0 * l2 + l3)));
    out.push(("isosoftbayes x_2[1]", sb.prediction()[1], (0.5 * l2 + 0.5 * l3) / (2.0 * l2 + l3)));

    let mut h = learner(LearnerSpec::new(Algorithm::IsoHedge, 2));
    let o = h.step(&[1.0, 0.0]).map_err(err(1))?;
    out.push(("isohedge delta_1", o.delta, 0.5));
    out.push(("isohedge x_2[0]", h.prediction()[0], 0.5));
    let info = h.comparator_info(&[0.0, 1.0]).map_err(HarnessError::Config)?;
    let b = crate::learners::bound_value(&h.certificate(), &info).map_err(|e| HarnessError::Comparator(e.to_string()))?;
    out.push(("isohedge bound_1", b, 2.0 * (0.25 * l2).sqrt() + 1.0 + l2 / 3.0));

    let mut p = learner(LearnerSpec::new(Algorithm::IsoProd, 2));
    let o = p.step(&[1.0, 0.0]).map_err(err(1))?;
    out.push(("isoprod delta_1", o.delta, (l2 / 2.0).sqrt() * 0.5));
    out.push(("isoprod null_1", f64::from(o.was_null as u8), 1.0));
    out.push(("isoprod x_2[0]", p.prediction()[0], 0.5));

    let mut m = crate::learners::IsoMlProd::new(2, l2).map_err(HarnessError::Config)?;
    let o = m.step(&[1.0, 0.0]).map_err(err(1))?;
    out.push(("isomlprod bar_loss_1", o.bar_loss.unwrap_or(f64::NAN), 0.5));
    out.push(("isomlprod null_1", f64::from(o.was_null as u8), 1.0));
    for (i, d) in m.deltas().iter().enumerate() {
        out.push((["isomlprod Delta_1[0]", "isomlprod Delta_1[1]"][i], *d, 0.5));
    }
    for (i, w) in m.weights().iter().enumerate() {
        out.push((["isomlprod x_2[0]", "isomlprod x_2[1]"][i], *w, 1.0));
    }

    let mut a = learner(LearnerSpec::new(Algorithm::Aogd, 1).with_domain(Domain::Box { lo: vec![-0.5], hi: vec![0.5] }));
    let o = a.step(&[1.0]).map_err(err(1))?;
    out.push(("aogd delta_1", o.delta, 1.0));
    out.push(("aogd Delta_1", o.delta_total, 1.0));
    out.push(("aogd eta_1", o.eta, 1.0));

    let mut f = learner(LearnerSpec::new(Algorithm::IsoFtrl, 2));
    let o = f.step(&[1.0, 0.0]).map_err(err(1))?;
    out.push(("isoftrl delta_1", o.delta, (l2 / 2.0).sqrt()));
    out.push(("isoftrl x_2[0]", f.prediction()[0], 0.5));
    Ok(out)
}

/// `isogd` from `x_1 = -10` on the plateau loss with `x* = 3`: the played
/// points `x_1..x_T`.
pub fn plateau_path(rounds: usize) -> Result<Vec<f64>, HarnessError> {
    let spec = LearnerSpec::new(Algorithm::IsoGd, 1).with_q(1.0).with_x1(vec![-10.0]);
    let mut gd = spec.build().map_err(HarnessError::Config)?;
    let mut xs = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let x = gd.prediction()[0];
        xs.push(x);
        gd.step(&[super::stream::plateau_grad(x, 3.0)]).map_err(|source| HarnessError::Learner { round: t, source })?;
    }
    Ok(xs)
}

/// Isotuning oracles, hand traces, best-fixed examples and the plateau run.
pub fn verify_oracles() -> SuiteReport {
    let start = Instant::now();
    let mut checks = Vec::new();
    let seqs = reciprocal_sequences(100, 1000, 2024);
    let outcomes: Vec<_> = seqs.par_iter().map(|a| iso_oracle(a, 1e-3)).collect();
    let mut counts = [0usize; 3];
    let mut errors = Vec::new();
    for o in &outcomes {
        match o {
            Ok(o) => {
                counts[0] += o.factor_two as usize;
                counts[1] += o.sqrt_sandwich as usize;
                counts[2] += o.hindsight_sandwich as usize;
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    for (k, name) in ["factor_two", "sqrt_sandwich", "hindsight_sandwich"].iter().enumerate() {
        checks.push(
            CheckResult::new(*name, counts[k] == seqs.len(), format!("{}/{} sequences", counts[k], seqs.len()))
                .seeded(2024),
        );
    }
    if let Some(e) = errors.first() {
        checks.push(CheckResult::new("iso_oracle_errors", false, e.clone()));
    }
    match hand_traces() {
        Ok(traces) => {
            for (name, got, want) in traces {
                let ok = (got - want).abs() <= 1e-9;
                checks.push(CheckResult::new(name, ok, format!("got {got:.12}, expected {want:.12}")));
            }
        }
        Err(e) => checks.push(CheckResult::new("hand_traces", false, e.to_string())),
    }
    checks.extend(best_fixed_examples());
    match plateau_path(1000) {
        Ok(xs) => {
            let worst = xs[199..].iter().map(|x| (x - 3.0).abs()).fold(0.0, f64::max);
            checks.push(CheckResult::new("plateau_vicinity", worst <= 0.5, format!("max |x_t - 3| for t >= 200: {worst:.4}")));
        }
        Err(e) => checks.push(CheckResult::new("plateau_vicinity", false, e.to_string())),
    }
    SuiteReport { suite: "oracles".into(), checks, elapsed: start.elapsed() }
}

fn best_fixed_examples() -> Vec<CheckResult> {
    use super::comparator::{best_fixed, best_portfolio};
    let mut out = Vec::new();
    let simplex = best_fixed(&[vec![1.0, 0.0], vec![1.0, 0.0]], &Domain::Simplex { dim: 2 });
    out.push(CheckResult::new(
        "best_fixed simplex",
        matches!(&simplex, Ok(b) if b.x == [0.0, 1.0] && b.loss == 0.0),
        format!("{simplex:?}"),
    ));
    let ball = best_fixed(&[vec![3.0, 4.0]], &Domain::Ball { center: vec![0.0, 0.0], radius: 1.0 });
    out.push(CheckResult::new(
        "best_fixed ball",
        matches!(&ball, Ok(b) if rel_close(b.x[0], -0.6, 1e-12) && rel_close(b.x[1], -0.8, 1e-12) && rel_close(b.loss, -5.0, 1e-12)),
        format!("{ball:?}"),
    ));
    let prices: Vec<Vec<f64>> = (0..200).map(|t| if t % 2 == 0 { vec![2.0, 0.0] } else { vec![0.0, 2.0] }).collect();
    let port = best_portfolio(&prices, 2);
    out.push(CheckResult::new(
        "best_fixed portfolio",
        matches!(&port, Ok(b) if (b.x[0] - 0.5).abs() <= 1e-4),
        format!("{:?}", port.map(|b| b.x)),
    ));
    out
}
