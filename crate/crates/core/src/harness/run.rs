//! Driving a learner over a stream and scoring it against comparators.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::comparator::{
    best_fixed, best_portfolio, cumulative, extreme_points, log_loss, sample_point, ternary_min, BestFixed,
};
use super::monitor::{Monitor, Violation};
use super::rng::StreamRng;
use super::stream::{plateau_grad, plateau_loss, prices_from_losses, LossStream, StreamData};
use super::HarnessError;
use crate::geometry::Domain;
use crate::learners::{bound_value, generic_bound, Algorithm, BoundCertificate, Learner, LearnerSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub learner: LearnerSpec,
    pub stream: LossStream,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Keep one [`RoundRecord`] per round, with the running bound.
    pub per_round: bool,
    pub random_comparators: usize,
    pub checks: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { per_round: false, random_comparators: 10, checks: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    /// First coordinate of `x_t`.
    pub x_first: f64,
    pub loss: f64,
    pub delta: f64,
    pub delta_total: f64,
    pub eta: f64,
    pub was_null: bool,
    /// Regret against the final best comparator after round `t`.
    pub cum_regret: f64,
    /// The bound at round `t` for that comparator.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorResult {
    pub label: String,
    pub x: Vec<f64>,
    pub loss: f64,
    /// Learner loss minus comparator loss.
    pub regret: f64,
    /// Certified slack of `loss` above the true optimum (portfolio only).
    pub gap: f64,
    /// Theorem bound; `None` when it does not apply (null factor `c != 1`).
    pub bound: Option<f64>,
    pub generic: f64,
}

impl ComparatorResult {
    /// `regret <= bound` with relative slack `tol`, for the theorem bound
    /// or, when absent, the generic one.
    pub fn sound(&self, tol: f64) -> bool {
        let b = self.bound.unwrap_or(self.generic);
        self.regret + self.gap <= b + tol * b.abs()
    }

    pub fn generic_sound(&self, tol: f64) -> bool {
        self.regret + self.gap <= self.generic + tol * self.generic.abs()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub spec: RunSpec,
    pub algorithm: Algorithm,
    pub rounds: usize,
    pub q: f64,
    pub learner_loss: f64,
    pub rows: Vec<RoundRecord>,
    pub comparators: Vec<ComparatorResult>,
    /// Index of the best comparator.
    pub best: usize,
    pub final_prediction: Vec<f64>,
    pub certificate: BoundCertificate,
    pub violations: Vec<Violation>,
    /// Violations per invariant check (all of them, not only the recorded ones).
    pub violation_counts: BTreeMap<&'static str, usize>,
    pub wall_time: Duration,
}

impl ExperimentRecord {
    pub fn best(&self) -> &ComparatorResult {
        &self.comparators[self.best]
    }

    pub fn regret(&self) -> f64 {
        self.best().regret
    }

    pub fn bound(&self) -> f64 {
        let b = self.best();
        b.bound.unwrap_or(b.generic)
    }

    /// `regret / bound`, zero when both vanish.
    pub fn ratio(&self) -> f64 {
        let (r, b) = (self.regret(), self.bound());
        if r <= 0.0 {
            0.0
        } else {
            r / b
        }
    }

    /// Comparators whose regret exceeds the bound.
    pub fn unsound(&self, tol: f64) -> Vec<&ComparatorResult> {
        self.comparators.iter().filter(|c| !c.sound(tol) || !c.generic_sound(tol)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// What the learner sees and how comparators are scored.
enum Feedback {
    Linear(Vec<Vec<f64>>),
    Portfolio(Vec<Vec<f64>>),
    Plateau { x_star: f64, grads: Vec<Vec<f64>> },
}

impl Feedback {
    fn rows(&self) -> &[Vec<f64>] {
        match self {
            Feedback::Linear(v) | Feedback::Portfolio(v) => v,
            Feedback::Plateau { grads, .. } => grads,
        }
    }
}

fn step(learner: &mut dyn Learner, t: usize, fb: &[f64]) -> Result<crate::learners::StepOutcome, HarnessError> {
    learner.step(fb).map_err(|source| HarnessError::Learner { round: t, source })
}

pub fn evaluate_run(spec: &RunSpec, opts: RunOptions) -> Result<ExperimentRecord, HarnessError> {
    let start = Instant::now();
    let ls = &spec.learner;
    let mut learner = ls.build().map_err(HarnessError::Config)?;
    let domain = ls.domain();
    let data = spec.stream.generate()?;
    let rounds = data.rounds();
    let mut monitor = opts.checks.then(|| Monitor::new(ls, learner.as_ref()));
    let mut played: Vec<Vec<f64>> = Vec::with_capacity(rounds);
    let mut outcomes = Vec::with_capacity(rounds);
    let mut feedback = match data {
        StreamData::Vectors(v) if ls.algorithm.is_portfolio() => {
            Feedback::Portfolio(v.iter().map(|l| prices_from_losses(l)).collect())
        }
        StreamData::Vectors(v) => Feedback::Linear(v),
        StreamData::Plateau { x_star, .. } => Feedback::Plateau { x_star, grads: Vec::with_capacity(rounds) },
    };
    if let Some(first) = feedback.rows().first() {
        if first.len() != ls.dim {
            return Err(HarnessError::Config(crate::learners::LearnerError::Dimension {
                expected: ls.dim,
                got: first.len(),
            }));
        }
    }
    let mut true_loss = 0.0;
    for t in 1..=rounds {
        let x = learner.prediction().to_vec();
        let out = match &mut feedback {
            Feedback::Plateau { x_star, grads } => {
                true_loss += plateau_loss(x[0], *x_star);
                grads.push(vec![plateau_grad(x[0], *x_star)]);
                step(learner.as_mut(), t, &grads[t - 1])?
            }
            fb => step(learner.as_mut(), t, &fb.rows()[t - 1])?,
        };
        if let Some(m) = monitor.as_mut() {
            m.observe(t, learner.as_ref(), &feedback.rows()[t - 1], &out)?;
        }
        played.push(x);
        outcomes.push(out);
    }
    let learner_loss = match feedback {
        Feedback::Plateau { .. } => true_loss,
        _ => outcomes.iter().map(|o| o.round_loss).sum(),
    };

    // Comparators.
    let n = ls.dim;
    let mut rng = StreamRng::new(spec.stream.seed ^ 0x5EED_C0DE_0000_0001);
    let mut points: Vec<(String, Vec<f64>, Option<f64>)> = Vec::new();
    match &feedback {
        Feedback::Linear(rows) => {
            let l_sum = cumulative(rows, n);
            if !matches!(domain, Domain::AllOfSpace { .. }) {
                let BestFixed { x, .. } = best_fixed(rows, &domain)?;
                points.push(("best_fixed".into(), x, None));
            }
            for (k, x) in extreme_points(&domain, &l_sum).into_iter().enumerate() {
                points.push((format!("extreme_{k}"), x, None));
            }
        }
        Feedback::Portfolio(prices) => {
            let b = best_portfolio(prices, n)?;
            points.push(("best_fixed".into(), b.x, Some(b.gap)));
            for (k, x) in extreme_points(&domain, &vec![0.0; n]).into_iter().enumerate() {
                points.push((format!("extreme_{k}"), x, None));
            }
        }
        Feedback::Plateau { x_star, .. } => {
            let spread = played.iter().map(|x| x[0].abs()).fold(x_star.abs(), f64::max) + 1.0;
            let (lo, hi) = match &domain {
                Domain::Box { lo, hi } => (lo[0], hi[0]),
                Domain::Ball { center, radius } => (center[0] - radius, center[0] + radius),
                _ => (-2.0 * spread, 2.0 * spread),
            };
            let xs = *x_star;
            let x = ternary_min(|v| plateau_loss(v, xs), lo, hi, 1e-9);
            points.push(("best_fixed".into(), vec![x], None));
        }
    }
    points.push(("center".into(), domain.center(), None));
    for k in 0..opts.random_comparators {
        points.push((format!("random_{k}"), sample_point(&domain, &mut rng, 10.0), None));
    }

    let cert = learner.certificate();
    let rows = feedback.rows();
    let mut comparators = Vec::with_capacity(points.len());
    for (label, x, gap) in points {
        let loss = match &feedback {
            Feedback::Linear(r) => r.iter().map(|l| dot(&x, l)).sum(),
            Feedback::Portfolio(p) => log_loss(&x, p),
            Feedback::Plateau { x_star, .. } => rounds as f64 * plateau_loss(x[0], *x_star),
        };
        let info = learner.comparator_info(&x).map_err(HarnessError::Config)?;
        let null_regret = |t: usize| dot(&played[t - 1], &rows[t - 1]) - dot(&x, &rows[t - 1]);
        let bound = bound_value(&cert, &info).ok();
        let generic = generic_bound(&cert, &info, &null_regret)
            .map_err(|e| HarnessError::Comparator(e.to_string()))?;
        comparators.push(ComparatorResult {
            label,
            regret: learner_loss - loss,
            loss,
            gap: gap.unwrap_or(0.0),
            x,
            bound,
            generic,
        });
    }
    let best = (0..comparators.len())
        .min_by(|&a, &b| {
            let key = |c: &ComparatorResult| c.loss - c.gap;
            key(&comparators[a]).total_cmp(&key(&comparators[b]))
        })
        .unwrap_or(0);

    let final_prediction = learner.prediction().to_vec();
    let (violations, violation_counts) = match monitor.as_mut() {
        Some(m) => {
            let mut all = played.clone();
            all.push(final_prediction.clone());
            let xs: Vec<Vec<f64>> = comparators.iter().map(|c| c.x.clone()).collect();
            m.finish(learner.as_ref(), &all, &xs);
            (std::mem::take(&mut m.violations), std::mem::take(&mut m.counts))
        }
        None => (Vec::new(), BTreeMap::new()),
    };

    let rows_out = if opts.per_round {
        per_round_rows(spec, &feedback, &played, &outcomes, &comparators[best])?
    } else {
        Vec::new()
    };

    Ok(ExperimentRecord {
        spec: spec.clone(),
        algorithm: ls.algorithm,
        rounds,
        q: ls.q(),
        learner_loss,
        rows: rows_out,
        comparators,
        best,
        final_prediction,
        certificate: cert,
        violations,
        violation_counts,
        wall_time: start.elapsed(),
    })
}

/// Replays the run with a fresh learner to evaluate the bound after every round.
fn per_round_rows(
    spec: &RunSpec,
    feedback: &Feedback,
    played: &[Vec<f64>],
    outcomes: &[crate::learners::StepOutcome],
    best: &ComparatorResult,
) -> Result<Vec<RoundRecord>, HarnessError> {
    let mut learner = spec.learner.build().map_err(HarnessError::Config)?;
    let info = learner.comparator_info(&best.x).map_err(HarnessError::Config)?;
    let rows = feedback.rows();
    let x = &best.x;
    let null_regret = |t: usize| dot(&played[t - 1], &rows[t - 1]) - dot(x, &rows[t - 1]);
    let mut cum = 0.0;
    let mut out = Vec::with_capacity(outcomes.len());
    for (k, o) in outcomes.iter().enumerate() {
        let t = k + 1;
        step(learner.as_mut(), t, &rows[k])?;
        let (own, theirs) = match feedback {
            Feedback::Linear(r) => (o.round_loss, dot(x, &r[k])),
            Feedback::Portfolio(p) => (o.round_loss, -dot(x, &p[k]).ln()),
            Feedback::Plateau { x_star, .. } => (plateau_loss(played[k][0], *x_star), plateau_loss(x[0], *x_star)),
        };
        cum += own - theirs;
        let cert = learner.certificate();
        let bound = match bound_value(&cert, &info) {
            Ok(b) => b,
            Err(_) => generic_bound(&cert, &info, &null_regret).map_err(|e| HarnessError::Comparator(e.to_string()))?,
        };
        out.push(RoundRecord {
            t,
            x_first: played[k][0],
            loss: o.round_loss,
            delta: o.delta,
            delta_total: o.delta_total,
            eta: o.eta,
            was_null: o.was_null,
            cum_regret: cum,
            bound,
        });
    }
    Ok(out)
}
