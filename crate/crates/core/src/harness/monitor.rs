//! Per-round invariant checks run alongside a learner.

use std::collections::BTreeMap;

use crate::geometry::{Domain, Norm, Regularizer};
use crate::learners::{Algorithm, CertificateTerms, Learner, LearnerSpec, StepOutcome};
use crate::numeric::SumSq;

use super::HarnessError;

/// Relative slack for inequalities between computed quantities.
const REL_TOL: f64 = 1e-9;
const MAX_RECORDED: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub round: usize,
    pub detail: String,
}

pub(crate) struct Monitor {
    algorithm: Algorithm,
    simplex: bool,
    /// Norm of the regularizer for the dual-norm learners.
    dual_norm: Option<Norm>,
    regularizer: Regularizer,
    q: f64,
    unit_c: bool,
    x1: Vec<f64>,
    sum_sq: SumSq,
    max_dual: f64,
    max_delta: f64,
    pub violations: Vec<Violation>,
    pub counts: BTreeMap<&'static str, usize>,
}

fn leq(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs().max(a.abs())
}

impl Monitor {
    pub fn new(spec: &LearnerSpec, learner: &dyn Learner) -> Self {
        let algorithm = spec.algorithm;
        let dual_norm = match algorithm {
            Algorithm::IsoGd | Algorithm::IsoMd | Algorithm::IsoFtrl => Some(spec.regularizer().norm()),
            _ => None,
        };
        Self {
            algorithm,
            simplex: matches!(spec.domain(), Domain::Simplex { .. }),
            dual_norm,
            regularizer: spec.regularizer(),
            q: spec.q(),
            unit_c: spec.c == 1.0,
            x1: learner.anchor().to_vec(),
            sum_sq: SumSq::new(),
            max_dual: 0.0,
            max_delta: 0.0,
            violations: Vec::new(),
            counts: BTreeMap::new(),
        }
    }

    fn flag(&mut self, check: &'static str, round: usize, detail: String) {
        *self.counts.entry(check).or_default() += 1;
        if self.violations.len() < MAX_RECORDED {
            self.violations.push(Violation { check, round, detail });
        }
    }

    /// Checks after round `t`; `learner.prediction()` is now `x_{t+1}`.
    pub fn observe(
        &mut self,
        t: usize,
        learner: &dyn Learner,
        feedback: &[f64],
        out: &StepOutcome,
    ) -> Result<(), HarnessError> {
        let x = learner.prediction();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Numeric { round: t, what: "prediction".into() });
        }
        for (what, v) in [("delta", out.delta), ("Delta", out.delta_total), ("round loss", out.round_loss)] {
            if !v.is_finite() {
                return Err(HarnessError::Numeric { round: t, what: what.into() });
            }
        }
        self.max_delta = self.max_delta.max(out.delta);
        if self.simplex {
            let s: f64 = x.iter().sum();
            if (s - 1.0).abs() > REL_TOL || x.iter().any(|v| *v < 0.0) {
                self.flag("simplex", t, format!("weights sum to {s}"));
            }
        }
        if self.algorithm == Algorithm::IsoSoftBayes && x.iter().any(|v| *v <= 0.0) {
            self.flag("positivity", t, "a portfolio weight reached zero".into());
        }
        if self.algorithm == Algorithm::IsoMlProd {
            if let CertificateTerms::MlProd { x_next, c, .. } = &learner.certificate().terms {
                let mass: f64 = x_next.iter().sum();
                let cap = x_next.len() as f64 + c.iter().sum::<f64>();
                if !leq(mass, cap) {
                    self.flag("mlprod_mass", t, format!("sum x = {mass} > {cap}"));
                }
            }
        }
        if let Some(norm) = self.dual_norm {
            let dual = norm.dual_value(feedback);
            let q = self.q;
            if out.was_null && self.unit_c && dual < self.sum_sq.sqrt() {
                self.flag("null_dominance", t, format!("||l_tau|| = {dual} < {}", self.sum_sq.sqrt()));
            }
            self.sum_sq.add(dual);
            self.max_dual = self.max_dual.max(dual);
            if self.unit_c {
                let d = out.delta_total;
                let lower = self.sum_sq.sqrt_scaled(q / 2.0);
                let upper = self.sum_sq.sqrt_scaled(q) + (q / 2.0).sqrt() * self.max_dual;
                if !leq(lower, d) || !leq(d, upper) {
                    self.flag("delta_sandwich", t, format!("{lower} <= {d} <= {upper} fails"));
                }
                let corollary = self.sum_sq.sqrt_scaled(q) + self.max_delta;
                if self.algorithm != Algorithm::IsoFtrl && !leq(d, corollary) {
                    self.flag("off_by_one", t, format!("Delta = {d} > {corollary}"));
                }
            }
            if self.algorithm != Algorithm::IsoFtrl {
                let travel = norm.distance(x, &self.x1);
                let cap = (2.0 * q * t as f64).sqrt();
                if !leq(travel, cap) {
                    self.flag("md_travel", t, format!("||x - x1|| = {travel} > {cap}"));
                }
            }
        }
        Ok(())
    }

    /// Whole-run checks: the Prod-family weight factors and the FTRL
    /// travel bound against each comparator. `predictions[t]` is `x_{t+1}`.
    pub fn finish(&mut self, learner: &dyn Learner, predictions: &[Vec<f64>], comparators: &[Vec<f64>]) {
        if let Some(f) = learner.min_factor() {
            let floor = if self.algorithm == Algorithm::IsoMlProd { 0.5 } else { 0.0 };
            if f.is_finite() && !(f >= floor && f > 0.0) {
                self.flag("weight_factor", predictions.len(), format!("min factor {f} below {floor}"));
            }
        }
        if self.algorithm == Algorithm::IsoFtrl {
            let norm = self.regularizer.norm();
            for xs in comparators {
                let root = (2.0 * self.regularizer.value(xs)).sqrt();
                for (k, x) in predictions.iter().enumerate() {
                    let t = k + 1;
                    let cap = root + 2.0 * (2.0 * self.q * t as f64).sqrt();
                    let dist = norm.distance(xs, x);
                    if !leq(dist, cap) {
                        self.flag("ftrl_travel", t, format!("||x* - x_t|| = {dist} > {cap}"));
                    }
                }
            }
        }
    }
}
