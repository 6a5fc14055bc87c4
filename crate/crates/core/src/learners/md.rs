//! isoMD: mirror descent with null updates, isotuning and online correction.
//! With the quadratic regularizer this is isoGD.

use super::{check_input, check_q, dot, Algorithm, BoundCertificate, CertificateTerms, ComparatorInfo, Learner, LearnerError, StepOutcome};
use crate::geometry::{bregman, check_pair, md_argmin, Domain, Norm, Regularizer};
use crate::iso::{online_correction, reciprocal_iso_point, reciprocal_triggers, IsotuningState};
use crate::numeric::SumSq;

/// Dual-norm diagnostics shared with isoFTRL.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct DualStats {
    pub sum_sq: SumSq,
    pub sum_sq_normal: SumSq,
    pub max_dual: f64,
}

impl DualStats {
    pub fn record(&mut self, dual: f64, was_null: bool) {
        self.sum_sq.add(dual);
        if !was_null {
            self.sum_sq_normal.add(dual);
        }
        self.max_dual = self.max_dual.max(dual);
    }
}

/// Outcome of the shared null test with `ghat(y) = (q/2) ||l||_*^2 / y`.
pub(crate) struct NullDecision {
    pub was_null: bool,
    pub delta: f64,
}

/// Null rule for isoFTRL and isoMD: null iff `sqrt(q/2) ||l||_* > c Delta_{t-1}`
/// (division-free); otherwise `delta = (q/2) ||l||_*^2 / Delta_{t-1}`.
pub(crate) fn dual_norm_rule(q: f64, c: f64, dual: f64, delta_prev: f64) -> NullDecision {
    let root = (q / 2.0).sqrt() * dual;
    if reciprocal_triggers(root, c, delta_prev) {
        NullDecision { was_null: true, delta: reciprocal_iso_point(root, c) }
    } else if root == 0.0 {
        NullDecision { was_null: false, delta: 0.0 }
    } else {
        NullDecision { was_null: false, delta: root * (root / delta_prev) }
    }
}

#[derive(Debug, Clone)]
pub struct IsoMd {
    tag: Algorithm,
    regularizer: Regularizer,
    domain: Domain,
    x: Vec<f64>,
    x1: Vec<f64>,
    iso: IsotuningState,
    stats: DualStats,
}

impl IsoMd {
    pub fn new(
        tag: Algorithm,
        regularizer: Regularizer,
        domain: Domain,
        q: f64,
        c: f64,
        x1: Vec<f64>,
    ) -> Result<Self, LearnerError> {
        check_q(q)?;
        check_pair(&regularizer, &domain)?;
        if tag == Algorithm::IsoGd && !matches!(regularizer, Regularizer::Quadratic { .. }) {
            return Err(LearnerError::Config("isogd uses the quadratic regularizer".into()));
        }
        if x1.len() != domain.dim() {
            return Err(LearnerError::Dimension { expected: domain.dim(), got: x1.len() });
        }
        let iso = IsotuningState::new(q)?.with_c(c)?;
        Ok(Self { tag, regularizer, domain, x: x1.clone(), x1, iso, stats: DualStats::default() })
    }

    /// isoGD on `domain` with anchor `x1`.
    pub fn gradient_descent(domain: Domain, q: f64, x1: Vec<f64>) -> Result<Self, LearnerError> {
        let r = Regularizer::Quadratic { center: domain.center() };
        Self::new(Algorithm::IsoGd, r, domain, q, 1.0, x1)
    }

    pub fn iso(&self) -> &IsotuningState {
        &self.iso
    }

    pub fn norm(&self) -> Norm {
        self.regularizer.norm()
    }
}

impl Learner for IsoMd {
    fn algorithm(&self) -> Algorithm {
        self.tag
    }

    fn dim(&self) -> usize {
        self.x.len()
    }

    fn anchor(&self) -> &[f64] {
        &self.x1
    }

    fn prediction(&self) -> &[f64] {
        &self.x
    }

    fn step(&mut self, loss: &[f64]) -> Result<StepOutcome, LearnerError> {
        check_input(loss, self.dim(), self.iso.t + 1)?;
        let prediction = self.x.clone();
        let dual = self.norm().dual_value(loss);
        let prev = self.iso.delta;
        let q = self.iso.q;
        let NullDecision { was_null, delta } = dual_norm_rule(q, self.iso.c, dual, prev);
        let mut next = if was_null || delta == 0.0 {
            self.x.clone()
        } else {
            md_argmin(&self.regularizer, &self.domain, &self.x, loss, prev / q)?
        };
        self.iso.step(delta, was_null, dual)?;
        online_correction(&mut next, &self.x1, prev, delta);
        self.x = next;
        self.stats.record(dual, was_null);
        Ok(StepOutcome {
            round_loss: dot(&prediction, loss),
            prediction,
            delta,
            was_null,
            bar_loss: None,
            delta_total: self.iso.delta,
            eta: self.iso.eta(),
        })
    }

    fn certificate(&self) -> BoundCertificate {
        BoundCertificate {
            algorithm: self.tag,
            q: self.iso.q,
            c: self.iso.c,
            delta_total: self.iso.delta,
            delta0: self.iso.delta0,
            rounds: self.iso.t,
            null_rounds: self.iso.null_rounds.clone(),
            terms: CertificateTerms::DualNorm {
                ftrl: false,
                sum_sq: self.stats.sum_sq,
                sum_sq_normal: self.stats.sum_sq_normal,
                max_dual: self.stats.max_dual,
                diameter: self.domain.diameter(self.norm()),
            },
        }
    }

    fn comparator_info(&self, x_star: &[f64]) -> Result<ComparatorInfo, LearnerError> {
        if !self.domain.contains(x_star, 1e-9) {
            return Err(LearnerError::Config("comparator lies outside the domain".into()));
        }
        Ok(ComparatorInfo {
            phi1: bregman(&self.regularizer, x_star, &self.x1)?,
            distance: self.norm().distance(x_star, &self.x1),
            weights: None,
        })
    }
}
