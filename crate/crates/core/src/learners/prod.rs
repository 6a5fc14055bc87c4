//! isoProd: the multiplicative Prod update with an off-by-one isotuned
//! rate, null updates and online correction.

use super::{
    check_experts, check_input, check_q, check_simplex_point, dot, normalize, Algorithm, BoundCertificate,
    CertificateTerms, ComparatorInfo, Learner, LearnerError, StepOutcome,
};
use crate::geometry::{bregman, Regularizer};
use crate::iso::{online_correction, reciprocal_iso_point, reciprocal_triggers, IsotuningState};
use crate::numeric::{u_minus_ln1p, SumSq};

#[derive(Debug, Clone)]
pub struct IsoProd {
    x: Vec<f64>,
    x1: Vec<f64>,
    iso: IsotuningState,
    s_sq: SumSq,
    s_max: f64,
    min_factor: f64,
}

impl IsoProd {
    pub fn new(n: usize, q: f64, c: f64) -> Result<Self, LearnerError> {
        check_experts(n)?;
        check_q(q)?;
        let x1 = vec![1.0 / n as f64; n];
        let iso = IsotuningState::new(q)?.with_c(c)?;
        Ok(Self { x: x1.clone(), x1, iso, s_sq: SumSq::new(), s_max: 0.0, min_factor: f64::INFINITY })
    }

    pub fn iso(&self) -> &IsotuningState {
        &self.iso
    }

    /// Smallest `1 + eta r_i` seen on a normal round (`inf` if none).
    pub fn min_factor(&self) -> f64 {
        self.min_factor
    }
}

impl Learner for IsoProd {
    fn algorithm(&self) -> Algorithm {
        Algorithm::IsoProd
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
        let bar = dot(&self.x, loss);
        let r: Vec<f64> = loss.iter().map(|l| bar - l).collect();
        let s = r.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let (q, c, prev) = (self.iso.q, self.iso.c, self.iso.delta);
        let root = (q / 2.0).sqrt() * s;
        // ghat(Delta - q s) > c (Delta - q s), with ghat = infinity for a
        // non-positive argument.
        let was_null = reciprocal_triggers(root, c, prev - q * s);
        let mut next = self.x.clone();
        let delta = if was_null {
            reciprocal_iso_point(root, c)
        } else if s == 0.0 {
            0.0
        } else {
            let eta = q / prev;
            let mut worst: f64 = 0.0;
            for (xi, ri) in next.iter_mut().zip(&r) {
                let u = eta * ri;
                self.min_factor = self.min_factor.min(1.0 + u);
                *xi *= 1.0 + u;
                worst = worst.max(u_minus_ln1p(u));
            }
            normalize(&mut next);
            worst * (prev / q)
        };
        self.iso.step(delta, was_null, s)?;
        online_correction(&mut next, &self.x1, prev, delta);
        self.x = next;
        self.s_sq.add(s);
        self.s_max = self.s_max.max(s);
        Ok(StepOutcome {
            prediction,
            delta,
            was_null,
            bar_loss: Some(bar),
            round_loss: bar,
            delta_total: self.iso.delta,
            eta: self.iso.eta(),
        })
    }

    fn certificate(&self) -> BoundCertificate {
        BoundCertificate {
            algorithm: Algorithm::IsoProd,
            q: self.iso.q,
            c: self.iso.c,
            delta_total: self.iso.delta,
            delta0: 0.0,
            rounds: self.iso.t,
            null_rounds: self.iso.null_rounds.clone(),
            terms: CertificateTerms::Prod { n: self.dim(), s_sq: self.s_sq, s_max: self.s_max },
        }
    }

    fn min_factor(&self) -> Option<f64> {
        Some(self.min_factor)
    }

    fn comparator_info(&self, x_star: &[f64]) -> Result<ComparatorInfo, LearnerError> {
        check_simplex_point(x_star, self.dim())?;
        Ok(ComparatorInfo {
            phi1: bregman(&Regularizer::Entropic, x_star, &self.x1)?,
            distance: 0.0,
            weights: Some(x_star.to_vec()),
        })
    }
}
