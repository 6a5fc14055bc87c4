//! isoSoft-Bayes: online portfolio selection with the Soft-Bayes update,
//! isotuned from `Delta_0 = 2q` so that `eta_t <= 1/2` throughout.

use super::{
    check_experts, check_input, check_q, check_simplex_point, dot, normalize, Algorithm, BoundCertificate,
    CertificateTerms, ComparatorInfo, Learner, LearnerError, StepOutcome,
};
use crate::geometry::{bregman, Regularizer};
use crate::iso::{online_correction, IsotuningState};

#[derive(Debug, Clone)]
pub struct IsoSoftBayes {
    x: Vec<f64>,
    x1: Vec<f64>,
    iso: IsotuningState,
    log_wealth: f64,
}

impl IsoSoftBayes {
    pub fn new(n: usize, q: f64) -> Result<Self, LearnerError> {
        check_experts(n)?;
        check_q(q)?;
        let x1 = vec![1.0 / n as f64; n];
        let iso = IsotuningState::new(q)?.with_delta0(2.0 * q)?;
        Ok(Self { x: x1.clone(), x1, iso, log_wealth: 0.0 })
    }

    pub fn iso(&self) -> &IsotuningState {
        &self.iso
    }

    /// `sum_t ln <x_t, p_t>`.
    pub fn log_wealth(&self) -> f64 {
        self.log_wealth
    }
}

impl Learner for IsoSoftBayes {
    fn algorithm(&self) -> Algorithm {
        Algorithm::IsoSoftBayes
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

    fn step(&mut self, prices: &[f64]) -> Result<StepOutcome, LearnerError> {
        let round = self.iso.t + 1;
        check_input(prices, self.dim(), round)?;
        if prices.iter().any(|p| *p < 0.0) {
            return Err(LearnerError::NegativePrice { round });
        }
        let wealth = dot(&self.x, prices);
        if !(wealth > 0.0) {
            return Err(LearnerError::ZeroWealth { round, wealth });
        }
        let prediction = self.x.clone();
        let prev = self.iso.delta;
        let eta = self.iso.q / prev;
        let odds = eta / (1.0 - eta);
        let mut next = self.x.clone();
        let mut ratio_max: f64 = 0.0;
        for (xi, p) in next.iter_mut().zip(prices) {
            let ratio = p / wealth;
            ratio_max = ratio_max.max(ratio);
            *xi *= 1.0 - eta + eta * ratio;
        }
        normalize(&mut next);
        let delta = (odds * ratio_max).ln_1p();
        self.iso.step(delta, false, 0.0)?;
        online_correction(&mut next, &self.x1, prev, delta);
        self.x = next;
        let round_loss = -wealth.ln();
        self.log_wealth -= round_loss;
        Ok(StepOutcome {
            prediction,
            delta,
            was_null: false,
            bar_loss: None,
            round_loss,
            delta_total: self.iso.delta,
            eta: self.iso.eta(),
        })
    }

    fn certificate(&self) -> BoundCertificate {
        BoundCertificate {
            algorithm: Algorithm::IsoSoftBayes,
            q: self.iso.q,
            c: 1.0,
            delta_total: self.iso.delta,
            delta0: self.iso.delta0,
            rounds: self.iso.t,
            null_rounds: Vec::new(),
            terms: CertificateTerms::SoftBayes { n: self.dim() },
        }
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
