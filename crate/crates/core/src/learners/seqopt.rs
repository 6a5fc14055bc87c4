//! Baseline: projected gradient descent with the sequential hindsight rate
//! `1/eta_t = epsilon + sqrt(q sum_{s<=t} ||g_s||^2) / q`.

use super::{check_input, check_q, dot, Algorithm, BoundCertificate, CertificateTerms, ComparatorInfo, Learner, LearnerError, StepOutcome};
use crate::geometry::{Domain, Norm};
use crate::iso::seqopt_rate;
use crate::numeric::SumSq;

#[derive(Debug, Clone)]
pub struct SeqOptGd {
    domain: Domain,
    q: f64,
    epsilon: f64,
    x: Vec<f64>,
    x1: Vec<f64>,
    t: usize,
    grad_sq: SumSq,
    inv_eta: f64,
    eta_grad_sq: f64,
    delta_total: f64,
}

impl SeqOptGd {
    pub fn new(domain: Domain, q: f64, epsilon: f64, x1: Vec<f64>) -> Result<Self, LearnerError> {
        check_q(q)?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(LearnerError::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        domain.validate()?;
        if !domain.diameter(Norm::L2).is_finite() || matches!(domain, Domain::Simplex { .. }) {
            return Err(LearnerError::Config("seqoptgd needs a bounded ball or box".into()));
        }
        if x1.len() != domain.dim() {
            return Err(LearnerError::Dimension { expected: domain.dim(), got: x1.len() });
        }
        Ok(Self {
            domain,
            q,
            epsilon,
            x: x1.clone(),
            x1,
            t: 0,
            grad_sq: SumSq::new(),
            inv_eta: epsilon,
            eta_grad_sq: 0.0,
            delta_total: 0.0,
        })
    }

    pub fn inv_eta(&self) -> f64 {
        self.inv_eta
    }
}

impl Learner for SeqOptGd {
    fn algorithm(&self) -> Algorithm {
        Algorithm::SeqOptGd
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

    fn step(&mut self, grad: &[f64]) -> Result<StepOutcome, LearnerError> {
        check_input(grad, self.dim(), self.t + 1)?;
        let prediction = self.x.clone();
        let g = Norm::L2.value(grad);
        self.grad_sq.add(g);
        self.t += 1;
        self.inv_eta = self.epsilon + seqopt_rate(self.grad_sq.value(), self.q) / self.q;
        let eta = 1.0 / self.inv_eta;
        let delta = 0.5 * eta * g * g;
        self.eta_grad_sq += eta * g * g;
        self.delta_total += delta;
        if g > 0.0 {
            let moved: Vec<f64> = self.x.iter().zip(grad).map(|(x, d)| x - eta * d).collect();
            self.x = self.domain.project(&moved)?;
        }
        Ok(StepOutcome {
            round_loss: dot(&prediction, grad),
            prediction,
            delta,
            was_null: false,
            bar_loss: None,
            delta_total: self.delta_total,
            eta,
        })
    }

    fn certificate(&self) -> BoundCertificate {
        BoundCertificate {
            algorithm: Algorithm::SeqOptGd,
            q: self.q,
            c: 1.0,
            delta_total: self.delta_total,
            delta0: 0.0,
            rounds: self.t,
            null_rounds: Vec::new(),
            terms: CertificateTerms::SeqOpt {
                diameter: self.domain.diameter(Norm::L2),
                inv_eta: self.inv_eta,
                eta_grad_sq: self.eta_grad_sq,
            },
        }
    }

    fn comparator_info(&self, x_star: &[f64]) -> Result<ComparatorInfo, LearnerError> {
        if !self.domain.contains(x_star, 1e-9) {
            return Err(LearnerError::Config("comparator lies outside the domain".into()));
        }
        Ok(ComparatorInfo { phi1: 0.0, distance: Norm::L2.distance(x_star, &self.x1), weights: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_gradients_for_four_rounds() {
        let mut s = SeqOptGd::new(Domain::unit_box(1), 1.0, 1.0, vec![0.0]).unwrap();
        for _ in 0..4 {
            s.step(&[1.0]).unwrap();
        }
        assert_eq!(s.inv_eta(), 3.0);
    }

    #[test]
    fn zero_gradient_keeps_x() {
        let mut s = SeqOptGd::new(Domain::unit_box(2), 1.0, 1.0, vec![0.25, 0.0]).unwrap();
        for _ in 0..10 {
            s.step(&[0.0, 0.0]).unwrap();
        }
        assert_eq!(s.prediction(), &[0.25, 0.0]);
    }

    #[test]
    fn rate_never_decreases() {
        let mut s = SeqOptGd::new(Domain::unit_box(1), 2.0, 0.5, vec![0.0]).unwrap();
        let mut last = s.inv_eta();
        for t in 0..100 {
            s.step(&[((t * 7) % 5) as f64 - 2.0]).unwrap();
            assert!(s.inv_eta() >= last);
            last = s.inv_eta();
        }
    }

    #[test]
    fn epsilon_must_be_positive() {
        assert!(SeqOptGd::new(Domain::unit_box(1), 1.0, 0.0, vec![0.0]).is_err());
    }
}
