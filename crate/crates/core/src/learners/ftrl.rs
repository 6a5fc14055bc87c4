//! isoFTRL: follow the regularized leader on null-filtered losses with the
//! isotuned rate `eta_{t-1} = q / Delta_{t-1}`. No online correction is
//! needed, the regularizer already centers the iterates.

use super::md::{dual_norm_rule, DualStats, NullDecision};
use super::{check_input, check_q, dot, Algorithm, BoundCertificate, CertificateTerms, ComparatorInfo, Learner, LearnerError, StepOutcome};
use crate::geometry::{check_pair, ftrl_argmin, Domain, Norm, Regularizer};
use crate::iso::IsotuningState;

#[derive(Debug, Clone)]
pub struct IsoFtrl {
    regularizer: Regularizer,
    domain: Domain,
    x: Vec<f64>,
    x1: Vec<f64>,
    /// Cumulative filtered loss `L~_t`.
    l_tilde: Vec<f64>,
    iso: IsotuningState,
    stats: DualStats,
}

impl IsoFtrl {
    pub fn new(regularizer: Regularizer, domain: Domain, q: f64, c: f64) -> Result<Self, LearnerError> {
        check_q(q)?;
        check_pair(&regularizer, &domain)?;
        let x1 = regularizer.argmin(&domain)?;
        let iso = IsotuningState::new(q)?.with_c(c)?;
        let n = domain.dim();
        Ok(Self { regularizer, domain, x: x1.clone(), x1, l_tilde: vec![0.0; n], iso, stats: DualStats::default() })
    }

    pub fn iso(&self) -> &IsotuningState {
        &self.iso
    }

    pub fn norm(&self) -> Norm {
        self.regularizer.norm()
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }

    pub fn filtered_loss(&self) -> &[f64] {
        &self.l_tilde
    }
}

impl Learner for IsoFtrl {
    fn algorithm(&self) -> Algorithm {
        Algorithm::IsoFtrl
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
        let q = self.iso.q;
        let NullDecision { was_null, delta } = dual_norm_rule(q, self.iso.c, dual, self.iso.delta);
        if !was_null {
            self.l_tilde.iter_mut().zip(loss).for_each(|(l, g)| *l += g);
        }
        self.iso.step(delta, was_null, dual)?;
        self.stats.record(dual, was_null);
        self.x = ftrl_argmin(&self.regularizer, &self.domain, &self.l_tilde, self.iso.delta / q)?;
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
            algorithm: Algorithm::IsoFtrl,
            q: self.iso.q,
            c: self.iso.c,
            delta_total: self.iso.delta,
            delta0: self.iso.delta0,
            rounds: self.iso.t,
            null_rounds: self.iso.null_rounds.clone(),
            terms: CertificateTerms::DualNorm {
                ftrl: true,
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
            phi1: self.regularizer.value(x_star),
            distance: self.norm().distance(x_star, &self.x1),
            weights: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn entropic_first_round_trace() {
        let mut f = IsoFtrl::new(Regularizer::Entropic, Domain::Simplex { dim: 2 }, 2f64.ln(), 1.0).unwrap();
        let o = f.step(&[1.0, 0.0]).unwrap();
        assert!(o.was_null);
        assert_abs_diff_eq!(o.delta, (2f64.ln() / 2.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.delta, 0.58871, epsilon = 1e-5);
        assert_eq!(f.prediction(), &[0.5, 0.5]);
        assert_eq!(f.filtered_loss(), &[0.0, 0.0]);
    }

    #[test]
    fn zero_loss_changes_nothing() {
        let mut f = IsoFtrl::new(Regularizer::quadratic(2), Domain::AllOfSpace { dim: 2 }, 1.0, 1.0).unwrap();
        let o = f.step(&[0.0, 0.0]).unwrap();
        assert_eq!(o.delta, 0.0);
        assert_eq!(f.filtered_loss(), &[0.0, 0.0]);
    }

    #[test]
    fn quadratic_first_nonzero_loss_is_null() {
        let mut f = IsoFtrl::new(Regularizer::quadratic(2), Domain::AllOfSpace { dim: 2 }, 1.0, 1.0).unwrap();
        f.step(&[0.0, 0.0]).unwrap();
        assert!(f.step(&[1e-200, 0.0]).unwrap().was_null);
    }
}
