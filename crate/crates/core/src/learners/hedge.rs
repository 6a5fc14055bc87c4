//! isoHedge: exponential weights with the mixability gap as `delta_t`,
//! online correction and isotuning. There are no null updates.
//!
//! The exponent is written relative to `barl_t` (`b_i = eta (barl_t - l_i)`),
//! which is algebraically the same for every pivot `m_t` and loses nothing
//! to cancellation. The pivot still enters the certificate.

use super::{
    check_experts, check_input, check_q, check_simplex_point, dot, normalize, Algorithm, BoundCertificate,
    CertificateTerms, ComparatorInfo, Learner, LearnerError, MPivot, StepOutcome,
};
use crate::geometry::{bregman, Regularizer};
use crate::iso::{online_correction, IsotuningState};
use crate::numeric::{expm1_minus_x, SumSq};

#[derive(Debug, Clone)]
pub struct IsoHedge {
    x: Vec<f64>,
    x1: Vec<f64>,
    iso: IsotuningState,
    pivot: MPivot,
    u: SumSq,
    v_prime: SumSq,
    s_max: f64,
    l_max: f64,
}

impl IsoHedge {
    pub fn new(n: usize, q: f64) -> Result<Self, LearnerError> {
        check_experts(n)?;
        check_q(q)?;
        let x1 = vec![1.0 / n as f64; n];
        Ok(Self {
            x: x1.clone(),
            x1,
            iso: IsotuningState::new(q)?,
            pivot: MPivot::BarLoss,
            u: SumSq::new(),
            v_prime: SumSq::new(),
            s_max: 0.0,
            l_max: 0.0,
        })
    }

    pub fn with_pivot(mut self, pivot: MPivot) -> Self {
        self.pivot = pivot;
        self
    }

    pub fn iso(&self) -> &IsotuningState {
        &self.iso
    }

    /// One round with an explicit pivot `m_t`.
    pub fn step_with_pivot(&mut self, loss: &[f64], m: f64) -> Result<StepOutcome, LearnerError> {
        check_input(loss, self.dim(), self.iso.t + 1)?;
        if !m.is_finite() {
            return Err(LearnerError::NonFinite { round: self.iso.t + 1 });
        }
        let prediction = self.x.clone();
        let bar = dot(&self.x, loss);
        let r: Vec<f64> = loss.iter().map(|l| bar - l).collect();
        let s = r.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
        let prev = self.iso.delta;
        let q = self.iso.q;
        let mut next = self.x.clone();
        let delta = if s == 0.0 {
            0.0
        } else if prev == 0.0 {
            // eta = infinity: all mass on the argmin, delta = max_i r_i.
            let best = loss.iter().copied().fold(f64::INFINITY, f64::min);
            let ties = loss.iter().filter(|&&l| l == best).count() as f64;
            for (xi, &l) in next.iter_mut().zip(loss) {
                *xi = if l == best { 1.0 / ties } else { 0.0 };
            }
            r.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            let eta = q / prev;
            let b: Vec<f64> = r.iter().map(|ri| eta * ri).collect();
            let b_max = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ln_z = if b_max <= 50.0 {
                // sum x_i b_i = 0, so Z = 1 + sum x_i (e^b - 1 - b).
                self.x.iter().zip(&b).map(|(xi, bi)| xi * expm1_minus_x(*bi)).sum::<f64>().ln_1p()
            } else {
                let z: f64 = self.x.iter().zip(&b).map(|(xi, bi)| xi * (bi - b_max).exp()).sum();
                b_max + z.ln()
            };
            for (xi, bi) in next.iter_mut().zip(&b) {
                *xi *= (bi - ln_z).exp();
            }
            normalize(&mut next);
            (ln_z * (prev / q)).max(0.0)
        };
        self.iso.step(delta, false, s)?;
        online_correction(&mut next, &self.x1, prev, delta);
        self.x = next;
        for (xi, (&l, ri)) in prediction.iter().zip(loss.iter().zip(&r)) {
            self.u.add_weighted(l - m, *xi);
            self.v_prime.add_weighted(*ri, *xi);
            self.l_max = self.l_max.max((l - m).abs());
        }
        self.s_max = self.s_max.max(s);
        Ok(StepOutcome {
            prediction,
            delta,
            was_null: false,
            bar_loss: Some(bar),
            round_loss: bar,
            delta_total: self.iso.delta,
            eta: self.iso.eta(),
        })
    }
}

impl Learner for IsoHedge {
    fn algorithm(&self) -> Algorithm {
        Algorithm::IsoHedge
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
        let m = match self.pivot {
            MPivot::BarLoss => dot(&self.x, loss),
            MPivot::Zero => 0.0,
        };
        self.step_with_pivot(loss, m)
    }

    fn certificate(&self) -> BoundCertificate {
        BoundCertificate {
            algorithm: Algorithm::IsoHedge,
            q: self.iso.q,
            c: 1.0,
            delta_total: self.iso.delta,
            delta0: 0.0,
            rounds: self.iso.t,
            null_rounds: Vec::new(),
            terms: CertificateTerms::Hedge {
                n: self.dim(),
                u: self.u,
                v_prime: self.v_prime,
                s_max: self.s_max,
                l_max: self.l_max,
                pivot: self.pivot,
            },
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::bound_value;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_round_trace() {
        let mut h = IsoHedge::new(2, 2f64.ln()).unwrap();
        let o = h.step(&[1.0, 0.0]).unwrap();
        assert_eq!(o.delta, 0.5);
        assert_eq!(h.prediction(), &[0.5, 0.5]);
        let b = bound_value(&h.certificate(), &h.comparator_info(&[0.0, 1.0]).unwrap()).unwrap();
        let l2 = 2f64.ln();
        assert_abs_diff_eq!(b, 2.0 * (0.25 * l2).sqrt() + 1.0 + l2 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 2.063604, epsilon = 1e-6);
    }

    #[test]
    fn constant_losses_are_a_fixed_point() {
        let mut h = IsoHedge::new(3, 3f64.ln()).unwrap();
        h.step(&[0.0, 1.0, 0.3]).unwrap();
        h.step(&[0.2, 0.0, 0.3]).unwrap();
        let before = h.prediction().to_vec();
        let o = h.step(&[5.0; 3]).unwrap();
        assert!(o.delta < 1e-15);
        for (a, b) in h.prediction().iter().zip(&before) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn huge_exponents_stay_finite() {
        let mut h = IsoHedge::new(2, 2f64.ln()).unwrap();
        h.step(&[1e-9, 0.0]).unwrap();
        let o = h.step(&[1e6, 0.0]).unwrap();
        assert!(o.delta.is_finite());
        assert!(h.prediction().iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn pivot_only_touches_the_certificate() {
        let losses = [[0.3, 0.9], [1.0, 0.1], [0.4, 0.4], [0.0, 2.0]];
        let mut a = IsoHedge::new(2, 2f64.ln()).unwrap();
        let mut b = IsoHedge::new(2, 2f64.ln()).unwrap().with_pivot(MPivot::Zero);
        for l in &losses {
            a.step(l).unwrap();
            b.step(l).unwrap();
        }
        assert_eq!(a.prediction(), b.prediction());
        assert_ne!(a.certificate().terms, b.certificate().terms);
    }
}
