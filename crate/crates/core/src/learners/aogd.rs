//! Adaptive online gradient descent as an isotuning instance:
//! `1/eta_t = psi(1/eta_{t-1} + alpha_t, 4 ||g_t||^2 / q)` keeps
//! `Delta_t = q (1/eta_t - alpha_{1:t})` equal to `sum_s eta_s ||g_s||^2`.

use super::{check_input, check_q, dot, Algorithm, BoundCertificate, CertificateTerms, ComparatorInfo, Learner, LearnerError, StepOutcome};
use crate::geometry::{Domain, Norm};
use crate::iso::IsotuningState;

/// `psi(a, b) = (a + sqrt(a^2 + b)) / 2`, the positive root of `x^2 - a x - b/4`.
pub fn psi(a: f64, b: f64) -> f64 {
    0.5 * (a + a.hypot(b.sqrt()))
}

#[derive(Debug, Clone)]
pub struct Aogd {
    domain: Domain,
    x: Vec<f64>,
    x1: Vec<f64>,
    iso: IsotuningState,
    inv_eta: f64,
    alpha: f64,
    alpha_sum: f64,
}

fn check_alpha(alpha: f64) -> Result<(), LearnerError> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(LearnerError::Config(format!("alpha must be non-negative, got {alpha}")))
    }
}

impl Aogd {
    pub fn new(domain: Domain, q: f64, x1: Vec<f64>) -> Result<Self, LearnerError> {
        check_q(q)?;
        domain.validate()?;
        if !domain.diameter(Norm::L2).is_finite() || matches!(domain, Domain::Simplex { .. }) {
            return Err(LearnerError::Config("aogd needs a bounded ball or box".into()));
        }
        if x1.len() != domain.dim() {
            return Err(LearnerError::Dimension { expected: domain.dim(), got: x1.len() });
        }
        let iso = IsotuningState::new(q)?;
        Ok(Self { domain, x: x1.clone(), x1, iso, inv_eta: 0.0, alpha: 0.0, alpha_sum: 0.0 })
    }

    /// Default strong-convexity parameter used by [`Learner::step`].
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, LearnerError> {
        check_alpha(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn inv_eta(&self) -> f64 {
        self.inv_eta
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alpha_sum
    }

    pub fn iso(&self) -> &IsotuningState {
        &self.iso
    }

    pub fn step_with_alpha(&mut self, grad: &[f64], alpha: f64) -> Result<StepOutcome, LearnerError> {
        check_input(grad, self.dim(), self.iso.t + 1)?;
        check_alpha(alpha)?;
        let prediction = self.x.clone();
        let g = Norm::L2.value(grad);
        let q = self.iso.q;
        let a = self.inv_eta + alpha;
        // hypot(a, 2 g / sqrt q) avoids squaring g.
        self.inv_eta = 0.5 * (a + a.hypot(2.0 * g / q.sqrt()));
        self.alpha_sum += alpha;
        let delta = if g == 0.0 { 0.0 } else { g * (g / self.inv_eta) };
        if g > 0.0 {
            let eta = 1.0 / self.inv_eta;
            let moved: Vec<f64> = self.x.iter().zip(grad).map(|(x, d)| x - eta * d).collect();
            self.x = self.domain.project(&moved)?;
        }
        self.iso.step(delta, false, g)?;
        Ok(StepOutcome {
            round_loss: dot(&prediction, grad),
            prediction,
            delta,
            was_null: false,
            bar_loss: None,
            delta_total: self.iso.delta,
            eta: if self.inv_eta == 0.0 { f64::INFINITY } else { 1.0 / self.inv_eta },
        })
    }
}

impl Learner for Aogd {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Aogd
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
        self.step_with_alpha(grad, self.alpha)
    }

    fn certificate(&self) -> BoundCertificate {
        BoundCertificate {
            algorithm: Algorithm::Aogd,
            q: self.iso.q,
            c: 1.0,
            delta_total: self.iso.delta,
            delta0: 0.0,
            rounds: self.iso.t,
            null_rounds: Vec::new(),
            terms: CertificateTerms::Aogd { diameter: self.domain.diameter(Norm::L2) },
        }
    }

    fn comparator_info(&self, x_star: &[f64]) -> Result<ComparatorInfo, LearnerError> {
        if !self.domain.contains(x_star, 1e-9) {
            return Err(LearnerError::Config("comparator lies outside the domain".into()));
        }
        Ok(ComparatorInfo { phi1: 0.0, distance: Norm::L2.distance(x_star, &self.x1), weights: None })
    }
}
