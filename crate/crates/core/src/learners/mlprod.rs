//! isoML-Prod: Prod with one isotuned learning rate per expert.
//!
//! The unnormalized weights start at `x_{i,1} = 1` and are corrected toward
//! 1; the played point is proportional to `x_i / Delta_i`.

use super::{
    check_experts, check_input, check_q, check_simplex_point, dot, Algorithm, BoundCertificate, CertificateTerms,
    ComparatorInfo, Learner, LearnerError, StepOutcome,
};
use crate::iso::IsotuningState;
use crate::numeric::{u_minus_ln1p, SumSq};

#[derive(Debug, Clone)]
pub struct IsoMlProd {
    x: Vec<f64>,
    x1: Vec<f64>,
    iso: Vec<IsotuningState>,
    prediction: Vec<f64>,
    v: Vec<SumSq>,
    c: Vec<f64>,
    s_max: f64,
    min_factor: f64,
}

impl IsoMlProd {
    pub fn new(n: usize, q: f64) -> Result<Self, LearnerError> {
        check_experts(n)?;
        check_q(q)?;
        let iso = vec![IsotuningState::new(q)?; n];
        Ok(Self {
            x: vec![1.0; n],
            x1: vec![1.0; n],
            iso,
            prediction: vec![1.0 / n as f64; n],
            v: vec![SumSq::new(); n],
            c: vec![0.0; n],
            s_max: 0.0,
            min_factor: f64::INFINITY,
        })
    }

    /// Unnormalized weights `x_{i,t}`.
    pub fn weights(&self) -> &[f64] {
        &self.x
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.iso.iter().map(|s| s.delta).collect()
    }

    /// `C_j = sum_t delta_{j,t} / Delta_{j,t}`.
    pub fn c_sums(&self) -> &[f64] {
        &self.c
    }

    pub fn min_factor(&self) -> f64 {
        self.min_factor
    }

    fn q(&self) -> f64 {
        self.iso[0].q
    }

    /// Weights proportional to `x_i / Delta_i`; uniform over the zero-`Delta`
    /// coordinates when there are any.
    fn refresh_prediction(&mut self) {
        let n = self.x.len();
        let zeros = self.iso.iter().filter(|s| s.delta == 0.0).count();
        if zeros > 0 {
            for (p, s) in self.prediction.iter_mut().zip(&self.iso) {
                *p = if s.delta == 0.0 { 1.0 / zeros as f64 } else { 0.0 };
            }
            return;
        }
        // Divide by the smallest Delta first so nothing overflows when the
        // losses are tiny.
        let d_min = self.iso.iter().map(|s| s.delta).fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for i in 0..n {
            let w = self.x[i] * (d_min / self.iso[i].delta);
            self.prediction[i] = w;
            total += w;
        }
        self.prediction.iter_mut().for_each(|p| *p /= total);
    }
}

impl Learner for IsoMlProd {
    fn algorithm(&self) -> Algorithm {
        Algorithm::IsoMlProd
    }

    fn dim(&self) -> usize {
        self.x.len()
    }

    fn anchor(&self) -> &[f64] {
        &self.x1
    }

    fn prediction(&self) -> &[f64] {
        &self.prediction
    }

    fn step(&mut self, loss: &[f64]) -> Result<StepOutcome, LearnerError> {
        let round = self.iso[0].t + 1;
        check_input(loss, self.dim(), round)?;
        let prediction = self.prediction.clone();
        let bar = dot(&prediction, loss);
        let r: Vec<f64> = loss.iter().map(|l| bar - l).collect();
        let s = r.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let q = self.q();
        // Null on all coordinates as soon as one has eta_i |r_i| >= 1/2.
        let was_null = r.iter().zip(&self.iso).any(|(ri, st)| *ri != 0.0 && 2.0 * q * ri.abs() >= st.delta);
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let prev = self.iso[i].delta;
            let (x_prime, delta) = if was_null {
                (self.x[i], s)
            } else if r[i] == 0.0 {
                (self.x[i], 0.0)
            } else {
                let u = q / prev * r[i];
                self.min_factor = self.min_factor.min(1.0 + u);
                (self.x[i] * (1.0 + u), u_minus_ln1p(u) * (prev / q))
            };
            self.iso[i].step(delta, was_null, s)?;
            let now = self.iso[i].delta;
            self.x[i] = if now == 0.0 {
                x_prime
            } else if prev == 0.0 {
                self.x1[i]
            } else {
                x_prime * (prev / now) + (delta / now) * self.x1[i]
            };
            if now > 0.0 {
                self.c[i] += delta / now;
            }
            self.v[i].add(r[i]);
            worst = worst.max(delta);
        }
        self.s_max = self.s_max.max(s);
        self.refresh_prediction();
        let delta_total = self.iso.iter().map(|st| st.delta).fold(0.0, f64::max);
        Ok(StepOutcome {
            prediction,
            delta: worst,
            was_null,
            bar_loss: Some(bar),
            round_loss: bar,
            delta_total,
            eta: if delta_total == 0.0 { f64::INFINITY } else { q / delta_total },
        })
    }

    fn certificate(&self) -> BoundCertificate {
        let deltas = self.deltas();
        BoundCertificate {
            algorithm: Algorithm::IsoMlProd,
            q: self.q(),
            c: 1.0,
            delta_total: deltas.iter().copied().fold(0.0, f64::max),
            delta0: 0.0,
            rounds: self.iso[0].t,
            null_rounds: self.iso[0].null_rounds.clone(),
            terms: CertificateTerms::MlProd {
                n: self.dim(),
                v: self.v.clone(),
                s_max: self.s_max,
                c: self.c.clone(),
                deltas,
                x_next: self.x.clone(),
            },
        }
    }

    fn min_factor(&self) -> Option<f64> {
        Some(self.min_factor)
    }

    fn comparator_info(&self, x_star: &[f64]) -> Result<ComparatorInfo, LearnerError> {
        check_simplex_point(x_star, self.dim())?;
        Ok(ComparatorInfo { phi1: 0.0, distance: 0.0, weights: Some(x_star.to_vec()) })
    }
}
