//! Regret certificates: the run-time quantities entering each learner's
//! regret bound, and the bounds themselves.

use thiserror::Error;

use super::{Algorithm, MPivot};
use crate::iso::NullRound;
use crate::numeric::{ln_n, SumSq};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("the closed-form bound assumes null factor c = 1, got {0}")]
    NullFactor(f64),
    #[error("comparator weights over the experts are required")]
    MissingWeights,
    #[error("comparator weights have {got} entries, expected {expected}")]
    Dimension { expected: usize, got: usize },
}

/// Learner-specific accumulators.
#[derive(Debug, Clone, PartialEq)]
pub enum CertificateTerms {
    /// isoGD / isoMD (`ftrl = false`) and isoFTRL (`ftrl = true`).
    DualNorm {
        ftrl: bool,
        /// `sum_t ||l_t||_*^2` over all rounds.
        sum_sq: SumSq,
        /// The same sum restricted to normal rounds.
        sum_sq_normal: SumSq,
        max_dual: f64,
        /// Diameter in the regularizer's norm.
        diameter: f64,
    },
    Prod {
        n: usize,
        s_sq: SumSq,
        s_max: f64,
    },
    MlProd {
        n: usize,
        /// `V_i = sum_t r_{i,t}^2`.
        v: Vec<SumSq>,
        s_max: f64,
        /// `C_i = sum_t delta_{i,t} / Delta_{i,t}`.
        c: Vec<f64>,
        deltas: Vec<f64>,
        /// `x_{i,T+1}`.
        x_next: Vec<f64>,
    },
    Hedge {
        n: usize,
        /// `U_T = sum_t sum_i x_i (l_i - m_t)^2`.
        u: SumSq,
        /// `V'_T = sum_t sum_i x_i (barl_t - l_i)^2`.
        v_prime: SumSq,
        s_max: f64,
        /// `max |l_i - m_t|`.
        l_max: f64,
        pivot: MPivot,
    },
    Aogd {
        diameter: f64,
    },
    SoftBayes {
        n: usize,
    },
    SeqOpt {
        diameter: f64,
        inv_eta: f64,
        /// `sum_t eta_t ||g_t||^2`.
        eta_grad_sq: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub algorithm: Algorithm,
    pub q: f64,
    pub c: f64,
    /// `Delta_T`, including `Delta_0`.
    pub delta_total: f64,
    pub delta0: f64,
    pub rounds: usize,
    pub null_rounds: Vec<NullRound>,
    pub terms: CertificateTerms,
}

impl BoundCertificate {
    pub fn tau(&self) -> Option<&NullRound> {
        self.null_rounds.last()
    }
}

/// Comparator constants.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparatorInfo {
    /// `phi_1`: `B_R(x*, x_1)` for the off-by-one learners, `R(x*)` for FTRL.
    pub phi1: f64,
    /// `||x* - x_1||` in the regularizer's norm.
    pub distance: f64,
    /// `x*` itself, for the per-expert isoML-Prod bound.
    pub weights: Option<Vec<f64>>,
}

fn require_unit_c(cert: &BoundCertificate) -> Result<(), BoundError> {
    if cert.c == 1.0 {
        Ok(())
    } else {
        Err(BoundError::NullFactor(cert.c))
    }
}

fn weights(info: &ComparatorInfo, n: usize) -> Result<&[f64], BoundError> {
    let w = info.weights.as_deref().ok_or(BoundError::MissingWeights)?;
    if w.len() != n {
        return Err(BoundError::Dimension { expected: n, got: w.len() });
    }
    Ok(w)
}

/// Per-expert isoML-Prod bounds.
pub fn mlprod_expert_bounds(cert: &BoundCertificate) -> Vec<f64> {
    let CertificateTerms::MlProd { n, v, s_max, c, .. } = &cert.terms else {
        return Vec::new();
    };
    let q = cert.q;
    let c_max = c.iter().copied().fold(0.0, f64::max);
    let factor = 1.0 + ((*n as f64) * (1.0 + c_max)).ln() / q;
    v.iter().map(|vi| factor * (vi.sqrt_scaled(q) + s_max * (2.0 + 3.0 * q))).collect()
}

/// Right-hand side of the learner's regret theorem for comparator `info`.
///
/// With the default `q` these are the familiar forms, e.g. `2 sqrt(ln N
/// sum s_t^2) + S (2 ln N + sqrt(2 ln N) + 2)` for isoProd; other `q`
/// values keep the `(1 + ln N / q)` factor explicit.
pub fn bound_value(cert: &BoundCertificate, info: &ComparatorInfo) -> Result<f64, BoundError> {
    let q = cert.q;
    let sq = q.sqrt();
    Ok(match &cert.terms {
        CertificateTerms::DualNorm { ftrl, sum_sq, max_dual, diameter, .. } => {
            require_unit_c(cert)?;
            let main = (sq + info.phi1 / sq) * (sum_sq.sqrt() + max_dual / 2f64.sqrt());
            let null = match cert.tau() {
                None => 0.0,
                Some(nr) => {
                    let walk = (2.0 * q * nr.round as f64).sqrt();
                    let travel = if *ftrl { (2.0 * info.phi1).sqrt() + 2.0 * walk } else { info.distance + walk };
                    2.0 * diameter.min(travel) * nr.regret_term
                }
            };
            main + null
        }
        CertificateTerms::Prod { n, s_sq, s_max } => {
            require_unit_c(cert)?;
            let k = 1.0 + ln_n(*n) / q;
            k * (s_sq.sqrt_scaled(q) + s_max * ((q / 2.0).sqrt() + q)) + 2.0 * s_max
        }
        CertificateTerms::MlProd { n, .. } => {
            let w = weights(info, *n)?;
            mlprod_expert_bounds(cert).iter().zip(w).map(|(b, wi)| b * wi).sum()
        }
        CertificateTerms::Hedge { n, u, s_max, l_max, .. } => {
            let k = 1.0 + ln_n(*n) / q;
            k * (u.sqrt_scaled(q) + s_max + q * l_max / 3.0)
        }
        CertificateTerms::Aogd { diameter } => 0.5 * (1.0 + diameter * diameter / q) * cert.delta_total,
        CertificateTerms::SoftBayes { n } => (1.0 + ln_n(*n) / q) * cert.delta_total,
        CertificateTerms::SeqOpt { diameter, inv_eta, eta_grad_sq } => {
            0.5 * (diameter * diameter * inv_eta + eta_grad_sq)
        }
    })
}

/// The generic certificate, built from the exact regrets of the null
/// rounds (`null_regret(t)` returns `r_t` for the comparator):
///
/// * off-by-one learners: `(1 + phi_1/q) Delta_T - Delta_0 + sum_null max(0, r_t - delta_t)`;
/// * isoFTRL: `(1 + R(x*)/q) Delta_T + sum_null r_t`;
/// * isoML-Prod: `sum_i x*_i (1 + ln x_{i,T+1} / q) Delta_{i,T}`.
///
/// AOGD and the baseline have no null rounds and reuse [`bound_value`].
pub fn generic_bound(
    cert: &BoundCertificate,
    info: &ComparatorInfo,
    null_regret: &dyn Fn(usize) -> f64,
) -> Result<f64, BoundError> {
    let q = cert.q;
    Ok(match &cert.terms {
        CertificateTerms::DualNorm { ftrl: true, .. } => {
            let null: f64 = cert.null_rounds.iter().map(|nr| null_regret(nr.round)).sum();
            (1.0 + info.phi1 / q) * cert.delta_total + null
        }
        CertificateTerms::MlProd { n, deltas, x_next, .. } => {
            let w = weights(info, *n)?;
            (0..*n).map(|i| w[i] * (1.0 + x_next[i].ln() / q) * deltas[i]).sum()
        }
        CertificateTerms::Aogd { .. } | CertificateTerms::SeqOpt { .. } => bound_value(cert, info)?,
        _ => {
            let null: f64 =
                cert.null_rounds.iter().map(|nr| (null_regret(nr.round) - nr.delta).max(0.0)).sum();
            (1.0 + info.phi1 / q) * cert.delta_total - cert.delta0 + null
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prod_cert(s: f64, q: f64) -> BoundCertificate {
        let mut s_sq = SumSq::new();
        s_sq.add(s);
        BoundCertificate {
            algorithm: Algorithm::IsoProd,
            q,
            c: 1.0,
            delta_total: 0.0,
            delta0: 0.0,
            rounds: 1,
            null_rounds: vec![],
            terms: CertificateTerms::Prod { n: 2, s_sq, s_max: s },
        }
    }

    #[test]
    fn prod_single_round_formula() {
        let l2 = 2f64.ln();
        let b = bound_value(&prod_cert(1.0, l2), &ComparatorInfo::default()).unwrap();
        let expected = 2.0 * l2.sqrt() + 2.0 * l2 + (2.0 * l2).sqrt() + 2.0;
        assert!((b - expected).abs() < 1e-12, "{b} vs {expected}");
    }

    #[test]
    fn zero_certificate_gives_zero() {
        let b = bound_value(&prod_cert(0.0, 1.0), &ComparatorInfo::default()).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn c_other_than_one_is_rejected() {
        let mut cert = prod_cert(1.0, 1.0);
        cert.c = 2.0;
        assert_eq!(bound_value(&cert, &ComparatorInfo::default()), Err(BoundError::NullFactor(2.0)));
    }
}
