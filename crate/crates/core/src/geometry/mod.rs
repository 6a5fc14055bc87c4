//! Norms, regularizers, Bregman divergences, projections and the
//! closed-form FTRL / mirror-descent steps.

pub mod lemmas;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::SumSq;

pub use lemmas::{scalar_lemma_check, Lemma};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infinite learning rate with non-zero cumulative loss")]
    InfiniteRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn dual(self) -> Norm {
        match self {
            Norm::L1 => Norm::Linf,
            Norm::L2 => Norm::L2,
            Norm::Linf => Norm::L1,
        }
    }

    pub fn value(self, v: &[f64]) -> f64 {
        match self {
            Norm::L1 => v.iter().map(|x| x.abs()).sum(),
            Norm::L2 => {
                let mut s = SumSq::new();
                v.iter().for_each(|&x| s.add(x));
                s.sqrt()
            }
            Norm::Linf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn dual_value(self, v: &[f64]) -> f64 {
        self.dual().value(v)
    }

    /// Distance `||x - y||`.
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.value(&d)
    }
}

pub fn norm_value(n: Norm, v: &[f64]) -> f64 {
    n.value(v)
}

pub fn dual_norm_value(n: Norm, v: &[f64]) -> f64 {
    n.dual_value(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regularizer {
    /// `R(x) = 1/2 ||x - center||_2^2`
    Quadratic { center: Vec<f64> },
    /// `R(x) = sum_i x_i ln(N x_i)` on the simplex.
    Entropic,
}

impl Regularizer {
    pub fn quadratic(dim: usize) -> Self {
        Regularizer::Quadratic { center: vec![0.0; dim] }
    }

    /// The norm this regularizer is 1-strongly convex in.
    pub fn norm(&self) -> Norm {
        match self {
            Regularizer::Quadratic { .. } => Norm::L2,
            Regularizer::Entropic => Norm::L1,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Regularizer::Quadratic { center } => 0.5 * sq_dist(x, center),
            Regularizer::Entropic => {
                let n = x.len() as f64;
                x.iter().filter(|&&xi| xi > 0.0).map(|&xi| xi * (n * xi).ln()).sum::<f64>().max(0.0)
            }
        }
    }

    /// The point minimizing `R` over `d`.
    pub fn argmin(&self, d: &Domain) -> Result<Vec<f64>, GeometryError> {
        match (self, d) {
            (Regularizer::Quadratic { center }, _) if !matches!(d, Domain::Simplex { .. }) => {
                check_dim(d.dim(), center.len())?;
                d.project(center)
            }
            (Regularizer::Entropic, Domain::Simplex { dim }) => Ok(vec![1.0 / *dim as f64; *dim]),
            _ => Err(unsupported(self, d)),
        }
    }
}

pub fn bregman(r: &Regularizer, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
    check_dim(x.len(), y.len())?;
    match r {
        Regularizer::Quadratic { .. } => Ok(0.5 * sq_dist(x, y)),
        Regularizer::Entropic => {
            let mut kl = 0.0;
            for (&xi, &yi) in x.iter().zip(y) {
                if xi > 0.0 {
                    if yi <= 0.0 {
                        return Err(GeometryError::Domain(format!(
                            "relative entropy undefined: x_i = {xi} but y_i = {yi}"
                        )));
                    }
                    kl += xi * (xi / yi).ln();
                }
            }
            Ok(kl.max(0.0))
        }
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    let mut s = SumSq::new();
    x.iter().zip(y).for_each(|(a, b)| s.add(a - b));
    s.value()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Domain {
    AllOfSpace { dim: usize },
    /// Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Simplex { dim: usize },
}

impl Domain {
    pub fn unit_box(dim: usize) -> Self {
        Domain::Box { lo: vec![-1.0; dim], hi: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::AllOfSpace { dim } | Domain::Simplex { dim } => *dim,
            Domain::Ball { center, .. } => center.len(),
            Domain::Box { lo, .. } => lo.len(),
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            Domain::AllOfSpace { dim } | Domain::Simplex { dim } if *dim == 0 => {
                Err(GeometryError::Domain("dimension must be positive".into()))
            }
            Domain::Ball { center, radius } => {
                if center.is_empty() || !(*radius >= 0.0 && radius.is_finite()) {
                    Err(GeometryError::Domain(format!("invalid ball radius {radius}")))
                } else {
                    Ok(())
                }
            }
            Domain::Box { lo, hi } => {
                check_dim(lo.len(), hi.len())?;
                if lo.is_empty() || lo.iter().zip(hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
                    Err(GeometryError::Domain("box needs finite lo <= hi".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Diameter measured in `norm`; infinite for all-of-space.
    pub fn diameter(&self, norm: Norm) -> f64 {
        match self {
            Domain::AllOfSpace { .. } => f64::INFINITY,
            Domain::Ball { center, radius } => match norm {
                Norm::L2 | Norm::Linf => 2.0 * radius,
                Norm::L1 => 2.0 * radius * (center.len() as f64).sqrt(),
            },
            Domain::Box { lo, hi } => {
                let w: Vec<f64> = hi.iter().zip(lo).map(|(h, l)| h - l).collect();
                norm.value(&w)
            }
            Domain::Simplex { .. } => match norm {
                Norm::L1 => 2.0,
                Norm::L2 => 2f64.sqrt(),
                Norm::Linf => 1.0,
            },
        }
    }

    /// The default anchor `x_1`: center of ball or box, uniform on the
    /// simplex, origin otherwise.
    pub fn center(&self) -> Vec<f64> {
        match self {
            Domain::AllOfSpace { dim } => vec![0.0; *dim],
            Domain::Ball { center, .. } => center.clone(),
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect(),
            Domain::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Domain::AllOfSpace { .. } => x.iter().all(|v| v.is_finite()),
            Domain::Ball { center, radius } => Norm::L2.distance(x, center) <= radius * (1.0 + tol) + tol,
            Domain::Box { lo, hi } => {
                x.iter().zip(lo.iter().zip(hi)).all(|(&v, (&l, &h))| v >= l - tol && v <= h + tol)
            }
            Domain::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            }
        }
    }

    /// Euclidean projection onto a ball or box; identity on all-of-space.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        check_dim(self.dim(), x.len())?;
        match self {
            Domain::AllOfSpace { .. } => Ok(x.to_vec()),
            Domain::Ball { center, radius } => {
                let dist = Norm::L2.distance(x, center);
                if dist <= *radius {
                    Ok(x.to_vec())
                } else {
                    let k = radius / dist;
                    Ok(x.iter().zip(center).map(|(&v, &c)| c + (v - c) * k).collect())
                }
            }
            Domain::Box { lo, hi } => Ok(x.iter().zip(lo.iter().zip(hi)).map(|(&v, (&l, &h))| v.clamp(l, h)).collect()),
            Domain::Simplex { .. } => Err(GeometryError::Unsupported(
                "Euclidean projection onto the simplex".into(),
            )),
        }
    }
}

pub fn project(d: &Domain, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
    d.project(x)
}

fn check_dim(expected: usize, got: usize) -> Result<(), GeometryError> {
    if expected == got {
        Ok(())
    } else {
        Err(GeometryError::Dimension { expected, got })
    }
}

fn unsupported(r: &Regularizer, d: &Domain) -> GeometryError {
    let rn = match r {
        Regularizer::Quadratic { .. } => "quadratic",
        Regularizer::Entropic => "entropic",
    };
    let dn = match d {
        Domain::AllOfSpace { .. } => "all-of-space",
        Domain::Ball { .. } => "ball",
        Domain::Box { .. } => "box",
        Domain::Simplex { .. } => "simplex",
    };
    GeometryError::Unsupported(format!("{rn} regularizer on {dn}"))
}

/// Checks that `(r, d)` is one of the pairs with a closed-form step.
pub fn check_pair(r: &Regularizer, d: &Domain) -> Result<(), GeometryError> {
    match (r, d) {
        (Regularizer::Quadratic { center }, Domain::AllOfSpace { .. } | Domain::Ball { .. } | Domain::Box { .. }) => {
            check_dim(d.dim(), center.len())
        }
        (Regularizer::Entropic, Domain::Simplex { .. }) => Ok(()),
        _ => Err(unsupported(r, d)),
    }
}

/// `argmin_{x in d} <L, x> + inv_eta * R(x)`.
pub fn ftrl_argmin(r: &Regularizer, d: &Domain, l: &[f64], inv_eta: f64) -> Result<Vec<f64>, GeometryError> {
    check_pair(r, d)?;
    check_dim(d.dim(), l.len())?;
    if l.iter().all(|&v| v == 0.0) {
        return r.argmin(d);
    }
    if inv_eta == 0.0 {
        return Err(GeometryError::InfiniteRate);
    }
    match r {
        Regularizer::Quadratic { center } => {
            let y: Vec<f64> = center.iter().zip(l).map(|(&c, &g)| c - g / inv_eta).collect();
            d.project(&y)
        }
        Regularizer::Entropic => {
            let logits: Vec<f64> = l.iter().map(|&g| -g / inv_eta).collect();
            Ok(weighted_softmax(None, &logits))
        }
    }
}

/// `argmin_{x in d} <x, loss> + inv_eta * B_R(x, x_prev)`.
pub fn md_argmin(
    r: &Regularizer,
    d: &Domain,
    x: &[f64],
    loss: &[f64],
    inv_eta: f64,
) -> Result<Vec<f64>, GeometryError> {
    check_pair(r, d)?;
    check_dim(d.dim(), x.len())?;
    check_dim(d.dim(), loss.len())?;
    if !(inv_eta > 0.0) {
        return Err(GeometryError::InfiniteRate);
    }
    if loss.iter().all(|&v| v == 0.0) {
        return Ok(x.to_vec());
    }
    match r {
        Regularizer::Quadratic { .. } => {
            let y: Vec<f64> = x.iter().zip(loss).map(|(&v, &g)| v - g / inv_eta).collect();
            d.project(&y)
        }
        Regularizer::Entropic => {
            let logits: Vec<f64> = loss.iter().map(|&g| -g / inv_eta).collect();
            Ok(weighted_softmax(Some(x), &logits))
        }
    }
}

/// `w_i exp(a_i) / sum_j w_j exp(a_j)` with the maximum logit (over the
/// support of `w`) subtracted first.
pub fn weighted_softmax(weights: Option<&[f64]>, logits: &[f64]) -> Vec<f64> {
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let max = (0..logits.len())
        .filter(|&i| w(i) > 0.0)
        .map(|i| logits[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = (0..logits.len())
        .map(|i| if w(i) > 0.0 { w(i) * (logits[i] - max).exp() } else { 0.0 })
        .collect();
    let z: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= z);
    out
}
