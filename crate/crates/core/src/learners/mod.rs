//! The isotuned learners behind one step interface.
//!
//! Each learner predicts `x_t`, observes a loss (a gradient, an expert loss
//! vector or price relatives) and then performs, in order: the null-update
//! test, the core update to `x_{t'}`, isotuning accumulation and the online
//! correction to `x_{t+1}`. After any number of rounds a
//! [`BoundCertificate`] evaluates the matching regret bound.

mod aogd;
mod certificate;
mod ftrl;
mod hedge;
mod md;
mod mlprod;
mod prod;
mod seqopt;
mod softbayes;

pub use aogd::{psi, Aogd};
pub use certificate::{bound_value, generic_bound, mlprod_expert_bounds, BoundCertificate, BoundError, CertificateTerms, ComparatorInfo};
pub use ftrl::IsoFtrl;
pub use hedge::IsoHedge;
pub use md::IsoMd;
pub use mlprod::IsoMlProd;
pub use prod::IsoProd;
pub use seqopt::SeqOptGd;
pub use softbayes::IsoSoftBayes;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Domain, GeometryError, Regularizer};
use crate::iso::IsoError;
use crate::numeric::ln_n;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnerError {
    #[error("round {round}: non-finite input")]
    NonFinite { round: usize },
    #[error("input has dimension {got}, learner expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("round {round}: portfolio wealth <x, p> = {wealth} is not positive")]
    ZeroWealth { round: usize, wealth: f64 },
    #[error("round {round}: price relatives must be non-negative")]
    NegativePrice { round: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Iso(#[from] IsoError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    IsoGd,
    Aogd,
    IsoFtrl,
    IsoMd,
    IsoProd,
    IsoMlProd,
    IsoHedge,
    IsoSoftBayes,
    SeqOptGd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::IsoGd,
        Algorithm::Aogd,
        Algorithm::IsoFtrl,
        Algorithm::IsoMd,
        Algorithm::IsoProd,
        Algorithm::IsoMlProd,
        Algorithm::IsoHedge,
        Algorithm::IsoSoftBayes,
        Algorithm::SeqOptGd,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::IsoGd => "isogd",
            Algorithm::Aogd => "aogd",
            Algorithm::IsoFtrl => "isoftrl",
            Algorithm::IsoMd => "isomd",
            Algorithm::IsoProd => "isoprod",
            Algorithm::IsoMlProd => "isomlprod",
            Algorithm::IsoHedge => "isohedge",
            Algorithm::IsoSoftBayes => "isosoftbayes",
            Algorithm::SeqOptGd => "seqoptgd",
        }
    }

    /// Learners that only live on the probability simplex.
    pub fn is_expert(self) -> bool {
        matches!(self, Algorithm::IsoProd | Algorithm::IsoMlProd | Algorithm::IsoHedge | Algorithm::IsoSoftBayes)
    }

    /// Whether the learner consumes price relatives and suffers log loss.
    pub fn is_portfolio(self) -> bool {
        self == Algorithm::IsoSoftBayes
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace(['-', '_'], "");
        Algorithm::ALL.iter().copied().find(|a| a.tag() == norm).ok_or_else(|| {
            let tags: Vec<&str> = Algorithm::ALL.iter().map(|a| a.tag()).collect();
            format!("unknown algorithm `{s}`; valid tags: {}", tags.join(", "))
        })
    }
}

/// Translation pivot `m_t` for isoHedge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MPivot {
    #[default]
    BarLoss,
    Zero,
}

impl FromStr for MPivot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "barloss" | "bar_loss" => Ok(MPivot::BarLoss),
            "zero" => Ok(MPivot::Zero),
            _ => Err(format!("unknown pivot `{s}`; valid: barloss, zero")),
        }
    }
}

/// One round's record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// `x_t`, the point played this round.
    pub prediction: Vec<f64>,
    /// `delta_t` (the largest coordinate for isoML-Prod).
    pub delta: f64,
    pub was_null: bool,
    /// `<x_t, l_t>` for the expert learners.
    pub bar_loss: Option<f64>,
    /// The learner's own loss: `<x_t, l_t>`, or `-ln <x_t, p_t>` for Soft-Bayes.
    pub round_loss: f64,
    /// `Delta_t` after the round (the largest coordinate for isoML-Prod).
    pub delta_total: f64,
    /// `eta_t = q / Delta_t` after the round.
    pub eta: f64,
}

pub trait Learner: Send {
    fn algorithm(&self) -> Algorithm;
    fn dim(&self) -> usize;
    /// The anchor `x_1`.
    fn anchor(&self) -> &[f64];
    /// The point `x_t` to play next.
    fn prediction(&self) -> &[f64];
    fn step(&mut self, feedback: &[f64]) -> Result<StepOutcome, LearnerError>;
    fn certificate(&self) -> BoundCertificate;
    /// Comparator-dependent constants (`phi_1` and friends) for `x_star`.
    fn comparator_info(&self, x_star: &[f64]) -> Result<ComparatorInfo, LearnerError>;
    /// Smallest multiplicative weight factor on a normal round, for the
    /// Prod family.
    fn min_factor(&self) -> Option<f64> {
        None
    }
}

/// Everything needed to instantiate a learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub algorithm: Algorithm,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularizer: Option<Regularizer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<Vec<f64>>,
    #[serde(default)]
    pub m_pivot: MPivot,
    /// AOGD strong-convexity parameter per round.
    #[serde(default)]
    pub alpha: f64,
    /// Offset of the sequential-rate baseline.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_c() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    1.0
}

impl LearnerSpec {
    pub fn new(algorithm: Algorithm, dim: usize) -> Self {
        Self {
            algorithm,
            dim,
            q: None,
            c: 1.0,
            domain: None,
            regularizer: None,
            x1: None,
            m_pivot: MPivot::BarLoss,
            alpha: 0.0,
            epsilon: 1.0,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_x1(mut self, x1: Vec<f64>) -> Self {
        self.x1 = Some(x1);
        self
    }

    pub fn with_pivot(mut self, pivot: MPivot) -> Self {
        self.m_pivot = pivot;
        self
    }

    pub fn domain(&self) -> Domain {
        self.domain.clone().unwrap_or_else(|| match self.algorithm {
            Algorithm::IsoGd => Domain::AllOfSpace { dim: self.dim },
            Algorithm::Aogd | Algorithm::SeqOptGd => Domain::unit_box(self.dim),
            _ => Domain::Simplex { dim: self.dim },
        })
    }

    pub fn regularizer(&self) -> Regularizer {
        self.regularizer.clone().unwrap_or_else(|| match self.domain() {
            Domain::Simplex { .. } => Regularizer::Entropic,
            d => Regularizer::Quadratic { center: d.center() },
        })
    }

    /// `ln N` on the simplex, `D^2` for AOGD, 1 otherwise.
    pub fn q(&self) -> f64 {
        self.q.unwrap_or_else(|| match (self.algorithm, self.domain()) {
            (Algorithm::Aogd, d) => d.diameter(crate::geometry::Norm::L2).powi(2),
            (_, Domain::Simplex { dim }) => ln_n(dim),
            _ => 1.0,
        })
    }

    fn x1_or(&self, default: Vec<f64>) -> Result<Vec<f64>, LearnerError> {
        match &self.x1 {
            None => Ok(default),
            Some(x) => {
                if x.len() != self.dim {
                    return Err(LearnerError::Dimension { expected: self.dim, got: x.len() });
                }
                if !self.domain().contains(x, 1e-9) {
                    return Err(LearnerError::Config("x1 lies outside the domain".into()));
                }
                Ok(x.clone())
            }
        }
    }

    pub fn build(&self) -> Result<Box<dyn Learner>, LearnerError> {
        if self.dim == 0 {
            return Err(LearnerError::Config("dimension must be positive".into()));
        }
        let domain = self.domain();
        domain.validate()?;
        if domain.dim() != self.dim {
            return Err(LearnerError::Dimension { expected: self.dim, got: domain.dim() });
        }
        if self.algorithm.is_expert() && !matches!(domain, Domain::Simplex { .. }) {
            return Err(LearnerError::Config(format!("{} needs the simplex domain", self.algorithm)));
        }
        let q = self.q();
        let c = self.c;
        Ok(match self.algorithm {
            Algorithm::IsoGd | Algorithm::IsoMd => {
                let r = self.regularizer();
                let x1 = self.x1_or(domain.center())?;
                Box::new(IsoMd::new(self.algorithm, r, domain, q, c, x1)?)
            }
            Algorithm::IsoFtrl => Box::new(IsoFtrl::new(self.regularizer(), domain, q, c)?),
            Algorithm::Aogd => {
                let x1 = self.x1_or(domain.center())?;
                Box::new(Aogd::new(domain, q, x1)?.with_alpha(self.alpha)?)
            }
            Algorithm::SeqOptGd => {
                let x1 = self.x1_or(domain.center())?;
                Box::new(SeqOptGd::new(domain, q, self.epsilon, x1)?)
            }
            Algorithm::IsoProd => Box::new(IsoProd::new(self.dim, q, c)?),
            Algorithm::IsoMlProd => {
                if c != 1.0 {
                    return Err(LearnerError::Config("isomlprod uses a fixed null rule; c must be 1".into()));
                }
                Box::new(IsoMlProd::new(self.dim, q)?)
            }
            Algorithm::IsoHedge => Box::new(IsoHedge::new(self.dim, q)?.with_pivot(self.m_pivot)),
            Algorithm::IsoSoftBayes => Box::new(IsoSoftBayes::new(self.dim, q)?),
        })
    }
}

pub(crate) fn check_input(v: &[f64], dim: usize, round: usize) -> Result<(), LearnerError> {
    if v.len() != dim {
        return Err(LearnerError::Dimension { expected: dim, got: v.len() });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(LearnerError::NonFinite { round });
    }
    Ok(())
}

pub(crate) fn check_q(q: f64) -> Result<(), LearnerError> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(LearnerError::Config(format!("q must be positive and finite, got {q}")))
    }
}

pub(crate) fn check_experts(n: usize) -> Result<(), LearnerError> {
    if n < 2 {
        Err(LearnerError::Config(format!("need at least 2 experts, got {n}")))
    } else {
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rescales a non-negative vector to sum to one.
pub(crate) fn normalize(x: &mut [f64]) {
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
}

/// On-simplex comparator check shared by the expert learners.
pub(crate) fn check_simplex_point(x: &[f64], dim: usize) -> Result<(), LearnerError> {
    if x.len() != dim {
        return Err(LearnerError::Dimension { expected: dim, got: x.len() });
    }
    if !(Domain::Simplex { dim }).contains(x, 1e-9) {
        return Err(LearnerError::Config("comparator lies outside the simplex".into()));
    }
    Ok(())
}
