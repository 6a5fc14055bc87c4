//! Scalar inequalities behind the Prod and Hedge analyses, evaluated with
//! cancellation-free kernels so that grid checks near zero are meaningful.

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::numeric::{expm1_minus_x, u_minus_ln1p};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// `ln(1+x) >= x - x^2 / (2(1-|x|))` for `|x| < 1`.
    LogApprox,
    /// `e^x <= 1 + x + (x^2/2) / (1 - x/3)` for `x < 3`.
    ExpDenom,
    /// `(e^x - x - 1)(1 - x/3) <= x^2/2` for all `x`.
    ExpQuadratic,
}

impl Lemma {
    pub const ALL: [Lemma; 3] = [Lemma::LogApprox, Lemma::ExpDenom, Lemma::ExpQuadratic];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::LogApprox => "log_approx",
            Lemma::ExpDenom => "exp_denom",
            Lemma::ExpQuadratic => "exp_quadratic",
        }
    }

    /// Closed interval used for grid checks.
    pub fn grid_range(self) -> (f64, f64) {
        match self {
            Lemma::LogApprox => (-(1.0 - 1e-6), 1.0 - 1e-6),
            Lemma::ExpDenom => (-50.0, 3.0 - 1e-6),
            Lemma::ExpQuadratic => (-50.0, 50.0),
        }
    }

    fn in_domain(self, x: f64) -> bool {
        match self {
            Lemma::LogApprox => x.abs() < 1.0,
            Lemma::ExpDenom => x < 3.0,
            Lemma::ExpQuadratic => !x.is_nan(),
        }
    }
}

/// Whether the lemma's inequality holds at `x`.
pub fn scalar_lemma_check(which: Lemma, x: f64) -> Result<bool, GeometryError> {
    if !which.in_domain(x) {
        return Err(GeometryError::Domain(format!("{} is outside the domain of {}", x, which.name())));
    }
    let half_sq = 0.5 * x * x;
    Ok(match which {
        // ln(1+x) - x >= -x^2/(2(1-|x|))
        Lemma::LogApprox => u_minus_ln1p(x) <= half_sq / (1.0 - x.abs()),
        // e^x - 1 - x <= (x^2/2)/(1 - x/3)
        Lemma::ExpDenom => expm1_minus_x(x) <= half_sq / (1.0 - x / 3.0),
        Lemma::ExpQuadratic => expm1_minus_x(x) * (1.0 - x / 3.0) <= half_sq,
    })
}
