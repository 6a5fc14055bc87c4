//! The iso operator and isotuning accumulation.
//!
//! An isotuning sequence solves `X_t = X_{t-1} + g_t(X_t)` for non-increasing
//! `g_t`; learners use it with `X_t = Delta_t` and `g_t = delta_hat_t`. This
//! module also hosts the online correction and the null-update test, which
//! every off-by-one learner shares.

pub mod oracle;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BISECTION_MAX_ITERS: usize = 200;
const BISECTION_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsoError {
    #[error("parameter `{name}` must be non-negative and finite, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("no solution: lower bound {lower} exceeds base + g(lower) = {bound}")]
    Existence { lower: f64, bound: f64 },
    #[error("increment must be non-negative and finite, got {0}")]
    NegativeDelta(f64),
    #[error("slope must be positive and finite, got {0}")]
    InvalidSlope(f64),
    #[error("q must be positive and finite, got {0}")]
    InvalidQ(f64),
    #[error("function is unbounded at the bracket start, bisection impossible")]
    UnboundedBracket,
}

/// The supported families of non-increasing, non-negative functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    /// `y -> a / y`
    Reciprocal { a: f64 },
    /// `y -> a / (y + b)`
    ScaledReciprocal { a: f64, b: f64 },
    /// `y -> exp(-y)`
    ExpDecay,
    /// `y -> k`
    Constant { k: f64 },
}

/// A non-increasing function together with its lower bound `g^low`: it is
/// only evaluated on `(lower_bound, inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFn {
    pub family: Family,
    pub lower_bound: f64,
}

impl MonotoneFn {
    pub fn reciprocal(a: f64) -> Self {
        Self { family: Family::Reciprocal { a }, lower_bound: 0.0 }
    }

    pub fn scaled_reciprocal(a: f64, b: f64) -> Self {
        Self { family: Family::ScaledReciprocal { a, b }, lower_bound: 0.0 }
    }

    pub fn exp_decay() -> Self {
        Self { family: Family::ExpDecay, lower_bound: 0.0 }
    }

    pub fn constant(k: f64) -> Self {
        Self { family: Family::Constant { k }, lower_bound: 0.0 }
    }

    pub fn with_lower(mut self, lower: f64) -> Self {
        self.lower_bound = lower;
        self
    }

    /// Checks parameter signs and that the function is non-negative on its
    /// domain.
    pub fn validate(&self) -> Result<(), IsoError> {
        let check = |name: &'static str, value: f64| {
            if value >= 0.0 && value.is_finite() {
                Ok(())
            } else {
                Err(IsoError::NegativeParameter { name, value })
            }
        };
        match self.family {
            Family::Reciprocal { a } => {
                check("a", a)?;
                check("lower_bound", self.lower_bound)
            }
            Family::ScaledReciprocal { a, b } => {
                check("a", a)?;
                check("b", b)?;
                check("lower_bound + b", self.lower_bound + b)
            }
            Family::Constant { k } => check("k", k),
            Family::ExpDecay => {
                if self.lower_bound.is_nan() {
                    Err(IsoError::NegativeParameter { name: "lower_bound", value: f64::NAN })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `g(y)`; at a pole the right limit (`+inf`, or `0` for a zero
    /// numerator) is returned.
    pub fn eval(&self, y: f64) -> f64 {
        match self.family {
            Family::Reciprocal { a } => pole_div(a, y),
            Family::ScaledReciprocal { a, b } => pole_div(a, y + b),
            Family::ExpDecay => (-y).exp(),
            Family::Constant { k } => k,
        }
    }

    /// True when `g` vanishes on its whole domain.
    pub fn is_zero(&self) -> bool {
        match self.family {
            Family::Reciprocal { a } | Family::ScaledReciprocal { a, .. } => a == 0.0,
            Family::Constant { k } => k == 0.0,
            Family::ExpDecay => false,
        }
    }
}

fn pole_div(a: f64, d: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if d <= 0.0 {
        f64::INFINITY
    } else {
        a / d
    }
}

/// Solves `X = base + g(X)` for `X > lower`.
///
/// Reciprocal, scaled-reciprocal and constant families are solved in closed
/// form; exponential decay by bracketed bisection.
pub fn iso_solve(g: &MonotoneFn, base: f64, lower: f64) -> Result<f64, IsoError> {
    g.validate()?;
    if !base.is_finite() {
        return Err(IsoError::NegativeParameter { name: "base", value: base });
    }
    let bound = base + g.eval(lower);
    if lower > bound {
        return Err(IsoError::Existence { lower, bound });
    }
    match g.family {
        Family::Constant { k } => Ok(base + k),
        Family::Reciprocal { a } => Ok(reciprocal_root(a, base, 0.0)),
        Family::ScaledReciprocal { a, b } => Ok(reciprocal_root(a, base, b)),
        Family::ExpDecay => bisect_fixed_point(g, base, lower),
    }
}

/// Root of `X = base + a / (X + b)` on the branch `X + b > 0`.
fn reciprocal_root(a: f64, base: f64, b: f64) -> f64 {
    if a == 0.0 {
        return base;
    }
    if b == 0.0 && base >= 0.0 {
        // X^2 - base X - a = 0
        return (base + base.hypot(2.0 * a.sqrt())) / 2.0;
    }
    // With D = X - base: D^2 + (base + b) D - a = 0, D > 0. Pick the form
    // that adds numbers of equal sign.
    let s = base + b;
    let disc = s.hypot(2.0 * a.sqrt());
    let d = if s >= 0.0 { 2.0 * a / (s + disc) } else { (disc - s) / 2.0 };
    base + d
}

fn bisect_fixed_point(g: &MonotoneFn, base: f64, lower: f64) -> Result<f64, IsoError> {
    let mut lo = lower.max(base);
    let mut hi = base + g.eval(lo);
    if !hi.is_finite() {
        return Err(IsoError::UnboundedBracket);
    }
    // h(y) = y - base - g(y) is increasing, h(lo) <= 0 <= h(hi).
    let h = |y: f64| y - base - g.eval(y);
    if h(lo) >= 0.0 {
        return Ok(lo);
    }
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 0.25 * BISECTION_REL_TOL * hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The value `c * s` at the crossing of `y -> c y` and `g` over `y > 0`.
///
/// Returns `0` when `g` vanishes identically: the crossing is then the
/// boundary point `s = 0`.
pub fn iso_point(g: &MonotoneFn, slope: f64) -> Result<f64, IsoError> {
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(IsoError::InvalidSlope(slope));
    }
    g.validate()?;
    if g.is_zero() {
        return Ok(0.0);
    }
    let c = slope;
    Ok(match g.family {
        Family::Reciprocal { a } => (c * a).sqrt(),
        Family::Constant { k } => k,
        Family::ScaledReciprocal { a, b } => {
            // c s^2 + c b s - a = 0
            let cb = c * b;
            let s = 2.0 * a / (cb + cb.hypot(2.0 * (a * c).sqrt()));
            c * s
        }
        Family::ExpDecay => {
            // c s = exp(-s) has its root in (0, 1/c].
            let (mut lo, mut hi) = (0.0f64, 1.0 / c);
            for _ in 0..BISECTION_MAX_ITERS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if c * mid < (-mid).exp() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            c * 0.5 * (lo + hi)
        }
    })
}

/// `iso(r^2 / y, c y) = sqrt(c) r`, computed from `r` so nothing is squared.
pub fn reciprocal_iso_point(root: f64, c: f64) -> f64 {
    c.sqrt() * root
}

/// Null test for `g_hat(y) = r^2 / y` in division-free form:
/// `g_hat(Delta) > c Delta  <=>  sqrt(c) r > c Delta`.
pub fn reciprocal_triggers(root: f64, c: f64, delta_prev: f64) -> bool {
    reciprocal_iso_point(root, c) > c * delta_prev
}

/// One entry of the null-round ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullRound {
    pub round: usize,
    pub delta: f64,
    /// Learner-specific quantity bounding the round's regret, such as the
    /// dual norm of the loss.
    pub regret_term: f64,
}

/// The accumulator `Delta_t = Delta_0 + sum_s delta_s`, with `eta_t = q / Delta_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotuningState {
    pub q: f64,
    pub delta: f64,
    pub delta0: f64,
    pub t: usize,
    pub max_delta: f64,
    pub null_rounds: Vec<NullRound>,
    pub c: f64,
}

impl IsotuningState {
    pub fn new(q: f64) -> Result<Self, IsoError> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(IsoError::InvalidQ(q));
        }
        Ok(Self { q, delta: 0.0, delta0: 0.0, t: 0, max_delta: 0.0, null_rounds: Vec::new(), c: 1.0 })
    }

    pub fn with_delta0(mut self, delta0: f64) -> Result<Self, IsoError> {
        if !(delta0 >= 0.0 && delta0.is_finite()) {
            return Err(IsoError::NegativeParameter { name: "delta0", value: delta0 });
        }
        self.delta += delta0 - self.delta0;
        self.delta0 = delta0;
        Ok(self)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self, IsoError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(IsoError::InvalidSlope(c));
        }
        self.c = c;
        Ok(self)
    }

    /// `q / Delta`, or `+inf` while `Delta = 0`.
    pub fn eta(&self) -> f64 {
        if self.delta == 0.0 {
            f64::INFINITY
        } else {
            self.q / self.delta
        }
    }

    /// `Delta / q`.
    pub fn inv_eta(&self) -> f64 {
        self.delta / self.q
    }

    /// Adds `delta`, advances the round counter and records null rounds.
    pub fn step(&mut self, delta: f64, was_null: bool, regret_term: f64) -> Result<(), IsoError> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(IsoError::NegativeDelta(delta));
        }
        self.delta += delta;
        self.t += 1;
        self.max_delta = self.max_delta.max(delta);
        if was_null {
            self.null_rounds.push(NullRound { round: self.t, delta, regret_term });
        }
        Ok(())
    }

    /// `tau = max T_null`, the last null round.
    pub fn tau(&self) -> Option<&NullRound> {
        self.null_rounds.last()
    }
}

/// Take-and-return form of [`IsotuningState::step`].
pub fn isotune_step(
    mut state: IsotuningState,
    delta: f64,
    was_null: bool,
    regret_term: f64,
) -> Result<IsotuningState, IsoError> {
    state.step(delta, was_null, regret_term)?;
    Ok(state)
}

/// `ghat(Delta_{t-1}) > c Delta_{t-1}`, evaluated without division for the
/// reciprocal family. A non-zero `ghat` always triggers at `Delta = 0`.
pub fn null_trigger(g_hat: &MonotoneFn, state: &IsotuningState) -> bool {
    if g_hat.is_zero() {
        return false;
    }
    match g_hat.family {
        Family::Reciprocal { a } => reciprocal_triggers(a.sqrt(), state.c, state.delta),
        _ => state.delta == 0.0 || g_hat.eval(state.delta) > state.c * state.delta,
    }
}

/// Online correction `x <- x' Delta_{t-1}/Delta_t + (delta_t/Delta_t) x_1`.
///
/// With `Delta_{t-1} = 0` the result is exactly `x_1`; when both are zero
/// nothing moves.
pub fn online_correction(x: &mut [f64], x1: &[f64], delta_prev: f64, delta_t: f64) {
    debug_assert_eq!(x.len(), x1.len());
    let now = delta_prev + delta_t;
    if now == 0.0 {
        return;
    }
    if delta_prev == 0.0 {
        x.copy_from_slice(x1);
        return;
    }
    let keep = delta_prev / now;
    let pull = delta_t / now;
    for (xi, &ai) in x.iter_mut().zip(x1) {
        *xi = *xi * keep + pull * ai;
    }
}

/// `(sqrt(2 sum a) - max a, sqrt(2 sum a))`, the two-sided bound on the
/// isotuning sequence of `a_t / y`.
pub fn sqrt_bound(a: &[f64]) -> (f64, f64) {
    let sum: f64 = a.iter().sum();
    let max = a.iter().copied().fold(0.0, f64::max);
    let upper = (2.0 * sum).sqrt();
    (upper - max, upper)
}

/// `sqrt(q * prefix_sum)`; zero means an infinite learning rate.
pub fn seqopt_rate(a_prefix_sum: f64, q: f64) -> f64 {
    (q * a_prefix_sum).sqrt()
}

/// Builds `X_1..X_T` of the isotuning sequence for `gs`, starting at 0.
pub fn isotuning_sequence(gs: &[MonotoneFn]) -> Result<Vec<f64>, IsoError> {
    let mut x = 0.0;
    let mut out = Vec::with_capacity(gs.len());
    for g in gs {
        x = iso_solve(g, x, g.lower_bound)?;
        out.push(x);
    }
    Ok(out)
}
