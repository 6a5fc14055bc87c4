//! Brute-force hindsight oracles used to check isotuning against the best
//! fixed value `M*_T = inf_x { x + sum_t g_t(x) }`.
//!
//! These are deliberately naive grid searches; they never run inside a
//! learner.

use super::MonotoneFn;

const GRID_POINTS: usize = 1_000;
const REFINEMENTS: usize = 5;

/// `M_T(x) = x + sum_t g_t(x)`.
pub fn hindsight_objective(gs: &[MonotoneFn], x: f64) -> f64 {
    x + gs.iter().map(|g| g.eval(x)).sum::<f64>()
}

/// Approximates `(M*_T, x*_T)` on a geometric grid refined five times around the
/// best point. Relative accuracy is about `1e-4` or better.
pub fn hindsight_bound(gs: &[MonotoneFn], lower: f64) -> (f64, f64) {
    if gs.is_empty() {
        let v = lower.max(0.0);
        return (v, v);
    }
    let lo = lower.max(1e-9) * (1.0 + 1e-9);
    let hi = 10.0 * gs.iter().map(|g| g.eval(lo)).sum::<f64>() + 1.0;
    let hi = if hi.is_finite() { hi } else { 1e300 };
    let (mut best_x, mut best_m) = (lo, hindsight_objective(gs, lo));
    let (mut a, mut b) = (lo, hi.max(lo * 2.0));
    for pass in 0..=REFINEMENTS {
        let grid = geometric_grid(a, b, GRID_POINTS);
        let mut local = (0, f64::INFINITY);
        for (k, &x) in grid.iter().enumerate() {
            let m = hindsight_objective(gs, x);
            if m < local.1 {
                local = (k, m);
            }
        }
        let k = local.0;
        if local.1 < best_m {
            best_m = local.1;
            best_x = grid[k];
        }
        if pass == REFINEMENTS {
            break;
        }
        // Zoom onto the neighbours of this pass's winner.
        a = grid[k.saturating_sub(1)];
        b = grid[(k + 1).min(grid.len() - 1)];
        if b <= a {
            break;
        }
    }
    (best_m, best_x)
}

fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n - 1 {
                b
            } else {
                (la + (lb - la) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// For `g_t = a_t / y`: the sequential hindsight-optimal rates
/// `x*_t = sqrt(sum_{s<=t} a_s)` and `M_T(x*_{1:T}) = x*_T + sum_t a_t / x*_t`.
/// Rounds with `x*_t = 0` carry `a_t = 0` and contribute nothing.
pub fn sequential_hindsight_value(a: &[f64]) -> f64 {
    let mut prefix = 0.0;
    let mut total = 0.0;
    for &at in a {
        prefix += at;
        let xt = prefix.sqrt();
        if at > 0.0 {
            total += at / xt;
        }
    }
    prefix.sqrt() + total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn reciprocal_examples() {
        let gs = vec![MonotoneFn::reciprocal(1.0); 4];
        let (m, x) = hindsight_bound(&gs, 0.0);
        assert!(rel(m, 4.0) < 1e-8, "m={m}");
        assert!(rel(x, 2.0) < 1e-4, "x={x}");

        let gs: Vec<_> = [1.0, 2.0, 3.0].iter().map(|&a| MonotoneFn::reciprocal(a)).collect();
        let (m, x) = hindsight_bound(&gs, 0.0);
        assert!(rel(m, 2.0 * 6f64.sqrt()) < 1e-8);
        assert!(rel(x, 6f64.sqrt()) < 1e-4);
    }

    #[test]
    fn empty_list() {
        assert_eq!(hindsight_bound(&[], 0.0), (0.0, 0.0));
        assert_eq!(hindsight_bound(&[], 2.5), (2.5, 2.5));
        assert_eq!(hindsight_bound(&[], -1.0), (0.0, 0.0));
    }

    #[test]
    fn sequential_value_constant_rounds() {
        // a = (1, 1): x*_1 = 1, x*_2 = sqrt 2 -> sqrt2 + 1 + 1/sqrt2
        let v = sequential_hindsight_value(&[1.0, 1.0]);
        assert!(rel(v, 2f64.sqrt() + 1.0 + 0.5f64.sqrt()) < 1e-15);
        assert_eq!(sequential_hindsight_value(&[]), 0.0);
    }
}
