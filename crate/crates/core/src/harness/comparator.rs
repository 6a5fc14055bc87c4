//! Best fixed points in hindsight and comparator sampling.

use super::rng::StreamRng;
use super::HarnessError;
use crate::geometry::{Domain, Norm};

/// A comparator with its cumulative loss. `gap` bounds how far `loss` may
/// sit above the true optimum (zero for the closed forms).
#[derive(Debug, Clone, PartialEq)]
pub struct BestFixed {
    pub x: Vec<f64>,
    pub loss: f64,
    pub gap: f64,
}

/// `sum_t l_t`, coordinate-wise.
pub fn cumulative(losses: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut total = vec![0.0; n];
    for l in losses {
        total.iter_mut().zip(l).for_each(|(s, v)| *s += v);
    }
    total
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizer of `<x, L>` over `domain` for the cumulative loss `l_sum`.
pub fn linear_minimizer(l_sum: &[f64], domain: &Domain) -> Result<Vec<f64>, HarnessError> {
    let n = domain.dim();
    if l_sum.len() != n {
        return Err(HarnessError::Comparator(format!("loss has {} coordinates, domain {n}", l_sum.len())));
    }
    Ok(match domain {
        Domain::Simplex { .. } => {
            let mut best = 0;
            for i in 1..n {
                if l_sum[i] < l_sum[best] {
                    best = i;
                }
            }
            let mut x = vec![0.0; n];
            x[best] = 1.0;
            x
        }
        Domain::Ball { center, radius } => {
            let norm = Norm::L2.value(l_sum);
            if norm == 0.0 {
                center.clone()
            } else {
                center.iter().zip(l_sum).map(|(c, l)| c - radius * (l / norm)).collect()
            }
        }
        Domain::Box { lo, hi } => {
            l_sum.iter().zip(lo.iter().zip(hi)).map(|(l, (a, b))| if *l > 0.0 { *a } else { *b }).collect()
        }
        Domain::AllOfSpace { .. } => {
            if l_sum.iter().any(|v| *v != 0.0) {
                return Err(HarnessError::Comparator("linear losses are unbounded below on all of space".into()));
            }
            vec![0.0; n]
        }
    })
}

/// `best_fixed` for linear losses.
pub fn best_fixed(losses: &[Vec<f64>], domain: &Domain) -> Result<BestFixed, HarnessError> {
    let l_sum = cumulative(losses, domain.dim());
    let x = linear_minimizer(&l_sum, domain)?;
    let loss = losses.iter().map(|l| dot(&x, l)).sum();
    Ok(BestFixed { x, loss, gap: 0.0 })
}

/// `-sum_t ln <x, p_t>`, infinite when some round has zero wealth.
pub fn log_loss(x: &[f64], prices: &[Vec<f64>]) -> f64 {
    prices.iter().map(|p| -dot(x, p).ln()).sum()
}

const CRP_MAX_ITER: usize = 20_000;
/// Stop once the certified log-wealth gap is below this.
pub const CRP_ACCURACY: f64 = 1e-4;

/// Best constant-rebalanced portfolio by the multiplicative fixed-point
/// iteration `x_i <- x_i * (1/T) sum_t p_i / <x, p_t>`.
///
/// Concavity of the log-wealth `f` gives `max f <= f(x) + max_i grad_i f(x) - T`,
/// which is reported as `gap`.
pub fn best_portfolio(prices: &[Vec<f64>], n: usize) -> Result<BestFixed, HarnessError> {
    if prices.is_empty() {
        return Ok(BestFixed { x: vec![1.0 / n as f64; n], loss: 0.0, gap: 0.0 });
    }
    let t = prices.len() as f64;
    let mut x = vec![1.0 / n as f64; n];
    let mut grad = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for _ in 0..CRP_MAX_ITER {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for p in prices {
            let w = dot(&x, p);
            if !(w > 0.0) {
                return Err(HarnessError::Comparator("a round has zero wealth for every portfolio".into()));
            }
            grad.iter_mut().zip(p).for_each(|(g, pi)| *g += pi / w);
        }
        gap = (grad.iter().copied().fold(f64::NEG_INFINITY, f64::max) - t).max(0.0);
        if gap <= CRP_ACCURACY {
            break;
        }
        let mut s = 0.0;
        for (xi, g) in x.iter_mut().zip(&grad) {
            *xi *= g / t;
            s += *xi;
        }
        x.iter_mut().for_each(|v| *v /= s);
    }
    let loss = log_loss(&x, prices);
    Ok(BestFixed { x, loss, gap })
}

/// Minimizes a convex scalar function on `[lo, hi]` to width `tol`.
pub fn ternary_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
        if m1 == lo && m2 == hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// A random feasible point; all-of-space draws from the ball of radius
/// `spread` around the origin.
pub fn sample_point(domain: &Domain, rng: &mut StreamRng, spread: f64) -> Vec<f64> {
    let n = domain.dim();
    let in_ball = |rng: &mut StreamRng, center: &[f64], r: f64| -> Vec<f64> {
        let g: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
        let norm = Norm::L2.value(&g).max(f64::MIN_POSITIVE);
        let radius = r * rng.uniform().powf(1.0 / n as f64);
        center.iter().zip(&g).map(|(c, v)| c + radius * v / norm).collect()
    };
    match domain {
        Domain::Simplex { .. } => rng.simplex_point(n),
        Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| rng.uniform_in(*a, *b)).collect(),
        Domain::Ball { center, radius } => in_ball(rng, center, *radius),
        Domain::AllOfSpace { .. } => in_ball(rng, &vec![0.0; n], spread),
    }
}

/// Corners or extreme points of `domain` worth testing against: every
/// vertex of the simplex, the box corners nearest and farthest along the
/// cumulative loss (and all of them for `N <= 4`), and the two ball
/// points on the loss axis.
pub fn extreme_points(domain: &Domain, l_sum: &[f64]) -> Vec<Vec<f64>> {
    let n = domain.dim();
    match domain {
        Domain::Simplex { .. } => (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect(),
        Domain::Box { lo, hi } => {
            if n <= 4 {
                (0..1usize << n)
                    .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }).collect())
                    .collect()
            } else {
                let best: Vec<f64> = (0..n).map(|i| if l_sum[i] > 0.0 { lo[i] } else { hi[i] }).collect();
                let worst: Vec<f64> = (0..n).map(|i| if l_sum[i] > 0.0 { hi[i] } else { lo[i] }).collect();
                vec![best, worst]
            }
        }
        Domain::Ball { center, radius } => {
            let norm = Norm::L2.value(l_sum);
            let dir: Vec<f64> = if norm > 0.0 {
                l_sum.iter().map(|v| v / norm).collect()
            } else {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            };
            vec![
                center.iter().zip(&dir).map(|(c, d)| c - radius * d).collect(),
                center.iter().zip(&dir).map(|(c, d)| c + radius * d).collect(),
            ]
        }
        Domain::AllOfSpace { .. } => {
            let norm = Norm::L2.value(l_sum);
            if norm == 0.0 {
                return vec![vec![0.0; n]];
            }
            [1.0, 10.0, 100.0].iter().map(|r| l_sum.iter().map(|v| -r * v / norm).collect()).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simplex_best_corner() {
        let b = best_fixed(&[vec![1.0, 0.0], vec![1.0, 0.0]], &Domain::Simplex { dim: 2 }).unwrap();
        assert_eq!(b.x, vec![0.0, 1.0]);
        assert_eq!(b.loss, 0.0);
    }

    #[test]
    fn ball_best_point() {
        let ball = Domain::Ball { center: vec![0.0, 0.0], radius: 1.0 };
        let b = best_fixed(&[vec![1.0, 1.0], vec![2.0, 3.0]], &ball).unwrap();
        assert_abs_diff_eq!(b.x[0], -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(b.x[1], -0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(b.loss, -5.0, epsilon = 1e-12);
    }

    #[test]
    fn alternating_prices_give_the_even_split() {
        let prices: Vec<Vec<f64>> = (0..100).map(|t| if t % 2 == 0 { vec![2.0, 0.0] } else { vec![0.0, 2.0] }).collect();
        let b = best_portfolio(&prices, 2).unwrap();
        assert_abs_diff_eq!(b.x[0], 0.5, epsilon = 1e-4);
        assert!(b.gap <= CRP_ACCURACY);
    }

    #[test]
    fn best_fixed_beats_random_points() {
        let mut rng = StreamRng::new(17);
        let losses: Vec<Vec<f64>> = (0..50).map(|_| (0..3).map(|_| rng.uniform_in(-1.0, 1.0)).collect()).collect();
        for d in [Domain::Simplex { dim: 3 }, Domain::unit_box(3), Domain::Ball { center: vec![0.5; 3], radius: 2.0 }] {
            let b = best_fixed(&losses, &d).unwrap();
            for _ in 0..1000 {
                let x = sample_point(&d, &mut rng, 1.0);
                let l: f64 = losses.iter().map(|v| dot(&x, v)).sum();
                assert!(b.loss <= l + 1e-12);
            }
        }
        let prices: Vec<Vec<f64>> = (0..50).map(|_| (0..3).map(|_| rng.uniform_in(0.5, 1.5)).collect()).collect();
        let b = best_portfolio(&prices, 3).unwrap();
        for _ in 0..1000 {
            let x = rng.simplex_point(3);
            assert!(b.loss - b.gap <= log_loss(&x, &prices) + 1e-12);
        }
    }

    #[test]
    fn ternary_search_finds_plateau_minimum() {
        let x = ternary_min(|x| crate::harness::stream::plateau_loss(x, 3.0), -20.0, 20.0, 1e-10);
        assert_abs_diff_eq!(x, 3.0, epsilon = 1e-9);
    }
}
