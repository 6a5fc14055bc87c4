//! Numerical kernels that keep the learners accurate when losses are tiny
//! or when learning-rate products are close to zero.

/// Below this magnitude the series forms are used instead of the direct
/// library calls, which would lose most digits to cancellation.
const SERIES_CUTOFF: f64 = 0.05;
const SERIES_TERMS: u32 = 16;

/// `u - ln(1 + u)` for `u > -1`, accurate near zero.
///
/// Always non-negative.
pub fn u_minus_ln1p(u: f64) -> f64 {
    if u.abs() < SERIES_CUTOFF {
        // u - ln(1+u) = sum_{k>=2} (-1)^k u^k / k
        let mut acc = 0.0;
        for k in (2..=SERIES_TERMS).rev() {
            let coef = if k % 2 == 0 { 1.0 } else { -1.0 } / f64::from(k);
            acc = acc * u + coef;
        }
        (acc * u * u).max(0.0)
    } else {
        (u - u.ln_1p()).max(0.0)
    }
}

/// `e^x - 1 - x`, accurate near zero. Always non-negative.
pub fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // sum_{k>=2} x^k / k!
        let mut acc = 0.0;
        let mut fact = 1.0;
        let mut coefs = [0.0; SERIES_TERMS as usize + 1];
        for k in 1..=SERIES_TERMS as usize {
            fact *= k as f64;
            coefs[k] = 1.0 / fact;
        }
        for k in (2..=SERIES_TERMS as usize).rev() {
            acc = acc * x + coefs[k];
        }
        (acc * x * x).max(0.0)
    } else {
        (x.exp_m1() - x).max(0.0)
    }
}

/// Running sum of squares stored as `scale^2 * ssq`, so that square roots
/// of sums of tiny (or huge) values neither underflow nor overflow.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SumSq {
    scale: f64,
    ssq: f64,
}

impl SumSq {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `w * v^2` with `w >= 0`.
    pub fn add_weighted(&mut self, v: f64, w: f64) {
        let a = v.abs();
        if a == 0.0 || w == 0.0 {
            return;
        }
        if self.scale < a {
            let r = self.scale / a;
            self.ssq = w + self.ssq * r * r;
            self.scale = a;
        } else {
            let r = a / self.scale;
            self.ssq += w * r * r;
        }
    }

    pub fn add(&mut self, v: f64) {
        self.add_weighted(v, 1.0);
    }

    /// Adds another accumulator.
    pub fn merge(&mut self, other: &SumSq) {
        if other.scale == 0.0 {
            return;
        }
        if self.scale < other.scale {
            let r = self.scale / other.scale;
            self.ssq = other.ssq + self.ssq * r * r;
            self.scale = other.scale;
        } else {
            let r = other.scale / self.scale;
            self.ssq += other.ssq * r * r;
        }
    }

    /// `sqrt(k * sum)` for `k >= 0`.
    pub fn sqrt_scaled(&self, k: f64) -> f64 {
        self.scale * (k * self.ssq).sqrt()
    }

    /// `sqrt(sum)`.
    pub fn sqrt(&self) -> f64 {
        self.sqrt_scaled(1.0)
    }

    /// The raw sum; may underflow when the entries are tiny.
    pub fn value(&self) -> f64 {
        self.scale * self.scale * self.ssq
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }
}

/// `|a - b| <= tol * max(|a|, |b|)`, with exact equality always accepted.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Natural log of `N`, the usual choice of `q` on the simplex.
pub fn ln_n(n: usize) -> f64 {
    (n as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_and_direct_forms_agree_at_cutoff() {
        for &u in &[0.0499, 0.0501, -0.0499, -0.0501] {
            let direct = u - f64::ln_1p(u);
            assert!(rel_close(u_minus_ln1p(u), direct, 1e-12), "u={u}");
            let direct = f64::exp_m1(u) - u;
            assert!(rel_close(expm1_minus_x(u), direct, 1e-12), "u={u}");
        }
    }

    #[test]
    fn tiny_arguments_keep_relative_accuracy() {
        let u = 1e-150;
        assert!(rel_close(u_minus_ln1p(u), u * u / 2.0, 1e-15));
        assert!(rel_close(expm1_minus_x(u), u * u / 2.0, 1e-15));
        assert!(rel_close(u_minus_ln1p(1e-8), 0.5e-16 - 1e-24 / 3.0, 1e-14));
    }

    #[test]
    fn sumsq_survives_underflow() {
        let mut s = SumSq::new();
        for _ in 0..4 {
            s.add(3e-300);
        }
        assert!(rel_close(s.sqrt(), 6e-300, 1e-14));
        assert_eq!((3e-300f64).powi(2), 0.0);
    }

    #[test]
    fn sumsq_matches_plain_sum() {
        let mut s = SumSq::new();
        let mut plain = 0.0;
        for i in 0..100 {
            let v = (i as f64 * 0.37).sin() * 10.0;
            s.add_weighted(v, 0.5);
            plain += 0.5 * v * v;
        }
        assert!(rel_close(s.value(), plain, 1e-13));
        let mut other = SumSq::new();
        other.add(1e3);
        s.merge(&other);
        assert!(rel_close(s.value(), plain + 1e6, 1e-13));
    }
}
