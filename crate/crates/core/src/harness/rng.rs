//! The stream generator: ChaCha20 keyed by the seed.
//!
//! The 32-byte key holds the seed as little-endian bytes 0..8 and zeros
//! elsewhere, the nonce and counter start at zero. Uniform doubles take
//! the top 53 bits of each `u64` output (`(u >> 11) * 2^-53`), and normal
//! deviates use the Box-Muller cosine branch, one output per pair of
//! uniforms. Any ChaCha20 implementation reproduces the streams.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha20Rng,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self { inner: ChaCha20Rng::from_seed(key) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `0..n` (`n > 0`), by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// A uniformly random point of the probability simplex.
    pub fn simplex_point(&mut self, n: usize) -> Vec<f64> {
        let mut e: Vec<f64> = (0..n).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let s: f64 = e.iter().sum();
        e.iter_mut().for_each(|v| *v /= s);
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = StreamRng::new(42);
        let mut b = StreamRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_ne!(StreamRng::new(1).next_u64(), StreamRng::new(2).next_u64());
    }

    #[test]
    fn uniform_range_and_mean() {
        let mut r = StreamRng::new(3);
        let xs: Vec<f64> = (0..20_000).map(|_| r.uniform()).collect();
        assert!(xs.iter().all(|x| (0.0..1.0).contains(x)));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn gaussian_moments() {
        let mut r = StreamRng::new(5);
        let xs: Vec<f64> = (0..50_000).map(|_| r.gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.02 && (var - 1.0).abs() < 0.03);
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = StreamRng::new(9);
        assert!((0..1000).all(|_| r.below(7) < 7));
    }
}
