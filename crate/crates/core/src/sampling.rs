//! Reproducible quasi-random sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 7;
pub const VALIDATION_POINTS: usize = 64;
pub const INVARIANT_POINTS: usize = 256;

/// Seed from `SHLA_SEED`, falling back to 7.
pub fn default_seed() -> u64 {
    std::env::var("SHLA_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let b = base as f64;
    while i > 0 {
        f /= b;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// `n` points of the Halton sequence in `[0,1)^dim`, shifted by a seeded
/// random offset modulo one.
pub fn halton(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(dim <= PRIMES.len(), "halton dimension too large");
    let mut g = rng(seed ^ 0x5eed_0000_0000_0001);
    let shift: Vec<f64> = (0..dim).map(|_| g.random::<f64>()).collect();
    (1..=n as u64)
        .map(|i| {
            (0..dim)
                .map(|d| {
                    let u = radical_inverse(i, PRIMES[d]) + shift[d];
                    u - u.floor()
                })
                .collect()
        })
        .collect()
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform(g: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * g.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = halton(100, 4, 7);
        let b = halton(100, 4, 7);
        assert_eq!(a, b);
        assert!(a.iter().flatten().all(|&x| (0.0..1.0).contains(&x)));
        assert_ne!(a, halton(100, 4, 8));
    }

    #[test]
    fn low_discrepancy_mean() {
        let pts = halton(1024, 3, 1);
        for d in 0..3 {
            let m: f64 = pts.iter().map(|p| p[d]).sum::<f64>() / 1024.0;
            assert!((m - 0.5).abs() < 0.01);
        }
    }
}
