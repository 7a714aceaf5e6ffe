//! Seeded random streams.
//!
//! A 64-bit master seed plus a stream index selects an independent ChaCha8 stream. Work is
//! always split into tasks with stable indices, so results do not depend on thread count or
//! scheduling, and adding tasks never perturbs existing streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The generator for task `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Poisson draw by sequential inversion of the CDF.
///
/// Means above 30 are split into independent pieces so `exp(-mu)` never underflows and the
/// search stays short.
pub fn poisson<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    if !(mu > 0.0) {
        return 0;
    }
    if mu > 30.0 {
        let pieces = (mu / 30.0).ceil();
        let part = mu / pieces;
        return (0..pieces as u64).map(|_| poisson(part, rng)).sum();
    }
    let u: f64 = rng.gen();
    let mut k = 0u64;
    let mut p = (-mu).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= mu / k as f64;
        if p == 0.0 {
            // rounding left the CDF short of u; all remaining mass is below f64 resolution
            break;
        }
        cdf += p;
    }
    k
}
