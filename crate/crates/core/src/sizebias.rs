//! Size-biased laws and the two representations of the size-biased Borel variable `Z*`:
//!
//! * the mixture `Z* = (1 - I) Z + I (Z + Z*)` with `I ~ Bernoulli(λ)` independent of all else,
//! * the geometric sum `Z* = Z_1 + ... + Z_η` with `P(η = n) = (1 - λ) λ^{n-1}`.
//!
//! Both are computed on finite windows with the unresolved mass carried in the tail, so they
//! can be compared against each other and against direct size biasing with rigorous TV brackets.

use crate::borel::{BorelParams, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::lawkit::{convolve, convolve_capped, mix, moments, TruncatedLaw};

/// Largest tail mass accepted by [`size_bias`].
pub const UNRESOLVED_TAIL_LIMIT: f64 = 1e-6;

/// A law together with its size-biased version.
#[derive(Debug, Clone)]
pub struct SizeBiasPair {
    pub base: TruncatedLaw,
    pub biased: TruncatedLaw,
}

impl SizeBiasPair {
    pub fn new(base: TruncatedLaw) -> Result<Self> {
        let biased = size_bias(&base)?;
        Ok(SizeBiasPair { base, biased })
    }
}

/// `P(W* = j) = j P(W = j) / E[W]`.
///
/// The mean is not known beyond the window, so it is estimated as the window mean plus the tail
/// placed at the first index above the window. The biased law then has the same window and the
/// leftover mass `(M + 1) tail / mean` becomes its tail.
pub fn size_bias(w: &TruncatedLaw) -> Result<TruncatedLaw> {
    if w.tail_mass() > UNRESOLVED_TAIL_LIMIT {
        return Err(Error::UnresolvedTail {
            tail_mass: w.tail_mass(),
            limit: UNRESOLVED_TAIL_LIMIT,
        });
    }
    let mean = moments(w).mean + (w.end() + 1) as f64 * w.tail_mass();
    Ok(bias_by(w, mean))
}

/// Size biasing with a known mean `E[W]`, e.g. one fixed by hypothesis.
pub fn size_bias_with_mean(w: &TruncatedLaw, mean: f64) -> Result<TruncatedLaw> {
    let window_mean = moments(w).mean;
    if !(mean > 0.0) || window_mean > mean * (1.0 + 1e-9) {
        return Err(Error::MeanMismatch {
            observed: window_mean,
            expected: mean,
        });
    }
    Ok(bias_by(w, mean))
}

fn bias_by(w: &TruncatedLaw, mean: f64) -> TruncatedLaw {
    let probs = w.iter().map(|(j, p)| j as f64 * p / mean).collect();
    TruncatedLaw::from_window(w.start(), probs)
}

/// Law of `Z*` for `Z ~ Borel(λ)`, using the exact mean, on the smallest window with tail
/// at most `eps`.
pub fn size_biased_borel(p: &BorelParams, eps: f64) -> Result<TruncatedLaw> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let scale = 1.0 - p.lambda();
    let mut probs = Vec::new();
    let mut partial = 0.0;
    let mut j = 0u64;
    while partial < 1.0 - eps {
        j += 1;
        if j > DEFAULT_CAP {
            return Err(Error::WindowOverflow {
                cap: DEFAULT_CAP as usize,
            });
        }
        let b = j as f64 * p.pmf(j) * scale;
        probs.push(b);
        partial += b;
    }
    Ok(TruncatedLaw::from_window(1, probs))
}

/// Law of `(1 - I) W + I (Z + W*)` with `P(I = 1) = λ`, `Z ~ Borel(λ)` truncated at `eps`,
/// everything independent.
pub fn mixture_rhs(
    w: &TruncatedLaw,
    wstar: &TruncatedLaw,
    p: &BorelParams,
    eps: f64,
) -> Result<TruncatedLaw> {
    let z = p.law(eps)?;
    mix(1.0 - p.lambda(), w, &convolve(&z, wstar))
}

/// Law of `Z_1 + ... + Z_η`, `η` geometric on `{1, 2, ...}` with `P(η = n) = (1 - λ) λ^{n-1}`.
///
/// The outer sum stops once the remaining geometric weight drops below `eps / 4`. The result
/// window is the first `W` with a rigorous bound on `P(Z* > W)` below `eps / 4`, and each Borel
/// factor is truncated at `eps (1 - λ) / 4` so the summed factor tails stay below `eps / 4` on
/// average. Everything left over is bookkept in the tail by complementarity.
pub fn geometric_sum_law(p: &BorelParams, eps: f64) -> Result<TruncatedLaw> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let lambda = p.lambda();
    let window = biased_window(p, eps / 4.0)?;
    let z = p.law(eps * (1.0 - lambda) / 4.0)?.truncate_to(window);

    let mut acc = vec![0.0; window as usize];
    let mut power = z.clone();
    let mut weight = 1.0 - lambda;
    let mut remaining = lambda;
    let mut n = 1u64;
    loop {
        for (j, pr) in power.iter() {
            acc[(j - 1) as usize] += weight * pr;
        }
        if remaining < eps / 4.0 || n >= window {
            break;
        }
        power = convolve_capped(&power, &z, window);
        weight *= lambda;
        remaining *= lambda;
        n += 1;
    }
    Ok(TruncatedLaw::from_window(1, acc))
}

/// Smallest `W` such that `P(Z* > W) <= target`, certified by the geometric ratio bound
/// `(j+1) q(j+1) / (j q(j)) <= λ e^{1-λ}`.
fn biased_window(p: &BorelParams, target: f64) -> Result<u64> {
    let ratio = p.ratio_bound();
    let scale = (1.0 - p.lambda()) / (1.0 - ratio);
    let mut w = 1u64;
    loop {
        let next = (w + 1) as f64 * p.pmf(w + 1) * scale;
        if next <= target {
            return Ok(w);
        }
        w += 1;
        if w > DEFAULT_CAP {
            return Err(Error::WindowOverflow {
                cap: DEFAULT_CAP as usize,
            });
        }
    }
}

/// `E[X] = λ / (1 - λ)^2` where `Z* = Z + X` with `X` independent of `Z`.
pub fn x_mean(p: &BorelParams) -> f64 {
    p.lambda() / (1.0 - p.lambda()).powi(2)
}

/// Checks `ξ + 1 ≼ η` for `ξ ~ Poisson(λ)` and geometric `η`, i.e. `P(ξ ≥ k) <= λ^k` for
/// every `k <= window`. Compared in log space so deep tails stay meaningful.
pub fn check_stochastic_order(p: &BorelParams, window: u64) -> bool {
    let lambda = p.lambda();
    let ln_l = lambda.ln();
    // ln P(ξ = i)
    let log_poisson = |i: u64| -lambda + i as f64 * ln_l - crate::special::ln_factorial(i);
    (1..=window).all(|k| {
        // P(ξ >= k) = sum_{i >= k} P(ξ = i); terms shrink at least geometrically by λ / (k + 1)
        let lead = log_poisson(k);
        let mut rel = 0.0;
        let mut term = 1.0;
        let mut i = k;
        while term > 1e-18 {
            rel += term;
            i += 1;
            term *= lambda / i as f64;
        }
        lead + rel.ln() <= k as f64 * ln_l + 1e-12
    })
}
