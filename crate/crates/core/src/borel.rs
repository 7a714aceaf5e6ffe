//! The Borel distribution: total progeny of a Galton–Watson tree with Poisson(λ) offspring.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lawkit::TruncatedLaw;
use crate::rng::poisson;
use crate::special::{ln_factorial, ln_sqrt_2pi, stirling_correction};

/// Default cap on truncation windows and on simulated progeny.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// Parameter of a Borel law, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorelParams {
    lambda: f64,
}

/// Outcome of a capped simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Draw {
    Value(u64),
    Censored,
}

impl BorelParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda < 1.0 {
            Ok(BorelParams { lambda })
        } else {
            Err(Error::InvalidLambda(lambda))
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(1 - λ)^{-1}`.
    pub fn mean(&self) -> f64 {
        1.0 / (1.0 - self.lambda)
    }

    /// `λ (1 - λ)^{-3}`.
    pub fn variance(&self) -> f64 {
        self.lambda / (1.0 - self.lambda).powi(3)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// `λ - 1 - ln λ`, the exponential decay rate of the mass function.
    pub fn decay_rate(&self) -> f64 {
        let l = self.lambda;
        // ln_1p keeps precision near λ = 1 where the rate vanishes quadratically
        -(l - 1.0).ln_1p() + (l - 1.0)
    }

    /// Upper bound `λ e^{1-λ} < 1` on the successive ratio `q(j+1)/q(j)`.
    pub fn ratio_bound(&self) -> f64 {
        self.lambda * (1.0 - self.lambda).exp()
    }

    /// `ln P(Z = j)`.
    pub fn log_pmf(&self, j: u64) -> Result<f64> {
        if j == 0 {
            return Err(Error::InvalidIndex(0));
        }
        Ok(self.log_pmf_unchecked(j))
    }

    pub(crate) fn log_pmf_unchecked(&self, j: u64) -> f64 {
        let l = self.lambda;
        let x = j as f64;
        if j < 16 {
            -l * x + (x - 1.0) * (l * x).ln() - ln_factorial(j)
        } else {
            // Stirling-expanded form: the j ln j terms cancel analytically, leaving only
            // quantities of the size of the result.
            -x * self.decay_rate() - l.ln() - 1.5 * x.ln() - ln_sqrt_2pi() - stirling_correction(x)
        }
    }

    /// `P(Z = j)`, zero for `j = 0`.
    pub fn pmf(&self, j: u64) -> f64 {
        if j == 0 {
            0.0
        } else {
            self.log_pmf_unchecked(j).exp()
        }
    }

    /// Mass function on `1..=window`; the remaining mass is the tail.
    pub fn law_with_window(&self, window: u64) -> Result<TruncatedLaw> {
        if window == 0 {
            return Err(Error::InvalidParameter("window must be at least 1".into()));
        }
        if window > DEFAULT_CAP {
            return Err(Error::WindowOverflow {
                cap: DEFAULT_CAP as usize,
            });
        }
        let probs = (1..=window).map(|j| self.pmf(j)).collect();
        Ok(TruncatedLaw::from_window(1, probs))
    }

    /// Smallest window `1..=M` carrying at least `1 - eps` of the mass.
    pub fn law(&self, eps: f64) -> Result<TruncatedLaw> {
        self.law_capped(eps, DEFAULT_CAP)
    }

    pub fn law_capped(&self, eps: f64, cap: u64) -> Result<TruncatedLaw> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must lie in (0, 1), got {eps}"
            )));
        }
        let mut probs = Vec::new();
        let mut partial = 0.0;
        let mut j = 0u64;
        while partial < 1.0 - eps {
            j += 1;
            if j > cap {
                return Err(Error::WindowOverflow { cap: cap as usize });
            }
            let p = self.pmf(j);
            probs.push(p);
            partial += p;
        }
        Ok(TruncatedLaw::from_window(1, probs))
    }

    /// One total-progeny draw, or `Censored` once more than `cap` individuals appear.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, cap: u64) -> Draw {
        let mut total = 1u64;
        let mut pending = poisson(self.lambda, rng);
        while pending > 0 {
            pending -= 1;
            total += 1;
            if total > cap {
                return Draw::Censored;
            }
            pending += poisson(self.lambda, rng);
        }
        Draw::Value(total)
    }
}
