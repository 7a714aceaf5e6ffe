//! Stein's method for Borel approximation.
//!
//! For bounded `h` the Stein equation
//!
//! ```text
//! h(k) - E h(Z) = (1-λ)(k-1) f(k) - λ(1-λ) k Σ_{i>=1} f(i+k) q(i),   f(1) = 0,
//! ```
//!
//! with `q` the Borel(λ) mass function, is solved by `f(k) = Σ_{m>=k} a[k][m] h_Z(m)` where
//! `h_Z = (h - E h(Z)) / (1-λ)`. The coefficients satisfy `a[k][k] = 1/(k-1)` and
//!
//! ```text
//! a[k][k+j] = (kλ/(k-1)) Σ_{i=1}^{j} a[k+i][k+j] q(i),
//! ```
//!
//! and are bounded by `|a[k][k+j]| <= jλq(j)/(k-1)`, which gives `|f| <= (1-λ)^{-2}`.
//! Any law `W` with `E W = (1-λ)^{-1}` then satisfies
//! `d_TV(W, Borel(λ)) <= (1-λ)^{-2} d_TV(W*, (1-I)W + I(Z + W*))`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::borel::BorelParams;
use crate::error::{Error, Result};
use crate::lawkit::{moments, tv_distance, TruncatedLaw, TvInterval};
use crate::sizebias::{mixture_rhs, size_bias_with_mean};

/// Relative tolerance on the hypothesis `E W = (1-λ)^{-1}`.
pub const MEAN_TOLERANCE: f64 = 1e-6;

/// Largest table size for the exact-arithmetic drift check.
pub const EXACT_MAX_SIZE: usize = 20;

/// Triangular coefficient array `a[k][m]`, `2 <= k <= m <= M`.
#[derive(Debug, Clone)]
pub struct SteinTable {
    params: BorelParams,
    size: usize,
    // q[i] = P(Z = i), q[0] = 0
    q: Vec<f64>,
    // column-major: column m holds k = 2..=m
    a: Vec<f64>,
}

fn column_offset(m: usize) -> usize {
    (m - 2) * (m - 1) / 2
}

impl SteinTable {
    /// Fills the table column by column. Within a column `a[k][m]` needs `a[k+i][m]`, so `k`
    /// runs downwards from the diagonal.
    pub fn build(params: &BorelParams, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidParameter(format!(
                "table size must be at least 2, got {size}"
            )));
        }
        let lambda = params.lambda();
        let q: Vec<f64> = (0..=size as u64).map(|i| params.pmf(i)).collect();
        let mut a = vec![0.0; column_offset(size + 1)];
        for m in 2..=size {
            let col = &mut a[column_offset(m)..column_offset(m + 1)];
            col[m - 2] = 1.0 / (m - 1) as f64;
            for k in (2..m).rev() {
                let s: f64 = (1..=m - k).map(|i| col[k + i - 2] * q[i]).sum();
                col[k - 2] = k as f64 * lambda / (k - 1) as f64 * s;
            }
        }
        Ok(SteinTable {
            params: *params,
            size,
            q,
            a,
        })
    }

    pub fn params(&self) -> &BorelParams {
        &self.params
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda()
    }

    /// The `M` of the table.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `a[k][m]`, zero outside `2 <= k <= m <= M`.
    pub fn get(&self, k: usize, m: usize) -> f64 {
        if k < 2 || k > m || m > self.size {
            0.0
        } else {
            self.a[column_offset(m) + k - 2]
        }
    }

    /// `P(Z = i)` as used by the table; zero beyond `M`.
    pub fn q(&self, i: usize) -> f64 {
        self.q.get(i).copied().unwrap_or(0.0)
    }

    /// Iterates `(k, m, a[k][m])` in row order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (2..=self.size).flat_map(move |k| (k..=self.size).map(move |m| (k, m, self.get(k, m))))
    }

    /// Largest violation of `|a[k][k+j]| <= bound(k, j)`; non-positive when every entry obeys it.
    pub fn max_bound_excess(&self) -> f64 {
        self.entries()
            .map(|(k, m, a)| a.abs() - coefficient_bound(&self.params, k as u64, (m - k) as u64))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `1/(k-1)` for `j = 0`, otherwise `jλq(j)/(k-1)`.
pub fn coefficient_bound(p: &BorelParams, k: u64, j: u64) -> f64 {
    assert!(k >= 2, "coefficient bounds start at k = 2");
    let denom = (k - 1) as f64;
    if j == 0 {
        1.0 / denom
    } else {
        j as f64 * p.lambda() * p.pmf(j) / denom
    }
}

/// A test function `h` on `1..=M` with `|h| <= 1`.
///
/// Above `M` the function is continued by the constant `E h(Z)` (which is then determined by the
/// values on the window). This keeps `|h| <= 1`, makes `h_Z` vanish above `M`, and so the finite
/// coefficient sum gives the Stein solution exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "test function needs at least one value".into(),
            ));
        }
        if let Some(bad) = values.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "test function values must satisfy |h| <= 1, got {bad}"
            )));
        }
        Ok(TestFunction { values })
    }

    /// Indicator of a set of indices on `1..=size`.
    pub fn indicator<F: Fn(u64) -> bool>(size: usize, member: F) -> Self {
        TestFunction {
            values: (1..=size as u64)
                .map(|j| if member(j) { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `E h(Z)` for the continued function.
    pub fn borel_mean(&self, p: &BorelParams) -> f64 {
        let (num, den) = self
            .values
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(n, d), (i, &h)| {
                let q = p.pmf(i as u64 + 1);
                (n + h * q, d + q)
            });
        num / den
    }

    /// `h(j)` for the continued function, given its Borel mean.
    pub fn value(&self, j: u64, mean: f64) -> f64 {
        match j {
            0 => 0.0,
            j if j as usize <= self.values.len() => self.values[j as usize - 1],
            _ => mean,
        }
    }
}

/// Solution `f` of the Stein equation on `1..=M` (zero above `M`).
#[derive(Debug, Clone)]
pub struct SteinSolution {
    f: Vec<f64>,
    truncation: Vec<f64>,
    h_mean: f64,
}

impl SteinSolution {
    /// `f(k)`; `f(1) = 0` and `f(k) = 0` above the window.
    pub fn f(&self, k: u64) -> f64 {
        if k == 0 || k as usize > self.f.len() {
            0.0
        } else {
            self.f[k as usize - 1]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    /// `Σ_{m>M} |a[k][m]| / (1-λ)` bounded coefficient-wise: the sensitivity of `f(k)` to the
    /// values of `h` above the window.
    pub fn truncation(&self, k: u64) -> f64 {
        if k == 0 || k as usize > self.truncation.len() {
            0.0
        } else {
            self.truncation[k as usize - 1]
        }
    }

    pub fn max_truncation(&self) -> f64 {
        self.truncation.iter().copied().fold(0.0, f64::max)
    }

    pub fn h_mean(&self) -> f64 {
        self.h_mean
    }

    pub fn sup_norm(&self) -> f64 {
        self.f.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// `f(k) = Σ_{m=k}^{M} a[k][m] h_Z(m)` with `f(1) = 0`.
pub fn solve_f(h: &TestFunction, table: &SteinTable) -> Result<SteinSolution> {
    let size = table.size();
    if h.len() != size {
        return Err(Error::InvalidParameter(format!(
            "test function has {} values but the table size is {size}",
            h.len()
        )));
    }
    let lambda = table.lambda();
    let h_mean = h.borel_mean(table.params());
    let h_z: Vec<f64> = h
        .values()
        .iter()
        .map(|v| (v - h_mean) / (1.0 - lambda))
        .collect();
    let mut f = vec![0.0; size];
    for (k, fk) in f.iter_mut().enumerate().skip(1).map(|(i, v)| (i + 1, v)) {
        *fk = (k..=size).map(|m| table.get(k, m) * h_z[m - 1]).sum();
    }

    let jq_tail = weighted_tail_sums(table.params(), size);
    let truncation = (1..=size)
        .map(|k| {
            if k < 2 {
                0.0
            } else {
                lambda * jq_tail[size - k] / ((k - 1) as f64 * (1.0 - lambda))
            }
        })
        .collect();
    Ok(SteinSolution {
        f,
        truncation,
        h_mean,
    })
}

/// `out[J] = Σ_{j>J} j q(j)` for `J = 0..=size`.
///
/// The part above `size` is summed forward until the geometric remainder bound falls below
/// 1e-16 of the running total.
fn weighted_tail_sums(p: &BorelParams, size: usize) -> Vec<f64> {
    let ratio = p.ratio_bound();
    let mut far = 0.0;
    let mut j = size as u64 + 1;
    loop {
        let t = j as f64 * p.pmf(j);
        far += t;
        // (j+1) q(j+1) / (j q(j)) = λ e^{-λ} (1 + 1/j)^j <= ratio
        if t == 0.0 || t * ratio / (1.0 - ratio) <= 1e-16 * far {
            break;
        }
        j += 1;
    }
    let mut out = vec![0.0; size + 1];
    out[size] = far;
    for big_j in (0..size).rev() {
        let jj = big_j as u64 + 1;
        out[big_j] = out[big_j + 1] + jj as f64 * p.pmf(jj);
    }
    out
}

/// Right-hand side of the Stein equation at `k`, using `f = 0` above the window.
pub fn stein_rhs(sol: &SteinSolution, table: &SteinTable, k: u64) -> f64 {
    let lambda = table.lambda();
    let size = table.size() as u64;
    let sum: f64 = (1..=size.saturating_sub(k))
        .map(|i| sol.f(i + k) * table.q(i as usize))
        .sum();
    (1.0 - lambda) * (k as f64 - 1.0) * sol.f(k) - lambda * (1.0 - lambda) * k as f64 * sum
}

/// `|h(k) - E h(Z) - RHS(k)|` for `2 <= k <= M`.
///
/// With `h` continued by its mean the solution vanishes above the window, so the sum in the
/// right-hand side is finite and there is no remainder to bound.
pub fn stein_residual(
    sol: &SteinSolution,
    h: &TestFunction,
    table: &SteinTable,
    k: u64,
) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidIndex(k));
    }
    if k as usize > table.size() {
        return Err(Error::InsufficientWindow {
            index: k,
            window: table.size() as u64,
        });
    }
    let lhs = h.value(k, sol.h_mean()) - sol.h_mean();
    Ok((lhs - stein_rhs(sol, table, k)).abs())
}

/// `(1-λ)^{-2} d_TV(W*, (1-I) W + I (Z + W*))` as an interval.
///
/// `W*` is formed with the hypothesised mean `(1-λ)^{-1}`.
pub fn theorem1_bound(w: &TruncatedLaw, p: &BorelParams, eps: f64) -> Result<TvInterval> {
    let expected = p.mean();
    let observed = moments(w).mean + w.tail_mass() * (w.end() + 1) as f64;
    if (observed - expected).abs() > MEAN_TOLERANCE * expected {
        return Err(Error::MeanMismatch { observed, expected });
    }
    let wstar = size_bias_with_mean(w, expected)?;
    let rhs = mixture_rhs(w, &wstar, p, eps)?;
    Ok(tv_distance(&wstar, &rhs).scale((1.0 - p.lambda()).powi(-2)))
}

/// `Σ_{i=1}^{j} C(j,i) i^{i-1} (j-i)^{j-i}` with `0^0 = 1`, in exact arithmetic.
pub fn abel_sum(j: u32) -> BigUint {
    let jb = BigUint::from(j);
    let mut binom = BigUint::one();
    let mut total = BigUint::zero();
    for i in 1..=j {
        // C(j, i) = C(j, i-1) (j - i + 1) / i, exact at every step
        binom = binom * BigUint::from(j - i + 1) / BigUint::from(i);
        let ib = BigUint::from(i);
        let term = &binom * ib.pow(i - 1) * (&jb - &ib).pow(j - i);
        total += term;
    }
    total
}

/// Whether `abel_sum(j) == j^j`.
pub fn abel_identity_holds(j: u32) -> bool {
    abel_sum(j) == BigUint::from(j).pow(j)
}

/// Floating-point drift of the coefficient table measured against exact rational arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct DriftReport {
    pub max_abs: f64,
    pub max_rel: f64,
}

/// Rebuilds the table for `size <= 20` in exact rational arithmetic with `q(i)` fixed to 50
/// decimal digits (the exponential is irrational), and compares with the `f64` table.
pub fn exact_drift(params: &BorelParams, size: usize) -> Result<DriftReport> {
    if !(2..=EXACT_MAX_SIZE).contains(&size) {
        return Err(Error::InvalidParameter(format!(
            "exact mode supports table sizes 2..={EXACT_MAX_SIZE}, got {size}"
        )));
    }
    let lambda = BigRational::from_float(params.lambda())
        .ok_or_else(|| Error::InvalidLambda(params.lambda()))?;
    let e_neg = round_decimal(&exp_neg(&lambda, 70), 60);
    let mut q = vec![BigRational::zero(); size + 1];
    let mut fact = BigRational::one();
    for (i, qi) in q.iter_mut().enumerate().skip(1) {
        fact *= BigRational::from_integer(BigInt::from(i));
        let li = &lambda * BigRational::from_integer(BigInt::from(i));
        let value = pow(&e_neg, i) * pow(&li, i - 1) / &fact;
        *qi = round_decimal(&value, 50);
    }

    let float = SteinTable::build(params, size)?;
    let mut report = DriftReport {
        max_abs: 0.0,
        max_rel: 0.0,
    };
    for m in 2..=size {
        let mut col = vec![BigRational::zero(); m + 1];
        col[m] = BigRational::new(BigInt::one(), BigInt::from(m - 1));
        for k in (2..m).rev() {
            let s = (1..=m - k).fold(BigRational::zero(), |acc, i| acc + &col[k + i] * &q[i]);
            let factor = &lambda * BigRational::new(BigInt::from(k), BigInt::from(k - 1));
            col[k] = factor * s;
        }
        for (k, exact) in col.iter().enumerate().skip(2) {
            let exact = exact.to_f64().unwrap_or(f64::NAN);
            let diff = (float.get(k, m) - exact).abs();
            report.max_abs = report.max_abs.max(diff);
            if exact != 0.0 {
                report.max_rel = report.max_rel.max(diff / exact.abs());
            }
        }
    }
    Ok(report)
}

fn pow(x: &BigRational, n: usize) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * x)
}

/// `e^{-x}` by its Taylor series, stopped once a term drops below `10^{-digits}`.
fn exp_neg(x: &BigRational, digits: u32) -> BigRational {
    let threshold = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut n = 0u32;
    loop {
        n += 1;
        term = -term * x / BigRational::from_integer(BigInt::from(n));
        sum += &term;
        if term.abs() < threshold {
            return sum;
        }
    }
}

fn round_decimal(x: &BigRational, digits: u32) -> BigRational {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x * BigRational::from_integer(scale.clone())).round();
    scaled / BigRational::from_integer(scale)
}
