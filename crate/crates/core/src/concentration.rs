//! Tail bounds for the standardized Borel variable `(Z - E Z) / sd(Z)`.
//!
//! The lower tail satisfies `exp(-t²/2)`. The upper tail bound is piecewise (Gaussian regime,
//! then exponential) and depends on a free parameter `δ` through `γ = λ - ln λ - 1 - δ` and `K`.
//! Exact tails are computed by direct summation with a certified geometric remainder.

use serde::Serialize;

use crate::borel::BorelParams;
use crate::error::{Error, Result};
use crate::special::{ln_factorial, ln_sqrt_2pi};

/// Terms that fail to start decreasing by this index abort a series.
pub const SUM_GUARD: u64 = 1_000_000;

/// Margin kept between `δ` and the ends of its feasible interval in [`optimize_delta`].
pub const DELTA_MARGIN: f64 = 1e-6;

const GRID_POINTS: usize = 64;
const GOLDEN_ITERATIONS: usize = 200;

/// Constants of the upper tail bound for one `(λ, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperTailParams {
    pub lambda: f64,
    pub delta: f64,
    pub gamma: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

/// `λ - ln λ - 1`, the supremum of admissible `δ`.
pub fn delta_limit(lambda: f64) -> f64 {
    // λ - 1 - ln λ = -(ln(1 + (λ-1)) - (λ-1)), evaluated without cancellation near λ = 1
    let x = lambda - 1.0;
    x - x.ln_1p()
}

impl UpperTailParams {
    pub fn new(lambda: f64, delta: f64) -> Result<Self> {
        BorelParams::new(lambda)?;
        let limit = delta_limit(lambda);
        if !(delta > 0.0 && delta < limit) {
            return Err(Error::DeltaOutOfRange { delta, limit });
        }
        let gamma = limit - delta;
        Ok(UpperTailParams {
            lambda,
            delta,
            gamma,
            k: 0.5 * lambda * (mgf_moment_bound(lambda, delta) + (1.0 - lambda).powi(-2)),
        })
    }

    /// The point where the Gaussian branch hands over to the exponential one.
    pub fn breakpoint(&self) -> f64 {
        self.k * self.gamma * (1.0 - self.lambda).powi(2) / self.lambda
    }

    /// Natural log of [`upper_tail_bound`], finite even where the bound underflows.
    pub fn ln_bound(&self, t: f64) -> f64 {
        let c = (1.0 - self.lambda).powi(2) / self.lambda;
        if t < self.breakpoint() {
            -t * t / (2.0 * self.k * c)
        } else {
            -self.gamma * t + 0.5 * self.k * self.gamma * self.gamma * c
        }
    }
}

/// The bound on `E[Z* e^{γ Z*}]` used inside `K`.
fn mgf_moment_bound(lambda: f64, delta: f64) -> f64 {
    let e = (-delta).exp();
    (1.0 - lambda) * e / (lambda * ln_sqrt_2pi().exp() * (-delta).exp_m1().powi(2))
}

/// Upper tail bound at `t > 0`.
pub fn upper_tail_bound(params: &UpperTailParams, t: f64) -> f64 {
    params.ln_bound(t).exp()
}

/// `exp(-t²/2)`.
pub fn lower_tail_bound(t: f64) -> f64 {
    (-0.5 * t * t).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }
}

/// A tail probability known to lie in `[value, value + err]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailValue {
    pub value: f64,
    pub err: f64,
}

/// Sum of positive terms `exp(log_term(j))` for `j >= from`.
///
/// `ratio_after(j)` must bound every ratio `term(i+1)/term(i)` with `i >= j`. Summation stops
/// once the geometric remainder is negligible, which is returned as the error.
fn sum_series<L, R>(from: u64, log_term: L, ratio_after: R) -> Result<(f64, f64)>
where
    L: Fn(u64) -> f64,
    R: Fn(u64) -> f64,
{
    let mut sum = 0.0;
    let mut j = from;
    loop {
        let term = log_term(j).exp();
        sum += term;
        let r = ratio_after(j);
        if r < 1.0 {
            let rest = term * r / (1.0 - r);
            if rest <= 1e-17 * sum || (sum == 0.0 && rest == 0.0) {
                return Ok((sum, rest));
            }
        } else if j >= SUM_GUARD {
            return Err(Error::SumDivergenceGuard(j));
        }
        j += 1;
    }
}

/// `P((Z - E Z)/sd ≤ -t)` or `P((Z - E Z)/sd ≥ t)`.
///
/// The lower tail is a finite sum and has zero error bar. The upper tail is summed forward from
/// the threshold and its error bar bounds the unsummed remainder.
pub fn exact_tail(p: &BorelParams, t: f64, side: Side) -> Result<TailValue> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be positive, got {t}"
        )));
    }
    // small slack so that thresholds landing on an integer are not lost to rounding
    const SLACK: f64 = 1e-9;
    match side {
        Side::Lower => {
            let x = p.mean() - t * p.std_dev();
            if x < 1.0 - SLACK {
                return Ok(TailValue {
                    value: 0.0,
                    err: 0.0,
                });
            }
            let top = (x + SLACK).floor() as u64;
            let value = (1..=top).map(|j| p.pmf(j)).sum::<f64>();
            Ok(TailValue { value, err: 0.0 })
        }
        Side::Upper => {
            let x = p.mean() + t * p.std_dev();
            let from = ((x - SLACK).ceil() as u64).max(1);
            let r = p.ratio_bound();
            let (value, err) = sum_series(from, |j| p.log_pmf_unchecked(j), |_| r)?;
            Ok(TailValue { value, err })
        }
    }
}

/// `δ` minimizing the upper tail bound at `t`, and the bound there.
///
/// A 64-point grid that contains the midpoint of the feasible interval seeds a golden-section
/// refinement around the best grid point, so the result never exceeds the midpoint value.
pub fn optimize_delta(lambda: f64, t: f64) -> Result<(f64, f64)> {
    BorelParams::new(lambda)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t must be positive, got {t}"
        )));
    }
    let lo = DELTA_MARGIN.min(delta_limit(lambda) / 4.0);
    let hi = delta_limit(lambda) - lo;
    let objective = |d: f64| {
        UpperTailParams::new(lambda, d)
            .map(|p| p.ln_bound(t))
            .unwrap_or(f64::INFINITY)
    };

    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let mut grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
    grid.push(0.5 * (lo + hi));
    grid.sort_by(f64::total_cmp);
    let values: Vec<f64> = grid.iter().map(|&d| objective(d)).collect();
    let best = (0..grid.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let (mut best_d, mut best_v) = (grid[best], values[best]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if (b - a) <= 1e-15 * b.abs() {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = objective(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best_v {
            best_d = x;
            best_v = v;
        }
    }
    Ok((best_d, best_v.exp()))
}

/// Direct value of `E[Z* e^{γ Z*}] = (1-λ) Σ_j e^{(γ-λ)j} λ^{j-1} j^{j+1} / j!` with the
/// remainder of the summation.
pub fn mgf_moment(params: &UpperTailParams) -> Result<(f64, f64)> {
    let l = params.lambda;
    let (a, ln_l) = (params.gamma - l, l.ln());
    let log_term = |j: u64| {
        let x = j as f64;
        // j = 1 gives e^{γ-λ}: 1^2 / 1! with λ^0
        a * x + (x - 1.0) * ln_l + (x + 1.0) * x.ln() - ln_factorial(j)
    };
    // term ratio is e^{γ-λ} λ (1 + 1/j)^{j+1}, decreasing in j
    let ratio_after = |j: u64| {
        let x = j as f64;
        (a + ln_l + (x + 1.0) * (1.0 / x).ln_1p()).exp()
    };
    let (s, rest) = sum_series(1, log_term, ratio_after)?;
    Ok(((1.0 - l) * s, (1.0 - l) * rest))
}

/// Whether the direct value of `E[Z* e^{γ Z*}]`, remainder included, is at most its bound.
pub fn mgf_moment_check(params: &UpperTailParams) -> Result<bool> {
    let (value, rest) = mgf_moment(params)?;
    Ok(value + rest <= mgf_moment_bound(params.lambda, params.delta))
}

/// Both sides of the moment-generating-function comparison at `θ`:
/// `E[e^{θZ*} - e^{θZ}]` by direct summation and `K θ E[e^{θZ}]`.
pub fn mgf_chain(params: &UpperTailParams, theta: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta < params.gamma) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, {}), got {theta}",
            params.gamma
        )));
    }
    let p = BorelParams::new(params.lambda)?;
    // both series decay at least like (λ e^{1-λ} e^θ)^j
    let r = p.ratio_bound() * theta.exp();
    let (m, _) = sum_series(1, |j| p.log_pmf_unchecked(j) + theta * j as f64, |_| r)?;
    let (biased, _) = sum_series(
        1,
        |j| p.log_pmf_unchecked(j) + theta * j as f64 + (j as f64).ln(),
        |_| r,
    )?;
    let lhs = (1.0 - params.lambda) * biased - m;
    Ok((lhs, params.k * theta * m))
}

/// One row of the tails table.
#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub lambda: f64,
    pub t: f64,
    pub side: Side,
    pub exact: f64,
    pub exact_err: f64,
    pub bound: f64,
    pub delta_used: Option<f64>,
    pub gamma: Option<f64>,
    pub k: Option<f64>,
}

impl TailRow {
    pub fn compute(lambda: f64, t: f64, side: Side) -> Result<Self> {
        let p = BorelParams::new(lambda)?;
        let exact = exact_tail(&p, t, side)?;
        let mut row = TailRow {
            lambda,
            t,
            side,
            exact: exact.value,
            exact_err: exact.err,
            bound: lower_tail_bound(t),
            delta_used: None,
            gamma: None,
            k: None,
        };
        if side == Side::Upper {
            let (delta, bound) = optimize_delta(lambda, t)?;
            let params = UpperTailParams::new(lambda, delta)?;
            row.bound = bound;
            row.delta_used = Some(delta);
            row.gamma = Some(params.gamma);
            row.k = Some(params.k);
        }
        Ok(row)
    }

    /// Whether the exact tail, less its error bar, stays below the bound.
    pub fn dominated(&self) -> bool {
        self.exact <= self.bound + self.exact_err
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

    #[test]
    fn constants_at_half() {
        let p = UpperTailParams::new(0.5, 0.1).unwrap();
        assert!((p.gamma - (0.5 + 2f64.ln() - 1.1)).abs() < 1e-15);
        assert!((p.gamma - 0.09315).abs() < 1e-5);
        // (1/4)(e^{-0.1}/(sqrt(2π)(1-e^{-0.1})²) + 4) evaluated by hand
        let e = (-0.1f64).exp();
        let oracle = 0.25 * (e / ((2.0 * std::f64::consts::PI).sqrt() * (1.0 - e).powi(2)) + 4.0);
        assert!((p.k - oracle).abs() < 1e-12 * oracle);
        assert!((p.k - 10.96).abs() < 0.01, "{}", p.k);
        assert!(matches!(
            UpperTailParams::new(0.5, 0.2),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert!(UpperTailParams::new(0.5, 0.0).is_err());
    }

    #[test]
    fn feasible_region_is_nonempty() {
        for i in 1..1000 {
            let l = i as f64 / 1000.0;
            assert!(delta_limit(l) > 0.0, "{l}");
            let d = delta_limit(l) / 2.0;
            let p = UpperTailParams::new(l, d).unwrap();
            assert!(p.gamma > 0.0 && p.k > 0.0);
        }
    }

    #[test]
    fn continuous_at_breakpoint() {
        for &l in &GRID {
            for frac in [0.1, 0.5, 0.9] {
                let p = UpperTailParams::new(l, frac * delta_limit(l)).unwrap();
                let t = p.breakpoint();
                let c = (1.0 - l).powi(2) / l;
                let gaussian = -t * t / (2.0 * p.k * c);
                let exponential = -p.gamma * t + 0.5 * p.k * p.gamma * p.gamma * c;
                let scale = gaussian.abs().max(1.0);
                assert!((gaussian - exponential).abs() <= 1e-12 * scale);
                let (below, above) = (p.ln_bound(t * (1.0 - 1e-12)), p.ln_bound(t));
                assert!((below - above).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn lower_tail_examples() {
        assert!((lower_tail_bound(0.5) - 0.882_496_902_584_595).abs() < 1e-14);
        let p = BorelParams::new(0.5).unwrap();
        let tail = exact_tail(&p, 0.5, Side::Lower).unwrap();
        assert!((tail.value - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(tail.err, 0.0);
        // threshold 2 - 2·0.75 = 0.5 lies below the support
        assert_eq!(exact_tail(&p, 0.75, Side::Lower).unwrap().value, 0.0);
    }

    #[test]
    fn exact_tails_agree_with_complement() {
        for &l in &[0.2, 0.5, 0.8] {
            let p = BorelParams::new(l).unwrap();
            let law = p.law(1e-14).unwrap();
            for t in [0.25, 0.5, 1.0, 2.0] {
                let up = exact_tail(&p, t, Side::Upper).unwrap();
                let from = (p.mean() + t * p.std_dev() - 1e-9).ceil() as u64;
                let below: f64 = (1..from).map(|j| law.prob(j)).sum();
                let complement = 1.0 - below;
                assert!(
                    (up.value - complement).abs() < 1e-12,
                    "λ={l} t={t}: {} vs {complement}",
                    up.value
                );
                assert!(up.err <= 1e-16);
            }
        }
    }

    #[test]
    fn upper_tail_decreases() {
        let p = BorelParams::new(0.4).unwrap();
        let mut prev = 1.0;
        for i in 1..60 {
            let v = exact_tail(&p, 0.2 * i as f64, Side::Upper).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn optimized_bound_is_at_most_midpoint() {
        for &l in &GRID {
            for t in [0.25, 1.0, 4.0] {
                let (d, b) = optimize_delta(l, t).unwrap();
                let mid = UpperTailParams::new(l, delta_limit(l) / 2.0).unwrap();
                assert!(b <= upper_tail_bound(&mid, t) * (1.0 + 1e-12));
                let at_d = UpperTailParams::new(l, d).unwrap();
                assert!((upper_tail_bound(&at_d, t) - b).abs() <= 1e-14 * b);
            }
        }
        let mut prev = f64::INFINITY;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let (_, b) = optimize_delta(0.3, t).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn tails_are_dominated() {
        for &l in &GRID {
            for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
                for side in [Side::Lower, Side::Upper] {
                    let row = TailRow::compute(l, t, side).unwrap();
                    assert!(row.dominated(), "{row:?}");
                }
            }
        }
    }

    #[test]
    fn mgf_moment_examples() {
        for (l, d) in [(0.5, 0.1), (0.2, 0.3)] {
            let p = UpperTailParams::new(l, d).unwrap();
            assert!(mgf_moment_check(&p).unwrap());
        }
        // γ close to zero: the sum tends to E[Z²]/E[Z] = (1-λ)^{-2}
        let l = 0.5;
        let p = UpperTailParams::new(l, delta_limit(l) * (1.0 - 1e-9)).unwrap();
        assert!(mgf_moment_check(&p).unwrap());
        let (v, _) = mgf_moment(&p).unwrap();
        assert!((v - 4.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn mgf_moment_matches_truncated_sum() {
        let p = UpperTailParams::new(0.3, 0.4).unwrap();
        let b = BorelParams::new(0.3).unwrap();
        let (v, _) = mgf_moment(&p).unwrap();
        // E[Z² e^{γZ}] / E[Z] from the pmf
        let direct: f64 = (1..2000u64)
            .map(|j| {
                let x = j as f64;
                b.pmf(j) * x * x * (p.gamma * x).exp()
            })
            .sum::<f64>()
            / b.mean();
        assert!((v - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn mgf_chain_holds() {
        for &l in &GRID {
            let p = UpperTailParams::new(l, delta_limit(l) / 2.0).unwrap();
            let (lhs, rhs) = mgf_chain(&p, p.gamma / 2.0).unwrap();
            assert!(lhs >= 0.0);
            assert!(lhs <= rhs * (1.0 + 1e-9), "λ={l}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn divergence_guard() {
        let l = 0.5;
        // δ so small that the terms still increase at the guard index
        let p = UpperTailParams::new(l, 1e-7).unwrap();
        assert_eq!(mgf_moment(&p), Err(Error::SumDivergenceGuard(SUM_GUARD)));
    }
}
