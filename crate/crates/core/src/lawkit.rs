//! Finite-window algebra for probability laws on the positive integers.
//!
//! A [`TruncatedLaw`] stores exact probabilities on a window `start..=end` and lumps all mass
//! above the window into `tail_mass`. Mass below `start` is zero. Every operation keeps the
//! bookkeeping conservative: mass whose location is not resolved is always moved into the tail,
//! so distances computed from these laws come with rigorous two-sided brackets.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on the total mass of user-supplied laws.
pub const INPUT_TOLERANCE: f64 = 1e-9;
/// Tolerance on the total mass of laws produced internally.
pub const INTERNAL_TOLERANCE: f64 = 1e-12;

/// A probability law on `{1, 2, ...}` known exactly on a finite window.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedLaw {
    start: u64,
    probs: Vec<f64>,
    tail_mass: f64,
}

/// Two-sided bracket on a total variation distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvInterval {
    pub lower: f64,
    pub upper: f64,
}

impl TvInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn scale(&self, factor: f64) -> TvInterval {
        TvInterval {
            lower: self.lower * factor,
            upper: self.upper * factor,
        }
    }
}

/// Window moments. These are lower bounds whenever `tail_unresolved` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub second: f64,
    pub tail_unresolved: bool,
}

impl Moments {
    pub fn variance(&self) -> f64 {
        self.second - self.mean * self.mean
    }
}

/// Builds a law on the window `1..=probs.len()`.
pub fn make_law(probs: Vec<f64>, tail_mass: f64) -> Result<TruncatedLaw> {
    TruncatedLaw::with_start(1, probs, tail_mass)
}

impl TruncatedLaw {
    /// Builds a law whose window starts at `start`, validating and renormalizing the input.
    pub fn with_start(start: u64, probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if start == 0 {
            return Err(Error::InvalidIndex(0));
        }
        if probs.is_empty() {
            return Err(Error::InvalidParameter(
                "law window must be non-empty".into(),
            ));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p >= 0.0) {
                return Err(Error::NegativeMass {
                    index: start + i as u64,
                    value: p,
                });
            }
        }
        if !(tail_mass >= 0.0) {
            return Err(Error::NegativeMass {
                index: start + probs.len() as u64,
                value: tail_mass,
            });
        }
        let total = probs.iter().sum::<f64>() + tail_mass;
        if !((total - 1.0).abs() <= INPUT_TOLERANCE) {
            return Err(Error::NotNormalized { total });
        }
        let mut probs = probs;
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(TruncatedLaw {
            start,
            probs,
            tail_mass: tail_mass / total,
        })
    }

    /// Builds a law from window probabilities whose deficit (`1 - sum`) becomes the tail.
    ///
    /// Callers guarantee non-negative entries summing to at most one up to rounding.
    pub(crate) fn from_window(start: u64, probs: Vec<f64>) -> Self {
        debug_assert!(start >= 1 && !probs.is_empty());
        let tail_mass = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        TruncatedLaw {
            start,
            probs,
            tail_mass,
        }
    }

    /// Builds a law from window probabilities and an explicitly tracked tail.
    pub(crate) fn from_parts(start: u64, probs: Vec<f64>, tail_mass: f64) -> Self {
        debug_assert!(start >= 1 && !probs.is_empty());
        TruncatedLaw {
            start,
            probs,
            tail_mass: tail_mass.max(0.0),
        }
    }

    /// Point mass at `k`.
    pub fn point_mass(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidIndex(0));
        }
        Ok(TruncatedLaw {
            start: k,
            probs: vec![1.0],
            tail_mass: 0.0,
        })
    }

    /// First index of the window.
    pub fn start(&self) -> u64 {
        self.start
    }

    /// Last index of the window (the `M` of the window `1..=M`).
    pub fn end(&self) -> u64 {
        self.start + self.probs.len() as u64 - 1
    }

    /// Window probabilities, the first entry being `P(X = start)`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `P(X = j)` for `j` inside or below the window; `0` above it (that mass is in the tail).
    pub fn prob(&self, j: u64) -> f64 {
        if j < self.start || j > self.end() {
            0.0
        } else {
            self.probs[(j - self.start) as usize]
        }
    }

    pub fn window_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.window_mass() + self.tail_mass
    }

    /// Iterates `(j, P(X = j))` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.start + i as u64, p))
    }

    /// `E[g(X)]` over the window only.
    pub fn expect<F: Fn(u64) -> f64>(&self, g: F) -> f64 {
        self.iter().map(|(j, p)| p * g(j)).sum()
    }

    /// Moves everything above `end` into the tail. No-op if the window already ends there.
    pub fn truncate_to(&self, end: u64) -> TruncatedLaw {
        if end >= self.end() || end < self.start {
            return self.clone();
        }
        let keep = (end - self.start + 1) as usize;
        let moved: f64 = self.probs[keep..].iter().sum();
        TruncatedLaw {
            start: self.start,
            probs: self.probs[..keep].to_vec(),
            tail_mass: self.tail_mass + moved,
        }
    }

    /// Whether every entry of the window is non-negative and the total is one within `tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.probs.iter().all(|&p| p >= 0.0)
            && self.tail_mass >= 0.0
            && (self.total_mass() - 1.0).abs() <= tol
    }
}

/// Law of `X + Y` for independent `X ~ a`, `Y ~ b`.
///
/// Any term involving a tail of either operand is unresolved and ends up in the result's tail.
pub fn convolve(a: &TruncatedLaw, b: &TruncatedLaw) -> TruncatedLaw {
    convolve_capped(a, b, u64::MAX)
}

/// As [`convolve`], with the result window cut at `cap`; mass above it goes to the tail.
pub fn convolve_capped(a: &TruncatedLaw, b: &TruncatedLaw, cap: u64) -> TruncatedLaw {
    let start = a.start + b.start;
    let full_end = a.end() + b.end();
    let end = full_end.min(cap.max(start));
    let len = (end - start + 1) as usize;
    let mut out = vec![0.0; len];
    for (i, &pa) in a.probs.iter().enumerate() {
        if pa == 0.0 || i >= len {
            continue;
        }
        let room = (len - i).min(b.probs.len());
        for (o, &pb) in out[i..i + room].iter_mut().zip(&b.probs[..room]) {
            *o += pa * pb;
        }
    }
    TruncatedLaw::from_window(start, out)
}

/// The mixture `w * a + (1 - w) * b`.
pub fn mix(w: f64, a: &TruncatedLaw, b: &TruncatedLaw) -> Result<TruncatedLaw> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::WeightOutOfRange(w));
    }
    // Mass of `a` above its own window is unresolved, so the mixture window must stop at the
    // shorter end whenever that operand carries a tail.
    let start = a.start.min(b.start);
    let mut end = a.end().max(b.end());
    if w > 0.0 && a.tail_mass > 0.0 {
        end = end.min(a.end());
    }
    if w < 1.0 && b.tail_mass > 0.0 {
        end = end.min(b.end());
    }
    let end = end.max(start);
    let probs: Vec<f64> = (start..=end)
        .map(|j| w * a.prob(j) + (1.0 - w) * b.prob(j))
        .collect();
    let resolved: f64 = probs.iter().sum();
    let tail = (1.0 - resolved).max(0.0);
    Ok(TruncatedLaw::from_parts(start, probs, tail))
}

/// Bracket on `d_TV(a, b) = (1/2) sum_j |a_j - b_j|`.
///
/// Below the shorter window end both laws are known exactly. Above it the remaining masses are
/// `A` and `B`; their contribution lies in `[|A - B|, A + B] / 2`, and is exact whenever one of
/// the two laws has no mass there.
pub fn tv_distance(a: &TruncatedLaw, b: &TruncatedLaw) -> TvInterval {
    let common_end = a.end().min(b.end());
    let lo = a.start.min(b.start);
    let mut exact = 0.0;
    let mut a_known = 0.0;
    let mut b_known = 0.0;
    if common_end >= lo {
        for j in lo..=common_end {
            let (pa, pb) = (a.prob(j), b.prob(j));
            exact += (pa - pb).abs();
            a_known += pa;
            b_known += pb;
        }
    }
    let a_rest = (a.total_mass() - a_known).max(0.0);
    let b_rest = (b.total_mass() - b_known).max(0.0);
    let lower = 0.5 * (exact + (a_rest - b_rest).abs());
    let upper = 0.5 * (exact + a_rest + b_rest);
    let lower = lower.clamp(0.0, 1.0);
    TvInterval {
        lower,
        upper: upper.clamp(lower, 1.0),
    }
}

/// Empirical law of positive integer samples on the window `1..=window`.
pub fn empirical_law(samples: &[u64], window: u64) -> Result<TruncatedLaw> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    let mut counts = vec![0u64; window as usize];
    let mut above = 0u64;
    for &s in samples {
        match s {
            0 => return Err(Error::InvalidIndex(0)),
            s if s > window => above += 1,
            s => counts[(s - 1) as usize] += 1,
        }
    }
    Ok(law_from_counts(&counts, above, samples.len() as u64))
}

/// Law from per-index counts on `1..=counts.len()` plus a count of draws above the window.
pub(crate) fn law_from_counts(counts: &[u64], above: u64, n: u64) -> TruncatedLaw {
    let n_f = n as f64;
    let probs = counts.iter().map(|&c| c as f64 / n_f).collect();
    TruncatedLaw::from_parts(1, probs, above as f64 / n_f)
}

/// Window moments of `a`.
pub fn moments(a: &TruncatedLaw) -> Moments {
    let mean = a.expect(|j| j as f64);
    let second = a.expect(|j| (j as f64) * (j as f64));
    Moments {
        mean,
        second,
        tail_unresolved: a.tail_mass > 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform12() -> TruncatedLaw {
        make_law(vec![0.5, 0.5], 0.0).unwrap()
    }

    #[test]
    fn construction_examples() {
        let pm = make_law(vec![1.0], 0.0).unwrap();
        assert_eq!(pm.prob(1), 1.0);
        assert_eq!(pm.end(), 1);
        let tailed = make_law(vec![0.3, 0.3], 0.4).unwrap();
        assert_eq!(tailed.tail_mass(), 0.4);
        assert!(tailed.is_normalized(1e-12));
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            make_law(vec![-0.1, 1.1], 0.0),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert!(matches!(
            make_law(vec![0.5, 0.4], 0.0),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            make_law(vec![f64::NAN], 0.0),
            Err(Error::NegativeMass { .. })
        ));
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let law = make_law(vec![0.5, 0.5 + 5e-10], 0.0).unwrap();
        assert!((law.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn convolution_examples() {
        let pm = TruncatedLaw::point_mass(1).unwrap();
        let c = convolve(&pm, &pm);
        assert_eq!((c.start(), c.end()), (2, 2));
        assert_eq!(c.prob(2), 1.0);

        let u = uniform12();
        let c = convolve(&u, &u);
        assert_eq!(c.start(), 2);
        assert_eq!(c.probs(), &[0.25, 0.5, 0.25]);
        assert_eq!(c.tail_mass(), 0.0);
    }

    #[test]
    fn convolution_pushes_cross_tails_out() {
        let a = make_law(vec![0.5, 0.3], 0.2).unwrap();
        let b = make_law(vec![0.6], 0.4).unwrap();
        let c = convolve(&a, &b);
        assert!((c.window_mass() - 0.8 * 0.6).abs() < 1e-15);
        assert!((c.tail_mass() - (1.0 - 0.48)).abs() < 1e-15);
    }

    #[test]
    fn capped_convolution() {
        let u = uniform12();
        let c = convolve_capped(&u, &u, 3);
        assert_eq!(c.end(), 3);
        assert_eq!(c.tail_mass(), 0.25);
    }

    #[test]
    fn mixture_examples() {
        let a = TruncatedLaw::point_mass(1).unwrap();
        let b = TruncatedLaw::point_mass(2).unwrap();
        assert_eq!(mix(1.0, &a, &b).unwrap().prob(1), 1.0);
        assert_eq!(mix(0.0, &a, &b).unwrap().prob(2), 1.0);
        let m = mix(0.5, &a, &b).unwrap();
        assert_eq!((m.prob(1), m.prob(2)), (0.5, 0.5));
        assert!(matches!(mix(1.5, &a, &b), Err(Error::WeightOutOfRange(_))));
    }

    #[test]
    fn mixture_never_resolves_unknown_tail_mass() {
        let a = make_law(vec![0.5], 0.5).unwrap();
        let b = make_law(vec![0.25, 0.25, 0.5], 0.0).unwrap();
        let m = mix(0.5, &a, &b).unwrap();
        assert_eq!(m.end(), 1);
        assert!((m.prob(1) - 0.375).abs() < 1e-15);
        assert!((m.tail_mass() - 0.625).abs() < 1e-15);
    }

    #[test]
    fn tv_examples() {
        let u = uniform12();
        assert_eq!(
            tv_distance(&u, &u),
            TvInterval {
                lower: 0.0,
                upper: 0.0
            }
        );
        let a = TruncatedLaw::point_mass(1).unwrap();
        let b = TruncatedLaw::point_mass(2).unwrap();
        assert_eq!(
            tv_distance(&a, &b),
            TvInterval {
                lower: 1.0,
                upper: 1.0
            }
        );
    }

    #[test]
    fn tv_brackets_unresolved_tails() {
        let a = make_law(vec![0.5], 0.5).unwrap();
        let b = make_law(vec![0.5, 0.5], 0.0).unwrap();
        let tv = tv_distance(&a, &b);
        // a's tail could sit at 2 (distance 0) or anywhere above (distance 1/2)
        assert_eq!(tv.lower, 0.0);
        assert_eq!(tv.upper, 0.5);
    }

    #[test]
    fn empirical_examples() {
        let e = empirical_law(&[1, 1, 2, 2], 2).unwrap();
        assert_eq!(e.probs(), &[0.5, 0.5]);
        assert_eq!(e.tail_mass(), 0.0);
        let e = empirical_law(&[3], 2).unwrap();
        assert_eq!(e.probs(), &[0.0, 0.0]);
        assert_eq!(e.tail_mass(), 1.0);
        assert_eq!(empirical_law(&[], 2), Err(Error::EmptySample));
    }

    #[test]
    fn moment_examples() {
        let m = moments(&TruncatedLaw::point_mass(2).unwrap());
        assert_eq!(m.mean, 2.0);
        assert!(!m.tail_unresolved);
        assert_eq!(moments(&uniform12()).mean, 1.5);
        assert!(moments(&make_law(vec![0.5], 0.5).unwrap()).tail_unresolved);
    }

    fn arb_law(max_len: usize) -> impl Strategy<Value = TruncatedLaw> {
        (1u64..4, prop::collection::vec(0.0f64..1.0, 1..max_len)).prop_filter_map(
            "zero mass",
            |(start, w)| {
                let s: f64 = w.iter().sum();
                (s > 1e-3).then(|| {
                    TruncatedLaw::with_start(start, w.iter().map(|x| x / s).collect(), 0.0).unwrap()
                })
            },
        )
    }

    proptest! {
        #[test]
        fn convolution_commutes_and_associates(a in arb_law(8), b in arb_law(8), c in arb_law(8)) {
            let ab = convolve(&a, &b);
            let ba = convolve(&b, &a);
            prop_assert_eq!(ab.start(), ba.start());
            for (x, y) in ab.probs().iter().zip(ba.probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            let l = convolve(&ab, &c);
            let r = convolve(&a, &convolve(&b, &c));
            prop_assert_eq!((l.start(), l.end()), (r.start(), r.end()));
            for (x, y) in l.probs().iter().zip(r.probs()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            prop_assert!(l.is_normalized(INTERNAL_TOLERANCE));
        }

        #[test]
        fn tv_is_a_metric_on_exact_laws(a in arb_law(10), b in arb_law(10), c in arb_law(10)) {
            let ab = tv_distance(&a, &b);
            prop_assert!((ab.upper - ab.lower).abs() <= 1e-15);
            prop_assert_eq!(tv_distance(&a, &a).upper, 0.0);
            let bc = tv_distance(&b, &c).lower;
            let ac = tv_distance(&a, &c).lower;
            prop_assert!(ac <= ab.lower + bc + 1e-12);
        }

        #[test]
        fn mixtures_conserve_mass(w in 0.0f64..=1.0, a in arb_law(10), b in arb_law(10)) {
            prop_assert!(mix(w, &a, &b).unwrap().is_normalized(INTERNAL_TOLERANCE));
        }
    }
}
