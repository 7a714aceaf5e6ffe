//! The acceptance criteria as runnable checks.
//!
//! Each check returns a [`Criterion`] with a single observed statistic compared against a
//! fixed threshold, plus the table of per-cell values it was computed from. Random inputs come
//! from [`crate::rng::stream`] with a fixed task index per check, so every result is a pure
//! function of the master seed.

use rand::Rng;
use serde::Serialize;

use crate::borel::{BorelParams, DEFAULT_CAP};
use crate::concentration::{
    delta_limit, mgf_chain, mgf_moment_check, Side, TailRow, UpperTailParams,
};
use crate::error::Result;
use crate::lawkit::{make_law, moments, tv_distance, TruncatedLaw};
use crate::queue::{bound_qbd1, bound_qbd2, BoundsRow, ServiceModel};
use crate::rng::stream;
use crate::sizebias::{
    check_stochastic_order, geometric_sum_law, mixture_rhs, size_bias, size_biased_borel, x_mean,
};
use crate::stein::{
    abel_identity_holds, solve_f, stein_residual, theorem1_bound, SteinTable, TestFunction,
};
use crate::table::{Cell, Table};

pub const LAMBDA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const STEIN_LAMBDAS: [f64; 3] = [0.3, 0.5, 0.7];
pub const QUEUE_LAMBDAS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
pub const SMALL_LAMBDAS: [f64; 3] = [0.05, 0.025, 0.0125];
pub const TAIL_POINTS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

// pinned tolerances, one per criterion
pub const TOL_NORMALIZATION: f64 = 1e-12;
pub const TOL_MOMENTS_REL: f64 = 1e-6;
pub const TOL_SIZE_BIAS_TV: f64 = 1e-8;
pub const TOL_GEOMETRIC_TV: f64 = 1e-8;
pub const TOL_LEMMA1: f64 = 1e-12;
pub const ABEL_MAX: u32 = 60;
pub const TOL_STEIN_RESIDUAL: f64 = 1e-7;
pub const LEMMA2_RATIO: f64 = 1.0;
pub const THEOREM1_RATIO: f64 = 1.0;
pub const TOL_MD1_TV: f64 = 0.01;
pub const QUEUE_SIGMAS: f64 = 3.0;
pub const TOL_STABILIZATION: f64 = 0.05;
pub const TOL_BREAKPOINT: f64 = 1e-12;
pub const TOL_CHAIN_REL: f64 = 1e-9;
pub const TOL_X_MEAN_REL: f64 = 1e-6;
pub const ORDER_WINDOW: u64 = 500;

const EPS: f64 = 1e-10;
const STEIN_SIZE: usize = 120;
const LEMMA1_SIZE: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub criterion_id: u32,
    pub status: Status,
    pub observed: f64,
    pub threshold: f64,
    #[serde(skip)]
    pub name: &'static str,
    #[serde(skip)]
    pub detail: String,
    /// Extra diagnostics that do not affect the status.
    #[serde(skip)]
    pub notes: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Criterion {
    pub fn new(id: u32, name: &'static str, observed: f64, threshold: f64, ok: bool) -> Self {
        Criterion {
            criterion_id: id,
            status: Status::from_bool(ok),
            observed,
            threshold,
            name,
            detail: String::new(),
            notes: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// A failure for a check that could not be evaluated.
    pub fn errored(id: u32, name: &'static str, why: impl std::fmt::Display) -> Self {
        Criterion::new(id, name, f64::NAN, f64::NAN, false).with_detail(format!("error: {why}"))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `criterion 4 PASS lemma1-coefficients: observed 1.2e-17 threshold 1e-12 (detail)`
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        let mut s = format!(
            "criterion {:>2} {status} {}: observed {:.6e} threshold {:.6e}",
            self.criterion_id, self.name, self.observed, self.threshold
        );
        if !self.detail.is_empty() {
            s.push_str(&format!(" ({})", self.detail));
        }
        s
    }
}

/// Grid size and master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub quick: bool,
}

impl RunOptions {
    fn queue_samples(&self) -> u64 {
        if self.quick {
            200_000
        } else {
            1_000_000
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Borel law validity: normalization and truncated moments.
pub fn borel_validity() -> Result<Criterion> {
    let mut table = Table::new(
        "borel",
        &[
            "lambda",
            "window_end",
            "window_mass",
            "tail_mass",
            "mean",
            "mean_exact",
            "variance",
            "variance_exact",
        ],
    );
    let (mut worst_norm, mut worst_moment) = (0.0f64, 0.0f64);
    for &l in &LAMBDA_GRID {
        let p = BorelParams::new(l)?;
        let law = p.law(1e-13)?;
        let m = moments(&law);
        worst_norm = worst_norm.max((law.window_mass() + law.tail_mass() - 1.0).abs());
        worst_moment = worst_moment
            .max(relative(m.mean, p.mean()))
            .max(relative(m.variance(), p.variance()));
        table.push(vec![
            l.into(),
            law.end().into(),
            law.window_mass().into(),
            law.tail_mass().into(),
            m.mean.into(),
            p.mean().into(),
            m.variance().into(),
            p.variance().into(),
        ]);
    }
    let ok = worst_norm <= TOL_NORMALIZATION && worst_moment <= TOL_MOMENTS_REL;
    let mut c = Criterion::new(1, "borel-law-validity", worst_moment, TOL_MOMENTS_REL, ok)
        .with_detail(format!(
            "max |mass - 1| {worst_norm:.3e} vs {TOL_NORMALIZATION:.0e}; observed is max relative moment error"
        ));
    c.tables.push(table);
    Ok(c)
}

/// Size-bias identity and the geometric-sum representation share one table.
fn sizebias_rows() -> Result<(Table, f64, f64)> {
    let mut table = Table::new(
        "sizebias",
        &[
            "lambda",
            "identity_tv_lower",
            "identity_tv_upper",
            "geometric_tv_lower",
            "geometric_tv_upper",
        ],
    );
    let (mut worst_identity, mut worst_geometric) = (0.0f64, 0.0f64);
    for &l in &LAMBDA_GRID {
        let p = BorelParams::new(l)?;
        let zstar = size_biased_borel(&p, EPS)?;
        let z = p.law_with_window(zstar.end())?;
        let identity = tv_distance(&zstar, &mixture_rhs(&z, &zstar, &p, EPS)?);
        // a Borel law truncated at eps has a biased tail of order end * eps / mean, so the
        // reference is built on the window where the biased tail itself is below eps
        let direct = size_bias(&z)?;
        let geometric = tv_distance(&geometric_sum_law(&p, EPS)?, &direct);
        worst_identity = worst_identity.max(identity.upper);
        worst_geometric = worst_geometric.max(geometric.upper);
        table.push(vec![
            l.into(),
            identity.lower.into(),
            identity.upper.into(),
            geometric.lower.into(),
            geometric.upper.into(),
        ]);
    }
    Ok((table, worst_identity, worst_geometric))
}

/// Criteria 2 and 3 together, since they share the biased laws.
pub fn size_bias_checks() -> Result<(Criterion, Criterion)> {
    let (table, identity, geometric) = sizebias_rows()?;
    let mut c2 = Criterion::new(
        2,
        "size-bias-identity",
        identity,
        TOL_SIZE_BIAS_TV,
        identity <= TOL_SIZE_BIAS_TV,
    )
    .with_detail(format!("max TV upper over the lambda grid, eps {EPS:.0e}"));
    c2.tables.push(table);
    let c3 = Criterion::new(
        3,
        "geometric-sum-representation",
        geometric,
        TOL_GEOMETRIC_TV,
        geometric <= TOL_GEOMETRIC_TV,
    )
    .with_detail(format!("max TV upper over the lambda grid, eps {EPS:.0e}"));
    Ok((c2, c3))
}

/// Coefficient bounds on the `M = 60` table for every grid `λ`.
pub fn lemma1_coefficients() -> Result<Criterion> {
    let mut worst = f64::NEG_INFINITY;
    let mut tables = Vec::new();
    for &l in &LAMBDA_GRID {
        let p = BorelParams::new(l)?;
        let t = SteinTable::build(&p, LEMMA1_SIZE)?;
        worst = worst.max(t.max_bound_excess());
        tables.push(stein_table(&t));
    }
    let mut c = Criterion::new(
        4,
        "lemma1-coefficients",
        worst,
        TOL_LEMMA1,
        worst <= TOL_LEMMA1,
    )
    .with_detail(format!("max of |a_km| - bound, M {LEMMA1_SIZE}"));
    c.tables = tables;
    Ok(c)
}

/// `k, m, a_km, lemma1_bound` rows of a coefficient table.
pub fn stein_table(t: &SteinTable) -> Table {
    let mut table = Table::new(
        format!("stein_lambda_{}", t.lambda()),
        &["k", "m", "a_km", "lemma1_bound"],
    );
    for (k, m, a) in t.entries() {
        let bound = crate::stein::coefficient_bound(t.params(), k as u64, (m - k) as u64);
        table.push(vec![k.into(), m.into(), a.into(), bound.into()]);
    }
    table
}

pub fn abel_identity() -> Criterion {
    let failures = (1..=ABEL_MAX).filter(|&j| !abel_identity_holds(j)).count();
    Criterion::new(5, "abel-identity", failures as f64, 0.0, failures == 0)
        .with_detail(format!("exact integer comparison for j <= {ABEL_MAX}"))
}

fn uniform_h<R: Rng>(rng: &mut R, size: usize) -> Result<TestFunction> {
    TestFunction::new((0..size).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

/// Stein-equation residuals for 20 random test functions per `λ`.
pub fn stein_residuals(opts: &RunOptions) -> Result<Criterion> {
    let mut worst = 0.0f64;
    for (i, &l) in STEIN_LAMBDAS.iter().enumerate() {
        let p = BorelParams::new(l)?;
        let table = SteinTable::build(&p, STEIN_SIZE)?;
        let mut rng = stream(opts.seed, 600 + i as u64);
        for _ in 0..20 {
            let h = uniform_h(&mut rng, STEIN_SIZE)?;
            let sol = solve_f(&h, &table)?;
            for k in 2..=30 {
                worst = worst.max(stein_residual(&sol, &h, &table, k)?);
            }
        }
    }
    Ok(Criterion::new(
        6,
        "stein-equation-residual",
        worst,
        TOL_STEIN_RESIDUAL,
        worst <= TOL_STEIN_RESIDUAL,
    )
    .with_detail(format!("20 uniform h per lambda, k <= 30, M {STEIN_SIZE}")))
}

/// `sup_k |f_h(k)| <= (1-λ)^{-2}` plus truncation, 100 random `h` with values in `[-1, 1]`.
///
/// Notes record the same solutions against `osc(h) / (1-λ)^2`, and `[0, 1]`-valued `h`
/// against `(1-λ)^{-2}`; neither affects the status.
pub fn lemma2_sup_norm(opts: &RunOptions) -> Result<Criterion> {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    let mut per_lambda = Vec::new();
    for (i, &l) in STEIN_LAMBDAS.iter().enumerate() {
        let p = BorelParams::new(l)?;
        let table = SteinTable::build(&p, STEIN_SIZE)?;
        let unit = (1.0 - l).powi(-2);
        let mut rng = stream(opts.seed, 700 + i as u64);
        let (mut violations, mut lam_worst, mut osc_worst) = (0, 0.0f64, 0.0f64);
        for _ in 0..100 {
            let h = uniform_h(&mut rng, STEIN_SIZE)?;
            let sol = solve_f(&h, &table)?;
            let ratio = sol.sup_norm() / (unit + sol.max_truncation());
            if ratio > LEMMA2_RATIO {
                violations += 1;
            }
            lam_worst = lam_worst.max(ratio);
            let (lo, hi) = h
                .values()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            osc_worst = osc_worst.max(sol.sup_norm() / ((hi - lo) * unit + sol.max_truncation()));
        }
        let mut unit_worst = 0.0f64;
        let mut rng = stream(opts.seed, 750 + i as u64);
        for _ in 0..100 {
            let h = TestFunction::new((0..STEIN_SIZE).map(|_| rng.gen_range(0.0..=1.0)).collect())?;
            let sol = solve_f(&h, &table)?;
            unit_worst = unit_worst.max(sol.sup_norm() / (unit + sol.max_truncation()));
        }
        worst = worst.max(lam_worst);
        per_lambda.push(format!(
            "lambda {l}: {violations}/100 over, max ratio {lam_worst:.4}"
        ));
        notes.push(format!(
            "lambda {l}: h in [0,1] max ratio to (1-lambda)^-2 {unit_worst:.4}; h in [-1,1] max ratio to osc(h)(1-lambda)^-2 {osc_worst:.4}"
        ));
    }
    let mut c = Criterion::new(
        7,
        "lemma2-sup-norm",
        worst,
        LEMMA2_RATIO,
        worst <= LEMMA2_RATIO,
    )
    .with_detail(format!(
        "max of sup|f| / ((1-lambda)^-2 + truncation); {}",
        per_lambda.join("; ")
    ));
    c.notes = notes;
    Ok(c)
}

/// A mean-preserving perturbation of `z`: up to three symmetric bumps `(+s, -2s, +s)`.
fn perturbation<R: Rng>(z: &TruncatedLaw, rng: &mut R) -> Result<TruncatedLaw> {
    let mut probs = z.probs().to_vec();
    let bumps = rng.gen_range(1..=3usize);
    for _ in 0..bumps {
        let centre = rng.gen_range(2..=12u64);
        let spread = rng.gen_range(1..centre);
        let c = (centre - 1) as usize;
        let size = rng.gen::<f64>() * 0.45 * z.prob(centre) / bumps as f64;
        probs[c - spread as usize] += size;
        probs[c] -= 2.0 * size;
        probs[c + spread as usize] += size;
    }
    make_law(probs, z.tail_mass())
}

/// Exact TV to Borel against the size-bias bound on random mean-preserving perturbations.
pub fn theorem1_domination(opts: &RunOptions) -> Result<Criterion> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (i, &l) in [0.3, 0.5].iter().enumerate() {
        let p = BorelParams::new(l)?;
        let z = p.law(1e-12)?;
        let mut rng = stream(opts.seed, 800 + i as u64);
        for _ in 0..60 {
            let w = perturbation(&z, &mut rng)?;
            let exact = tv_distance(&w, &z);
            let bound = theorem1_bound(&w, &p, 1e-12)?;
            worst = worst.max(exact.upper / bound.upper);
            cases += 1;
        }
    }
    Ok(Criterion::new(
        8,
        "theorem1-domination",
        worst,
        THEOREM1_RATIO,
        worst <= THEOREM1_RATIO,
    )
    .with_detail(format!(
        "max exact TV upper / bound upper over {cases} perturbations"
    )))
}

/// M/D/1 busy periods against Borel.
pub fn md1_exactness(opts: &RunOptions) -> Result<Criterion> {
    let mut worst = 0.0f64;
    for (i, &l) in [0.3, 0.5].iter().enumerate() {
        let row = BoundsRow::compute(
            l,
            &ServiceModel::Deterministic,
            1_000_000,
            opts.seed,
            900 + i as u32,
            DEFAULT_CAP,
            EPS,
        )?;
        worst = worst.max(row.tv_lower);
    }
    Ok(
        Criterion::new(9, "md1-exactness", worst, TOL_MD1_TV, worst <= TOL_MD1_TV)
            .with_detail("max empirical TV lower, n 1e6"),
    )
}

/// Successive relative changes of `values`; stable when they shrink and end below `tol`.
fn stabilizes(values: &[f64], tol: f64) -> (bool, f64) {
    let changes: Vec<f64> = values.windows(2).map(|w| relative(w[1], w[0])).collect();
    let shrinking = changes.windows(2).all(|c| c[1] <= c[0]);
    let last = changes.last().copied().unwrap_or(0.0);
    (shrinking && last <= tol, last)
}

pub fn queue_columns() -> &'static [&'static str] {
    &[
        "lambda",
        "service_kind",
        "service_params",
        "n",
        "censored",
        "tv_lower",
        "tv_upper",
        "qbd1",
        "qbd2_or_NA",
        "var_s",
        "e_abs_s",
    ]
}

pub fn queue_row(r: &BoundsRow) -> Vec<Cell> {
    vec![
        r.lambda.into(),
        r.service_kind.into(),
        r.service_params.clone().into(),
        r.n.into(),
        r.censored.into(),
        r.tv_lower.into(),
        r.tv_upper.into(),
        r.qbd1.into(),
        r.qbd2.into(),
        r.var_s.into(),
        r.e_abs_s.into(),
    ]
}

/// Simulated TV against both bounds, and the `O(λ²)` behaviour of the bounds.
pub fn queue_bounds(opts: &RunOptions) -> Result<Criterion> {
    let n = opts.queue_samples();
    let mut table = Table::new("queue", queue_columns());
    let mut worst = f64::NEG_INFINITY;
    let mut mean_failures = 0;
    for (i, &l) in QUEUE_LAMBDAS.iter().enumerate() {
        for (j, s) in ServiceModel::test_grid().iter().enumerate() {
            let task = 1000 + 10 * i as u32 + j as u32;
            let summary = crate::queue::simulate_task(l, s, n, opts.seed, task, DEFAULT_CAP)?;
            let row = BoundsRow::from_summary(&summary, EPS)?;
            // how far the noise-corrected lower bound sits above the best bound, as a ratio
            let excess = (row.tv_lower - QUEUE_SIGMAS * row.sigma) / row.best_bound();
            worst = worst.max(excess);
            table.push(queue_row(&row));
            if summary.censored_fraction() < 1e-4 {
                let (mean, se) = summary.mean_and_se();
                if (mean - 1.0 / (1.0 - l)).abs() > 3.0 * se {
                    mean_failures += 1;
                }
            }
        }
    }

    let mut stable = true;
    let mut last_changes = Vec::new();
    for s in ServiceModel::test_grid() {
        let q1: Vec<f64> = SMALL_LAMBDAS
            .iter()
            .map(|&l| bound_qbd1(l, &s).map(|b| b / (l * l)))
            .collect::<Result<_>>()?;
        let q2: Vec<f64> = SMALL_LAMBDAS
            .iter()
            .map(|&l| bound_qbd2(l, &s).map(|b| b / (l * l)))
            .collect::<Result<_>>()?;
        for v in [q1, q2] {
            let (ok, last) = stabilizes(&v, TOL_STABILIZATION);
            stable &= ok;
            last_changes.push(last);
        }
    }
    let max_change = last_changes.iter().copied().fold(0.0, f64::max);
    let ok = worst <= 1.0 && stable;
    let mut c = Criterion::new(10, "queue-bounds", worst, 1.0, ok).with_detail(format!(
        "max (tv_lower - 3 sigma) / min bound, n {n}; bound/lambda^2 last relative change {max_change:.3e} (limit {TOL_STABILIZATION}), stabilizing {stable}"
    ));
    c.notes.push(format!(
        "mean check E[N] = 1/(1-lambda) within 3 se: {mean_failures} of {} cells outside",
        QUEUE_LAMBDAS.len() * 4
    ));
    c.tables.push(table);
    Ok(c)
}

pub fn tail_columns() -> &'static [&'static str] {
    &[
        "lambda",
        "t",
        "side",
        "exact",
        "exact_err",
        "bound",
        "delta_used",
        "gamma",
        "K",
    ]
}

pub fn tail_row(r: &TailRow) -> Vec<Cell> {
    vec![
        r.lambda.into(),
        r.t.into(),
        r.side.as_str().into(),
        r.exact.into(),
        r.exact_err.into(),
        r.bound.into(),
        r.delta_used.into(),
        r.gamma.into(),
        r.k.into(),
    ]
}

/// Tail domination, breakpoint continuity, the moment check and the mgf comparison.
pub fn concentration() -> Result<Criterion> {
    let mut table = Table::new("tails", tail_columns());
    let mut worst = 0.0f64;
    for &l in &LAMBDA_GRID {
        for &t in &TAIL_POINTS {
            for side in [Side::Lower, Side::Upper] {
                let row = TailRow::compute(l, t, side)?;
                worst = worst.max((row.exact - row.exact_err) / row.bound);
                table.push(tail_row(&row));
            }
        }
    }

    let (mut gap, mut mgf_ok, mut chain_ok) = (0.0f64, true, true);
    for &l in &LAMBDA_GRID {
        for frac in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let p = UpperTailParams::new(l, frac * delta_limit(l))?;
            let t = p.breakpoint();
            let c = (1.0 - l).powi(2) / l;
            let gaussian = -t * t / (2.0 * p.k * c);
            let exponential = -p.gamma * t + 0.5 * p.k * p.gamma * p.gamma * c;
            gap = gap.max((gaussian.exp() - exponential.exp()).abs());
            mgf_ok &= mgf_moment_check(&p)?;
            let (lhs, rhs) = mgf_chain(&p, p.gamma / 2.0)?;
            chain_ok &= lhs <= rhs * (1.0 + TOL_CHAIN_REL);
        }
    }
    let ok = worst <= 1.0 && gap <= TOL_BREAKPOINT && mgf_ok && chain_ok;
    let mut c = Criterion::new(11, "concentration", worst, 1.0, ok).with_detail(format!(
        "max (exact - err) / bound; breakpoint gap {gap:.3e} (limit {TOL_BREAKPOINT:.0e}); moment check {mgf_ok}; mgf chain {chain_ok}"
    ));
    c.tables.push(table);
    Ok(c)
}

/// `E[X]` from truncated laws and `ξ + 1 ≼ η`.
pub fn auxiliary_facts() -> Result<Criterion> {
    let mut worst = 0.0f64;
    let mut order = true;
    for &l in &LAMBDA_GRID {
        let p = BorelParams::new(l)?;
        let biased = moments(&size_biased_borel(&p, 1e-13)?).mean;
        let plain = moments(&p.law(1e-13)?).mean;
        worst = worst.max(relative(biased - plain, x_mean(&p)));
        order &= check_stochastic_order(&p, ORDER_WINDOW);
    }
    Ok(Criterion::new(
        12,
        "auxiliary-facts",
        worst,
        TOL_X_MEAN_REL,
        worst <= TOL_X_MEAN_REL && order,
    )
    .with_detail(format!(
        "max relative error of E[X]; stochastic order up to {ORDER_WINDOW}: {order}"
    )))
}

/// Seeded tables computed twice; equal bytes pass.
pub fn reproducibility(opts: &RunOptions) -> Result<Criterion> {
    let first = queue_bounds(opts)?.tables[0].to_csv();
    let second = queue_bounds(opts)?.tables[0].to_csv();
    let same = first == second;
    Ok(Criterion::new(
        13,
        "reproducibility",
        if same { 0.0 } else { 1.0 },
        0.0,
        same,
    )
    .with_detail("queue table generated twice in process"))
}

/// All criteria in order. A check that errors is reported as a failure with the error text.
pub fn run_all(opts: &RunOptions) -> Vec<Criterion> {
    fn or_fail(id: u32, name: &'static str, r: Result<Criterion>) -> Criterion {
        r.unwrap_or_else(|e| Criterion::errored(id, name, e))
    }
    let mut out = vec![or_fail(1, "borel-law-validity", borel_validity())];
    match size_bias_checks() {
        Ok((c2, c3)) => out.extend([c2, c3]),
        Err(e) => {
            out.push(Criterion::errored(2, "size-bias-identity", &e));
            out.push(Criterion::errored(3, "geometric-sum-representation", &e));
        }
    }
    out.push(or_fail(4, "lemma1-coefficients", lemma1_coefficients()));
    out.push(abel_identity());
    out.push(or_fail(6, "stein-equation-residual", stein_residuals(opts)));
    out.push(or_fail(7, "lemma2-sup-norm", lemma2_sup_norm(opts)));
    out.push(or_fail(8, "theorem1-domination", theorem1_domination(opts)));
    out.push(or_fail(9, "md1-exactness", md1_exactness(opts)));
    out.push(or_fail(10, "queue-bounds", queue_bounds(opts)));
    out.push(or_fail(11, "concentration", concentration()));
    out.push(or_fail(12, "auxiliary-facts", auxiliary_facts()));
    out.push(or_fail(13, "reproducibility", reproducibility(opts)));
    out
}
