//! Command-line front end.
//!
//! Exit codes: 0 when every requested assertion passes, 1 when one fails, 2 for usage errors
//! and 3 for numeric failures such as window overflow or quadrature that misses its tolerance.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::borel::{BorelParams, DEFAULT_CAP};
use crate::checks::{self, RunOptions, LAMBDA_GRID, TAIL_POINTS};
use crate::concentration::{Side, TailRow};
use crate::error::Error;
use crate::queue::{simulate, BoundsRow, ServiceModel};
use crate::rng::stream;
use crate::sizebias::{geometric_sum_law, mixture_rhs, size_bias, size_biased_borel};
use crate::stein::{abel_identity_holds, solve_f, stein_residual, SteinTable, TestFunction};
use crate::table::{format_num, Table};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "BOREL_STEIN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "borel-stein",
    version,
    about = "Borel distribution checks and bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Borel mass function and CDF on an adaptive window.
    Pmf {
        #[arg(long, value_parser = parse_lambda)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-10, value_parser = parse_eps)]
        eps: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stein coefficient table with the coefficient, residual, solution-size and Abel suites.
    SteinCheck {
        #[command(flatten)]
        lambdas: LambdaArgs,
        #[arg(long = "table-size", default_value_t = 60, value_parser = clap::value_parser!(u64).range(2..=2000))]
        table_size: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Size-bias identity and geometric-sum representation for Borel laws.
    SbCheck {
        #[command(flatten)]
        lambdas: LambdaArgs,
        #[arg(long, default_value_t = 1e-10, value_parser = parse_eps)]
        eps: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Histogram of simulated busy-period customer counts.
    QueueSim {
        #[arg(long, value_parser = parse_lambda)]
        lambda: f64,
        #[arg(long, default_value = "exponential", value_parser = parse_service)]
        service: ServiceModel,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulated distance to Borel against both computable bounds.
    QueueBounds {
        #[command(flatten)]
        lambdas: LambdaArgs,
        /// Service model; all four test models when omitted.
        #[arg(long, value_parser = parse_service)]
        service: Option<ServiceModel>,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 1e-10, value_parser = parse_eps)]
        eps: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact standardized tails against the lower and optimized upper bounds.
    Tails {
        #[command(flatten)]
        lambdas: LambdaArgs,
        /// Comma-separated tail points.
        #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
        t: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Every acceptance check; writes one CSV per suite and summary.json.
    Report {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        quick: bool,
        /// Output directory.
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct LambdaArgs {
    #[arg(long, value_parser = parse_lambda, conflicts_with = "lambda_grid")]
    lambda: Option<f64>,
    /// Comma-separated values in (0, 1).
    #[arg(long = "lambda-grid", value_delimiter = ',', value_parser = parse_lambda)]
    lambda_grid: Vec<f64>,
}

impl LambdaArgs {
    fn resolve(&self, default: &[f64]) -> Vec<f64> {
        match self.lambda {
            Some(l) => vec![l],
            None if !self.lambda_grid.is_empty() => self.lambda_grid.clone(),
            None => default.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("lambda must lie in (0, 1), got {v}"))
    }
}

fn parse_eps(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("eps must lie in (0, 1), got {v}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

fn parse_service(s: &str) -> Result<ServiceModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidLambda(_)
            | Error::InvalidParameter(_)
            | Error::LambdaOutOfRange(_)
            | Error::DeltaOutOfRange { .. }
            | Error::WeightOutOfRange(_)
            | Error::InvalidIndex(_) => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_NUMERIC,
            message: format!("i/o error: {e}"),
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
/// Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // a second call in the same process finds the pool already built; that is fine
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => eprintln!("warning: ignoring {THREADS_VAR}={value:?}; expected a positive integer"),
    }
}

fn emit(table: &Table, output: &OutputArgs) -> Result<(), Failure> {
    let body = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json()).expect("serializable");
            s.push('\n');
            s
        }
    };
    match &output.out {
        Some(path) => write_file(path, &body),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, body)?;
    Ok(())
}

fn verdict(failures: &[String]) -> i32 {
    match failures.first() {
        None => EXIT_PASS,
        Some(first) => {
            eprintln!("FAIL: {first}");
            if failures.len() > 1 {
                eprintln!("({} further failures)", failures.len() - 1);
            }
            EXIT_ASSERTION
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Pmf {
            lambda,
            eps,
            output,
        } => cmd_pmf(lambda, eps, &output),
        Command::SteinCheck {
            lambdas,
            table_size,
            seed,
            output,
        } => cmd_stein_check(&lambdas.resolve(&[0.3]), table_size as usize, seed, &output),
        Command::SbCheck {
            lambdas,
            eps,
            output,
        } => cmd_sb_check(&lambdas.resolve(&LAMBDA_GRID), eps, &output),
        Command::QueueSim {
            lambda,
            service,
            sim,
            output,
        } => cmd_queue_sim(lambda, &service, &sim, &output),
        Command::QueueBounds {
            lambdas,
            service,
            sim,
            eps,
            output,
        } => cmd_queue_bounds(
            &lambdas.resolve(&checks::QUEUE_LAMBDAS),
            service,
            &sim,
            eps,
            &output,
        ),
        Command::Tails { lambdas, t, output } => {
            let points = if t.is_empty() {
                TAIL_POINTS.to_vec()
            } else {
                t
            };
            cmd_tails(&lambdas.resolve(&LAMBDA_GRID), &points, &output)
        }
        Command::Report { seed, quick, out } => cmd_report(RunOptions { seed, quick }, &out),
    }
}

fn cmd_pmf(lambda: f64, eps: f64, output: &OutputArgs) -> Result<i32, Failure> {
    let law = BorelParams::new(lambda)?.law(eps)?;
    let mut table = Table::new("pmf", &["j", "pmf", "cdf"]);
    let mut cdf = 0.0;
    for (j, p) in law.iter() {
        cdf += p;
        table.push(vec![j.into(), p.into(), cdf.into()]);
    }
    eprintln!(
        "window 1..={} tail_mass {}",
        law.end(),
        format_num(law.tail_mass())
    );
    emit(&table, output)?;
    Ok(EXIT_PASS)
}

fn cmd_stein_check(
    lambdas: &[f64],
    size: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<i32, Failure> {
    let mut failures = Vec::new();
    let mut last_table = None;
    for (i, &l) in lambdas.iter().enumerate() {
        let p = BorelParams::new(l)?;
        let table = SteinTable::build(&p, size)?;

        let excess = table.max_bound_excess();
        report_line(
            &mut failures,
            excess <= checks::TOL_LEMMA1,
            format!("lambda {l}: coefficient bounds, max excess {excess:.3e}"),
        );

        let mut rng = stream(seed, i as u64);
        let (mut residual, mut size_ratio, mut stated_ratio) = (0.0f64, 0.0f64, 0.0f64);
        let unit = (1.0 - l).powi(-2);
        for _ in 0..20 {
            let h = TestFunction::new((0..size).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
            let sol = solve_f(&h, &table)?;
            for k in 2..=size.min(30) as u64 {
                residual = residual.max(stein_residual(&sol, &h, &table, k)?);
            }
            let (lo, hi) = h
                .values()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            for k in 2..=size as u64 {
                let slack = sol.truncation(k);
                let per_k = (hi - lo) * unit / (k - 1) as f64;
                size_ratio = size_ratio.max(sol.f(k).abs() / (per_k + slack));
            }
            stated_ratio = stated_ratio.max(sol.sup_norm() / (unit + sol.max_truncation()));
        }
        report_line(
            &mut failures,
            residual <= checks::TOL_STEIN_RESIDUAL,
            format!("lambda {l}: Stein equation residual {residual:.3e}"),
        );
        report_line(
            &mut failures,
            size_ratio <= 1.0,
            format!(
                "lambda {l}: |f(k)| <= osc(h) (1-lambda)^-2 / (k-1), max ratio {size_ratio:.4}"
            ),
        );
        eprintln!("info: lambda {l}: sup|f| / (1-lambda)^-2 max ratio {stated_ratio:.4}");
        last_table = Some(table);
    }
    let abel = (1..=checks::ABEL_MAX).all(abel_identity_holds);
    report_line(
        &mut failures,
        abel,
        format!("Abel identity for j <= {}", checks::ABEL_MAX),
    );

    if let Some(t) = last_table {
        emit(&checks::stein_table(&t), output)?;
    }
    Ok(verdict(&failures))
}

fn report_line(failures: &mut Vec<String>, ok: bool, what: String) {
    eprintln!("{} {what}", if ok { "ok:" } else { "FAIL:" });
    if !ok {
        failures.push(what);
    }
}

fn cmd_sb_check(lambdas: &[f64], eps: f64, output: &OutputArgs) -> Result<i32, Failure> {
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
    let mut failures = Vec::new();
    for &l in lambdas {
        let p = BorelParams::new(l)?;
        let zstar = size_biased_borel(&p, eps)?;
        let z = p.law_with_window(zstar.end())?;
        let identity = crate::lawkit::tv_distance(&zstar, &mixture_rhs(&z, &zstar, &p, eps)?);
        let geometric = crate::lawkit::tv_distance(&geometric_sum_law(&p, eps)?, &size_bias(&z)?);
        let limit = 100.0 * eps;
        report_line(
            &mut failures,
            identity.upper <= limit,
            format!(
                "lambda {l}: size-bias identity TV upper {:.3e}",
                identity.upper
            ),
        );
        report_line(
            &mut failures,
            geometric.upper <= limit,
            format!("lambda {l}: geometric-sum TV upper {:.3e}", geometric.upper),
        );
        table.push(vec![
            l.into(),
            identity.lower.into(),
            identity.upper.into(),
            geometric.lower.into(),
            geometric.upper.into(),
        ]);
    }
    emit(&table, output)?;
    Ok(verdict(&failures))
}

fn cmd_queue_sim(
    lambda: f64,
    service: &ServiceModel,
    sim: &SimArgs,
    output: &OutputArgs,
) -> Result<i32, Failure> {
    let summary = simulate(lambda, service, sim.n, sim.seed, sim.cap)?;
    let p = BorelParams::new(lambda)?;
    let mut table = Table::new("queue_sim", &["j", "count", "empirical", "borel"]);
    for (i, &c) in summary.counts().iter().enumerate() {
        let j = i as u64 + 1;
        table.push(vec![
            j.into(),
            c.into(),
            (c as f64 / summary.n_samples as f64).into(),
            p.pmf(j).into(),
        ]);
    }
    let (mean, se) = summary.mean_and_se();
    let tv = summary.tv_vs_borel(1e-10)?;
    eprintln!(
        "n {} censored {} mean {} se {} expected_mean {} tv_lower {} tv_upper {}",
        summary.n_samples,
        summary.censored,
        format_num(mean),
        format_num(se),
        format_num(p.mean()),
        format_num(tv.lower),
        format_num(tv.upper)
    );
    emit(&table, output)?;
    Ok(EXIT_PASS)
}

fn cmd_queue_bounds(
    lambdas: &[f64],
    service: Option<ServiceModel>,
    sim: &SimArgs,
    eps: f64,
    output: &OutputArgs,
) -> Result<i32, Failure> {
    let models: Vec<ServiceModel> = match service {
        Some(s) => vec![s],
        None => ServiceModel::test_grid().to_vec(),
    };
    let mut table = Table::new("queue", checks::queue_columns());
    let mut failures = Vec::new();
    for (i, &l) in lambdas.iter().enumerate() {
        if l >= 0.5 {
            eprintln!("note: lambda {l} >= 1/2, so the E[S|S-1|] bound does not apply (NA)");
        }
        for (j, s) in models.iter().enumerate() {
            let task = (i * models.len() + j) as u32;
            let row = BoundsRow::compute(l, s, sim.n, sim.seed, task, sim.cap, eps)?;
            let corrected = row.tv_lower - checks::QUEUE_SIGMAS * row.sigma;
            report_line(
                &mut failures,
                corrected <= row.best_bound(),
                format!(
                    "lambda {l} {s}: tv_lower - 3 sigma {} vs bound {}",
                    format_num(corrected),
                    format_num(row.best_bound())
                ),
            );
            table.push(checks::queue_row(&row));
        }
    }
    emit(&table, output)?;
    Ok(verdict(&failures))
}

fn cmd_tails(lambdas: &[f64], points: &[f64], output: &OutputArgs) -> Result<i32, Failure> {
    let mut table = Table::new("tails", checks::tail_columns());
    let mut failures = Vec::new();
    for &l in lambdas {
        for &t in points {
            for side in [Side::Lower, Side::Upper] {
                let row = TailRow::compute(l, t, side)?;
                if !row.dominated() {
                    failures.push(format!(
                        "lambda {l} t {t} {}: exact {} above bound {}",
                        side.as_str(),
                        format_num(row.exact),
                        format_num(row.bound)
                    ));
                }
                table.push(checks::tail_row(&row));
            }
        }
    }
    emit(&table, output)?;
    Ok(verdict(&failures))
}

fn cmd_report(opts: RunOptions, out: &Path) -> Result<i32, Failure> {
    fs::create_dir_all(out)?;
    let results = checks::run_all(&opts);
    let mut failures = Vec::new();
    for c in &results {
        println!("{}", c.line());
        for note in &c.notes {
            println!("    note: {note}");
        }
        for t in &c.tables {
            write_file(&out.join(format!("{}.csv", t.name)), &t.to_csv())?;
        }
        if !c.passed() {
            failures.push(format!("criterion {} {}", c.criterion_id, c.name));
        }
    }
    let mut summary = serde_json::to_string_pretty(&results).expect("serializable");
    summary.push('\n');
    write_file(&out.join("summary.json"), &summary)?;
    println!(
        "{}/{} criteria passed; results in {}",
        results.len() - failures.len(),
        results.len(),
        out.display()
    );
    Ok(verdict(&failures))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        assert_eq!(run(["borel-stein", "pmf", "--lambda", "1.5"]), EXIT_USAGE);
        assert_eq!(run(["borel-stein", "pmf"]), EXIT_USAGE);
        assert_eq!(run(["borel-stein", "nonsense"]), EXIT_USAGE);
        assert_eq!(
            run(["borel-stein", "queue-sim", "--lambda", "0.3", "--n", "0"]),
            EXIT_USAGE
        );
        assert_eq!(
            run([
                "borel-stein",
                "queue-sim",
                "--lambda",
                "0.3",
                "--service",
                "gamma:-1"
            ]),
            EXIT_USAGE
        );
        assert_eq!(
            run([
                "borel-stein",
                "tails",
                "--lambda",
                "0.3",
                "--lambda-grid",
                "0.1,0.2"
            ]),
            EXIT_USAGE
        );
    }

    #[test]
    fn numeric_errors_map_to_three() {
        let f: Failure = Error::WindowOverflow { cap: 10 }.into();
        assert_eq!(f.code, EXIT_NUMERIC);
        let f: Failure = Error::QuadratureFailure {
            tol: 1e-10,
            err: 1.0,
        }
        .into();
        assert_eq!(f.code, EXIT_NUMERIC);
        let f: Failure = Error::LambdaOutOfRange(0.7).into();
        assert_eq!(f.code, EXIT_USAGE);
    }

    #[test]
    fn lambda_resolution() {
        let a = LambdaArgs {
            lambda: None,
            lambda_grid: vec![0.1, 0.2],
        };
        assert_eq!(a.resolve(&[0.5]), vec![0.1, 0.2]);
        let b = LambdaArgs {
            lambda: Some(0.4),
            lambda_grid: vec![],
        };
        assert_eq!(b.resolve(&[0.5]), vec![0.4]);
    }
}
