//! The `eselberg` command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 a tolerance check failed (or a number
//! came out non-finite), 2 invalid input or domain error.

pub mod args;
pub mod output;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use num_complex::Complex64;
use selberg_core::elliptic::{default_level, paper_exponent, ratio_scan, verify_identity};
use selberg_core::gamma::{c_constant, rhs_constant, selberg_oracle, selberg_value};
use selberg_core::theta::{theta1, theta_level, DEFAULT_MAX_TERMS};
use selberg_core::{EpsLadder, Error, ModularPoint, SelbergClassicalParams, SelbergJob, ThetaLevelIndex};
use serde::Serialize;
use serde_json::Value;

use args::{Cli, Command, Format, Shared};
use output::{complex_cells, csv_table, flat_csv, fmt_f64, has_null, render_json, to_json};
use suites::{Check, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

enum Failure {
    Invalid(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::InvalidDomain(_)
            | Error::InvalidArgument(_)
            | Error::PoleProximity { .. }
            | Error::PoleAtNonPositiveInteger { .. }
            | Error::NonConvergent { .. }
            | Error::DivisionDegenerate { .. } => Failure::Invalid(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

/// A rendered command result.
struct Outcome {
    doc: Value,
    /// Custom CSV table; `None` flattens `doc` into one row.
    csv: Option<String>,
    pass: bool,
}

impl Outcome {
    fn new<T: Serialize>(doc: &T, pass: bool) -> Result<Self, Failure> {
        let doc = to_json(doc).map_err(|e| Failure::Numerical(e.to_string()))?;
        Ok(Outcome { doc, csv: None, pass })
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    let rendered = e.to_string();
                    let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
                    eprintln!("eselberg: {}", line.trim_start_matches("error: "));
                    EXIT_INVALID
                }
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("eselberg: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("eselberg: {msg}");
            EXIT_CHECK_FAILED
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Failure> {
    let shared = &cli.shared;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(match shared.threads {
            Some(0) => return Err(Failure::Invalid("--threads must be at least 1".into())),
            Some(n) => n,
            None => 0,
        })
        .build()
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let outcome = pool.install(|| dispatch(&cli.command, shared))?;
    let text = match shared.format {
        Format::Json => render_json(&outcome.doc),
        Format::Csv => outcome.csv.clone().unwrap_or_else(|| flat_csv(&outcome.doc)),
    };
    match &shared.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Numerical(format!("cannot write output: {e}")))?;
        }
    }
    if outcome.pass && !has_null(&outcome.doc) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_CHECK_FAILED)
    }
}

fn modular_point(shared: &Shared) -> Result<ModularPoint, Failure> {
    Ok(ModularPoint::with_accuracy(shared.tau, shared.eps_series, DEFAULT_MAX_TERMS)?)
}

fn job(shared: &Shared, p: u32, lambda: Complex64) -> Result<SelbergJob, Failure> {
    if !(1..=3).contains(&p) {
        return Err(Failure::Invalid(format!("p = {p} not in 1..=3")));
    }
    let mut job = SelbergJob::new(p, lambda, modular_point(shared)?)?;
    job.quad_level = shared.quad_level.unwrap_or(default_level(p));
    job.eps_ladder = EpsLadder {
        eps0: shared.eps0,
        rungs: shared.eps_rungs,
        ..EpsLadder::default()
    };
    job.tol = shared.tol.unwrap_or(if p == 1 { 1e-6 } else { 1e-3 });
    job.validate()?;
    Ok(job)
}

#[derive(Serialize)]
struct ThetaDoc {
    t: Complex64,
    tau: Complex64,
    order: u32,
    value: Complex64,
}

#[derive(Serialize)]
struct ThetaLevelDoc {
    kappa: u32,
    m: u32,
    lambda: Complex64,
    tau: Complex64,
    value: Complex64,
}

#[derive(Serialize)]
struct SelbergDoc {
    p: u32,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    closed_form: Complex64,
    /// Cubature of the defining integral (real convergent parameters, p ≤ 2).
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_skipped: Option<String>,
    c_p: Complex64,
    k_p: Complex64,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SweepDoc {
    #[serde(flatten)]
    scan: selberg_core::elliptic::RatioScan,
    tol: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ChecksDoc {
    checks: Vec<Check>,
    pass: bool,
}

fn checks_outcome(checks: Vec<Check>) -> Result<Outcome, Failure> {
    let pass = checks.iter().all(|c| c.pass);
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                format!("\"{}\"", c.name.replace('"', "\"\"")),
                fmt_f64(c.value),
                fmt_f64(c.tolerance),
                c.pass.to_string(),
            ]
        })
        .collect();
    let mut outcome = Outcome::new(&ChecksDoc { checks, pass }, pass)?;
    outcome.csv = Some(csv_table(&["name", "value", "tolerance", "pass"], &rows));
    Ok(outcome)
}

fn dispatch(command: &Command, shared: &Shared) -> Result<Outcome, Failure> {
    match command {
        Command::Theta { t, order } => {
            if *order > 3 {
                return Err(Failure::Invalid(format!("--order {order} not in 0..=3")));
            }
            let mp = modular_point(shared)?;
            let value = theta1(*t, &mp, *order)?;
            Outcome::new(
                &ThetaDoc {
                    t: *t,
                    tau: mp.tau(),
                    order: *order,
                    value,
                },
                true,
            )
        }
        Command::ThetaLevel { kappa, m, lambda } => {
            let mp = modular_point(shared)?;
            let idx = ThetaLevelIndex::new(*kappa, *m)?;
            let value = theta_level(idx, *lambda, &mp)?;
            Outcome::new(
                &ThetaLevelDoc {
                    kappa: idx.kappa(),
                    m: idx.m(),
                    lambda: *lambda,
                    tau: mp.tau(),
                    value,
                },
                true,
            )
        }
        Command::Selberg { p, alpha, beta, gamma } => {
            let params = SelbergClassicalParams::new(*p, *alpha, *beta, *gamma)?;
            let closed_form = selberg_value(&params)?;
            let tol = shared.tol.unwrap_or(1e-8);
            let real = [alpha, beta, gamma].iter().all(|z| z.im == 0.0);
            let convergent = real && alpha.re > 0.0 && beta.re > 0.0 && gamma.re >= 0.0;
            let (oracle, skipped) = if (1..=2).contains(p) && convergent {
                let level = shared.quad_level.unwrap_or(default_level(*p));
                (Some(selberg_oracle(*p, alpha.re, beta.re, gamma.re, level)?), None)
            } else {
                (None, Some("cubature needs real alpha, beta > 0, gamma >= 0 and p <= 2".to_string()))
            };
            let rel_diff = oracle.map(|o| (Complex64::new(o, 0.0) - closed_form).norm() / closed_form.norm());
            Outcome::new(
                &SelbergDoc {
                    p: *p,
                    alpha: *alpha,
                    beta: *beta,
                    gamma: *gamma,
                    closed_form,
                    oracle,
                    rel_diff,
                    oracle_skipped: skipped,
                    c_p: c_constant(*p),
                    k_p: rhs_constant(*p)?,
                    tol,
                    pass: rel_diff.is_none_or(|d| d <= tol),
                },
                rel_diff.is_none_or(|d| d <= tol),
            )
        }
        Command::Verify {
            p,
            lambda,
            a,
            extra_subtraction,
        } => {
            let mut job = job(shared, *p, *lambda)?;
            job.a = a.unwrap_or(paper_exponent(*p));
            job.extra_subtraction = *extra_subtraction;
            let report = verify_identity(&job)?;
            let pass = report.pass;
            Outcome::new(&report, pass)
        }
        Command::Sweep {
            p,
            lambda_start,
            lambda_end,
            steps,
        } => {
            if *steps == 0 {
                return Err(Failure::Invalid("--steps must be at least 1".into()));
            }
            let lambdas: Vec<Complex64> = (0..*steps)
                .map(|k| {
                    let s = if *steps == 1 { 0.0 } else { k as f64 / (*steps - 1) as f64 };
                    lambda_start + (lambda_end - lambda_start) * s
                })
                .collect();
            // the template needs some valid λ; every grid point is revalidated
            let template = lambdas
                .iter()
                .find_map(|&l| job(shared, *p, l).ok())
                .map_or_else(|| job(shared, *p, lambdas[0]), Ok)?;
            let tol = shared.tol.unwrap_or(if *p == 1 { 1e-5 } else { 1e-3 });
            let scan = ratio_scan(&template, &lambdas);
            let pass = scan.points.iter().all(|pt| pt.ratio.is_some()) && scan.spread.is_some_and(|s| s <= tol);
            let rows: Vec<Vec<String>> = scan
                .points
                .iter()
                .map(|pt| {
                    let [re, im] = complex_cells(pt.ratio);
                    vec![fmt_f64(pt.lambda.re), fmt_f64(pt.lambda.im), re, im, fmt_f64(pt.err_est)]
                })
                .collect();
            let mut outcome = Outcome::new(&SweepDoc { scan, tol, pass }, pass)?;
            outcome.csv = Some(csv_table(
                &["lambda_re", "lambda_im", "ratio_re", "ratio_im", "err_est"],
                &rows,
            ));
            Ok(outcome)
        }
        Command::HeatCheck {
            p,
            lambda,
            samples,
            seed,
        } => {
            let ps: Vec<u32> = match p {
                Some(0) => return Err(Failure::Invalid("p must be positive".into())),
                Some(p) => vec![*p],
                None => vec![1, 2, 3, 4],
            };
            let cfg = SuiteConfig {
                seed: *seed,
                eps_series: shared.eps_series,
                quad_level: shared.quad_level,
            };
            match lambda {
                Some(lambda) => checks_outcome(single_heat_check(&ps, *lambda, &modular_point(shared)?)?),
                None => checks_outcome(suites::conformal(&cfg, &ps, *samples)),
            }
        }
        Command::Selftest { seed, full } => {
            let cfg = SuiteConfig {
                seed: *seed,
                eps_series: shared.eps_series,
                quad_level: shared.quad_level,
            };
            let mut checks = suites::quick(&cfg);
            if *full {
                checks.extend(suites::proportionality_p1(&cfg, 1e-5));
                checks.push(suites::identity_p2(&cfg, 1e-3));
            }
            checks_outcome(checks)
        }
    }
}

fn single_heat_check(ps: &[u32], lambda: Complex64, mp: &ModularPoint) -> Result<Vec<Check>, Failure> {
    use selberg_core::conformal::{heat_residual, transform_checks, ThetaPower};
    let mut checks = Vec::new();
    for &p in ps {
        let cand = ThetaPower::block(p);
        let r = heat_residual(&cand, lambda, mp)?;
        checks.push(Check::at_most(format!("heat residual p={p}"), r.norm(), 1e-9));
        let rep = transform_checks(&cand, lambda, mp)?;
        checks.push(Check::at_most(format!("period defect p={p}"), rep.period, 1e-11));
        checks.push(Check::at_most(format!("quasi-period defect p={p}"), rep.quasi_period, 1e-11));
        checks.push(Check::at_most(format!("Weyl parity defect p={p}"), rep.weyl, 1e-12));
    }
    Ok(checks)
}
