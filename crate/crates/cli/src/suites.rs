//! Property suites shared by `selftest`, `heat-check` and the acceptance tests.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use selberg_core::conformal::{heat_residual, tau_derivative_fd, transform_checks, SpoiledBlock, ThetaPower};
use selberg_core::elliptic::{i_integral, j_integral, ratio_scan, verify_identity, JKernel};
use selberg_core::gamma::{gamma, rhs_constant, selberg_oracle, selberg_value};
use selberg_core::quadrature::{continued_integral, tanh_sinh, AxisSingularitySpec};
use selberg_core::theta::{theta1, theta1_jet, theta_level};
use selberg_core::{BlockCandidate, ModularPoint, Result, SelbergClassicalParams, SelbergJob, ThetaLevelIndex};
use serde::Serialize;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// The check demands `value > tolerance` rather than `value ≤ tolerance`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub lower_bound: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
            detail: None,
            lower_bound: false,
        }
    }

    /// Passes when `value > threshold` (negative controls).
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance: threshold,
            pass: value > threshold,
            detail: None,
            lower_bound: true,
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, err: impl ToString) -> Self {
        Check {
            name: name.into(),
            value: f64::INFINITY,
            tolerance,
            pass: false,
            detail: Some(err.to_string()),
            lower_bound: false,
        }
    }

    /// How close the check is to failing; above 1 means failed.
    pub fn margin(&self) -> f64 {
        if self.lower_bound {
            self.tolerance / self.value
        } else if self.tolerance == 0.0 {
            if self.value == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.value / self.tolerance
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    fn from_result(name: &str, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(v) => Check::at_most(name, v, tolerance),
            Err(e) => Check::failed(name, tolerance, e),
        }
    }
}

/// Controls shared by the suites.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub eps_series: f64,
    pub quad_level: Option<u32>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            eps_series: selberg_core::theta::DEFAULT_EPS_SERIES,
            quad_level: None,
        }
    }
}

impl SuiteConfig {
    fn mp(&self, tau: Complex64) -> Result<ModularPoint> {
        ModularPoint::with_accuracy(tau, self.eps_series, selberg_core::theta::DEFAULT_MAX_TERMS)
    }

    fn job(&self, p: u32, lambda: f64, tau: Complex64) -> Result<SelbergJob> {
        let mut job = SelbergJob::new(p, c(lambda, 0.0), self.mp(tau)?)?;
        if let Some(level) = self.quad_level {
            job.quad_level = level;
        }
        Ok(job)
    }

    fn rng(&self, salt: u64) -> StdRng {
        StdRng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }
}

/// |I₁ − K₁θ₁²| / |K₁θ₁²| at λ ∈ {0.15, 0.3, 0.45}, τ = i.
pub fn identity_p1(cfg: &SuiteConfig, tol: f64) -> Vec<Check> {
    [0.15, 0.3, 0.45]
        .iter()
        .map(|&lambda| {
            let name = format!("identity p=1 lambda={lambda}");
            let run = || -> Result<Check> {
                let mut job = cfg.job(1, lambda, I)?;
                job.tol = tol;
                let start = std::time::Instant::now();
                let rep = verify_identity(&job)?;
                let secs = start.elapsed().as_secs_f64();
                let mut check = Check::at_most(&name, rep.rel_residual, tol);
                check.pass = rep.pass;
                Ok(check.with_detail(format!("err_est {:.1e}, {secs:.1} s", rep.quad_err_est)))
            };
            run().unwrap_or_else(|e| Check::failed(&name, tol, e))
        })
        .collect()
}

/// p = 2 at λ = 0.3, τ = i through the ε-ladder.
pub fn identity_p2(cfg: &SuiteConfig, tol: f64) -> Check {
    let name = "identity p=2 lambda=0.3";
    let run = || -> Result<Check> {
        let mut job = cfg.job(2, 0.3, I)?;
        job.tol = tol;
        let start = std::time::Instant::now();
        let rep = verify_identity(&job)?;
        let secs = start.elapsed().as_secs_f64();
        let mut check = Check::at_most(name, rep.rel_residual, tol);
        check.pass = rep.pass;
        let phase = rep.ratio.arg() / PI;
        Ok(check.with_detail(format!(
            "lhs/rhs = {:.6}·exp({phase:.6}·πi), err_est {:.1e}, {secs:.0} s",
            rep.ratio.norm(),
            rep.quad_err_est + rep.extrapolation_err_est
        )))
    };
    run().unwrap_or_else(|e| Check::failed(name, tol, e))
}

/// Spread of I₁/θ₁² over four λ at τ = i and 2i, and the gap between the two τ.
pub fn proportionality_p1(cfg: &SuiteConfig, tol: f64) -> Vec<Check> {
    let lambdas: Vec<Complex64> = [0.15, 0.25, 0.35, 0.45].iter().map(|&l| c(l, 0.0)).collect();
    let mut checks = Vec::new();
    let mut means = Vec::new();
    for tau in [1.0, 2.0] {
        let name = format!("ratio spread p=1 tau={tau}i");
        match cfg.job(1, 0.3, c(0.0, tau)) {
            Ok(template) => {
                let scan = ratio_scan(&template, &lambdas);
                let spread = match (scan.points.iter().all(|pt| pt.ratio.is_some()), scan.spread) {
                    (true, Some(s)) => s,
                    _ => f64::INFINITY,
                };
                checks.push(Check::at_most(name, spread, tol));
                means.push(scan.mean);
            }
            Err(e) => checks.push(Check::failed(name, tol, e)),
        }
    }
    let gap = match means.as_slice() {
        [Some(a), Some(b)] => rel(*a, *b),
        _ => f64::INFINITY,
    };
    checks.push(Check::at_most("ratio p=1 tau=i vs tau=2i", gap, tol));
    checks
}

/// Heat equation and transformation laws of θ₁^{p+1} on random (λ, τ) in
/// the validated domain, plus negative controls.
pub fn conformal(cfg: &SuiteConfig, ps: &[u32], samples: usize) -> Vec<Check> {
    let mut rng = cfg.rng(4);
    let mut heat = 0.0f64;
    let mut transform = 0.0f64;
    let mut weyl = 0.0f64;
    let mut fd = 0.0f64;
    let mut errors = Vec::new();
    for &p in ps {
        let cand = ThetaPower::block(p);
        for _ in 0..samples {
            let lambda = c(rng.gen_range(0.02..0.98), 0.0);
            let tau = c(0.0, rng.gen_range(0.5..4.0));
            let mut run = || -> Result<()> {
                let mp = cfg.mp(tau)?;
                heat = heat.max(heat_residual(&cand, lambda, &mp)?.norm());
                let rep = transform_checks(&cand, lambda, &mp)?;
                transform = transform.max(rep.period.max(rep.quasi_period));
                weyl = weyl.max(rep.weyl);
                let series = cand.jet(lambda, &mp)?.d_tau;
                fd = fd.max(rel(tau_derivative_fd(&cand, lambda, &mp, 1e-4)?, series));
                Ok(())
            };
            if let Err(e) = run() {
                errors.push(format!("p={p} lambda={lambda} tau={tau}: {e}"));
            }
        }
    }
    let label = ps.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    let mut checks = vec![
        Check::at_most(format!("heat residual p={{{label}}}"), heat, 1e-9),
        Check::at_most(format!("transformation defects p={{{label}}}"), transform, 1e-11),
        Check::at_most(format!("Weyl parity defect p={{{label}}}"), weyl, 1e-12),
        Check::at_most(format!("tau-derivative vs differences p={{{label}}}"), fd, 1e-6),
    ];
    if !errors.is_empty() {
        for check in &mut checks {
            check.pass = false;
            check.detail = Some(errors.join("; "));
        }
    }
    let negatives = || -> Result<(f64, f64)> {
        let mp = cfg.mp(I)?;
        let wrong = heat_residual(&ThetaPower { p: 1, exponent: 1 }, c(0.3, 0.0), &mp)?.norm();
        let spoiled = transform_checks(&SpoiledBlock { p: 1 }, c(0.3, 0.0), &mp)?.period;
        Ok((wrong, spoiled))
    };
    match negatives() {
        Ok((wrong, spoiled)) => {
            checks.push(Check::above("wrong power rejected by heat equation", wrong, 1e-3));
            checks.push(Check::above("spoiled candidate breaks periodicity", spoiled, 1e-2));
        }
        Err(e) => checks.push(Check::failed("negative controls", 0.0, e)),
    }
    checks
}

/// Closed form against cubature of the defining integral.
pub fn classical_selberg(cfg: &SuiteConfig, triples: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    let closed = SelbergClassicalParams::real(2, 1.0, 1.0, 0.5).and_then(|p| selberg_value(&p));
    checks.push(Check::from_result(
        "B_2(1,1,1/2) closed form vs 1/6",
        1e-12,
        closed.map(|v| rel(v, c(1.0 / 6.0, 0.0))),
    ));
    checks.push(Check::from_result(
        "B_2(1,1,1/2) cubature vs 1/6",
        1e-8,
        selberg_oracle(2, 1.0, 1.0, 0.5, 6).map(|v| (v - 1.0 / 6.0).abs() * 6.0),
    ));
    let mut rng = cfg.rng(5);
    let mut worst = 0.0f64;
    let mut failure = None;
    for k in 0..triples {
        let p = 1 + (k % 2) as u32;
        let (a, b, g) = (rng.gen_range(0.3..3.0), rng.gen_range(0.3..3.0), rng.gen_range(0.0..2.0));
        let run = || -> Result<f64> {
            let closed = selberg_value(&SelbergClassicalParams::real(p, a, b, g)?)?;
            let oracle = selberg_oracle(p, a, b, g, 6)?;
            Ok((closed.re - oracle).abs() / closed.re.abs() + closed.im.abs() / closed.re.abs())
        };
        match run() {
            Ok(v) => worst = worst.max(v),
            Err(e) => failure = Some(format!("p={p} ({a}, {b}, {g}): {e}")),
        }
    }
    let mut check = Check::at_most(format!("{triples} random triples closed form vs cubature"), worst, 1e-8);
    if let Some(f) = failure {
        check.pass = false;
        check.detail = Some(f);
    }
    checks.push(check);
    checks
}

/// Taylor-subtraction continuation against series and plain-quadrature oracles.
pub fn continuation(cfg: &SuiteConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    // ∫₀¹ u^{−3/2} eᵘ du = Σ 1/(n!(n − ½))
    let series = {
        let mut fact = 1.0;
        (0..40)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                1.0 / (fact * (n as f64 - 0.5))
            })
            .sum::<f64>()
    };
    let exp_g = |n: selberg_core::Node| Ok(c(n.x.exp(), 0.0));
    let spec = AxisSingularitySpec::with_exponents(c(-0.5, 0.0), c(1.0, 0.0));
    let level = cfg.quad_level.unwrap_or(selberg_core::quadrature::DEFAULT_LEVEL_1D);
    checks.push(Check::from_result(
        "continued u^-3/2 e^u vs series",
        1e-10,
        spec.clone()
            .and_then(|s| continued_integral(exp_g, &s, level))
            .map(|r| (r.value.re - series).abs() / series.abs() + r.value.im.abs()),
    ));
    checks.push(Check::from_result(
        "subtraction-order independence",
        1e-9,
        spec.and_then(|s| {
            let a = continued_integral(exp_g, &s, level)?;
            let b = continued_integral(exp_g, &s.with_extra_orders(1), level)?;
            Ok(rel(a.value, b.value))
        }),
    ));
    let convergent = || -> Result<f64> {
        let mut job = cfg.job(1, 0.3, I)?;
        job.a = c(1.0, 0.0);
        let kernel = JKernel::new(&job)?;
        let plain = tanh_sinh(|n| kernel.cube_value(&[n], false), job.quad_level)?;
        Ok(rel(j_integral(&job)?.value, plain.value))
    };
    checks.push(Check::from_result("a=1 continuation vs plain quadrature", 1e-8, convergent()));
    let order_independent = || -> Result<f64> {
        let job = cfg.job(1, 0.3, I)?;
        let mut extra = job.clone();
        extra.extra_subtraction = 1;
        Ok(rel(j_integral(&job)?.value, j_integral(&extra)?.value))
    };
    checks.push(Check::from_result("J_1 subtraction-order independence", 1e-8, order_independent()));
    checks
}

/// Theta-kernel laws on a random grid of (t, τ).
pub fn theta_kernel(cfg: &SuiteConfig, points: usize) -> Vec<Check> {
    let mut rng = cfg.rng(7);
    let mut odd = 0.0f64;
    let mut period = 0.0f64;
    let mut quasi = 0.0f64;
    let mut heat = 0.0f64;
    let mut level = 0.0f64;
    let mut errors = Vec::new();
    for _ in 0..points {
        let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.0));
        let t = c(rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3));
        let kappa = rng.gen_range(2..8u32);
        let m = rng.gen_range(0..2 * kappa as i64);
        let mut run = || -> Result<()> {
            let mp = cfg.mp(tau)?;
            let th = theta1(t, &mp, 0)?;
            odd = odd.max(rel(theta1(-t, &mp, 0)?, -th));
            period = period.max(rel(theta1(t + 1.0, &mp, 0)?, -th));
            let factor = -(-I * PI * tau - 2.0 * PI * I * t).exp();
            quasi = quasi.max(rel(theta1(t + tau, &mp, 0)?, factor * th));
            let jet = theta1_jet(t, &mp)?;
            heat = heat.max(rel(jet.d[2], 4.0 * PI * I * jet.dtau));
            let idx = ThetaLevelIndex::new(kappa, m)?;
            let v = theta_level(idx, t, &mp)?;
            let factor = (-2.0 * PI * I * kappa as f64 * (t + tau)).exp();
            level = level
                .max(rel(theta_level(idx, t + 2.0, &mp)?, v))
                .max(rel(theta_level(idx, t + 2.0 * tau, &mp)?, factor * v));
            Ok(())
        };
        if let Err(e) = run() {
            errors.push(format!("t={t} tau={tau}: {e}"));
        }
    }
    let mut checks = vec![
        Check::at_most("theta1 oddness", odd, 1e-12),
        Check::at_most("theta1 period 1 (sign -1)", period, 1e-12),
        Check::at_most("theta1 quasi-period tau", quasi, 1e-12),
        Check::at_most("theta1'' = 4 pi i d_tau theta1", heat, 1e-12),
        Check::at_most("theta_{kappa,m} period and quasi-period", level, 1e-12),
    ];
    if !errors.is_empty() {
        for check in &mut checks {
            check.pass = false;
            check.detail = Some(errors.join("; "));
        }
    }
    checks
}

/// Γ recurrence and reflection on a random grid.
pub fn gamma_laws(cfg: &SuiteConfig, points: usize) -> Vec<Check> {
    let mut rng = cfg.rng(9);
    let mut recurrence = 0.0f64;
    let mut reflection = 0.0f64;
    for _ in 0..points {
        let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.05..5.0));
        let run = || -> Result<(f64, f64)> {
            let rec = rel(gamma(z + 1.0)?, z * gamma(z)?);
            let refl = rel(gamma(z)? * gamma(1.0 - z)?, PI / (PI * z).sin());
            Ok((rec, refl))
        };
        let (a, b) = run().unwrap_or((f64::INFINITY, f64::INFINITY));
        recurrence = recurrence.max(a);
        reflection = reflection.max(b);
    }
    let k1 = (|| -> Result<f64> {
        let closed = 4.0 * PI * gamma(c(0.75, 0.0))? / gamma(c(0.25, 0.0))?;
        Ok(rel(rhs_constant(1)?, closed))
    })();
    vec![
        Check::at_most("gamma recurrence", recurrence, 1e-12),
        Check::at_most("gamma reflection", reflection, 1e-12),
        Check::from_result("K_1 = 4 pi Gamma(3/4)/Gamma(1/4)", 1e-12, k1),
    ]
}

/// Skew-symmetry I_p(−λ) = (−1)^{p+1} I_p(λ) within the combined error.
pub fn skew_symmetry(cfg: &SuiteConfig, p: u32, lambda: f64) -> Check {
    let name = format!("skew-symmetry p={p} lambda={lambda}");
    let run = || -> Result<Check> {
        let plus = i_integral(&cfg.job(p, lambda, I)?)?;
        let minus = i_integral(&cfg.job(p, -lambda, I)?)?;
        let sign = if p.is_multiple_of(2) { -1.0 } else { 1.0 };
        let bound = (plus.err_est + minus.err_est).max(1e-14 * plus.value.norm());
        Ok(Check::at_most(&name, (minus.value - sign * plus.value).norm(), bound))
    };
    run().unwrap_or_else(|e| Check::failed(&name, 0.0, e))
}

/// Everything that runs in seconds.
pub fn quick(cfg: &SuiteConfig) -> Vec<Check> {
    let mut checks = theta_kernel(cfg, 40);
    checks.extend(gamma_laws(cfg, 40));
    checks.extend(classical_selberg(cfg, 6));
    checks.extend(continuation(cfg));
    checks.extend(conformal(cfg, &[1, 2, 3, 4], 10));
    checks.push(skew_symmetry(cfg, 1, 0.2));
    checks.extend(identity_p1(cfg, 1e-6));
    checks
}
