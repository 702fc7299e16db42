//! The elliptic Selberg integral
//!
//! ```text
//! J_p(λ, τ; a) = ∫_{Δ_p} ∏ E(t_j)^a ∏_{j<k} E(t_j − t_k)^{1/(p+1)}
//!                        ∏ σ_λ(t_j) · θ_{2(p+1),p+1}(λ + Σt_j/(p+1)) dt,
//! I_p(λ, τ) = J_p(λ) + (−1)^{p+1} J_p(−λ)   at a = −p/(p+1),
//! ```
//!
//! continued analytically in `a`, and the identity `I_p = K_p θ₁(λ)^{p+1}`.
//!
//! For p = 2 the exponent of the two-variable collapse, 2a + 1/3, is exactly
//! −1 at the target `a`, so the subtraction formula has a pole there. `I_p`
//! is then taken as the ε → 0 limit of `I_p(a + ε)` along a geometric ladder.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::rhs_constant;
use crate::quadrature::{
    richardson_extrapolate, AxisSingularitySpec, Node, QuadratureResult, DEFAULT_LEVEL_1D,
    DEFAULT_LEVEL_2D, DEFAULT_LEVEL_3D,
};
use crate::simplex::{integrate_simplex, simplex_to_cube, SimplexIntegrand, SimplexPoint};
use crate::theta::{theta1_value, theta_level, LogEBranch, ModularPoint, ThetaLevelIndex, LATTICE_THRESHOLD};

/// Exponents within this distance of a non-positive integer are treated as
/// continuation poles and handled by the ε-ladder.
pub const POLE_PROXIMITY: f64 = 1e-6;

/// Geometric schedule of exponent shifts ε_k = eps0·ratio^k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsLadder {
    pub eps0: f64,
    pub ratio: f64,
    pub rungs: usize,
}

impl Default for EpsLadder {
    fn default() -> Self {
        EpsLadder {
            eps0: 0.04,
            ratio: 0.5,
            rungs: 5,
        }
    }
}

impl EpsLadder {
    pub fn shifts(&self) -> Vec<f64> {
        (0..self.rungs)
            .map(|k| self.eps0 * self.ratio.powi(k as i32))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps0 > 0.0 && self.eps0 < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "eps0 = {} must lie in (0, 0.5)",
                self.eps0
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ladder ratio {} must lie in (0, 1)",
                self.ratio
            )));
        }
        if self.rungs < 3 {
            return Err(Error::InsufficientSamples(self.rungs));
        }
        Ok(())
    }
}

/// One elliptic Selberg evaluation.
#[derive(Debug, Clone)]
pub struct SelbergJob {
    pub p: u32,
    pub lambda: Complex64,
    pub mp: ModularPoint,
    /// Exponent of E(t_j); the identity holds at −p/(p+1).
    pub a: Complex64,
    /// Tanh-sinh level per cube axis.
    pub quad_level: u32,
    pub eps_ladder: EpsLadder,
    /// Target relative residual.
    pub tol: f64,
    /// Taylor terms subtracted beyond the minimum at each singular endpoint.
    pub extra_subtraction: u32,
}

/// Paper exponent −p/(p+1).
pub fn paper_exponent(p: u32) -> Complex64 {
    Complex64::new(-(p as f64) / (p as f64 + 1.0), 0.0)
}

pub fn default_level(p: u32) -> u32 {
    match p {
        1 => DEFAULT_LEVEL_1D,
        2 => DEFAULT_LEVEL_2D,
        _ => DEFAULT_LEVEL_3D,
    }
}

impl SelbergJob {
    pub fn new(p: u32, lambda: Complex64, mp: ModularPoint) -> Result<Self> {
        let job = SelbergJob {
            p,
            lambda,
            a: paper_exponent(p),
            quad_level: default_level(p),
            eps_ladder: EpsLadder::default(),
            tol: 1e-6,
            extra_subtraction: 0,
            mp,
        };
        job.validate()?;
        Ok(job)
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Result<Self> {
        let job = SelbergJob {
            lambda,
            ..self.clone()
        };
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.p) {
            return Err(Error::InvalidArgument(format!("p = {} not in 1..=3", self.p)));
        }
        if !self.lambda.is_finite() || !self.a.is_finite() {
            return Err(Error::InvalidArgument("lambda and a must be finite".into()));
        }
        let th = theta1_value(self.lambda, &self.mp)?;
        if th.norm() <= LATTICE_THRESHOLD * self.mp.theta1_prime0().norm() {
            return Err(Error::InvalidDomain("lambda on lattice".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol = {} must be positive", self.tol)));
        }
        self.eps_ladder.validate()
    }

    /// λ real in (0, 1) and τ = iT with T ∈ [0.5, 4].
    pub fn in_validated_domain(&self) -> bool {
        let tau = self.mp.tau();
        self.lambda.im == 0.0
            && self.lambda.re > 0.0
            && self.lambda.re < 1.0
            && self.mp.is_imaginary()
            && (0.5..=4.0).contains(&tau.im)
    }
}

/// Per-axis exponents of the J_p integrand under [`simplex_to_cube`].
///
/// Axis i (1-based) collapses r = p − i + 1 variables to 0, giving
/// c = r·a + r(r−1)/(2(p+1)); axis 1 also meets t₁ → 1 with exponent `a`.
pub fn axis_exponents(p: u32, a: Complex64) -> Result<Vec<AxisSingularitySpec>> {
    if !(1..=3).contains(&p) {
        return Err(Error::InvalidArgument(format!("p = {p} not in 1..=3")));
    }
    let d = 1.0 / (p as f64 + 1.0);
    (1..=p)
        .map(|i| {
            let r = (p - i + 1) as f64;
            let c_left = a * r + d * r * (r - 1.0) / 2.0;
            let c_right = if i == 1 { a } else { Complex64::new(1.0, 0.0) };
            AxisSingularitySpec::with_exponents(c_left, c_right)
        })
        .collect()
}

/// The J_p integrand on Δ_p, for a fixed job.
pub struct JKernel {
    p: usize,
    lambda: Complex64,
    a: Complex64,
    mp: ModularPoint,
    branch: LogEBranch,
    theta_lambda: Complex64,
    level_index: ThetaLevelIndex,
}

impl JKernel {
    pub fn new(job: &SelbergJob) -> Result<Self> {
        Self::at(job, job.lambda, job.a)
    }

    fn at(job: &SelbergJob, lambda: Complex64, a: Complex64) -> Result<Self> {
        let kappa = 2 * (job.p + 1);
        Ok(JKernel {
            p: job.p as usize,
            lambda,
            a,
            branch: LogEBranch::new(&job.mp)?,
            theta_lambda: theta1_value(lambda, &job.mp)?,
            level_index: ThetaLevelIndex::new(kappa, (job.p + 1) as i64)?,
            mp: job.mp.clone(),
        })
    }

    /// Integrand at a point of the unit cube under [`simplex_to_cube`]; with
    /// `divided` the declared powers of [`axis_exponents`] are removed.
    pub fn cube_value(&self, u: &[Node], divided: bool) -> Result<Complex64> {
        if u.len() != self.p || u.iter().any(|n| !(n.x > 0.0 && n.xc > 0.0)) {
            return Err(Error::InvalidDomain(format!(
                "cube point {u:?} is not interior to (0,1)^{}",
                self.p
            )));
        }
        let x: Vec<f64> = u.iter().map(|n| n.x).collect();
        let (t, jac) = simplex_to_cube(&x);
        // t₁ = u₁ keeps its accurate complement
        let mut comps: Vec<f64> = t.iter().map(|v| 1.0 - v).collect();
        comps[0] = u[0].xc;
        let (log, regular) = self.evaluate(&SimplexPoint::from_ordered_with(&t, &comps))?;
        let mut exponent = log + jac.ln();
        if divided {
            let one = Complex64::new(1.0, 0.0);
            for (spec, n) in axis_exponents(self.p as u32, self.a)?.iter().zip(u) {
                exponent -= (spec.c_left - one) * n.x.ln() + (spec.c_right - one) * n.xc.ln();
            }
        }
        Ok(exponent.exp() * regular)
    }
}

impl SimplexIntegrand for JKernel {
    fn lower_exponent(&self) -> Complex64 {
        self.a
    }

    fn upper_exponent(&self) -> Complex64 {
        self.a
    }

    fn difference_exponent(&self) -> Complex64 {
        Complex64::new(1.0 / (self.p as f64 + 1.0), 0.0)
    }

    // E(1 − x) = E(x)
    fn wraps(&self) -> bool {
        true
    }

    // E(t)^a σ_λ(t) = E(t)^{a−1} θ₁(λ−t)/θ₁(λ)
    fn evaluate(&self, pt: &SimplexPoint) -> Result<(Complex64, Complex64)> {
        let one = Complex64::new(1.0, 0.0);
        let mut log = Complex64::new(0.0, 0.0);
        let mut regular = one;
        for j in 0..pt.dim() {
            let c = pt.coord(j);
            log += (self.a - one) * self.branch.log_e_near(c.value, c.comp, c.ln, c.ln_comp)?;
            regular *= theta1_value(self.lambda - c.value, &self.mp)? / self.theta_lambda;
        }
        let d = self.difference_exponent();
        for diff in pt.differences() {
            let c = &diff.d;
            log += d * self.branch.log_e_near(c.value, c.comp, c.ln, c.ln_comp)?;
        }
        let shift = pt.sum() / (self.p as f64 + 1.0);
        regular *= theta_level(self.level_index, self.lambda + shift, &self.mp)?;
        Ok((log, regular))
    }
}

/// The smooth factor of the J_p integrand at an interior cube point.
pub fn j_integrand(u: &[f64], job: &SelbergJob) -> Result<Complex64> {
    let nodes: Vec<Node> = u.iter().map(|&x| Node::new(x)).collect();
    JKernel::new(job)?.cube_value(&nodes, true)
}

fn j_at(job: &SelbergJob, lambda: Complex64, a: Complex64) -> Result<QuadratureResult> {
    let kernel = JKernel::at(job, lambda, a)?;
    integrate_simplex(&kernel, job.p as usize, job.quad_level, job.extra_subtraction)
}

/// J_p(λ, τ; a), continued analytically in `a`.
pub fn j_integral(job: &SelbergJob) -> Result<QuadratureResult> {
    job.validate()?;
    j_at(job, job.lambda, job.a)
}

/// I_p with its error budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    pub value: Complex64,
    /// Quadrature + extrapolation error.
    pub err_est: f64,
    pub quad_err_est: f64,
    pub extrapolation_err_est: f64,
    pub evals: usize,
    /// (ε, I_p(a + ε)) when the ladder was used.
    pub ladder: Option<Vec<(f64, Complex64)>>,
}

/// True when some collapse exponent r·a + r(r−1)/(2(p+1)) sits on a
/// non-positive integer.
pub fn needs_ladder(p: u32, a: Complex64) -> bool {
    let d = 1.0 / (p as f64 + 1.0);
    (1..=p).any(|r| {
        let r = r as f64;
        let c = a * r + d * r * (r - 1.0) / 2.0;
        c.re < POLE_PROXIMITY && (c - c.re.round()).norm() < POLE_PROXIMITY
    })
}

fn symmetrized(job: &SelbergJob, a: Complex64) -> Result<(Complex64, f64, usize)> {
    let sign = if job.p % 2 == 1 { 1.0 } else { -1.0 };
    let plus = j_at(job, job.lambda, a)?;
    let minus = j_at(job, -job.lambda, a)?;
    Ok((
        plus.value + minus.value * sign,
        plus.err_est + minus.err_est,
        plus.evals + minus.evals,
    ))
}

/// I_p(λ, τ) = J_p(λ) + (−1)^{p+1} J_p(−λ) at the job's exponent.
pub fn i_integral(job: &SelbergJob) -> Result<IntegralValue> {
    job.validate()?;
    if !needs_ladder(job.p, job.a) {
        let (value, err, evals) = symmetrized(job, job.a)?;
        return Ok(IntegralValue {
            value,
            err_est: err,
            quad_err_est: err,
            extrapolation_err_est: 0.0,
            evals,
            ladder: None,
        });
    }
    let shifts = job.eps_ladder.shifts();
    let mut samples = Vec::with_capacity(shifts.len());
    let mut errs = Vec::with_capacity(shifts.len());
    let mut evals = 0;
    for &eps in &shifts {
        let (value, err, n) = symmetrized(job, job.a + eps)?;
        samples.push((eps, value));
        errs.push(err);
        evals += n;
    }
    let ex = richardson_extrapolate(&samples)?;
    let (first, last) = (ex.corrections[0], ex.corrections[ex.corrections.len() - 1]);
    if !(last <= first) {
        return Err(Error::ExtrapolationUnstable { first, last });
    }
    // quadrature errors carried through the extrapolation weights at ε = 0
    let quad_err: f64 = shifts
        .iter()
        .enumerate()
        .map(|(i, &ei)| {
            let w: f64 = shifts
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &ej)| ej / (ej - ei))
                .product();
            w.abs() * errs[i]
        })
        .sum();
    Ok(IntegralValue {
        value: ex.limit,
        err_est: quad_err + ex.err_est,
        quad_err_est: quad_err,
        extrapolation_err_est: ex.err_est,
        evals,
        ladder: Some(samples),
    })
}

/// K_p θ₁(λ, τ)^{p+1}.
pub fn rhs_eval(job: &SelbergJob) -> Result<Complex64> {
    Ok(rhs_constant(job.p)? * theta1_value(job.lambda, &job.mp)?.powu(job.p + 1))
}

/// Outcome of checking `I_p = K_p θ₁(λ)^{p+1}` for one job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub p: u32,
    pub lambda: Complex64,
    pub tau: Complex64,
    pub a: Complex64,
    pub quad_level: u32,
    pub eps_ladder: EpsLadder,
    pub extra_subtraction: u32,
    pub tol: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// lhs / rhs; isolates a constant-factor mismatch from a λ-dependent one.
    pub ratio: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub quad_err_est: f64,
    pub extrapolation_err_est: f64,
    pub ladder_used: bool,
    /// Outside λ ∈ (0,1), τ ∈ i·[0.5, 4] the branch of E is not pinned down.
    pub best_effort: bool,
    pub evals: usize,
    /// Pass rule: rel_residual ≤ tol and the error estimate ≤ tol·|rhs|.
    pub pass: bool,
    /// Why the left-hand side could not be evaluated, if it could not.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Evaluates both sides of the identity. Numerical failures of the left-hand
/// side are reported in [`VerificationReport::failure`] with `pass = false`.
pub fn verify_identity(job: &SelbergJob) -> Result<VerificationReport> {
    job.validate()?;
    let rhs = rhs_eval(job)?;
    let mut report = VerificationReport {
        p: job.p,
        lambda: job.lambda,
        tau: job.mp.tau(),
        a: job.a,
        quad_level: job.quad_level,
        eps_ladder: job.eps_ladder,
        extra_subtraction: job.extra_subtraction,
        tol: job.tol,
        lhs: Complex64::new(f64::NAN, f64::NAN),
        rhs,
        ratio: Complex64::new(f64::NAN, f64::NAN),
        abs_residual: f64::NAN,
        rel_residual: f64::NAN,
        quad_err_est: f64::NAN,
        extrapolation_err_est: f64::NAN,
        ladder_used: needs_ladder(job.p, job.a),
        best_effort: !job.in_validated_domain(),
        evals: 0,
        pass: false,
        failure: None,
    };
    match i_integral(job) {
        Ok(lhs) => {
            report.lhs = lhs.value;
            report.ratio = lhs.value / rhs;
            report.abs_residual = (lhs.value - rhs).norm();
            report.rel_residual = report.abs_residual / rhs.norm();
            report.quad_err_est = lhs.quad_err_est;
            report.extrapolation_err_est = lhs.extrapolation_err_est;
            report.evals = lhs.evals;
            report.pass = report.rel_residual <= job.tol && lhs.err_est <= job.tol * rhs.norm();
        }
        Err(e) => report.failure = Some(e.to_string()),
    }
    Ok(report)
}

/// One grid point of [`ratio_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub lambda: Complex64,
    /// I_p / θ₁^{p+1}; `None` for invalid points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<Complex64>,
    pub err_est: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioScan {
    pub p: u32,
    pub tau: Complex64,
    pub points: Vec<RatioPoint>,
    /// Mean ratio over valid points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Complex64>,
    /// max |r − mean| / |mean| over valid points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
    /// Standard deviation / |mean| over valid points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_stdev: Option<f64>,
}

/// I_p(λ)/θ₁(λ)^{p+1} across a λ-grid; `template` supplies everything but λ.
pub fn ratio_scan(template: &SelbergJob, lambdas: &[Complex64]) -> RatioScan {
    let points: Vec<RatioPoint> = lambdas
        .iter()
        .map(|&lambda| {
            let eval = || -> Result<(Complex64, f64)> {
                let job = template.with_lambda(lambda)?;
                let i = i_integral(&job)?;
                let th = theta1_value(lambda, &job.mp)?.powu(job.p + 1);
                Ok((i.value / th, i.err_est / th.norm()))
            };
            match eval() {
                Ok((ratio, err_est)) => RatioPoint {
                    lambda,
                    ratio: Some(ratio),
                    err_est,
                    error: None,
                },
                Err(e) => RatioPoint {
                    lambda,
                    ratio: None,
                    err_est: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let valid: Vec<Complex64> = points.iter().filter_map(|pt| pt.ratio).collect();
    let (mean, spread, rel_stdev) = if valid.is_empty() {
        (None, None, None)
    } else {
        let n = valid.len() as f64;
        let mean = valid.iter().sum::<Complex64>() / n;
        let spread = valid.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max) / mean.norm();
        let var = valid.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / n;
        (Some(mean), Some(spread), Some(var.sqrt() / mean.norm()))
    };
    RatioScan {
        p: template.p,
        tau: template.mp.tau(),
        points,
        mean,
        spread,
        rel_stdev,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::tanh_sinh;
    use crate::theta::sigma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn job(p: u32, lambda: f64) -> SelbergJob {
        SelbergJob::new(p, c(lambda, 0.0), ModularPoint::new(c(0.0, 1.0)).unwrap()).unwrap()
    }

    #[test]
    fn axis_exponent_examples() {
        let s = axis_exponents(1, c(-0.5, 0.0)).unwrap();
        assert_eq!((s[0].c_left, s[0].c_right), (c(-0.5, 0.0), c(-0.5, 0.0)));
        let s = axis_exponents(2, c(-2.0 / 3.0, 0.0)).unwrap();
        assert!((s[0].c_left - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((s[1].c_left - c(-2.0 / 3.0, 0.0)).norm() < 1e-15);
        let s = axis_exponents(1, c(1.0, 0.0)).unwrap();
        assert_eq!((s[0].c_left, s[0].m_left), (c(1.0, 0.0), 0));
    }

    #[test]
    fn axis_exponents_match_log_log_slopes() {
        // p = 1: slope of ln|f| against ln t is c − 1 at both ends
        let mut jb = job(1, 0.3);
        jb.a = c(-0.5, 0.0);
        let k = JKernel::new(&jb).unwrap();
        let f = |u: f64| k.cube_value(&[Node::new(u)], false).unwrap().norm().ln();
        let slope0 = (f(2e-6) - f(1e-6)) / 2f64.ln();
        let slope1 = (f(1.0 - 2e-6) - f(1.0 - 1e-6)) / 2f64.ln();
        assert!((slope0 + 1.5).abs() < 1e-4, "{slope0}");
        assert!((slope1 + 1.5).abs() < 1e-4, "{slope1}");
        // p = 2, axis 1 collapses both variables: u₁^{c−1} with c = 2a + 1/3
        let mut jb = job(2, 0.3);
        jb.a = c(-2.0 / 3.0, 0.0);
        let k = JKernel::new(&jb).unwrap();
        let f = |u1: f64, u2: f64| k.cube_value(&[Node::new(u1), Node::new(u2)], false).unwrap().norm().ln();
        let s1 = (f(2e-6, 0.5) - f(1e-6, 0.5)) / 2f64.ln();
        let s2 = (f(0.5, 2e-6) - f(0.5, 1e-6)) / 2f64.ln();
        assert!((s1 + 2.0).abs() < 1e-4, "{s1}");
        assert!((s2 + 5.0 / 3.0).abs() < 1e-4, "{s2}");
    }

    #[test]
    fn integrand_is_the_product_of_its_factors() {
        let mut jb = job(1, 0.3);
        jb.a = c(1.0, 0.0);
        let u = 0.5;
        let mp = &jb.mp;
        let e = crate::theta::cap_e(c(u, 0.0), mp).unwrap();
        let s = sigma(jb.lambda, c(u, 0.0), mp).unwrap();
        let idx = ThetaLevelIndex::new(4, 2).unwrap();
        let th = theta_level(idx, jb.lambda + u / 2.0, mp).unwrap();
        let want = e * s * th;
        let got = JKernel::new(&jb).unwrap().cube_value(&[Node::new(u)], false).unwrap();
        assert!((got - want).norm() < 1e-13 * want.norm());
        // a = 1 declares no singular powers
        assert!((j_integrand(&[u], &jb).unwrap() - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn divided_integrand_stays_bounded() {
        let mut jb = job(2, 0.3);
        jb.a = c(-2.0 / 3.0 + 0.04, 0.0);
        for u1 in [1e-4, 1.0 - 1e-4] {
            let g = j_integrand(&[u1, 0.5], &jb).unwrap();
            assert!(g.is_finite() && g.norm() < 1e10, "{u1}: {g}");
        }
    }

    #[test]
    fn convergent_region_matches_plain_quadrature() {
        let mut jb = job(1, 0.3);
        jb.a = c(1.0, 0.0);
        let k = JKernel::new(&jb).unwrap();
        let plain = tanh_sinh(|n| k.cube_value(&[n], false), 7).unwrap();
        let cont = j_integral(&jb).unwrap();
        assert!((plain.value - cont.value).norm() < 1e-8 * plain.value.norm());
    }

    #[test]
    fn p1_j_integral_converged_and_order_independent() {
        let jb = job(1, 0.3);
        let r = j_integral(&jb).unwrap();
        assert!(r.err_est < 1e-8 * r.value.norm(), "{r:?}");
        let mut coarse = jb.clone();
        coarse.quad_level = 6;
        let rc = j_integral(&coarse).unwrap();
        assert!((rc.value - r.value).norm() < 1e-8 * r.value.norm());
        let mut extra = jb.clone();
        extra.extra_subtraction = 1;
        let r2 = j_integral(&extra).unwrap();
        assert!((r2.value - r.value).norm() < 1e-8 * r.value.norm());
    }

    #[test]
    fn continuity_in_a() {
        let mut jb = job(1, 0.3);
        jb.a = c(0.9, 0.0);
        let a09 = j_integral(&jb).unwrap().value;
        jb.a = c(1.0, 0.0);
        let a10 = j_integral(&jb).unwrap().value;
        assert!((a09 - a10).norm() < 0.25 * a10.norm());
    }

    #[test]
    fn p1_matches_frozen_value_and_identity() {
        // mpmath, 40 digits, independent sine-series θ₁
        let i = i_integral(&job(1, 0.3)).unwrap();
        assert!((i.value - 2.3082343291217757).norm() < 1e-9, "{:?}", i.value);
        let report = verify_identity(&job(1, 0.3)).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(!report.best_effort && !report.ladder_used);
    }

    #[test]
    fn coarse_quadrature_fails_honestly() {
        let mut jb = job(1, 0.3);
        jb.quad_level = 2;
        let report = verify_identity(&jb).unwrap();
        assert!(!report.pass);
        assert!(report.quad_err_est > jb.tol * report.rhs.norm());
    }

    #[test]
    fn lattice_lambda_is_rejected() {
        let mp = ModularPoint::new(c(0.0, 1.0)).unwrap();
        let err = SelbergJob::new(1, c(0.0, 0.0), mp).unwrap_err();
        assert_eq!(err, Error::InvalidDomain("lambda on lattice".into()));
    }

    #[test]
    fn rhs_symmetries() {
        for p in [1, 2] {
            let a = rhs_eval(&job(p, 0.3)).unwrap();
            let b = rhs_eval(&job(p, -0.3)).unwrap();
            let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
            assert!((b - a * sign).norm() < 1e-12 * a.norm());
            let shifted = rhs_eval(&job(p, 2.3)).unwrap();
            assert!((shifted - a).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn ladder_is_needed_only_for_p2() {
        assert!(!needs_ladder(1, paper_exponent(1)));
        assert!(needs_ladder(2, paper_exponent(2)));
        assert!(!needs_ladder(3, paper_exponent(3)));
        assert!(!needs_ladder(2, paper_exponent(2) + 0.04));
    }

    #[test]
    fn scan_flags_lattice_points() {
        let lambdas = [c(0.0, 0.0), c(0.3, 0.0)];
        let scan = ratio_scan(&job(1, 0.3), &lambdas);
        assert!(scan.points[0].ratio.is_none() && scan.points[0].error.is_some());
        let r = scan.points[1].ratio.unwrap();
        assert!((r - 4.247296545963878651).norm() < 1e-6);
    }
}
