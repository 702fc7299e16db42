//! Complex log-gamma, the classical Selberg closed form B_p(α, β, γ) and the
//! constants c_p, K_p = c_p·B_p(½ + 1/(2(p+1)), −p/(p+1), 1/(2(p+1))).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{integrate_simplex, SimplexIntegrand, SimplexPoint};
use crate::sum::ComplexSum;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Distance to a non-positive integer below which Γ counts as singular.
pub const POLE_TOLERANCE: f64 = 1e-8;

// Godfrey's Lanczos coefficients, g = 607/128.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64, factor: &str) -> Result<()> {
    if z.re <= 0.5 {
        let n = z.re.round();
        if n <= 0.0 && (z - Complex64::new(n, 0.0)).norm() < POLE_TOLERANCE {
            return Err(Error::PoleAtNonPositiveInteger {
                z,
                factor: factor.to_string(),
            });
        }
    }
    Ok(())
}

fn lanczos(z: Complex64) -> Complex64 {
    let x = z - 1.0;
    let mut s = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + s.ln()
}

// log sin(πz) for Im z ≥ 0, continuous in the closed upper half-plane and
// real on (0, 1).
fn log_sin_pi_upper(z: Complex64) -> Complex64 {
    let w = (2.0 * PI * I * z).exp();
    Complex64::new(-std::f64::consts::LN_2, PI / 2.0) - I * PI * z + (1.0 - w).ln()
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return lanczos(z);
    }
    if z.im < 0.0 {
        return log_gamma_unchecked(z.conj()).conj();
    }
    Complex64::new(PI.ln(), 0.0) - log_sin_pi_upper(z) - lanczos(1.0 - z)
}

/// log Γ(z), continuous on ℂ minus the non-positive real axis (the branch
/// whose imaginary part is the continuous extension from the positive reals).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z, "log_gamma")?;
    Ok(log_gamma_unchecked(z))
}

/// Γ(z).
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// Parameters (p, α, β, γ) of the classical Selberg integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelbergClassicalParams {
    pub p: u32,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma_exp: Complex64,
}

impl SelbergClassicalParams {
    pub fn new(p: u32, alpha: Complex64, beta: Complex64, gamma_exp: Complex64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("Selberg dimension p must be positive".into()));
        }
        let params = SelbergClassicalParams {
            p,
            alpha,
            beta,
            gamma_exp,
        };
        params.gamma_arguments().into_iter().try_for_each(|(z, name)| check_pole(z, &name))?;
        Ok(params)
    }

    pub fn real(p: u32, alpha: f64, beta: f64, gamma_exp: f64) -> Result<Self> {
        Self::new(
            p,
            Complex64::new(alpha, 0.0),
            Complex64::new(beta, 0.0),
            Complex64::new(gamma_exp, 0.0),
        )
    }

    // (argument, sign, label) for every gamma factor of the closed form.
    fn gamma_arguments(&self) -> Vec<(Complex64, String)> {
        self.signed_factors().into_iter().map(|(z, _, n)| (z, n)).collect()
    }

    fn signed_factors(&self) -> Vec<(Complex64, f64, String)> {
        let (a, b, g) = (self.alpha, self.beta, self.gamma_exp);
        let p = self.p as f64;
        let mut out = Vec::with_capacity(5 * self.p as usize);
        for j in 0..self.p {
            let jf = j as f64;
            out.push((1.0 + g + jf * g, 1.0, format!("Gamma(1+gamma+{j}gamma)")));
            out.push((a + jf * g, 1.0, format!("Gamma(alpha+{j}gamma)")));
            out.push((b + jf * g, 1.0, format!("Gamma(beta+{j}gamma)")));
            out.push((1.0 + g, -1.0, "Gamma(1+gamma)".to_string()));
            out.push((
                a + b + (p + jf - 1.0) * g,
                -1.0,
                format!("Gamma(alpha+beta+(p+{j}-1)gamma)"),
            ));
        }
        out
    }
}

fn ln_factorial(p: u32) -> f64 {
    (2..=p).map(|k| (k as f64).ln()).sum()
}

/// Closed form of the Selberg integral,
/// `(1/p!) ∏_{j<p} Γ(1+γ+jγ)Γ(α+jγ)Γ(β+jγ) / (Γ(1+γ)Γ(α+β+(p+j−1)γ))`,
/// accumulated in log space and exponentiated once.
pub fn selberg_value(params: &SelbergClassicalParams) -> Result<Complex64> {
    let mut acc = ComplexSum::default();
    acc.add(Complex64::new(-ln_factorial(params.p), 0.0));
    for (z, sign, name) in params.signed_factors() {
        check_pole(z, &name)?;
        acc.add(log_gamma_unchecked(z) * sign);
    }
    Ok(acc.total().exp())
}

/// c_p = −(2π)^{p/2} e^{πip/(p+1)} e^{−πi(p+2)/4} ∏_{j=1}^{p} (1 − e^{−πij/(p+1)}).
pub fn c_constant(p: u32) -> Complex64 {
    c_constant_ordered(p, false)
}

pub(crate) fn c_constant_ordered(p: u32, reversed: bool) -> Complex64 {
    let pf = p as f64;
    let lead = -(2.0 * PI).powf(pf / 2.0)
        * (I * PI * pf / (pf + 1.0)).exp()
        * (-I * PI * (pf + 2.0) / 4.0).exp();
    let factor = |j: u32| 1.0 - (-I * PI * j as f64 / (pf + 1.0)).exp();
    if reversed {
        (1..=p).rev().fold(lead, |acc, j| acc * factor(j))
    } else {
        (1..=p).fold(lead, |acc, j| acc * factor(j))
    }
}

/// Selberg parameters appearing on the right-hand side of the elliptic identity.
pub fn elliptic_selberg_params(p: u32) -> Result<SelbergClassicalParams> {
    let q = p as f64 + 1.0;
    SelbergClassicalParams::real(p, 0.5 + 0.5 / q, -(p as f64) / q, 0.5 / q)
}

/// K_p = c_p · B_p(½ + 1/(2(p+1)), −p/(p+1), 1/(2(p+1))).
pub fn rhs_constant(p: u32) -> Result<Complex64> {
    Ok(c_constant(p) * selberg_value(&elliptic_selberg_params(p)?)?)
}

struct ClassicalIntegrand {
    alpha: f64,
    beta: f64,
    gamma_exp: f64,
}

impl SimplexIntegrand for ClassicalIntegrand {
    fn lower_exponent(&self) -> Complex64 {
        Complex64::new(self.alpha, 0.0)
    }

    fn upper_exponent(&self) -> Complex64 {
        Complex64::new(self.beta, 0.0)
    }

    fn difference_exponent(&self) -> Complex64 {
        Complex64::new(2.0 * self.gamma_exp, 0.0)
    }

    fn evaluate(&self, pt: &SimplexPoint) -> Result<(Complex64, Complex64)> {
        let mut log = 0.0;
        for j in 0..pt.dim() {
            let c = pt.coord(j);
            log += (self.alpha - 1.0) * c.ln + (self.beta - 1.0) * c.ln_comp;
        }
        if self.gamma_exp != 0.0 {
            for diff in pt.differences() {
                log += 2.0 * self.gamma_exp * diff.d.ln;
            }
        }
        Ok((Complex64::new(log, 0.0), Complex64::new(1.0, 0.0)))
    }
}

/// Direct cubature of the defining Selberg integral over the ordered simplex
/// (no closed form involved). Test oracle for [`selberg_value`].
pub fn selberg_oracle(p: u32, alpha: f64, beta: f64, gamma_exp: f64, level: u32) -> Result<f64> {
    if !(1..=2).contains(&p) {
        return Err(Error::InvalidArgument(format!("selberg_oracle supports p in {{1, 2}}, got {p}")));
    }
    if !(alpha > 0.0 && beta > 0.0 && gamma_exp >= 0.0) {
        return Err(Error::InvalidDomain(
            "selberg_oracle needs alpha, beta > 0 and gamma >= 0".into(),
        ));
    }
    let integrand = ClassicalIntegrand {
        alpha,
        beta,
        gamma_exp,
    };
    let res = integrate_simplex(&integrand, p as usize, level, 0)?;
    let tol = 1e-9 * res.value.norm().max(1e-300);
    if res.err_est > tol {
        return Err(Error::ToleranceNotReached {
            err: res.err_est,
            tol,
        });
    }
    Ok(res.value.re)
}
