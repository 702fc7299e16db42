//! Membership checks for the space of conformal blocks: level-2(p+1) theta
//! functions in λ that are Weyl skew-symmetric and solve
//!
//! ```text
//! 4πi(p+1) ∂_τu = ∂²_λu + p(p+1) ρ′(λ, τ) u.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::{rho, theta1_jet, theta1_value, ModularPoint};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// u together with the derivatives the heat equation needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateJet {
    pub u: Complex64,
    pub d_lambda: Complex64,
    pub d2_lambda: Complex64,
    pub d_tau: Complex64,
}

/// A function u(λ, τ) proposed as a conformal block for a given p.
pub trait BlockCandidate: Sync {
    fn p(&self) -> u32;

    fn value(&self, lambda: Complex64, mp: &ModularPoint) -> Result<Complex64>;

    fn jet(&self, lambda: Complex64, mp: &ModularPoint) -> Result<CandidateJet>;
}

/// u = θ₁(λ, τ)^exponent; a block when exponent = p + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPower {
    pub p: u32,
    pub exponent: u32,
}

impl ThetaPower {
    /// The block θ₁^{p+1}.
    pub fn block(p: u32) -> Self {
        ThetaPower { p, exponent: p + 1 }
    }
}

impl BlockCandidate for ThetaPower {
    fn p(&self) -> u32 {
        self.p
    }

    fn value(&self, lambda: Complex64, mp: &ModularPoint) -> Result<Complex64> {
        Ok(theta1_value(lambda, mp)?.powu(self.exponent))
    }

    fn jet(&self, lambda: Complex64, mp: &ModularPoint) -> Result<CandidateJet> {
        let th = theta1_jet(lambda, mp)?;
        let n = self.exponent;
        let nf = n as f64;
        // θ^{n−k} with non-negative powers only, so θ = 0 stays finite
        let pow = |k: u32| if k > n { Complex64::new(0.0, 0.0) } else { th.d[0].powu(n - k) };
        Ok(CandidateJet {
            u: pow(0),
            d_lambda: pow(1) * th.d[1] * nf,
            d2_lambda: pow(2) * th.d[1] * th.d[1] * (nf * (nf - 1.0)) + pow(1) * th.d[2] * nf,
            d_tau: pow(1) * th.dtau * nf,
        })
    }
}

/// λ·θ₁^{p+1}: solves nothing and breaks periodicity; a negative control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpoiledBlock {
    pub p: u32,
}

impl BlockCandidate for SpoiledBlock {
    fn p(&self) -> u32 {
        self.p
    }

    fn value(&self, lambda: Complex64, mp: &ModularPoint) -> Result<Complex64> {
        Ok(lambda * ThetaPower::block(self.p).value(lambda, mp)?)
    }

    fn jet(&self, lambda: Complex64, mp: &ModularPoint) -> Result<CandidateJet> {
        let b = ThetaPower::block(self.p).jet(lambda, mp)?;
        Ok(CandidateJet {
            u: lambda * b.u,
            d_lambda: b.u + lambda * b.d_lambda,
            d2_lambda: b.d_lambda * 2.0 + lambda * b.d2_lambda,
            d_tau: lambda * b.d_tau,
        })
    }
}

/// [4πi(p+1)∂_τu − ∂²_λu − p(p+1)ρ′u] / max(|∂²_λu|, p(p+1)|ρ′u|).
pub fn heat_residual(cand: &dyn BlockCandidate, lambda: Complex64, mp: &ModularPoint) -> Result<Complex64> {
    let p = cand.p() as f64;
    let rho_prime = rho(lambda, mp, 1)?;
    let jet = cand.jet(lambda, mp)?;
    let potential = jet.u * rho_prime * (p * (p + 1.0));
    let residual = I * (4.0 * PI * (p + 1.0)) * jet.d_tau - jet.d2_lambda - potential;
    let scale = jet.d2_lambda.norm().max(potential.norm());
    if scale == 0.0 {
        return Ok(residual);
    }
    Ok(residual / scale)
}

/// Central-difference ∂_τu with step `h` along the imaginary τ-axis.
pub fn tau_derivative_fd(cand: &dyn BlockCandidate, lambda: Complex64, mp: &ModularPoint, h: f64) -> Result<Complex64> {
    let shifted = |s: f64| {
        ModularPoint::with_accuracy(mp.tau() + I * s, mp.eps_series(), mp.max_terms())
    };
    let plus = cand.value(lambda, &shifted(h)?)?;
    let minus = cand.value(lambda, &shifted(-h)?)?;
    Ok((plus - minus) / (2.0 * h * I))
}

/// Relative defects of the three defining transformation laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub p: u32,
    pub lambda: Complex64,
    pub tau: Complex64,
    /// |u(λ+2) − u(λ)| / |u(λ)|
    pub period: f64,
    /// |u(λ+2τ) − e^{−4πi(p+1)(λ+τ)}u(λ)| / |u(λ+2τ)|
    pub quasi_period: f64,
    /// |u(−λ) − (−1)^{p+1}u(λ)| / |u(λ)|
    pub weyl: f64,
}

impl TransformReport {
    pub fn max_defect(&self) -> f64 {
        self.period.max(self.quasi_period).max(self.weyl)
    }
}

pub fn transform_checks(cand: &dyn BlockCandidate, lambda: Complex64, mp: &ModularPoint) -> Result<TransformReport> {
    let p = cand.p();
    let tau = mp.tau();
    let u = cand.value(lambda, mp)?;
    if u == Complex64::new(0.0, 0.0) {
        return Err(Error::PoleProximity {
            what: "lambda",
            magnitude: 0.0,
        });
    }
    let shifted = cand.value(lambda + 2.0, mp)?;
    let quasi = cand.value(lambda + 2.0 * tau, mp)?;
    let factor = (-I * (4.0 * PI * (p as f64 + 1.0)) * (lambda + tau)).exp();
    let reflected = cand.value(-lambda, mp)?;
    let sign = if p.is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(TransformReport {
        p,
        lambda,
        tau,
        period: (shifted - u).norm() / u.norm(),
        quasi_period: (quasi - factor * u).norm() / quasi.norm(),
        weyl: (reflected - sign * u).norm() / u.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mp(tau: Complex64) -> ModularPoint {
        ModularPoint::new(tau).unwrap()
    }

    #[test]
    fn theta_square_solves_heat_equation() {
        let r = heat_residual(&ThetaPower::block(1), c(0.3, 0.0), &mp(c(0.0, 1.0))).unwrap();
        assert!(r.norm() <= 1e-9, "{r}");
    }

    #[test]
    fn theta_fourth_power_off_axis() {
        let r = heat_residual(&ThetaPower::block(3), c(0.2, 0.1), &mp(c(0.3, 0.8))).unwrap();
        assert!(r.norm() <= 1e-8, "{r}");
    }

    #[test]
    fn wrong_power_is_rejected() {
        let cand = ThetaPower { p: 1, exponent: 1 };
        let r = heat_residual(&cand, c(0.3, 0.0), &mp(c(0.0, 1.0))).unwrap();
        assert!(r.norm() > 1e-3, "{r}");
    }

    #[test]
    fn residual_needs_lambda_off_lattice() {
        let err = heat_residual(&ThetaPower::block(1), c(0.0, 0.0), &mp(c(0.0, 1.0))).unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
    }

    #[test]
    fn series_tau_derivative_matches_differences() {
        let m = mp(c(0.1, 0.9));
        let cand = ThetaPower::block(2);
        let lambda = c(0.35, 0.05);
        let series = cand.jet(lambda, &m).unwrap().d_tau;
        let fd = tau_derivative_fd(&cand, lambda, &m, 1e-4).unwrap();
        assert!((series - fd).norm() <= 1e-6 * series.norm(), "{series} vs {fd}");
    }

    #[test]
    fn theta_cube_transforms_as_a_block() {
        let rep = transform_checks(&ThetaPower::block(2), c(0.3, 0.0), &mp(c(0.0, 1.0))).unwrap();
        assert!(rep.max_defect() <= 1e-11, "{rep:?}");
    }

    #[test]
    fn even_power_is_even() {
        let rep = transform_checks(&ThetaPower::block(1), c(0.3, 0.0), &mp(c(0.0, 1.0))).unwrap();
        assert!(rep.weyl <= 1e-12, "{rep:?}");
    }

    #[test]
    fn spoiled_candidate_breaks_periodicity() {
        let m = mp(c(0.0, 1.0));
        let rep = transform_checks(&SpoiledBlock { p: 1 }, c(0.3, 0.0), &m).unwrap();
        assert!(rep.period > 1e-2, "{rep:?}");
        let r = heat_residual(&SpoiledBlock { p: 1 }, c(0.3, 0.0), &m).unwrap();
        assert!(r.norm() > 1e-3, "{r}");
    }
}
