//! Odd Jacobi theta function θ₁(t, τ), the functions built from it, and the
//! level-κ theta functions θ_{κ,m}(λ, τ).
//!
//! θ₁ is summed from its bilateral series
//!
//! ```text
//! θ₁(t, τ) = −Σ_j exp(πi(j+½)²τ + 2πi(j+½)(t+½))
//! ```
//!
//! with the terms j and −1−j paired, which turns the sum into
//! `2 Σ_{n≥0} (−1)ⁿ q^{(n+½)²} sin((2n+1)πt)`. The paired form keeps full
//! relative accuracy near the zeros t ∈ ℤ, where the unpaired terms cancel.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::ComplexSum;

/// Smallest accepted Im τ.
pub const MIN_IM_TAU: f64 = 0.05;
/// Default relative truncation target for the theta series.
pub const DEFAULT_EPS_SERIES: f64 = 1e-17;
/// Default cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 256;
/// |θ₁(t)| below this multiple of |θ₁′(0)| counts as a lattice point.
pub const LATTICE_THRESHOLD: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point τ of the upper half-plane together with the series controls.
///
/// Construction precomputes the nome powers q^{(n+½)²} and θ₁′(0, τ), so a
/// `ModularPoint` should be built once and shared by reference.
#[derive(Debug, Clone)]
pub struct ModularPoint {
    tau: Complex64,
    eps_series: f64,
    max_terms: usize,
    // πiτ(n+½)² and its exponential, n = 0..max_terms/2
    log_nome: Vec<Complex64>,
    nome: Vec<Complex64>,
    theta1_prime0: Complex64,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        Self::with_accuracy(tau, DEFAULT_EPS_SERIES, DEFAULT_MAX_TERMS)
    }

    pub fn with_accuracy(tau: Complex64, eps_series: f64, max_terms: usize) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "tau = {tau} is not in the upper half-plane"
            )));
        }
        if tau.im < MIN_IM_TAU {
            return Err(Error::InvalidDomain(format!(
                "Im tau = {} is below the supported minimum {MIN_IM_TAU}",
                tau.im
            )));
        }
        if !(eps_series > 0.0 && eps_series <= 1e-6) {
            return Err(Error::InvalidArgument(format!(
                "eps_series = {eps_series} must lie in (0, 1e-6]"
            )));
        }
        if max_terms < 8 {
            return Err(Error::InvalidArgument(format!(
                "max_terms = {max_terms} must be at least 8"
            )));
        }
        let pairs = max_terms / 2;
        let log_nome: Vec<Complex64> = (0..pairs)
            .map(|n| {
                let k = n as f64 + 0.5;
                I * PI * tau * (k * k)
            })
            .collect();
        let nome = log_nome.iter().map(|z| z.exp()).collect();
        let mut mp = ModularPoint {
            tau,
            eps_series,
            max_terms,
            log_nome,
            nome,
            theta1_prime0: Complex64::new(0.0, 0.0),
        };
        mp.theta1_prime0 = theta1(Complex64::new(0.0, 0.0), &mp, 1)?;
        if mp.theta1_prime0.norm() < 1e-290 {
            return Err(Error::DivisionDegenerate { tau });
        }
        Ok(mp)
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn eps_series(&self) -> f64 {
        self.eps_series
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// θ₁′(0, τ).
    pub fn theta1_prime0(&self) -> Complex64 {
        self.theta1_prime0
    }

    /// True when τ lies on the positive imaginary axis.
    pub fn is_imaginary(&self) -> bool {
        self.tau.re == 0.0
    }

    /// Number of paired θ₁ terms (n = 0..J) needed at this Im t.
    fn pair_count(&self, im_t: f64) -> Result<usize> {
        let im_tau = self.tau.im;
        let base = ((1.0 / self.eps_series).ln() / (PI * im_tau)).sqrt();
        let j = (base + im_t.abs() / im_tau).ceil() as usize + 2;
        if 2 * j > self.max_terms {
            return Err(Error::NonConvergent {
                needed: 2 * j,
                cap: self.max_terms,
            });
        }
        Ok(j)
    }

    fn check_guard(&self, im: f64, what: &str) -> Result<()> {
        if im.abs() > 8.0 * self.tau.im {
            return Err(Error::InvalidDomain(format!(
                "|Im {what}| = {} exceeds 8 Im tau; reduce by quasi-periodicity first",
                im.abs()
            )));
        }
        Ok(())
    }
}

/// Level-κ theta index (κ ≥ 2, m reduced modulo 2κ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaLevelIndex {
    kappa: u32,
    m: u32,
}

impl ThetaLevelIndex {
    pub fn new(kappa: u32, m: i64) -> Result<Self> {
        if kappa < 2 {
            return Err(Error::InvalidArgument(format!(
                "theta level kappa = {kappa} must be at least 2"
            )));
        }
        let modulus = 2 * kappa as i64;
        Ok(ThetaLevelIndex {
            kappa,
            m: m.rem_euclid(modulus) as u32,
        })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn m(&self) -> u32 {
        self.m
    }
}

// q^{k²}·f(ωt) with f ∈ {sin, cos}; switches to exponentials when
// |Im ωt| is large so that neither factor overflows on its own.
#[inline]
fn weighted_trig(log_q: Complex64, q: Complex64, z: Complex64, cosine: bool) -> Complex64 {
    if z.im.abs() < 20.0 {
        if cosine {
            q * z.cos()
        } else {
            q * z.sin()
        }
    } else {
        let plus = (log_q + I * z).exp();
        let minus = (log_q - I * z).exp();
        if cosine {
            (plus + minus) * 0.5
        } else {
            (plus - minus) / (2.0 * I)
        }
    }
}

/// All t-derivatives of θ₁ up to third order plus the term-wise ∂_τθ₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaJet {
    /// `d[k]` is the k-th t-derivative.
    pub d: [Complex64; 4],
    pub dtau: Complex64,
}

/// Evaluates θ₁ and its derivatives at t in one pass over the series.
pub fn theta1_jet(t: Complex64, mp: &ModularPoint) -> Result<ThetaJet> {
    mp.check_guard(t.im, "t")?;
    let pairs = mp.pair_count(t.im)?;
    let mut sums = [ComplexSum::default(); 5];
    for n in (0..pairs.min(mp.nome.len())).rev() {
        let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
        let omega = (2 * n + 1) as f64 * PI;
        let z = t * omega;
        let s = weighted_trig(mp.log_nome[n], mp.nome[n], z, false) * sign;
        let c = weighted_trig(mp.log_nome[n], mp.nome[n], z, true) * sign;
        let k = n as f64 + 0.5;
        sums[0].add(s);
        sums[1].add(c * omega);
        sums[2].add(-s * (omega * omega));
        sums[3].add(-c * (omega * omega * omega));
        sums[4].add(s * (I * PI * k * k));
    }
    let jet = ThetaJet {
        d: [sums[0].total(), sums[1].total(), sums[2].total(), sums[3].total()],
        dtau: sums[4].total(),
    };
    if jet.d.iter().chain([&jet.dtau]).any(|z| !z.is_finite()) {
        return Err(Error::InvalidDomain(format!("theta1 overflows at t = {t}")));
    }
    Ok(jet)
}

/// The `order`-th t-derivative of θ₁(t, τ), `order` ∈ 0..=3.
pub fn theta1(t: Complex64, mp: &ModularPoint, order: u32) -> Result<Complex64> {
    if order > 3 {
        return Err(Error::InvalidArgument(format!(
            "theta1 derivative order {order} not in 0..=3"
        )));
    }
    if order == 0 {
        return theta1_value(t, mp);
    }
    Ok(theta1_jet(t, mp)?.d[order as usize])
}

/// θ₁(t, τ) alone; the hot path of the integrands.
pub fn theta1_value(t: Complex64, mp: &ModularPoint) -> Result<Complex64> {
    mp.check_guard(t.im, "t")?;
    let pairs = mp.pair_count(t.im)?;
    let mut sum = ComplexSum::default();
    for n in (0..pairs.min(mp.nome.len())).rev() {
        let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
        let z = t * ((2 * n + 1) as f64 * PI);
        sum.add(weighted_trig(mp.log_nome[n], mp.nome[n], z, false) * sign);
    }
    let v = sum.total();
    if !v.is_finite() {
        return Err(Error::InvalidDomain(format!("theta1 overflows at t = {t}")));
    }
    Ok(v)
}

/// θ₁ at a real argument, given also its complement 1 − t.
///
/// Uses θ₁(t) = θ₁(1 − t) when t > ½ so that the zero at t = 1 keeps full
/// relative accuracy.
pub fn theta1_real(t: f64, t_comp: f64, mp: &ModularPoint) -> Result<Complex64> {
    let arg = if t <= 0.5 { t } else { t_comp };
    theta1_value(Complex64::new(arg, 0.0), mp)
}

/// Term-wise ∂θ₁/∂τ.
pub fn theta1_dtau(t: Complex64, mp: &ModularPoint) -> Result<Complex64> {
    Ok(theta1_jet(t, mp)?.dtau)
}

/// E(t, τ) = θ₁(t, τ) / θ₁′(0, τ).
pub fn cap_e(t: Complex64, mp: &ModularPoint) -> Result<Complex64> {
    Ok(theta1_value(t, mp)? / mp.theta1_prime0())
}

fn check_lattice(theta: Complex64, mp: &ModularPoint, what: &'static str) -> Result<()> {
    let magnitude = theta.norm();
    if magnitude < LATTICE_THRESHOLD * mp.theta1_prime0().norm() {
        return Err(Error::PoleProximity { what, magnitude });
    }
    Ok(())
}

/// ρ(t) = θ₁′/θ₁ (order 0) or ρ′(t) = θ₁″/θ₁ − (θ₁′/θ₁)² (order 1).
pub fn rho(t: Complex64, mp: &ModularPoint, order: u32) -> Result<Complex64> {
    let jet = theta1_jet(t, mp)?;
    check_lattice(jet.d[0], mp, "t")?;
    let r = jet.d[1] / jet.d[0];
    match order {
        0 => Ok(r),
        1 => Ok(jet.d[2] / jet.d[0] - r * r),
        _ => Err(Error::InvalidArgument(format!(
            "rho order {order} not in {{0, 1}}"
        ))),
    }
}

/// σ_λ(t) = θ₁(λ − t)θ₁′(0) / (θ₁(λ)θ₁(t)).
pub fn sigma(lambda: Complex64, t: Complex64, mp: &ModularPoint) -> Result<Complex64> {
    let th_lambda = theta1_value(lambda, mp)?;
    check_lattice(th_lambda, mp, "lambda")?;
    let th_t = theta1_value(t, mp)?;
    check_lattice(th_t, mp, "t")?;
    let th_diff = theta1_value(lambda - t, mp)?;
    Ok(th_diff * mp.theta1_prime0() / (th_lambda * th_t))
}

/// θ_{κ,m}(λ, τ) = Σ_j exp(2πiκ(j + m/2κ)²τ + 2πiκ(j + m/2κ)λ).
pub fn theta_level(idx: ThetaLevelIndex, lambda: Complex64, mp: &ModularPoint) -> Result<Complex64> {
    mp.check_guard(lambda.im, "lambda")?;
    let kappa = idx.kappa() as f64;
    let shift = idx.m() as f64 / (2.0 * kappa);
    let im_tau = mp.tau().im;
    let base = ((1.0 / mp.eps_series()).ln() / (2.0 * PI * kappa * im_tau)).sqrt();
    let half = (base + lambda.im.abs() / (2.0 * im_tau)).ceil() as i64 + 2;
    let needed = 2 * half as usize + 2;
    if needed > mp.max_terms() {
        return Err(Error::NonConvergent {
            needed,
            cap: mp.max_terms(),
        });
    }
    let tau = mp.tau();
    let mut terms: Vec<(f64, Complex64)> = (-half - 1..=half)
        .map(|j| {
            let k = j as f64 + shift;
            let e = 2.0 * PI * I * kappa * (k * k * tau + k * lambda);
            (e.re, e)
        })
        .collect();
    // smallest terms first
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sum = ComplexSum::default();
    for (_, e) in terms {
        sum.add(e.exp());
    }
    let v = sum.total();
    if !v.is_finite() {
        return Err(Error::InvalidDomain(format!(
            "theta_level overflows at lambda = {lambda}"
        )));
    }
    Ok(v)
}

const BRANCH_T0: f64 = 1e-3;
const BRANCH_GRID: usize = 512;

/// Continuous branch of log E(t, τ) along the real segment (0, 1), fixed by
/// arg E → 0 as t → 0⁺.
///
/// The phase is tracked once on the grid k/512 (halving the step when the
/// phase moves by more than π/4) and stored; queries pick the 2π-sheet
/// nearest to the stored phase of the closest grid point.
#[derive(Debug, Clone)]
pub struct LogEBranch {
    mp: ModularPoint,
    phase: Vec<f64>,
}

fn step_phase(
    mp: &ModularPoint,
    from: f64,
    to: f64,
    mut phase: f64,
    scale: f64,
) -> Result<f64> {
    let mut t = from;
    let mut step = to - from;
    while (to - t).abs() > 0.0 {
        let next = if (to - t).abs() <= step.abs() { to } else { t + step };
        let e = cap_e(Complex64::new(next, 0.0), mp)?;
        if e.norm() < 1e-12 * scale {
            return Err(Error::BranchAmbiguous { t: next });
        }
        let delta = wrap(e.arg() - phase);
        if delta.abs() > PI / 4.0 {
            step *= 0.5;
            if step.abs() < 1e-12 {
                return Err(Error::BranchAmbiguous { t: next });
            }
            continue;
        }
        phase += delta;
        t = next;
    }
    Ok(phase)
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

fn initial_log(mp: &ModularPoint) -> Result<(f64, f64)> {
    let e0 = cap_e(Complex64::new(BRANCH_T0, 0.0), mp)?;
    let scale = 1.0;
    if e0.norm() < 1e-12 * scale {
        return Err(Error::BranchAmbiguous { t: BRANCH_T0 });
    }
    Ok((e0.arg(), scale))
}

impl LogEBranch {
    pub fn new(mp: &ModularPoint) -> Result<Self> {
        let (mut phase, scale) = initial_log(mp)?;
        let h = 1.0 / BRANCH_GRID as f64;
        let mut table = vec![0.0; BRANCH_GRID];
        phase = step_phase(mp, BRANCH_T0, h, phase, scale)?;
        table[1] = phase;
        for k in 2..BRANCH_GRID {
            phase = step_phase(mp, (k - 1) as f64 * h, k as f64 * h, phase, scale)?;
            table[k] = phase;
        }
        Ok(LogEBranch {
            mp: mp.clone(),
            phase: table,
        })
    }

    pub fn modular_point(&self) -> &ModularPoint {
        &self.mp
    }

    /// Chooses the sheet of a principal logarithm of E(t).
    pub fn on_branch(&self, t: f64, principal: Complex64) -> Complex64 {
        let k = ((t * BRANCH_GRID as f64).round() as usize).min(BRANCH_GRID - 1);
        let reference = if t < BRANCH_T0 { 0.0 } else { self.phase[k] };
        let turns = ((reference - principal.im) / (2.0 * PI)).round();
        Complex64::new(principal.re, principal.im + 2.0 * PI * turns)
    }

    /// log E(t) for t ∈ (0, 1) given also 1 − t.
    pub fn log_e(&self, t: f64, t_comp: f64) -> Result<Complex64> {
        let e = theta1_real(t, t_comp, &self.mp)? / self.mp.theta1_prime0();
        if !(e.norm() > 0.0) {
            return Err(Error::BranchAmbiguous { t });
        }
        Ok(self.on_branch(t, e.ln()))
    }

    /// As [`log_e`](Self::log_e), with ln t and ln(1 − t) supplied so that
    /// points within 10⁻¹⁰⁰ of an endpoint (where t may underflow) use
    /// E(t) = t(1 + O(t²)) and E(1 − x) = x(1 + O(x²)).
    pub fn log_e_near(&self, t: f64, t_comp: f64, ln_t: f64, ln_t_comp: f64) -> Result<Complex64> {
        if t < ENDPOINT_CUTOFF {
            return Ok(Complex64::new(ln_t, 0.0));
        }
        if t_comp < ENDPOINT_CUTOFF {
            return Ok(self.on_branch(t, Complex64::new(ln_t_comp, 0.0)));
        }
        self.log_e(t, t_comp)
    }
}

const ENDPOINT_CUTOFF: f64 = 1e-100;

/// log E(t, τ) on the branch with arg E → 0 as t → 0⁺, tracked by stepping
/// along the real segment from t₀ = 10⁻³.
pub fn log_e_tracked(t: f64, mp: &ModularPoint) -> Result<Complex64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidDomain(format!("log_e_tracked needs t in (0, 1), got {t}")));
    }
    let (phase0, scale) = initial_log(mp)?;
    let h = 1.0 / BRANCH_GRID as f64;
    let mut phase = phase0;
    let mut at = BRANCH_T0;
    let direction = if t >= at { h } else { -h };
    while (t - at).abs() > 0.0 {
        let next = if (t - at).abs() <= h { t } else { at + direction };
        phase = step_phase(mp, at, next, phase, scale)?;
        at = next;
    }
    let e = theta1_real(t, 1.0 - t, mp)? / mp.theta1_prime0();
    let principal = e.ln();
    let turns = ((phase - principal.im) / (2.0 * PI)).round();
    Ok(Complex64::new(principal.re, principal.im + 2.0 * PI * turns))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tau_i() -> ModularPoint {
        ModularPoint::new(c(0.0, 1.0)).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    // Displayed bilateral series, summed term by term over j ∈ [-10, 10).
    fn direct_theta1(t: Complex64, tau: Complex64) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for j in -10..10 {
            let k = j as f64 + 0.5;
            s += (I * PI * k * k * tau + 2.0 * PI * I * k * (t + 0.5)).exp();
        }
        -s
    }

    #[test]
    fn theta1_vanishes_at_origin() {
        let mp = tau_i();
        let v = theta1(c(0.0, 0.0), &mp, 0).unwrap();
        assert!(v.norm() <= 1e-14 * mp.theta1_prime0().norm());
    }

    #[test]
    fn theta1_sign_flip_under_unit_shift() {
        let mp = tau_i();
        let a = theta1(c(1.3, 0.0), &mp, 0).unwrap();
        let b = theta1(c(0.3, 0.0), &mp, 0).unwrap();
        assert!(rel(a, -b) < 1e-12);
    }

    #[test]
    fn theta1_matches_direct_series() {
        let mp = tau_i();
        let v = theta1(c(0.5, 0.0), &mp, 0).unwrap();
        let oracle = direct_theta1(c(0.5, 0.0), c(0.0, 1.0));
        assert!(rel(v, oracle) < 1e-12);
        // mpmath jtheta(1, π/2, e^{-π})
        assert!((v.re - 0.913579138156116821).abs() < 1e-15);
    }

    #[test]
    fn theta1_prime0_value() {
        // mpmath: 2.84869460398778731607998505712
        let mp = tau_i();
        assert!((mp.theta1_prime0().re - 2.848694603987787).abs() < 1e-14);
    }

    #[test]
    fn cap_e_limits_and_oddness() {
        let mp = tau_i();
        let t = 1e-4;
        let e = cap_e(c(t, 0.0), &mp).unwrap();
        assert!((e / t - 1.0).norm() < 1e-7);
        let plus = cap_e(c(0.3, 0.0), &mp).unwrap();
        let minus = cap_e(c(-0.3, 0.0), &mp).unwrap();
        assert!(rel(minus, -plus) < 1e-14);
        let half = cap_e(c(0.5, 0.0), &mp).unwrap();
        let oracle = direct_theta1(c(0.5, 0.0), c(0.0, 1.0));
        let mut d0 = c(0.0, 0.0);
        for j in -10..10 {
            let k = j as f64 + 0.5;
            d0 += 2.0 * PI * I * k * (I * PI * k * k * I + 2.0 * PI * I * k * 0.5).exp();
        }
        assert!(rel(half, oracle / -d0) < 1e-12);
        assert!((half.re - 0.3207009754142229).abs() < 1e-14);
    }

    #[test]
    fn log_e_near_zero_and_midpoint() {
        let mp = tau_i();
        let l = log_e_tracked(1e-3, &mp).unwrap();
        assert!((l.re - (1e-3f64).ln()).abs() < 1e-3);
        assert!(l.im.abs() < 1e-6);
        let m = log_e_tracked(0.5, &mp).unwrap();
        assert!(m.im.abs() < 1e-10);
        let e = cap_e(c(0.5, 0.0), &mp).unwrap();
        assert!(rel(m.exp(), e) < 1e-12);
    }

    #[test]
    fn log_e_table_agrees_with_stepping() {
        let mp = ModularPoint::new(c(0.3, 0.8)).unwrap();
        let table = LogEBranch::new(&mp).unwrap();
        for &t in &[0.0005, 0.1, 0.37, 0.5, 0.81, 0.999] {
            let a = table.log_e(t, 1.0 - t).unwrap();
            let b = log_e_tracked(t, &mp).unwrap();
            assert!((a - b).norm() < 1e-10, "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn rho_oddness_residue_and_derivative() {
        let mp = tau_i();
        let a = rho(c(0.3, 0.0), &mp, 0).unwrap();
        let b = rho(c(-0.3, 0.0), &mp, 0).unwrap();
        assert!((a + b).norm() < 1e-12 * a.norm());
        let t = 1e-4;
        assert!((rho(c(t, 0.0), &mp, 0).unwrap() * t - 1.0).norm() < 1e-7);
        let h = 1e-4;
        let fd = (rho(c(0.3 + h, 0.0), &mp, 0).unwrap() - rho(c(0.3 - h, 0.0), &mp, 0).unwrap())
            / (2.0 * h);
        let d = rho(c(0.3, 0.0), &mp, 1).unwrap();
        assert!(rel(fd, d) < 1e-6);
        // mpmath values
        assert!((a.re - 2.304835039993462).abs() < 1e-13);
        assert!((d.re + 15.12550696943532).abs() < 1e-12);
    }

    #[test]
    fn rho_rejects_lattice() {
        let mp = tau_i();
        assert!(matches!(
            rho(c(1.0, 0.0), &mp, 0),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn sigma_residue_shift_and_composition() {
        let mp = tau_i();
        let lam = c(0.3, 0.0);
        // residue 1 at t = 0: two-point extrapolation removes the O(t) term
        let t = 1e-4;
        let r1 = sigma(lam, c(t, 0.0), &mp).unwrap() * t;
        let r2 = sigma(lam, c(2.0 * t, 0.0), &mp).unwrap() * (2.0 * t);
        assert!((r1 * 2.0 - r2 - 1.0).norm() < 1e-7);
        let a = sigma(lam, c(1.25, 0.0), &mp).unwrap();
        let b = sigma(lam, c(0.25, 0.0), &mp).unwrap();
        assert!(rel(a, b) < 1e-12);
        let s = sigma(lam, c(0.45, 0.0), &mp).unwrap();
        let tau = c(0.0, 1.0);
        let num = direct_theta1(lam - 0.45, tau) * mp.theta1_prime0();
        let den = direct_theta1(lam, tau) * direct_theta1(c(0.45, 0.0), tau);
        assert!(rel(s, num / den) < 1e-12);
        assert!((s.re + 1.7659973028549067).abs() < 1e-13);
    }

    #[test]
    fn theta_level_period_index_and_series() {
        let mp = tau_i();
        let idx = ThetaLevelIndex::new(4, 2).unwrap();
        let base = theta_level(idx, c(0.3, 0.0), &mp).unwrap();
        let shifted = theta_level(idx, c(2.3, 0.0), &mp).unwrap();
        assert!(rel(shifted, base) < 1e-12);
        let reindexed = theta_level(ThetaLevelIndex::new(4, 10).unwrap(), c(0.3, 0.0), &mp).unwrap();
        assert_eq!(reindexed, base);
        let mut direct = c(0.0, 0.0);
        for j in -12..=12 {
            let k = j as f64 + 2.0 / 8.0;
            direct += (2.0 * PI * I * 4.0 * k * k * I + 2.0 * PI * I * 4.0 * k * 0.3).exp();
        }
        assert!(rel(base, direct) < 1e-12);
        assert!((base - c(-0.06423773538120329, 0.1977056518063712)).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_modular_points() {
        assert!(ModularPoint::new(c(0.0, -1.0)).is_err());
        assert!(ModularPoint::new(c(0.0, 0.01)).is_err());
        assert!(ModularPoint::with_accuracy(c(0.0, 1.0), 1e-3, 64).is_err());
        assert!(ModularPoint::with_accuracy(c(0.0, 1.0), 1e-12, 4).is_err());
        assert!(ThetaLevelIndex::new(1, 0).is_err());
    }

    #[test]
    fn truncation_cap_reports_non_convergence() {
        let mp = ModularPoint::with_accuracy(c(0.0, 0.06), 1e-16, 8).unwrap_err();
        assert!(matches!(mp, Error::NonConvergent { .. }));
    }
}
