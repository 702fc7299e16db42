//! Integration over the ordered simplex Δ_p = {1 ≥ t₁ ≥ ⋯ ≥ t_p ≥ 0}.
//!
//! An integrand of Selberg type behaves like t^{c₀−1} as variables approach
//! 0, like (1−t)^{c₁−1} as they approach 1, and like (t_j − t_k)^d on the
//! diagonals; for periodic integrands the factor also vanishes as
//! t_j − t_k → 1, so variables near 0 and near 1 collide with each other.
//!
//! Δ_p is cut into 2^p sectors by which side of ½ each variable lies on and
//! by the ordering of the distances m to the nearest endpoint. In each sector
//!
//! ```text
//! m₁ = v₁/2,  m_i = m_{i−1}·v_i,   jacobian (½)^p ∏ v_l^{p−l},
//! ```
//!
//! so every collision, at an endpoint or on a diagonal, sits on a single
//! cube axis with a product power, which [`cube_integrate`] continues
//! analytically.
//!
//! Coordinates, complements, differences and their logarithms are all formed
//! from the cube variables and their complements, never by subtracting
//! nearly equal numbers.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{cube_integrate, AxisSingularitySpec, Node, QuadratureResult};

/// A value in (0, 1) with its complement and both logarithms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord {
    pub value: f64,
    pub comp: f64,
    pub ln: f64,
    pub ln_comp: f64,
}

impl Coord {
    fn from_small(ln: f64) -> Self {
        // value ≤ ½
        let value = ln.exp();
        Coord {
            value,
            comp: 1.0 - value,
            ln,
            ln_comp: (-value).ln_1p(),
        }
    }

    fn mirrored(self) -> Self {
        Coord {
            value: self.comp,
            comp: self.value,
            ln: self.ln_comp,
            ln_comp: self.ln,
        }
    }
}

/// t_j − t_k for j < k (so the difference is non-negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Difference {
    pub j: usize,
    pub k: usize,
    pub d: Coord,
}

/// A point of Δ_p with accurately known complements and differences.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexPoint {
    t: Vec<Coord>,
    diffs: Vec<Difference>,
}

impl SimplexPoint {
    /// From an ordered tuple t₁ ≥ ⋯ ≥ t_p in (0, 1); complements are formed
    /// by plain subtraction.
    pub fn from_ordered(t: &[f64]) -> Self {
        let comps: Vec<f64> = t.iter().map(|x| 1.0 - x).collect();
        Self::from_ordered_with(t, &comps)
    }

    /// As [`from_ordered`](Self::from_ordered) with the complements given.
    pub fn from_ordered_with(t: &[f64], t_comp: &[f64]) -> Self {
        let coords: Vec<Coord> = t
            .iter()
            .zip(t_comp)
            .map(|(&value, &comp)| Coord {
                value,
                comp,
                ln: value.ln(),
                ln_comp: comp.ln(),
            })
            .collect();
        let mut diffs = Vec::new();
        for j in 0..t.len() {
            for k in j + 1..t.len() {
                let d = t[j] - t[k];
                diffs.push(Difference {
                    j,
                    k,
                    d: Coord {
                        value: d,
                        comp: coords[j].comp + t[k],
                        ln: d.ln(),
                        ln_comp: (coords[j].comp + t[k]).ln(),
                    },
                });
            }
        }
        SimplexPoint { t: coords, diffs }
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t[j].value
    }

    pub fn t_comp(&self, j: usize) -> f64 {
        self.t[j].comp
    }

    pub fn coord(&self, j: usize) -> &Coord {
        &self.t[j]
    }

    pub fn sum(&self) -> f64 {
        self.t.iter().map(|c| c.value).sum()
    }

    /// All pairs j < k.
    pub fn differences(&self) -> impl Iterator<Item = &Difference> {
        self.diffs.iter()
    }
}

/// t_j = u₁⋯u_j and jacobian ∏_{i<p} u_i^{p−i}.
pub fn simplex_to_cube(u: &[f64]) -> (Vec<f64>, f64) {
    let p = u.len();
    let mut t = Vec::with_capacity(p);
    let mut prod = 1.0;
    let mut jac = 1.0;
    for (i, &ui) in u.iter().enumerate() {
        prod *= ui;
        t.push(prod);
        jac *= ui.powi((p - 1 - i) as i32);
    }
    (t, jac)
}

/// An integrand on Δ_p of Selberg type.
///
/// `evaluate` returns `(log, regular)` with the integrand equal to
/// `exp(log)·regular`; `log` carries the singular powers, `regular` must
/// stay bounded and smooth up to the boundary of Δ_p.
pub trait SimplexIntegrand: Sync {
    /// c₀: the integrand behaves like t^{c₀−1} as one variable goes to 0.
    fn lower_exponent(&self) -> Complex64;
    /// c₁: likewise (1−t)^{c₁−1} at 1.
    fn upper_exponent(&self) -> Complex64;
    /// d: the factor (t_j − t_k)^d.
    fn difference_exponent(&self) -> Complex64;
    /// Whether the difference factor also vanishes as t_j − t_k → 1, i.e.
    /// the endpoints 0 and 1 are one point of a circle.
    fn wraps(&self) -> bool {
        false
    }
    fn evaluate(&self, pt: &SimplexPoint) -> Result<(Complex64, Complex64)>;
}

/// One of the 2^p pieces of Δ_p: `upper[i]` tells whether the variable with
/// the i-th largest distance to the nearest endpoint lies in [½, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    upper: Vec<bool>,
}

impl Sector {
    pub fn new(upper: Vec<bool>) -> Self {
        Sector { upper }
    }

    /// All sign patterns of length p.
    pub fn all(p: usize) -> Vec<Sector> {
        (0..1usize << p)
            .map(|bits| Sector::new((0..p).map(|i| bits >> (p - 1 - i) & 1 == 1).collect()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn is_upper(&self, i: usize) -> bool {
        self.upper[i]
    }

    // t index of the variable at magnitude position i: upper variables in
    // decreasing magnitude are t_k, …, t₁, lower ones t_{k+1}, …, t_p.
    fn t_indices(&self) -> Vec<usize> {
        let k = self.upper.iter().filter(|&&u| u).count();
        let (mut seen_up, mut seen_lo) = (0, 0);
        self.upper
            .iter()
            .map(|&u| {
                if u {
                    seen_up += 1;
                    k - seen_up
                } else {
                    seen_lo += 1;
                    k + seen_lo - 1
                }
            })
            .collect()
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Maps a cube point of `sector` to Δ_p; returns the point and the log of
/// the Jacobian.
fn sector_point(sector: &Sector, nodes: &[Node]) -> (SimplexPoint, f64) {
    let p = nodes.len();
    // distances to the nearest endpoint, m_i = ½ v₁⋯v_i, and ln(½ − m_i)
    let mut ln_m = Vec::with_capacity(p);
    let mut ln_half_gap = Vec::with_capacity(p);
    let mut acc = -LN_2;
    let (mut prod, mut one_minus) = (1.0, 0.0);
    let mut ln_jac = -(p as f64) * LN_2;
    for (l, node) in nodes.iter().enumerate() {
        acc += node.x.ln();
        one_minus += prod * node.xc;
        prod *= node.x;
        ln_m.push(acc);
        ln_half_gap.push(-LN_2 + one_minus.ln());
        ln_jac += (p - 1 - l) as f64 * node.x.ln();
    }
    // ln(m_a − m_b), a < b
    let ln_gap = |a: usize, b: usize| {
        let (mut prod, mut one_minus) = (1.0, 0.0);
        for node in &nodes[a + 1..=b] {
            one_minus += prod * node.xc;
            prod *= node.x;
        }
        ln_m[a] + one_minus.ln()
    };

    let index = sector.t_indices();
    let mut position = vec![0; p];
    let mut t = vec![
        Coord {
            value: 0.0,
            comp: 0.0,
            ln: 0.0,
            ln_comp: 0.0,
        };
        p
    ];
    for (i, &j) in index.iter().enumerate() {
        position[j] = i;
        let c = Coord::from_small(ln_m[i]);
        t[j] = if sector.upper[i] { c.mirrored() } else { c };
    }
    let mut diffs = Vec::with_capacity(p * (p - 1) / 2);
    for j in 0..p {
        for k in j + 1..p {
            let (ij, ik) = (position[j], position[k]);
            // 1 − (t_j − t_k) = (1 − t_j) + t_k
            let comp = t[j].comp + t[k].value;
            let d = match (sector.upper[ij], sector.upper[ik]) {
                (true, false) => {
                    // t_j − t_k = (½ − m_j) + (½ − m_k); complement m_j + m_k
                    let ln = log_add(ln_half_gap[ij], ln_half_gap[ik]);
                    let ln_comp = log_add(ln_m[ij], ln_m[ik]);
                    Coord {
                        value: ln.exp(),
                        comp,
                        ln,
                        ln_comp,
                    }
                }
                (up, _) => {
                    let ln = if up { ln_gap(ik, ij) } else { ln_gap(ij, ik) };
                    Coord {
                        value: ln.exp(),
                        comp,
                        ln,
                        ln_comp: comp.ln(),
                    }
                }
            };
            diffs.push(Difference { j, k, d });
        }
    }
    (SimplexPoint { t, diffs }, ln_jac)
}

/// Axis specifications of a sector.
///
/// Axis l collapses the variables at magnitude positions l..p onto the
/// endpoints; its exponent adds their endpoint exponents and d for every
/// pair among them whose difference vanishes (same side, or opposite sides
/// when the integrand [wraps](SimplexIntegrand::wraps)). At v_l → 1 the
/// positions l−1 and l meet, a zero of order d when both are on one side.
pub fn sector_specs<I: SimplexIntegrand + ?Sized>(
    integrand: &I,
    sector: &Sector,
    extra_orders: u32,
) -> Result<Vec<AxisSingularitySpec>> {
    let p = sector.dim();
    let d = integrand.difference_exponent();
    let (c_up, c_lo) = (integrand.upper_exponent(), integrand.lower_exponent());
    let wraps = integrand.wraps();
    (0..p)
        .map(|l| {
            let mut c_left = Complex64::new(0.0, 0.0);
            for i in l..p {
                c_left += if sector.upper[i] { c_up } else { c_lo };
                for i2 in i + 1..p {
                    if wraps || sector.upper[i] == sector.upper[i2] {
                        c_left += d;
                    }
                }
            }
            let c_right = if l > 0 && sector.upper[l - 1] == sector.upper[l] {
                d + 1.0
            } else {
                Complex64::new(1.0, 0.0)
            };
            Ok(AxisSingularitySpec::with_exponents(c_left, c_right)?.with_extra_orders(extra_orders))
        })
        .collect()
}

/// Contribution of one sector to the simplex integral.
pub fn integrate_sector<I: SimplexIntegrand + ?Sized>(
    integrand: &I,
    sector: &Sector,
    level: u32,
    extra_orders: u32,
) -> Result<QuadratureResult> {
    if !(1..=3).contains(&sector.dim()) {
        return Err(Error::InvalidArgument(format!(
            "simplex dimension {} not in 1..=3",
            sector.dim()
        )));
    }
    let specs = sector_specs(integrand, sector, extra_orders)?;
    let one = Complex64::new(1.0, 0.0);
    cube_integrate(
        |nodes| {
            let (pt, ln_jac) = sector_point(sector, nodes);
            let (log, regular) = integrand.evaluate(&pt)?;
            let mut declared = Complex64::new(0.0, 0.0);
            for (spec, node) in specs.iter().zip(nodes) {
                declared += (spec.c_left - one) * node.x.ln() + (spec.c_right - one) * node.xc.ln();
            }
            Ok((log + ln_jac - declared).exp() * regular)
        },
        &specs,
        level,
    )
}

/// ∫_{Δ_p} of the integrand, continued analytically in its exponents.
///
/// `extra_orders` adds Taylor subtraction terms beyond the minimum at every
/// singular endpoint (the result must not depend on it).
pub fn integrate_simplex<I: SimplexIntegrand + ?Sized>(
    integrand: &I,
    p: usize,
    level: u32,
    extra_orders: u32,
) -> Result<QuadratureResult> {
    if !(1..=3).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "simplex dimension {p} not in 1..=3"
        )));
    }
    let mut total = QuadratureResult {
        value: Complex64::new(0.0, 0.0),
        err_est: 0.0,
        evals: 0,
        level,
    };
    for sector in Sector::all(p) {
        let res = integrate_sector(integrand, &sector, level, extra_orders)?;
        total.value += res.value;
        total.err_est += res.err_est;
        total.evals += res.evals;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(x: f64) -> Node {
        Node::new(x)
    }

    #[test]
    fn cube_map_examples() {
        let (t, jac) = simplex_to_cube(&[0.8, 0.5]);
        assert!((t[0] - 0.8).abs() < 1e-15 && (t[1] - 0.4).abs() < 1e-15);
        assert!((jac - 0.8).abs() < 1e-15);
        let (t, jac) = simplex_to_cube(&[1.0, 1.0]);
        assert_eq!((t, jac), (vec![1.0, 1.0], 1.0));
    }

    #[test]
    fn sector_points_are_ordered_and_consistent() {
        let nodes = [node(0.3), node(0.9), node(0.6)];
        for sector in Sector::all(3) {
            let upper = sector.upper.iter().filter(|&&u| u).count();
            let (pt, _) = sector_point(&sector, &nodes);
            for j in 0..3 {
                let c = pt.coord(j);
                assert!((c.value + c.comp - 1.0).abs() < 1e-15);
                assert!((c.ln - c.value.ln()).abs() < 1e-14);
                assert!((c.ln_comp - c.comp.ln()).abs() < 1e-14);
                if j < upper {
                    assert!(c.value >= 0.5);
                } else {
                    assert!(c.value <= 0.5);
                }
            }
            // distances to the nearest endpoint follow the sector's ordering
            let dist: Vec<f64> = sector
                .t_indices()
                .iter()
                .map(|&j| pt.t(j).min(pt.t_comp(j)))
                .collect();
            assert!(dist.windows(2).all(|w| w[0] >= w[1]), "{sector:?}");
            for w in 0..2 {
                assert!(pt.t(w) >= pt.t(w + 1));
            }
            for diff in pt.differences() {
                let direct = pt.t(diff.j) - pt.t(diff.k);
                assert!((diff.d.value - direct).abs() < 1e-15, "{sector:?}: {diff:?}");
                assert!((diff.d.comp - (1.0 - direct)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn tiny_gaps_keep_relative_accuracy() {
        let nodes = [Node::from_complement(1e-200), Node::from_complement(1e-250)];
        let (pt, _) = sector_point(&Sector::new(vec![false, false]), &nodes);
        let diff = pt.differences().next().unwrap();
        // m₁ ≈ ½, m₁ − m₂ = m₁(1 − v₂) ≈ ½·1e-250
        assert!((diff.d.ln - (0.5f64.ln() - 250.0 * 10f64.ln())).abs() < 1e-12);
        let (pt, _) = sector_point(&Sector::new(vec![true, false]), &nodes);
        let diff = pt.differences().next().unwrap();
        // (½ − m₁) + (½ − m₂) ≈ ½·1e-200 + ½·1e-200
        assert!((diff.d.ln + 200.0 * 10f64.ln()).abs() < 1e-12);
        // t₁ − t₂ → 1 when both distances vanish: complement m₁ + m₂
        let nodes = [node(1e-200), node(0.5)];
        let (pt, _) = sector_point(&Sector::new(vec![true, false]), &nodes);
        let diff = pt.differences().next().unwrap();
        assert!((diff.d.ln_comp - (0.75f64.ln() - 200.0 * 10f64.ln())).abs() < 1e-12);
    }

    struct Volume;

    impl SimplexIntegrand for Volume {
        fn lower_exponent(&self) -> Complex64 {
            Complex64::new(1.0, 0.0)
        }
        fn upper_exponent(&self) -> Complex64 {
            Complex64::new(1.0, 0.0)
        }
        fn difference_exponent(&self) -> Complex64 {
            Complex64::new(0.0, 0.0)
        }
        fn evaluate(&self, _: &SimplexPoint) -> Result<(Complex64, Complex64)> {
            Ok((Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)))
        }
    }

    struct Periodic;

    impl SimplexIntegrand for Periodic {
        fn lower_exponent(&self) -> Complex64 {
            Complex64::new(-0.6, 0.0)
        }
        fn upper_exponent(&self) -> Complex64 {
            Complex64::new(-0.6, 0.0)
        }
        fn difference_exponent(&self) -> Complex64 {
            Complex64::new(0.25, 0.0)
        }
        fn wraps(&self) -> bool {
            true
        }
        fn evaluate(&self, _: &SimplexPoint) -> Result<(Complex64, Complex64)> {
            unreachable!()
        }
    }

    #[test]
    fn sector_exponents() {
        let c = |specs: &[AxisSingularitySpec]| -> Vec<(f64, f64)> {
            specs.iter().map(|s| (s.c_left.re, s.c_right.re)).collect()
        };
        let mixed = Sector::new(vec![true, false, false]);
        // wrapping: all three pairs vanish in the full collapse
        let s = sector_specs(&Periodic, &mixed, 0).unwrap();
        let want = [(-1.8 + 0.75, 1.0), (-1.2 + 0.25, 1.0), (-0.6, 1.25)];
        for (got, want) in c(&s).iter().zip(want) {
            assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14);
        }
        // non-wrapping: only the lower pair
        let s = sector_specs(&Volume, &mixed, 0).unwrap();
        assert_eq!(c(&s), vec![(3.0, 1.0), (2.0, 1.0), (1.0, 1.0)]);
    }

    #[test]
    fn sectors_tile_the_simplex() {
        for (p, vol) in [(1, 1.0), (2, 0.5), (3, 1.0 / 6.0)] {
            let r = integrate_simplex(&Volume, p, 4, 0).unwrap();
            assert!((r.value.re - vol).abs() < 1e-12, "p={p}: {}", r.value);
        }
    }
}
