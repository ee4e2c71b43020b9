//! The Helmholtz fundamental solution `Φ` for screens in the line (`n = 1`)
//! and the plane (`n = 2`), its smooth remainder `Φ* = Φ − C_n Φ_{n−1}`, and
//! the singularity-subtraction rule for `∫_Γ ∫_Γ Φ`.

pub mod hankel;

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{self, SetDistanceOptions, TOUCH_TOL};
use crate::ifs::{dist, Attractor, Point};
use crate::kernel_phi_t::{phi_t_double_on, precondition_failed, SingularOptions};
use crate::partition::{partition_from, partition_lh, rule_from_partition, QuadratureRule};
use crate::quadrature::{apply_double, apply_double_grouped, apply_double_symmetric, CompensatedSum, PairSelection};
pub use hankel::{hankel1_0, hankel1_1, EULER_GAMMA};

/// Below this value of `k|x−y|` the `n = 1` remainder `Φ*` is evaluated from
/// the ascending series with the logarithm cancelled analytically.
pub const PHI_STAR_SERIES_SWITCH: f64 = 1e-6;

/// Helmholtz kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzKernel {
    k: f64,
    n: usize,
    c_osc: f64,
}

impl HelmholtzKernel {
    /// Kernel with wavenumber `k` in ambient dimension `n` and `c_osc = 2π`.
    pub fn new(k: f64, n: usize) -> Result<Self> {
        Self::with_c_osc(k, n, 2.0 * PI)
    }

    pub fn with_c_osc(k: f64, n: usize, c_osc: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("wavenumber k = {k} must be positive")));
        }
        if n != 1 && n != 2 {
            return Err(Error::invalid(format!("screen dimension n = {n} must be 1 or 2")));
        }
        if !(c_osc > 0.0 && c_osc.is_finite()) {
            return Err(Error::invalid(format!("c_osc = {c_osc} must be positive")));
        }
        Ok(HelmholtzKernel { k, n, c_osc })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c_osc(&self) -> f64 {
        self.c_osc
    }

    /// `h* = c_osc / k`.
    pub fn h_star(&self) -> f64 {
        self.c_osc / self.k
    }

    /// `C_1 = −1/(2π)`, `C_2 = 1/(4π)`.
    pub fn c_n(&self) -> f64 {
        if self.n == 1 {
            -1.0 / (2.0 * PI)
        } else {
            1.0 / (4.0 * PI)
        }
    }

    /// Exponent `t = n − 1` of the singular part.
    pub fn singular_exponent(&self) -> f64 {
        (self.n - 1) as f64
    }

    /// `Φ(x,y)`; errors at `x = y`.
    pub fn phi(&self, x: Point, y: Point) -> Result<Complex64> {
        let r = dist(x, y);
        if r == 0.0 {
            return Err(Error::NonFinite { x, y: Some(y) });
        }
        Ok(self.phi_of_r(r))
    }

    #[inline]
    pub(crate) fn phi_of_r(&self, r: f64) -> Complex64 {
        if self.n == 1 {
            Complex64::new(0.0, 0.25) * hankel::hankel1_0_unchecked(self.k * r)
        } else {
            let (s, c) = (self.k * r).sin_cos();
            Complex64::new(c, s) / (4.0 * PI * r)
        }
    }

    /// `Φ*(x,y)`, continuous across `x = y`.
    pub fn phi_star(&self, x: Point, y: Point) -> Complex64 {
        self.phi_star_of_r(dist(x, y))
    }

    /// Limit of `Φ*` on the diagonal.
    pub fn phi_star_diagonal(&self) -> Complex64 {
        if self.n == 1 {
            Complex64::new((-(0.5 * self.k).ln() - EULER_GAMMA) / (2.0 * PI), 0.25)
        } else {
            Complex64::new(0.0, self.k / (4.0 * PI))
        }
    }

    #[inline]
    pub(crate) fn phi_star_of_r(&self, r: f64) -> Complex64 {
        if r == 0.0 {
            return self.phi_star_diagonal();
        }
        let kr = self.k * r;
        if self.n == 1 {
            if kr < PHI_STAR_SERIES_SWITCH {
                let (j0, hsum) = hankel::series0(kr);
                let one_minus_j0 = 1.0 - j0;
                let re = (r.ln() * one_minus_j0 - ((0.5 * self.k).ln() + EULER_GAMMA) * j0 + hsum) / (2.0 * PI);
                Complex64::new(re, 0.25 * j0)
            } else {
                self.phi_of_r(r) + r.ln() / (2.0 * PI)
            }
        } else {
            let s = (0.5 * kr).sin();
            Complex64::new(-2.0 * s * s, kr.sin()) / (4.0 * PI * r)
        }
    }
}

/// `Φ(x,y)` for the given kernel.
pub fn phi(kernel: &HelmholtzKernel, x: Point, y: Point) -> Result<Complex64> {
    kernel.phi(x, y)
}

/// `Φ*(x,y)` for the given kernel.
pub fn phi_star(kernel: &HelmholtzKernel, x: Point, y: Point) -> Complex64 {
    kernel.phi_star(x, y)
}

fn check_screen(attractor: &Attractor, kernel: &HelmholtzKernel) -> Result<()> {
    if attractor.ambient_dim() != kernel.n {
        return Err(Error::invalid(format!(
            "kernel is for n = {} but the attractor lives in dimension {}",
            kernel.n,
            attractor.ambient_dim()
        )));
    }
    Ok(())
}

/// Iterated barycentre rule for `∫_Γ ∫_Γ' Φ` on a pair of separated attractors.
pub fn integrate_helmholtz_double(
    attr1: &Attractor,
    attr2: &Attractor,
    kernel: &HelmholtzKernel,
    h: f64,
) -> Result<Complex64> {
    integrate_helmholtz_double_with(attr1, attr2, kernel, h, SingularOptions::default())
}

pub fn integrate_helmholtz_double_with(
    attr1: &Attractor,
    attr2: &Attractor,
    kernel: &HelmholtzKernel,
    h: f64,
    opts: SingularOptions,
) -> Result<Complex64> {
    check_screen(attr1, kernel)?;
    check_screen(attr2, kernel)?;
    if geometry::leaf_hull_separation(attr1, attr2, h)? < TOUCH_TOL {
        precondition_failed(opts.strict, "h-hulls of the two attractors intersect".into())?;
    }
    let r1 = rule_from_partition(&partition_lh(attr1, h)?);
    let r2 = rule_from_partition(&partition_lh(attr2, h)?);
    apply_double(&r1, &r2, &|x, y| kernel.phi_of_r(dist(x, y)))
}

/// Singularity-subtraction rule for `∫_Γ ∫_Γ Φ`.
///
/// If `k diam(Γ) <= c_osc` this is `C_n Q_{n−1} + Q[Φ*]` on Γ. Otherwise Γ is
/// split into `L_{h*}(Γ)` with `h* = c_osc/k`; off-diagonal blocks use the
/// plain rule for `Φ` and diagonal blocks the non-oscillatory rule, all at
/// the same `h`.
pub fn integrate_helmholtz_singular(attractor: &Attractor, kernel: &HelmholtzKernel, h: f64) -> Result<Complex64> {
    integrate_helmholtz_singular_with(attractor, kernel, h, SingularOptions::default())
}

pub fn integrate_helmholtz_singular_with(
    attractor: &Attractor,
    kernel: &HelmholtzKernel,
    h: f64,
    opts: SingularOptions,
) -> Result<Complex64> {
    check_screen(attractor, kernel)?;
    let t = kernel.singular_exponent();
    if attractor.dim() <= t {
        return Err(Error::precondition(format!(
            "divergent integral: d = {} <= n - 1 = {t}",
            attractor.dim()
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("h = {h} must be positive")));
    }
    let (_, r_gamma) = geometry::set_separation(attractor, SetDistanceOptions::default());
    if r_gamma < TOUCH_TOL {
        precondition_failed(opts.strict, "first-level pieces of the attractor are not disjoint".into())?;
    }

    let diam = attractor.diam();
    if kernel.k * diam <= kernel.c_osc {
        if h > diam {
            return Err(Error::invalid(format!("h = {h} exceeds diam(Γ) = {diam}")));
        }
        let singular = phi_t_double_on(attractor, &crate::ifs::VecIndex::empty(), t, h, opts.symmetric)?;
        let rule = rule_from_partition(&partition_lh(attractor, h)?);
        let f = |x: Point, y: Point| kernel.phi_star_of_r(dist(x, y));
        let smooth: Complex64 = if opts.symmetric {
            apply_double_symmetric(&rule, &f)?
        } else {
            apply_double(&rule, &rule, &f)?
        };
        return Ok(smooth + singular * kernel.c_n());
    }

    let h_star = kernel.h_star();
    if h > h_star {
        return Err(Error::invalid(format!("h = {h} exceeds c_osc/k = {h_star} in the oscillatory regime")));
    }
    let top = partition_lh(attractor, h_star)?;
    let mut rule = QuadratureRule { nodes: Vec::new(), weights: Vec::new(), h };
    let mut groups: Vec<Range<usize>> = Vec::with_capacity(top.len());
    for index in top.indices() {
        let block = rule_from_partition(&partition_from(attractor, index, h)?);
        let start = rule.nodes.len();
        rule.nodes.extend(block.nodes);
        rule.weights.extend(block.weights);
        groups.push(start..rule.nodes.len());
    }
    let off: Complex64 = apply_double_grouped(&rule, &groups, PairSelection::DifferentGroup, opts.symmetric, &|x, y| {
        kernel.phi_of_r(dist(x, y))
    })?;
    let smooth: Complex64 = apply_double_grouped(&rule, &groups, PairSelection::SameGroup, opts.symmetric, &|x, y| {
        kernel.phi_star_of_r(dist(x, y))
    })?;
    let mut singular = CompensatedSum::new();
    for index in top.indices() {
        singular.add(phi_t_double_on(attractor, index, t, h, opts.symmetric)?);
    }
    let singular: f64 = singular.value();
    let mut acc = CompensatedSum::new();
    acc.add(off);
    acc.add(smooth);
    acc.add(Complex64::new(singular * kernel.c_n(), 0.0));
    Ok(acc.value())
}

/// Rate predictor for the error of [`integrate_helmholtz_singular`], known
/// only up to an absolute constant.
///
/// Uniform attractors give `c′ h² μ²`; otherwise `c″ h μ²`. Both constants
/// use `R = R_{Γ,Hull}` and switch form when `k diam(Γ) > c_osc`.
pub fn bound_helmholtz_singular(attractor: &Attractor, kernel: &HelmholtzKernel, h: f64) -> Result<f64> {
    check_screen(attractor, kernel)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("h = {h} must be positive")));
    }
    let r = geometry::r_gamma_hull(attractor);
    if r <= 0.0 {
        return Err(Error::precondition("R_(Gamma,Hull) = 0: rate predictor unavailable"));
    }
    let n = kernel.n as f64;
    let d = attractor.dim();
    let mu = attractor.measure();
    let kd = kernel.k * attractor.diam();
    let oscillatory = kd > kernel.c_osc;
    if attractor.is_uniform() {
        let m = attractor.num_maps() as f64;
        let geom = m.powf((n + 1.0) / d) / (1.0 - m.powf(1.0 / d - 1.0)).powf(n - 1.0);
        let c = if oscillatory {
            (1.0 + geom / kd.powf(d)) * (kd / r).powf(n + 1.0)
        } else {
            geom / r.powf(n + 1.0)
        };
        Ok(c * h * h * mu * mu)
    } else {
        let rho_min = attractor.min_ratio();
        let sum: f64 = attractor.ratios().iter().map(|rho| rho.powf(2.0 * d - n + 1.0)).sum();
        let geom = 1.0 / (rho_min.powf(n) * (1.0 - sum));
        let c = if oscillatory {
            (1.0 + geom / kd.powf(d)) * (kd / r).powf(n)
        } else {
            geom / r.powf(n)
        };
        Ok(c * h * mu * mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{Similarity, VecIndex};
    use crate::partition::level_h;
    use proptest::prelude::*;

    fn cantor(rho: f64) -> Attractor {
        let maps = vec![
            Similarity::line(rho, 1.0, 0.0).unwrap(),
            Similarity::line(rho, 1.0, 1.0 - rho).unwrap(),
        ];
        Attractor::new(maps, 1, None, Some(1.0)).unwrap()
    }

    fn dust(rho: f64) -> Attractor {
        let s = 1.0 - rho;
        let maps = [[0.0, s], [s, s], [0.0, 0.0], [s, 0.0]]
            .iter()
            .map(|&b| Similarity::plane_scaling(rho, b).unwrap())
            .collect();
        Attractor::new(maps, 2, None, None).unwrap()
    }

    #[test]
    fn kernel_validation() {
        assert!(HelmholtzKernel::new(0.0, 1).is_err());
        assert!(HelmholtzKernel::new(1.0, 3).is_err());
        assert!(HelmholtzKernel::with_c_osc(1.0, 2, 0.0).is_err());
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        assert_eq!(k.c_osc(), 2.0 * PI);
        assert!((k.h_star() - 2.0 * PI / 5.0).abs() < 1e-15);
    }

    #[test]
    fn half_wavelength_value() {
        let k = HelmholtzKernel::new(PI, 2).unwrap();
        let v = k.phi([0.0, 0.0], [1.0, 0.0]).unwrap();
        let expect = Complex64::new(-1.0 / (4.0 * PI), 0.0);
        assert!((v - expect).norm() < 1e-15);
        assert!(k.phi([1.0, 0.0], [1.0, 0.0]).is_err());
    }

    #[test]
    fn one_dimensional_value_uses_hankel() {
        let k = HelmholtzKernel::new(1.0, 1).unwrap();
        let v = k.phi([0.0, 0.0], [1.0, 0.0]).unwrap();
        let expect = Complex64::new(0.0, 0.25) * hankel1_0(1.0).unwrap();
        assert_eq!(v, expect);
    }

    #[test]
    fn diagonal_limits() {
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        let d = k.phi_star([0.3, 0.0], [0.3, 0.0]);
        assert_eq!(d, Complex64::new((-(2.5f64).ln() - EULER_GAMMA) / (2.0 * PI), 0.25));
        let k2 = HelmholtzKernel::new(5.0, 2).unwrap();
        assert_eq!(k2.phi_star([0.3, 0.2], [0.3, 0.2]), Complex64::new(0.0, 5.0 / (4.0 * PI)));
    }

    #[test]
    fn singular_ratio_tends_to_one() {
        for n in [1, 2] {
            let k = HelmholtzKernel::new(3.0, n).unwrap();
            let r = 1e-9;
            let phi = k.phi([0.0, 0.0], [r, 0.0]).unwrap();
            let sing = k.c_n() * crate::kernel_phi_t::phi_t_of_r((n - 1) as f64, r);
            assert!((phi / sing - 1.0).norm() < 0.1);
        }
    }

    #[test]
    fn phi_star_series_switch_agrees() {
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        let r = PHI_STAR_SERIES_SWITCH / k.k();
        let below = k.phi_star_of_r(r * (1.0 - 1e-12));
        let above = k.phi_star_of_r(r);
        assert!((below - above).norm() < 1e-10);
    }

    #[test]
    fn phi_star_monotone_near_diagonal() {
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        let wavelength = 2.0 * PI / k.k();
        let diag = k.phi_star_diagonal();
        let mut prev = 0.0;
        let mut r = 1e-4 * wavelength;
        while r > 1e-14 {
            let gap = (k.phi_star_of_r(r) - diag).norm();
            assert!(prev == 0.0 || gap <= prev * (1.0 + 1e-9));
            prev = gap;
            r *= 0.7;
        }
    }

    #[test]
    fn regular_double_single_node() {
        let c = cantor(1.0 / 3.0);
        let a = c.subattractor(&VecIndex::new(vec![1])).unwrap();
        let b = c.subattractor(&VecIndex::new(vec![2])).unwrap();
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        let v = integrate_helmholtz_double(&a, &b, &k, 1.0).unwrap();
        let expect = k.phi(a.barycentre(), b.barycentre()).unwrap() * (a.measure() * b.measure());
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn symmetric_matches_full() {
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        let c = cantor(1.0 / 3.0);
        let h = level_h(&c, 6);
        let on = SingularOptions { symmetric: true, strict: true };
        let off = SingularOptions { symmetric: false, strict: true };
        let a = integrate_helmholtz_singular_with(&c, &k, h, on).unwrap();
        let b = integrate_helmholtz_singular_with(&c, &k, h, off).unwrap();
        assert!((a - b).norm() < 1e-13 * b.norm());

        let d = dust(1.0 / 3.0);
        let k2 = HelmholtzKernel::new(5.0, 2).unwrap();
        let h = level_h(&d, 2);
        let a = integrate_helmholtz_singular_with(&d, &k2, h, on).unwrap();
        let b = integrate_helmholtz_singular_with(&d, &k2, h, off).unwrap();
        assert!((a - b).norm() < 1e-13 * b.norm());
    }

    #[test]
    fn singular_preconditions() {
        let k2 = HelmholtzKernel::new(5.0, 2).unwrap();
        let c = cantor(1.0 / 3.0);
        assert!(integrate_helmholtz_singular(&c, &k2, 0.1).is_err());
        let k1 = HelmholtzKernel::new(50.0, 1).unwrap();
        assert!(integrate_helmholtz_singular(&c, &k1, 0.5).is_err());
        let k1 = HelmholtzKernel::new(1.0, 1).unwrap();
        assert!(integrate_helmholtz_singular(&c, &k1, 2.0).is_err());
        let low = dust(0.2);
        assert!(integrate_helmholtz_singular(&low, &k2, 0.1).is_err());
    }

    #[test]
    fn branches_agree_across_threshold() {
        let c = cantor(1.0 / 3.0);
        let below = HelmholtzKernel::new(2.0 * PI - 1e-9, 1).unwrap();
        let above = HelmholtzKernel::new(2.0 * PI + 1e-9, 1).unwrap();
        let h6 = level_h(&c, 6);
        let h7 = level_h(&c, 7);
        let a = integrate_helmholtz_singular(&c, &below, h6).unwrap();
        let b = integrate_helmholtz_singular(&c, &above, h6).unwrap();
        let incr = (integrate_helmholtz_singular(&c, &below, h7).unwrap() - a).norm();
        assert!((a - b).norm() < 5.0 * incr);
    }

    #[test]
    fn predictor_constants() {
        let c = cantor(1.0 / 3.0);
        let k = HelmholtzKernel::new(5.0, 1).unwrap();
        let h = 1.0 / 27.0;
        let d = c.dim();
        let r: f64 = 1.0 / 3.0;
        let expect = 2f64.powf(2.0 / d) / r.powi(2) * h * h;
        let got = bound_helmholtz_singular(&c, &k, h).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-12);

        let k2 = HelmholtzKernel::new(1.0, 2).unwrap();
        let fine = bound_helmholtz_singular(&dust(1.0 / 3.0), &k2, 0.01).unwrap();
        let coarse = bound_helmholtz_singular(&dust(0.2501), &k2, 0.01).unwrap();
        assert!(coarse > 10.0 * fine);
        assert!(bound_helmholtz_singular(&cantor(0.5), &k, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn splitting_identity(
            x in prop::array::uniform2(-1.0f64..1.0),
            y in prop::array::uniform2(-1.0f64..1.0),
            k in 0.1f64..50.0,
            n in 1usize..=2,
        ) {
            let (x, y) = if n == 1 { ([x[0], 0.0], [y[0], 0.0]) } else { (x, y) };
            let r = dist(x, y);
            prop_assume!(r > 1e-12);
            let kernel = HelmholtzKernel::new(k, n).unwrap();
            let lhs = kernel.phi(x, y).unwrap();
            let rhs = kernel.phi_star(x, y) + kernel.c_n() * crate::kernel_phi_t::phi_t_of_r((n - 1) as f64, r);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
        }
    }
}
