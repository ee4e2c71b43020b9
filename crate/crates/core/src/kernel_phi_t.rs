//! The kernels `Φ_t` (`log|x−y|` for `t = 0`, `|x−y|^{−t}` for `t > 0`) and
//! their singular integrals over self-similar sets.
//!
//! Both rules rewrite the singular integral through the self-similarity of Γ
//! as a combination of regular integrals over pairs of disjoint pieces, which
//! are then approximated by the barycentre rule.

use std::collections::BTreeSet;
use std::ops::Range;
use std::sync::Mutex;

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{self, SetDistanceOptions, TOUCH_TOL};
use crate::ifs::{dist, Attractor, Point, VecIndex};
use crate::partition::{partition_from, rule_from_partition, QuadratureRule};
use crate::quadrature::{apply_double_grouped, apply_single, CompensatedSum, PairSelection};

/// Flags shared by the singular rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularOptions {
    /// Evaluate symmetric double sums over one triangle only.
    pub symmetric: bool,
    /// Turn failed geometric preconditions into errors instead of warnings.
    pub strict: bool,
}

impl Default for SingularOptions {
    fn default() -> Self {
        SingularOptions { symmetric: true, strict: false }
    }
}

/// The kernel `Φ_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiTKernel {
    t: f64,
}

impl PhiTKernel {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid(format!("kernel exponent t = {t} must be finite and >= 0")));
        }
        Ok(PhiTKernel { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `Φ_t(x,y)`. Errors at `x = y`.
    pub fn eval(&self, x: Point, y: Point) -> Result<f64> {
        let r = dist(x, y);
        if r == 0.0 {
            return Err(Error::NonFinite { x, y: Some(y) });
        }
        Ok(phi_t_of_r(self.t, r))
    }

    /// Constant `a_t` of the error estimates: `a_0 = 2`, `a_t = t(t+2)`.
    pub fn a_t(&self) -> f64 {
        if self.t == 0.0 {
            2.0
        } else {
            self.t * (self.t + 2.0)
        }
    }
}

#[inline]
pub(crate) fn phi_t_of_r(t: f64, r: f64) -> f64 {
    if t == 0.0 {
        r.ln()
    } else if t == 1.0 {
        1.0 / r
    } else {
        r.powf(-t)
    }
}

/// `Φ_t(x,y)`: `log|x−y|` if `t = 0`, else `|x−y|^{−t}`.
pub fn phi_t(t: f64, x: Point, y: Point) -> Result<f64> {
    PhiTKernel::new(t)?.eval(x, y)
}

fn check_exponent(attractor: &Attractor, t: f64) -> Result<()> {
    PhiTKernel::new(t)?;
    if t >= attractor.dim() {
        return Err(Error::precondition(format!(
            "divergent integral: t = {t} >= d = {}",
            attractor.dim()
        )));
    }
    Ok(())
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("h = {h} must be positive")))
    }
}

pub(crate) fn precondition_failed(strict: bool, msg: String) -> Result<()> {
    if strict {
        return Err(Error::precondition(msg));
    }
    // Warn once per distinct message; studies evaluate the same attractor many times.
    static WARNED: Mutex<BTreeSet<String>> = Mutex::new(BTreeSet::new());
    let mut warned = WARNED.lock().unwrap_or_else(|e| e.into_inner());
    if !warned.contains(&msg) {
        warn!("{msg}");
        warned.insert(msg);
    }
    Ok(())
}

/// `∫_Γ Φ_t(x, η_m) dH^d(x)` where `η_m` is the fixed point of `s_m`.
pub fn integrate_phi_t_at_fixed_point(attractor: &Attractor, t: f64, m: usize, h: f64) -> Result<f64> {
    integrate_phi_t_at_fixed_point_with(attractor, t, m, h, SingularOptions::default())
}

pub fn integrate_phi_t_at_fixed_point_with(
    attractor: &Attractor,
    t: f64,
    m: usize,
    h: f64,
    opts: SingularOptions,
) -> Result<f64> {
    check_exponent(attractor, t)?;
    check_h(h)?;
    if m < 1 || m > attractor.num_maps() {
        return Err(Error::invalid(format!("map index {m} out of range 1..={}", attractor.num_maps())));
    }
    let (_, clearance) = geometry::fixed_point_clearance(attractor, m, SetDistanceOptions::default());
    if clearance < TOUCH_TOL {
        precondition_failed(
            opts.strict,
            format!("fixed point of map {m} lies on another first-level piece"),
        )?;
    }

    let eta = attractor.fixed_point(m);
    let mut s = CompensatedSum::new();
    for other in 1..=attractor.num_maps() {
        if other == m {
            continue;
        }
        let part = partition_from(attractor, &VecIndex::new(vec![other as u16]), h)?;
        let rule = rule_from_partition(&part);
        s.add(apply_single::<f64, _>(&rule, |x| phi_t_of_r(t, dist(x, eta)))?);
    }
    let s: f64 = s.value();

    let rho = attractor.ratio(m);
    let p = attractor.weight_factors()[m - 1];
    let value = if t == 0.0 {
        (s + attractor.measure() * p * rho.ln()) / (1.0 - p)
    } else {
        s / (1.0 - p * rho.powf(-t))
    };
    Ok(value)
}

/// `∫_Γ ∫_Γ Φ_t(x,y) dH^d(y) dH^d(x)`.
pub fn integrate_phi_t_double(attractor: &Attractor, t: f64, h: f64) -> Result<f64> {
    integrate_phi_t_double_with(attractor, t, h, SingularOptions::default())
}

pub fn integrate_phi_t_double_with(attractor: &Attractor, t: f64, h: f64, opts: SingularOptions) -> Result<f64> {
    check_exponent(attractor, t)?;
    check_h(h)?;
    let (_, r_gamma) = geometry::set_separation(attractor, SetDistanceOptions::default());
    if r_gamma < TOUCH_TOL {
        precondition_failed(opts.strict, "first-level pieces of the attractor are not disjoint".into())?;
    }
    phi_t_double_on(attractor, &VecIndex::empty(), t, h, opts.symmetric)
}

/// Rule for `∫_{Γ_r} ∫_{Γ_r} Φ_t` on the sub-component `Γ_r`, built from the
/// partitions of its children `Γ_{r·m}` at resolution `h`.
pub(crate) fn phi_t_double_on(attractor: &Attractor, root: &VecIndex, t: f64, h: f64, symmetric: bool) -> Result<f64> {
    let m_count = attractor.num_maps();
    let mut rule = QuadratureRule { nodes: Vec::new(), weights: Vec::new(), h };
    let mut groups: Vec<Range<usize>> = Vec::with_capacity(m_count);
    for m in 1..=m_count {
        let part = partition_from(attractor, &root.child(m as u16), h)?;
        let child = rule_from_partition(&part);
        let start = rule.nodes.len();
        rule.nodes.extend(child.nodes);
        rule.weights.extend(child.weights);
        groups.push(start..rule.nodes.len());
    }
    let s: f64 = apply_double_grouped(&rule, &groups, PairSelection::DifferentGroup, symmetric, &|x, y| {
        phi_t_of_r(t, dist(x, y))
    })?;

    let factors = attractor.weight_factors();
    let mu_r = attractor.index_weight(root.entries());
    if t == 0.0 {
        let mut corr = CompensatedSum::new();
        let mut denom = CompensatedSum::new();
        for (m, &p) in factors.iter().enumerate() {
            corr.add(p * p * attractor.ratio(m + 1).ln());
            denom.add(p * p);
        }
        let corr: f64 = corr.value();
        let denom: f64 = denom.value();
        Ok((s + mu_r * mu_r * corr) / (1.0 - denom))
    } else {
        let mut denom = CompensatedSum::new();
        for (m, &p) in factors.iter().enumerate() {
            denom.add(p * p * attractor.ratio(m + 1).powf(-t));
        }
        let denom: f64 = denom.value();
        Ok(s / (1.0 - denom))
    }
}

/// A priori bound for [`integrate_phi_t_at_fixed_point`]:
/// `n a_t h² μ / (2 (1 − ρ_m^{d−t}) R_{m,h}^{t+2})`.
pub fn bound_phi_t_single(attractor: &Attractor, t: f64, m: usize, h: f64) -> Result<f64> {
    check_exponent(attractor, t)?;
    check_h(h)?;
    let r = geometry::r_m_h(attractor, m, h)?;
    if r <= 0.0 {
        return Err(Error::precondition(format!("R_(m,h) = 0 for m = {m}: bound unavailable")));
    }
    let n = attractor.ambient_dim() as f64;
    let a_t = PhiTKernel::new(t)?.a_t();
    let rho = attractor.ratio(m);
    let d = attractor.dim();
    Ok(n * a_t * h * h * attractor.measure() / (2.0 * (1.0 - rho.powf(d - t)) * r.powf(t + 2.0)))
}

/// A priori bound for [`integrate_phi_t_double`]:
/// `2n a_t h² μ² / ((1 − Σρ_m^{2d−t}) R_{Γ,Hull,h}^{t+2})`.
pub fn bound_phi_t_double(attractor: &Attractor, t: f64, h: f64) -> Result<f64> {
    check_exponent(attractor, t)?;
    check_h(h)?;
    let r = geometry::r_gamma_hull_h(attractor, h)?;
    if r <= 0.0 {
        return Err(Error::precondition("R_(Gamma,Hull,h) = 0: bound unavailable"));
    }
    let n = attractor.ambient_dim() as f64;
    let a_t = PhiTKernel::new(t)?.a_t();
    let d = attractor.dim();
    let denom = 1.0 - attractor.ratios().iter().map(|rho| rho.powf(2.0 * d - t)).sum::<f64>();
    let mu = attractor.measure();
    Ok(2.0 * n * a_t * h * h * mu * mu / (denom * r.powf(t + 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Similarity;
    use crate::partition::{level_h, partition_lh};
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

    fn naive_single(attr: &Attractor, t: f64, eta: Point, h: f64) -> f64 {
        let rule = rule_from_partition(&partition_lh(attr, h).unwrap());
        rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w * phi_t_of_r(t, dist(x, eta))).sum()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(phi_t(0.0, [0.0, 0.0], [1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(phi_t(1.0, [0.0, 0.0], [0.0, 2.0]).unwrap(), 0.5);
        assert!(phi_t(0.5, [1.0, 1.0], [1.0, 1.0]).is_err());
        assert!(PhiTKernel::new(-0.1).is_err());
        assert_eq!(PhiTKernel::new(0.0).unwrap().a_t(), 2.0);
        assert_eq!(PhiTKernel::new(1.0).unwrap().a_t(), 3.0);
    }

    #[test]
    fn divergent_exponent_rejected() {
        let c = cantor(1.0 / 3.0);
        let d = c.dim();
        let e = integrate_phi_t_double(&c, d, 0.1).unwrap_err();
        assert!(e.to_string().contains("divergent integral"));
        assert!(integrate_phi_t_at_fixed_point(&c, d + 0.1, 1, 0.1).is_err());
        assert!(integrate_phi_t_double(&c, -1.0, 0.1).is_err());
    }

    #[test]
    fn interval_fixed_point_log() {
        let iv = cantor(0.5);
        let v = integrate_phi_t_at_fixed_point(&iv, 0.0, 1, level_h(&iv, 10)).unwrap();
        assert!((v + 1.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn interval_double_log() {
        let iv = cantor(0.5);
        let v = integrate_phi_t_double(&iv, 0.0, level_h(&iv, 10)).unwrap();
        assert!((v + 1.5).abs() < 1e-4, "{v}");
    }

    #[test]
    fn cantor_fixed_point_matches_naive() {
        let c = cantor(1.0 / 3.0);
        let t = 0.3;
        let v = integrate_phi_t_at_fixed_point(&c, t, 2, level_h(&c, 6)).unwrap();
        let naive = naive_single(&c, t, c.fixed_point(2), level_h(&c, 16));
        assert!(((v - naive) / naive).abs() < 1e-3, "{v} vs {naive}");
    }

    #[test]
    fn symmetric_matches_full() {
        let c = dust(1.0 / 3.0);
        let h = level_h(&c, 3);
        for t in [0.0, 0.7] {
            let sym = integrate_phi_t_double_with(&c, t, h, SingularOptions { symmetric: true, strict: true }).unwrap();
            let full = integrate_phi_t_double_with(&c, t, h, SingularOptions { symmetric: false, strict: true }).unwrap();
            assert!(((sym - full) / full).abs() < 1e-13);
        }
    }

    #[test]
    fn strict_rejects_touching() {
        let iv = cantor(0.5);
        let strict = SingularOptions { symmetric: true, strict: true };
        assert!(integrate_phi_t_double_with(&iv, 0.0, 0.1, strict).is_err());
        assert!(integrate_phi_t_double_with(&iv, 0.0, 0.1, SingularOptions::default()).is_ok());
    }

    #[test]
    fn rescaled_copy_scales_by_rho_power() {
        let c = cantor(1.0 / 3.0);
        let sub = c.subattractor(&VecIndex::new(vec![1])).unwrap();
        let t = 0.4;
        let rho: f64 = 1.0 / 3.0;
        let h = level_h(&c, 5);
        let full = integrate_phi_t_double(&c, t, h).unwrap();
        let small = integrate_phi_t_double(&sub, t, rho * h).unwrap();
        let expected = rho.powf(2.0 * c.dim() - t) * full;
        assert!(((small - expected) / expected).abs() < 1e-10);
    }

    #[test]
    fn bounds() {
        let d = dust(1.0 / 3.0);
        let h = 2f64.sqrt() / 9.0;
        let b = bound_phi_t_single(&d, 1.0, 1, h).unwrap();
        let dim = d.dim();
        let r: f64 = 2.0 / 3.0;
        let expect = 2.0 * 3.0 * h * h * d.measure() / (2.0 * (1.0 - (1.0f64 / 3.0).powf(dim - 1.0)) * r.powi(3));
        assert!(((b - expect) / expect).abs() < 1e-10);

        let c = cantor(1.0 / 3.0);
        let h = 1.0 / 9.0;
        let b = bound_phi_t_double(&c, 0.0, h).unwrap();
        let denom = 1.0 - 2.0 * (1.0f64 / 3.0).powf(2.0 * c.dim());
        let expect = 2.0 * 2.0 * h * h / (denom * (1.0f64 / 3.0).powi(2));
        assert!(((b - expect) / expect).abs() < 1e-10);

        assert!(bound_phi_t_double(&cantor(0.5), 0.0, 0.1).is_err());
    }

    proptest! {
        #[test]
        fn homogeneity(
            x in prop::array::uniform2(-5.0f64..5.0),
            y in prop::array::uniform2(-5.0f64..5.0),
            rho in 0.01f64..10.0,
            t in 0.0f64..3.0,
        ) {
            prop_assume!(dist(x, y) > 1e-6);
            let sx = [rho * x[0], rho * x[1]];
            let sy = [rho * y[0], rho * y[1]];
            let base = phi_t(t, x, y).unwrap();
            let scaled = phi_t(t, sx, sy).unwrap();
            let t0 = phi_t(0.0, x, y).unwrap();
            let s0 = phi_t(0.0, sx, sy).unwrap();
            prop_assert!((scaled - rho.powf(-t) * base).abs() <= 1e-13 * scaled.abs().max(1e-300) * 10.0);
            prop_assert!((s0 - (rho.ln() + t0)).abs() <= 1e-13 * (1.0 + s0.abs()) * 10.0);
        }
    }
}
