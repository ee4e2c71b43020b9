//! Composite barycentre rules for single and double integrals, and the
//! a priori error bounds for smooth integrands.
//!
//! All sums are compensated and run in lexicographic index order. Double
//! sums are split by rows: each row is summed sequentially, rows may run in
//! parallel, and the row totals are reduced sequentially in row order, so
//! the result does not depend on the number of worker threads.

pub mod sum;

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{Attractor, Point};
use crate::partition::{partition_lh, rule_from_partition, QuadratureRule};
pub use sum::{CompensatedSum, Neumaier, Scalar};

/// Optional regularity data used by the bound evaluators.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Regularity {
    /// Hölder/Lipschitz constant `L_0` with exponent 1.
    pub lip0: Option<f64>,
    /// `sup |∇f|`.
    pub sup_grad: Option<f64>,
    /// `sup ‖Hf‖_2`.
    pub sup_hess: Option<f64>,
}

/// A single-integral integrand.
#[derive(Debug, Clone)]
pub struct Integrand1<F> {
    pub f: F,
    pub regularity: Regularity,
}

impl<F> Integrand1<F> {
    pub fn new(f: F) -> Self {
        Integrand1 { f, regularity: Regularity::default() }
    }

    pub fn with_regularity(mut self, regularity: Regularity) -> Self {
        self.regularity = regularity;
        self
    }
}

/// A double-integral integrand, optionally flagged `f(x,y) = f(y,x)`.
#[derive(Debug, Clone)]
pub struct Integrand2<F> {
    pub f: F,
    pub symmetric: bool,
    pub regularity: Regularity,
}

impl<F> Integrand2<F> {
    pub fn new(f: F) -> Self {
        Integrand2 { f, symmetric: false, regularity: Regularity::default() }
    }

    pub fn symmetric(mut self) -> Self {
        self.symmetric = true;
        self
    }

    pub fn with_regularity(mut self, regularity: Regularity) -> Self {
        self.regularity = regularity;
        self
    }
}

/// `Σ w_𝐦 f(x_𝐦)` over `L_h(Γ)`.
pub fn integrate_single<T, F>(attractor: &Attractor, f: &Integrand1<F>, h: f64) -> Result<T>
where
    T: Scalar,
    F: Fn(Point) -> T,
{
    let rule = rule_from_partition(&partition_lh(attractor, h)?);
    apply_single(&rule, &f.f)
}

/// Applies a rule to a single-integral integrand.
pub fn apply_single<T, F>(rule: &QuadratureRule, f: F) -> Result<T>
where
    T: Scalar,
    F: Fn(Point) -> T,
{
    let mut acc = CompensatedSum::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(x);
        if !v.is_finite_value() {
            return Err(Error::NonFinite { x, y: None });
        }
        acc.add(v * w);
    }
    Ok(acc.value())
}

/// `Σ_𝐦 Σ_𝐦' w_𝐦 w'_𝐦' f(x_𝐦, x'_𝐦')` over `L_h(Γ) × L_h(Γ')`. When both
/// attractors are the same object and the integrand is flagged symmetric,
/// only the upper triangle and the diagonal are evaluated.
pub fn integrate_double<T, F>(
    attr1: &Attractor,
    attr2: &Attractor,
    f: &Integrand2<F>,
    h: f64,
) -> Result<T>
where
    T: Scalar,
    F: Fn(Point, Point) -> T + Sync,
{
    let r1 = rule_from_partition(&partition_lh(attr1, h)?);
    if std::ptr::eq(attr1, attr2) && f.symmetric {
        check_symmetry(&r1, &f.f)?;
        return apply_double_symmetric(&r1, &f.f);
    }
    let r2 = rule_from_partition(&partition_lh(attr2, h)?);
    apply_double(&r1, &r2, &f.f)
}

fn check_symmetry<T, F>(rule: &QuadratureRule, f: &F) -> Result<()>
where
    T: Scalar,
    F: Fn(Point, Point) -> T,
{
    let n = rule.len();
    let picks = [0, n / 3, n / 2, (2 * n) / 3, n.saturating_sub(1)];
    for &i in &picks {
        for &j in &picks {
            if i == j {
                continue;
            }
            let (a, b) = f(rule.nodes[i], rule.nodes[j]).parts();
            let (c, d) = f(rule.nodes[j], rule.nodes[i]).parts();
            let scale = 1e-12 * (1.0 + a.abs().max(b.abs()));
            if (a - c).abs() > scale || (b - d).abs() > scale {
                return Err(Error::invalid(
                    "integrand flagged symmetric fails f(x,y) = f(y,x)",
                ));
            }
        }
    }
    Ok(())
}

/// Full double sum of a rule pair.
pub fn apply_double<T, F>(r1: &QuadratureRule, r2: &QuadratureRule, f: &F) -> Result<T>
where
    T: Scalar,
    F: Fn(Point, Point) -> T + Sync,
{
    row_reduce(r1.len(), |i| {
        sum_row(r1.nodes[i], r1.weights[i], &r2.nodes, &r2.weights, 0..r2.len(), f, 1.0)
    })
}

/// Symmetric double sum of a rule with itself (upper triangle doubled plus diagonal).
pub fn apply_double_symmetric<T, F>(rule: &QuadratureRule, f: &F) -> Result<T>
where
    T: Scalar,
    F: Fn(Point, Point) -> T + Sync,
{
    let n = rule.len();
    row_reduce(n, |i| {
        let (x, w) = (rule.nodes[i], rule.weights[i]);
        let mut acc = CompensatedSum::new();
        acc.add(eval_pair(f, x, x)? * (w * w));
        acc.add(sum_row::<T, F>(x, w, &rule.nodes, &rule.weights, i + 1..n, f, 2.0)?);
        Ok(acc.value())
    })
}

/// Which pairs of a grouped node set enter a double sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSelection {
    /// Pairs whose nodes lie in different groups.
    DifferentGroup,
    /// Pairs whose nodes lie in the same group (including the diagonal).
    SameGroup,
}

/// Double sum of a rule with itself restricted by contiguous groups.
/// `groups` lists the index ranges of the groups in order and must cover
/// `0..rule.len()`. `symmetric` evaluates only `j > i` (doubled) plus the
/// diagonal where it is selected.
pub fn apply_double_grouped<T, F>(
    rule: &QuadratureRule,
    groups: &[Range<usize>],
    selection: PairSelection,
    symmetric: bool,
    f: &F,
) -> Result<T>
where
    T: Scalar,
    F: Fn(Point, Point) -> T + Sync,
{
    let n = rule.len();
    let mut group_of = vec![0..0; n];
    for g in groups {
        for i in g.clone() {
            group_of[i] = g.clone();
        }
    }
    let (nodes, weights) = (&rule.nodes, &rule.weights);
    row_reduce(n, |i| {
        let (x, w) = (nodes[i], weights[i]);
        let g = &group_of[i];
        match (selection, symmetric) {
            (PairSelection::DifferentGroup, true) => sum_row(x, w, nodes, weights, g.end..n, f, 2.0),
            (PairSelection::DifferentGroup, false) => {
                let mut acc = CompensatedSum::new();
                acc.add(sum_row::<T, F>(x, w, nodes, weights, 0..g.start, f, 1.0)?);
                acc.add(sum_row::<T, F>(x, w, nodes, weights, g.end..n, f, 1.0)?);
                Ok(acc.value())
            }
            (PairSelection::SameGroup, true) => {
                let mut acc = CompensatedSum::new();
                acc.add(eval_pair(f, x, x)? * (w * w));
                acc.add(sum_row::<T, F>(x, w, nodes, weights, i + 1..g.end, f, 2.0)?);
                Ok(acc.value())
            }
            (PairSelection::SameGroup, false) => sum_row(x, w, nodes, weights, g.clone(), f, 1.0),
        }
    })
}

#[inline]
fn eval_pair<T, F>(f: &F, x: Point, y: Point) -> Result<T>
where
    T: Scalar,
    F: Fn(Point, Point) -> T,
{
    let v = f(x, y);
    if v.is_finite_value() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x, y: Some(y) })
    }
}

#[inline]
fn sum_row<T, F>(
    x: Point,
    w: f64,
    nodes: &[Point],
    weights: &[f64],
    cols: Range<usize>,
    f: &F,
    factor: f64,
) -> Result<T>
where
    T: Scalar,
    F: Fn(Point, Point) -> T,
{
    let mut acc = CompensatedSum::new();
    for j in cols {
        acc.add(eval_pair(f, x, nodes[j])? * weights[j]);
    }
    Ok(acc.value::<T>() * (w * factor))
}

/// Evaluates `row(i)` for all rows (possibly in parallel) and sums the
/// results sequentially in row order.
pub(crate) fn row_reduce<T, R>(rows: usize, row: R) -> Result<T>
where
    T: Scalar,
    R: Fn(usize) -> Result<T> + Sync,
{
    let values: Vec<T> = (0..rows).into_par_iter().map(&row).collect::<Result<Vec<T>>>()?;
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    Ok(acc.value())
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("h = {h} must be positive")))
    }
}

/// Tightest available a priori bound for the single barycentre rule:
/// `h μ L_0`, `h μ sup|∇f|`, `h²/2 μ sup‖Hf‖`.
pub fn bound_single(
    attractor: &Attractor,
    h: f64,
    sup_grad: Option<f64>,
    sup_hess: Option<f64>,
    lip0: Option<f64>,
) -> Result<f64> {
    check_h(h)?;
    let mu = attractor.measure();
    let candidates = [
        lip0.map(|l| h * mu * l),
        sup_grad.map(|g| h * mu * g),
        sup_hess.map(|s| 0.5 * h * h * mu * s),
    ];
    tightest(&candidates)
}

/// Tightest available a priori bound for the iterated barycentre rule:
/// `√2 h μμ' L_0`, `√2 h μμ' sup|∇f|`, `h² μμ' sup‖Hf‖`.
pub fn bound_double(
    attr1: &Attractor,
    attr2: &Attractor,
    h: f64,
    sup_grad: Option<f64>,
    sup_hess: Option<f64>,
    lip0: Option<f64>,
) -> Result<f64> {
    check_h(h)?;
    let mm = attr1.measure() * attr2.measure();
    let s2 = std::f64::consts::SQRT_2;
    let candidates = [
        lip0.map(|l| s2 * h * mm * l),
        sup_grad.map(|g| s2 * h * mm * g),
        sup_hess.map(|s| h * h * mm * s),
    ];
    tightest(&candidates)
}

fn tightest(candidates: &[Option<f64>]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for c in candidates.iter().flatten() {
        if !(c.is_finite() && *c >= 0.0) {
            return Err(Error::invalid("regularity data must be finite and non-negative"));
        }
        best = Some(best.map_or(*c, |b| b.min(*c)));
    }
    best.ok_or_else(|| Error::invalid("no regularity datum supplied"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Similarity;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn interval() -> Attractor {
        let maps = vec![
            Similarity::line(0.5, 1.0, 0.0).unwrap(),
            Similarity::line(0.5, 1.0, 0.5).unwrap(),
        ];
        Attractor::new(maps, 1, Some(1.0), Some(1.0)).unwrap()
    }

    fn cantor() -> Attractor {
        let r = 1.0 / 3.0;
        let maps = vec![
            Similarity::line(r, 1.0, 0.0).unwrap(),
            Similarity::line(r, 1.0, 1.0 - r).unwrap(),
        ];
        Attractor::new(maps, 1, Some(1.0), Some(1.0)).unwrap()
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s: Neumaier = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn constants_and_linear() {
        let a = cantor();
        for h in [1.0, 0.1, 0.001] {
            let one: f64 = integrate_single(&a, &Integrand1::new(|_| 1.0), h).unwrap();
            assert_eq!(one, 1.0);
            let lin: f64 = integrate_single(&a, &Integrand1::new(|x: Point| 3.0 * x[0] - 1.0), h).unwrap();
            assert!((lin - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_x_squared() {
        let q: f64 = integrate_single(&interval(), &Integrand1::new(|x: Point| x[0] * x[0]), 0.25).unwrap();
        assert!((q - 21.0 / 64.0).abs() < 1e-15);
        // h²/2 · μ · sup‖Hf‖ = (1/16)/2 · 2
        let b = bound_single(&interval(), 0.25, None, Some(2.0), None).unwrap();
        assert!((b - 1.0 / 16.0).abs() < 1e-16);
        assert!(b >= (q - 1.0 / 3.0).abs());
    }

    #[test]
    fn double_examples() {
        let a = interval();
        let one: f64 = integrate_double(&a, &a, &Integrand2::new(|_, _| 1.0), 0.1).unwrap();
        assert_eq!(one, 1.0);
        let s: f64 = integrate_double(&a, &a, &Integrand2::new(|x: Point, y: Point| x[0] + y[0]), 0.1).unwrap();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_integrand() {
        let a = cantor();
        let z: Complex64 = integrate_single(&a, &Integrand1::new(|x: Point| Complex64::new(x[0], 2.0)), 0.01).unwrap();
        assert!((z - Complex64::new(0.5, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn non_finite_reports_node() {
        let a = cantor();
        let err = integrate_single::<f64, _>(&a, &Integrand1::new(|x: Point| 1.0 / (x[0] - 1.0 / 6.0)), 0.5)
            .unwrap_err();
        match err {
            Error::NonFinite { x, y: None } => assert!((x[0] - 1.0 / 6.0).abs() < 1e-15),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn asymmetric_flag_rejected() {
        let a = cantor();
        let f = Integrand2::new(|x: Point, y: Point| x[0] - 2.0 * y[0]).symmetric();
        assert!(integrate_double::<f64, _>(&a, &a, &f, 0.05).is_err());
    }

    #[test]
    fn bound_examples() {
        let a = interval();
        assert_eq!(bound_single(&a, 0.1, Some(0.0), Some(0.0), Some(0.0)).unwrap(), 0.0);
        assert!((bound_single(&a, 0.1, None, None, Some(3.0)).unwrap() - 0.3).abs() < 1e-15);
        assert!(bound_single(&a, 0.1, None, None, None).is_err());
        assert_eq!(bound_double(&a, &a, 0.1, Some(0.0), None, None).unwrap(), 0.0);
        let b = bound_double(&a, &a, 0.1, None, None, Some(1.0)).unwrap();
        assert!((b - 2f64.sqrt() * 0.1).abs() < 1e-15);
        let b = bound_double(&a, &a, 0.1, None, Some(7.0), None).unwrap();
        assert!((b - 0.07).abs() < 1e-15);
    }

    #[test]
    fn grouped_selections_partition_the_full_sum() {
        let a = cantor();
        let rule = rule_from_partition(&partition_lh(&a, 0.01).unwrap());
        let n = rule.len();
        let groups = vec![0..n / 4, n / 4..n / 2, n / 2..n];
        let f = |x: Point, y: Point| (x[0] - y[0]).cos() + x[0] * y[0];
        let full: f64 = apply_double(&rule, &rule, &f).unwrap();
        for sym in [false, true] {
            let d: f64 = apply_double_grouped(&rule, &groups, PairSelection::DifferentGroup, sym, &f).unwrap();
            let s: f64 = apply_double_grouped(&rule, &groups, PairSelection::SameGroup, sym, &f).unwrap();
            assert!((d + s - full).abs() < 1e-14);
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let a = cantor();
        let rule = rule_from_partition(&partition_lh(&a, 0.002).unwrap());
        let f = |x: Point, y: Point| ((x[0] - y[0]).abs() + 0.1).ln();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| apply_double::<f64, _>(&rule, &rule, &f).unwrap())
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }

    proptest! {
        #[test]
        fn symmetric_matches_full(l in 1usize..8, c in 0.1f64..5.0) {
            let a = cantor();
            let rule = rule_from_partition(&partition_lh(&a, (1.0f64 / 3.0).powi(l as i32)).unwrap());
            let f = |x: Point, y: Point| (c * (x[0] - y[0])).cos();
            let full: f64 = apply_double(&rule, &rule, &f).unwrap();
            let half: f64 = apply_double_symmetric(&rule, &f).unwrap();
            // Relative to μ² sup|f| = 1, since the value itself can cancel to near zero.
            prop_assert!((full - half).abs() <= 1e-13);
        }

        #[test]
        fn affine_exact(a0 in -3.0f64..3.0, b0 in -3.0f64..3.0, h in 0.001f64..1.0) {
            let a = cantor();
            let q: f64 = integrate_single(&a, &Integrand1::new(|x: Point| a0 * x[0] + b0), h).unwrap();
            let exact = a0 * 0.5 + b0;
            prop_assert!((q - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
        }
    }
}
