//! Iterated function systems of contracting similarities and their attractors.
//!
//! Points are stored as `[f64; 2]` for both ambient dimensions; for `n = 1`
//! the second coordinate is always zero and the maps act as the identity on it.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{self, ConvexHull};
use crate::partition;

pub type Point = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// Tolerance for ratio and orthogonality validation.
pub const VALIDATION_TOL: f64 = 1e-12;

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub(crate) fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

pub(crate) fn mat_vec(a: &Mat2, x: Point) -> Point {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

fn transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Solves `m x = b` for a 2x2 system by Cramer's rule.
pub(crate) fn solve2(m: &Mat2, b: Point) -> Option<Point> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (b[0] * m[1][1] - m[0][1] * b[1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ])
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// A contracting similarity `x -> ratio * rotation * x + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    ambient_dim: usize,
    ratio: f64,
    rotation: Mat2,
    translation: Point,
}

impl Similarity {
    /// Validated constructor. For `ambient_dim = 1` the rotation must be
    /// `[[±1, 0], [0, 1]]` and the second translation entry zero.
    pub fn new(ambient_dim: usize, ratio: f64, rotation: Mat2, translation: Point) -> Result<Self> {
        if ambient_dim != 1 && ambient_dim != 2 {
            return Err(Error::invalid(format!(
                "ambient dimension {ambient_dim} unsupported (expected 1 or 2)"
            )));
        }
        if !(ratio.is_finite() && ratio > 0.0 && ratio < 1.0) {
            return Err(Error::invalid(format!("ratio {ratio} outside (0,1)")));
        }
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("translation is not finite"));
        }
        let ata = mat_mul(&transpose(&rotation), &rotation);
        for i in 0..2 {
            for j in 0..2 {
                if (ata[i][j] - IDENTITY[i][j]).abs() > VALIDATION_TOL {
                    return Err(Error::invalid(format!(
                        "rotation {rotation:?} is not orthogonal"
                    )));
                }
            }
        }
        if ambient_dim == 1
            && (rotation[0][1] != 0.0
                || rotation[1][0] != 0.0
                || rotation[1][1] != 1.0
                || translation[1] != 0.0)
        {
            return Err(Error::invalid(
                "one-dimensional map must act on the first coordinate only",
            ));
        }
        Ok(Similarity {
            ambient_dim,
            ratio,
            rotation,
            translation,
        })
    }

    /// A map of the real line, `x -> ratio * orientation * x + shift` with
    /// `orientation` equal to 1 or -1.
    pub fn line(ratio: f64, orientation: f64, shift: f64) -> Result<Self> {
        if orientation != 1.0 && orientation != -1.0 {
            return Err(Error::invalid(format!(
                "orientation {orientation} must be 1 or -1"
            )));
        }
        Self::new(1, ratio, [[orientation, 0.0], [0.0, 1.0]], [shift, 0.0])
    }

    /// A map of the plane.
    pub fn plane(ratio: f64, rotation: Mat2, translation: Point) -> Result<Self> {
        Self::new(2, ratio, rotation, translation)
    }

    /// Pure scaling plus translation in the plane.
    pub fn plane_scaling(ratio: f64, translation: Point) -> Result<Self> {
        Self::new(2, ratio, IDENTITY, translation)
    }

    /// The identity map (ratio 1). Only produced by composing the empty index.
    pub fn identity(ambient_dim: usize) -> Self {
        Similarity {
            ambient_dim,
            ratio: 1.0,
            rotation: IDENTITY,
            translation: [0.0, 0.0],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn rotation(&self) -> &Mat2 {
        &self.rotation
    }

    pub fn translation(&self) -> Point {
        self.translation
    }

    pub fn is_identity(&self) -> bool {
        self.ratio == 1.0 && self.rotation == IDENTITY && self.translation == [0.0, 0.0]
    }

    /// Whether the orthogonal part has positive determinant.
    pub fn preserves_orientation(&self) -> bool {
        let r = &self.rotation;
        r[0][0] * r[1][1] - r[0][1] * r[1][0] > 0.0
    }

    pub fn linear_part(&self) -> Mat2 {
        let r = &self.rotation;
        let k = self.ratio;
        [[k * r[0][0], k * r[0][1]], [k * r[1][0], k * r[1][1]]]
    }

    pub fn apply(&self, x: Point) -> Point {
        let y = mat_vec(&self.rotation, x);
        [
            self.ratio * y[0] + self.translation[0],
            self.ratio * y[1] + self.translation[1],
        ]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            ambient_dim: self.ambient_dim,
            ratio: self.ratio * inner.ratio,
            rotation: mat_mul(&self.rotation, &inner.rotation),
            translation: self.apply(inner.translation),
        }
    }

    pub fn inverse(&self) -> Similarity {
        let rt = transpose(&self.rotation);
        let t = mat_vec(&rt, self.translation);
        Similarity {
            ambient_dim: self.ambient_dim,
            ratio: 1.0 / self.ratio,
            rotation: rt,
            translation: [-t[0] / self.ratio, -t[1] / self.ratio],
        }
    }

    /// The fixed point `(I - ρA)^{-1} δ`.
    pub fn fixed_point(&self) -> Point {
        let l = self.linear_part();
        let m = [[1.0 - l[0][0], -l[0][1]], [-l[1][0], 1.0 - l[1][1]]];
        solve2(&m, self.translation).expect("I - ρA is invertible for ρ < 1")
    }
}

/// Free-function form of [`Similarity::fixed_point`].
pub fn fixed_point(s: &Similarity) -> Point {
    s.fixed_point()
}

/// A vector index `(m_1, ..., m_ℓ)` with 1-based entries. The empty index
/// addresses the whole attractor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VecIndex(Vec<u16>);

impl VecIndex {
    pub fn empty() -> Self {
        VecIndex(Vec::new())
    }

    pub fn new(entries: Vec<u16>) -> Self {
        VecIndex(entries)
    }

    pub fn entries(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<u16> {
        self.0.first().copied()
    }

    pub fn child(&self, m: u16) -> VecIndex {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(m);
        VecIndex(v)
    }

    pub fn parent(&self) -> Option<VecIndex> {
        if self.0.is_empty() {
            None
        } else {
            Some(VecIndex(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &VecIndex) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl From<Vec<u16>> for VecIndex {
    fn from(v: Vec<u16>) -> Self {
        VecIndex(v)
    }
}

impl fmt::Display for VecIndex {
    /// Entries joined by `.`; the empty index prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Solves `Σ ρ_m^d = 1` for `d`: bisection to width 1e-15, then one Newton step.
pub fn solve_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.len() < 2 {
        return Err(Error::invalid("at least two ratios are required"));
    }
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r > 0.0 && **r < 1.0)) {
        return Err(Error::invalid(format!("ratio {r} outside (0,1)")));
    }
    let f = |d: f64| ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    let df: f64 = ratios.iter().map(|r| r.powf(d) * r.ln()).sum();
    let polished = d - f(d) / df;
    Ok(if f(polished).abs() <= f(d).abs() { polished } else { d })
}

fn weight_factors(ratios: &[f64], dim: f64) -> Vec<f64> {
    let r0 = ratios[0];
    if ratios.iter().all(|&r| (r - r0).abs() <= 1e-14 * r0) {
        vec![1.0 / ratios.len() as f64; ratios.len()]
    } else {
        ratios.iter().map(|r| r.powf(dim)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiamProvenance {
    ExactUserSupplied,
    HullApproximated,
}

/// The attractor of an IFS together with its solved dimension, measure,
/// diameter and cached geometric data.
#[derive(Debug, Clone)]
pub struct Attractor {
    ambient_dim: usize,
    maps: Vec<Similarity>,
    dim: f64,
    measure: f64,
    diam: f64,
    diam_provenance: DiamProvenance,
    weight_factors: Vec<f64>,
    fixed_points: Vec<Point>,
    barycentre: Point,
    hull: ConvexHull,
    hull_defect: f64,
}

impl Attractor {
    pub fn new(
        maps: Vec<Similarity>,
        ambient_dim: usize,
        measure_override: Option<f64>,
        diam_override: Option<f64>,
    ) -> Result<Self> {
        if ambient_dim != 1 && ambient_dim != 2 {
            return Err(Error::invalid(format!(
                "ambient dimension {ambient_dim} unsupported (expected 1 or 2)"
            )));
        }
        if maps.len() < 2 {
            return Err(Error::invalid(format!(
                "an IFS needs at least two maps, got {}",
                maps.len()
            )));
        }
        if maps.len() > u16::MAX as usize {
            return Err(Error::invalid("too many maps"));
        }
        for s in &maps {
            if s.ambient_dim != ambient_dim {
                return Err(Error::invalid("map dimension does not match ambient dimension"));
            }
            // Re-run validation in case the value was built by hand.
            Similarity::new(ambient_dim, s.ratio, s.rotation, s.translation)?;
        }
        let ratios: Vec<f64> = maps.iter().map(|s| s.ratio).collect();
        let dim = solve_dimension(&ratios)?;
        if dim > ambient_dim as f64 + VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "solved dimension {dim} exceeds ambient dimension {ambient_dim}; the maps overlap"
            )));
        }
        let measure = match measure_override {
            Some(m) if !(m.is_finite() && m > 0.0) => {
                return Err(Error::invalid(format!("measure {m} must be positive")))
            }
            Some(m) => m,
            None => 1.0,
        };
        let weight_factors = weight_factors(&ratios, dim);
        let fixed_points: Vec<Point> = maps.iter().map(|s| s.fixed_point()).collect();
        let barycentre = partition::solve_barycentre(&maps, &weight_factors);
        let approx = geometry::iterate_hull(&maps, &fixed_points, ambient_dim, 0.0, 48);
        let (diam, diam_provenance) = match diam_override {
            Some(d) if !(d.is_finite() && d > 0.0) => {
                return Err(Error::invalid(format!("diameter {d} must be positive")))
            }
            Some(d) => (d, DiamProvenance::ExactUserSupplied),
            None => {
                let d = approx.hull.diameter();
                if d <= 0.0 {
                    return Err(Error::invalid("attractor is a single point"));
                }
                (d, DiamProvenance::HullApproximated)
            }
        };
        Ok(Attractor {
            ambient_dim,
            maps,
            dim,
            measure,
            diam,
            diam_provenance,
            weight_factors,
            fixed_points,
            barycentre,
            hull: approx.hull,
            hull_defect: approx.defect,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn num_maps(&self) -> usize {
        self.maps.len()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(|s| s.ratio).collect()
    }

    pub fn ratio(&self, m: usize) -> f64 {
        self.maps[m - 1].ratio
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.maps.iter().map(|s| s.ratio).fold(1.0, f64::min)
    }

    /// All maps share the same contraction ratio.
    pub fn is_uniform(&self) -> bool {
        let r0 = self.maps[0].ratio;
        self.maps.iter().all(|s| (s.ratio - r0).abs() <= 1e-14 * r0)
    }

    pub fn dim(&self) -> f64 {
        self.dim
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn diam_provenance(&self) -> DiamProvenance {
        self.diam_provenance
    }

    /// Fixed points `η_1, ..., η_M`.
    pub fn fixed_points(&self) -> &[Point] {
        &self.fixed_points
    }

    /// Fixed point of map `m` (1-based).
    pub fn fixed_point(&self, m: usize) -> Point {
        self.fixed_points[m - 1]
    }

    /// Barycentre `x_Γ` with respect to the Hausdorff measure.
    pub fn barycentre(&self) -> Point {
        self.barycentre
    }

    /// Inner approximation of `Hull(Γ)` computed at construction.
    pub fn hull(&self) -> &ConvexHull {
        &self.hull
    }

    /// Hausdorff-distance defect bound of [`Attractor::hull`].
    pub fn hull_defect(&self) -> f64 {
        self.hull_defect
    }

    pub fn check_index(&self, index: &VecIndex) -> Result<()> {
        let m = self.maps.len() as u16;
        if let Some(bad) = index.0.iter().find(|&&e| e < 1 || e > m) {
            return Err(Error::invalid(format!(
                "index entry {bad} out of range 1..{m}"
            )));
        }
        Ok(())
    }

    /// `s_𝐦 = s_{m_1} ∘ ... ∘ s_{m_ℓ}`.
    pub fn compose(&self, index: &VecIndex) -> Result<Similarity> {
        self.check_index(index)?;
        Ok(self.compose_unchecked(index.entries()))
    }

    pub(crate) fn compose_unchecked(&self, entries: &[u16]) -> Similarity {
        let mut s = Similarity::identity(self.ambient_dim);
        for &m in entries {
            s = s.compose(&self.maps[m as usize - 1]);
        }
        s
    }

    pub fn subcomponent(&self, index: &VecIndex) -> Result<SubComponent<'_>> {
        let map = self.compose(index)?;
        let scale = map.ratio;
        Ok(SubComponent {
            parent: self,
            index: index.clone(),
            diam: scale * self.diam,
            measure: self.index_weight(index.entries()),
            map,
        })
    }

    /// Measure fractions `ρ_m^d` (exactly `1/M` for a uniform IFS).
    pub fn weight_factors(&self) -> &[f64] {
        &self.weight_factors
    }

    /// `μ(Γ_𝐦) = μ(Γ) ∏ ρ_{m_i}^d`, accumulated as a product of the
    /// per-map factors so that uniform IFS give exact dyadic-style weights.
    pub(crate) fn index_weight(&self, entries: &[u16]) -> f64 {
        entries
            .iter()
            .fold(self.measure, |w, &m| w * self.weight_factors[m as usize - 1])
    }

    /// `Γ_𝐦` as an attractor in its own right, generated by the conjugated
    /// maps `s_𝐦 ∘ s_m ∘ s_𝐦^{-1}`.
    pub fn subattractor(&self, index: &VecIndex) -> Result<Attractor> {
        let outer = self.compose(index)?;
        if index.is_empty() {
            return Ok(self.clone());
        }
        let inv = outer.inverse();
        let maps: Vec<Similarity> = self
            .maps
            .iter()
            .map(|s| {
                let mut c = outer.compose(s).compose(&inv);
                c.ratio = s.ratio;
                c
            })
            .collect();
        Ok(Attractor {
            ambient_dim: self.ambient_dim,
            maps,
            dim: self.dim,
            measure: self.index_weight(index.entries()),
            diam: outer.ratio * self.diam,
            diam_provenance: self.diam_provenance,
            weight_factors: self.weight_factors.clone(),
            fixed_points: self.fixed_points.iter().map(|&p| outer.apply(p)).collect(),
            barycentre: outer.apply(self.barycentre),
            hull: self.hull.transform(&outer),
            hull_defect: outer.ratio * self.hull_defect,
        })
    }
}

/// Free-function form of [`Attractor::new`].
pub fn make_attractor(
    maps: Vec<Similarity>,
    ambient_dim: usize,
    measure_override: Option<f64>,
    diam_override: Option<f64>,
) -> Result<Attractor> {
    Attractor::new(maps, ambient_dim, measure_override, diam_override)
}

/// Free-function form of [`Attractor::compose`].
pub fn compose(attractor: &Attractor, index: &VecIndex) -> Result<Similarity> {
    attractor.compose(index)
}

/// Free-function form of [`Attractor::subcomponent`].
pub fn subcomponent<'a>(attractor: &'a Attractor, index: &VecIndex) -> Result<SubComponent<'a>> {
    attractor.subcomponent(index)
}

/// An addressed piece `Γ_𝐦` of an attractor.
#[derive(Debug, Clone)]
pub struct SubComponent<'a> {
    pub parent: &'a Attractor,
    pub index: VecIndex,
    pub map: Similarity,
    pub diam: f64,
    pub measure: f64,
}

impl SubComponent<'_> {
    /// Barycentre `x_𝐦 = s_𝐦(x_Γ)`.
    pub fn node(&self) -> Point {
        self.map.apply(self.parent.barycentre)
    }

    /// Quadrature weight, equal to the measure of the piece.
    pub fn weight(&self) -> f64 {
        self.measure
    }

    pub fn hull(&self) -> ConvexHull {
        self.parent.hull.transform(&self.map)
    }
}
