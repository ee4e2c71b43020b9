//! Convex hulls of attractors and sub-components, hull distances, and the
//! separation parameters `R_Γ`, `R_{Γ,Hull}`, `R_{m,h}` and `R_{Γ,Hull,h}`.
//!
//! `Hull(Γ)` is approximated from the inside by hulls of fixed-point clouds.
//! Set distances are found by best-first branch and bound over pairs of
//! sub-components: hull distances give lower bounds, hull vertices (which
//! are points of Γ) give upper bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::ifs::{dist, Attractor, Point, Similarity, VecIndex};
use crate::partition::admits;

/// Distances below this are reported as zero ("touching").
pub const TOUCH_TOL: f64 = 1e-12;

/// Default level cap for [`hull_approx`].
pub const HULL_LEVEL_CAP: usize = 24;

const MAX_HULL_VERTICES: usize = 4096;

/// A convex set in the line or the plane.
///
/// Polygons are counterclockwise with no three collinear vertices. A polygon
/// with one or two vertices is a point or a segment.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexHull {
    Interval { lo: f64, hi: f64 },
    Polygon(Vec<Point>),
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

impl ConvexHull {
    /// Convex hull of a point set. For `ambient_dim = 1` only the first
    /// coordinate is used.
    pub fn from_points(ambient_dim: usize, points: &[Point]) -> ConvexHull {
        assert!(!points.is_empty(), "hull of an empty point set");
        if ambient_dim == 1 {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            return ConvexHull::Interval { lo, hi };
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() <= 2 {
            return ConvexHull::Polygon(pts);
        }
        let scale = pts
            .iter()
            .flat_map(|p| [p[0].abs(), p[1].abs()])
            .fold(0.0, f64::max)
            .max(dist(pts[0], pts[pts.len() - 1]));
        let eps = 1e-14 * scale * scale;
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        if lower.len() == 2 && lower[0] == lower[1] {
            lower.pop();
        }
        ConvexHull::Polygon(lower)
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            ConvexHull::Interval { .. } => 1,
            ConvexHull::Polygon(_) => 2,
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        match self {
            ConvexHull::Interval { lo, hi } if lo == hi => vec![[*lo, 0.0]],
            ConvexHull::Interval { lo, hi } => vec![[*lo, 0.0], [*hi, 0.0]],
            ConvexHull::Polygon(v) => v.clone(),
        }
    }

    /// Image of the hull under a similarity.
    pub fn transform(&self, s: &Similarity) -> ConvexHull {
        match self {
            ConvexHull::Interval { lo, hi } => {
                let a = s.apply([*lo, 0.0])[0];
                let b = s.apply([*hi, 0.0])[0];
                ConvexHull::Interval { lo: a.min(b), hi: a.max(b) }
            }
            ConvexHull::Polygon(v) => {
                let mut w: Vec<Point> = v.iter().map(|&p| s.apply(p)).collect();
                if !s.preserves_orientation() {
                    w.reverse();
                }
                ConvexHull::Polygon(w)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            ConvexHull::Interval { lo, hi } => hi - lo,
            ConvexHull::Polygon(v) => {
                let mut d: f64 = 0.0;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        d = d.max(dist(v[i], v[j]));
                    }
                }
                d
            }
        }
    }

    fn edges(v: &[Point]) -> Vec<(Point, Point)> {
        match v.len() {
            1 => vec![(v[0], v[0])],
            2 => vec![(v[0], v[1])],
            n => (0..n).map(|i| (v[i], v[(i + 1) % n])).collect(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.distance_to_point(p) == 0.0
    }

    /// Euclidean distance from a point to the hull (0 inside).
    pub fn distance_to_point(&self, p: Point) -> f64 {
        match self {
            ConvexHull::Interval { lo, hi } => (lo - p[0]).max(p[0] - hi).max(0.0),
            ConvexHull::Polygon(v) => {
                if v.len() >= 3 && (0..v.len()).all(|i| cross(v[i], v[(i + 1) % v.len()], p) >= 0.0) {
                    return 0.0;
                }
                Self::edges(v)
                    .into_iter()
                    .map(|(a, b)| point_segment_distance(p, a, b))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Hausdorff distance between two hulls (attained at vertices).
    pub fn hausdorff(&self, other: &ConvexHull) -> f64 {
        let a = self.vertices().into_iter().map(|p| other.distance_to_point(p)).fold(0.0, f64::max);
        let b = other.vertices().into_iter().map(|p| self.distance_to_point(p)).fold(0.0, f64::max);
        a.max(b)
    }

    fn vertex_distance(&self, other: &ConvexHull) -> f64 {
        let w = other.vertices();
        self.vertices()
            .into_iter()
            .flat_map(|p| w.iter().map(move |&q| dist(p, q)))
            .fold(f64::INFINITY, f64::min)
    }
}

fn raw_hull_distance(a: &ConvexHull, b: &ConvexHull) -> f64 {
    match (a, b) {
        (ConvexHull::Interval { lo: a0, hi: a1 }, ConvexHull::Interval { lo: b0, hi: b1 }) => {
            (b0 - a1).max(a0 - b1).max(0.0)
        }
        (ConvexHull::Polygon(v), ConvexHull::Polygon(w)) => {
            if v.len() >= 3 && w.iter().any(|&p| a.distance_to_point(p) == 0.0) {
                return 0.0;
            }
            if w.len() >= 3 && v.iter().any(|&p| b.distance_to_point(p) == 0.0) {
                return 0.0;
            }
            let ew = ConvexHull::edges(w);
            ConvexHull::edges(v)
                .into_iter()
                .flat_map(|(p, q)| ew.iter().map(move |&(r, s)| segment_distance(p, q, r, s)))
                .fold(f64::INFINITY, f64::min)
        }
        _ => unreachable!("dimension mismatch checked by caller"),
    }
}

/// Euclidean distance between two convex hulls; 0 when they intersect.
/// Distances below [`TOUCH_TOL`] are clamped to 0.
pub fn hull_distance(h1: &ConvexHull, h2: &ConvexHull) -> Result<f64> {
    if h1.ambient_dim() != h2.ambient_dim() {
        return Err(Error::invalid("hull dimension mismatch"));
    }
    Ok(clamp_touching(raw_hull_distance(h1, h2)))
}

fn clamp_touching(d: f64) -> f64 {
    if d < TOUCH_TOL {
        0.0
    } else {
        d
    }
}

/// Result of the hull iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct HullApprox {
    pub hull: ConvexHull,
    /// Level `ℓ` of the fixed-point cloud whose hull is returned.
    pub level: usize,
    /// Bound `ρ_max^ℓ · diam` on the distance from `Hull(Γ)` to the result.
    pub defect: f64,
    pub converged: bool,
}

/// Iterates `H_{ℓ+1} = Hull(∪_m s_m(H_ℓ))` from the hull of the fixed points
/// until successive hulls are within `tol` (or equal), or `cap` is reached.
pub(crate) fn iterate_hull(
    maps: &[Similarity],
    fixed_points: &[Point],
    ambient_dim: usize,
    tol: f64,
    cap: usize,
) -> HullApprox {
    let rho_max = maps.iter().map(|s| s.ratio()).fold(0.0, f64::max);
    let mut hull = ConvexHull::from_points(ambient_dim, fixed_points);
    let mut level = 0;
    let mut converged = false;
    while level < cap {
        let verts = hull.vertices();
        let images: Vec<Point> = maps.iter().flat_map(|s| verts.iter().map(move |&p| s.apply(p))).collect();
        let next = ConvexHull::from_points(ambient_dim, &images);
        let delta = hull.hausdorff(&next);
        if delta == 0.0 || delta < tol {
            converged = true;
            break;
        }
        hull = next;
        level += 1;
        if hull.vertices().len() > MAX_HULL_VERTICES {
            break;
        }
    }
    let defect = rho_max.powi(level as i32) * hull.diameter();
    HullApprox { hull, level, defect, converged }
}

/// Inner approximation of `Hull(Γ)` from fixed-point clouds, refined until
/// successive hulls differ by less than `tol` in Hausdorff distance.
pub fn hull_approx(attractor: &Attractor, tol: f64) -> Result<HullApprox> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!("hull tolerance {tol} must be positive")));
    }
    let approx = iterate_hull(
        attractor.maps(),
        attractor.fixed_points(),
        attractor.ambient_dim(),
        tol,
        HULL_LEVEL_CAP,
    );
    if !approx.converged {
        return Err(Error::precondition(format!(
            "hull did not converge to tolerance {tol} within level {HULL_LEVEL_CAP}"
        )));
    }
    Ok(approx)
}

/// Hull of the sub-component `Γ_𝐦`, i.e. `s_𝐦(Hull(Γ))`.
pub fn subcomponent_hull(attractor: &Attractor, index: &VecIndex) -> Result<ConvexHull> {
    Ok(attractor.hull().transform(&attractor.compose(index)?))
}

/// The separation parameters of an attractor at partition parameter `h`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SeparationReport {
    /// `R_Γ`: minimum distance between distinct level-1 pieces.
    pub r_gamma: f64,
    /// Two-sided bracket `[lower, upper]` for `R_Γ` from the search.
    pub r_gamma_bracket: (f64, f64),
    /// `R_{Γ,Hull}`: minimum distance between level-1 hulls.
    pub r_gamma_hull: f64,
    /// `R_{m,h}` for `m = 1..M`.
    pub r_m_h: Vec<f64>,
    /// `R_{Γ,Hull,h}`: minimum hull distance between pieces of `L_h(Γ)` with
    /// different first index.
    pub r_gamma_hull_h: f64,
    pub h: f64,
}

impl SeparationReport {
    pub fn min_r_m_h(&self) -> f64 {
        self.r_m_h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `R_Γ = 0`: distinct pieces touch.
    pub fn touching(&self) -> bool {
        self.r_gamma == 0.0
    }
}

/// Tuning for the `R_Γ` search.
#[derive(Debug, Clone, Copy)]
pub struct SetDistanceOptions {
    /// Stop once `upper - lower` is below this.
    pub tol: f64,
    /// Maximum sub-component depth explored.
    pub depth_cap: usize,
}

impl Default for SetDistanceOptions {
    fn default() -> Self {
        SetDistanceOptions { tol: 1e-13, depth_cap: 64 }
    }
}

/// Computes all four separation parameters. Requires `0 < h < diam(Γ)`.
pub fn separation_params(attractor: &Attractor, h: f64) -> Result<SeparationReport> {
    separation_params_with(attractor, h, SetDistanceOptions::default())
}

pub fn separation_params_with(
    attractor: &Attractor,
    h: f64,
    opts: SetDistanceOptions,
) -> Result<SeparationReport> {
    if !(h > 0.0 && h < attractor.diam()) {
        return Err(Error::invalid(format!(
            "h = {h} outside (0, diam Γ = {})",
            attractor.diam()
        )));
    }
    let m_count = attractor.num_maps();
    let level1: Vec<Piece> = Piece::root(attractor).children();
    let r_gamma_hull = r_gamma_hull(attractor);

    let (lo, hi) = set_distance(distinct_pairs(&level1), opts);
    let r_m_h = (1..=m_count).map(|m| r_m_h(attractor, m, h)).collect::<Result<Vec<f64>>>()?;

    Ok(SeparationReport {
        r_gamma: clamp_touching(hi),
        r_gamma_bracket: (clamp_touching(lo), clamp_touching(hi)),
        r_gamma_hull,
        r_m_h,
        r_gamma_hull_h: r_gamma_hull_h(attractor, h)?,
        h,
    })
}

/// `R_{m,h}`: distance from `η_m` to the hulls of the pieces of `L_h(Γ)`
/// whose first index differs from `m`.
pub fn r_m_h(attractor: &Attractor, m: usize, h: f64) -> Result<f64> {
    if m < 1 || m > attractor.num_maps() {
        return Err(Error::invalid(format!("map index {m} out of range")));
    }
    if h.is_nan() || h <= 0.0 {
        return Err(Error::invalid(format!("h = {h} must be positive")));
    }
    let others: Vec<Piece> = Piece::root(attractor)
        .children()
        .into_iter()
        .filter(|p| p.first != m as u16)
        .collect();
    Ok(clamp_touching(min_leaf_point_distance(attractor.fixed_point(m), others, h)))
}

/// `R_{Γ,Hull,h}`: minimum hull distance between pieces of `L_h(Γ)` with
/// different first index.
pub fn r_gamma_hull_h(attractor: &Attractor, h: f64) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::invalid(format!("h = {h} must be positive")));
    }
    let level1 = Piece::root(attractor).children();
    Ok(clamp_touching(min_leaf_pair_distance(distinct_pairs(&level1), h)))
}

/// `R_{Γ,Hull}`: minimum distance between the level-1 hulls.
pub fn r_gamma_hull(attractor: &Attractor) -> f64 {
    let level1 = Piece::root(attractor).children();
    let mut r = f64::INFINITY;
    for (a, b) in distinct_pairs(&level1) {
        r = r.min(raw_hull_distance(&a.hull, &b.hull));
    }
    clamp_touching(r)
}

/// Distance from `point` to the union of the pieces `Γ_{m'}`, `m' != m`,
/// as a bracket `[lower, upper]`.
pub fn fixed_point_clearance(attractor: &Attractor, m: usize, opts: SetDistanceOptions) -> (f64, f64) {
    let eta = attractor.fixed_point(m);
    let others: Vec<Piece> = Piece::root(attractor)
        .children()
        .into_iter()
        .filter(|p| p.first != m as u16)
        .collect();
    point_set_distance(eta, others, opts)
}

/// `R_Γ` alone, as a bracket `[lower, upper]`.
pub fn set_separation(attractor: &Attractor, opts: SetDistanceOptions) -> (f64, f64) {
    let level1 = Piece::root(attractor).children();
    set_distance(distinct_pairs(&level1), opts)
}

/// Minimum hull distance between pieces of `L_h(Γ)` and `L_h(Γ')`.
pub fn leaf_hull_separation(a: &Attractor, b: &Attractor, h: f64) -> Result<f64> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::invalid("attractors live in different ambient dimensions"));
    }
    Ok(clamp_touching(min_leaf_pair_distance(
        vec![(Piece::root(a), Piece::root(b))],
        h,
    )))
}

/// A sub-component in the search tree.
#[derive(Debug, Clone)]
struct Piece<'a> {
    attractor: &'a Attractor,
    map: Similarity,
    hull: ConvexHull,
    diam: f64,
    depth: usize,
    first: u16,
}

impl<'a> Piece<'a> {
    fn root(attractor: &'a Attractor) -> Self {
        Piece {
            attractor,
            map: Similarity::identity(attractor.ambient_dim()),
            hull: attractor.hull().clone(),
            diam: attractor.diam(),
            depth: 0,
            first: 0,
        }
    }

    fn children(&self) -> Vec<Piece<'a>> {
        self.attractor
            .maps()
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let map = self.map.compose(s);
                Piece {
                    attractor: self.attractor,
                    hull: self.attractor.hull().transform(&map),
                    diam: map.ratio() * self.attractor.diam(),
                    depth: self.depth + 1,
                    first: if self.depth == 0 { k as u16 + 1 } else { self.first },
                    map,
                }
            })
            .collect()
    }
}

fn distinct_pairs<'a>(level1: &[Piece<'a>]) -> Vec<(Piece<'a>, Piece<'a>)> {
    let mut out = Vec::new();
    for i in 0..level1.len() {
        for j in i + 1..level1.len() {
            out.push((level1[i].clone(), level1[j].clone()));
        }
    }
    out
}

/// Heap entry ordered by smallest key first, then deepest first.
struct Entry<T> {
    key: f64,
    depth: usize,
    item: T,
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then(self.depth.cmp(&other.depth))
    }
}

/// Best-first search for the minimum hull distance over pairs of leaves
/// (pieces with diam ≤ h) descending from the given root pairs.
fn min_leaf_pair_distance(roots: Vec<(Piece, Piece)>, h: f64) -> f64 {
    let mut heap = BinaryHeap::new();
    for (a, b) in roots {
        let key = raw_hull_distance(&a.hull, &b.hull);
        heap.push(Entry { key, depth: a.depth + b.depth, item: (a, b) });
    }
    while let Some(Entry { key, item: (a, b), .. }) = heap.pop() {
        let a_leaf = admits(a.diam, h);
        let b_leaf = admits(b.diam, h);
        if a_leaf && b_leaf {
            return key;
        }
        let split_a = !a_leaf && (b_leaf || a.diam >= b.diam);
        let (keep, split) = if split_a { (b, a) } else { (a, b) };
        for c in split.children() {
            let key = raw_hull_distance(&keep.hull, &c.hull);
            heap.push(Entry { key, depth: keep.depth + c.depth, item: (keep.clone(), c) });
        }
    }
    f64::INFINITY
}

/// Best-first search for the minimum distance from a point to the hulls of
/// leaves descending from the given roots.
fn min_leaf_point_distance(p: Point, roots: Vec<Piece>, h: f64) -> f64 {
    let mut heap = BinaryHeap::new();
    for a in roots {
        heap.push(Entry { key: a.hull.distance_to_point(p), depth: a.depth, item: a });
    }
    while let Some(Entry { key, item, .. }) = heap.pop() {
        if admits(item.diam, h) {
            return key;
        }
        for c in item.children() {
            heap.push(Entry { key: c.hull.distance_to_point(p), depth: c.depth, item: c });
        }
    }
    f64::INFINITY
}

/// Branch and bound for the distance between two sets given as unions of
/// piece pairs. Returns `[lower, upper]`.
fn set_distance(roots: Vec<(Piece, Piece)>, opts: SetDistanceOptions) -> (f64, f64) {
    let mut upper = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    for (a, b) in roots {
        upper = upper.min(a.hull.vertex_distance(&b.hull));
        let key = raw_hull_distance(&a.hull, &b.hull);
        heap.push(Entry { key, depth: a.depth + b.depth, item: (a, b) });
    }
    let mut lower_capped = f64::INFINITY;
    while let Some(Entry { key, item: (a, b), .. }) = heap.pop() {
        if key >= upper - opts.tol {
            return (key.min(lower_capped).min(upper), upper);
        }
        let a_can = a.depth < opts.depth_cap;
        let b_can = b.depth < opts.depth_cap;
        if !a_can && !b_can {
            lower_capped = lower_capped.min(key);
            continue;
        }
        let split_a = a_can && (!b_can || a.diam >= b.diam);
        let (keep, split) = if split_a { (b, a) } else { (a, b) };
        for c in split.children() {
            upper = upper.min(keep.hull.vertex_distance(&c.hull));
            let key = raw_hull_distance(&keep.hull, &c.hull);
            if key < upper - opts.tol {
                heap.push(Entry { key, depth: keep.depth + c.depth, item: (keep.clone(), c) });
            }
        }
    }
    (lower_capped.min(upper), upper)
}

fn point_set_distance(p: Point, roots: Vec<Piece>, opts: SetDistanceOptions) -> (f64, f64) {
    let mut upper = f64::INFINITY;
    let mut heap = BinaryHeap::new();
    let vertex_dist = |piece: &Piece| piece.hull.vertices().into_iter().map(|v| dist(p, v)).fold(f64::INFINITY, f64::min);
    for a in roots {
        upper = upper.min(vertex_dist(&a));
        heap.push(Entry { key: a.hull.distance_to_point(p), depth: a.depth, item: a });
    }
    let mut lower_capped = f64::INFINITY;
    while let Some(Entry { key, item, .. }) = heap.pop() {
        if key >= upper - opts.tol {
            return (key.min(lower_capped).min(upper), upper);
        }
        if item.depth >= opts.depth_cap {
            lower_capped = lower_capped.min(key);
            continue;
        }
        for c in item.children() {
            upper = upper.min(vertex_dist(&c));
            let key = c.hull.distance_to_point(p);
            if key < upper - opts.tol {
                heap.push(Entry { key, depth: c.depth, item: c });
            }
        }
    }
    (lower_capped.min(upper), upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square(x0: f64, y0: f64, s: f64) -> ConvexHull {
        ConvexHull::Polygon(vec![[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]])
    }

    #[test]
    fn interval_distance() {
        let a = ConvexHull::Interval { lo: 0.0, hi: 1.0 / 3.0 };
        let b = ConvexHull::Interval { lo: 2.0 / 3.0, hi: 1.0 };
        assert!((hull_distance(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn overlapping_squares() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(0.5, 0.5, 1.0);
        assert_eq!(hull_distance(&a, &b).unwrap(), 0.0);
        let c = square(0.25, 0.25, 0.1);
        assert_eq!(hull_distance(&a, &c).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = ConvexHull::Interval { lo: 0.0, hi: 1.0 };
        let b = square(0.0, 0.0, 1.0);
        assert!(hull_distance(&a, &b).is_err());
    }

    #[test]
    fn diagonal_squares() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(2.0, 2.0, 1.0);
        assert!((hull_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hull_of_points_is_ccw_and_strict() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let h = ConvexHull::from_points(2, &pts);
        let ConvexHull::Polygon(v) = &h else { panic!() };
        assert_eq!(v.len(), 4);
        for i in 0..v.len() {
            assert!(cross(v[i], v[(i + 1) % 4], v[(i + 2) % 4]) > 0.0);
        }
    }

    #[test]
    fn degenerate_hulls() {
        let seg = ConvexHull::from_points(2, &[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]);
        assert_eq!(seg, ConvexHull::Polygon(vec![[0.0, 0.0], [1.0, 0.0]]));
        let pt = ConvexHull::from_points(2, &[[0.3, 0.3]]);
        assert!((pt.distance_to_point([0.3, 1.3]) - 1.0).abs() < 1e-15);
        assert!((hull_distance(&seg, &pt).unwrap() - 0.3).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn distance_symmetric_nonnegative(
            a in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
            b in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
        ) {
            let pa: Vec<Point> = a.iter().map(|&(x, y)| [x + 5.0, y]).collect();
            let pb: Vec<Point> = b.iter().map(|&(x, y)| [x, y]).collect();
            let ha = ConvexHull::from_points(2, &pa);
            let hb = ConvexHull::from_points(2, &pb);
            let d1 = hull_distance(&ha, &hb).unwrap();
            let d2 = hull_distance(&hb, &ha).unwrap();
            prop_assert!(d1 >= 0.0);
            prop_assert!((d1 - d2).abs() < 1e-14);
        }

        #[test]
        fn enlarging_never_increases_distance(
            a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
            b in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
            extra in (-3.0f64..6.0, -3.0f64..3.0),
        ) {
            let pa: Vec<Point> = a.iter().map(|&(x, y)| [x + 3.0, y]).collect();
            let pb: Vec<Point> = b.iter().map(|&(x, y)| [x, y]).collect();
            let ha = ConvexHull::from_points(2, &pa);
            let hb = ConvexHull::from_points(2, &pb);
            let mut pa2 = pa.clone();
            pa2.push([extra.0, extra.1]);
            let ha2 = ConvexHull::from_points(2, &pa2);
            prop_assert!(hull_distance(&ha2, &hb).unwrap() <= hull_distance(&ha, &hb).unwrap() + 1e-14);
        }
    }
}
