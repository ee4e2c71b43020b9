//! The diameter-graded partition `L_h(Γ)`, barycentres, and quadrature
//! node sets realized from partitions.

use crate::error::{Error, Result};
use crate::ifs::{solve2, Attractor, Point, Similarity, VecIndex};

/// Relative slack applied to the tie `diam(Γ_𝐦) = h`.
const TIE_SLACK: f64 = 1e-12;

/// Whether a piece of diameter `diam` is admitted at parameter `h`.
pub(crate) fn admits(diam: f64, h: f64) -> bool {
    diam <= h * (1.0 + TIE_SLACK)
}

/// Solves `(I - Σ ρ_m^{d+1} A_m) x = Σ ρ_m^d δ_m`.
/// `weights` are the measure fractions `ρ_m^d`.
pub(crate) fn solve_barycentre(maps: &[Similarity], weights: &[f64]) -> Point {
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let mut b = [0.0, 0.0];
    for (s, &w) in maps.iter().zip(weights) {
        let a = s.rotation();
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] -= w * s.ratio() * a[i][j];
            }
            b[i] += w * s.translation()[i];
        }
    }
    if maps[0].ambient_dim() == 1 {
        // Keep the inert second coordinate exactly zero.
        m[1] = [0.0, 1.0];
        m[0][1] = 0.0;
        b[1] = 0.0;
    }
    solve2(&m, b).expect("barycentre system is invertible")
}

/// Barycentre `x_Γ` of the attractor (cached at construction).
pub fn barycentre(attractor: &Attractor) -> Point {
    attractor.barycentre()
}

/// The index set `L_h(Γ_root)`, in lexicographic order, with composed maps.
#[derive(Debug, Clone)]
pub struct Partition<'a> {
    attractor: &'a Attractor,
    h: f64,
    root: VecIndex,
    indices: Vec<VecIndex>,
    maps: Vec<Similarity>,
    weights: Vec<f64>,
}

impl<'a> Partition<'a> {
    pub fn attractor(&self) -> &'a Attractor {
        self.attractor
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn root(&self) -> &VecIndex {
        &self.root
    }

    pub fn indices(&self) -> &[VecIndex] {
        &self.indices
    }

    /// Composed maps `s_𝐦`, aligned with [`Partition::indices`].
    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    /// `N = |L_h|`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Measures `μ(Γ_𝐦)`, aligned with [`Partition::indices`].
    pub fn measures(&self) -> Vec<f64> {
        self.weights.clone()
    }

    pub fn diams(&self) -> Vec<f64> {
        self.maps.iter().map(|s| s.ratio() * self.attractor.diam()).collect()
    }
}

/// `L_h(Γ)`: recursive descent from the empty index, splitting every piece
/// of diameter greater than `h`.
pub fn partition_lh(attractor: &Attractor, h: f64) -> Result<Partition<'_>> {
    partition_from(attractor, &VecIndex::empty(), h)
}

/// `L_h(Γ_root)` expressed with global indices (all extending `root`).
pub fn partition_from<'a>(attractor: &'a Attractor, root: &VecIndex, h: f64) -> Result<Partition<'a>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("h = {h} must be positive and finite")));
    }
    let root_map = attractor.compose(root)?;
    let mut out = Descent::default();
    let mut path: Vec<u16> = root.entries().to_vec();
    let w = attractor.index_weight(root.entries());
    descend(attractor, &root_map, w, h, &mut path, &mut out);
    Ok(Partition {
        attractor,
        h,
        root: root.clone(),
        indices: out.indices,
        maps: out.maps,
        weights: out.weights,
    })
}

#[derive(Default)]
struct Descent {
    indices: Vec<VecIndex>,
    maps: Vec<Similarity>,
    weights: Vec<f64>,
}

fn descend(
    attractor: &Attractor,
    map: &Similarity,
    weight: f64,
    h: f64,
    path: &mut Vec<u16>,
    out: &mut Descent,
) {
    if admits(map.ratio() * attractor.diam(), h) {
        out.indices.push(VecIndex::new(path.clone()));
        out.maps.push(map.clone());
        out.weights.push(weight);
        return;
    }
    for (k, s) in attractor.maps().iter().enumerate() {
        path.push(k as u16 + 1);
        let w = weight * attractor.weight_factors()[k];
        descend(attractor, &map.compose(s), w, h, path, out);
        path.pop();
    }
}

/// The partition parameter that selects level `ℓ` for a uniform IFS:
/// `h = ρ_max^ℓ · diam(Γ)`. For non-uniform IFS this is the coarsest `h`
/// at which every piece has diameter at most `ρ_max^ℓ · diam(Γ)`.
pub fn level_h(attractor: &Attractor, ell: usize) -> f64 {
    attractor.max_ratio().powi(ell as i32) * attractor.diam()
}

/// Uniform-IFS level `ℓ = ⌈log(h/diam Γ)/log ρ⌉` (0 when `h ≥ diam Γ`).
pub fn uniform_level(attractor: &Attractor, h: f64) -> usize {
    if admits(attractor.diam(), h) {
        return 0;
    }
    let x = (h / attractor.diam()).ln() / attractor.max_ratio().ln();
    let l = x.ceil();
    // Undo the ceiling when x sits within rounding of an integer.
    if (x - x.round()).abs() < 1e-9 {
        x.round() as usize
    } else {
        l as usize
    }
}

/// `ℓ_*(𝐦, 𝐧)`: length of the longest common prefix plus one.
pub fn ell_star(a: &VecIndex, b: &VecIndex) -> usize {
    a.entries()
        .iter()
        .zip(b.entries())
        .take_while(|(x, y)| x == y)
        .count()
        + 1
}

/// Nodes and weights of the barycentre rule on a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub h: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes `x_𝐦 = s_𝐦(x_Γ)` and weights `w_𝐦 = (∏ρ_{m_i})^d · μ(Γ)`.
pub fn rule_from_partition(partition: &Partition) -> QuadratureRule {
    let xg = partition.attractor.barycentre();
    QuadratureRule {
        nodes: partition.maps.iter().map(|s| s.apply(xg)).collect(),
        weights: partition.measures(),
        h: partition.h,
    }
}
