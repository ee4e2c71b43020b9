//! Independent oracles shared by the integration tests. None of them use the
//! self-similarity identities of the library.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

/// Hankel function `H_ν^{(1)}(z)`, `ν ∈ {0, 1}`, from the integral
/// representation
/// `sqrt(2/(πz)) e^{i(z−νπ/2−π/4)} / Γ(ν+1/2) ∫_0^∞ e^{−u} u^{ν−1/2} (1 + iu/(2z))^{ν−1/2} du`
/// with `u = s²` and the trapezoid rule on `s ∈ [−8, 8]`.
pub fn hankel_oracle(nu: u8, z: f64) -> Complex64 {
    let hs = if z > 0.5 { 0.01 } else { (0.25 * z.sqrt()).min(0.01) };
    let n = (8.0 / hs).ceil() as i64;
    let hs = 8.0 / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in -n..=n {
        let s = j as f64 * hs;
        let s2 = s * s;
        let c = Complex64::new(1.0, s2 / (2.0 * z));
        let g = if nu == 0 { 2.0 * (-s2).exp() / c.sqrt() } else { 2.0 * s2 * (-s2).exp() * c.sqrt() };
        acc += g;
    }
    let integral = acc * (0.5 * hs);
    let gamma = if nu == 0 { PI.sqrt() } else { 0.5 * PI.sqrt() };
    let phase = Complex64::from_polar(1.0, z - nu as f64 * 0.5 * PI - FRAC_PI_4);
    phase * integral * ((2.0 / (PI * z)).sqrt() / gamma)
}

/// Level-`level` barycentre nodes of the Cantor set with ratio `rho`
/// (barycentre 1/2, equal weights `2^{−level}`).
pub fn cantor_nodes(rho: f64, level: usize) -> Vec<f64> {
    let mut nodes = vec![0.5];
    for _ in 0..level {
        let mut next = Vec::with_capacity(2 * nodes.len());
        for &x in &nodes {
            next.push(rho * x);
            next.push(rho * x + 1.0 - rho);
        }
        nodes = next;
    }
    nodes
}

fn phi_t(t: f64, r: f64) -> f64 {
    if t == 0.0 {
        r.ln()
    } else {
        r.powf(-t)
    }
}

/// Plain barycentre rule for `∫ Φ_t(x, eta)` on the Cantor set.
pub fn naive_cantor_single(rho: f64, t: f64, eta: f64, level: usize) -> f64 {
    let nodes = cantor_nodes(rho, level);
    let w = 1.0 / nodes.len() as f64;
    nodes.iter().map(|&x| w * phi_t(t, (x - eta).abs())).sum()
}

/// Barycentre rule for `∫∫ Φ_t` on the Cantor set with the coincident pairs dropped.
pub fn naive_cantor_double(rho: f64, t: f64, level: usize) -> f64 {
    let nodes = cantor_nodes(rho, level);
    let w = 1.0 / nodes.len() as f64;
    let mut total = 0.0;
    for (i, &x) in nodes.iter().enumerate() {
        let mut row = 0.0;
        for &y in &nodes[i + 1..] {
            row += phi_t(t, (x - y).abs());
        }
        total += 2.0 * row;
    }
    total * w * w
}

/// Deep-level single-integral oracle: Aitken-extrapolated plain sums at
/// levels `level`, `level+1`, `level+2`.
pub fn single_oracle(rho: f64, t: f64, eta: f64, level: usize) -> f64 {
    aitken(
        naive_cantor_single(rho, t, eta, level),
        naive_cantor_single(rho, t, eta, level + 1),
        naive_cantor_single(rho, t, eta, level + 2),
    )
}

/// Aitken Δ² extrapolation of three successive values.
pub fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d1 = b - a;
    let d2 = c - b;
    c - d2 * d2 / (d2 - d1)
}

/// Deep-level double-integral oracle: Aitken-extrapolated naive sums at
/// levels `level`, `level+1`, `level+2`.
pub fn double_oracle(rho: f64, t: f64, level: usize) -> f64 {
    aitken(
        naive_cantor_double(rho, t, level),
        naive_cantor_double(rho, t, level + 1),
        naive_cantor_double(rho, t, level + 2),
    )
}

/// Similarity dimension by bisection on `Σ ρ_m^d = 1`.
pub fn dimension(ratios: &[f64]) -> f64 {
    let f = |d: f64| ratios.iter().map(|r| r.powf(d)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Pass/fail record of one check.
pub struct Check {
    pub label: String,
    pub pass: bool,
}

impl Check {
    pub fn new(pass: bool, label: impl Into<String>) -> Self {
        Check { label: label.into(), pass }
    }
}
