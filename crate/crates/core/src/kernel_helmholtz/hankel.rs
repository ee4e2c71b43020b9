//! Hankel functions of the first kind `H_0^{(1)}` and `H_1^{(1)}` on the
//! positive real axis.
//!
//! Ascending series for `z <= 12`, Hankel's asymptotic expansion with
//! optimal truncation above.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switch from the ascending series to the asymptotic expansion.
pub const SERIES_SWITCH: f64 = 12.0;

const MAX_TERMS: usize = 200;

/// Ascending series pieces for order 0: `J_0(z)` and `Σ_{k≥1} H_k t_k`
/// with `t_k = (−z²/4)^k/(k!)²` and `H_k` the harmonic numbers.
pub(crate) fn series0(z: f64) -> (f64, f64) {
    let q = -0.25 * z * z;
    let mut t = 1.0;
    let mut j0 = 1.0;
    let mut hsum = 0.0;
    let mut harm = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t *= q / (kf * kf);
        harm += 1.0 / kf;
        j0 += t;
        hsum += harm * t;
        if t.abs() < 1e-17 * j0.abs().max(1e-300) && k as f64 > 0.5 * z {
            break;
        }
    }
    (j0, hsum)
}

fn series1(z: f64) -> (f64, f64) {
    let q = -0.25 * z * z;
    let mut u = 1.0;
    let mut sum = 1.0;
    let mut harm_k = 0.0;
    let mut harm_k1 = 1.0;
    let mut hsum = harm_k + harm_k1;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        u *= q / (kf * (kf + 1.0));
        harm_k += 1.0 / kf;
        harm_k1 += 1.0 / (kf + 1.0);
        sum += u;
        hsum += (harm_k + harm_k1) * u;
        if u.abs() < 1e-17 * sum.abs().max(1e-300) && kf > 0.5 * z {
            break;
        }
    }
    let j1 = 0.5 * z * sum;
    let y1 = -2.0 / (PI * z) + (2.0 / PI) * ((0.5 * z).ln() + EULER_GAMMA) * j1 - z / (2.0 * PI) * hsum;
    (j1, y1)
}

/// `Σ_k i^k a_k(ν)/z^k`, truncated before the smallest term starts to grow.
fn asymptotic_sum(nu: f64, z: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = 1.0;
    let mut ik = Complex64::new(1.0, 0.0);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        let next = term * (mu - odd * odd) / (kf * 8.0 * z);
        if next.abs() >= term.abs() || next == 0.0 {
            break;
        }
        term = next;
        ik *= Complex64::new(0.0, 1.0);
        sum += ik * term;
        if term.abs() < 1e-17 {
            break;
        }
    }
    sum
}

fn asymptotic(nu: f64, z: f64) -> Complex64 {
    let amp = (2.0 / (PI * z)).sqrt();
    let (s, c) = z.sin_cos();
    let shift = Complex64::from_polar(1.0, -(nu * 0.5 * PI + FRAC_PI_4));
    Complex64::new(c, s) * shift * asymptotic_sum(nu, z) * amp
}

fn check_arg(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("Hankel argument z = {z} must be positive and finite")))
    }
}

/// `H_0^{(1)}(z) = J_0(z) + i Y_0(z)` for `z > 0`.
pub fn hankel1_0(z: f64) -> Result<Complex64> {
    check_arg(z)?;
    Ok(hankel1_0_unchecked(z))
}

/// `H_1^{(1)}(z) = J_1(z) + i Y_1(z)` for `z > 0`.
pub fn hankel1_1(z: f64) -> Result<Complex64> {
    check_arg(z)?;
    Ok(hankel1_1_unchecked(z))
}

pub(crate) fn hankel1_0_unchecked(z: f64) -> Complex64 {
    if z <= SERIES_SWITCH {
        let (j0, hsum) = series0(z);
        let y0 = (2.0 / PI) * (((0.5 * z).ln() + EULER_GAMMA) * j0 - hsum);
        Complex64::new(j0, y0)
    } else {
        asymptotic(0.0, z)
    }
}

pub(crate) fn hankel1_1_unchecked(z: f64) -> Complex64 {
    if z <= SERIES_SWITCH {
        let (j1, y1) = series1(z);
        Complex64::new(j1, y1)
    } else {
        asymptotic(1.0, z)
    }
}
