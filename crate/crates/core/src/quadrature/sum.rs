//! Compensated summation and the fixed-order parallel reduction used by the
//! rule sums.

use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Neumaier::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Values the rules can sum: real or complex.
pub trait Scalar:
    Copy + Send + Sync + Default + Add<Output = Self> + Mul<f64, Output = Self> + 'static
{
    fn parts(self) -> (f64, f64);
    fn from_parts(re: f64, im: f64) -> Self;

    fn is_finite_value(self) -> bool {
        let (a, b) = self.parts();
        a.is_finite() && b.is_finite()
    }
}

impl Scalar for f64 {
    #[inline]
    fn parts(self) -> (f64, f64) {
        (self, 0.0)
    }

    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn parts(self) -> (f64, f64) {
        (self.re, self.im)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

/// Componentwise compensated accumulator for any [`Scalar`].
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    re: Neumaier,
    im: Neumaier,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add<T: Scalar>(&mut self, x: T) {
        let (a, b) = x.parts();
        self.re.add(a);
        self.im.add(b);
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::from_parts(self.re.value(), self.im.value())
    }
}
