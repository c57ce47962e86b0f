//! Forward-mode second-order jets over complex doubles.
//!
//! A [`Jet2`] carries a value together with its first and second derivatives
//! with respect to a single real variable. Pushing a jet through arithmetic
//! and elementary functions yields exact derivatives of the composite
//! expression (up to rounding), which the verification suites use to
//! differentiate kernel formulas without hand-written derivative code.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet2 {
    pub v: Complex64,
    pub d: Complex64,
    pub dd: Complex64,
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Jet2 {
            v: Complex64::new(v, 0.0),
            d: Complex64::default(),
            dd: Complex64::default(),
        }
    }

    pub fn constant_c(v: Complex64) -> Self {
        Jet2 {
            v,
            d: Complex64::default(),
            dd: Complex64::default(),
        }
    }

    /// Seed for the differentiation variable: value v, derivative 1.
    pub fn variable(v: f64) -> Self {
        Jet2 {
            v: Complex64::new(v, 0.0),
            d: Complex64::new(1.0, 0.0),
            dd: Complex64::default(),
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Jet2 {
            v: e,
            d: e * self.d,
            dd: e * (self.dd + self.d * self.d),
        }
    }

    pub fn ln(self) -> Self {
        let d = self.d / self.v;
        Jet2 {
            v: self.v.ln(),
            d,
            dd: self.dd / self.v - d * d,
        }
    }

    /// Complex power x^p for constant exponent p, via exp(p ln x).
    pub fn powc(self, p: Complex64) -> Self {
        (self.ln().scale(p)).exp()
    }

    /// Multiplication by a complex constant.
    pub fn scale(self, k: Complex64) -> Self {
        Jet2 {
            v: k * self.v,
            d: k * self.d,
            dd: k * self.dd,
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + rhs.v,
            d: self.d + rhs.d,
            dd: self.dd + rhs.dd,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v - rhs.v,
            d: self.d - rhs.d,
            dd: self.dd - rhs.dd,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * rhs.v,
            d: self.v * rhs.d + self.d * rhs.v,
            dd: self.v * rhs.dd + 2.0 * self.d * rhs.d + self.dd * rhs.v,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        let v = self.v / rhs.v;
        let d = (self.d - v * rhs.d) / rhs.v;
        let dd = (self.dd - 2.0 * d * rhs.d - v * rhs.dd) / rhs.v;
        Jet2 { v, d, dd }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            v: -self.v,
            d: -self.d,
            dd: -self.dd,
        }
    }
}
