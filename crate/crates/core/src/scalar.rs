//! Complex scalar types shared by the map evaluators and the blowup charts.
//!
//! Three instantiations are used:
//!
//! * [`Complex64`] for plane dynamics (fixed points, orbits, manifolds);
//! * [`BigComplex`], an MPFR-backed complex number, for chart computations
//!   where coordinates sit at distance `eps^(2k+1)` from a base point and
//!   double precision would cancel every digit;
//! * [`Jet`], a forward-mode dual number carrying two partial derivatives,
//!   stacked on top of either of the above.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

/// Field operations plus the few precision-aware hooks the evaluators need.
///
/// Constants are always produced "like" an existing value so that they
/// inherit its working precision.
// `*_like` constructors take `self` as a precision prototype
#[allow(clippy::wrong_self_convention)]
pub trait Scalar:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_c64_like(&self, z: Complex64) -> Self;

    /// `cos(pi * num / den)` at the working precision of `self`.
    fn cos_pi_ratio_like(&self, num: i64, den: i64) -> Self;

    /// Value (derivative parts dropped), rounded to double precision.
    fn value(&self) -> Complex64;

    /// `log2 |value|`, `-inf` for zero. Exact enough for threshold tests.
    fn log2_modulus(&self) -> f64;

    /// True when the value is zero at the working precision.
    fn is_negligible(&self) -> bool;

    fn zero_like(&self) -> Self {
        self.from_c64_like(Complex64::new(0.0, 0.0))
    }

    fn one_like(&self) -> Self {
        self.from_c64_like(Complex64::new(1.0, 0.0))
    }

    fn from_i64_like(&self, v: i64) -> Self {
        self.from_c64_like(Complex64::new(v as f64, 0.0))
    }

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Integer power allowing negative exponents.
    fn powi(&self, e: i32) -> Self {
        if e >= 0 {
            self.powu(e as u32)
        } else {
            self.one_like() / self.powu(e.unsigned_abs())
        }
    }

    fn modulus(&self) -> f64 {
        self.log2_modulus().exp2()
    }
}

impl Scalar for Complex64 {
    fn from_c64_like(&self, z: Complex64) -> Self {
        z
    }

    fn cos_pi_ratio_like(&self, num: i64, den: i64) -> Self {
        Complex64::new(
            exact_cos_pi_ratio(num, den).unwrap_or_else(|| (std::f64::consts::PI * num as f64 / den as f64).cos()),
            0.0,
        )
    }

    fn value(&self) -> Complex64 {
        *self
    }

    fn log2_modulus(&self) -> f64 {
        self.norm().log2()
    }

    fn is_negligible(&self) -> bool {
        // callers compare against normalized homogeneous coordinates
        self.norm() < 1e-14
    }
}

/// `cos(pi p/q)` for the handful of ratios where it is rational.
fn exact_cos_pi_ratio(num: i64, den: i64) -> Option<f64> {
    let g = num_integer::gcd(num, den);
    let (p, q) = (num / g, den / g);
    let p = p.rem_euclid(2 * q);
    match (p, q) {
        (0, 1) => Some(1.0),
        (1, 1) => Some(-1.0),
        (1, 2) | (3, 2) => Some(0.0),
        (1, 3) | (5, 3) => Some(0.5),
        (2, 3) | (4, 3) => Some(-0.5),
        _ => None,
    }
}

/// Complex number with MPFR real and imaginary parts of equal precision.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(prec: u32, z: Complex64) -> Self {
        BigComplex { re: Float::with_val(prec, z.re), im: Float::with_val(prec, z.im) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn norm_sqr(&self) -> Float {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigComplex({:?})", self.value())
    }
}

impl Add for BigComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        BigComplex { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for BigComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        BigComplex { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for BigComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        BigComplex { re, im }
    }
}

impl Div for BigComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let den = rhs.norm_sqr();
        let re = self.re.clone() * rhs.re.clone() + self.im.clone() * rhs.im.clone();
        let im = self.im * rhs.re - self.re * rhs.im;
        BigComplex { re: re / den.clone(), im: im / den }
    }
}

impl Neg for BigComplex {
    type Output = Self;
    fn neg(self) -> Self {
        BigComplex { re: -self.re, im: -self.im }
    }
}

impl Scalar for BigComplex {
    fn from_c64_like(&self, z: Complex64) -> Self {
        BigComplex::new(self.prec(), z)
    }

    fn cos_pi_ratio_like(&self, num: i64, den: i64) -> Self {
        let prec = self.prec();
        if let Some(v) = exact_cos_pi_ratio(num, den) {
            return BigComplex::new(prec, Complex64::new(v, 0.0));
        }
        let pi = Float::with_val(prec, Constant::Pi);
        let angle = pi * Float::with_val(prec, num) / Float::with_val(prec, den);
        BigComplex { re: angle.cos(), im: Float::with_val(prec, 0) }
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn log2_modulus(&self) -> f64 {
        let e = |x: &Float| -> Option<i32> {
            if x.is_zero() {
                None
            } else {
                x.get_exp()
            }
        };
        match (e(&self.re), e(&self.im)) {
            (None, None) => f64::NEG_INFINITY,
            (a, b) => {
                // |x| = m 2^exp with 0.5 <= m < 1; refine with the mantissa of the
                // larger part so callers get a usable magnitude, not just a bound.
                let (big, exp) = if a.unwrap_or(i32::MIN) >= b.unwrap_or(i32::MIN) {
                    (&self.re, a.unwrap())
                } else {
                    (&self.im, b.unwrap())
                };
                let mant = big.to_f64_exp().0.abs();
                exp as f64 + mant.log2()
            }
        }
    }

    fn is_negligible(&self) -> bool {
        self.log2_modulus() < -(self.prec() as f64 - 64.0)
    }
}

/// First-order jet in two directions: `v + d[0] du + d[1] dv`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    pub v: S,
    pub d: [S; 2],
}

impl<S: Scalar> Jet<S> {
    pub fn constant(v: S) -> Self {
        let z = v.zero_like();
        Jet { d: [z.clone(), z], v }
    }

    /// Independent variable number `idx` (0 or 1).
    pub fn variable(v: S, idx: usize) -> Self {
        let mut j = Jet::constant(v);
        j.d[idx] = j.v.one_like();
        j
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let [a0, a1] = self.d;
        let [b0, b1] = rhs.d;
        Jet { v: self.v + rhs.v, d: [a0 + b0, a1 + b1] }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let [a0, a1] = self.d;
        let [b0, b1] = rhs.d;
        Jet { v: self.v - rhs.v, d: [a0 - b0, a1 - b1] }
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let [a0, a1] = self.d;
        let [b0, b1] = rhs.d;
        let d0 = a0 * rhs.v.clone() + self.v.clone() * b0;
        let d1 = a1 * rhs.v.clone() + self.v.clone() * b1;
        Jet { v: self.v * rhs.v, d: [d0, d1] }
    }
}

impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.v / rhs.v.clone();
        let [a0, a1] = self.d;
        let [b0, b1] = rhs.d;
        let d0 = (a0 - q.clone() * b0) / rhs.v.clone();
        let d1 = (a1 - q.clone() * b1) / rhs.v;
        Jet { v: q, d: [d0, d1] }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        let [a0, a1] = self.d;
        Jet { v: -self.v, d: [-a0, -a1] }
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    fn from_c64_like(&self, z: Complex64) -> Self {
        Jet::constant(self.v.from_c64_like(z))
    }

    fn cos_pi_ratio_like(&self, num: i64, den: i64) -> Self {
        Jet::constant(self.v.cos_pi_ratio_like(num, den))
    }

    fn value(&self) -> Complex64 {
        self.v.value()
    }

    fn log2_modulus(&self) -> f64 {
        self.v.log2_modulus()
    }

    fn is_negligible(&self) -> bool {
        self.v.is_negligible()
    }
}

/// Working precision (bits) large enough to resolve chart coordinates at
/// transverse offset `eps` on every level of a tower of height `2k+1`.
pub fn chart_precision(k: u32, eps: f64) -> u32 {
    let bits_per_level = (1.0 / eps).log2().ceil().max(1.0) as u32;
    128 + 4 * (2 * k + 2) * bits_per_level
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn big_complex_field_ops_match_f64() {
        let a = BigComplex::new(200, c(1.5, -0.25));
        let b = BigComplex::new(200, c(-0.75, 2.0));
        let (x, y) = (c(1.5, -0.25), c(-0.75, 2.0));
        assert!((((a.clone() * b.clone()).value()) - x * y).norm() < 1e-15);
        assert!((((a.clone() / b.clone()).value()) - x / y).norm() < 1e-15);
        assert!((((a.clone() - b.clone()).value()) - (x - y)).norm() < 1e-15);
        assert!(((-a).value() + x).norm() < 1e-15);
    }

    #[test]
    fn big_cos_is_high_precision() {
        let proto = BigComplex::new(400, c(0.0, 0.0));
        let r = proto.cos_pi_ratio_like(1, 4);
        // 2 cos(pi/4)^2 - 1 = 0 to working precision
        let two = proto.from_i64_like(2);
        let resid = two * r.clone() * r - proto.one_like();
        assert!(resid.log2_modulus() < -390.0);
        assert_eq!(proto.cos_pi_ratio_like(1, 2).log2_modulus(), f64::NEG_INFINITY);
    }

    #[test]
    fn log2_modulus_tracks_magnitude() {
        let z = BigComplex::new(100, c(0.0, 3.0e-40));
        assert!((z.log2_modulus() - (3.0e-40f64).log2()).abs() < 1e-9);
        assert!(BigComplex::new(100, c(0.0, 0.0)).is_negligible());
    }

    #[test]
    fn jet_quotient_rule() {
        // f(u, v) = u^2 / (1 + v) at (2, 1): df/du = 2, df/dv = -1
        let u = Jet::variable(c(2.0, 0.0), 0);
        let v = Jet::variable(c(1.0, 0.0), 1);
        let f = u.clone() * u / (v.one_like() + v);
        assert!((f.v - c(2.0, 0.0)).norm() < 1e-15);
        assert!((f.d[0] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((f.d[1] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn powi_negative() {
        let z = c(0.5, 0.5);
        assert!((z.powi(-3) - z.powi(3).inv()).norm() < 1e-12);
    }
}
