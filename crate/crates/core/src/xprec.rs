//! Double-double real and complex arithmetic, and Newton refinement of a
//! root carried out entirely in that arithmetic.
//!
//! An [`XReal`] is the unevaluated sum `hi + lo` of two `f64` values with
//! `|lo| <= ulp(hi) / 2`, which gives about 106 bits of significand. The
//! kernels are the classic error-free transformations (two-sum and an
//! FMA-based two-product).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Unit roundoff of `f64`, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Splits a finite nonzero `x` into `(m, e)` with `x = m * 2^e`, `1 <= |m| < 2`.
pub(crate) fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mant = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
    (mant, exp + bias)
}

/// `2^e` as an `f64`, saturating to 0 or infinity outside the normal range.
pub(crate) fn pow2(e: i64) -> f64 {
    if e > 1023 {
        f64::INFINITY
    } else if e < -1022 {
        // split to reach the subnormal range without double rounding
        2f64.powi(-1022) * 2f64.powi((e + 1022).max(-60) as i32)
    } else {
        f64::from_bits(((e + 1023) as u64) << 52)
    }
}

/// Extended-precision real number `hi + lo`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct XReal {
    pub hi: f64,
    pub lo: f64,
}

impl XReal {
    pub const ZERO: XReal = XReal { hi: 0.0, lo: 0.0 };
    pub const ONE: XReal = XReal { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        XReal { hi: x, lo: 0.0 }
    }

    /// Normalizes an arbitrary pair into a valid double-double.
    #[inline]
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        XReal { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        // keeps the sign of -0.0
        if self.lo == 0.0 {
            self.hi
        } else {
            self.hi + self.lo
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi.is_sign_negative() {
            -self
        } else {
            self
        }
    }

    /// Multiplication by an exact power of two.
    #[inline]
    pub fn scale(self, factor: f64) -> Self {
        XReal {
            hi: self.hi * factor,
            lo: self.lo * factor,
        }
    }

    pub fn sqr(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        let e = e + 2.0 * self.hi * self.lo;
        let (hi, lo) = quick_two_sum(p, e);
        XReal { hi, lo }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                XReal::ZERO
            } else {
                XReal::from_f64(f64::NAN)
            };
        }
        let s = self.hi.sqrt();
        let r = self - XReal::from_f64(s).sqr();
        let (hi, lo) = quick_two_sum(s, r.hi / (2.0 * s));
        XReal { hi, lo }
    }

    /// Division that reports an exact-zero divisor.
    pub fn checked_div(self, rhs: XReal) -> Result<XReal> {
        if rhs.is_zero() {
            return Err(Error::SingularDivision);
        }
        Ok(self / rhs)
    }
}

impl fmt::Debug for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XReal({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl From<f64> for XReal {
    fn from(x: f64) -> Self {
        XReal::from_f64(x)
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for XReal {
    type Output = XReal;
    #[inline]
    fn neg(self) -> XReal {
        XReal {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for XReal {
    type Output = XReal;
    #[inline]
    fn add(self, rhs: XReal) -> XReal {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        XReal { hi, lo }
    }
}

impl Sub for XReal {
    type Output = XReal;
    #[inline]
    fn sub(self, rhs: XReal) -> XReal {
        self + (-rhs)
    }
}

impl Mul for XReal {
    type Output = XReal;
    #[inline]
    fn mul(self, rhs: XReal) -> XReal {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = self.hi.mul_add(rhs.lo, e);
        let e = self.lo.mul_add(rhs.hi, e);
        let (hi, lo) = quick_two_sum(p, e);
        XReal { hi, lo }
    }
}

impl Mul<f64> for XReal {
    type Output = XReal;
    #[inline]
    fn mul(self, rhs: f64) -> XReal {
        let (p, e) = two_prod(self.hi, rhs);
        let e = self.lo.mul_add(rhs, e);
        let (hi, lo) = quick_two_sum(p, e);
        XReal { hi, lo }
    }
}

impl Div for XReal {
    type Output = XReal;
    fn div(self, rhs: XReal) -> XReal {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * q1;
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * q2;
        let q3 = r.hi / rhs.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        XReal { hi: q1, lo: q2 } + XReal::from_f64(q3)
    }
}

impl AddAssign for XReal {
    fn add_assign(&mut self, rhs: XReal) {
        *self = *self + rhs;
    }
}

impl SubAssign for XReal {
    fn sub_assign(&mut self, rhs: XReal) {
        *self = *self - rhs;
    }
}

impl MulAssign for XReal {
    fn mul_assign(&mut self, rhs: XReal) {
        *self = *self * rhs;
    }
}

/// Extended-precision complex number.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct XComplex {
    pub re: XReal,
    pub im: XReal,
}

impl XComplex {
    pub const ZERO: XComplex = XComplex {
        re: XReal::ZERO,
        im: XReal::ZERO,
    };
    pub const ONE: XComplex = XComplex {
        re: XReal::ONE,
        im: XReal::ZERO,
    };

    #[inline]
    pub const fn new(re: XReal, im: XReal) -> Self {
        XComplex { re, im }
    }

    /// Exact promotion of a working-precision complex number.
    #[inline]
    pub const fn from_c64(z: Complex64) -> Self {
        XComplex {
            re: XReal::from_f64(z.re),
            im: XReal::from_f64(z.im),
        }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        XComplex::new(XReal::from_f64(x), XReal::ZERO)
    }

    #[inline]
    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    #[inline]
    pub fn conj(self) -> Self {
        XComplex::new(self.re, -self.im)
    }

    #[inline]
    pub fn scale(self, factor: f64) -> Self {
        XComplex::new(self.re.scale(factor), self.im.scale(factor))
    }

    /// Power-of-two exponent of the larger component, used to rescale
    /// before squaring.
    fn magnitude_exponent(self) -> i64 {
        let m = self.re.hi.abs().max(self.im.hi.abs());
        frexp(m).1
    }

    pub fn norm_sqr(self) -> XReal {
        self.re.sqr() + self.im.sqr()
    }

    /// Modulus, rescaled internally so that squaring cannot overflow.
    pub fn abs(self) -> XReal {
        if self.is_zero() {
            return XReal::ZERO;
        }
        let e = self.magnitude_exponent();
        let scaled = self.scale(pow2(-e));
        scaled.norm_sqr().sqrt().scale(pow2(e))
    }

    /// Modulus rounded to working precision.
    #[inline]
    pub fn abs_f64(self) -> f64 {
        self.abs().to_f64()
    }

    pub fn checked_div(self, rhs: XComplex) -> Result<XComplex> {
        if rhs.is_zero() {
            return Err(Error::SingularDivision);
        }
        Ok(self / rhs)
    }

    pub fn recip(self) -> XComplex {
        XComplex::ONE / self
    }
}

impl fmt::Debug for XComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XComplex({:?}, {:?})", self.re, self.im)
    }
}

impl From<Complex64> for XComplex {
    fn from(z: Complex64) -> Self {
        XComplex::from_c64(z)
    }
}

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex::new(-self.re, -self.im)
    }
}

impl Add for XComplex {
    type Output = XComplex;
    fn add(self, rhs: XComplex) -> XComplex {
        XComplex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for XComplex {
    type Output = XComplex;
    fn sub(self, rhs: XComplex) -> XComplex {
        XComplex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for XComplex {
    type Output = XComplex;
    fn mul(self, rhs: XComplex) -> XComplex {
        XComplex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<XReal> for XComplex {
    type Output = XComplex;
    fn mul(self, rhs: XReal) -> XComplex {
        XComplex::new(self.re * rhs, self.im * rhs)
    }
}

impl Mul<f64> for XComplex {
    type Output = XComplex;
    fn mul(self, rhs: f64) -> XComplex {
        XComplex::new(self.re * rhs, self.im * rhs)
    }
}

impl Div for XComplex {
    type Output = XComplex;
    /// Scaled complex division; an exact-zero divisor yields non-finite
    /// components (use [`XComplex::checked_div`] to get an error instead).
    fn div(self, rhs: XComplex) -> XComplex {
        if rhs.is_zero() {
            return XComplex::new(
                XReal::from_f64(self.re.hi / 0.0),
                XReal::from_f64(self.im.hi / 0.0),
            );
        }
        let s = pow2(-rhs.magnitude_exponent());
        let den = rhs.scale(s);
        let num = self * den.conj();
        let q = den.norm_sqr();
        XComplex::new(num.re / q, num.im / q).scale(s)
    }
}

impl AddAssign for XComplex {
    fn add_assign(&mut self, rhs: XComplex) {
        *self = *self + rhs;
    }
}

impl SubAssign for XComplex {
    fn sub_assign(&mut self, rhs: XComplex) {
        *self = *self - rhs;
    }
}

impl MulAssign for XComplex {
    fn mul_assign(&mut self, rhs: XComplex) {
        *self = *self * rhs;
    }
}

/// Precision used when expanding a product of linear factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PrecisionMode {
    Working,
    #[default]
    Extended,
}

/// Stopping rules for [`newton_refine`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonConfig {
    pub max_iter: usize,
    /// Relative step size below which the iterate is accepted.
    pub rel_tol: f64,
    /// The iteration is abandoned once `|x| > divergence_factor * (1 + |x0|)`.
    pub divergence_factor: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            max_iter: 64,
            rel_tol: UNIT_ROUNDOFF * UNIT_ROUNDOFF,
            divergence_factor: 1e3,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::Invalid("max_iter must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < UNIT_ROUNDOFF) {
            return Err(Error::Invalid(format!(
                "rel_tol must lie in (0, u), got {:e}",
                self.rel_tol
            )));
        }
        if !(self.divergence_factor > 0.0) {
            return Err(Error::NonPositive {
                what: "divergence_factor",
                value: self.divergence_factor,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonStatus {
    Converged,
    MaxIter,
    Diverged,
}

impl NewtonStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            NewtonStatus::Converged => "converged",
            NewtonStatus::MaxIter => "max_iter",
            NewtonStatus::Diverged => "diverged",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NewtonOutcome {
    pub root: XComplex,
    pub status: NewtonStatus,
    pub iterations: usize,
}

/// `u^{3/2}`.
const POLISH_TRIGGER: f64 = UNIT_ROUNDOFF * 1.053_671_212_772_350_9e-8;

/// Refines `x0` towards a root of `p` with Newton's method, evaluating `p`
/// and `p'` by Horner's scheme in double-double arithmetic on the exact
/// working-precision coefficients.
///
/// Besides reaching `rel_tol`, the iteration stops one step after a relative
/// step below `u^{3/2}` (quadratic convergence puts the next iterate at the
/// rounding floor of the evaluation), or when a step below `u` is followed
/// by one that does not shrink.
pub fn newton_refine(p: &Polynomial, x0: Complex64, cfg: &NewtonConfig) -> NewtonOutcome {
    let mut x = XComplex::from_c64(x0);
    let limit = cfg.divergence_factor * (1.0 + x0.norm());
    let mut prev_step = f64::INFINITY;

    for it in 1..=cfg.max_iter {
        let Some(step) = p.newton_step_x(x) else {
            return NewtonOutcome {
                root: x,
                status: NewtonStatus::Diverged,
                iterations: it,
            };
        };
        if !step.is_finite() {
            return NewtonOutcome {
                root: x,
                status: NewtonStatus::Diverged,
                iterations: it,
            };
        }
        x -= step;
        let modulus = x.abs_f64();
        if !(modulus <= limit) {
            return NewtonOutcome {
                root: x,
                status: NewtonStatus::Diverged,
                iterations: it,
            };
        }
        let rel_step = step.abs_f64() / modulus;
        if rel_step <= cfg.rel_tol
            || prev_step <= POLISH_TRIGGER
            || (prev_step <= UNIT_ROUNDOFF && rel_step >= prev_step)
        {
            return NewtonOutcome {
                root: x,
                status: NewtonStatus::Converged,
                iterations: it,
            };
        }
        prev_step = rel_step;
    }
    NewtonOutcome {
        root: x,
        status: NewtonStatus::MaxIter,
        iterations: cfg.max_iter,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: XComplex, b: XComplex) -> f64 {
        (a - b).abs_f64() / b.abs_f64()
    }

    #[test]
    fn add_keeps_tiny_summand() {
        let s = XReal::ONE + XReal::from_f64(1e-20);
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-20);
        let z = XComplex::from_f64(1.0) + XComplex::from_f64(1e-20);
        assert_eq!(z.re.lo, 1e-20);
    }

    #[test]
    fn multiplicative_identity() {
        let z = XComplex::new(XReal::from_parts(0.3, 1e-18), XReal::from_parts(-2.5, 3e-17));
        assert_eq!(XComplex::ONE * z, z);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let z = XComplex::from_f64(1.0);
        assert_eq!(z.checked_div(XComplex::ZERO), Err(Error::SingularDivision));
        assert_eq!(
            XReal::ONE.checked_div(XReal::ZERO),
            Err(Error::SingularDivision)
        );
    }

    #[test]
    fn sqrt_of_two_squares_back() {
        let two = XReal::from_f64(2.0);
        let r = two.sqrt();
        let back = r.sqr();
        assert!((back - two).abs().to_f64() < 1e-31);
    }

    #[test]
    fn abs_survives_huge_components() {
        let z = XComplex::from_c64(Complex64::new(3e200, 4e200));
        let a = z.abs_f64();
        assert!((a / 5e200 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn division_round_trip_is_accurate() {
        // deterministic sweep over magnitudes in [1e-6, 1e6]
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let t = i as f64 / 199.0;
            let ma = 10f64.powf(-6.0 + 12.0 * t);
            let mb = 10f64.powf(6.0 - 12.0 * ((t * 7.3).fract()));
            let a = XComplex::from_c64(Complex64::from_polar(ma, 0.7 + 3.1 * t))
                + XComplex::from_c64(Complex64::new(ma * 1e-17, -ma * 3e-18));
            let b = XComplex::from_c64(Complex64::from_polar(mb, -1.3 + 5.0 * t));
            let back = (a * b) / b;
            worst = worst.max(rel_err(back, a));
        }
        assert!(worst <= 1e-30, "worst {worst:e}");
    }

    #[test]
    fn frexp_and_pow2_agree() {
        for &x in &[1.0, 3.5, 1e-300, 5e-320, 1e300, -7.25] {
            let (m, e) = frexp(x);
            assert!((1.0..2.0).contains(&m.abs()), "{x}");
            assert_eq!(m * pow2(e), x);
        }
    }

    #[test]
    fn newton_on_simple_quadratic() {
        let p = Polynomial::new(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let out = newton_refine(&p, Complex64::new(0.9, 0.0), &NewtonConfig::default());
        assert_eq!(out.status, NewtonStatus::Converged);
        assert!(rel_err(out.root, XComplex::ONE) < 1e-31);
    }

    #[test]
    fn newton_on_cubic_with_integer_roots() {
        let p = Polynomial::from_real(&[-6.0, 11.0, -6.0, 1.0]).unwrap();
        let out = newton_refine(&p, Complex64::new(2.1, 0.0), &NewtonConfig::default());
        assert_eq!(out.status, NewtonStatus::Converged);
        assert!(rel_err(out.root, XComplex::from_f64(2.0)) <= 1e-30);
    }

    #[test]
    fn newton_reports_vanishing_derivative() {
        // p'(0) = 0 for x^2 + 1
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let out = newton_refine(&p, Complex64::new(0.0, 0.0), &NewtonConfig::default());
        assert_eq!(out.status, NewtonStatus::Diverged);
    }

    #[test]
    fn config_validation() {
        assert!(NewtonConfig::default().validate().is_ok());
        let bad = NewtonConfig {
            rel_tol: 1e-10,
            ..NewtonConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
