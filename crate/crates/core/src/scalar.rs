//! Scalar traits the numerical modules are generic over.
//!
//! Two families are used:
//!
//! * [`Scalar`]: ordinary IEEE floats (`f32`, `f64`) for geometry, potentials
//!   and quadrature.
//! * [`Real`]: anything the simultaneous root finder can iterate in, which
//!   covers `f64` and the arbitrary-precision [`BigFloat`](crate::BigFloat).

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Floating point: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; used for literal constants in generic code.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A real field the root finder can work in at a chosen precision.
pub trait Real: Clone + Num + Neg<Output = Self> + PartialOrd + Debug + Send + Sync {
    /// Rounds an `f64` to a value carrying `bits` of precision.
    fn from_f64_prec(x: f64, bits: u32) -> Self;

    /// Rounds an exact rational to `bits` of precision.
    fn from_rational(r: &BigRational, bits: u32) -> Self;

    fn to_f64(&self) -> f64;

    fn sqrt(&self) -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Natural logarithm; the argument is positive.
    fn ln(&self) -> Self;

    /// Working precision in bits.
    fn precision_bits(&self) -> u32;

    /// `2^e` at the given precision.
    fn pow2(e: i64, bits: u32) -> Self;

    /// Decimal rendering with roughly `digits` significant digits.
    fn to_decimal_string(&self, digits: usize) -> String;

    fn to_bigfloat(&self) -> crate::BigFloat;
}

impl Real for f64 {
    fn from_f64_prec(x: f64, _bits: u32) -> Self {
        x
    }

    fn from_rational(r: &BigRational, _bits: u32) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn precision_bits(&self) -> u32 {
        53
    }

    fn pow2(e: i64, _bits: u32) -> Self {
        (e as f64).exp2()
    }

    fn to_decimal_string(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1).min(16), self)
    }

    fn to_bigfloat(&self) -> crate::BigFloat {
        crate::BigFloat::from_f64(*self, 53)
    }
}

/// `|z|` for a complex number over any [`Real`].
pub fn cabs<R: Real>(z: &Complex<R>) -> R {
    z.norm_sqr().sqrt()
}

/// Converts a complex number over a [`Real`] to `Complex<f64>`.
pub fn to_c64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// Nearest `f64` to a big rational, robust to numerators and denominators
/// that individually overflow `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (m_num, e_num) = int_mantissa(r.numer());
    let (m_den, e_den) = int_mantissa(r.denom());
    let m = m_num / m_den;
    let e = e_num - e_den;
    if e > i32::MAX as i64 {
        return m.signum() * f64::INFINITY;
    }
    if e < i32::MIN as i64 {
        return 0.0;
    }
    m * (e as f64).exp2()
}

/// `log2 |r|` without forming an `f64` of `r` itself. `-inf` for zero.
pub fn log2_abs_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m_num, e_num) = int_mantissa(r.numer());
    let (m_den, e_den) = int_mantissa(r.denom());
    m_num.abs().log2() - m_den.abs().log2() + (e_num - e_den) as f64
}

/// `log2 |c|` for a Gaussian rational; `-inf` for zero.
pub fn log2_abs_gaussian(c: &Complex<BigRational>) -> f64 {
    let a = log2_abs_rational(&c.re);
    let b = log2_abs_rational(&c.im);
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + 0.5 * (1.0 + (2.0 * (lo - hi)).exp2()).log2()
}

// n = m * 2^e with |m| < 2^63
fn int_mantissa(n: &BigInt) -> (f64, i64) {
    let bits = n.bits() as i64;
    if bits <= 63 {
        return (n.to_f64().unwrap_or(0.0), 0);
    }
    let shift = bits - 63;
    let top: BigInt = n.abs() >> (shift as usize);
    let m = top.to_f64().unwrap_or(0.0);
    (if n.is_negative() { -m } else { m }, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn rational_to_f64_handles_huge_parts() {
        let big = BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone() * 3, big);
        assert_eq!(rational_to_f64(&r), 3.0);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(2).pow(2000));
        assert_eq!(rational_to_f64(&tiny), 0.0);
        assert!((log2_abs_rational(&tiny) + 2000.0).abs() < 1e-12);
    }

    #[test]
    fn log2_of_negative_rational() {
        let r = BigRational::new(BigInt::from(-8), BigInt::from(1));
        assert!((log2_abs_rational(&r) - 3.0).abs() < 1e-15);
    }
}
