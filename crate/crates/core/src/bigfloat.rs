//! Arbitrary-precision binary floats backed by `dashu-float`.
//!
//! [`BigFloat`] is a thin newtype so that `num_complex::Complex<BigFloat>`
//! gets the full complex arithmetic through `num_traits::Num`. Binary
//! operations round to the larger precision of the two operands; exact
//! constants such as `BigFloat::zero()` carry unlimited precision and adopt
//! the precision of whatever they are combined with.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::{Context, FBig};
use dashu_int::IBig;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

use crate::scalar::Real;

type Inner = FBig<HalfEven, 2>;

/// Binary floating-point number with a per-value precision in bits.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(Inner);

/// Complex number with [`BigFloat`] parts.
pub type BigComplex = Complex<BigFloat>;

/// Lowest precision accepted for root finding.
pub const MIN_PRECISION_BITS: u32 = 64;

fn ctx(bits: u32) -> Context<HalfEven> {
    Context::new(bits.max(1) as usize)
}

fn to_ibig(n: &BigInt) -> IBig {
    IBig::from_le_bytes(&n.to_signed_bytes_le())
}

impl BigFloat {
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "BigFloat cannot hold {x}");
        let exact = Inner::try_from(x).expect("finite f64 converts exactly");
        BigFloat(exact.with_precision(bits as usize).value())
    }

    pub fn from_bigint(n: &BigInt, bits: u32) -> Self {
        BigFloat(ctx(bits).convert_int::<2>(to_ibig(n)).value())
    }

    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let c = ctx(bits);
        let num = c.convert_int::<2>(to_ibig(r.numer())).value();
        let den = c.convert_int::<2>(to_ibig(r.denom())).value();
        BigFloat(c.div(num.repr(), den.repr()).value())
    }

    /// Precision in bits; 0 means an exact (unlimited) constant.
    pub fn precision(&self) -> u32 {
        self.0.precision() as u32
    }

    pub fn with_precision(&self, bits: u32) -> Self {
        BigFloat(self.0.clone().with_precision(bits as usize).value())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    pub fn is_negative(&self) -> bool {
        self.0 < Inner::ZERO
    }

    fn working_bits(&self) -> u32 {
        match self.precision() {
            0 => 64,
            p => p,
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({}, {} bits)", self.to_decimal_string(20), self.precision())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.working_bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize;
        f.write_str(&self.to_decimal_string(digits))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $method(self, rhs: BigFloat) -> BigFloat {
                BigFloat(self.0.$method(rhs.0))
            }
        }

        impl<'a> $tr<&'a BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            #[inline]
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                BigFloat((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Rem for BigFloat {
    type Output = BigFloat;

    fn rem(self, rhs: BigFloat) -> BigFloat {
        let q = (&self.0 / &rhs.0).trunc();
        BigFloat(self.0 - q * rhs.0)
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;

    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        BigFloat(Inner::ZERO)
    }

    fn is_zero(&self) -> bool {
        self.0.repr().is_zero()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        BigFloat(Inner::ONE)
    }
}

impl Num for BigFloat {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("unsupported radix {radix}"));
        }
        let dec: FBig<dashu_float::round::mode::HalfAway, 10> =
            s.parse().map_err(|e| format!("{e:?}"))?;
        let bits = (dec.precision() as f64 / std::f64::consts::LOG10_2).ceil() as usize + 8;
        Ok(BigFloat(dec.with_base_and_precision::<2>(bits).value().with_rounding()))
    }
}

impl Real for BigFloat {
    fn from_f64_prec(x: f64, bits: u32) -> Self {
        BigFloat::from_f64(x, bits)
    }

    fn from_rational(r: &BigRational, bits: u32) -> Self {
        BigFloat::from_rational(r, bits)
    }

    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }

    fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat(ctx(self.working_bits()).sqrt(self.0.repr()).value())
    }

    fn ln(&self) -> Self {
        BigFloat(ctx(self.working_bits()).ln(self.0.repr()).value())
    }

    fn precision_bits(&self) -> u32 {
        self.precision()
    }

    fn pow2(e: i64, bits: u32) -> Self {
        BigFloat(Inner::from_parts(IBig::ONE, e as isize).with_precision(bits as usize).value())
    }

    fn to_decimal_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let dec = self.0.to_decimal().value().with_precision(digits.max(1)).value();
        let (sig, exp) = dec.into_repr().into_parts();
        // sig * 10^exp, rendered as d.ddd...e<exp>
        let neg = sig < IBig::ZERO;
        let mut s = if neg { (-sig).to_string() } else { sig.to_string() };
        let sci_exp = exp + s.len() as isize - 1;
        while s.len() > 1 && s.ends_with('0') {
            s.pop();
        }
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&s[..1]);
        if s.len() > 1 {
            out.push('.');
            out.push_str(&s[1..]);
        }
        if sci_exp != 0 {
            out.push_str(&format!("e{sci_exp}"));
        }
        out
    }

    fn to_bigfloat(&self) -> BigFloat {
        self.clone()
    }
}

impl Eq for BigFloat {}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}
