//! Gaussian rationals and their text form.
//!
//! A coefficient is written `a/b+c/di`: an optional real part followed by an
//! optional imaginary part ending in `i`. Both parts are integers or
//! fractions. Examples: `1`, `-3`, `1/2`, `i`, `-2/3i`, `4-3i`, `1/2+5/7i`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::Polynomial;

/// Complex number with exact rational parts. `BigRational` keeps every
/// value in lowest terms with a positive denominator, so equality is
/// structural.
pub type GaussianRational = Complex<BigRational>;

/// Polynomial with Gaussian-rational coefficients.
pub type ExactPolynomial = Polynomial<GaussianRational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty coefficient string")]
    Empty,
    #[error("malformed coefficient `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// `re_num/re_den + (im_num/im_den) i`
pub fn gaussian(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> GaussianRational {
    Complex::new(
        BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
        BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
    )
}

pub fn gaussian_int(re: i64, im: i64) -> GaussianRational {
    gaussian(re, 1, im, 1)
}

pub fn from_rational(r: BigRational) -> GaussianRational {
    Complex::new(r, BigRational::zero())
}

fn parse_rational(s: &str, whole: &str) -> Result<BigRational, ParseError> {
    let s = s.strip_prefix('+').unwrap_or(s);
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let bad = || ParseError::Malformed(whole.to_string());
    let digits_ok = |t: &str| {
        let t = t.strip_prefix('-').unwrap_or(t);
        !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
    };
    if !digits_ok(num) || !digits_ok(den) || den.starts_with('-') {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(ParseError::ZeroDenominator(whole.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Parses a single Gaussian-rational coefficient.
pub fn parse_gaussian(input: &str) -> Result<GaussianRational, ParseError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(from_rational(parse_rational(&s, input)?));
    };
    // split into real part and imaginary coefficient at the last sign that
    // is not the leading one
    let split = body
        .char_indices()
        .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
        .map(|(k, _)| k)
        .last();
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() {
        BigRational::zero()
    } else {
        parse_rational(re_str, input)?
    };
    let im = match im_str {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        other => parse_rational(other, input)?,
    };
    Ok(Complex::new(re, im))
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form, inverse of [`parse_gaussian`].
pub fn format_gaussian(g: &GaussianRational) -> String {
    let im_part = |im: &BigRational| -> String {
        if im.is_one() {
            "i".to_string()
        } else if (-im).is_one() {
            "-i".to_string()
        } else {
            format!("{}i", format_rational(im))
        }
    };
    match (g.re.is_zero(), g.im.is_zero()) {
        (_, true) => format_rational(&g.re),
        (true, false) => im_part(&g.im),
        (false, false) => {
            let im = im_part(&g.im);
            let sep = if g.im.is_negative() { "" } else { "+" };
            format!("{}{}{}", format_rational(&g.re), sep, im)
        }
    }
}

/// Parses coefficient strings in ascending powers.
pub fn parse_poly<S: AsRef<str>>(coeffs: &[S]) -> Result<ExactPolynomial, ParseError> {
    coeffs
        .iter()
        .map(|s| parse_gaussian(s.as_ref()))
        .collect::<Result<Vec<_>, _>>()
        .map(Polynomial::new)
}

/// Coefficient strings in ascending powers; the zero polynomial gives `["0"]`.
pub fn format_poly(p: &ExactPolynomial) -> Vec<String> {
    if p.is_zero() {
        return vec!["0".to_string()];
    }
    p.coeffs().iter().map(format_gaussian).collect()
}

/// Largest bit length of any numerator or denominator among the coefficients.
pub fn max_coeff_bits(p: &ExactPolynomial) -> u64 {
    p.coeffs()
        .iter()
        .flat_map(|c| [c.re.numer(), c.re.denom(), c.im.numer(), c.im.denom()])
        .map(|n| n.bits())
        .max()
        .unwrap_or(0)
}
