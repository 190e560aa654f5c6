use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{FromPrimitive, Num, One, Zero};

/// Coefficient ring for [`Polynomial`]. Exact (`Complex<BigRational>`) or
/// floating (`Complex<f64>`, `f64`) types both qualify.
pub trait Coeff: Clone + Num + Neg<Output = Self> + FromPrimitive + Debug {}

impl<T> Coeff for T where T: Clone + Num + Neg<Output = T> + FromPrimitive + Debug {}

/// Dense univariate polynomial, coefficients in ascending powers.
///
/// The zero polynomial is the empty coefficient list; otherwise the last
/// coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Self::monomial(T::one(), 1)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots.iter().fold(Self::constant(T::one()), |acc, r| {
            &acc * &Self::new(vec![-r.clone(), T::one()])
        })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0 (check [`is_zero`](Self::is_zero)).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * T::from_usize(k).expect("index fits coefficient type"))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    /// `p(tau * z + a)`
    pub fn compose_affine(&self, tau: &T, a: &T) -> Self {
        let lin = Self::new(vec![a.clone(), tau.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * &lin) + &Self::constant(c.clone()))
    }

    /// Monic version (leading coefficient divided out). Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => Self::zero(),
            Some(lc) => {
                let lc = lc.clone();
                Self::new(self.coeffs.iter().map(|c| c.clone() / lc.clone()).collect())
            }
        }
    }

    /// Euclidean division over a field. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree();
        let lc = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].clone() / lc.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                rem[idx] = rem[idx].clone() - c.clone() * dc.clone();
            }
            quot[k - dd] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor over a field.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// True when `gcd(self, other)` is a nonzero constant.
    pub fn is_coprime(&self, other: &Self) -> bool {
        let g = self.gcd(other);
        !g.is_zero() && g.degree() == 0
    }

    /// Applies `f` to every coefficient.
    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T: Coeff> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Coeff> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Coeff> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<T: Coeff> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl<T: Coeff> $tr for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $method(self, rhs: Polynomial<T>) -> Polynomial<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<T: Coeff> Zero for Polynomial<T> {
    fn zero() -> Self {
        Polynomial::zero()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Coeff> One for Polynomial<T> {
    fn one() -> Self {
        Polynomial::constant(T::one())
    }
}

/// Power of a coefficient by repeated squaring.
pub fn pow<T: Coeff>(base: &T, mut e: u64) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b.clone();
        }
        e >>= 1;
        if e > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_poly::gaussian::{gaussian, parse_poly};
    use crate::GaussianRational;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn p(s: &[&str]) -> Polynomial<GaussianRational> {
        parse_poly(s).unwrap()
    }

    #[test]
    fn multiplicative_identity() {
        let a = p(&["0", "-1", "1"]);
        assert_eq!(&a * &p(&["1"]), a);
    }

    #[test]
    fn additive_inverse_is_empty() {
        let z = p(&["0", "1"]);
        let sum = &z + &(-&z);
        assert!(sum.is_zero());
        assert!(sum.coeffs().is_empty());
        let diff = &z - &z;
        assert!(diff.coeffs().is_empty());
    }

    #[test]
    fn hand_expansion_matches_evaluation() {
        let prod = &p(&["-1", "1"]) * &p(&["0", "1"]);
        assert_eq!(prod, p(&["0", "-1", "1"]));
        // three rational points
        for (a, b) in [(1, 3), (-7, 2), (5, 11)] {
            let x = GaussianRational::new(BigRational::new(BigInt::from(a), BigInt::from(b)), BigRational::zero());
            let lhs = prod.eval(&x);
            let rhs = (x.clone() - GaussianRational::one()) * x;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn derivative_power_rule() {
        assert_eq!(p(&["1", "-3", "1"]).derivative(), p(&["-3", "2"]));
        assert!(p(&["5"]).derivative().is_zero());
        assert_eq!(
            p(&["2", "-8", "13", "-6", "1"]).derivative(),
            p(&["-8", "26", "-18", "4"])
        );
    }

    #[test]
    fn derivative_drops_degree_by_one() {
        let a = p(&["1/2", "i", "3-2i", "7/3"]);
        assert_eq!(a.derivative().degree(), a.degree() - 1);
    }

    #[test]
    fn div_rem_and_gcd() {
        let a = p(&["0", "-1", "1"]); // z(z-1)
        let b = p(&["0", "1"]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, p(&["-1", "1"]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&["0", "2"])), b);
        assert!(a.is_coprime(&p(&["1", "-3", "1"])));
        assert!(!a.is_coprime(&p(&["-1", "1"]).scale(&gaussian(3, 1, 0, 1))));
    }

    #[test]
    fn compose_affine_substitutes() {
        // (z+1)^2 - 3(z+1) + 1 = z^2 - z - 1
        let one = GaussianRational::one();
        let r = p(&["1", "-3", "1"]).compose_affine(&one, &one);
        assert_eq!(r, p(&["-1", "-1", "1"]));
    }

    #[test]
    fn from_roots_expands() {
        let r = Polynomial::from_roots(&[gaussian(0, 1, 0, 1), gaussian(1, 1, 0, 1)]);
        assert_eq!(r, p(&["0", "-1", "1"]));
    }

    #[test]
    fn pow_by_squaring() {
        assert_eq!(pow(&gaussian(6, 1, 0, 1), 2), gaussian(36, 1, 0, 1));
        assert_eq!(pow(&gaussian(0, 1, 1, 1), 4), gaussian(1, 1, 0, 1));
        assert_eq!(pow(&gaussian(5, 1, 0, 1), 0), GaussianRational::one());
    }
}
