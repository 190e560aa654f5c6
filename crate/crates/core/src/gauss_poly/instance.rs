use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::gaussian::{from_rational, ExactPolynomial, GaussianRational};
use crate::bigfloat::BigComplex;
use crate::rootfind::{self, RootError, RootOptions};
use crate::scalar::to_c64;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("P is identically zero")]
    ZeroNumerator,
    #[error(
        "deg T = 0: f = (P/Q)e^T reduces to the pure rational case (P/Q)^(n), \
         which has a different limit law; deg T >= 1 is required"
    )]
    ConstantExponent,
    #[error("deg Q = {0}: at least two poles are required")]
    TooFewPoles(usize),
    #[error("gcd(P, Q) is not a unit (common factor of degree {0})")]
    NotCoprime(usize),
    #[error("Q has a repeated zero (gcd(Q, Q') has degree {0})")]
    RepeatedPoles(usize),
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("locating the zeros of Q failed: {0}")]
    Poles(#[from] RootError),
}

/// `f = (P/Q) e^T` together with the data the recursion and potentials need.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    p: ExactPolynomial,
    q: ExactPolynomial,
    t: ExactPolynomial,
    q_prime: ExactPolynomial,
    q_t_prime: ExactPolynomial,
    q_zeros: Vec<BigComplex>,
    zeros_precision: u32,
}

/// Precision used for the poles when none is requested.
pub const DEFAULT_POLE_PRECISION: u32 = 256;

impl ProblemInstance {
    pub fn new(
        p: ExactPolynomial,
        q: ExactPolynomial,
        t: ExactPolynomial,
    ) -> Result<Self, InstanceError> {
        Self::with_precision(p, q, t, DEFAULT_POLE_PRECISION)
    }

    /// Validates the hypotheses and certifies the zeros of `Q` at `bits`.
    pub fn with_precision(
        p: ExactPolynomial,
        q: ExactPolynomial,
        t: ExactPolynomial,
        bits: u32,
    ) -> Result<Self, InstanceError> {
        if p.is_zero() {
            return Err(InstanceError::ZeroNumerator);
        }
        if t.degree() == 0 {
            return Err(InstanceError::ConstantExponent);
        }
        if q.is_zero() || q.degree() < 2 {
            return Err(InstanceError::TooFewPoles(q.degree()));
        }
        let g = p.gcd(&q);
        if g.degree() > 0 {
            return Err(InstanceError::NotCoprime(g.degree()));
        }
        let q_prime = q.derivative();
        let g = q.gcd(&q_prime);
        if g.degree() > 0 {
            return Err(InstanceError::RepeatedPoles(g.degree()));
        }
        let roots = rootfind::find_roots(&q, &RootOptions::with_precision(bits))?;
        let q_t_prime = &q * &t.derivative();
        Ok(ProblemInstance {
            p,
            q,
            t,
            q_prime,
            q_t_prime,
            q_zeros: roots.roots,
            zeros_precision: bits,
        })
    }

    /// Instance for `f(tau z + a)`: `P`, `Q`, `T` composed with the same
    /// affine map. `tau` must be positive.
    pub fn transformed(
        &self,
        tau: &BigRational,
        a: &GaussianRational,
    ) -> Result<Self, InstanceError> {
        if !tau.is_positive() {
            return Err(InstanceError::NonPositiveScale);
        }
        let tau_c = from_rational(tau.clone());
        Self::with_precision(
            self.p.compose_affine(&tau_c, a),
            self.q.compose_affine(&tau_c, a),
            self.t.compose_affine(&tau_c, a),
            self.zeros_precision,
        )
    }

    pub fn p(&self) -> &ExactPolynomial {
        &self.p
    }

    pub fn q(&self) -> &ExactPolynomial {
        &self.q
    }

    pub fn t(&self) -> &ExactPolynomial {
        &self.t
    }

    pub fn q_prime(&self) -> &ExactPolynomial {
        &self.q_prime
    }

    /// `Q * T'`, the factor that fixes degree and leading coefficient of `P_n`.
    pub fn q_t_prime(&self) -> &ExactPolynomial {
        &self.q_t_prime
    }

    pub fn p_degree(&self) -> usize {
        self.p.degree()
    }

    pub fn q_degree(&self) -> usize {
        self.q.degree()
    }

    pub fn t_degree(&self) -> usize {
        self.t.degree()
    }

    /// Leading coefficient `b_p` of `P`.
    pub fn b_p(&self) -> GaussianRational {
        self.p.leading()
    }

    /// Leading coefficient `c_q` of `Q`.
    pub fn c_q(&self) -> GaussianRational {
        self.q.leading()
    }

    /// Leading coefficient `d_t` of `T`.
    pub fn d_t(&self) -> GaussianRational {
        self.t.leading()
    }

    /// `deg P_n = n(q + t - 1) + p`
    pub fn degree_of(&self, n: usize) -> usize {
        n * (self.q_degree() + self.t_degree() - 1) + self.p_degree()
    }

    pub fn q_zeros(&self) -> &[BigComplex] {
        &self.q_zeros
    }

    pub fn q_zeros_c64(&self) -> Vec<Complex<f64>> {
        self.q_zeros.iter().map(to_c64).collect()
    }

    pub fn zeros_precision(&self) -> u32 {
        self.zeros_precision
    }

    /// Whether `Q(0) = 0` exactly.
    pub fn has_pole_at_origin(&self) -> bool {
        self.q.coeff(0).is_zero()
    }

    /// True when every coefficient of `P`, `Q` and `T` is real.
    pub fn is_real(&self) -> bool {
        [&self.p, &self.q, &self.t]
            .iter()
            .all(|poly| poly.coeffs().iter().all(|c| c.im.is_zero()))
    }
}
