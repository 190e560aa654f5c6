//! Numerators `P_n` of `f^(n) = (P_n / Q^(n+1)) e^T`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

use super::gaussian::{from_rational, max_coeff_bits, ExactPolynomial, GaussianRational};
use super::instance::ProblemInstance;
use super::polynomial::pow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("recursion step index must be >= 1, got {0}")]
    InvalidStep(usize),
    #[error("n_max must be >= 1")]
    EmptyRange,
    #[error("coefficient size limit of {limit_bits} bits exceeded at n = {failed_n} (last complete n = {reached})")]
    ResourceLimit {
        reached: usize,
        failed_n: usize,
        limit_bits: u64,
    },
    #[error("Q(0) != 0: the instance has no pole at the origin")]
    NoPoleAtOrigin,
    #[error("scale factor must be positive")]
    NonPositiveScale,
}

/// Caps applied while generating a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceLimits {
    /// Largest allowed bit length of any coefficient numerator or denominator.
    pub max_coeff_bits: u64,
}

impl Default for SequenceLimits {
    fn default() -> Self {
        SequenceLimits {
            max_coeff_bits: 1 << 20,
        }
    }
}

/// One member of the family `{P_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceEntry {
    pub n: usize,
    pub poly: ExactPolynomial,
    /// Leading coefficient `A_n`.
    pub leading: GaussianRational,
    /// `m_n = deg P_n`
    pub degree: usize,
}

impl SequenceEntry {
    fn new(n: usize, poly: ExactPolynomial) -> Self {
        SequenceEntry {
            n,
            leading: poly.leading(),
            degree: poly.degree(),
            poly,
        }
    }
}

/// `P_n = (Q T' - n Q') P_{n-1} + Q P'_{n-1}` for `n >= 1`.
pub fn recursion_step(
    prev: &ExactPolynomial,
    instance: &ProblemInstance,
    n: usize,
) -> Result<ExactPolynomial, SequenceError> {
    if n == 0 {
        return Err(SequenceError::InvalidStep(n));
    }
    let n_c = from_rational(BigRational::from_integer(BigInt::from(n)));
    let factor = instance.q_t_prime() - &instance.q_prime().scale(&n_c);
    Ok(&(&factor * prev) + &(instance.q() * &prev.derivative()))
}

/// `{P_0, ..., P_{n_max}}` for one instance.
#[derive(Clone, Debug)]
pub struct DerivativeSequence {
    instance: ProblemInstance,
    entries: Vec<SequenceEntry>,
    limits: SequenceLimits,
}

impl DerivativeSequence {
    /// Sequence holding only `P_0 = P`.
    pub fn start(instance: ProblemInstance, limits: SequenceLimits) -> Self {
        let p0 = SequenceEntry::new(0, instance.p().clone());
        DerivativeSequence {
            instance,
            entries: vec![p0],
            limits,
        }
    }

    /// Extends the stored entries up to `n_max` (no-op if already there).
    pub fn extend_to(&mut self, n_max: usize) -> Result<(), SequenceError> {
        while self.n_max() < n_max {
            let n = self.n_max() + 1;
            let next = recursion_step(&self.entries[n - 1].poly, &self.instance, n)?;
            if max_coeff_bits(&next) > self.limits.max_coeff_bits {
                return Err(SequenceError::ResourceLimit {
                    reached: n - 1,
                    failed_n: n,
                    limit_bits: self.limits.max_coeff_bits,
                });
            }
            self.entries.push(SequenceEntry::new(n, next));
        }
        Ok(())
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn entries(&self) -> &[SequenceEntry] {
        &self.entries
    }

    pub fn entry(&self, n: usize) -> Option<&SequenceEntry> {
        self.entries.get(n)
    }

    pub fn n_max(&self) -> usize {
        self.entries.len() - 1
    }

    /// Checks degree law, leading-coefficient law and `gcd(P_n, Q) = 1` for
    /// every stored entry. Returns the first violation.
    pub fn verify(&self) -> Result<(), String> {
        for e in &self.entries {
            let want_deg = self.instance.degree_of(e.n);
            if e.degree != want_deg || e.poly.degree() != want_deg {
                return Err(format!("n = {}: degree {} != {}", e.n, e.degree, want_deg));
            }
            if e.leading != e.poly.leading()
                || e.leading != closed_form_leading_coeff(e.n, &self.instance)
            {
                return Err(format!("n = {}: leading coefficient mismatch", e.n));
            }
            if !e.poly.is_coprime(self.instance.q()) {
                return Err(format!("n = {}: P_n shares a factor with Q", e.n));
            }
        }
        Ok(())
    }
}

/// Generates `P_0 ... P_{n_max}` with the given limits.
pub fn generate_sequence(
    instance: &ProblemInstance,
    n_max: usize,
    limits: SequenceLimits,
) -> Result<DerivativeSequence, SequenceError> {
    if n_max == 0 {
        return Err(SequenceError::EmptyRange);
    }
    let mut seq = DerivativeSequence::start(instance.clone(), limits);
    seq.extend_to(n_max)?;
    Ok(seq)
}

/// `A_n = (c_q d_t t)^n b_p`.
///
/// For monic `Q` this is `(d_t t)^n b_p`. A `ProblemInstance` always has
/// `t >= 1`, which the formula needs.
pub fn closed_form_leading_coeff(n: usize, instance: &ProblemInstance) -> GaussianRational {
    let t = from_rational(BigRational::from_integer(BigInt::from(instance.t_degree())));
    let step = instance.c_q() * instance.d_t() * t;
    pow(&step, n as u64) * instance.b_p()
}

/// `P_n(0) = n! (-Q'(0))^n P(0)`, valid when `Q(0) = 0`.
pub fn closed_form_value_at_zero(
    n: usize,
    instance: &ProblemInstance,
) -> Result<GaussianRational, SequenceError> {
    if !instance.has_pole_at_origin() {
        return Err(SequenceError::NoPoleAtOrigin);
    }
    let minus_qp0 = -instance.q_prime().coeff(0);
    Ok(from_rational(BigRational::from_integer(factorial(n)))
        * pow(&minus_qp0, n as u64)
        * instance.p().coeff(0))
}

/// `tau^n P_n(tau z + a)`, the numerator for `f(tau z + a)`.
pub fn scale_translate(
    pn: &ExactPolynomial,
    n: usize,
    tau: &BigRational,
    a: &GaussianRational,
) -> Result<ExactPolynomial, SequenceError> {
    if !tau.is_positive() {
        return Err(SequenceError::NonPositiveScale);
    }
    let tau_c = from_rational(tau.clone());
    Ok(pn.compose_affine(&tau_c, a).scale(&pow(&tau_c, n as u64)))
}

/// `tau^(n(q+t)+p) A_n`, the leading coefficient of [`scale_translate`].
pub fn scaled_leading_coeff(
    leading: &GaussianRational,
    n: usize,
    instance: &ProblemInstance,
    tau: &BigRational,
) -> GaussianRational {
    let e = n * (instance.q_degree() + instance.t_degree()) + instance.p_degree();
    let tau_c = from_rational(tau.clone());
    pow(&tau_c, e as u64) * leading.clone()
}

/// `n!` as an exact integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n as u64).map(BigInt::from).fold(BigInt::one(), |a, b| a * b)
}
