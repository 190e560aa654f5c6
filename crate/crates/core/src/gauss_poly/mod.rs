//! Exact Gaussian-rational polynomials and the derivative-numerator recursion.

pub mod gaussian;
pub mod instance;
pub mod polynomial;
pub mod sequence;

pub use gaussian::{
    format_gaussian, format_poly, gaussian, gaussian_int, parse_gaussian, parse_poly,
    ExactPolynomial, GaussianRational, ParseError,
};
pub use instance::{InstanceError, ProblemInstance};
pub use polynomial::{Coeff, Polynomial};
pub use sequence::{
    closed_form_leading_coeff, closed_form_value_at_zero, generate_sequence, recursion_step,
    scale_translate, scaled_leading_coeff, DerivativeSequence, SequenceEntry, SequenceError,
    SequenceLimits,
};
