//! Zeros of iterated derivatives of `f = (P/Q) e^T`.
//!
//! The numerators `P_n` of `f^(n) = (P_n / Q^(n+1)) e^T` are generated in exact
//! Gaussian-rational arithmetic ([`gauss_poly`]), their zeros are found at
//! high precision ([`rootfind`]), and the resulting zero-counting measures are
//! compared with the limit potential `Psi` and the edge measure on the Voronoi
//! skeleton of the poles ([`voronoi`], [`potential`]). [`experiment`] ties the
//! stages together for the command-line harness.
//!
//! Numerical geometry is generic over [`Scalar`] (`f32`/`f64`); root finding
//! is generic over [`Real`] (`f64` or [`BigFloat`]). The aliases below fix the
//! concrete types used by the pipeline.

pub mod bigfloat;
pub mod experiment;
pub mod gauss_poly;
pub mod potential;
pub mod quad;
pub mod rootfind;
pub mod scalar;
pub mod svg;
pub mod voronoi;

pub use bigfloat::{BigComplex, BigFloat};
pub use gauss_poly::{
    DerivativeSequence, ExactPolynomial, GaussianRational, Polynomial, ProblemInstance,
};
pub use rootfind::{EmpiricalMeasure, RootSet};
pub use scalar::{Real, Scalar};

/// Voronoi diagram of the poles in `f64`.
pub type VoronoiDiagram = voronoi::Diagram<f64>;
/// Skeleton edge in `f64`.
pub type Edge = voronoi::Edge<f64>;
/// Limit-potential data in `f64`.
pub type LimitPotentialSpec = potential::LimitSpec<f64>;

/// Any error raised along the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] gauss_poly::ParseError),
    #[error(transparent)]
    Instance(#[from] gauss_poly::InstanceError),
    #[error(transparent)]
    Sequence(#[from] gauss_poly::SequenceError),
    #[error(transparent)]
    Roots(#[from] rootfind::RootError),
    #[error(transparent)]
    Voronoi(#[from] voronoi::VoronoiError),
    #[error(transparent)]
    Potential(#[from] potential::PotentialError),
    #[error(transparent)]
    Config(#[from] experiment::ConfigError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
