//! All zeros of an exact polynomial by simultaneous (Aberth–Ehrlich)
//! iteration, residual certification, and the zero-counting measure.

use std::f64::consts::{LN_2, PI};
use std::io::{self, Write};

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::bigfloat::{BigComplex, BigFloat, MIN_PRECISION_BITS};
use crate::gauss_poly::ExactPolynomial;
use crate::scalar::{cabs, log2_abs_gaussian, to_c64, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial is constant; it has no zeros")]
    ConstantPolynomial,
    #[error("precision {0} bits is below the minimum of {MIN_PRECISION_BITS}")]
    PrecisionTooLow(u32),
    #[error(
        "no convergence after {sweeps} sweeps: worst relative residual 2^{worst_log2_residual:.1} \
         exceeds 2^{bound_log2:.1}; retry at higher precision"
    )]
    NonConvergence {
        sweeps: usize,
        worst_log2_residual: f64,
        bound_log2: f64,
    },
    #[error("zero-counting measure needs a polynomial of degree >= 1")]
    EmptyMeasure,
}

/// Settings for [`find_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootOptions {
    pub precision_bits: u32,
    pub max_sweeps: usize,
    /// Rotates the initial placement; part of the determinism contract.
    pub seed_offset: u64,
}

impl RootOptions {
    pub fn with_precision(precision_bits: u32) -> Self {
        RootOptions {
            precision_bits,
            ..Default::default()
        }
    }
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            precision_bits: 256,
            max_sweeps: 1000,
            seed_offset: 0,
        }
    }
}

/// `max(256, 4 n log2(n + 2))` bits, enough to carry the `n!` growth of `P_n`.
pub fn default_precision_bits(n: usize) -> u32 {
    let n = n as f64;
    (4.0 * n * (n + 2.0).log2()).ceil().max(256.0) as u32
}

/// Complete set of zeros of one polynomial, with multiplicity, sorted by
/// `(re, im)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<R = BigFloat> {
    pub roots: Vec<Complex<R>>,
    pub source_degree: usize,
    /// Every root satisfies `|p(a)| <= residual_bound * max|c_k| * max(1,|a|)^deg`.
    pub residual_bound: f64,
    pub precision_bits: u32,
    /// Sweeps used by the iteration (0 when no iteration was needed).
    pub sweeps: usize,
}

impl<R: Real> RootSet<R> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn to_c64(&self) -> Vec<Complex<f64>> {
        self.roots.iter().map(to_c64).collect()
    }
}

struct Rounded<R> {
    coeffs: Vec<Complex<R>>,
    dcoeffs: Vec<Complex<R>>,
    abs_coeffs: Vec<R>,
}

fn round_poly<R: Real>(poly: &ExactPolynomial, bits: u32) -> Rounded<R> {
    let coeffs: Vec<Complex<R>> = poly
        .coeffs()
        .iter()
        .map(|c| Complex::new(R::from_rational(&c.re, bits), R::from_rational(&c.im, bits)))
        .collect();
    let dcoeffs = poly
        .derivative()
        .coeffs()
        .iter()
        .map(|c| Complex::new(R::from_rational(&c.re, bits), R::from_rational(&c.im, bits)))
        .collect();
    let abs_coeffs = coeffs.iter().map(cabs).collect();
    Rounded {
        coeffs,
        dcoeffs,
        abs_coeffs,
    }
}

fn horner<R: Real>(coeffs: &[Complex<R>], z: &Complex<R>) -> Complex<R> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::zero(), |acc, c| acc * z.clone() + c.clone())
}

fn horner_real<R: Real>(coeffs: &[R], x: &R) -> R {
    coeffs
        .iter()
        .rev()
        .fold(R::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Initial approximations on circles whose radii come from the upper convex
/// hull of `(k, log|c_k|)`; each hull segment contributes as many points as
/// its width. The polynomial must have a nonzero constant term.
fn initial_guesses(poly: &ExactPolynomial, seed_offset: u64) -> Vec<Complex<f64>> {
    let pts: Vec<(usize, f64)> = poly
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| (k, log2_abs_gaussian(c)))
        .filter(|(_, l)| l.is_finite())
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly above segment a -> p
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let offset = 0.4 + seed_offset as f64 * 0.618_033_988_749_894_9;
    let mut guesses = Vec::with_capacity(poly.degree());
    for (seg, w) in hull.windows(2).enumerate() {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let count = k1 - k0;
        let radius = ((l0 - l1) / count as f64).exp2().clamp(1e-280, 1e280);
        let seg_offset = offset + 0.7 * seg as f64;
        for j in 0..count {
            let theta = 2.0 * PI * j as f64 / count as f64 + seg_offset;
            guesses.push(Complex::from_polar(radius, theta));
        }
    }
    guesses
}

/// Relative residual `log2(|p(a)| / (max|c_k| max(1,|a|)^deg))`.
fn log2_relative_residual<R: Real>(rounded: &Rounded<R>, max_log2_coeff: f64, a: &Complex<R>) -> f64 {
    let val = horner(&rounded.coeffs, a);
    let ns = val.norm_sqr();
    if ns.is_zero() {
        return f64::NEG_INFINITY;
    }
    let log2_abs = ns.ln().to_f64() / (2.0 * LN_2);
    let deg = rounded.coeffs.len() - 1;
    let mag = to_c64(a).norm();
    log2_abs - max_log2_coeff - deg as f64 * mag.log2().max(0.0)
}

/// Every zero of `poly` at `opts.precision_bits` of working precision.
pub fn find_roots(poly: &ExactPolynomial, opts: &RootOptions) -> Result<RootSet<BigFloat>, RootError> {
    if opts.precision_bits < MIN_PRECISION_BITS {
        return Err(RootError::PrecisionTooLow(opts.precision_bits));
    }
    find_roots_in::<BigFloat>(poly, opts)
}

/// [`find_roots`] in any [`Real`]; `f64` gives a fast low-precision variant.
pub fn find_roots_in<R: Real>(poly: &ExactPolynomial, opts: &RootOptions) -> Result<RootSet<R>, RootError> {
    if poly.is_constant() {
        return Err(RootError::ConstantPolynomial);
    }
    let bits = opts.precision_bits;
    let degree = poly.degree();

    // exact zeros at the origin
    let zero_mult = poly.coeffs().iter().take_while(|c| c.is_zero()).count();
    let deflated = ExactPolynomial::new(poly.coeffs()[zero_mult..].to_vec());
    let mut roots: Vec<Complex<R>> = vec![Complex::zero(); zero_mult];

    let mut sweeps = 0;
    if !deflated.is_constant() {
        let (found, used) = aberth::<R>(&deflated, opts)?;
        roots.extend(found);
        sweeps = used;
    }

    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });

    let rounded = round_poly::<R>(poly, bits + 64);
    let max_log2 = poly.coeffs().iter().map(log2_abs_gaussian).fold(f64::NEG_INFINITY, f64::max);
    let worst = roots
        .iter()
        .map(|a| log2_relative_residual(&rounded, max_log2, a))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(RootSet {
        roots,
        source_degree: degree,
        residual_bound: worst.exp2(),
        precision_bits: bits,
        sweeps,
    })
}

fn aberth<R: Real>(poly: &ExactPolynomial, opts: &RootOptions) -> Result<(Vec<Complex<R>>, usize), RootError> {
    let bits = opts.precision_bits;
    let deg = poly.degree();
    let rounded = round_poly::<R>(poly, bits);
    let mut z: Vec<Complex<R>> = initial_guesses(poly, opts.seed_offset)
        .into_iter()
        .map(|g| Complex::new(R::from_f64_prec(g.re, bits), R::from_f64_prec(g.im, bits)))
        .collect();
    let mut done = vec![false; deg];

    // stop once |p(z)| is at rounding level relative to sum |c_k| |z|^k
    // precision actually carried by R (53 for f64)
    let eff_bits = R::pow2(0, bits).precision_bits().min(bits);
    let eps_log2 = -(eff_bits as i64) + (8.0 * deg as f64).log2().ceil() as i64;
    let eps = R::pow2(eps_log2, bits);
    let eps2 = eps.clone() * eps;

    let mut sweeps = 0;
    while sweeps < opts.max_sweeps && done.iter().any(|d| !d) {
        sweeps += 1;
        let snapshot = &z;
        let updates: Vec<(Complex<R>, bool)> = (0..deg)
            .into_par_iter()
            .map(|i| {
                let zi = &snapshot[i];
                if done[i] {
                    return (zi.clone(), true);
                }
                let p = horner(&rounded.coeffs, zi);
                let s = horner_real(&rounded.abs_coeffs, &cabs(zi));
                if p.norm_sqr() <= eps2.clone() * s.clone() * s {
                    return (zi.clone(), true);
                }
                let dp = horner(&rounded.dcoeffs, zi);
                let mut sum: Complex<R> = Complex::zero();
                for (j, zj) in snapshot.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let d = zi.clone() - zj.clone();
                    let n = d.norm_sqr();
                    if n.is_zero() {
                        continue;
                    }
                    sum = sum + Complex::new(d.re / n.clone(), -d.im / n);
                }
                let denom = dp - p.clone() * sum;
                if denom.norm_sqr().is_zero() {
                    // nudge off a critical configuration
                    let nudge = Complex::new(R::pow2(-20, bits), R::pow2(-21, bits));
                    let one: Complex<R> = Complex::one();
                    return (zi.clone() + nudge * (one + zi.clone()), false);
                }
                (zi.clone() - p / denom, false)
            })
            .collect();
        for (i, (zi, converged)) in updates.into_iter().enumerate() {
            z[i] = zi;
            done[i] = converged;
        }
    }

    if done.iter().all(|d| *d) {
        return Ok((z, sweeps));
    }
    // sweep budget exhausted: accept only if everything is within the
    // fallback bound 2^(-bits/2)
    let max_log2 = poly.coeffs().iter().map(log2_abs_gaussian).fold(f64::NEG_INFINITY, f64::max);
    let worst = z
        .iter()
        .map(|a| log2_relative_residual(&rounded, max_log2, a))
        .fold(f64::NEG_INFINITY, f64::max);
    let bound_log2 = -(eff_bits as f64) / 2.0;
    if worst <= bound_log2 {
        Ok((z, sweeps))
    } else {
        Err(RootError::NonConvergence {
            sweeps,
            worst_log2_residual: worst,
            bound_log2,
        })
    }
}

/// Per-root entry of a [`CertificationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct RootCertificate {
    pub index: usize,
    /// `|p(a)|`
    pub residual: f64,
    /// `log2(|p(a)| / (max|c_k| max(1,|a|)^deg))`
    pub log2_relative_residual: f64,
    /// Distance to the nearest other root.
    pub separation: f64,
    pub residual_flag: bool,
    pub cluster_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub entries: Vec<RootCertificate>,
    /// Relative residuals above `2^residual_threshold_log2` are flagged.
    pub residual_threshold_log2: f64,
    /// Pairs closer than this (scaled by `max(1,|a|)`) are flagged as clusters.
    pub cluster_threshold: f64,
    pub max_residual: f64,
    pub min_separation: f64,
}

impl CertificationReport {
    pub fn flagged(&self) -> impl Iterator<Item = &RootCertificate> {
        self.entries.iter().filter(|e| e.residual_flag || e.cluster_flag)
    }

    pub fn is_clean(&self) -> bool {
        self.flagged().next().is_none()
    }
}

/// Residuals and separations of a root set against its polynomial.
pub fn certify_roots<R: Real>(poly: &ExactPolynomial, roots: &RootSet<R>) -> CertificationReport {
    let bits = roots.precision_bits;
    let eval_bits = bits + 64;
    let rounded = round_poly::<R>(poly, eval_bits);
    let max_log2 = poly.coeffs().iter().map(log2_abs_gaussian).fold(f64::NEG_INFINITY, f64::max);
    let approx = roots.to_c64();
    let residual_threshold_log2 = -(bits as f64) / 2.0;
    let cluster_threshold = (-(bits as f64) / 4.0).exp2();

    let entries: Vec<RootCertificate> = roots
        .roots
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let val = horner(&rounded.coeffs, a);
            let residual = cabs(&val).to_f64();
            let rel = log2_relative_residual(&rounded, max_log2, a);
            let separation = approx
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| (approx[i] - b).norm())
                .fold(f64::INFINITY, f64::min);
            RootCertificate {
                index: i,
                residual,
                log2_relative_residual: rel,
                separation,
                residual_flag: rel > residual_threshold_log2,
                cluster_flag: separation < cluster_threshold * approx[i].norm().max(1.0),
            }
        })
        .collect();
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    let min_separation = entries.iter().map(|e| e.separation).fold(f64::INFINITY, f64::min);
    CertificationReport {
        entries,
        residual_threshold_log2,
        cluster_threshold,
        max_residual,
        min_separation,
    }
}

/// Point mass of a zero-counting measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub location: BigComplex,
    /// `location` rounded to `f64`, used by the potentials.
    pub approx: Complex<f64>,
    pub weight: f64,
}

/// Zero-counting measure `mu_n` of `P_n`: mass `1/m_n` at each zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<Atom>,
    pub n: usize,
    pub m_n: usize,
}

impl EmpiricalMeasure {
    /// Uniform measure on arbitrary points (synthetic measures in tests and
    /// diagnostics).
    pub fn from_points(points: &[Complex<f64>], n: usize) -> Result<Self, RootError> {
        if points.is_empty() {
            return Err(RootError::EmptyMeasure);
        }
        let w = 1.0 / points.len() as f64;
        let atoms = points
            .iter()
            .map(|p| Atom {
                location: Complex::new(BigFloat::from_f64(p.re, 64), BigFloat::from_f64(p.im, 64)),
                approx: *p,
                weight: w,
            })
            .collect();
        Ok(EmpiricalMeasure {
            atoms,
            n,
            m_n: points.len(),
        })
    }

    pub fn locations(&self) -> Vec<Complex<f64>> {
        self.atoms.iter().map(|a| a.approx).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Zero-counting measure of the polynomial whose roots are given.
pub fn empirical_measure<R: Real>(roots: &RootSet<R>, n: usize) -> Result<EmpiricalMeasure, RootError> {
    if roots.is_empty() {
        return Err(RootError::EmptyMeasure);
    }
    let m_n = roots.len();
    let w = 1.0 / m_n as f64;
    let atoms = roots
        .roots
        .iter()
        .map(|r| Atom {
            location: Complex::new(r.re.to_bigfloat(), r.im.to_bigfloat()),
            approx: to_c64(r),
            weight: w,
        })
        .collect();
    Ok(EmpiricalMeasure { atoms, n, m_n })
}

/// Writes `n,index,re,im,residual` rows (no header) for one root set.
pub fn write_zeros_rows<W: Write, R: Real>(
    out: &mut W,
    n: usize,
    roots: &RootSet<R>,
    report: &CertificationReport,
) -> io::Result<()> {
    let digits = ((roots.precision_bits as f64) * std::f64::consts::LOG10_2).ceil() as usize;
    for (k, (r, cert)) in roots.roots.iter().zip(&report.entries).enumerate() {
        writeln!(
            out,
            "{},{},{},{},{:.6e}",
            n,
            k,
            r.re.to_decimal_string(digits),
            r.im.to_decimal_string(digits),
            cert.residual
        )?;
    }
    Ok(())
}

pub const ZEROS_CSV_HEADER: &str = "n,index,re,im,residual";
