mod common;

use common::*;
use num_complex::Complex;
use num_traits::{One, Zero};
use shire::gauss_poly::{gaussian, generate_sequence, ExactPolynomial, SequenceLimits};
use shire::rootfind::{certify_roots, empirical_measure, find_roots, find_roots_in, RootError, RootOptions, RootSet};
use shire::scalar::Real;
use shire::{BigComplex, BigFloat};

fn p_n(inst: &shire::ProblemInstance, n: usize) -> ExactPolynomial {
    generate_sequence(inst, n, SequenceLimits::default()).unwrap().entry(n).unwrap().poly.clone()
}

fn to_big(g: &shire::GaussianRational, bits: u32) -> BigComplex {
    Complex::new(BigFloat::from_rational(&g.re, bits), BigFloat::from_rational(&g.im, bits))
}

/// `max |P(z) - A prod (z - r)| / |P(z)|` over the sample points, as log2.
fn reconstruction_log2(p: &ExactPolynomial, roots: &RootSet, points: &[shire::GaussianRational]) -> f64 {
    let bits = roots.precision_bits;
    let lead = to_big(&p.leading(), bits);
    points
        .iter()
        .map(|z| {
            let exact = to_big(&p.eval(z), bits);
            let zb = to_big(z, bits);
            let recon = roots.roots.iter().fold(lead.clone(), |acc, r| acc * (zb.clone() - r.clone()));
            let diff = exact.clone() - recon;
            let num = (diff.re.clone() * diff.re + diff.im.clone() * diff.im).sqrt().ln().to_f64();
            let den = (exact.re.clone() * exact.re + exact.im.clone() * exact.im).sqrt().ln().to_f64();
            (num - den) / std::f64::consts::LN_2
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn sample_points() -> Vec<shire::GaussianRational> {
    (0..20).map(|k| gaussian(k - 10, 3, 7 - (k * 5) % 13, 4)).collect()
}

#[test]
fn roots_reconstruct_the_polynomial() {
    for (inst, n) in [(two_poles(), 12), (sweep_instances()[1].clone(), 6), (sweep_instances()[3].clone(), 8)] {
        let p = p_n(&inst, n);
        let roots = find_roots(&p, &RootOptions::with_precision(256)).unwrap();
        assert_eq!(roots.len(), p.degree());
        let err = reconstruction_log2(&p, &roots, &sample_points());
        assert!(err <= -128.0, "log2 relative reconstruction error {err}");
        assert!(certify_roots(&p, &roots).is_clean());
    }
}

#[test]
fn real_polynomials_have_conjugate_symmetric_zeros() {
    let p = p_n(&two_poles(), 15);
    let z = find_roots(&p, &RootOptions::with_precision(256)).unwrap().to_c64();
    for r in &z {
        let d = z.iter().map(|s| (s - r.conj()).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-30_f64.max(1e-14 * r.norm()), "{r} has no conjugate partner ({d})");
    }
}

#[test]
fn repeated_runs_are_identical() {
    let p = p_n(&five_poles(), 4);
    let opts = RootOptions::with_precision(192);
    let a = find_roots(&p, &opts).unwrap();
    let b = find_roots(&p, &opts).unwrap();
    assert_eq!(a, b);
    let moved = find_roots(&p, &RootOptions { seed_offset: 3, ..opts }).unwrap();
    assert_eq!(moved.len(), a.len());
}

#[test]
fn five_pole_low_order_counts() {
    for n in 1..=5 {
        let p = p_n(&five_poles(), n);
        let roots = find_roots(&p, &RootOptions::with_precision(256)).unwrap();
        assert_eq!(roots.len(), 5 * n);
        let m = empirical_measure(&roots, n).unwrap();
        assert!((m.total_weight() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_roots_are_exact() {
    let p = poly(&["0", "0", "2", "-3", "1"]);
    let roots = find_roots(&p, &RootOptions::default()).unwrap();
    let zeros = roots.roots.iter().filter(|r| r.re.is_zero() && r.im.is_zero()).count();
    assert_eq!(zeros, 2);
    let mut rest: Vec<f64> = roots.to_c64().iter().map(|r| r.re).filter(|x| *x > 0.5).collect();
    rest.sort_by(f64::total_cmp);
    assert!((rest[0] - 1.0).abs() < 1e-60 && (rest[1] - 2.0).abs() < 1e-60);
}

#[test]
fn double_precision_backend() {
    let p = poly(&["-6", "11", "-6", "1"]);
    let roots: RootSet<f64> = find_roots_in(&p, &RootOptions::with_precision(53)).unwrap();
    let mut re: Vec<f64> = roots.roots.iter().map(|r| r.re).collect();
    re.sort_by(f64::total_cmp);
    for (got, want) in re.iter().zip([1.0, 2.0, 3.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(f64::one().precision_bits() == 53);
}

#[test]
fn invalid_requests() {
    assert!(matches!(find_roots(&poly(&["5"]), &RootOptions::default()), Err(RootError::ConstantPolynomial)));
    assert!(matches!(
        find_roots(&poly(&["1", "1"]), &RootOptions::with_precision(32)),
        Err(RootError::PrecisionTooLow(32))
    ));
    assert!(matches!(shire::EmpiricalMeasure::from_points(&[], 1), Err(RootError::EmptyMeasure)));
}
