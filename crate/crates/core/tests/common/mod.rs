#![allow(dead_code)]

use num_complex::Complex;
use shire::gauss_poly::{parse_poly, ExactPolynomial, ProblemInstance};

pub fn poly(s: &[&str]) -> ExactPolynomial {
    parse_poly(s).unwrap()
}

pub fn instance(p: &[&str], q: &[&str], t: &[&str]) -> ProblemInstance {
    ProblemInstance::new(poly(p), poly(q), poly(t)).unwrap()
}

/// `f = e^z / (z(z - 1))`
pub fn two_poles() -> ProblemInstance {
    instance(&["1"], &["0", "-1", "1"], &["0", "1"])
}

/// `Q = z(z+2)(z-4-3i)(z-3+5i)(z+3+9i)`, `T = z + 1`, `P = 1`
pub fn five_poles() -> ProblemInstance {
    instance(
        &["1"],
        &["0", "360+420i", "156+74i", "-20-46i", "-2+11i", "1"],
        &["1", "1"],
    )
}

/// Five instances spanning `p in {0, 2}`, `q in {2, 3, 5}`, `t in {1, 2, 3}`.
pub fn sweep_instances() -> Vec<ProblemInstance> {
    vec![
        two_poles(),
        instance(&["3", "i", "1"], &["-2", "0", "0", "1"], &["0", "-1", "2"]),
        instance(&["1"], &["-1", "0", "0", "0", "0", "1"], &["0", "0", "0", "1"]),
        instance(&["-3/2", "0", "1"], &["0", "-i", "-1+i", "1"], &["i", "1/2"]),
        instance(&["2+i"], &["1", "0", "1"], &["0", "-1", "0", "1"]),
    ]
}

pub fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

/// Composite 5-point Gauss–Legendre rule on `[a, b]` with `panels` panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    sum * 0.5 * h
}
