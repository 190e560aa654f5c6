//! Limit potential `Psi`, empirical shifted potentials, the skeleton measure
//! `mu_S` and diagnostics comparing them.
//!
//! With `K = q + t - 1`,
//!
//! ```text
//! Psi(z) = ( max_i log 1/|z - z_i| + log|Q(z)| - log(|c_q| |d_t| t) ) / K
//!        = ( sum_{k != nearest} log|z - z_k| - log(|d_t| t) ) / K
//! ```
//!
//! and `mu_S = (1/2pi) Lap Psi` lives on the Voronoi skeleton of the `z_i`.
//! On an edge written as `zeta(s) = m + s w` (see [`crate::voronoi`]) its
//! density is `ds / (pi K (1 + s^2))`.

use std::io::{self, Write};

use num_complex::Complex;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::gauss_poly::ProblemInstance;
use crate::quad::{self, QuadError};
use crate::rootfind::EmpiricalMeasure;
use crate::scalar::{log2_abs_gaussian, rational_to_f64, Scalar};
use crate::voronoi::{Diagram, Edge};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("evaluation point is within {distance:e} of a zero")]
    AtomHit { distance: f64 },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(#[from] QuadError),
    #[error("ray tail of L(z) cannot be bounded below {0:e}")]
    TailBound(f64),
    #[error("instance is not normalized: {0}")]
    NormalizationViolated(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Data fixing `Psi`, `D` and `mu_S` for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSpec<T> {
    /// Zeros `z_i` of `Q`.
    pub zeros: Vec<Complex<T>>,
    /// Coefficients of `Q`, ascending.
    pub q_coeffs: Vec<Complex<T>>,
    pub q: usize,
    pub t: usize,
    pub p: usize,
    /// `log |c_q|`
    pub log_cq: T,
    /// `log(|d_t| t)`
    pub log_dt_t: T,
}

impl<T: Scalar> LimitSpec<T> {
    pub fn from_instance(inst: &ProblemInstance) -> Self {
        let conv = |c: &Complex<num_rational::BigRational>| {
            Complex::new(T::lit(rational_to_f64(&c.re)), T::lit(rational_to_f64(&c.im)))
        };
        let ln2 = std::f64::consts::LN_2;
        LimitSpec {
            zeros: inst
                .q_zeros_c64()
                .iter()
                .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
                .collect(),
            q_coeffs: inst.q().coeffs().iter().map(conv).collect(),
            q: inst.q_degree(),
            t: inst.t_degree(),
            p: inst.p_degree(),
            log_cq: T::lit(log2_abs_gaussian(&inst.c_q()) * ln2),
            log_dt_t: T::lit(log2_abs_gaussian(&inst.d_t()) * ln2 + (inst.t_degree() as f64).ln()),
        }
    }

    /// `K = q + t - 1`
    pub fn k(&self) -> T {
        T::from_usize(self.q + self.t - 1).unwrap()
    }

    /// `D = log(|d_t| t) / K`
    pub fn d(&self) -> T {
        self.log_dt_t / self.k()
    }

    /// `(q - 1) / K`, the mass of `mu_S`.
    pub fn mass(&self) -> T {
        T::from_usize(self.q - 1).unwrap() / self.k()
    }
}

fn nearest<T: Scalar>(z: Complex<T>, zeros: &[Complex<T>]) -> usize {
    let mut best = 0;
    let mut bd = T::infinity();
    for (k, s) in zeros.iter().enumerate() {
        let d = (z - s).norm_sqr();
        if d < bd {
            bd = d;
            best = k;
        }
    }
    best
}

/// `Psi(z)` in factored form; finite everywhere including the poles.
pub fn psi<T: Scalar>(z: Complex<T>, spec: &LimitSpec<T>) -> T {
    let i = nearest(z, &spec.zeros);
    let sum = spec
        .zeros
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .fold(T::zero(), |acc, (_, zk)| acc + (z - zk).norm().ln());
    (sum - spec.log_dt_t) / spec.k()
}

/// `Psi(z)` straight from the defining expression with `Q` evaluated from its
/// coefficients; infinite at the poles.
pub fn psi_direct<T: Scalar>(z: Complex<T>, spec: &LimitSpec<T>) -> T {
    let qz = spec
        .q_coeffs
        .iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * z + c);
    let max_term = spec
        .zeros
        .iter()
        .map(|zi| -(z - zi).norm().ln())
        .fold(T::neg_infinity(), T::max);
    (max_term + qz.norm().ln() - spec.log_cq - spec.log_dt_t) / spec.k()
}

/// `(1/m_n) (sum_k log|z - a_k| - log n!)`
pub fn shifted_empirical_potential<T: Scalar>(
    z: Complex<T>,
    measure: &EmpiricalMeasure,
    n: usize,
) -> Result<T, PotentialError> {
    let scale = T::lit(1e-14) * z.norm().max(T::one());
    let mut sum = T::zero();
    for a in &measure.atoms {
        let d = (z - Complex::new(T::lit(a.approx.re), T::lit(a.approx.im))).norm();
        if d < scale {
            return Err(PotentialError::AtomHit {
                distance: d.to_f64().unwrap_or(0.0),
            });
        }
        sum = sum + d.ln();
    }
    let ln_fact = T::lit(ln_gamma(n as f64 + 1.0));
    Ok((sum - ln_fact) / T::from_usize(measure.m_n).unwrap())
}

/// Density of `d^2 Psi / dz dz-bar` per unit length at `zeta` on `edge`:
/// `|z_i - z_j| / (4 K |(zeta - z_i)(zeta - z_j)|)`.
pub fn edge_density<T: Scalar>(zeta: Complex<T>, edge: &Edge<T>, spec: &LimitSpec<T>) -> T {
    let zi = spec.zeros[edge.sites.0];
    let zj = spec.zeros[edge.sites.1];
    (zi - zj).norm() / (T::lit(4.0) * spec.k() * ((zeta - zi) * (zeta - zj)).norm())
}

/// `mu_S` mass of the edge piece with parameters in `[s_a, s_b]`.
pub fn edge_mass<T: Scalar>(s_a: T, s_b: T, spec: &LimitSpec<T>) -> T {
    if s_b <= s_a {
        return T::zero();
    }
    (s_b.atan() - s_a.atan()) / (T::PI() * spec.k())
}

/// Sum of the edge masses over the whole skeleton.
pub fn total_mass<T: Scalar>(diagram: &Diagram<T>, spec: &LimitSpec<T>) -> T {
    diagram
        .edges
        .iter()
        .fold(T::zero(), |acc, e| acc + edge_mass(e.s_a, e.s_b, spec))
}

// int_0^phi log(K/x) dx
fn log_tail_bound(k: f64, phi: f64) -> f64 {
    phi * (k.ln() - phi.ln() + 1.0)
}

/// `L(z) = int log|z - zeta| d mu_S(zeta)` by adaptive quadrature in the
/// angle `theta = atan s` along each edge. Ray ends are cut at an angle whose
/// analytic tail bound is below the tolerance.
pub fn mu_s_log_potential<T: Scalar>(
    z: Complex<T>,
    diagram: &Diagram<T>,
    spec: &LimitSpec<T>,
    quad_tol: T,
) -> Result<T, PotentialError> {
    let half_pi = T::FRAC_PI_2();
    let norm = T::PI() * spec.k();
    let n_edges = T::from_usize(diagram.edges.len().max(1)).unwrap();
    // budget per edge, in units of the raw theta-integral
    let per_edge = quad_tol * norm / n_edges;
    let mut total = T::zero();
    for e in &diagram.edges {
        let w = e.half_normal;
        let wn = w.norm();
        let k0 = (z - e.midpoint).norm();
        let mut lo = if e.s_a.is_finite() { e.s_a.atan() } else { -half_pi };
        let mut hi = if e.s_b.is_finite() { e.s_b.atan() } else { half_pi };
        let open_ends = (!e.s_a.is_finite()) as usize + (!e.s_b.is_finite()) as usize;
        if open_ends > 0 {
            let tail_tol = (per_edge * T::lit(0.25)).to_f64().unwrap();
            let k = (k0 + wn).to_f64().unwrap();
            let wf = wn.to_f64().unwrap();
            // keeps |z - zeta| >= 1 on the tail, so the log there is positive
            let mut phi = 0.5f64.min(wf / (k0.to_f64().unwrap() + 2.0)).min(1.0 / (wf + 1.0));
            while log_tail_bound(k, phi) > tail_tol {
                phi *= 0.5;
                if phi < 1e-300 {
                    return Err(PotentialError::TailBound(tail_tol));
                }
            }
            if !e.s_a.is_finite() {
                lo = -half_pi + T::lit(phi);
            }
            if !e.s_b.is_finite() {
                hi = half_pi - T::lit(phi);
            }
        }
        let f = |theta: T| (z - e.midpoint - w * theta.tan()).norm().ln();
        let r = quad::integrate(f, lo, hi, per_edge * T::lit(0.5), 4000)?;
        total = total + r.value;
    }
    Ok(total / norm)
}

/// Rectangular lattice `x0 + i h, y0 + j h`, `0 <= i < nx`, `0 <= j < ny`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    pub x0: T,
    pub y0: T,
    pub h: T,
    pub nx: usize,
    pub ny: usize,
}

impl<T: Scalar> Grid<T> {
    /// Lattice covering `[x_min, x_max] x [y_min, y_max]` with spacing `h`.
    pub fn covering(x_min: T, x_max: T, y_min: T, y_max: T, h: T) -> Result<Self, PotentialError> {
        if !(h > T::zero()) || !(x_max >= x_min) || !(y_max >= y_min) {
            return Err(PotentialError::InvalidGrid(format!(
                "h = {h:?}, x in [{x_min:?}, {x_max:?}], y in [{y_min:?}, {y_max:?}]"
            )));
        }
        let steps = |lo: T, hi: T| ((hi - lo) / h + T::lit(1e-9)).floor().to_usize().unwrap() + 1;
        Ok(Grid {
            x0: x_min,
            y0: y_min,
            h,
            nx: steps(x_min, x_max),
            ny: steps(y_min, y_max),
        })
    }

    pub fn point(&self, i: usize, j: usize) -> Complex<T> {
        Complex::new(
            self.x0 + T::from_usize(i).unwrap() * self.h,
            self.y0 + T::from_usize(j).unwrap() * self.h,
        )
    }

    pub fn points(&self) -> Vec<Complex<T>> {
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| (i, j)))
            .map(|(i, j)| self.point(i, j))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    ClosedFormPsi,
    EmpiricalShifted,
    QuadratureL,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::ClosedFormPsi => "closed_form_psi",
            FieldKind::EmpiricalShifted => "empirical_shifted",
            FieldKind::QuadratureL => "quadrature_L",
        }
    }
}

/// Samples of one potential; points where it is undefined are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField<T> {
    pub kind: FieldKind,
    pub samples: Vec<(Complex<T>, T)>,
}

impl<T: Scalar> PotentialField<T> {
    pub fn psi(grid: &Grid<T>, spec: &LimitSpec<T>) -> Self {
        let samples = grid.points().into_par_iter().map(|z| (z, psi(z, spec))).collect();
        PotentialField {
            kind: FieldKind::ClosedFormPsi,
            samples,
        }
    }

    pub fn empirical(grid: &Grid<T>, measure: &EmpiricalMeasure, n: usize) -> Self {
        let samples = grid
            .points()
            .into_par_iter()
            .filter_map(|z| shifted_empirical_potential(z, measure, n).ok().map(|v| (z, v)))
            .collect();
        PotentialField {
            kind: FieldKind::EmpiricalShifted,
            samples,
        }
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "re,im,value,kind")?;
        for (z, v) in &self.samples {
            writeln!(
                out,
                "{},{},{},{}",
                z.re.to_f64().unwrap(),
                z.im.to_f64().unwrap(),
                v.to_f64().unwrap(),
                self.kind.as_str()
            )?;
        }
        Ok(())
    }
}

/// Midpoint-rule estimate of `int_{D_rho(center)} |L~_n - Psi|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Discrepancy {
    pub value: f64,
    /// Area of the cells skipped next to atoms and poles.
    pub skipped_area: f64,
    pub cells: usize,
    pub skipped_cells: usize,
}

pub fn l1_discrepancy<T: Scalar>(
    measure: &EmpiricalMeasure,
    spec: &LimitSpec<T>,
    center: Complex<T>,
    rho: T,
    grid_h: T,
    eps: T,
) -> Result<L1Discrepancy, PotentialError> {
    if !(grid_h > T::zero()) || !(rho > T::zero()) {
        return Err(PotentialError::InvalidGrid(format!("h = {grid_h:?}, rho = {rho:?}")));
    }
    let excl = eps.max(T::lit(2.0) * grid_h);
    let half = grid_h * T::lit(0.5);
    let steps = (T::lit(2.0) * rho / grid_h).ceil().to_usize().unwrap();
    let origin = center - Complex::new(rho, rho);
    let atoms: Vec<Complex<T>> = measure
        .atoms
        .iter()
        .map(|a| Complex::new(T::lit(a.approx.re), T::lit(a.approx.im)))
        .collect();
    let area = grid_h * grid_h;
    let cells: Vec<(T, bool)> = (0..steps * steps)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = (idx % steps, idx / steps);
            let z = origin
                + Complex::new(
                    T::from_usize(i).unwrap() * grid_h + half,
                    T::from_usize(j).unwrap() * grid_h + half,
                );
            if (z - center).norm() > rho {
                return None;
            }
            let near = atoms.iter().chain(&spec.zeros).any(|a| (z - a).norm() < excl);
            if near {
                return Some((T::zero(), true));
            }
            let lt = shifted_empirical_potential(z, measure, measure.n).ok()?;
            Some(((lt - psi(z, spec)).abs() * area, false))
        })
        .collect();
    let skipped_cells = cells.iter().filter(|c| c.1).count();
    let value = cells.iter().fold(T::zero(), |acc, c| acc + c.0);
    Ok(L1Discrepancy {
        value: value.to_f64().unwrap(),
        skipped_area: skipped_cells as f64 * area.to_f64().unwrap(),
        cells: cells.len(),
        skipped_cells,
    })
}

/// Five-point-stencil statistics of `Psi` over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicityReport {
    /// `max |Lap_h Psi|` over interior points.
    pub max_abs_laplacian: f64,
    /// Smallest undivided second difference `sum(neighbours) - 4 Psi`.
    pub min_second_difference: f64,
    /// `sum Lap_h Psi h^2 / 2pi`, the stencil's estimate of `mu_S` of the region.
    pub stencil_mass: f64,
    pub points: usize,
}

/// Applies the five-point Laplacian of `Psi` at every interior point of `grid`.
pub fn harmonicity_check<T: Scalar>(spec: &LimitSpec<T>, grid: &Grid<T>) -> HarmonicityReport {
    harmonicity_check_with(|z| psi(z, spec), grid)
}

/// [`harmonicity_check`] for an arbitrary field.
pub fn harmonicity_check_with<T: Scalar, F: Fn(Complex<T>) -> T + Sync>(
    f: F,
    grid: &Grid<T>,
) -> HarmonicityReport {
    let h = grid.h;
    let (nx, ny) = (grid.nx, grid.ny);
    let vals: Vec<T> = grid.points().into_par_iter().map(&f).collect();
    let at = |i: usize, j: usize| vals[j * nx + i];
    let mut max_abs = T::zero();
    let mut min_diff = T::infinity();
    let mut sum = T::zero();
    let mut points = 0;
    for j in 1..ny.saturating_sub(1) {
        for i in 1..nx.saturating_sub(1) {
            let d = at(i + 1, j) + at(i - 1, j) + at(i, j + 1) + at(i, j - 1) - T::lit(4.0) * at(i, j);
            max_abs = max_abs.max((d / (h * h)).abs());
            min_diff = min_diff.min(d);
            sum = sum + d;
            points += 1;
        }
    }
    HarmonicityReport {
        max_abs_laplacian: max_abs.to_f64().unwrap(),
        min_second_difference: min_diff.to_f64().unwrap(),
        stencil_mass: (sum / (T::lit(2.0) * T::PI())).to_f64().unwrap(),
        points,
    }
}

/// `b_n` values and their limit.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthSeries {
    pub rows: Vec<(usize, f64)>,
    /// `(log|Q'(0)| - log(|c_q| |d_t| t)) / K`
    pub target: f64,
    /// Min and max of `b_n` over the second half of the `n` range.
    pub tail_min: f64,
    pub tail_max: f64,
}

/// Checks that exactly one pole lies in the closed disk of radius 2 and that
/// it is the origin (with `Q(0) = 0` exactly).
pub fn check_normalized(inst: &ProblemInstance) -> Result<(), PotentialError> {
    if !inst.has_pole_at_origin() {
        return Err(PotentialError::NormalizationViolated("Q(0) != 0".into()));
    }
    let inside = inst.q_zeros_c64().iter().filter(|z| z.norm() <= 2.0).count();
    if inside != 1 {
        return Err(PotentialError::NormalizationViolated(format!(
            "{inside} poles in the closed disk of radius 2, expected exactly 1"
        )));
    }
    Ok(())
}

/// `b_n = (1/m_n)(sum_{|a| >= rho} log|a| - log n!)` for each measure.
pub fn growth_bound_series(
    inst: &ProblemInstance,
    measures: &[EmpiricalMeasure],
    rho: f64,
) -> Result<GrowthSeries, PotentialError> {
    check_normalized(inst)?;
    let rows: Vec<(usize, f64)> = measures
        .iter()
        .map(|m| {
            let s: f64 = m
                .atoms
                .iter()
                .map(|a| a.approx.norm())
                .filter(|&r| r >= rho)
                .map(f64::ln)
                .sum();
            (m.n, (s - ln_gamma(m.n as f64 + 1.0)) / m.m_n as f64)
        })
        .collect();
    let ln2 = std::f64::consts::LN_2;
    let k = (inst.q_degree() + inst.t_degree() - 1) as f64;
    let qp0 = log2_abs_gaussian(&inst.q_prime().coeff(0)) * ln2;
    let lead = (log2_abs_gaussian(&inst.c_q()) + log2_abs_gaussian(&inst.d_t())) * ln2
        + (inst.t_degree() as f64).ln();
    let tail = &rows[rows.len() / 2..];
    Ok(GrowthSeries {
        target: (qp0 - lead) / k,
        tail_min: tail.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        tail_max: tail.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_poly::parse_poly;
    use crate::voronoi::build_voronoi;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn two_poles() -> LimitSpec<f64> {
        let inst = ProblemInstance::new(
            parse_poly(&["1"]).unwrap(),
            parse_poly(&["0", "-1", "1"]).unwrap(),
            parse_poly(&["0", "1"]).unwrap(),
        )
        .unwrap();
        LimitSpec::from_instance(&inst)
    }

    #[test]
    fn psi_values() {
        let s = two_poles();
        let ln2 = std::f64::consts::LN_2;
        assert!((psi(c(2.0, 0.0), &s) - ln2 / 2.0).abs() < 1e-15);
        assert!((psi(c(0.5, 0.0), &s) + ln2 / 2.0).abs() < 1e-15);
        assert!((psi_direct(c(2.0, 0.0), &s) - ln2 / 2.0).abs() < 1e-15);
        assert!(psi(c(0.0, 0.0), &s).is_finite());
        let far = c(0.0, 1e6);
        assert!((psi(far, &s) - s.mass() * far.norm().ln()).abs() < 1e-5);
    }

    #[test]
    fn shifted_potential_examples() {
        let m = EmpiricalMeasure::from_points(&[c(0.0, 0.0)], 1).unwrap();
        let v: f64 = shifted_empirical_potential(c(std::f64::consts::E, 0.0), &m, 1).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert!(matches!(
            shifted_empirical_potential(c(0.0, 0.0), &m, 1),
            Err(PotentialError::AtomHit { .. })
        ));
    }

    #[test]
    fn density_and_mass() {
        let s = two_poles();
        let d = build_voronoi(&s.zeros).unwrap();
        let e = d.edges[0];
        assert!((edge_density(c(0.5, 0.0), &e, &s) - 0.5).abs() < 1e-15);
        assert!((edge_density(c(0.5, 0.5), &e, &s) - 0.25).abs() < 1e-15);
        assert_eq!(edge_mass(1.0, 1.0, &s), 0.0);
        assert!((edge_mass(0.0, f64::INFINITY, &s) - 0.25).abs() < 1e-15);
        assert!((total_mass(&d, &s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_potential_matches_psi() {
        let s = two_poles();
        let d = build_voronoi(&s.zeros).unwrap();
        for z in [c(2.0, 0.0), c(-1.0, 0.7), c(0.2, -3.0)] {
            let l = mu_s_log_potential(z, &d, &s, 1e-10).unwrap();
            assert!((psi(z, &s) - (l - s.d())).abs() < 1e-8, "{z}");
        }
    }

    #[test]
    fn stencil_ignores_constants() {
        let s = two_poles();
        let g = Grid::covering(-1.0, -0.5, 0.2, 0.6, 0.05).unwrap();
        let a = harmonicity_check(&s, &g);
        let b = harmonicity_check_with(|z| psi(z, &s) + 3.0, &g);
        assert!((a.max_abs_laplacian - b.max_abs_laplacian).abs() < 1e-9);
    }

    #[test]
    fn identical_fields_have_zero_discrepancy() {
        // one pole far away: Psi = log|z - 100| - log 1 with K = 1 matches a single atom
        let spec = LimitSpec {
            zeros: vec![c(1000.0, 0.0), c(100.0, 0.0)],
            q_coeffs: vec![],
            q: 2,
            t: 0,
            p: 0,
            log_cq: 0.0,
            log_dt_t: 0.0,
        };
        let m = EmpiricalMeasure::from_points(&[c(1000.0, 0.0)], 0).unwrap();
        let r = l1_discrepancy(&m, &spec, c(0.0, 0.0), 3.0, 0.1, 0.1).unwrap();
        assert!(r.value < 1e-12, "{r:?}");
        assert!(r.cells > 2000);
    }
}
