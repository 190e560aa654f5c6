//! Config-driven pipeline: recursion, roots, diagram, potentials, artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss_poly::{
    closed_form_leading_coeff, closed_form_value_at_zero, format_poly, generate_sequence, parse_poly,
    ProblemInstance, SequenceLimits,
};
use crate::potential::{
    growth_bound_series, l1_discrepancy, mu_s_log_potential, psi, shifted_empirical_potential,
    total_mass, Grid, LimitSpec, PotentialField,
};
use crate::rootfind::{
    certify_roots, default_precision_bits, empirical_measure, find_roots, write_zeros_rows,
    CertificationReport, EmpiricalMeasure, RootOptions, RootSet, ZEROS_CSV_HEADER,
};
use crate::svg;
use crate::voronoi::{build_voronoi, Diagram, Location};
use crate::Error;

/// Names accepted by `skip`.
pub const DIAGNOSTICS: &[&str] = &[
    "zeros",
    "psi_grid",
    "empirical_grids",
    "svg",
    "skeleton_fraction",
    "l1",
    "potential_identity",
    "far_field",
    "growth",
    "convergence",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Read(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disk {
    pub center: [f64; 2],
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Coefficients of `P`, `Q`, `T`, ascending, as Gaussian-rational strings.
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub t: Vec<String>,
    pub n_list: Vec<usize>,
    /// Working precision for every `n`; per-`n` default when absent.
    pub precision_bits: Option<u32>,
    #[serde(default)]
    pub seed_offset: u64,
    #[serde(default = "default_grid_h")]
    pub grid_h: f64,
    pub disk: Disk,
    pub eps_list: Vec<f64>,
    #[serde(default = "default_growth_rho")]
    pub growth_rho: f64,
    #[serde(default = "default_quad_tol")]
    pub quad_tol: f64,
    /// Number of probe points for the `Psi = L - D` check.
    #[serde(default = "default_probes")]
    pub identity_points: usize,
    #[serde(default)]
    pub skip: Vec<String>,
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_max_coeff_bits")]
    pub max_coeff_bits: u64,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_grid_h() -> f64 {
    0.05
}
fn default_growth_rho() -> f64 {
    1.0
}
fn default_quad_tol() -> f64 {
    1e-9
}
fn default_probes() -> usize {
    50
}
fn default_max_coeff_bits() -> u64 {
    SequenceLimits::default().max_coeff_bits
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return invalid("n_list is empty");
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("n_list must be strictly ascending, got {:?}", self.n_list));
        }
        if self.n_list[0] == 0 {
            return invalid("n_list entries must be >= 1");
        }
        if !(self.grid_h > 0.0 && self.grid_h.is_finite()) {
            return invalid(format!("grid_h must be > 0, got {}", self.grid_h));
        }
        if !(self.disk.rho > 0.0 && self.disk.rho.is_finite()) {
            return invalid(format!("disk.rho must be > 0, got {}", self.disk.rho));
        }
        if let Some(e) = self.eps_list.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return invalid(format!("eps values must be > 0, got {e}"));
        }
        if !(self.growth_rho > 0.0) || !(self.quad_tol > 0.0) {
            return invalid("growth_rho and quad_tol must be > 0");
        }
        if let Some(s) = self.skip.iter().find(|s| !DIAGNOSTICS.contains(&s.as_str())) {
            return invalid(format!("unknown diagnostic '{s}'; known: {}", DIAGNOSTICS.join(", ")));
        }
        Ok(())
    }

    pub fn enabled(&self, diagnostic: &str) -> bool {
        !self.skip.iter().any(|s| s == diagnostic)
    }

    pub fn instance(&self) -> Result<ProblemInstance, Error> {
        let bits = self.precision_bits.unwrap_or(256);
        Ok(ProblemInstance::with_precision(
            parse_poly(&self.p)?,
            parse_poly(&self.q)?,
            parse_poly(&self.t)?,
            bits,
        )?)
    }
}

/// Roots and measure of one `P_n`.
#[derive(Debug, Clone)]
pub struct NData {
    pub n: usize,
    pub roots: RootSet,
    pub report: CertificationReport,
    pub measure: EmpiricalMeasure,
}

/// Everything computed before the diagnostics.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub instance: ProblemInstance,
    pub polys: Vec<(usize, Vec<String>)>,
    pub exact_checks: Vec<ExactChecks>,
    pub spec: LimitSpec<f64>,
    pub diagram: Diagram<f64>,
    pub per_n: Vec<NData>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactChecks {
    pub n: usize,
    pub m_n: usize,
    pub degree_law: bool,
    pub leading_coeff_law: bool,
    /// `None` when `Q(0) != 0`.
    pub value_at_zero_law: Option<bool>,
}

/// Exact recursion, exact checks, roots and the diagram.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, Error> {
    cfg.validate()?;
    let instance = cfg.instance()?;
    let n_max = *cfg.n_list.last().unwrap();
    let seq = generate_sequence(
        &instance,
        n_max,
        SequenceLimits {
            max_coeff_bits: cfg.max_coeff_bits,
        },
    )?;

    let mut exact_checks = Vec::new();
    let mut polys = Vec::new();
    for &n in &cfg.n_list {
        let e = seq.entry(n).expect("sequence extends to n_max");
        let value_at_zero_law = closed_form_value_at_zero(n, &instance)
            .ok()
            .map(|v| v == e.poly.coeff(0));
        let checks = ExactChecks {
            n,
            m_n: e.degree,
            degree_law: e.degree == instance.degree_of(n),
            leading_coeff_law: e.leading == closed_form_leading_coeff(n, &instance),
            value_at_zero_law,
        };
        if !checks.degree_law || !checks.leading_coeff_law || checks.value_at_zero_law == Some(false) {
            return Err(ConfigError::Invalid(format!("exact invariant failed at n = {n}: {checks:?}")).into());
        }
        exact_checks.push(checks);
        polys.push((n, format_poly(&e.poly)));
    }

    let mut per_n = Vec::new();
    for &n in &cfg.n_list {
        let poly = &seq.entry(n).unwrap().poly;
        let opts = RootOptions {
            precision_bits: cfg.precision_bits.unwrap_or_else(|| default_precision_bits(n)),
            seed_offset: cfg.seed_offset,
            ..Default::default()
        };
        let roots = find_roots(poly, &opts)?;
        let report = certify_roots(poly, &roots);
        let measure = empirical_measure(&roots, n)?;
        per_n.push(NData {
            n,
            roots,
            report,
            measure,
        });
    }

    let spec = LimitSpec::from_instance(&instance);
    let diagram = build_voronoi(&spec.zeros)?;
    Ok(Prepared {
        instance,
        polys,
        exact_checks,
        spec,
        diagram,
        per_n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionRecord {
    pub eps: f64,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L1Record {
    pub value: f64,
    pub skipped_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerN {
    #[serde(flatten)]
    pub checks: ExactChecks,
    pub precision_bits: u32,
    pub root_count: usize,
    pub max_residual: f64,
    pub worst_log2_relative_residual: f64,
    pub cluster_flags: usize,
    pub residual_flags: usize,
    pub skeleton_fraction: Option<Vec<FractionRecord>>,
    pub l1: Option<L1Record>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarField {
    pub radius: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub rows: Vec<(usize, f64)>,
    pub target: f64,
    pub tail_min: f64,
    pub tail_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub sup_error: f64,
    pub l1: f64,
    pub skeleton_fraction: f64,
    pub b_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    /// Square `[x0, x1] x [y0, y1]` inside one cell where the sup-error is taken.
    pub square: [f64; 4],
    pub cell: usize,
    pub eps: f64,
    pub rows: Vec<StudyRow>,
    pub sup_error_decreasing: bool,
    pub l1_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub p: Vec<String>,
    pub q: Vec<String>,
    pub t: Vec<String>,
    pub degrees: [usize; 3],
    pub poles: Vec<[f64; 2]>,
    pub cells: usize,
    pub edges: usize,
    pub vertices: usize,
    pub per_n: Vec<PerN>,
    pub total_mass: f64,
    pub mass_formula: f64,
    pub l1_discrepancy_by_n: Option<BTreeMap<usize, f64>>,
    #[serde(rename = "psi_minus_L_max_abs")]
    pub psi_minus_l_max_abs: Option<f64>,
    pub far_field_residuals: Option<Vec<FarField>>,
    pub growth: Option<GrowthRecord>,
    pub convergence: Option<ConvergenceTable>,
}

/// Fraction of atoms closer than `eps` to the skeleton.
pub fn skeleton_fraction(measure: &EmpiricalMeasure, diagram: &Diagram<f64>, eps: f64) -> FractionRecord {
    let count = measure
        .atoms
        .iter()
        .filter(|a| diagram.distance_to_skeleton(a.approx) < eps)
        .count();
    FractionRecord {
        eps,
        count,
        fraction: count as f64 / measure.atoms.len() as f64,
    }
}

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Deterministic probe points in the viewport, at distance `> margin` from
/// the skeleton and the poles.
pub fn probe_points(diagram: &Diagram<f64>, count: usize, margin: f64) -> Vec<Complex<f64>> {
    let vp = svg::Viewport::around(&diagram.sites, 0.25);
    let mut out = Vec::with_capacity(count);
    let mut i = 1;
    while out.len() < count && i < 1_000_000 {
        let z = Complex::new(
            vp.x_min + halton(i, 2) * vp.width(),
            vp.y_min + halton(i, 3) * vp.height(),
        );
        i += 1;
        if diagram.distance_to_skeleton(z) > margin && diagram.phi(z) > margin {
            out.push(z);
        }
    }
    out
}

/// `max |Psi - (L - D)|` over `points`.
pub fn potential_identity(
    spec: &LimitSpec<f64>,
    diagram: &Diagram<f64>,
    points: &[Complex<f64>],
    quad_tol: f64,
) -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    for &z in points {
        let l = mu_s_log_potential(z, diagram, spec, quad_tol)?;
        worst = worst.max((psi(z, spec) - (l - spec.d())).abs());
    }
    Ok(worst)
}

/// `|L(z) - mass log|z||` at `|z| = 10^2, 10^3, 10^4`.
pub fn far_field(spec: &LimitSpec<f64>, diagram: &Diagram<f64>, quad_tol: f64) -> Result<Vec<FarField>, Error> {
    [1e2, 1e3, 1e4]
        .into_iter()
        .map(|r| {
            let z = Complex::from_polar(r, 0.3);
            let l = mu_s_log_potential(z, diagram, spec, quad_tol)?;
            Ok(FarField {
                radius: r,
                residual: (l - spec.mass() * r.ln()).abs(),
            })
        })
        .collect()
}

/// Square centred at pole `cell` with half-side `0.4 * dist(pole, skeleton)`.
pub fn cell_square(diagram: &Diagram<f64>, cell: usize) -> [f64; 4] {
    let z = diagram.sites[cell];
    let r = 0.4 * diagram.distance_to_skeleton(z);
    [z.re - r, z.re + r, z.im - r, z.im + r]
}

/// `sup |L~_n - Psi|` on a 21 x 21 lattice over `square`.
pub fn sup_error(measure: &EmpiricalMeasure, spec: &LimitSpec<f64>, square: [f64; 4]) -> f64 {
    let k = 20;
    let mut worst: f64 = 0.0;
    for j in 0..=k {
        for i in 0..=k {
            let z = Complex::new(
                square[0] + (square[1] - square[0]) * i as f64 / k as f64,
                square[2] + (square[3] - square[2]) * j as f64 / k as f64,
            );
            let v = shifted_empirical_potential(z, measure, measure.n).unwrap_or(f64::NEG_INFINITY);
            worst = worst.max((v - psi(z, spec)).abs());
        }
    }
    worst
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Per-`n` convergence table; needs at least three `n`.
pub fn convergence_study(cfg: &ExperimentConfig) -> Result<ConvergenceTable, Error> {
    if cfg.n_list.len() < 3 {
        return Err(ConfigError::Invalid(format!(
            "convergence study needs at least 3 values of n, got {}",
            cfg.n_list.len()
        ))
        .into());
    }
    let prep = prepare(cfg)?;
    study_from(cfg, &prep)
}

fn study_from(cfg: &ExperimentConfig, prep: &Prepared) -> Result<ConvergenceTable, Error> {
    // cell of the pole nearest the disk centre
    let centre = Complex::new(cfg.disk.center[0], cfg.disk.center[1]);
    let cell = match prep.diagram.locate(centre, prep.diagram.tol) {
        Location::Cell(i) => i,
        _ => prep.diagram.nearest_site(centre),
    };
    let square = cell_square(&prep.diagram, cell);
    let eps = cfg.eps_list.get(cfg.eps_list.len() / 2).copied().unwrap_or(0.1);
    let growth = growth_bound_series(
        &prep.instance,
        &prep.per_n.iter().map(|d| d.measure.clone()).collect::<Vec<_>>(),
        cfg.growth_rho,
    )
    .ok();
    let mut rows = Vec::new();
    for (k, d) in prep.per_n.iter().enumerate() {
        let l1 = l1_discrepancy(&d.measure, &prep.spec, centre, cfg.disk.rho, cfg.grid_h, cfg.grid_h)?;
        rows.push(StudyRow {
            n: d.n,
            sup_error: sup_error(&d.measure, &prep.spec, square),
            l1: l1.value,
            skeleton_fraction: skeleton_fraction(&d.measure, &prep.diagram, eps).fraction,
            b_n: growth.as_ref().map(|g| g.rows[k].1),
        });
    }
    let sups: Vec<f64> = rows.iter().map(|r| r.sup_error).collect();
    let l1s: Vec<f64> = rows.iter().map(|r| r.l1).collect();
    Ok(ConvergenceTable {
        square,
        cell,
        eps,
        sup_error_decreasing: strictly_decreasing(&sups),
        l1_decreasing: strictly_decreasing(&l1s),
        rows,
    })
}

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Error> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}

/// Runs every enabled diagnostic and writes the artifacts into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary, Error> {
    fs::create_dir_all(out_dir)?;
    let prep = prepare(cfg)?;
    let spec = &prep.spec;
    let diagram = &prep.diagram;
    let centre = Complex::new(cfg.disk.center[0], cfg.disk.center[1]);

    let mut polys_csv = String::from("n,power,coefficient\n");
    for (n, coeffs) in &prep.polys {
        for (k, c) in coeffs.iter().enumerate() {
            polys_csv.push_str(&format!("{n},{k},{c}\n"));
        }
    }
    write_atomic(out_dir, "polynomials.csv", polys_csv.as_bytes())?;

    if cfg.enabled("zeros") {
        let mut buf = Vec::new();
        writeln!(buf, "{ZEROS_CSV_HEADER}")?;
        for d in &prep.per_n {
            write_zeros_rows(&mut buf, d.n, &d.roots, &d.report)?;
        }
        write_atomic(out_dir, "zeros.csv", &buf)?;
    }

    let vp = svg::Viewport::around(&diagram.sites, 0.25);
    let grid = Grid::covering(vp.x_min, vp.x_max, vp.y_min, vp.y_max, cfg.grid_h)?;
    if cfg.enabled("psi_grid") {
        let mut buf = Vec::new();
        PotentialField::psi(&grid, spec).write_csv(&mut buf)?;
        write_atomic(out_dir, "psi_grid.csv", &buf)?;
    }
    if cfg.enabled("empirical_grids") {
        for d in &prep.per_n {
            let mut buf = Vec::new();
            PotentialField::empirical(&grid, &d.measure, d.n).write_csv(&mut buf)?;
            write_atomic(out_dir, &format!("empirical_grid_{}.csv", d.n), &buf)?;
        }
    }
    if cfg.enabled("svg") {
        let last = prep.per_n.last().unwrap();
        let title = format!("{}: poles, skeleton and the {} zeros of P_{}", cfg.name, last.measure.m_n, last.n);
        let text = svg::render(diagram, &last.measure.locations(), &title);
        write_atomic(out_dir, "voronoi.svg", text.as_bytes())?;
    }

    let mut per_n = Vec::new();
    let mut l1_by_n = BTreeMap::new();
    for (d, checks) in prep.per_n.iter().zip(&prep.exact_checks) {
        let skeleton = cfg.enabled("skeleton_fraction").then(|| {
            cfg.eps_list
                .iter()
                .map(|&e| skeleton_fraction(&d.measure, diagram, e))
                .collect()
        });
        let l1 = if cfg.enabled("l1") {
            let r = l1_discrepancy(&d.measure, spec, centre, cfg.disk.rho, cfg.grid_h, cfg.grid_h)?;
            l1_by_n.insert(d.n, r.value);
            Some(L1Record {
                value: r.value,
                skipped_area: r.skipped_area,
            })
        } else {
            None
        };
        per_n.push(PerN {
            checks: checks.clone(),
            precision_bits: d.roots.precision_bits,
            root_count: d.roots.len(),
            max_residual: d.report.max_residual,
            worst_log2_relative_residual: d
                .report
                .entries
                .iter()
                .map(|e| e.log2_relative_residual)
                .fold(f64::NEG_INFINITY, f64::max),
            cluster_flags: d.report.entries.iter().filter(|e| e.cluster_flag).count(),
            residual_flags: d.report.entries.iter().filter(|e| e.residual_flag).count(),
            skeleton_fraction: skeleton,
            l1,
        });
    }

    let psi_minus_l = if cfg.enabled("potential_identity") {
        let pts = probe_points(diagram, cfg.identity_points, 0.1);
        Some(potential_identity(spec, diagram, &pts, cfg.quad_tol)?)
    } else {
        None
    };
    let far = if cfg.enabled("far_field") {
        Some(far_field(spec, diagram, cfg.quad_tol)?)
    } else {
        None
    };
    let growth = if cfg.enabled("growth") {
        let measures: Vec<EmpiricalMeasure> = prep.per_n.iter().map(|d| d.measure.clone()).collect();
        growth_bound_series(&prep.instance, &measures, cfg.growth_rho)
            .ok()
            .map(|g| GrowthRecord {
                rows: g.rows,
                target: g.target,
                tail_min: g.tail_min,
                tail_max: g.tail_max,
            })
    } else {
        None
    };
    let convergence = if cfg.enabled("convergence") && cfg.n_list.len() >= 3 {
        Some(study_from(cfg, &prep)?)
    } else {
        None
    };

    let summary = ExperimentSummary {
        name: cfg.name.clone(),
        p: cfg.p.clone(),
        q: cfg.q.clone(),
        t: cfg.t.clone(),
        degrees: [prep.instance.p_degree(), prep.instance.q_degree(), prep.instance.t_degree()],
        poles: spec.zeros.iter().map(|z| [z.re, z.im]).collect(),
        cells: diagram.cell_count(),
        edges: diagram.edges.len(),
        vertices: diagram.vertices.len(),
        per_n,
        total_mass: total_mass(diagram, spec),
        mass_formula: spec.mass(),
        l1_discrepancy_by_n: cfg.enabled("l1").then_some(l1_by_n),
        psi_minus_l_max_abs: psi_minus_l,
        far_field_residuals: far,
        growth,
        convergence,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_atomic(out_dir, "summary.json", format!("{json}\n").as_bytes())?;
    Ok(summary)
}
