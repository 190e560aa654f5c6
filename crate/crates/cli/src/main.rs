use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;
use shire::experiment::{run_experiment, ExperimentConfig, DIAGNOSTICS};

/// Zeros of the derivatives of (P/Q)e^T against the Voronoi skeleton of the poles.
#[derive(Debug, Parser)]
#[command(name = "shire", version)]
struct Args {
    /// Experiment config (TOML).
    #[arg(long, default_value = "configs/five_poles.toml")]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated derivative orders, e.g. `5,10,20`.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    precision_bits: Option<u32>,
    #[arg(long)]
    grid_h: Option<f64>,
    /// Rotates the initial root placement.
    #[arg(long)]
    seed_offset: Option<u64>,
    /// Comma-separated diagnostics to skip.
    #[arg(long, value_delimiter = ',')]
    skip: Option<Vec<String>>,
}

fn main() -> Result<()> {
    let args = Args::parse();
    let mut cfg = ExperimentConfig::load(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(n) = args.n {
        cfg.n_list = n;
    }
    if let Some(b) = args.precision_bits {
        cfg.precision_bits = Some(b);
    }
    if let Some(h) = args.grid_h {
        cfg.grid_h = h;
    }
    if let Some(s) = args.seed_offset {
        cfg.seed_offset = s;
    }
    if let Some(skip) = args.skip {
        cfg.skip.extend(skip);
    }
    cfg.validate().with_context(|| format!("known diagnostics: {}", DIAGNOSTICS.join(", ")))?;

    let out = match (args.out, &cfg.output_dir) {
        (Some(o), _) => o,
        (None, Some(o)) => o.clone(),
        (None, None) => bail!("no output directory: pass --out or set output_dir"),
    };

    eprintln!("[shire] {} with n = {:?} -> {}", cfg.name, cfg.n_list, out.display());
    let summary = run_experiment(&cfg, &out)?;

    for r in &summary.per_n {
        eprintln!(
            "[shire] n = {:>3}: m_n = {:>4}, roots = {:>4}, max |P_n(a)| = {:.2e}, clusters = {}",
            r.checks.n, r.checks.m_n, r.root_count, r.max_residual, r.cluster_flags
        );
        if let Some(fr) = &r.skeleton_fraction {
            let line: Vec<String> = fr.iter().map(|f| format!("{}:{}", f.eps, f.count)).collect();
            eprintln!("[shire]          near skeleton (eps:count) {}", line.join(" "));
        }
    }
    eprintln!(
        "[shire] total mass {:.12} (formula {:.12})",
        summary.total_mass, summary.mass_formula
    );
    if let Some(d) = summary.psi_minus_l_max_abs {
        eprintln!("[shire] max |Psi - (L - D)| = {d:.3e}");
    }
    eprintln!("[shire] wrote {}", out.join("summary.json").display());
    Ok(())
}
