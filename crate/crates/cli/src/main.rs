use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use edising_cli::config::{parse_sampling, parse_sites_str, parse_window, ParamsChoice, RunConfig, TimeGrid};
use edising_cli::experiments;

/// Exact-diagonalization experiments on a nonintegrable Ising chain.
#[derive(Parser)]
#[command(name = "edising", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble-averaged entanglement entropy growth S(t) with a linear fit.
    Entanglement(RunArgs),
    /// Energy-spread distance R(t) with a power-law fit.
    Diffusion(RunArgs),
    /// Level-spacing ratio statistics and spectral histograms per sector.
    Levelstats(RunArgs),
    /// Scaling collapse of S(t) curves across chain lengths.
    Collapse(RunArgs),
    /// Long-time saturation table: S(inf) vs the random-state value, R(inf)
    /// vs the equal-distribution formula.
    Saturation(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Coupling preset: main, supp-a, supp-b.
    #[arg(long)]
    preset: Option<String>,

    /// Explicit transverse field (requires --h and --J).
    #[arg(long)]
    g: Option<f64>,

    /// Explicit bulk longitudinal field.
    #[arg(long)]
    h: Option<f64>,

    /// Explicit Ising coupling.
    #[arg(long = "J", visible_alias = "j")]
    coupling: Option<f64>,

    /// Comma-separated even chain lengths, e.g. 8,10,12.
    #[arg(long = "L", visible_alias = "l")]
    sites: Option<String>,

    /// Random product states per (L, t) ensemble.
    #[arg(long)]
    ensemble: Option<usize>,

    /// Base seed for the per-member RNG streams.
    #[arg(long)]
    seed: Option<u64>,

    /// Time grid start:stop:points[:log].
    #[arg(long)]
    grid: Option<String>,

    /// Eigendecomposition cache directory.
    #[arg(long)]
    cache_dir: Option<PathBuf>,

    /// Output directory for CSVs, reports, and the manifest.
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Worker threads for the data-parallel loops.
    #[arg(long)]
    workers: Option<usize>,

    /// Bloch-angle sampling: sphere (uniform direction) or literal
    /// (uniform polar angle).
    #[arg(long)]
    sampling: Option<String>,

    /// Growth-fit window start:stop (defaults: 1:4 linear, 1:5 power law).
    #[arg(long)]
    fit_window: Option<String>,

    /// Long-time window start:stop for saturation estimates.
    #[arg(long)]
    sat_window: Option<String>,

    /// Sample count across the saturation window.
    #[arg(long)]
    sat_samples: Option<usize>,

    /// Also dump per-position energy profiles (diffusion only).
    #[arg(long)]
    profiles: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(name) = self.preset {
            cfg.params = ParamsChoice::Preset(name);
        }
        match (self.g, self.h, self.coupling) {
            (Some(g), Some(h), Some(j)) => cfg.params = ParamsChoice::Explicit { g, h, j },
            (None, None, None) => {}
            _ => anyhow::bail!("explicit couplings require all three of --g, --h, --J"),
        }
        if let Some(s) = self.sites {
            cfg.sites_list = parse_sites_str(&s)?;
        }
        if let Some(n) = self.ensemble {
            cfg.ensemble = n;
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(g) = self.grid {
            cfg.grid = TimeGrid::parse(&g)?;
        }
        if let Some(dir) = self.cache_dir {
            cfg.cache_dir = Some(dir);
        }
        if let Some(dir) = self.out_dir {
            cfg.out_dir = dir;
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        if let Some(s) = self.sampling {
            cfg.sampling = parse_sampling(&s)?;
        }
        if let Some(w) = self.fit_window {
            cfg.fit_window = Some(parse_window(&w)?);
        }
        if let Some(w) = self.sat_window {
            cfg.sat_window = parse_window(&w)?;
        }
        if let Some(n) = self.sat_samples {
            cfg.sat_samples = n;
        }
        if self.profiles {
            cfg.dump_profiles = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (name, cfg) = match cli.command {
        Command::Entanglement(a) => ("entanglement", a.into_config()?),
        Command::Diffusion(a) => ("diffusion", a.into_config()?),
        Command::Levelstats(a) => ("levelstats", a.into_config()?),
        Command::Collapse(a) => ("collapse", a.into_config()?),
        Command::Saturation(a) => ("saturation", a.into_config()?),
    };
    if let Some(workers) = cfg.workers {
        edising_core::exec::set_worker_threads(workers)?;
    }

    match name {
        "entanglement" => {
            let report = experiments::run_entanglement(&cfg)?;
            for run in &report.runs {
                println!(
                    "L={}: slope {:.4} over [{}, {}] (rms {:.4}), {} points, ensemble {}",
                    run.sites,
                    run.fit.coefficient,
                    run.fit.window.0,
                    run.fit.window.1,
                    run.fit.rms_residual,
                    run.series.len(),
                    run.series.count()
                );
            }
            println!("wrote {}", report.csv_path.display());
        }
        "diffusion" => {
            let report = experiments::run_diffusion(&cfg)?;
            for run in &report.runs {
                println!(
                    "L={}: exponent {:.4}, prefactor {:.4} over [{}, {}] (rms {:.4})",
                    run.sites,
                    run.fit.exponent.unwrap_or(f64::NAN),
                    run.fit.coefficient,
                    run.fit.window.0,
                    run.fit.window.1,
                    run.fit.rms_residual
                );
            }
            println!("wrote {}", report.csv_path.display());
        }
        "levelstats" => {
            let report = experiments::run_levelstats(&cfg)?;
            for run in &report.runs {
                println!(
                    "L={} {}: {} levels, mean r-tilde {:.4} ({} degenerate gaps, {} interior gaps)",
                    run.sites,
                    run.parity,
                    run.levels,
                    run.mean_r_tilde,
                    run.degenerate_gaps,
                    run.empty_interior_bins
                );
            }
            println!("wrote {}", report.report_path.display());
        }
        "collapse" => {
            let report = experiments::run_collapse(&cfg)?;
            println!(
                "collapse score {:.4} over x in [{}, {}]",
                report.result.score, report.result.score_window.0, report.result.score_window.1
            );
            for (sites, sat) in &report.saturation {
                println!("L={sites}: S_inf {:.4}", sat.value);
            }
            println!("wrote {}", report.csv_path.display());
        }
        "saturation" => {
            let report = experiments::run_saturation(&cfg)?;
            for row in &report.rows {
                println!(
                    "L={}: S_inf {:.4} vs page {:.4} (dev {:.4}); R_inf {:.4} vs formula {:.4}",
                    row.sites, row.s_inf, row.page, row.deviation, row.r_inf, row.r_formula
                );
            }
            println!("wrote {}", report.csv_path.display());
        }
        _ => unreachable!(),
    }
    Ok(())
}
