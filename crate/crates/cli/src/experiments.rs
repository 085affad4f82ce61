//! The experiment runners: seeded ensemble sweeps over chain lengths with
//! CSV outputs, fit reports, and a manifest per run.
//!
//! All runners walk the configured lengths sequentially (one diagonalization
//! in memory at a time), fan the inner ensemble/grid work out to the worker
//! pool, and aggregate in fixed order, so identical configs and seeds yield
//! byte-identical CSVs. A numerical failure in one `(L, sector)` task is
//! recorded in the manifest and skips that task only; the rest of the sweep
//! proceeds.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use edising_core::basis::{Parity, SpinBasis};
use edising_core::eigensolver::{
    BlockedCacheUse, BlockedDecomposition, EigenCache,
};
use edising_core::error::Error as CoreError;
use edising_core::hamiltonian::{ChainOperator, CouplingParams};
use edising_core::observables::{
    ensemble_entropy_series, energy_spread_series, fit_growth, page_value, sample_times,
    saturation_from_series, scaling_collapse, spread_saturation_formula, CollapseResult,
    EnsembleSeries, FitKind, FitResult, SaturationEstimate,
};
use edising_core::spectral::{
    default_keep_count, eigenvalue_histogram, gap_ratios, r_tilde_mean, ratio_histogram,
    surmise_pdf, Histogram, ReferenceEnsemble, GOE_MEAN_R_TILDE, POISSON_MEAN_R_TILDE,
};

use crate::config::RunConfig;
use crate::manifest::Manifest;

/// Default linear-fit window for the entanglement slope.
pub const DEFAULT_ENTANGLEMENT_WINDOW: (f64, f64) = (1.0, 4.0);
/// Default power-law window for the diffusion exponent.
pub const DEFAULT_DIFFUSION_WINDOW: (f64, f64) = (1.0, 5.0);
/// Bins used for ratio histograms (the production protocol).
pub const RATIO_HISTOGRAM_BINS: usize = 250;
/// Bins used for eigenvalue histograms and the band-gap heuristic.
pub const EIGENVALUE_HISTOGRAM_BINS: usize = 50;

fn format_float(v: f64) -> String {
    format!("{v}")
}

fn write_text(path: &PathBuf, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn cache_label(used: Option<BlockedCacheUse>) -> String {
    match used {
        None => "off".to_string(),
        Some(u) => format!(
            "{},{}",
            if u.even_hit { "hit" } else { "miss" },
            if u.odd_hit { "hit" } else { "miss" }
        ),
    }
}

struct Workspace {
    cache: Option<EigenCache>,
    out_dir: PathBuf,
}

impl Workspace {
    fn prepare(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        std::fs::create_dir_all(&cfg.out_dir)
            .with_context(|| format!("creating output directory {}", cfg.out_dir.display()))?;
        let cache = match &cfg.cache_dir {
            Some(dir) => Some(EigenCache::new(dir)?),
            None => None,
        };
        Ok(Self {
            cache,
            out_dir: cfg.out_dir.clone(),
        })
    }

    fn decompose(
        &self,
        p: &CouplingParams,
        basis: &SpinBasis,
    ) -> Result<(BlockedDecomposition, String), CoreError> {
        let (d, used) =
            BlockedDecomposition::compute_cached(p, basis, self.cache.as_ref())?;
        let label = cache_label(self.cache.as_ref().map(|_| used));
        Ok((d, label))
    }
}

/// Whether a task failure is an isolated numerical problem (skip the task)
/// rather than a configuration or I/O problem (abort the sweep).
fn isolates(err: &CoreError) -> bool {
    matches!(err, CoreError::Numerical(_))
}

fn seed_note(cfg: &RunConfig, sites: usize) -> String {
    format!(
        "seed={} streams=(L={sites})<<32|member, members 0..{}",
        cfg.base_seed, cfg.ensemble
    )
}

// ---------------------------------------------------------------------------
// entanglement
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct EntanglementRun {
    pub sites: usize,
    pub series: EnsembleSeries,
    pub fit: FitResult,
}

#[derive(Debug)]
pub struct EntanglementReport {
    pub runs: Vec<EntanglementRun>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Ensemble-averaged central-cut entanglement entropy `S(t)` per chain
/// length, with a linear growth fit.
pub fn run_entanglement(cfg: &RunConfig) -> Result<EntanglementReport> {
    let ws = Workspace::prepare(cfg)?;
    let label = cfg.params.label();
    let mut manifest = Manifest::new("entanglement", cfg);
    let times = cfg.grid.times();
    let window = cfg.fit_window.unwrap_or(DEFAULT_ENTANGLEMENT_WINDOW);

    let mut runs = Vec::new();
    for &sites in &cfg.sites_list {
        let started = Instant::now();
        let task = || -> Result<(EntanglementRun, String), CoreError> {
            let basis = SpinBasis::new(sites)?;
            let p = cfg.params.couplings(sites).map_err(|e| {
                CoreError::Config(format!("couplings for L = {sites}: {e}"))
            })?;
            let (d, cache) = ws.decompose(&p, &basis)?;
            let series = ensemble_entropy_series(
                &d,
                &times,
                cfg.ensemble,
                cfg.base_seed,
                cfg.sampling,
                sites / 2,
            )?;
            let fit = series.fit(window, FitKind::Linear)?;
            Ok((
                EntanglementRun {
                    sites,
                    series,
                    fit,
                },
                cache,
            ))
        };
        match task() {
            Ok((run, cache)) => {
                let report_path = ws.out_dir.join(format!(
                    "fit_entanglement_{label}_L{sites:02}.txt"
                ));
                write_text(&report_path, &fit_report(&run.fit, "S(t)", None))?;
                manifest.add_output(&report_path);
                manifest.record_task(
                    &format!("L={sites} {}", seed_note(cfg, sites)),
                    started.elapsed().as_secs_f64(),
                    &cache,
                    "ok",
                );
                runs.push(run);
            }
            Err(e) if isolates(&e) => {
                manifest.record_task(
                    &format!("L={sites}"),
                    started.elapsed().as_secs_f64(),
                    "n/a",
                    &format!("failed: {e}"),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut csv = String::from("t,mean_S,stderr,L\n");
    for run in &runs {
        for ((t, m), s) in run
            .series
            .times()
            .iter()
            .zip(run.series.mean())
            .zip(run.series.stderr())
        {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                format_float(*t),
                format_float(*m),
                format_float(*s),
                run.sites
            );
        }
    }
    let csv_path = ws.out_dir.join(format!("entanglement_{label}.csv"));
    write_text(&csv_path, &csv)?;
    manifest.add_output(&csv_path);
    let manifest_path = manifest.write(&ws.out_dir, &label)?;
    Ok(EntanglementReport {
        runs,
        csv_path,
        manifest_path,
    })
}

// ---------------------------------------------------------------------------
// diffusion
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DiffusionRun {
    pub sites: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: FitResult,
}

#[derive(Debug)]
pub struct DiffusionReport {
    pub runs: Vec<DiffusionRun>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Energy-spread distance `R(t)` per chain length (deterministic trace
/// formula, no ensemble), with a power-law fit and an optional per-position
/// profile dump for conservation audits.
pub fn run_diffusion(cfg: &RunConfig) -> Result<DiffusionReport> {
    let ws = Workspace::prepare(cfg)?;
    let label = cfg.params.label();
    let mut manifest = Manifest::new("diffusion", cfg);
    let times = cfg.grid.times();
    let window = cfg.fit_window.unwrap_or(DEFAULT_DIFFUSION_WINDOW);

    let mut runs = Vec::new();
    for &sites in &cfg.sites_list {
        let started = Instant::now();
        let task = || -> Result<(DiffusionRun, String, Option<String>), CoreError> {
            let basis = SpinBasis::new(sites)?;
            let p = cfg.params.couplings(sites).map_err(|e| {
                CoreError::Config(format!("couplings for L = {sites}: {e}"))
            })?;
            let (d, cache) = ws.decompose(&p, &basis)?;
            let w = d.rotate_chain(&ChainOperator::weighted_spread(&p, &basis)?, &basis)?;
            let a = d.rotate_chain(&ChainOperator::central_bond(&basis), &basis)?;
            let values = energy_spread_series(&d, &w, &a, &times, p.j)?;
            let fit = fit_growth(&times, &values, window, FitKind::PowerLaw)?;
            let profiles = if cfg.dump_profiles {
                Some(profile_dump(&d, &p, &basis, &times)?)
            } else {
                None
            };
            Ok((
                DiffusionRun {
                    sites,
                    times: times.clone(),
                    values,
                    fit,
                },
                cache,
                profiles,
            ))
        };
        match task() {
            Ok((run, cache, profiles)) => {
                let report_path = ws
                    .out_dir
                    .join(format!("fit_diffusion_{label}_L{sites:02}.txt"));
                let diffusivity = run.fit.coefficient * std::f64::consts::PI.sqrt() / 4.0;
                write_text(
                    &report_path,
                    &fit_report(&run.fit, "R(t)", Some(diffusivity * diffusivity)),
                )?;
                manifest.add_output(&report_path);
                if let Some(profile_csv) = profiles {
                    let p_path = ws
                        .out_dir
                        .join(format!("diffusion_profiles_{label}_L{sites:02}.csv"));
                    write_text(&p_path, &profile_csv)?;
                    manifest.add_output(&p_path);
                }
                manifest.record_task(
                    &format!("L={sites}"),
                    started.elapsed().as_secs_f64(),
                    &cache,
                    "ok",
                );
                runs.push(run);
            }
            Err(e) if isolates(&e) => {
                manifest.record_task(
                    &format!("L={sites}"),
                    started.elapsed().as_secs_f64(),
                    "n/a",
                    &format!("failed: {e}"),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut csv = String::from("t,R,L\n");
    for run in &runs {
        for (t, v) in run.times.iter().zip(&run.values) {
            let _ = writeln!(csv, "{},{},{}", format_float(*t), format_float(*v), run.sites);
        }
    }
    let csv_path = ws.out_dir.join(format!("diffusion_{label}.csv"));
    write_text(&csv_path, &csv)?;
    manifest.add_output(&csv_path);
    let manifest_path = manifest.write(&ws.out_dir, &label)?;
    Ok(DiffusionReport {
        runs,
        csv_path,
        manifest_path,
    })
}

fn profile_dump(
    d: &BlockedDecomposition,
    p: &CouplingParams,
    basis: &SpinBasis,
    times: &[f64],
) -> Result<String, CoreError> {
    let profiler = edising_core::dynamics::BlockedEnergyProfiler::new(d, p, basis)?;
    let mut csv = String::from("t,r,value\n");
    for &t in times {
        for (r, v) in profiler.profile(d, t)? {
            let _ = writeln!(
                csv,
                "{},{},{}",
                format_float(t),
                format_float(r.position()),
                format_float(v)
            );
        }
    }
    Ok(csv)
}

// ---------------------------------------------------------------------------
// level statistics
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct LevelStatsRun {
    pub sites: usize,
    pub parity: Parity,
    pub levels: usize,
    pub ratio_count: usize,
    pub degenerate_gaps: usize,
    pub mean_r_tilde: f64,
    pub empty_interior_bins: usize,
}

#[derive(Debug)]
pub struct LevelStatsReport {
    pub runs: Vec<LevelStatsRun>,
    pub report_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Level-spacing ratio statistics and spectral histograms per
/// `(length, parity sector)`, with GOE/Poisson reference overlays.
pub fn run_levelstats(cfg: &RunConfig) -> Result<LevelStatsReport> {
    let ws = Workspace::prepare(cfg)?;
    let label = cfg.params.label();
    let mut manifest = Manifest::new("levelstats", cfg);

    let mut runs = Vec::new();
    let mut report = String::new();
    let _ = writeln!(
        report,
        "# level statistics ({label}); references: GOE {GOE_MEAN_R_TILDE:.6}, Poisson {POISSON_MEAN_R_TILDE:.6}"
    );
    for &sites in &cfg.sites_list {
        let started = Instant::now();
        let prep = || -> Result<(BlockedDecomposition, String), CoreError> {
            let basis = SpinBasis::new(sites)?;
            let p = cfg.params.couplings(sites).map_err(|e| {
                CoreError::Config(format!("couplings for L = {sites}: {e}"))
            })?;
            ws.decompose(&p, &basis)
        };
        let (d, cache) = match prep() {
            Ok(v) => v,
            Err(e) if isolates(&e) => {
                manifest.record_task(
                    &format!("L={sites}"),
                    started.elapsed().as_secs_f64(),
                    "n/a",
                    &format!("failed: {e}"),
                );
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for parity in [Parity::Even, Parity::Odd] {
            let sector_start = Instant::now();
            let task = || -> Result<(LevelStatsRun, Histogram, Histogram), CoreError> {
                let eigenvalues = d.sector(parity).eigenvalues();
                let ratios = gap_ratios(eigenvalues)?;
                let mean = r_tilde_mean(&ratios)?;
                let keep = default_keep_count(ratios.len());
                let r_hist = ratio_histogram(&ratios, RATIO_HISTOGRAM_BINS.min(keep), keep)?;
                let e_hist = eigenvalue_histogram(eigenvalues, EIGENVALUE_HISTOGRAM_BINS)?;
                Ok((
                    LevelStatsRun {
                        sites,
                        parity,
                        levels: eigenvalues.len(),
                        ratio_count: ratios.len(),
                        degenerate_gaps: ratios.degenerate_gaps(),
                        mean_r_tilde: mean,
                        empty_interior_bins: e_hist.empty_interior_bins(),
                    },
                    r_hist,
                    e_hist,
                ))
            };
            match task() {
                Ok((run, r_hist, e_hist)) => {
                    let ratio_path = ws.out_dir.join(format!(
                        "levelstats_{label}_L{sites:02}_{parity}_ratios.csv"
                    ));
                    let mut csv = String::from("bin_left,bin_right,density,goe,poisson\n");
                    for b in r_hist.bins() {
                        let center = 0.5 * (b.left + b.right);
                        let goe = surmise_pdf(center.max(0.0), ReferenceEnsemble::Goe)
                            .unwrap_or(0.0);
                        let poisson = surmise_pdf(center.max(0.0), ReferenceEnsemble::Poisson)
                            .unwrap_or(0.0);
                        let _ = writeln!(
                            csv,
                            "{},{},{},{},{}",
                            format_float(b.left),
                            format_float(b.right),
                            format_float(b.value),
                            format_float(goe),
                            format_float(poisson)
                        );
                    }
                    write_text(&ratio_path, &csv)?;
                    manifest.add_output(&ratio_path);

                    let eig_path = ws.out_dir.join(format!(
                        "levelstats_{label}_L{sites:02}_{parity}_eigenvalues.csv"
                    ));
                    let mut csv = String::from("bin_left,bin_right,count\n");
                    for b in e_hist.bins() {
                        let _ = writeln!(
                            csv,
                            "{},{},{}",
                            format_float(b.left),
                            format_float(b.right),
                            format_float(b.value)
                        );
                    }
                    write_text(&eig_path, &csv)?;
                    manifest.add_output(&eig_path);

                    let _ = writeln!(
                        report,
                        "L={sites} {parity}: levels={} ratios={} degenerate={} mean_r_tilde={:.6} empty_interior_bins={}",
                        run.levels,
                        run.ratio_count,
                        run.degenerate_gaps,
                        run.mean_r_tilde,
                        run.empty_interior_bins
                    );
                    manifest.record_task(
                        &format!("L={sites} {parity}"),
                        sector_start.elapsed().as_secs_f64(),
                        &cache,
                        "ok",
                    );
                    runs.push(run);
                }
                Err(e) if isolates(&e) => {
                    manifest.record_task(
                        &format!("L={sites} {parity}"),
                        sector_start.elapsed().as_secs_f64(),
                        &cache,
                        &format!("failed: {e}"),
                    );
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    let report_path = ws.out_dir.join(format!("levelstats_{label}.txt"));
    write_text(&report_path, &report)?;
    manifest.add_output(&report_path);
    let manifest_path = manifest.write(&ws.out_dir, &label)?;
    Ok(LevelStatsReport {
        runs,
        report_path,
        manifest_path,
    })
}

// ---------------------------------------------------------------------------
// scaling collapse
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct CollapseReport {
    pub result: CollapseResult,
    pub saturation: Vec<(usize, SaturationEstimate)>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Rescale the entropy curves by their long-time values and score the
/// collapse onto a single curve.
pub fn run_collapse(cfg: &RunConfig) -> Result<CollapseReport> {
    if cfg.sites_list.len() < 2 {
        bail!("scaling collapse needs at least two chain lengths");
    }
    let ws = Workspace::prepare(cfg)?;
    let label = cfg.params.label();
    let mut manifest = Manifest::new("collapse", cfg);
    let times = cfg.grid.times();

    let mut series_per_l: Vec<(usize, EnsembleSeries)> = Vec::new();
    let mut saturation = Vec::new();
    for &sites in &cfg.sites_list {
        let started = Instant::now();
        let task = || -> Result<((usize, EnsembleSeries), SaturationEstimate, String), CoreError> {
            let basis = SpinBasis::new(sites)?;
            let p = cfg.params.couplings(sites).map_err(|e| {
                CoreError::Config(format!("couplings for L = {sites}: {e}"))
            })?;
            let (d, cache) = ws.decompose(&p, &basis)?;
            let series = ensemble_entropy_series(
                &d,
                &times,
                cfg.ensemble,
                cfg.base_seed,
                cfg.sampling,
                sites / 2,
            )?;
            let sat_series = ensemble_entropy_series(
                &d,
                &sample_times(cfg.sat_window, cfg.sat_samples),
                cfg.ensemble,
                cfg.base_seed,
                cfg.sampling,
                sites / 2,
            )?;
            let sat = saturation_from_series(&sat_series, cfg.sat_window)?;
            Ok(((sites, series), sat, cache))
        };
        match task() {
            Ok((entry, sat, cache)) => {
                manifest.record_task(
                    &format!("L={sites} {}", seed_note(cfg, sites)),
                    started.elapsed().as_secs_f64(),
                    &cache,
                    "ok",
                );
                series_per_l.push(entry);
                saturation.push((sites, sat));
            }
            Err(e) if isolates(&e) => {
                manifest.record_task(
                    &format!("L={sites}"),
                    started.elapsed().as_secs_f64(),
                    "n/a",
                    &format!("failed: {e}"),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }
    if series_per_l.len() < 2 {
        bail!("fewer than two chain lengths produced usable curves");
    }

    let borrowed: Vec<(usize, &EnsembleSeries)> =
        series_per_l.iter().map(|(l, s)| (*l, s)).collect();
    let s_inf: Vec<f64> = saturation.iter().map(|(_, s)| s.value).collect();
    let result = scaling_collapse(&borrowed, &s_inf)?;

    let mut csv = String::from("x,y,L\n");
    for curve in &result.curves {
        for (x, y) in curve.x.iter().zip(&curve.y) {
            let _ = writeln!(csv, "{},{},{}", format_float(*x), format_float(*y), curve.sites);
        }
    }
    let csv_path = ws.out_dir.join(format!("collapse_{label}.csv"));
    write_text(&csv_path, &csv)?;
    manifest.add_output(&csv_path);

    let mut report = String::new();
    let _ = writeln!(
        report,
        "collapse score (rms spread over x in [{}, {}]): {:.6}",
        result.score_window.0, result.score_window.1, result.score
    );
    for (sites, sat) in &saturation {
        let _ = writeln!(
            report,
            "L={sites}: S_inf={:.6} over [{}, {}] x{}",
            sat.value, sat.window.0, sat.window.1, sat.samples
        );
    }
    let report_path = ws.out_dir.join(format!("collapse_{label}.txt"));
    write_text(&report_path, &report)?;
    manifest.add_output(&report_path);
    let manifest_path = manifest.write(&ws.out_dir, &label)?;
    Ok(CollapseReport {
        result,
        saturation,
        csv_path,
        manifest_path,
    })
}

// ---------------------------------------------------------------------------
// saturation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SaturationRow {
    pub sites: usize,
    pub s_inf: f64,
    pub page: f64,
    pub deviation: f64,
    pub r_inf: f64,
    pub r_formula: f64,
}

#[derive(Debug)]
pub struct SaturationReport {
    pub rows: Vec<SaturationRow>,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

/// Long-time values per chain length: entropy saturation against the
/// random-state value, and spread saturation against the equal-distribution
/// formula.
pub fn run_saturation(cfg: &RunConfig) -> Result<SaturationReport> {
    let ws = Workspace::prepare(cfg)?;
    let label = cfg.params.label();
    let mut manifest = Manifest::new("saturation", cfg);
    let window_times = sample_times(cfg.sat_window, cfg.sat_samples);

    let mut rows = Vec::new();
    for &sites in &cfg.sites_list {
        let started = Instant::now();
        let task = || -> Result<(SaturationRow, String), CoreError> {
            let basis = SpinBasis::new(sites)?;
            let p = cfg.params.couplings(sites).map_err(|e| {
                CoreError::Config(format!("couplings for L = {sites}: {e}"))
            })?;
            let (d, cache) = ws.decompose(&p, &basis)?;
            let sat_series = ensemble_entropy_series(
                &d,
                &window_times,
                cfg.ensemble,
                cfg.base_seed,
                cfg.sampling,
                sites / 2,
            )?;
            let s_inf = saturation_from_series(&sat_series, cfg.sat_window)?.value;
            let w = d.rotate_chain(&ChainOperator::weighted_spread(&p, &basis)?, &basis)?;
            let a = d.rotate_chain(&ChainOperator::central_bond(&basis), &basis)?;
            let r_values = energy_spread_series(&d, &w, &a, &window_times, p.j)?;
            let r_inf = r_values.iter().sum::<f64>() / r_values.len() as f64;
            let page = page_value(sites, sites / 2);
            Ok((
                SaturationRow {
                    sites,
                    s_inf,
                    page,
                    deviation: page - s_inf,
                    r_inf,
                    r_formula: spread_saturation_formula(sites),
                },
                cache,
            ))
        };
        match task() {
            Ok((row, cache)) => {
                manifest.record_task(
                    &format!("L={sites} {}", seed_note(cfg, sites)),
                    started.elapsed().as_secs_f64(),
                    &cache,
                    "ok",
                );
                rows.push(row);
            }
            Err(e) if isolates(&e) => {
                manifest.record_task(
                    &format!("L={sites}"),
                    started.elapsed().as_secs_f64(),
                    "n/a",
                    &format!("failed: {e}"),
                );
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut csv =
        String::from("L,S_inf_estimate,page_value,deviation,R_inf_estimate,R_formula\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.sites,
            format_float(row.s_inf),
            format_float(row.page),
            format_float(row.deviation),
            format_float(row.r_inf),
            format_float(row.r_formula)
        );
    }
    let csv_path = ws.out_dir.join(format!("saturation_{label}.csv"));
    write_text(&csv_path, &csv)?;
    manifest.add_output(&csv_path);
    let manifest_path = manifest.write(&ws.out_dir, &label)?;
    Ok(SaturationReport {
        rows,
        csv_path,
        manifest_path,
    })
}

// ---------------------------------------------------------------------------

fn fit_report(fit: &FitResult, observable: &str, diffusivity: Option<f64>) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "observable = {observable}");
    let _ = writeln!(text, "kind = {:?}", fit.kind);
    let _ = writeln!(text, "window = {}:{}", fit.window.0, fit.window.1);
    let _ = writeln!(text, "coefficient = {}", fit.coefficient);
    if let Some(e) = fit.exponent {
        let _ = writeln!(text, "exponent = {e}");
    }
    let _ = writeln!(text, "rms_residual = {}", fit.rms_residual);
    if let Some(d) = diffusivity {
        // R ≈ (4/√π)√(Dt) identifies D = (prefactor · √π / 4)²
        let _ = writeln!(text, "implied_diffusivity = {d}");
    }
    text
}

