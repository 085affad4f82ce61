//! Run manifests: enough provenance to re-run a sweep bit-identically on the
//! same platform (config echo, code version, per-task timings, cache usage,
//! RNG stream policy).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::RunConfig;

#[derive(Clone, Debug)]
pub struct TaskRecord {
    pub label: String,
    pub seconds: f64,
    pub cache: String,
    pub outcome: String,
}

#[derive(Clone, Debug)]
pub struct Manifest {
    experiment: String,
    header: Vec<(String, String)>,
    tasks: Vec<TaskRecord>,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(experiment: &str, cfg: &RunConfig) -> Self {
        let mut header = vec![
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("experiment".to_string(), experiment.to_string()),
            ("params".to_string(), format!("{:?}", cfg.params)),
            (
                "L".to_string(),
                cfg.sites_list
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("ensemble".to_string(), cfg.ensemble.to_string()),
            ("seed".to_string(), cfg.base_seed.to_string()),
            ("grid".to_string(), cfg.grid.spec_string()),
            ("sampling".to_string(), cfg.sampling.label().to_string()),
            (
                "fit_window".to_string(),
                cfg.fit_window
                    .map(|(a, b)| format!("{a}:{b}"))
                    .unwrap_or_else(|| "default".to_string()),
            ),
            (
                "sat_window".to_string(),
                format!("{}:{}", cfg.sat_window.0, cfg.sat_window.1),
            ),
            ("sat_samples".to_string(), cfg.sat_samples.to_string()),
            (
                "cache_dir".to_string(),
                cfg.cache_dir
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "none".to_string()),
            ),
            ("out_dir".to_string(), cfg.out_dir.display().to_string()),
            (
                "workers".to_string(),
                cfg.workers
                    .map(|w| w.to_string())
                    .unwrap_or_else(|| "default".to_string()),
            ),
            (
                "rng_policy".to_string(),
                "chacha12, member stream = (L << 32) | member, seeded by `seed`".to_string(),
            ),
        ];
        header.retain(|(_, v)| !v.is_empty());
        Self {
            experiment: experiment.to_string(),
            header,
            tasks: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_task(&mut self, label: &str, seconds: f64, cache: &str, outcome: &str) {
        self.tasks.push(TaskRecord {
            label: label.to_string(),
            seconds,
            cache: cache.to_string(),
            outcome: outcome.to_string(),
        });
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn failed_tasks(&self) -> impl Iterator<Item = &TaskRecord> {
        self.tasks.iter().filter(|t| t.outcome != "ok")
    }

    /// Write `manifest_<experiment>_<label>.txt` into the output directory.
    pub fn write(&self, out_dir: &Path, label: &str) -> Result<PathBuf> {
        let mut text = String::new();
        let _ = writeln!(text, "# edising run manifest");
        for (k, v) in &self.header {
            let _ = writeln!(text, "{k} = {v}");
        }
        for t in &self.tasks {
            let _ = writeln!(
                text,
                "[task] {} seconds={:.3} cache={} outcome={}",
                t.label, t.seconds, t.cache, t.outcome
            );
        }
        for o in &self.outputs {
            let _ = writeln!(text, "[output] {}", o.display());
        }
        let path = out_dir.join(format!("manifest_{}_{label}.txt", self.experiment));
        std::fs::write(&path, text)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
