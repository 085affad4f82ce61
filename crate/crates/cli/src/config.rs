//! Run configuration: defaults, config-file parsing, and flag overrides.
//!
//! The config file is flat `key = value` text (TOML grammar) mirroring every
//! CLI flag; explicit flags win over file values, which win over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use edising_core::dynamics::SamplingMode;
use edising_core::hamiltonian::CouplingParams;

/// Time grid specification, `start:stop:points[:log]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl TimeGrid {
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            bail!("grid must be start:stop:points[:log], got {spec:?}");
        }
        let start: f64 = parts[0].parse().context("grid start")?;
        let stop: f64 = parts[1].parse().context("grid stop")?;
        let points: usize = parts[2].parse().context("grid points")?;
        let log = match parts.get(3) {
            None => false,
            Some(&"log") => true,
            Some(&"linear") => false,
            Some(other) => bail!("grid scale must be log or linear, got {other:?}"),
        };
        let grid = Self {
            start,
            stop,
            points,
            log,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 2 || !(self.start < self.stop) {
            bail!(
                "time grid must ascend with at least 2 points, got {}:{}:{}",
                self.start,
                self.stop,
                self.points
            );
        }
        if self.log && self.start <= 0.0 {
            bail!("logarithmic grid requires a positive start, got {}", self.start);
        }
        Ok(())
    }

    /// Materialize the grid.
    pub fn times(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if self.log {
                    self.start * (self.stop / self.start).powf(f)
                } else {
                    self.start + (self.stop - self.start) * f
                }
            })
            .collect()
    }

    pub fn spec_string(&self) -> String {
        format!(
            "{}:{}:{}{}",
            self.start,
            self.stop,
            self.points,
            if self.log { ":log" } else { "" }
        )
    }
}

/// Either a named preset or explicit couplings.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamsChoice {
    Preset(String),
    Explicit { g: f64, h: f64, j: f64 },
}

impl ParamsChoice {
    /// Resolve to coupling parameters for one chain length.
    pub fn couplings(&self, sites: usize) -> Result<CouplingParams> {
        Ok(match self {
            ParamsChoice::Preset(name) => CouplingParams::preset(name, sites)?,
            ParamsChoice::Explicit { g, h, j } => CouplingParams::new(*g, *h, *j, sites)?,
        })
    }

    /// Label used in output file names.
    pub fn label(&self) -> String {
        match self {
            ParamsChoice::Preset(name) => name.clone(),
            ParamsChoice::Explicit { .. } => "custom".to_string(),
        }
    }
}

/// Everything a runner needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: ParamsChoice,
    pub sites_list: Vec<usize>,
    pub ensemble: usize,
    pub base_seed: u64,
    pub grid: TimeGrid,
    pub sampling: SamplingMode,
    /// Growth-fit window; the experiment picks its default when unset.
    pub fit_window: Option<(f64, f64)>,
    pub sat_window: (f64, f64),
    pub sat_samples: usize,
    pub cache_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
    /// Dump per-position energy profiles alongside the diffusion series.
    pub dump_profiles: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsChoice::Preset("main".to_string()),
            sites_list: vec![8, 10, 12],
            ensemble: 200,
            base_seed: 12345,
            grid: TimeGrid {
                start: 0.1,
                stop: 200.0,
                points: 60,
                log: true,
            },
            sampling: SamplingMode::SphereUniform,
            fit_window: None,
            sat_window: (100.0, 200.0),
            sat_samples: 21,
            cache_dir: None,
            out_dir: PathBuf::from("out"),
            workers: None,
            dump_profiles: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sites_list.is_empty() {
            bail!("at least one chain length is required");
        }
        if let Some(l) = self.sites_list.iter().find(|l| *l % 2 != 0) {
            bail!("chain lengths must be even, got {l}");
        }
        if self.ensemble == 0 {
            bail!("ensemble must be at least 1");
        }
        self.grid.validate()?;
        if let Some((a, b)) = self.fit_window {
            if !(a < b) {
                bail!("fit window must ascend, got {a}:{b}");
            }
        }
        if !(self.sat_window.0 < self.sat_window.1) || self.sat_samples == 0 {
            bail!(
                "saturation window must ascend with at least one sample, got {}:{} x{}",
                self.sat_window.0,
                self.sat_window.1,
                self.sat_samples
            );
        }
        for l in &self.sites_list {
            self.params.couplings(*l)?;
        }
        Ok(())
    }

    /// Apply `key = value` pairs from a flat config file.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let table: toml::Table = text
            .parse()
            .with_context(|| format!("parsing config file {}", path.display()))?;
        let mut explicit: (Option<f64>, Option<f64>, Option<f64>) = (None, None, None);
        for (key, value) in &table {
            match key.as_str() {
                "preset" => self.params = ParamsChoice::Preset(as_string(value, key)?),
                "g" => explicit.0 = Some(as_f64(value, key)?),
                "h" => explicit.1 = Some(as_f64(value, key)?),
                "J" | "j" => explicit.2 = Some(as_f64(value, key)?),
                "L" | "l" => self.sites_list = parse_sites(value)?,
                "ensemble" => self.ensemble = as_usize(value, key)?,
                "seed" => self.base_seed = as_u64(value, key)?,
                "grid" => self.grid = TimeGrid::parse(&as_string(value, key)?)?,
                "sampling" => self.sampling = parse_sampling(&as_string(value, key)?)?,
                "fit_window" => self.fit_window = Some(parse_window(&as_string(value, key)?)?),
                "sat_window" => self.sat_window = parse_window(&as_string(value, key)?)?,
                "sat_samples" => self.sat_samples = as_usize(value, key)?,
                "cache_dir" => self.cache_dir = Some(PathBuf::from(as_string(value, key)?)),
                "out_dir" => self.out_dir = PathBuf::from(as_string(value, key)?),
                "workers" => self.workers = Some(as_usize(value, key)?),
                "profiles" => self.dump_profiles = as_bool(value, key)?,
                other => bail!("unknown config key {other:?} in {}", path.display()),
            }
        }
        if let (Some(g), Some(h), Some(j)) = explicit {
            self.params = ParamsChoice::Explicit { g, h, j };
        } else if explicit.0.is_some() || explicit.1.is_some() || explicit.2.is_some() {
            bail!("explicit couplings require all three of g, h, J");
        }
        Ok(())
    }
}

pub fn parse_sampling(s: &str) -> Result<SamplingMode> {
    match s {
        "sphere" => Ok(SamplingMode::SphereUniform),
        "literal" => Ok(SamplingMode::LiteralRanges),
        other => bail!("sampling must be sphere or literal, got {other:?}"),
    }
}

pub fn parse_window(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 2 {
        bail!("window must be start:stop, got {s:?}");
    }
    let a: f64 = parts[0].parse().context("window start")?;
    let b: f64 = parts[1].parse().context("window stop")?;
    if !(a < b) {
        bail!("window must ascend, got {s:?}");
    }
    Ok((a, b))
}

pub fn parse_sites_str(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .with_context(|| format!("chain length {p:?}"))
        })
        .collect()
}

fn parse_sites(value: &toml::Value) -> Result<Vec<usize>> {
    match value {
        toml::Value::String(s) => parse_sites_str(s),
        toml::Value::Integer(i) => Ok(vec![usize::try_from(*i)?]),
        toml::Value::Array(items) => items
            .iter()
            .map(|v| match v {
                toml::Value::Integer(i) => Ok(usize::try_from(*i)?),
                other => bail!("chain length entry {other:?} is not an integer"),
            })
            .collect(),
        other => bail!("L must be a list of even integers, got {other:?}"),
    }
}

fn as_string(value: &toml::Value, key: &str) -> Result<String> {
    value
        .as_str()
        .map(str::to_string)
        .with_context(|| format!("config key {key:?} must be a string"))
}

fn as_f64(value: &toml::Value, key: &str) -> Result<f64> {
    match value {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => bail!("config key {key:?} must be a number, got {other:?}"),
    }
}

fn as_usize(value: &toml::Value, key: &str) -> Result<usize> {
    value
        .as_integer()
        .and_then(|i| usize::try_from(i).ok())
        .with_context(|| format!("config key {key:?} must be a nonnegative integer"))
}

fn as_u64(value: &toml::Value, key: &str) -> Result<u64> {
    value
        .as_integer()
        .and_then(|i| u64::try_from(i).ok())
        .with_context(|| format!("config key {key:?} must be a nonnegative integer"))
}

fn as_bool(value: &toml::Value, key: &str) -> Result<bool> {
    value
        .as_bool()
        .with_context(|| format!("config key {key:?} must be a boolean"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing_and_materialization() {
        let g = TimeGrid::parse("0.1:200:60:log").unwrap();
        assert!(g.log);
        let times = g.times();
        assert_eq!(times.len(), 60);
        assert!((times[0] - 0.1).abs() < 1e-12);
        assert!((times[59] - 200.0).abs() < 1e-9);
        assert!(times.windows(2).all(|w| w[0] < w[1]));

        let lin = TimeGrid::parse("0:10:11").unwrap();
        assert_eq!(lin.times()[3], 3.0);

        assert!(TimeGrid::parse("1:0:10").is_err());
        assert!(TimeGrid::parse("0:10:10:log").is_err());
        assert!(TimeGrid::parse("nope").is_err());
    }

    #[test]
    fn config_file_roundtrip_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            r#"
preset = "supp-a"
L = "4,6"
ensemble = 10
seed = 99
grid = "0.5:20:12:log"
sampling = "literal"
fit_window = "1:3"
workers = 2
"#,
        )
        .unwrap();
        let mut cfg = RunConfig::default();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.params, ParamsChoice::Preset("supp-a".into()));
        assert_eq!(cfg.sites_list, vec![4, 6]);
        assert_eq!(cfg.ensemble, 10);
        assert_eq!(cfg.base_seed, 99);
        assert_eq!(cfg.sampling, SamplingMode::LiteralRanges);
        assert_eq!(cfg.fit_window, Some((1.0, 3.0)));
        assert_eq!(cfg.workers, Some(2));
        cfg.validate().unwrap();
    }

    #[test]
    fn explicit_couplings_need_all_three() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "g = 0.5\nh = 0.25\n").unwrap();
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_file(&path).is_err());

        std::fs::write(&path, "g = 0.5\nh = 0.25\nJ = 1.0\n").unwrap();
        cfg.apply_file(&path).unwrap();
        assert_eq!(
            cfg.params,
            ParamsChoice::Explicit {
                g: 0.5,
                h: 0.25,
                j: 1.0
            }
        );
        assert_eq!(cfg.params.label(), "custom");
    }

    #[test]
    fn validation_rejects_odd_lengths() {
        let cfg = RunConfig {
            sites_list: vec![4, 7],
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
