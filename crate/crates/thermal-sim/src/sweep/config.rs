//! Configuration resolution.
//!
//! Settings come from four layers, weakest first: built-in defaults, a named
//! preset, a flat `key = value` config file, and command-line flags. Later
//! layers override earlier ones. The `THERMAL_SIM_SEED` environment variable
//! acts as a seed fallback below both explicit sources.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::gaussian::ThermalVarianceConvention;
use crate::network::{ProtocolParams, SourceKind};

use super::{preset_sweeps, unit_grid, GridSpec, RunMode, SweepSpec, SweptParam};

/// The default master seed when nothing provides one.
pub const DEFAULT_SEED: u64 = 0;
/// Default sample count for sampled runs.
pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// Default source occupancy (the documented reference value).
pub const DEFAULT_NBAR: f64 = 1309.0;

pub const VALID_KEYS: &[&str] = &[
    "preset",
    "eta1",
    "eta2",
    "eta3",
    "eta4",
    "ve",
    "nbar",
    "eps3",
    "eps4",
    "source",
    "mode",
    "samples",
    "seed",
    "jobs",
    "out",
    "thermal-variance-convention",
];

/// Partial settings from one layer (file or flags); `None` means "not set
/// here".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub eta3: Option<f64>,
    pub eta4: Option<f64>,
    pub ve: Option<f64>,
    pub nbar: Option<f64>,
    pub eps3: Option<f64>,
    pub eps4: Option<f64>,
    pub source: Option<SourceKind>,
    pub mode: Option<RunMode>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub convention: Option<ThermalVarianceConvention>,
}

fn parse_unit_interval(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?} as a number")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Config(format!(
            "{key} = {value} out of range; legal domain is [0, 1]"
        )));
    }
    Ok(v)
}

fn parse_nonneg(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?} as a number")))?;
    if !(v >= 0.0) {
        return Err(Error::Config(format!(
            "{key} = {value} out of range; legal domain is [0, inf)"
        )));
    }
    Ok(v)
}

fn parse_snu(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?} as a number")))?;
    if !(v >= 1.0) {
        return Err(Error::Config(format!(
            "{key} = {value} out of range; legal domain is [1, inf) SNU"
        )));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?} as an integer")))
}

impl Overrides {
    /// Apply one `key = value` pair (shared by the config-file parser and
    /// flag handling).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "preset" => self.preset = Some(value.to_string()),
            "eta1" => self.eta1 = Some(parse_unit_interval(key, value)?),
            "eta2" => self.eta2 = Some(parse_unit_interval(key, value)?),
            "eta3" => self.eta3 = Some(parse_unit_interval(key, value)?),
            "eta4" => self.eta4 = Some(parse_unit_interval(key, value)?),
            "ve" => self.ve = Some(parse_snu(key, value)?),
            "nbar" => self.nbar = Some(parse_nonneg(key, value)?),
            "eps3" => self.eps3 = Some(parse_nonneg(key, value)?),
            "eps4" => self.eps4 = Some(parse_nonneg(key, value)?),
            "source" => self.source = Some(SourceKind::parse(value)?),
            "mode" => self.mode = Some(RunMode::parse(value)?),
            "samples" => self.samples = Some(parse_int(key, value)?),
            "seed" => self.seed = Some(parse_int(key, value)?),
            "jobs" => self.jobs = Some(parse_int(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "thermal-variance-convention" => {
                self.convention = Some(ThermalVarianceConvention::parse(value)?)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown key {other:?}; valid keys: {}",
                    VALID_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Parse a flat `key = value` config file. Blank lines and `#` comments
    /// are ignored.
    pub fn from_file(path: &std::path::Path) -> Result<Overrides> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut out = Overrides::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key = value, got {line:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            out.set(key.trim(), value.trim())?;
        }
        Ok(out)
    }

    /// Merge with a weaker layer: values set in `self` win.
    pub fn over(self, weaker: Overrides) -> Overrides {
        Overrides {
            preset: self.preset.or(weaker.preset),
            eta1: self.eta1.or(weaker.eta1),
            eta2: self.eta2.or(weaker.eta2),
            eta3: self.eta3.or(weaker.eta3),
            eta4: self.eta4.or(weaker.eta4),
            ve: self.ve.or(weaker.ve),
            nbar: self.nbar.or(weaker.nbar),
            eps3: self.eps3.or(weaker.eps3),
            eps4: self.eps4.or(weaker.eps4),
            source: self.source.or(weaker.source),
            mode: self.mode.or(weaker.mode),
            samples: self.samples.or(weaker.samples),
            seed: self.seed.or(weaker.seed),
            jobs: self.jobs.or(weaker.jobs),
            out: self.out.or(weaker.out),
            convention: self.convention.or(weaker.convention),
        }
    }

    /// Overlay this layer's parameter settings onto a base point.
    pub fn apply_to_params(&self, base: &ProtocolParams) -> Result<ProtocolParams> {
        let mut p = base.clone();
        if let Some(c) = self.convention {
            p.convention = c;
        }
        if let Some(source) = self.source {
            if source != p.source {
                match source {
                    SourceKind::Coherent => {
                        // equal-power comparison: carry the thermal occupancy
                        // over to the carrier unless nbar is given explicitly
                        p.carrier_nbar = (p.v_s - 1.0) / 2.0;
                        p.v_s = 1.0;
                    }
                    SourceKind::Thermal => {
                        p.v_s = p.convention.variance(p.carrier_nbar);
                        p.carrier_nbar = 0.0;
                    }
                }
                p.source = source;
            }
        }
        if let Some(nbar) = self.nbar {
            match p.source {
                SourceKind::Thermal => p.v_s = p.convention.variance(nbar),
                SourceKind::Coherent => p.carrier_nbar = nbar,
            }
        }
        if let Some(v) = self.ve {
            p.v_e = v;
        }
        if let Some(v) = self.eta1 {
            p.eta1 = v;
        }
        if let Some(v) = self.eta2 {
            p.eta2 = v;
        }
        if let Some(v) = self.eta3 {
            p.eta3 = v;
        }
        if let Some(v) = self.eta4 {
            p.eta4 = v;
        }
        if let Some(v) = self.eps3 {
            p.eps3 = v;
        }
        if let Some(v) = self.eps4 {
            p.eps4 = v;
        }
        p.validate()
            .map_err(|e| Error::Config(format!("invalid parameter combination: {e}")))?;
        Ok(p)
    }
}

/// A fully resolved run: sweeps to execute plus the output directory.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub sweeps: Vec<SweepSpec>,
    pub out_dir: PathBuf,
    /// The base parameter point (used by the single-point commands).
    pub base: ProtocolParams,
    pub mode: RunMode,
    pub samples: usize,
    pub seed: u64,
}

/// Built-in defaults: the figure operating point with nbar = 1309.
pub fn default_params() -> ProtocolParams {
    ProtocolParams::thermal_from_occupancy(DEFAULT_NBAR)
}

/// Resolve layered settings into a concrete run.
///
/// `file` is the parsed config file (when `--config` was given), `flags` the
/// command-line layer, and `env_seed` the `THERMAL_SIM_SEED` fallback.
pub fn resolve(
    file: Option<Overrides>,
    flags: Overrides,
    env_seed: Option<u64>,
) -> Result<ResolvedRun> {
    crate::oplog::record("sweep.parse_config");
    let merged = flags.over(file.unwrap_or_default());
    let seed = merged.seed.or(env_seed).unwrap_or(DEFAULT_SEED);
    let base = merged.apply_to_params(&default_params())?;
    let mode = merged.mode.unwrap_or(RunMode::Analytic);
    let samples = merged.samples.unwrap_or(DEFAULT_SAMPLES);
    let out_dir = merged.out.clone().unwrap_or_else(|| PathBuf::from("out"));

    let mut sweeps = match &merged.preset {
        Some(name) => preset_sweeps(name, seed)?,
        // default sweep: eta1 over (0, 1] at the resolved base point
        None => vec![SweepSpec {
            name: "sweep-eta1".into(),
            grids: vec![GridSpec {
                param: SweptParam::Eta1,
                values: unit_grid(50),
            }],
            base: base.clone(),
            mode,
            samples,
            seed,
            jobs: None,
        }],
    };

    // overlay the explicit settings onto every sweep; swept parameters keep
    // their grids (a fixed override of a swept parameter only moves the base
    // point, which the grid then replaces)
    for sweep in &mut sweeps {
        sweep.base = merged.apply_to_params(&sweep.base)?;
        if let Some(m) = merged.mode {
            sweep.mode = m;
        }
        if let Some(n) = merged.samples {
            sweep.samples = n;
        }
        if let Some(j) = merged.jobs {
            sweep.jobs = Some(j);
        }
        sweep.seed = seed;
    }

    Ok(ResolvedRun {
        sweeps,
        out_dir,
        base,
        mode,
        samples,
        seed,
    })
}
