//! TOML configuration files and their merge with command-line flags.
//!
//! Top-level keys mirror the common flags; each subcommand has an optional
//! table of its own. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wgqed::states::StateFamily;

use crate::args::{CommonArgs, Format};
use crate::error::{usage, CliError, CliResult};

pub const DEFAULT_GAMMA_MHZ: f64 = 5.0;
pub const DEFAULT_GAMMA_NR_MHZ: f64 = 0.03;
pub const DEFAULT_RTOL: f64 = 1e-10;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub gamma_nr: Option<f64>,
    pub lambda_ratio: Option<f64>,
    pub f: Option<f64>,
    pub state: Option<StateFamily>,
    pub t_max: Option<f64>,
    pub sample_dt: Option<f64>,
    pub rtol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub rates: RatesSection,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub prepare: PrepareSection,
    #[serde(default)]
    pub mix: MixSection,
    #[serde(default)]
    pub cpw: CpwSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub range: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub detuning: Option<f64>,
    pub coupling: Option<f64>,
    pub full: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub f_range: Option<String>,
    pub f_values: Option<Vec<f64>>,
    pub lambda_ratios: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareSection {
    pub dissipative: Option<bool>,
    pub g: Option<f64>,
    pub g_bc: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixSection {
    pub omega: Option<f64>,
    pub pulse: Option<f64>,
    pub wait: Option<f64>,
    pub flip: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpwSection {
    pub width: Option<f64>,
    pub gap: Option<f64>,
    pub eps_r: Option<f64>,
    pub freq: Option<Vec<f64>>,
    pub x2: Option<f64>,
}

pub fn load(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::ConfigParse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

/// Effective common settings, echoed into JSON output. Rates are in MHz.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub gamma_mhz: f64,
    pub gamma_nr_mhz: f64,
    pub lambda_ratio: Option<f64>,
    pub f: Option<f64>,
    pub state: StateFamily,
    pub t_max_us: Option<f64>,
    pub sample_dt_us: Option<f64>,
    pub rtol: f64,
    pub format: Format,
    pub jobs: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn merge(flags: &CommonArgs, file: &FileConfig, default_format: Format) -> CliResult<Self> {
        let cfg = Self {
            gamma_mhz: flags.gamma.or(file.gamma).unwrap_or(DEFAULT_GAMMA_MHZ),
            gamma_nr_mhz: flags
                .gamma_nr
                .or(file.gamma_nr)
                .unwrap_or(DEFAULT_GAMMA_NR_MHZ),
            lambda_ratio: flags.lambda_ratio.or(file.lambda_ratio),
            f: flags.f.or(file.f),
            state: flags.state.or(file.state).unwrap_or(StateFamily::Werner),
            t_max_us: flags.t_max.or(file.t_max),
            sample_dt_us: flags.sample_dt.or(file.sample_dt),
            rtol: flags.rtol.or(file.rtol).unwrap_or(DEFAULT_RTOL),
            format: flags.format.or(file.format).unwrap_or(default_format),
            jobs: flags.jobs.or(file.jobs).unwrap_or(1),
            out: flags.out.clone().or_else(|| file.out.clone()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        positive("--gamma", self.gamma_mhz, true)?;
        positive("--gamma-nr", self.gamma_nr_mhz, true)?;
        positive("--rtol", self.rtol, false)?;
        if let Some(t) = self.t_max_us {
            positive("--t-max", t, false)?;
        }
        if let Some(dt) = self.sample_dt_us {
            positive("--sample-dt", dt, false)?;
        }
        if self.jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        Ok(())
    }

    pub fn require_f(&self) -> CliResult<f64> {
        self.f.ok_or_else(|| usage("--f is required"))
    }

    pub fn require_lambda_ratio(&self) -> CliResult<f64> {
        self.lambda_ratio
            .ok_or_else(|| usage("--lambda-ratio is required"))
    }
}

pub fn positive(name: &str, v: f64, allow_zero: bool) -> CliResult<()> {
    let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
    if ok {
        Ok(())
    } else {
        Err(usage(format!(
            "{name} must be {}, got {v}",
            if allow_zero { ">= 0" } else { "> 0" }
        )))
    }
}

/// Parses `start:stop:step`. A stop below start gives an empty list.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let bad = || usage(format!("malformed range '{s}', expected start:stop:step"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<CliResult<Vec<f64>>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0) {
        return Err(bad());
    }
    if stop < start {
        return Ok(Vec::new());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|k| (start + k as f64 * step).min(stop))
        .collect())
}

/// Parses a comma-separated list of numbers; blank input is an empty list.
pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| usage(format!("bad number '{p}' in list '{s}'")))
        })
        .collect()
}
