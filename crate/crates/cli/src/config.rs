//! Run configuration: a JSON file with every key optional, overridden by flags.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use rabi_core::aggregate::{uniform_grid, AggregateOptions, DEFAULT_POINTS};
use rabi_core::binomial::DEFAULT_TAIL_TOL;
use rabi_core::lindblad::S0Mode;
use rabi_core::PhysicalParams;
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_Q_PH: f64 = 47e3 * PI;
pub const DEFAULT_GAMMA12: f64 = 83.912;
/// Rydberg transition frequency of the circular-state experiments (rad/s).
pub const DEFAULT_OMEGA: f64 = 2.0 * PI * 51.099e9;
pub const DEFAULT_N: u64 = 100_000;
pub const DEFAULT_VARSIGMA: f64 = 400.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    omega: Option<f64>,
    q_ph: Option<f64>,
    gamma1_ph: Option<f64>,
    gamma2_ph: Option<f64>,
    gamma3: Option<f64>,
    #[serde(rename = "N")]
    n: Option<u64>,
    varsigma: Option<OneOrMany>,
    mode_ratio: Option<f64>,
    hbar: Option<f64>,
    t_max: Option<f64>,
    points: Option<usize>,
    s0_mode: Option<String>,
    tail_tol: Option<f64>,
    search_range: Option<[f64; 2]>,
}

/// Flags shared by every simulation command. Each one overrides the config key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// One or more ς values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub varsigma: Vec<f64>,
    #[arg(long = "n-oscillators")]
    pub n: Option<u64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub q_ph: Option<f64>,
    #[arg(long)]
    pub gamma1_ph: Option<f64>,
    #[arg(long)]
    pub gamma2_ph: Option<f64>,
    /// Defaults to 0.07·q_ph.
    #[arg(long)]
    pub gamma3: Option<f64>,
    /// Gaussian width over cavity length; enables effective-time output.
    #[arg(long)]
    pub mode_ratio: Option<f64>,
    /// Defaults to four Rabi periods.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// `formula` or `physical`.
    #[arg(long)]
    pub s0_mode: Option<String>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Parameters at the first requested ς.
    pub params: PhysicalParams,
    pub varsigmas: Vec<f64>,
    pub t_max: f64,
    pub points: usize,
    pub aggregate: AggregateOptions,
    pub search_range: Option<(f64, f64)>,
}

impl RunConfig {
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let file = match &o.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        Self::merge(file, o)
    }

    pub fn from_json(text: &str, o: &Overrides) -> Result<Self> {
        let file = serde_json::from_str::<ConfigFile>(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::merge(file, o)
    }

    fn merge(file: ConfigFile, o: &Overrides) -> Result<Self> {
        let q_ph = o.q_ph.or(file.q_ph).unwrap_or(DEFAULT_Q_PH);
        let varsigmas = if !o.varsigma.is_empty() {
            o.varsigma.clone()
        } else {
            match file.varsigma {
                Some(OneOrMany::One(v)) => vec![v],
                Some(OneOrMany::Many(v)) => v,
                None => vec![DEFAULT_VARSIGMA],
            }
        };
        if varsigmas.is_empty() {
            return Err(CliError::Config("varsigma list is empty".into()));
        }
        let mut params = PhysicalParams::new(
            o.omega.or(file.omega).unwrap_or(DEFAULT_OMEGA),
            q_ph,
            o.gamma1_ph.or(file.gamma1_ph).unwrap_or(DEFAULT_GAMMA12),
            o.gamma2_ph.or(file.gamma2_ph).unwrap_or(DEFAULT_GAMMA12),
            o.gamma3.or(file.gamma3).unwrap_or(0.07 * q_ph),
            o.n.or(file.n).unwrap_or(DEFAULT_N),
            varsigmas[0],
        )?;
        params.mode_ratio = o.mode_ratio.or(file.mode_ratio);
        params.hbar = file.hbar;
        params.validate()?;
        for &v in &varsigmas[1..] {
            params.with_varsigma(v)?;
        }

        let t_max = o.t_max.or(file.t_max).unwrap_or(4.0 * params.rabi_period());
        let points = o.points.or(file.points).unwrap_or(DEFAULT_POINTS);
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(CliError::Config(format!("t_max must be positive, got {t_max}")));
        }
        if points < 2 {
            return Err(CliError::Config(format!("points must be at least 2, got {points}")));
        }
        let s0_mode = match o.s0_mode.as_deref().or(file.s0_mode.as_deref()) {
            Some(s) => s.parse::<S0Mode>()?,
            None => S0Mode::Formula,
        };
        let tail_tol = o.tail_tol.or(file.tail_tol).unwrap_or(DEFAULT_TAIL_TOL);
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(CliError::Config(format!("tail_tol must lie in (0, 1), got {tail_tol}")));
        }
        Ok(RunConfig {
            params,
            varsigmas,
            t_max,
            points,
            aggregate: AggregateOptions { tail_tol, s0_mode },
            search_range: file.search_range.map(|[lo, hi]| (lo, hi)),
        })
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        Ok(uniform_grid(self.t_max, self.points)?)
    }

    /// One parameter set per requested ς.
    pub fn runs(&self) -> Result<Vec<PhysicalParams>> {
        self.varsigmas.iter().map(|&v| Ok(self.params.with_varsigma(v)?)).collect()
    }
}
