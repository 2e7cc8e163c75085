use std::path::PathBuf;

use clap::{Args, ValueEnum};
use coupler_core::coupler::CouplerParams;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand. Unset values take per-command defaults.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Number of outer modes coupled to the central mode
    #[arg(long, default_value_t = 1)]
    pub n_outer: usize,
    /// Coupling strengths: one value for all outer modes, or a comma list
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub g: String,
    /// Free frequency of every mode
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<f64>,
    /// Largest occupation kept per mode
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Interaction time
    #[arg(long, allow_negative_numbers = true)]
    pub time: Option<f64>,
    /// Gate-time index (full collective Rabi periods)
    #[arg(long)]
    pub k: Option<u32>,
    /// Pass/fail tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub n_outer: usize,
    pub g: Vec<f64>,
    pub w: f64,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub tol: f64,
    pub format: Format,
}

impl RunConfig {
    pub fn params(&self) -> Result<CouplerParams, CliError> {
        Ok(CouplerParams::new(self.w, self.g.clone(), self.n_max)?)
    }
}

pub fn parse_couplings(list: &str, n_outer: usize) -> Result<Vec<f64>, CliError> {
    if n_outer == 0 {
        return Err(CliError::Config("--n-outer must be at least 1".into()));
    }
    let values = list
        .split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("cannot parse coupling {item:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    match values.len() {
        1 => Ok(vec![values[0]; n_outer]),
        n if n == n_outer => Ok(values),
        n => Err(CliError::Config(format!(
            "--g lists {n} couplings but --n-outer is {n_outer}"
        ))),
    }
}

pub fn check_tolerance(tol: f64) -> Result<f64, CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Config(format!("tolerance must be finite and non-negative, got {tol}")))
    }
}

impl RunArgs {
    pub fn resolve(
        &self,
        w: f64,
        n_max: usize,
        time: Option<f64>,
        tol: f64,
    ) -> Result<RunConfig, CliError> {
        Ok(RunConfig {
            n_outer: self.n_outer,
            g: parse_couplings(&self.g, self.n_outer)?,
            w: self.w.unwrap_or(w),
            n_max: self.nmax.unwrap_or(n_max),
            time: self.time.or(time),
            k: self.k,
            tol: check_tolerance(self.tol.unwrap_or(tol))?,
            format: self.format,
        })
    }
}
