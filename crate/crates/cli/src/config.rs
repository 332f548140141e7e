//! Experiment configuration: one JSON document per run, with command-line
//! flags overriding individual fields.

use std::path::{Path, PathBuf};

use hida_matern::MixtureSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    /// Kernel mixture; required by every command except `approx`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<MixtureSpec>,
    /// Observation noise variance.
    #[serde(default = "default_obs_noise")]
    pub obs_noise: f64,
    /// Input data path (`t,y` CSV).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// Query times for predict/sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<QuerySpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<ApproxOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionOptions>,
}

fn default_obs_noise() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum QuerySpec {
    Times { times: Vec<f64> },
    Grid { start: f64, stop: f64, step: f64 },
}

impl QuerySpec {
    pub fn materialize(&self) -> Result<Vec<f64>, CliError> {
        match self {
            QuerySpec::Times { times } => {
                if times.is_empty() {
                    return Err(CliError::Usage("query time list is empty".into()));
                }
                Ok(times.clone())
            }
            QuerySpec::Grid { start, stop, step } => {
                if !(step.is_finite() && *step > 0.0) || stop < start {
                    return Err(CliError::Usage(format!(
                        "bad query grid: start {start}, stop {stop}, step {step}"
                    )));
                }
                let n = ((stop - start) / step).floor() as usize + 1;
                if n == 0 {
                    return Err(CliError::Usage("query grid is empty".into()));
                }
                Ok((0..n).map(|i| start + i as f64 * step).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct FitOptions {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_fit_iters")]
    pub max_iters: usize,
    #[serde(default = "default_spread")]
    pub spread: f64,
}

fn default_restarts() -> usize {
    8
}
fn default_fit_iters() -> usize {
    600
}
fn default_spread() -> f64 {
    0.8
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { restarts: 8, max_iters: 600, spread: 0.8 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SampleOptions {
    #[serde(default = "default_draws")]
    pub draws: usize,
}

fn default_draws() -> usize {
    4
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self { draws: 4 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ApproxOptions {
    /// Reference kernel name: se, rq, gabor, sinc, matern12/32/52/72,
    /// matern, sm, periodic.
    pub target: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default = "default_mixands")]
    pub mixands: usize,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_mixands() -> usize {
    4
}
fn default_order() -> u32 {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchOptions {
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    /// largest size for which the dense-oracle KLD is also reported
    #[serde(default = "default_kld_size")]
    pub kld_size: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
}

fn default_sizes() -> Vec<usize> {
    vec![1000, 10_000, 50_000]
}
fn default_kld_size() -> usize {
    2000
}
fn default_spacing() -> f64 {
    0.05
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { sizes: default_sizes(), kld_size: default_kld_size(), spacing: default_spacing() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConditionOptions {
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
    #[serde(default)]
    pub dump_matrices: bool,
}

fn default_taus() -> Vec<f64> {
    vec![0.0, 0.001, 0.01, 0.1, 0.5]
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self { taus: default_taus(), dump_matrices: false }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse config {}: {e}", path.display())))
    }

    pub fn kernel(&self) -> Result<&MixtureSpec, CliError> {
        self.kernel
            .as_ref()
            .ok_or_else(|| CliError::Usage("config is missing the \"kernel\" field".into()))
    }

    pub fn data_path(&self) -> Result<&Path, CliError> {
        self.data
            .as_deref()
            .ok_or_else(|| CliError::Usage("no data file given (config \"data\" or --data)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let json = r#"{
            "kernel": {"components":[{"sigma2":1.0,"a":0.04,"b":6.283185307179586,"p":3,"weight":0.0025}]},
            "obs_noise": 0.25,
            "query": {"start": 0.0, "stop": 2.0, "step": 0.5},
            "seed": 7,
            "sample": {"draws": 3}
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.query.as_ref().unwrap().materialize().unwrap().len(), 5);
    }
}
