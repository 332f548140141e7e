//! `hm fit`: hyperparameter search (or a plain likelihood report with
//! `--no-opt`), writing the fitted kernel JSON and a text report.

use std::path::Path;

use hida_matern::inference::{fit_hyperparameters, kalman_filter, Dataset, SearchConfig};
use hida_matern::ssm::StateSpaceModel;

use crate::config::ExperimentConfig;
use crate::io::{fmt_f64, read_data_csv, write_file, write_json};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path, no_opt: bool) -> Result<(), CliError> {
    let kernel = cfg.kernel()?.clone();
    let (times, values) = read_data_csv(cfg.data_path()?)?;
    let data = Dataset::new(times, values).map_err(CliError::from)?;

    let (fitted, obs_noise, log_likelihood, evaluations) = if no_opt {
        let model = StateSpaceModel::assemble_mixture(&kernel, cfg.obs_noise)?;
        let filter = kalman_filter(&model, &data)?;
        (kernel.clone(), cfg.obs_noise, filter.log_likelihood, 1usize)
    } else {
        let options = cfg.fit.unwrap_or_default();
        let search = SearchConfig {
            restarts: options.restarts,
            seed: cfg.seed,
            max_iters: options.max_iters,
            spread: options.spread,
        };
        let outcome = fit_hyperparameters(&kernel, cfg.obs_noise, &data, &search)
            .map_err(|e| CliError::Runtime(format!("optimizer failed: {e}")))?;
        (outcome.mixture, outcome.obs_noise, outcome.log_likelihood, outcome.evaluations)
    };

    write_json(&out.join("fitted_kernel.json"), &fitted)?;

    let mut report = String::new();
    report.push_str(&format!("log_likelihood,{}\n", fmt_f64(log_likelihood)));
    report.push_str(&format!("observations,{}\n", data.observed_count()));
    report.push_str(&format!("obs_noise,{}\n", fmt_f64(obs_noise)));
    report.push_str(&format!("components,{}\n", fitted.len()));
    report.push_str(&format!("state_dimension,{}\n", fitted.total_order()));
    report.push_str(&format!("objective_evaluations,{evaluations}\n"));
    write_file(&out.join("fit_report.txt"), report.as_bytes())?;

    eprintln!(
        "fit: {} observations, log-likelihood {}",
        data.observed_count(),
        fmt_f64(log_likelihood)
    );
    Ok(())
}
