//! `hm predict`: posterior mean and variance over the query grid.

use std::path::Path;

use hida_matern::inference::{predict, Dataset};
use hida_matern::ssm::StateSpaceModel;

use crate::config::ExperimentConfig;
use crate::io::{read_data_csv, write_csv};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let kernel = cfg.kernel()?;
    let query = cfg
        .query
        .as_ref()
        .ok_or_else(|| CliError::Usage("predict needs a \"query\" field in the config".into()))?
        .materialize()?;
    let (times, values) = read_data_csv(cfg.data_path()?)?;
    let data = Dataset::new(times, values).map_err(CliError::from)?;

    let model = StateSpaceModel::assemble_mixture(kernel, cfg.obs_noise)?;
    let predictions = predict(&model, &data, &query)?;

    let rows: Vec<Vec<f64>> = predictions
        .iter()
        .map(|p| vec![p.time, p.mean, p.variance])
        .collect();
    write_csv(&out.join("predictions.csv"), "t,mean,variance", &rows)?;
    eprintln!("predict: {} query points", predictions.len());
    Ok(())
}
