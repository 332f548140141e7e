//! `hm sample`: prior sample paths over the query grid.

use std::path::Path;

use hida_matern::inference::sample_prior;
use hida_matern::ssm::StateSpaceModel;

use crate::config::ExperimentConfig;
use crate::io::write_csv;
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let kernel = cfg.kernel()?;
    let mut times = cfg
        .query
        .as_ref()
        .ok_or_else(|| CliError::Usage("sample needs a \"query\" field in the config".into()))?
        .materialize()?;
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let draws = cfg.sample.unwrap_or_default().draws;

    let model = StateSpaceModel::assemble_mixture(kernel, cfg.obs_noise)?;
    let paths = sample_prior(&model, &times, draws, cfg.seed)?;

    let header = std::iter::once("t".to_string())
        .chain((0..draws).map(|k| format!("draw_{k}")))
        .collect::<Vec<_>>()
        .join(",");
    let rows: Vec<Vec<f64>> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = Vec::with_capacity(draws + 1);
            row.push(t);
            row.extend(paths.iter().map(|p| p[i]));
            row
        })
        .collect();
    write_csv(&out.join("samples.csv"), &header, &rows)?;
    eprintln!("sample: {draws} draws at {} times", times.len());
    Ok(())
}
