//! `hm bench`: wall-clock scaling of the state-space path on synthetic
//! oscillatory data, with a dense-oracle accuracy check at sizes the cubic
//! method can still handle.

use std::path::Path;
use std::time::Instant;

use hida_matern::inference::{kalman_filter, project_marginals, rts_smooth, Dataset};
use hida_matern::oracle::{avg_marginal_kld, exact_posterior};
use hida_matern::ssm::StateSpaceModel;
use hida_matern::synth::{toy_prior, toy_series};

use crate::config::ExperimentConfig;
use crate::io::write_csv;
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let options = cfg.bench.clone().unwrap_or_default();
    let kernel = match &cfg.kernel {
        Some(k) => k.clone(),
        None => toy_prior(),
    };

    let mut rows = Vec::with_capacity(options.sizes.len());
    for (i, &m) in options.sizes.iter().enumerate() {
        if m == 0 {
            return Err(CliError::Usage("bench sizes must be positive".into()));
        }
        let times: Vec<f64> = (0..m).map(|k| k as f64 * options.spacing).collect();
        let values = toy_series(&times, cfg.obs_noise, cfg.seed.wrapping_add(i as u64));
        let data = Dataset::new(times.clone(), values.clone()).map_err(CliError::from)?;
        let model = StateSpaceModel::assemble_mixture(&kernel, cfg.obs_noise)?;

        let started = Instant::now();
        let filter = kalman_filter(&model, &data)?;
        let smoothed = rts_smooth(&model, &filter)?;
        let seconds = started.elapsed().as_secs_f64();

        let kld = if m <= options.kld_size {
            let marginals = project_marginals(&model, &smoothed, &times).map_err(CliError::from)?;
            let k = kernel.evaluator();
            let dense = exact_posterior(&k, &times, &values, cfg.obs_noise, &times)
                .map_err(CliError::from)?;
            let exact: Vec<(f64, f64)> = dense
                .mean
                .iter()
                .zip(&dense.variance)
                .map(|(&m, &v)| (m, v))
                .collect();
            avg_marginal_kld(&marginals, &exact).map_err(CliError::from)?
        } else {
            f64::NAN
        };

        eprintln!("bench: m={m} wall {seconds:.3}s avg KLD {kld:.3e}");
        rows.push(vec![m as f64, seconds, kld]);
    }
    write_csv(&out.join("bench.csv"), "m,seconds,avg_kld", &rows)?;
    Ok(())
}
