//! `hm condition`: condition numbers of `K^S(τ)`, `A(τ)`, `Q(τ)` with and
//! without the correlation transform, plus optional matrix dumps.

use std::path::Path;

use hida_matern::linalg::condition_number;
use hida_matern::ssm::StateSpaceModel;

use crate::config::ExperimentConfig;
use crate::io::{write_csv, write_matrix_csv};
use crate::CliError;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let kernel = cfg.kernel()?;
    let options = cfg.condition.clone().unwrap_or_default();
    let model = StateSpaceModel::assemble_mixture(kernel, cfg.obs_noise)?;

    let mut rows = Vec::with_capacity(options.taus.len());
    for (idx, &tau) in options.taus.iter().enumerate() {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(CliError::Usage(format!("bad tau {tau}")));
        }
        let k_raw = model.k_s_raw(tau)?;
        let k_t = model.k_s(tau)?;
        let raw = model.transition_raw(tau)?;
        let trans = model.transition(tau)?;

        rows.push(vec![
            tau,
            condition_number(&k_raw),
            condition_number(&k_t),
            condition_number(&raw.a),
            condition_number(&trans.a),
            condition_number(&raw.q),
            condition_number(&trans.q),
        ]);

        if options.dump_matrices {
            let dumps = [
                ("K_raw", &k_raw),
                ("K_transformed", &k_t),
                ("A_raw", &raw.a),
                ("A_transformed", &trans.a),
                ("Q_raw", &raw.q),
                ("Q_transformed", &trans.q),
            ];
            for (name, matrix) in dumps {
                let file = out.join(format!("{name}_tau{idx}.csv"));
                write_matrix_csv(&file, name, tau, matrix)?;
            }
        }
    }
    write_csv(
        &out.join("condition.csv"),
        "tau,cond_K_raw,cond_K_transformed,cond_A_raw,cond_A_transformed,cond_Q_raw,cond_Q_transformed",
        &rows,
    )?;
    eprintln!("condition: {} lags, state dimension {}", options.taus.len(), model.dim());
    Ok(())
}
