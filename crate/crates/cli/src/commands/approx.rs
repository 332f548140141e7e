//! `hm approx`: fit a mixture to a named reference kernel and emit the
//! fitted mixture plus lag- and spectral-domain comparison curves.

use std::path::Path;

use hida_matern::approx::{fit_mixture, numeric_psd, ApproxTarget, FitProblem, FitTemplate};
use hida_matern::kernel::{ReferenceKernel, SmComponent};

use crate::config::ExperimentConfig;
use crate::io::write_csv;
use crate::io::write_json;
use crate::CliError;

fn param(params: &serde_json::Value, key: &str, default: f64) -> Result<f64, CliError> {
    match params.get(key) {
        None => Ok(default),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| CliError::Usage(format!("approx parameter {key:?} must be a number"))),
    }
}

/// Maps a target name plus parameter object onto a reference kernel.
/// Unknown names are usage errors.
pub fn parse_target(name: &str, params: &serde_json::Value) -> Result<ReferenceKernel, CliError> {
    let sigma2 = param(params, "sigma2", 1.0)?;
    let l = param(params, "l", 1.0)?;
    let kernel = match name {
        "se" | "squared_exponential" => ReferenceKernel::SquaredExponential { sigma2, l },
        "rq" | "rational_quadratic" => {
            ReferenceKernel::RationalQuadratic { alpha: param(params, "alpha", 1.0)?, l }
        }
        "gabor" => ReferenceKernel::Gabor { sigma2, l, b: param(params, "b", 0.25)? },
        "sinc" => ReferenceKernel::Sinc {
            sigma2,
            delta: param(params, "delta", 1.0)?,
            b: param(params, "b", 0.0)?,
        },
        "matern12" | "matern32" | "matern52" | "matern72" => {
            let p = match name {
                "matern12" => 0,
                "matern32" => 1,
                "matern52" => 2,
                _ => 3,
            };
            ReferenceKernel::MaternHalfInteger { sigma2, l, p }
        }
        "matern" => ReferenceKernel::MaternHalfInteger {
            sigma2,
            l,
            p: param(params, "p", 1.0)? as u32,
        },
        "sm" | "spectral_mixture" => {
            let components = match params.get("components") {
                Some(serde_json::Value::Array(list)) => list
                    .iter()
                    .map(|c| {
                        Ok(SmComponent {
                            sigma2: param(c, "sigma2", 1.0)?,
                            l: param(c, "l", 1.0)?,
                            b: param(c, "b", 0.0)?,
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?,
                _ => vec![
                    SmComponent { sigma2: 1.5 * 1.5, l: 2.0, b: 0.01 },
                    SmComponent { sigma2: 1.5 * 1.5, l: 2.0, b: 0.05 },
                ],
            };
            ReferenceKernel::SpectralMixture { components }
        }
        "periodic" => ReferenceKernel::Periodic {
            sigma2,
            l,
            omega0: param(params, "omega0", 2.0 * std::f64::consts::PI)?,
        },
        other => {
            return Err(CliError::Usage(format!(
                "unknown reference kernel {other:?} (try: se, rq, gabor, sinc, matern12/32/52/72, matern, sm, periodic)"
            )))
        }
    };
    kernel
        .validate()
        .map_err(|e| CliError::Usage(format!("bad target parameters: {e}")))?;
    Ok(kernel)
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    let options = cfg
        .approx
        .as_ref()
        .ok_or_else(|| CliError::Usage("approx needs an \"approx\" section in the config".into()))?;
    let reference = parse_target(&options.target, &options.params)?;
    let template = FitTemplate { mixands: options.mixands, order: options.order };
    let problem = FitProblem::auto(ApproxTarget::Reference(reference.clone()), template)?;
    let fit = fit_mixture(&problem, options.restarts, cfg.seed)?;

    write_json(&out.join("approx_mixture.json"), &fit.mixture)?;

    // lag-domain comparison on the fit grid (thinned to 512 rows)
    let k_fit = fit.mixture.evaluator();
    let stride = (problem.grid.taus.len() / 512).max(1);
    let tau_rows: Vec<Vec<f64>> = problem
        .grid
        .taus
        .iter()
        .step_by(stride)
        .map(|&t| vec![t, reference.value_at(t), k_fit(t)])
        .collect();
    write_csv(&out.join("approx_tau.csv"), "tau,k_ref,k_fit", &tau_rows)?;

    // spectral-domain comparison: numeric transform of the reference against
    // the analytic mixture spectrum
    let omega_max = fit
        .mixture
        .components()
        .iter()
        .map(|c| c.spec.b + 30.0 * c.spec.a)
        .fold(1.0f64, f64::max);
    let n = 512;
    let reference_eval = |t: f64| reference.value_at(t);
    let psd_rows: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            let omega = -omega_max + 2.0 * omega_max * i as f64 / n as f64;
            let s_ref = numeric_psd(&reference_eval, &problem.grid, omega);
            let s_fit = fit.mixture.eval_psd(omega).unwrap_or(f64::NAN);
            vec![omega, s_ref, s_fit]
        })
        .collect();
    write_csv(&out.join("approx_psd.csv"), "omega,S_ref,S_fit", &psd_rows)?;

    eprintln!(
        "approx: target {} -> relative L2 error {:.3e} ({} objective evaluations)",
        options.target, fit.relative_error, fit.evaluations
    );
    Ok(())
}

trait ValueAt {
    fn value_at(&self, tau: f64) -> f64;
}
impl ValueAt for ReferenceKernel {
    fn value_at(&self, tau: f64) -> f64 {
        self.eval(tau).unwrap_or(f64::NAN)
    }
}
