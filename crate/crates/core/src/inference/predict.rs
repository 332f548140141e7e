//! Posterior prediction at arbitrary query times.

use crate::error::{Error, Result};
use crate::inference::kalman::filter_timeline;
use crate::inference::smoother::rts_smooth;
use crate::inference::Dataset;
use crate::ssm::StateSpaceModel;

/// Posterior marginal of the observed process at one time, in data units.
/// The variance is that of the latent function (observation noise not
/// added).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub time: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Projects state marginals onto the observed process at the matching
/// times, returning `(mean, variance)` per state in data units.
pub fn project_marginals(
    model: &StateSpaceModel,
    states: &[crate::inference::GaussianState],
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if states.len() != times.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states vs {} times",
            states.len(),
            times.len()
        )));
    }
    Ok(states
        .iter()
        .zip(times)
        .map(|(state, &t)| {
            let coefficients = model.obs_coefficients(t);
            let mut mean = num_complex::Complex64::new(0.0, 0.0);
            let mut var = num_complex::Complex64::new(0.0, 0.0);
            for &(i, ci) in &coefficients {
                mean += ci * state.mean[i];
                for &(j, cj) in &coefficients {
                    var += ci * cj.conj() * state.cov[(i, j)];
                }
            }
            (mean.re, var.re.max(0.0))
        })
        .collect())
}

/// Merges the query times into the observation timeline as unobserved
/// steps, runs the filter and smoother once, and reports the projected
/// posterior at each query time (in input order).
pub fn predict(
    model: &StateSpaceModel,
    data: &Dataset,
    query_times: &[f64],
) -> Result<Vec<Prediction>> {
    if query_times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("query times"));
    }

    // timeline entries: data points plus one pseudo-point per query
    let mut entries: Vec<(f64, Option<f64>, Option<usize>)> = Vec::new();
    for i in 0..data.len() {
        let obs = if data.observed()[i] { Some(data.values()[i]) } else { None };
        entries.push((data.times()[i], obs, None));
    }
    for (qi, &t) in query_times.iter().enumerate() {
        entries.push((t, None, Some(qi)));
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let timeline: Vec<(f64, Option<f64>)> = entries.iter().map(|&(t, y, _)| (t, y)).collect();
    let filter = filter_timeline(model, &timeline)?;
    let smoothed = rts_smooth(model, &filter)?;
    let all_times: Vec<f64> = entries.iter().map(|e| e.0).collect();
    let marginals = project_marginals(model, &smoothed, &all_times)?;

    let mut out = vec![
        Prediction { time: 0.0, mean: 0.0, variance: 0.0 };
        query_times.len()
    ];
    for (step, &(mean, variance)) in entries.iter().zip(&marginals) {
        if let Some(qi) = step.2 {
            out[qi] = Prediction { time: step.0, mean, variance };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::kalman_filter;
    use crate::kernel::{HidaMaternSpec, MixtureSpec};

    fn model(p: u32, b: f64, noise: f64) -> StateSpaceModel {
        let spec = HidaMaternSpec::new(1.0, 1.0, b, p).unwrap();
        StateSpaceModel::assemble_mixture(&MixtureSpec::single(spec), noise).unwrap()
    }

    #[test]
    fn query_at_observed_time_matches_smoothed_state() {
        let m = model(1, 0.0, 0.1);
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.4).collect();
        let values: Vec<f64> = times.iter().map(|t| (0.7 * t).sin()).collect();
        let data = Dataset::new(times.clone(), values).unwrap();

        let f = kalman_filter(&m, &data).unwrap();
        let s = rts_smooth(&m, &f).unwrap();
        let preds = predict(&m, &data, &[times[7]]).unwrap();

        let marginals = project_marginals(&m, &s, &times).unwrap();
        assert!((preds[0].mean - marginals[7].0).abs() < 1e-10);
    }

    #[test]
    fn far_extrapolation_reverts_to_prior() {
        let m = model(2, 0.0, 0.1);
        let times: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let values: Vec<f64> = times.iter().map(|t| (0.5 * t).cos()).collect();
        let data = Dataset::new(times, values).unwrap();
        let far = 6.0 + 40.0; // ~40 correlation lengths past the data
        let p = predict(&m, &data, &[far]).unwrap()[0];
        assert!((p.variance - m.prior_variance()).abs() < 0.01 * m.prior_variance());
        assert!(p.mean.abs() < 0.01);
    }

    #[test]
    fn random_queries_match_dense_predictive() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let m = model(2, 1.5, 0.1);
        let mix = m.mixture();
        let mut rng = StdRng::seed_from_u64(33);
        let mut times: Vec<f64> = (0..120).map(|_| rng.gen::<f64>() * 15.0).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let values: Vec<f64> = times.iter().map(|t| (1.1 * t).sin()).collect();
        let data = Dataset::new(times.clone(), values.clone()).unwrap();
        let queries: Vec<f64> = (0..100).map(|_| rng.gen::<f64>() * 18.0).collect();

        let preds = predict(&m, &data, &queries).unwrap();
        let k = mix.evaluator();
        let dense =
            crate::oracle::exact_posterior(&k, &times, &values, 0.1, &queries).unwrap();
        let prior_sd = m.prior_variance().sqrt();
        for (p, (dm, dv)) in preds.iter().zip(dense.mean.iter().zip(&dense.variance)) {
            assert!((p.mean - dm).abs() < 1e-6 * prior_sd, "{} vs {dm}", p.mean);
            assert!((p.variance - dv).abs() < 1e-6 * prior_sd * prior_sd);
        }
    }

    #[test]
    fn variance_grows_monotonically_beyond_data() {
        let m = model(1, 0.0, 0.05);
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let values: Vec<f64> = times.iter().map(|t| (0.3 * t).sin()).collect();
        let data = Dataset::new(times, values).unwrap();
        let queries: Vec<f64> = (0..30).map(|i| 10.0 + 0.4 * i as f64).collect();
        let preds = predict(&m, &data, &queries).unwrap();
        for w in preds.windows(2) {
            assert!(w[1].variance >= w[0].variance - 1e-12);
        }
    }
}
