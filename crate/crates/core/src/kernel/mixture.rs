//! Nonnegative mixtures of elementary kernels.

use serde::{Deserialize, Serialize};

use super::spec::{check_lag, horner, HidaMaternSpec};
use crate::error::{Error, Result};

/// One weighted mixand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub spec: HidaMaternSpec,
}

/// Weighted sum `k(τ) = Σ_i c_i k_i(τ)` of elementary kernels. Serializes to
/// the flat component list `{"components":[{"sigma2":…,"a":…,"b":…,"p":…,
/// "weight":…}]}` shared with the command-line tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureSpecJson", into = "MixtureSpecJson")]
pub struct MixtureSpec {
    components: Vec<MixtureComponent>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    sigma2: f64,
    a: f64,
    b: f64,
    p: u32,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct MixtureSpecJson {
    components: Vec<ComponentJson>,
}

impl From<MixtureSpec> for MixtureSpecJson {
    fn from(m: MixtureSpec) -> Self {
        MixtureSpecJson {
            components: m
                .components
                .iter()
                .map(|c| ComponentJson {
                    sigma2: c.spec.sigma2,
                    a: c.spec.a,
                    b: c.spec.b,
                    p: c.spec.p,
                    weight: c.weight,
                })
                .collect(),
        }
    }
}

impl TryFrom<MixtureSpecJson> for MixtureSpec {
    type Error = Error;
    fn try_from(j: MixtureSpecJson) -> Result<Self> {
        MixtureSpec::new(
            j.components
                .into_iter()
                .map(|c| {
                    Ok(MixtureComponent {
                        weight: c.weight,
                        spec: HidaMaternSpec::new(c.sigma2, c.a, c.b, c.p)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl MixtureSpec {
    /// Validates: every weight nonnegative and finite, at least one positive.
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyMixture);
        }
        for c in &components {
            c.spec.validate()?;
            if !c.weight.is_finite() || c.weight < 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "component weight must be finite and >= 0, got {}",
                    c.weight
                )));
            }
        }
        if !components.iter().any(|c| c.weight > 0.0) {
            return Err(Error::EmptyMixture);
        }
        Ok(Self { components })
    }

    /// Single-component mixture with unit weight.
    pub fn single(spec: HidaMaternSpec) -> Self {
        Self {
            components: vec![MixtureComponent { weight: 1.0, spec }],
        }
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Total Markov order `N = Σ (p_i + 1)`, the state dimension of the
    /// block model.
    pub fn total_order(&self) -> usize {
        self.components.iter().map(|c| c.spec.order()).sum()
    }

    /// Mixture variance `k(0) = Σ c_i σ_i²`.
    pub fn variance(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.spec.sigma2).sum()
    }

    /// Mixture value at lag `τ ≥ 0`.
    pub fn eval(&self, tau: f64) -> Result<f64> {
        check_lag(tau)?;
        Ok(self.value(tau))
    }

    pub(crate) fn value(&self, tau: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.spec.kernel_value(tau))
            .sum()
    }

    /// Closure with precomputed per-component coefficients.
    pub fn evaluator(&self) -> impl Fn(f64) -> f64 + Send + Sync {
        let parts: Vec<(f64, f64, f64, Vec<f64>)> = self
            .components
            .iter()
            .map(|c| {
                (
                    c.weight * c.spec.sigma2,
                    c.spec.a,
                    c.spec.b,
                    c.spec.matern_poly_coeffs(),
                )
            })
            .collect();
        move |tau: f64| {
            parts
                .iter()
                .map(|(w, a, b, coeffs)| w * (b * tau).cos() * horner(coeffs, tau) * (-a * tau).exp())
                .sum()
        }
    }

    /// Spectral density of the mixture (sum of component densities).
    pub fn eval_psd(&self, omega: f64) -> Result<f64> {
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.weight * c.spec.eval_psd(omega)?;
        }
        Ok(acc)
    }

    /// Components sorted by (b, a, weight); canonical order for reporting.
    pub fn sorted(&self) -> MixtureSpec {
        let mut components = self.components.clone();
        components.sort_by(|x, y| {
            (x.spec.b, x.spec.a, x.weight)
                .partial_cmp(&(y.spec.b, y.spec.a, y.weight))
                .unwrap()
        });
        MixtureSpec { components }
    }
}

/// Truncated cosine-series expansion of the periodic kernel
/// `k(τ) = σ² exp(-2 sin²(ω₀τ/2) / l²)` as a mixture. Each retained harmonic
/// `cos(ω₀ s τ)` becomes a mixand with `b = ω₀ s` and decay rate set to the
/// small floor `a_min` (default `1e-4 ω₀`): the exact harmonic is the `a → 0`
/// limit, which sits outside the admissible family.
///
/// Terms are accumulated from the double series
/// `σ² e^{-g} Σ_q (g^q / q!) 2^{-q} Σ_v C(q, v) cos(ω₀ (q - 2v) τ)` with
/// `g = 1/l²`, truncated at `q = L`, and merged by harmonic index
/// `s = |q - 2v|`.
pub fn periodic_to_mixture(
    sigma2: f64,
    l: f64,
    omega0: f64,
    truncation: u32,
    a_floor: Option<f64>,
) -> Result<MixtureSpec> {
    if !(sigma2.is_finite() && l.is_finite() && omega0.is_finite()) {
        return Err(Error::NonFinite("periodic kernel parameters"));
    }
    if sigma2 <= 0.0 || l <= 0.0 || omega0 <= 0.0 {
        return Err(Error::InvalidSpec(
            "periodic kernel needs sigma2 > 0, l > 0, omega0 > 0".into(),
        ));
    }
    let a_min = a_floor.unwrap_or(1e-4 * omega0);
    let g = 1.0 / (l * l);
    let base = sigma2 * (-g).exp();

    // weights per harmonic index s = |q - 2v|
    let mut weights = vec![0.0f64; truncation as usize + 1];
    let mut gq_over_qfact = 1.0; // g^q / q!
    for q in 0..=truncation as usize {
        if q > 0 {
            gq_over_qfact *= g / q as f64;
        }
        let half_pow = 0.5f64.powi(q as i32);
        let mut binom = 1.0; // C(q, v)
        for v in 0..=q {
            if v > 0 {
                binom *= (q - v + 1) as f64 / v as f64;
            }
            let s = (q as i64 - 2 * v as i64).unsigned_abs() as usize;
            weights[s] += base * gq_over_qfact * half_pow * binom;
        }
    }

    let components = weights
        .into_iter()
        .enumerate()
        .map(|(s, w)| {
            Ok(MixtureComponent {
                weight: w,
                spec: HidaMaternSpec::new(1.0, a_min, s as f64 * omega0, 0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MixtureSpec::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s2: f64, a: f64, b: f64, p: u32) -> HidaMaternSpec {
        HidaMaternSpec::new(s2, a, b, p).unwrap()
    }

    #[test]
    fn single_component_reduces_to_kernel() {
        let s = spec(1.4, 0.9, 2.0, 2);
        let mix = MixtureSpec::single(s);
        for &tau in &[0.0, 0.7, 3.0] {
            assert_eq!(mix.eval(tau).unwrap(), s.eval_kernel(tau).unwrap());
        }
    }

    #[test]
    fn two_equal_components_double_the_value() {
        let s = spec(1.0, 1.0, 0.0, 1);
        let mix = MixtureSpec::new(vec![
            MixtureComponent { weight: 1.0, spec: s },
            MixtureComponent { weight: 1.0, spec: s },
        ])
        .unwrap();
        let tau = 0.8;
        assert!((mix.eval(tau).unwrap() - 2.0 * s.eval_kernel(tau).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn empty_and_zero_weight_mixtures_rejected() {
        assert!(matches!(MixtureSpec::new(vec![]), Err(Error::EmptyMixture)));
        let z = MixtureSpec::new(vec![MixtureComponent {
            weight: 0.0,
            spec: spec(1.0, 1.0, 0.0, 0),
        }]);
        assert!(matches!(z, Err(Error::EmptyMixture)));
        let neg = MixtureSpec::new(vec![MixtureComponent {
            weight: -0.1,
            spec: spec(1.0, 1.0, 0.0, 0),
        }]);
        assert!(neg.is_err());
    }

    #[test]
    fn seasonal_plus_trend_variance_at_origin() {
        // the two-component long-horizon configuration: variance at the
        // origin is the sum of the weighted component variances
        let mix = MixtureSpec::new(vec![
            MixtureComponent {
                weight: 0.05 * 0.05,
                spec: spec(1.0, 1.0 / 25.0, 2.0 * std::f64::consts::PI, 3),
            },
            MixtureComponent {
                weight: 2.3 * 2.3,
                spec: spec(1.0, 1.0 / 100.0, 0.0, 3),
            },
        ])
        .unwrap();
        assert!((mix.eval(0.0).unwrap() - (0.05f64.powi(2) + 2.3f64.powi(2))).abs() < 1e-15);
        assert_eq!(mix.total_order(), 8);
    }

    #[test]
    fn json_round_trip() {
        let mix = MixtureSpec::new(vec![
            MixtureComponent { weight: 0.25, spec: spec(1.0, 0.04, std::f64::consts::TAU, 3) },
            MixtureComponent { weight: 5.29, spec: spec(1.0, 0.01, 0.0, 3) },
        ])
        .unwrap();
        let json = serde_json::to_string(&mix).unwrap();
        assert!(json.contains("\"components\""));
        let back: MixtureSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(mix, back);
        // invalid payloads are rejected on parse
        let bad = r#"{"components":[{"sigma2":-1.0,"a":1.0,"b":0.0,"p":0,"weight":1.0}]}"#;
        assert!(serde_json::from_str::<MixtureSpec>(bad).is_err());
    }

    #[test]
    fn periodic_truncation_zeroth_term() {
        // L = 0 keeps only the constant-like q = 0 term with weight e^{-g};
        // at l = 1 that is e^{-1}.
        let mix = periodic_to_mixture(1.0, 1.0, 2.0 * std::f64::consts::PI, 0, None).unwrap();
        assert_eq!(mix.len(), 1);
        assert!((mix.components()[0].weight - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(mix.components()[0].spec.b, 0.0);
    }

    #[test]
    fn periodic_expansion_converges_pointwise() {
        let (s2, l, w0) = (1.0, 1.0, 2.0 * std::f64::consts::PI);
        let exact = |tau: f64| s2 * (-2.0 * (w0 * tau / 2.0).sin().powi(2) / (l * l)).exp();
        // the default decay floor 1e-4·ω₀ alone injects ~1.3e-3 amplitude
        // error by τ = 2; tighten it so the series truncation dominates
        let mix = periodic_to_mixture(s2, l, w0, 6, Some(1e-6 * w0)).unwrap();
        let mut max_err: f64 = 0.0;
        let mut tau = 0.0;
        while tau <= 2.0 {
            max_err = max_err.max((mix.eval(tau).unwrap() - exact(tau)).abs());
            tau += 0.01;
        }
        assert!(max_err < 1e-3, "max pointwise error {max_err}");
        // and the origin defect is within the exp-series truncation error
        let origin_gap = (mix.eval(0.0).unwrap() - s2).abs();
        assert!(origin_gap < 1e-3);
        // the default floor stays within the coarser budget
        let dflt = periodic_to_mixture(s2, l, w0, 6, None).unwrap();
        let mut dflt_err: f64 = 0.0;
        let mut tau = 0.0;
        while tau <= 2.0 {
            dflt_err = dflt_err.max((dflt.eval(tau).unwrap() - exact(tau)).abs());
            tau += 0.01;
        }
        assert!(dflt_err < 3e-3, "default-floor error {dflt_err}");
    }

    #[test]
    fn periodic_truncation_error_is_monotone() {
        let (s2, l, w0) = (1.0, 1.0, 2.0 * std::f64::consts::PI);
        let exact = |tau: f64| s2 * (-2.0 * (w0 * tau / 2.0).sin().powi(2) / (l * l)).exp();
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let mut prev = f64::INFINITY;
        for trunc in [0u32, 1, 2, 3, 4, 6, 8] {
            let mix = periodic_to_mixture(s2, l, w0, trunc, None).unwrap();
            let err: f64 = grid
                .iter()
                .map(|&t| (mix.eval(t).unwrap() - exact(t)).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err <= prev + 1e-12, "error grew at truncation {trunc}");
            prev = err;
        }
    }
}
