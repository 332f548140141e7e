//! Stationary reference kernels used as approximation targets.

use serde::{Deserialize, Serialize};

use super::spec::{check_lag, horner, matern_poly_coeffs};
use crate::error::{Error, Result};

/// One component of a spectral-mixture kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmComponent {
    pub sigma2: f64,
    pub l: f64,
    pub b: f64,
}

/// Closed-form stationary kernels from the standard zoo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceKernel {
    /// `σ² exp(-τ²/(2l²))`
    SquaredExponential { sigma2: f64, l: f64 },
    /// `(1 + τ²/(2αl²))^{-α}`
    RationalQuadratic { alpha: f64, l: f64 },
    /// `σ² cos(2πbτ) exp(-τ²/(2l²))`
    Gabor { sigma2: f64, l: f64, b: f64 },
    /// `σ² sinc(Δτ) cos(2πbτ)` with the normalized sinc `sin(πx)/(πx)`
    Sinc { sigma2: f64, delta: f64, b: f64 },
    /// Half-integer Matérn of order `ν = p + 1/2` with length-scale `l`
    MaternHalfInteger { sigma2: f64, l: f64, p: u32 },
    /// `Σ σ_i² cos(2πb_iτ) exp(-τ²/(2l_i²))`
    SpectralMixture { components: Vec<SmComponent> },
    /// `σ² exp(-2 sin²(ω₀τ/2)/l²)`
    Periodic { sigma2: f64, l: f64, omega0: f64 },
}

impl ReferenceKernel {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| -> Result<()> {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidSpec(format!("{name} must be finite and > 0, got {v}")));
            }
            Ok(())
        };
        match self {
            Self::SquaredExponential { sigma2, l } => {
                positive("sigma2", *sigma2)?;
                positive("l", *l)
            }
            Self::RationalQuadratic { alpha, l } => {
                positive("alpha", *alpha)?;
                positive("l", *l)
            }
            Self::Gabor { sigma2, l, b } => {
                positive("sigma2", *sigma2)?;
                positive("l", *l)?;
                if !b.is_finite() || *b < 0.0 {
                    return Err(Error::InvalidSpec("b must be >= 0".into()));
                }
                Ok(())
            }
            Self::Sinc { sigma2, delta, b } => {
                positive("sigma2", *sigma2)?;
                positive("delta", *delta)?;
                if !b.is_finite() || *b < 0.0 {
                    return Err(Error::InvalidSpec("b must be >= 0".into()));
                }
                Ok(())
            }
            Self::MaternHalfInteger { sigma2, l, p } => {
                positive("sigma2", *sigma2)?;
                positive("l", *l)?;
                if *p > super::spec::MAX_SMOOTHNESS {
                    return Err(Error::InvalidSpec(format!("p = {p} too large")));
                }
                Ok(())
            }
            Self::SpectralMixture { components } => {
                if components.is_empty() {
                    return Err(Error::EmptyMixture);
                }
                for c in components {
                    positive("sigma2", c.sigma2)?;
                    positive("l", c.l)?;
                    if !c.b.is_finite() || c.b < 0.0 {
                        return Err(Error::InvalidSpec("b must be >= 0".into()));
                    }
                }
                Ok(())
            }
            Self::Periodic { sigma2, l, omega0 } => {
                positive("sigma2", *sigma2)?;
                positive("l", *l)?;
                positive("omega0", *omega0)
            }
        }
    }

    /// Kernel value at lag `τ ≥ 0`.
    pub fn eval(&self, tau: f64) -> Result<f64> {
        check_lag(tau)?;
        Ok(self.value(tau))
    }

    pub(crate) fn value(&self, tau: f64) -> f64 {
        match self {
            Self::SquaredExponential { sigma2, l } => sigma2 * (-0.5 * (tau / l).powi(2)).exp(),
            Self::RationalQuadratic { alpha, l } => {
                (1.0 + tau * tau / (2.0 * alpha * l * l)).powf(-alpha)
            }
            Self::Gabor { sigma2, l, b } => {
                sigma2
                    * (2.0 * std::f64::consts::PI * b * tau).cos()
                    * (-0.5 * (tau / l).powi(2)).exp()
            }
            Self::Sinc { sigma2, delta, b } => {
                sigma2 * sinc(delta * tau) * (2.0 * std::f64::consts::PI * b * tau).cos()
            }
            Self::MaternHalfInteger { sigma2, l, p } => {
                let nu = *p as f64 + 0.5;
                let a = (2.0 * nu).sqrt() / l;
                let coeffs = matern_poly_coeffs(*p, a);
                sigma2 * horner(&coeffs, tau) * (-a * tau).exp()
            }
            Self::SpectralMixture { components } => components
                .iter()
                .map(|c| {
                    c.sigma2
                        * (2.0 * std::f64::consts::PI * c.b * tau).cos()
                        * (-0.5 * (tau / c.l).powi(2)).exp()
                })
                .sum(),
            Self::Periodic { sigma2, l, omega0 } => {
                sigma2 * (-2.0 * (omega0 * tau / 2.0).sin().powi(2) / (l * l)).exp()
            }
        }
    }

    /// Boxed evaluator for generic-closure call sites.
    pub fn evaluator(&self) -> impl Fn(f64) -> f64 + Send + Sync {
        let k = self.clone();
        move |tau| k.value(tau)
    }
}

fn sinc(x: f64) -> f64 {
    let z = std::f64::consts::PI * x;
    if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}
