//! L² approximation of arbitrary stationary kernels by kernel mixtures.
//!
//! Any square-integrable stationary kernel can be approached by mixtures of
//! the elementary cosine-modulated Matérns; this module makes that
//! operational: pick a template (number of mixands, fixed order), minimize
//! the squared distance on a lag grid over `(log a_i, b_i, log c_i)`, and
//! report the relative error. By Parseval the same objective also drives the
//! spectral densities together, which the ω-domain distance helper exposes
//! for checking.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::exec;
use crate::kernel::{HidaMaternSpec, MixtureComponent, MixtureSpec, ReferenceKernel};
use crate::optim::{minimize, NelderMead};

/// What to approximate: a closed-form reference kernel, an in-family
/// mixture, or tabulated samples (piecewise-linearly interpolated).
#[derive(Debug, Clone)]
pub enum ApproxTarget {
    Reference(ReferenceKernel),
    Mixture(MixtureSpec),
    Sampled { taus: Vec<f64>, values: Vec<f64> },
}

impl ApproxTarget {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Reference(r) => r.validate(),
            Self::Mixture(_) => Ok(()),
            Self::Sampled { taus, values } => {
                if taus.len() != values.len() || taus.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "sampled target needs >= 2 (tau, value) pairs".into(),
                    ));
                }
                if taus.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument("sampled taus must be increasing".into()));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        match self {
            Self::Reference(r) => r.value(tau),
            Self::Mixture(m) => m.value(tau),
            Self::Sampled { taus, values } => {
                if tau <= taus[0] {
                    return values[0];
                }
                if tau >= *taus.last().unwrap() {
                    return *values.last().unwrap();
                }
                let idx = taus.partition_point(|&t| t <= tau) - 1;
                let w = (tau - taus[idx]) / (taus[idx + 1] - taus[idx]);
                values[idx] * (1.0 - w) + values[idx + 1] * w
            }
        }
    }
}

/// Template: `mixands` components, each of fixed smoothness `order`.
#[derive(Debug, Clone, Copy)]
pub struct FitTemplate {
    pub mixands: usize,
    pub order: u32,
}

/// Box constraints on the searched hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct FitBounds {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
}

impl Default for FitBounds {
    fn default() -> Self {
        Self { a: (0.05, 100.0), b: (0.0, 200.0), c: (1e-10, 1e6) }
    }
}

/// Quadrature grid on `[0, T]` with trapezoid weights.
#[derive(Debug, Clone)]
pub struct Grid {
    pub taus: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn uniform(t_max: f64, nodes: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) || nodes < 2 {
            return Err(Error::InvalidArgument("grid needs t_max > 0 and >= 2 nodes".into()));
        }
        let h = t_max / (nodes - 1) as f64;
        let taus: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
        let mut weights = vec![h; nodes];
        weights[0] = 0.5 * h;
        weights[nodes - 1] = 0.5 * h;
        Ok(Self { taus, weights })
    }

    pub fn span(&self) -> f64 {
        *self.taus.last().unwrap()
    }
}

/// A target, a template, a grid, and bounds.
#[derive(Debug, Clone)]
pub struct FitProblem {
    pub target: ApproxTarget,
    pub template: FitTemplate,
    pub grid: Grid,
    pub bounds: FitBounds,
}

pub const DEFAULT_GRID_NODES: usize = 2048;

impl FitProblem {
    /// Auto-selects the grid: `T` is the first lag from which `|k_ref|`
    /// stays below `1e-6 k_ref(0)` (a sustained window, so a single zero
    /// crossing of an oscillatory target does not truncate the grid), capped
    /// at `1000 / a_min`; 2048 trapezoid nodes.
    pub fn auto(target: ApproxTarget, template: FitTemplate) -> Result<Self> {
        Self::auto_with_bounds(target, template, FitBounds::default())
    }

    pub fn auto_with_bounds(
        target: ApproxTarget,
        template: FitTemplate,
        bounds: FitBounds,
    ) -> Result<Self> {
        target.validate()?;
        if template.mixands == 0 {
            return Err(Error::InvalidArgument("need at least one mixand".into()));
        }
        let cap = 1000.0 / bounds.a.0;
        let k0 = target.eval(0.0).abs().max(f64::MIN_POSITIVE);
        let probe = cap / 200_000.0;
        let mut quiet = 0usize;
        let mut t_end = cap;
        let mut tau = 0.0;
        while tau < cap {
            tau += probe;
            if target.eval(tau).abs() < 1e-6 * k0 {
                quiet += 1;
                if quiet >= 64 {
                    t_end = tau;
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        Ok(Self {
            target,
            template,
            grid: Grid::uniform(t_end, DEFAULT_GRID_NODES)?,
            bounds,
        })
    }
}

/// Trapezoid approximation of `∫_0^T (k_ref(τ) - k_mix(τ))² dτ`.
pub fn l2_distance(
    reference: &(dyn Fn(f64) -> f64 + Sync),
    mix: &MixtureSpec,
    grid: &Grid,
) -> f64 {
    let k = mix.evaluator();
    grid.taus
        .iter()
        .zip(&grid.weights)
        .map(|(&t, &w)| {
            let d = reference(t) - k(t);
            w * d * d
        })
        .sum()
}

/// Grid squared norm `∫_0^T k_ref(τ)² dτ` used for relative errors.
pub fn reference_norm2(reference: &(dyn Fn(f64) -> f64 + Sync), grid: &Grid) -> f64 {
    grid.taus
        .iter()
        .zip(&grid.weights)
        .map(|(&t, &w)| {
            let v = reference(t);
            w * v * v
        })
        .sum()
}

/// Result of a mixture fit, components in canonical (b, a) order.
#[derive(Debug, Clone)]
pub struct MixtureFit {
    pub mixture: MixtureSpec,
    pub distance: f64,
    pub relative_error: f64,
    pub evaluations: usize,
}

// parameters per mixand: (ln a, b, ln c)
fn theta_to_mixture(theta: &[f64], template: &FitTemplate) -> Result<MixtureSpec> {
    let mut components = Vec::with_capacity(template.mixands);
    for i in 0..template.mixands {
        components.push(MixtureComponent {
            weight: theta[3 * i + 2].exp(),
            spec: HidaMaternSpec::new(1.0, theta[3 * i].exp(), theta[3 * i + 1].abs(), template.order)?,
        });
    }
    MixtureSpec::new(components)
}

fn bounds_penalty(theta: &[f64], bounds: &FitBounds, mixands: usize) -> f64 {
    let mut pen = 0.0;
    let mut push = |v: f64, lo: f64, hi: f64| {
        if v < lo {
            pen += (lo - v).powi(2);
        } else if v > hi {
            pen += (v - hi).powi(2);
        }
    };
    for i in 0..mixands {
        push(theta[3 * i], bounds.a.0.ln(), bounds.a.1.ln());
        push(theta[3 * i + 1].abs(), bounds.b.0, bounds.b.1);
        push(theta[3 * i + 2], bounds.c.0.ln(), bounds.c.1.ln());
    }
    1e3 * pen
}

/// Multi-start simplex minimization of the squared lag-domain distance.
/// Restarts initialize log-uniformly over the feasible box (seeded, so the
/// whole search is deterministic) and reduce to the best candidate with ties
/// broken by start index; the winner gets one polish run. The relative error
/// reported is `distance / ‖k_ref‖²` on the same grid.
pub fn fit_mixture(problem: &FitProblem, restarts: usize, seed: u64) -> Result<MixtureFit> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    problem.target.validate()?;
    let template = problem.template;
    let target = &problem.target;
    let grid = &problem.grid;
    let bounds = problem.bounds;

    let reference = |tau: f64| target.eval(tau);
    let norm2 = reference_norm2(&reference, grid).max(f64::MIN_POSITIVE);

    let objective = |theta: &[f64]| -> f64 {
        let pen = bounds_penalty(theta, &bounds, template.mixands);
        match theta_to_mixture(theta, &template) {
            Ok(mix) => l2_distance(&reference, &mix, grid) + pen,
            Err(_) => f64::INFINITY,
        }
    };

    // characteristic decay rate from the grid span
    let r0 = 5.0 / grid.span();
    let k0 = target.eval(0.0).abs().max(1e-12);
    let opts = NelderMead { max_iters: 4000, init_step: 0.3, f_tol: 1e-14, x_tol: 1e-12 };

    let starts: Vec<usize> = (0..restarts).collect();
    let runs = exec::map(starts, |start| {
        let mut theta = Vec::with_capacity(3 * template.mixands);
        if start == 0 {
            // deterministic spread start
            for i in 0..template.mixands {
                theta.push((2.0 * r0).max(bounds.a.0).min(bounds.a.1).ln());
                theta.push((i as f64) * (25.0 / grid.span()) / template.mixands.max(1) as f64);
                theta.push((k0 / template.mixands as f64).ln());
            }
        } else {
            let mut rng =
                StdRng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(start as u64));
            for _ in 0..template.mixands {
                let a_lo = (0.5 * r0).max(bounds.a.0);
                let a_hi = (150.0 * r0).min(bounds.a.1).max(a_lo * 1.0001);
                theta.push(rng.gen_range(a_lo.ln()..a_hi.ln()));
                let b_hi = (50.0 / grid.span()).min(bounds.b.1).max(1e-6);
                theta.push(rng.gen_range(0.0..b_hi));
                let c_mid = (k0 / template.mixands as f64).max(1e-12);
                theta.push(rng.gen_range((0.2 * c_mid).ln()..(2.0 * c_mid).ln()));
            }
        }
        let r = minimize(objective, &theta, &opts);
        (r.value, start, r.x, r.evaluations)
    });

    let mut runs = runs;

    // nested warm start: the best fit one mixand smaller, padded with a
    // negligible component. Keeps the achieved error non-increasing in the
    // template size and gives the simplex a structured initialization that
    // random restarts rarely find on their own.
    if template.mixands > 1 {
        let sub_problem = FitProblem {
            target: problem.target.clone(),
            template: FitTemplate { mixands: template.mixands - 1, order: template.order },
            grid: problem.grid.clone(),
            bounds,
        };
        let sub = fit_mixture(&sub_problem, restarts, seed)?;
        let mut theta = Vec::with_capacity(3 * template.mixands);
        for c in sub.mixture.components() {
            theta.push(c.spec.a.ln());
            theta.push(c.spec.b);
            theta.push((c.weight * c.spec.sigma2).max(1e-12).ln());
        }
        theta.push((2.0 * r0).max(bounds.a.0).min(bounds.a.1).ln());
        theta.push(0.0);
        theta.push(1e-12f64.ln());
        let r = minimize(objective, &theta, &opts);
        runs.push((r.value, restarts, r.x, r.evaluations + sub.evaluations));
    }

    let best = runs
        .iter()
        .min_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap())
        .expect("at least one start");
    if !best.0.is_finite() {
        return Err(Error::OptimizationFailed("all starts diverged".into()));
    }
    let polish = minimize(objective, &best.2, &opts);
    let (theta_best, value_best) = if polish.value <= best.0 {
        (polish.x.clone(), polish.value)
    } else {
        (best.2.clone(), best.0)
    };

    let mixture = theta_to_mixture(&theta_best, &template)?.sorted();
    let distance = l2_distance(&reference, &mixture, grid);
    let _ = value_best;
    Ok(MixtureFit {
        mixture,
        distance,
        relative_error: distance / norm2,
        evaluations: runs.iter().map(|r| r.3).sum::<usize>() + polish.evaluations,
    })
}

/// Numeric spectral density of a lag-domain evaluator by cosine transform on
/// the grid: `S(ω) = 2 ∫_0^T k(τ) cos(ωτ) dτ`.
pub fn numeric_psd(reference: &(dyn Fn(f64) -> f64 + Sync), grid: &Grid, omega: f64) -> f64 {
    2.0 * grid
        .taus
        .iter()
        .zip(&grid.weights)
        .map(|(&t, &w)| w * reference(t) * (omega * t).cos())
        .sum::<f64>()
}

/// One-sided spectral-domain squared distance
/// `(1/4π) ∫_{-Ω}^{Ω} (S_ref - S_mix)² dω`, which by Parseval equals the
/// lag-domain `∫_0^∞ (k_ref - k_mix)² dτ` once `Ω` covers both spectra. The
/// reference spectrum is the numeric cosine transform of the evaluator; the
/// mixture spectrum is analytic.
pub fn psd_squared_distance(
    reference: &(dyn Fn(f64) -> f64 + Sync),
    mix: &MixtureSpec,
    grid: &Grid,
) -> Result<f64> {
    // cover the mixture spectrum, the reference spectrum, and stay under the
    // grid's resolvable band
    let mut omega_max = mix
        .components()
        .iter()
        .map(|c| c.spec.b + 40.0 * c.spec.a)
        .fold(0.0f64, f64::max);
    let s0 = numeric_psd(reference, grid, 0.0).abs().max(f64::MIN_POSITIVE);
    let nyquist = std::f64::consts::PI / (grid.taus[1] - grid.taus[0]);
    let mut probe = omega_max.max(1.0);
    while probe < 0.5 * nyquist && numeric_psd(reference, grid, probe).abs() > 1e-8 * s0 {
        probe *= 1.25;
    }
    omega_max = omega_max.max(probe).min(0.5 * nyquist);

    let nodes = 4096usize;
    let h = 2.0 * omega_max / nodes as f64;
    let mut acc = 0.0;
    for i in 0..=nodes {
        let omega = -omega_max + i as f64 * h;
        let trap = if i == 0 || i == nodes { 0.5 } else { 1.0 };
        let d = numeric_psd(reference, grid, omega) - mix.eval_psd(omega)?;
        acc += trap * d * d;
    }
    Ok(acc * h / (4.0 * std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn se_target() -> ApproxTarget {
        ApproxTarget::Reference(ReferenceKernel::SquaredExponential { sigma2: 1.0, l: 1.0 })
    }

    #[test]
    fn distance_to_itself_is_zero() {
        let mix = MixtureSpec::single(HidaMaternSpec::new(1.0, 1.0, 0.0, 2).unwrap());
        let grid = Grid::uniform(20.0, 512).unwrap();
        let k = mix.evaluator();
        assert_eq!(l2_distance(&k, &mix, &grid), 0.0);
    }

    #[test]
    fn distance_shrinks_as_rates_converge() {
        let grid = Grid::uniform(15.0, 512).unwrap();
        let base = HidaMaternSpec::new(1.0, 1.0, 0.0, 0).unwrap();
        let k = base.evaluator();
        let d15 = l2_distance(&k, &MixtureSpec::single(HidaMaternSpec::new(1.0, 1.5, 0.0, 0).unwrap()), &grid);
        let d12 = l2_distance(&k, &MixtureSpec::single(HidaMaternSpec::new(1.0, 1.2, 0.0, 0).unwrap()), &grid);
        assert!(d15 > 0.0 && d12 > 0.0 && d12 < d15);
    }

    #[test]
    fn grid_refinement_is_consistent() {
        // best single third-order fit distance evaluated on a 10x finer grid
        // moves by < 1%
        let target = se_target();
        let problem = FitProblem::auto(target.clone(), FitTemplate { mixands: 1, order: 2 }).unwrap();
        let fit = fit_mixture(&problem, 4, 17).unwrap();
        let fine = Grid::uniform(problem.grid.span(), 10 * DEFAULT_GRID_NODES).unwrap();
        let reference = |t: f64| target.eval(t);
        let d_fine = l2_distance(&reference, &fit.mixture, &fine);
        assert!(
            (d_fine - fit.distance).abs() <= 0.01 * fit.distance.max(1e-12),
            "coarse {} vs fine {}",
            fit.distance,
            d_fine
        );
    }

    #[test]
    fn in_family_target_is_recovered() {
        let truth = HidaMaternSpec::new(1.0, 1.3, 2.0, 2).unwrap();
        let target = ApproxTarget::Mixture(MixtureSpec::single(truth));
        let problem = FitProblem::auto(target, FitTemplate { mixands: 1, order: 2 }).unwrap();
        let fit = fit_mixture(&problem, 8, 3).unwrap();
        assert!(fit.relative_error < 1e-8, "relative error {}", fit.relative_error);
        let c = fit.mixture.components()[0];
        assert!((c.spec.a - 1.3).abs() / 1.3 < 0.01, "a = {}", c.spec.a);
        assert!((c.spec.b - 2.0).abs() / 2.0 < 0.01, "b = {}", c.spec.b);
        assert!((c.weight - 1.0).abs() < 0.01, "c = {}", c.weight);
    }

    #[test]
    fn sampled_target_interpolates() {
        let t = ApproxTarget::Sampled { taus: vec![0.0, 1.0, 2.0], values: vec![1.0, 0.5, 0.0] };
        t.validate().unwrap();
        assert_eq!(t.eval(0.5), 0.75);
        assert_eq!(t.eval(5.0), 0.0);
    }
}
