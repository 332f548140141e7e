//! Derivative-free simplex (Nelder-Mead) minimizer.
//!
//! The search problems in this crate are low-dimensional (≤ 3L + 1
//! parameters) and their objectives are cheap but non-smooth at the edges of
//! the feasible box, which is exactly the regime where a simplex search is
//! the pragmatic choice. Deterministic given the starting point.

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    pub max_iters: usize,
    pub init_step: f64,
    pub f_tol: f64,
    pub x_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iters: 2000, init_step: 0.25, f_tol: 1e-12, x_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect()
}

/// Minimizes `f` from `x0`. Returns the best point ever evaluated, which
/// includes `x0` itself, so the result never regresses below the start.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMead) -> OptimResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // simplex: x0 plus one step along each coordinate
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.init_step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut best = simplex[0].clone();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if simplex[0].1 < best.1 {
            best = simplex[0].clone();
        }

        let spread = simplex[n].1 - simplex[0].1;
        let size: f64 = (0..n)
            .map(|i| {
                simplex[1..]
                    .iter()
                    .map(|(x, _)| (x[i] - simplex[0].0[i]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() <= opts.f_tol * (simplex[0].1.abs() + opts.f_tol) && size <= opts.x_tol {
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for i in 0..n {
                centroid[i] += x[i] / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let reflected = lerp(&centroid, &worst.0, -alpha);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = lerp(&centroid, &worst.0, -gamma);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let contracted = if fr < worst.1 {
            lerp(&centroid, &reflected, rho)
        } else {
            lerp(&centroid, &worst.0, rho)
        };
        let fc = eval(&contracted, &mut evals);
        if fc < worst.1.min(fr) {
            simplex[n] = (contracted, fc);
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            entry.0 = lerp(&anchor, &entry.0, sigma);
            entry.1 = eval(&entry.0, &mut evals);
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    if simplex[0].1 < best.1 {
        best = simplex[0].clone();
    }
    OptimResult { x: best.0, value: best.1, iterations, evaluations: evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2);
        let r = minimize(f, &[0.0, 0.0], &NelderMead::default());
        assert!((r.x[0] - 1.5).abs() < 1e-6);
        assert!((r.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(f, &[-1.2, 1.0], &NelderMead { max_iters: 5000, ..Default::default() });
        assert!(r.value < 1e-8, "value {}", r.value);
    }

    #[test]
    fn never_worse_than_start() {
        // objective riddled with NaN holes away from the start
        let f = |x: &[f64]| if x[0] > 0.1 { f64::NAN } else { 1.0 + x[0] };
        let r = minimize(f, &[0.0], &NelderMead::default());
        assert!(r.value <= 1.0);
    }
}
