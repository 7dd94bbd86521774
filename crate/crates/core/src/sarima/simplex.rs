//! Derivative-free Nelder–Mead simplex minimiser.
//!
//! Infeasible points are expressed by the objective returning `+inf`; the
//! simplex simply never accepts them.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Relative spread of objective values across the simplex.
    pub f_tol: f64,
    /// Largest coordinate distance from the best vertex.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            max_evals: 4000,
            f_tol: 1e-11,
            x_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

pub fn minimize<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evals);
        return SimplexResult {
            x: Vec::new(),
            value,
            evals,
            converged: true,
        };
    }

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p, &mut evals)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    while evals < opts.max_evals {
        // Stable sort keeps ordering deterministic under ties.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[n];
        if best.is_finite() && worst.is_finite() {
            let spread = (worst - best).abs();
            let x_spread = points[1..]
                .iter()
                .flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if spread <= opts.f_tol * (best.abs() + worst.abs() + 1e-20) && x_spread <= opts.x_tol {
                converged = true;
                break;
            }
        }

        let mut centroid = vec![0.0; n];
        for p in &points[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[n])
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };

        let reflected = along(-alpha);
        let f_r = eval(&reflected, &mut evals);
        if f_r < values[0] {
            let expanded = along(-gamma);
            let f_e = eval(&expanded, &mut evals);
            if f_e < f_r {
                points[n] = expanded;
                values[n] = f_e;
            } else {
                points[n] = reflected;
                values[n] = f_r;
            }
            continue;
        }
        if f_r < values[n - 1] {
            points[n] = reflected;
            values[n] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[n] {
            let c = along(-rho);
            let fc = eval(&c, &mut evals);
            (c, fc)
        } else {
            let c = along(rho);
            let fc = eval(&c, &mut evals);
            (c, fc)
        };
        if f_c < values[n].min(f_r) {
            points[n] = contracted;
            values[n] = f_c;
            continue;
        }
        let anchor = points[0].clone();
        for i in 1..=n {
            for (x, a) in points[i].iter_mut().zip(&anchor) {
                *x = a + sigma * (*x - a);
            }
            values[i] = eval(&points[i], &mut evals);
        }
    }

    let (best_idx, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("simplex has vertices");
    SimplexResult {
        x: points[best_idx].clone(),
        value: values[best_idx],
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + 0.5,
            &[0.0, 0.0],
            &SimplexOptions::default(),
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] + 2.0).abs() < 1e-5);
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn rosenbrock() {
        let opts = SimplexOptions {
            max_evals: 20_000,
            ..SimplexOptions::default()
        };
        let r = minimize(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &opts,
        );
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
    }

    #[test]
    fn respects_infeasible_region() {
        // Minimum of the unconstrained bowl lies at 2; feasible region is x < 1.
        let r = minimize(
            |x| if x[0] >= 1.0 { f64::INFINITY } else { (x[0] - 2.0).powi(2) },
            &[0.0],
            &SimplexOptions::default(),
        );
        assert!(r.x[0] < 1.0 && r.x[0] > 0.999, "{:?}", r.x);
    }

    #[test]
    fn zero_dimensional() {
        let r = minimize(|_| 4.0, &[], &SimplexOptions::default());
        assert_eq!(r.value, 4.0);
        assert_eq!(r.evals, 1);
    }
}
