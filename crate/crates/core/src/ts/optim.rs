//! Derivative-free simplex minimizer used by the model fitters.

/// Minimize `f` from `start` with Nelder-Mead, restarting the simplex at
/// the incumbent a couple of times to escape premature collapse.
///
/// Stops a pass when the objective spread across the simplex falls below
/// `tol` or the evaluation budget `max_evals` is spent.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    start: &[f64],
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64) {
    let mut best_x = start.to_vec();
    let mut best_f = f(start);
    let mut evals = 1usize;
    let restarts = 2;
    let mut step = 0.25;
    for _ in 0..=restarts {
        let (x, fx, used) = simplex_pass(f, &best_x, step, tol, max_evals.saturating_sub(evals));
        evals += used;
        if fx + tol < best_f {
            best_f = fx;
            best_x = x;
        } else {
            best_f = best_f.min(fx);
            if fx <= best_f {
                best_x = x;
            }
            break;
        }
        if evals >= max_evals {
            break;
        }
        step *= 0.25;
    }
    (best_x, best_f)
}

fn simplex_pass(
    f: &mut dyn FnMut(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let dim = start.len();
    if dim == 0 {
        return (vec![], f(start), 1);
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::MAX
        }
    };

    let mut points: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(start, &mut evals);
    points.push((start.to_vec(), f0));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += if x[i] == 0.0 { step } else { step * x[i].abs().max(1.0) };
        let fx = eval(&x, &mut evals);
        points.push((x, fx));
    }

    loop {
        points.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let spread = points[dim].1 - points[0].1;
        if spread.abs() < tol || evals >= max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| points[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = points[dim].clone();
        let at = |coef: f64| -> Vec<f64> {
            (0..dim)
                .map(|j| centroid[j] + coef * (centroid[j] - worst.0[j]))
                .collect()
        };

        let reflected = at(alpha);
        let f_ref = eval(&reflected, &mut evals);
        if f_ref < points[0].1 {
            let expanded = at(gamma);
            let f_exp = eval(&expanded, &mut evals);
            points[dim] = if f_exp < f_ref {
                (expanded, f_exp)
            } else {
                (reflected, f_ref)
            };
            continue;
        }
        if f_ref < points[dim - 1].1 {
            points[dim] = (reflected, f_ref);
            continue;
        }
        let contracted = at(-rho);
        let f_con = eval(&contracted, &mut evals);
        if f_con < points[dim].1 {
            points[dim] = (contracted, f_con);
            continue;
        }
        // Shrink toward the best vertex.
        let best = points[0].0.clone();
        for p in points.iter_mut().skip(1) {
            for j in 0..dim {
                p.0[j] = best[j] + sigma * (p.0[j] - best[j]);
            }
            p.1 = eval(&p.0, &mut evals);
        }
    }

    points.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    (points[0].0.clone(), points[0].1, evals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic_bowl() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.5).powi(2);
        let (x, fx) = nelder_mead(&mut f, &[0.0, 0.0], 1e-10, 2000);
        assert!((x[0] - 3.0).abs() < 1e-4, "{x:?}");
        assert!((x[1] + 1.5).abs() < 1e-4, "{x:?}");
        assert!(fx < 1e-7);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let mut f = |x: &[f64]| {
            let a = 1.0 - x[0];
            let b = x[1] - x[0] * x[0];
            a * a + 100.0 * b * b
        };
        let (x, _) = nelder_mead(&mut f, &[-1.2, 1.0], 1e-12, 10_000);
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 1e-3, "{x:?}");
    }

    #[test]
    fn zero_dim_returns_start() {
        let mut f = |_: &[f64]| 7.0;
        let (x, fx) = nelder_mead(&mut f, &[], 1e-8, 10);
        assert!(x.is_empty());
        assert_eq!(fx, 7.0);
    }

    #[test]
    fn survives_nonfinite_regions() {
        let mut f = |x: &[f64]| {
            if x[0] > 2.0 {
                f64::NAN
            } else {
                (x[0] - 1.0).powi(2)
            }
        };
        let (x, _) = nelder_mead(&mut f, &[0.0], 1e-10, 500);
        assert!((x[0] - 1.0).abs() < 1e-4);
    }
}
