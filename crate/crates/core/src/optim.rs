//! Derivative-free minimization (Nelder–Mead simplex).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    pub xatol: f64,
    pub fatol: f64,
    /// Dimension-adaptive coefficients (Gao & Han) instead of the classical
    /// (1, 2, 1/2, 1/2).
    pub adaptive: bool,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 10_000,
            xatol: 1e-10,
            fatol: 1e-22,
            adaptive: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    /// Whether the simplex shrank below the tolerances before the budget ran out.
    pub converged: bool,
}

/// Minimizes `f` from `x0`, building the first simplex from `x0 + steps_i e_i`.
///
/// When the simplex collapses the search is restarted around the best point
/// with the original step sizes, until a restart brings no improvement or the
/// evaluation budget is spent.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], steps: &[f64], opts: NelderMeadOptions) -> Minimum {
    let mut best = Minimum {
        x: x0.to_vec(),
        f: eval(&f, x0),
        evaluations: 1,
        converged: false,
    };
    loop {
        let budget = opts.max_evals.saturating_sub(best.evaluations);
        if budget <= x0.len() + 1 {
            return best;
        }
        let run = simplex_search(&f, &best.x, steps, budget, opts);
        let improved = run.f < best.f * (1.0 - 1e-9) || (best.f > 0.0 && run.f == 0.0);
        best.evaluations += run.evaluations;
        if run.f <= best.f {
            best.x = run.x;
            best.f = run.f;
        }
        best.converged = run.converged;
        if !improved || !run.converged {
            return best;
        }
    }
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn simplex_search<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    steps: &[f64],
    budget: usize,
    opts: NelderMeadOptions,
) -> Minimum {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = if opts.adaptive && n > 1 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(f, p)).collect();
    let mut evals = n + 1;
    let mut converged = false;
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> { c.iter().zip(w).map(|(ci, wi)| ci + t * (ci - wi)).collect() };

    while evals < budget {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let fspread = vals.iter().map(|v| (v - vals[0]).abs()).fold(0.0, f64::max);
        let xspread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if xspread <= opts.xatol && fspread <= opts.fatol.max(f64::EPSILON * vals[0].abs()) {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / nf;
            }
        }
        let worst = pts[n].clone();
        let xr = along(&centroid, &worst, alpha);
        let fr = eval(f, &xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(&centroid, &worst, alpha * gamma);
            let fe = eval(f, &xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(&centroid, &worst, alpha * rho);
            let fc = eval(f, &xc);
            (xc, fc)
        } else {
            let xc = along(&centroid, &worst, -rho);
            let fc = eval(f, &xc);
            (xc, fc)
        };
        evals += 1;
        if fc < fr.min(vals[n]) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=n {
            let shrunk: Vec<f64> = pts[0].iter().zip(&pts[i]).map(|(b, p)| b + sigma * (p - b)).collect();
            vals[i] = eval(f, &shrunk);
            pts[i] = shrunk;
        }
        evals += n;
    }
    let i = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    Minimum {
        x: pts[i].clone(),
        f: vals[i],
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{m:?}");
        assert!(m.evaluations <= 10_000);
    }

    #[test]
    fn quadratic_in_six_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v - i as f64).powi(2)).sum();
        let m = nelder_mead(f, &[0.0; 6], &[1.0; 6], NelderMeadOptions::default());
        for (i, v) in m.x.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) };
        let m = nelder_mead(f, &[1.0], &[0.5], NelderMeadOptions::default());
        assert!((m.x[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn respects_budget() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs().sqrt()).sum();
        let opts = NelderMeadOptions {
            max_evals: 200,
            ..Default::default()
        };
        let m = nelder_mead(f, &[3.0, -2.0, 1.0], &[1.0; 3], opts);
        assert!(m.evaluations <= 200 + 3, "{}", m.evaluations);
    }
}
