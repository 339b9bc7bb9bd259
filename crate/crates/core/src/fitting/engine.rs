//! Damped Gauss-Newton least squares with a simplex fallback.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};

/// One estimated parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParameter {
    pub name: String,
    pub value: f64,
    pub std_err: f64,
}

/// Outcome of a fit: named parameters with standard errors, the final
/// residual norm, and convergence diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameters: Vec<FitParameter>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl FitResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.value)
    }

    pub fn std_err(&self, name: &str) -> Option<f64> {
        self.parameters
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.std_err)
    }
}

/// Solver configuration shared by the least-squares fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative cost-decrease convergence threshold.
    pub ftol: f64,
    /// Scaled step-size convergence threshold.
    pub xtol: f64,
    /// Relative central-difference step for the numerical Jacobian.
    pub step_rel: f64,
    pub lambda_init: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            ftol: 1e-10,
            xtol: 1e-10,
            step_rel: 1e-6,
            lambda_init: 1e-3,
            lambda_up: 10.0,
            lambda_down: 10.0,
        }
    }
}

/// Raw solver output before naming parameters.
#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    pub std_errs: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

fn cost_of(residuals: &[f64]) -> f64 {
    residuals.iter().map(|r| r * r).sum()
}

/// Jacobian columns in *scaled* coordinates z = x / scale.
fn jacobian_scaled<F>(
    eval: &mut F,
    z: &[f64],
    scales: &[f64],
    step_rel: f64,
    n_res: usize,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n_par = z.len();
    let mut plus = vec![0.0; n_res];
    let mut minus = vec![0.0; n_res];
    let mut cols = Vec::with_capacity(n_par);
    let mut zt = z.to_vec();
    let mut xt = vec![0.0; n_par];
    let unscale = |zt: &[f64], xt: &mut [f64]| {
        for ((x, z), s) in xt.iter_mut().zip(zt).zip(scales) {
            *x = z * s;
        }
    };
    for i in 0..n_par {
        // relative step with unit floor: z is O(1) by construction
        let step = step_rel * z[i].abs().max(1.0);
        zt[i] = z[i] + step;
        unscale(&zt, &mut xt);
        eval(&xt, &mut plus)?;
        zt[i] = z[i] - step;
        unscale(&zt, &mut xt);
        eval(&xt, &mut minus)?;
        zt[i] = z[i];
        let col: Vec<f64> = plus
            .iter()
            .zip(&minus)
            .map(|(p, m)| (p - m) / (2.0 * step))
            .collect();
        cols.push(col);
    }
    Ok(cols)
}

/// Minimize `sum r_i(x)^2` by damped Gauss-Newton.
///
/// `eval` fills the residual vector for a parameter set; `scales` gives the
/// characteristic magnitude of each parameter. Internally the solver works
/// in scaled coordinates `x / scale`, which keeps the normal equations well
/// conditioned when parameters differ by many orders of magnitude and gives
/// the difference steps a meaningful floor for parameters passing through
/// zero. Accepted steps never increase the cost. When the damped normal
/// equations stay singular the solver falls back to a Nelder-Mead simplex on
/// the same objective and reports it in `warnings`.
pub fn levenberg_marquardt<F>(
    mut eval: F,
    n_residuals: usize,
    x0: &[f64],
    scales: &[f64],
    opts: &FitOptions,
) -> Result<LmOutcome>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n_par = x0.len();
    if scales.len() != n_par {
        return Err(Error::Shape {
            expected: n_par,
            got: scales.len(),
        });
    }
    if scales.iter().any(|s| !(s.abs() > 0.0)) {
        return Err(Error::Domain(String::from(
            "parameter scales must be nonzero",
        )));
    }
    let mut z: Vec<f64> = x0.iter().zip(scales).map(|(x, s)| x / s).collect();
    let unscale =
        |z: &[f64]| -> Vec<f64> { z.iter().zip(scales).map(|(zi, s)| zi * s).collect() };

    let mut residuals = vec![0.0; n_residuals];
    eval(&unscale(&z), &mut residuals)?;
    let mut cost = cost_of(&residuals);
    let mut lambda = opts.lambda_init;
    let mut warnings: Vec<String> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    'outer: for iter in 0..opts.max_iterations {
        iterations = iter + 1;
        let jac = jacobian_scaled(&mut eval, &z, scales, opts.step_rel, n_residuals)?;

        // normal equations: (JtJ + lambda diag(JtJ)) delta = -Jt r
        let mut jtj = Matrix::zeros(n_par);
        let mut jtr = vec![0.0; n_par];
        for a in 0..n_par {
            for b in a..n_par {
                let dot: f64 = jac[a].iter().zip(&jac[b]).map(|(u, v)| u * v).sum();
                jtj.set(a, b, dot);
                jtj.set(b, a, dot);
            }
            jtr[a] = jac[a].iter().zip(&residuals).map(|(u, r)| u * r).sum();
        }

        let mut accepted = false;
        for _ in 0..24 {
            let mut damped = jtj.clone();
            for d in 0..n_par {
                let diag = jtj.get(d, d);
                // keep the damping meaningful for flat directions
                let floor = 1e-30 * jtj.frobenius_norm().max(f64::MIN_POSITIVE);
                damped.set(d, d, diag + lambda * diag.max(floor));
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let delta = match solve(&damped, &rhs) {
                Ok(d) => d,
                Err(Error::RankDeficient) => {
                    // simplex fallback on the same objective
                    warnings.push(String::from(
                        "normal equations rank-deficient; fell back to Nelder-Mead",
                    ));
                    let mut scratch = vec![0.0; n_residuals];
                    let x_now = unscale(&z);
                    let (xs, fcost, it2, conv) = nelder_mead(
                        |p| {
                            eval(p, &mut scratch)?;
                            Ok(cost_of(&scratch))
                        },
                        &x_now,
                        scales,
                        opts,
                    )?;
                    z = xs.iter().zip(scales).map(|(x, s)| x / s).collect();
                    cost = fcost;
                    iterations += it2;
                    converged = conv;
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            let candidate: Vec<f64> = z.iter().zip(&delta).map(|(zi, di)| zi + di).collect();
            let mut cand_res = vec![0.0; n_residuals];
            eval(&unscale(&candidate), &mut cand_res)?;
            let cand_cost = cost_of(&cand_res);
            if cand_cost <= cost {
                let rel_drop = (cost - cand_cost) / cost.max(f64::MIN_POSITIVE);
                let max_step = delta.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
                z = candidate;
                residuals = cand_res;
                cost = cand_cost;
                lambda = (lambda / opts.lambda_down).max(1e-14);
                accepted = true;
                if rel_drop < opts.ftol || max_step < opts.xtol {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda *= opts.lambda_up;
        }
        if !accepted {
            // no downhill step found at any damping: stationary
            converged = true;
            break;
        }
    }

    // parameter covariance from the final Jacobian
    let x = unscale(&z);
    let std_errs = match standard_errors(&mut eval, &z, scales, opts, n_residuals) {
        Ok(errs) => errs,
        Err(_) => {
            warnings.push(String::from("covariance singular; standard errors unset"));
            vec![0.0; n_par]
        }
    };

    Ok(LmOutcome {
        params: x,
        std_errs,
        residual_norm: libm::sqrt(cost),
        iterations,
        converged,
        warnings,
    })
}

fn standard_errors<F>(
    eval: &mut F,
    z: &[f64],
    scales: &[f64],
    opts: &FitOptions,
    n_res: usize,
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<()>,
{
    let n_par = z.len();
    let x: Vec<f64> = z.iter().zip(scales).map(|(zi, s)| zi * s).collect();
    let mut residuals = vec![0.0; n_res];
    eval(&x, &mut residuals)?;
    let cost = cost_of(&residuals);
    let dof = n_res.saturating_sub(n_par).max(1) as f64;
    let sigma2 = cost / dof;

    let jac = jacobian_scaled(eval, z, scales, opts.step_rel, n_res)?;
    let mut jtj = Matrix::zeros(n_par);
    for a in 0..n_par {
        for b in a..n_par {
            let dot: f64 = jac[a].iter().zip(&jac[b]).map(|(u, v)| u * v).sum();
            jtj.set(a, b, dot);
            jtj.set(b, a, dot);
        }
    }
    // columns of the inverse via repeated solves; variances are in scaled
    // coordinates, so convert back through the scale
    let mut errs = vec![0.0; n_par];
    for i in 0..n_par {
        let mut unit = vec![0.0; n_par];
        unit[i] = 1.0;
        let col = solve(&jtj, &unit)?;
        let var = sigma2 * col[i];
        errs[i] = if var > 0.0 {
            libm::sqrt(var) * scales[i].abs()
        } else {
            0.0
        };
    }
    Ok(errs)
}

/// Nelder-Mead simplex minimization of a scalar objective.
///
/// Returns `(x, f(x), iterations, converged)`. The initial simplex is built
/// deterministically from the parameter scales. A collapsed simplex can
/// stall short of the minimum, so the search restarts from the best point
/// with a fresh simplex until a restart stops improving.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    scales: &[f64],
    opts: &FitOptions,
) -> Result<(Vec<f64>, f64, usize, bool)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut x = x0.to_vec();
    let mut best = f64::MAX;
    let mut total_iterations = 0;
    let mut converged = false;
    for _ in 0..6 {
        let (xs, v, iters, conv) = nelder_mead_once(&mut f, &x, scales, opts)?;
        total_iterations += iters;
        let improved = v < best - opts.ftol * (1.0 + best.abs());
        x = xs;
        converged = conv;
        if !improved && best < f64::MAX {
            best = best.min(v);
            break;
        }
        best = v;
    }
    Ok((x, best, total_iterations, converged))
}

fn nelder_mead_once<F>(
    f: &mut F,
    x0: &[f64],
    scales: &[f64],
    opts: &FitOptions,
) -> Result<(Vec<f64>, f64, usize, bool)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += 0.1 * scales[i].abs().max(f64::MIN_POSITIVE);
        simplex.push(v);
    }
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    for v in &simplex {
        values.push(f(v)?);
    }

    let max_iter = opts.max_iterations * 10;
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..max_iter {
        iterations += 1;
        // order ascending by value
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        let spread = (values[n] - values[0]).abs();
        if spread <= opts.ftol * values[0].abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        // simplex collapsed in parameter space (value floor may be zero)
        let size = simplex[1..]
            .iter()
            .flat_map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .zip(scales)
                    .map(|((a, b), s)| ((a - b) / s.abs().max(f64::MIN_POSITIVE)).abs())
            })
            .fold(0.0_f64, f64::max);
        if size <= opts.xtol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|v| v[d]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[n])
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let f_reflect = f(&reflect)?;

        if f_reflect < values[0] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            let f_expand = f(&expand)?;
            if f_expand < f_reflect {
                simplex[n] = expand;
                values[n] = f_expand;
            } else {
                simplex[n] = reflect;
                values[n] = f_reflect;
            }
        } else if f_reflect < values[n - 1] {
            simplex[n] = reflect;
            values[n] = f_reflect;
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let f_contract = f(&contract)?;
            if f_contract < values[n] {
                simplex[n] = contract;
                values[n] = f_contract;
            } else {
                // shrink toward the best vertex
                for i in 1..=n {
                    let best = simplex[0].clone();
                    for d in 0..n {
                        simplex[i][d] = best[d] + sigma * (simplex[i][d] - best[d]);
                    }
                    values[i] = f(&simplex[i])?;
                }
            }
        }
    }

    Ok((simplex[0].clone(), values[0], iterations, converged))
}

/// Wrap a solver outcome into a named [`FitResult`].
pub fn fit_result_from_lm(outcome: LmOutcome, names: &[&str]) -> FitResult {
    FitResult {
        parameters: outcome
            .params
            .iter()
            .zip(&outcome.std_errs)
            .zip(names)
            .map(|((v, e), n)| FitParameter {
                name: String::from(*n),
                value: *v,
                std_err: *e,
            })
            .collect(),
        residual_norm: outcome.residual_norm,
        iterations: outcome.iterations,
        converged: outcome.converged,
        warnings: outcome.warnings,
    }
}
