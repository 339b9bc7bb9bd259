//! Quadratic fit of a Stark-shift curve.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fitting::engine::{FitParameter, FitResult};
use crate::linalg::{solve, Matrix};

/// Ordinary least-squares quadratic fit of qubit shift versus phonon number.
///
/// Fits `shift = c0 + c1 n + c2 n^2` and reports `linear` (= the 2 chi
/// estimate) and `quadratic` with standard errors from the fit residuals.
/// Needs at least three distinct abscissae; repeated ones make the normal
/// matrix rank deficient.
pub fn fit_stark_slope(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Domain(String::from(
            "stark fit needs at least 3 points",
        )));
    }
    let n = points.len();
    // normal equations for the Vandermonde design [1, x, x^2]
    let mut ata = Matrix::zeros(3);
    let mut aty = vec![0.0; 3];
    for &(x, y) in points {
        let row = [1.0, x, x * x];
        for a in 0..3 {
            for b in 0..3 {
                ata.set(a, b, ata.get(a, b) + row[a] * row[b]);
            }
            aty[a] += row[a] * y;
        }
    }
    let coeff = solve(&ata, &aty)?;

    let rss: f64 = points
        .iter()
        .map(|&(x, y)| {
            let model = coeff[0] + coeff[1] * x + coeff[2] * x * x;
            (y - model) * (y - model)
        })
        .sum();
    let dof = (n - 3).max(1) as f64;
    let sigma2 = rss / dof;
    let mut std_errs = [0.0; 3];
    for i in 0..3 {
        let mut unit = vec![0.0; 3];
        unit[i] = 1.0;
        let col = solve(&ata, &unit)?;
        let var = sigma2 * col[i];
        std_errs[i] = if var > 0.0 { libm::sqrt(var) } else { 0.0 };
    }

    let names = ["intercept", "linear", "quadratic"];
    Ok(FitResult {
        parameters: names
            .iter()
            .zip(coeff.iter().zip(std_errs.iter()))
            .map(|(name, (v, e))| FitParameter {
                name: String::from(*name),
                value: *v,
                std_err: *e,
            })
            .collect(),
        residual_norm: libm::sqrt(rss),
        iterations: 1,
        converged: true,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_zero_quadratic() {
        let slope = -134.2e3;
        let points: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, slope * i as f64)).collect();
        let fit = fit_stark_slope(&points).unwrap();
        assert!((fit.value("linear").unwrap() - slope).abs() < 1e-6);
        assert!(fit.value("quadratic").unwrap().abs() < 1e-6);
        assert!(fit.value("intercept").unwrap().abs() < 1e-6);
    }

    #[test]
    fn exact_quadratic_recovered() {
        let (c1, c2) = (-120e3, 4.5e3);
        let points: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let x = i as f64;
                (x, c1 * x + c2 * x * x)
            })
            .collect();
        let fit = fit_stark_slope(&points).unwrap();
        assert!((fit.value("linear").unwrap() - c1).abs() < 1e-5);
        assert!((fit.value("quadratic").unwrap() - c2).abs() < 1e-6);
    }

    #[test]
    fn degenerate_abscissae_rank_error() {
        let points = [(1.0, 2.0), (1.0, 2.5), (1.0, 3.0)];
        assert_eq!(fit_stark_slope(&points), Err(Error::RankDeficient));
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(fit_stark_slope(&[(0.0, 0.0), (1.0, 1.0)]).is_err());
    }
}
