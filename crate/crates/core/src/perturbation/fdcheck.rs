use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{eigenpair_near, hadamard_rate, PerturbationError, PerturbationSpec, NEAR_WINDOW};
use crate::geometry::{DomainSpec, Region};
use crate::spectral::{BoundaryTrace, SpectralOptions};

/// Relative distance between the largest-ε slope and the extrapolated one
/// above which the second-order term is said to dominate.
pub const NONLINEARITY_TOL: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct FdRateReport {
    /// Amplitudes, largest first, in absolute units (`ε_list · b`).
    pub epsilons: Vec<f64>,
    pub lambda0: f64,
    pub lambdas: Vec<f64>,
    pub error_bars: Vec<f64>,
    /// `(λ(ε) - λ(0)) / ε`.
    pub slopes: Vec<f64>,
    /// Richardson table: row `j` holds the extrapolations that cancel the
    /// first `j` powers of `ε`.
    pub richardson: Vec<Vec<f64>>,
    /// Extrapolated slope at `ε = 0`.
    pub slope: f64,
    /// Boundary-integral rate.
    pub rate: f64,
    /// `|slope - rate| / |rate|`.
    pub deviation: f64,
    /// Observed orders of `λ(ε) - λ(0) - rate·ε` between consecutive `ε`.
    pub remainder_orders: Vec<f64>,
    /// `|slopes[0] - slope| / |slope|`.
    pub nonlinearity: f64,
    pub nonlinear: bool,
}

fn relative(a: f64, b: f64) -> f64 {
    if b != 0.0 {
        (a - b).abs() / b.abs()
    } else {
        (a - b).abs()
    }
}

/// Polynomial extrapolation to 0 of `s(ε)` sampled at `eps`, keeping the
/// intermediate Neville columns.
fn richardson_table(eps: &[f64], s: &[f64]) -> Vec<Vec<f64>> {
    let mut table = vec![s.to_vec()];
    for j in 1..eps.len() {
        let prev = &table[j - 1];
        let row = (0..prev.len() - 1)
            .map(|i| (eps[i] * prev[i + 1] - eps[i + j] * prev[i]) / (eps[i] - eps[i + j]))
            .collect();
        table.push(row);
    }
    table
}

/// Solve `λ₀` on `omega` with focal bumps `ε f` for every `ε` in
/// `eps_list · b`, extrapolate the difference quotients to `ε = 0` and
/// compare with the boundary-integral rate on `trace`, the unperturbed
/// ground state of `omega`.
pub fn fd_rate_check(
    omega: &DomainSpec,
    trace: &BoundaryTrace,
    f: &PerturbationSpec,
    eps_list: &[f64],
    opts: &SpectralOptions,
) -> Result<FdRateReport, PerturbationError> {
    if eps_list.len() < 2 || eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(PerturbationError::InvalidInput(
            "need at least two positive amplitudes".into(),
        ));
    }
    if !omega.focal_bumps().is_empty() {
        return Err(PerturbationError::InvalidInput(
            "the unperturbed domain must have no focal bumps".into(),
        ));
    }
    f.check_support(omega)?;
    let b = omega.ellipse_spec().b();
    let mut epsilons: Vec<f64> = eps_list.iter().map(|e| e * b).collect();
    epsilons.sort_by(|x, y| y.total_cmp(x));
    epsilons.dedup();
    let ground = trace.pair();
    let (lambda0, k0) = (ground.lambda, ground.k);
    let rate = hadamard_rate(trace, f)?;
    let solved: Vec<(f64, f64)> = if f.bumps.is_empty() {
        // the perturbed domain is the domain itself
        epsilons
            .iter()
            .map(|_| (lambda0, ground.error_bar))
            .collect()
    } else {
        epsilons
            .par_iter()
            .map(|&eps| {
                let d = omega.with_focal_bumps(f.bumps_at(eps))?;
                let dk = rate * eps / (2.0 * k0);
                let region: Arc<dyn Region> = Arc::new(d);
                let p = eigenpair_near(region, k0 + dk, dk.abs().max(NEAR_WINDOW), opts)?;
                Ok((p.lambda, p.error_bar))
            })
            .collect::<Result<_, PerturbationError>>()?
    };
    let lambdas: Vec<f64> = solved.iter().map(|s| s.0).collect();
    let error_bars = solved.iter().map(|s| s.1).collect();
    let slopes: Vec<f64> = lambdas
        .iter()
        .zip(&epsilons)
        .map(|(l, e)| (l - lambda0) / e)
        .collect();
    let richardson = richardson_table(&epsilons, &slopes);
    let slope = richardson.last().expect("nonempty table")[0];
    let remainders: Vec<f64> = lambdas
        .iter()
        .zip(&epsilons)
        .map(|(l, e)| l - lambda0 - rate * e)
        .collect();
    let remainder_orders = (0..epsilons.len() - 1)
        .map(|i| {
            (remainders[i] / remainders[i + 1]).abs().ln() / (epsilons[i] / epsilons[i + 1]).ln()
        })
        .collect();
    let nonlinearity = if slope == 0.0 && slopes[0] == 0.0 {
        0.0
    } else {
        relative(slopes[0], slope)
    };
    let deviation = if slope == 0.0 && rate == 0.0 {
        0.0
    } else {
        relative(slope, rate)
    };
    Ok(FdRateReport {
        epsilons,
        lambda0,
        lambdas,
        error_bars,
        slopes,
        richardson,
        slope,
        rate,
        deviation,
        remainder_orders,
        nonlinearity,
        nonlinear: nonlinearity > NONLINEARITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_is_exact_for_quadratics() {
        let eps = [1e-3, 5e-4, 2.5e-4];
        let s: Vec<f64> = eps.iter().map(|e| -3.0 + 7.0 * e - 40.0 * e * e).collect();
        let t = richardson_table(&eps, &s);
        assert!((t[2][0] + 3.0).abs() < 1e-12);
        // first level with halving steps is 2 s(ε/2) - s(ε)
        assert!((t[1][0] - (2.0 * s[1] - s[0])).abs() < 1e-12);
    }
}
