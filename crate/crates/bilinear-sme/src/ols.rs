//! Ordinary-least-squares baseline and its confidence-region diameter.
//!
//! The point estimate is the ridge-stabilized closed form
//! `Θ̂ = Y Zᵀ (Z Zᵀ + λI)⁻¹` over the same data pairs the feasible set
//! uses. The accompanying uncertainty baseline is the diameter of a
//! self-normalized confidence ball: each row of `Θ̂ − Θ★` is bounded in the
//! gram norm by `β = w_max √(2 log(n/(1−level)) + log det((ZZᵀ+λI)/λI))`
//! (bounded noise is sub-Gaussian with proxy `w_max`), and a union bound
//! over the `n` rows gives
//!
//! ```text
//! diameter = 2 β √(n / λ_min(ZZᵀ + λI)).
//! ```
//!
//! The formula is deliberately conservative; the coverage test below checks
//! the ball contains the truth at least as often as the nominal level.

use crate::error::{Error, Result};
use crate::model::Trajectory;
use crate::tensor::{self, Matrix};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct OlsResult {
    pub theta_hat: Matrix,
    /// Raw gram `Z Zᵀ` (without the ridge term).
    pub gram: Matrix,
    /// `max_t ‖x_{t+1} − Θ̂ z_t‖_∞` over the fitted data.
    pub residual_max: f64,
    pub ridge: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfidenceDiameter {
    pub level: f64,
    pub diameter: f64,
    pub regularizer: f64,
}

/// Least-squares fit over explicit `(z_t, x_{t+1})` pairs.
pub fn ols_fit_from_pairs(
    regressors: &[Vec<f64>],
    targets: &[Vec<f64>],
    ridge: f64,
) -> Result<OlsResult> {
    if regressors.is_empty() || regressors.len() != targets.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} regressors for {} targets",
            regressors.len(),
            targets.len()
        )));
    }
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(Error::InvalidArgument {
            arg: "ridge",
            reason: format!("must be finite and nonnegative, got {ridge}"),
        });
    }
    let d = regressors[0].len();
    let n = targets[0].len();
    let mut gram = Matrix::zeros(d, d);
    let mut yzt = Matrix::zeros(n, d);
    for (z, x) in regressors.iter().zip(targets) {
        for i in 0..d {
            for j in 0..d {
                gram[(i, j)] += z[i] * z[j];
            }
        }
        for i in 0..n {
            for j in 0..d {
                yzt[(i, j)] += x[i] * z[j];
            }
        }
    }
    let mut regularized = gram.clone();
    for i in 0..d {
        regularized[(i, i)] += ridge;
    }
    let mut theta_entries = Vec::with_capacity(n * d);
    for i in 0..n {
        let row = tensor::cholesky_solve(&regularized, yzt.row(i)).map_err(|e| match e {
            Error::NotPositiveDefinite if ridge == 0.0 => Error::SingularGram,
            other => other,
        })?;
        theta_entries.extend_from_slice(&row);
    }
    let theta_hat = Matrix::new(n, d, theta_entries)?;
    let mut residual_max = 0.0f64;
    for (z, x) in regressors.iter().zip(targets) {
        let pred = theta_hat.matvec(z)?;
        let gap = x.iter().zip(&pred).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        residual_max = residual_max.max(gap);
    }
    Ok(OlsResult { theta_hat, gram, residual_max, ridge, samples: regressors.len() })
}

/// Least-squares fit over a trajectory's data pairs.
pub fn ols_fit(data: &Trajectory, ridge: f64) -> Result<OlsResult> {
    if data.is_empty() {
        return Err(Error::InvalidArgument {
            arg: "data",
            reason: "need at least one sample".into(),
        });
    }
    let regressors: Vec<Vec<f64>> = (0..data.len()).map(|t| data.regressor(t).z).collect();
    let targets: Vec<Vec<f64>> = (1..=data.len()).map(|t| data.states[t].clone()).collect();
    ols_fit_from_pairs(&regressors, &targets, ridge)
}

/// Diameter of the self-normalized confidence ball around the OLS estimate.
pub fn ols_confidence_diameter(
    fit: &OlsResult,
    level: f64,
    w_max: f64,
    ridge: f64,
) -> Result<ConfidenceDiameter> {
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidArgument {
            arg: "level",
            reason: format!("must be in (0, 1), got {level}"),
        });
    }
    if !(ridge.is_finite() && ridge > 0.0) {
        return Err(Error::InvalidArgument {
            arg: "ridge",
            reason: format!("must be positive for the confidence bound, got {ridge}"),
        });
    }
    let n = fit.theta_hat.rows() as f64;
    let eigs = tensor::symmetric_eigenvalues(&fit.gram)?;
    let lambda_min = eigs[0] + ridge;
    if lambda_min <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let log_det_ratio: f64 = eigs.iter().map(|e| ((e + ridge) / ridge).ln()).sum();
    let beta = w_max * (2.0 * (n / (1.0 - level)).ln() + log_det_ratio).sqrt();
    let diameter = 2.0 * beta * (n / lambda_min).sqrt();
    Ok(ConfidenceDiameter { level, diameter, regularizer: ridge })
}
