//! Laplace-domain response of the correction system to the point forcing:
//! the computable face of the transfer-function boundedness assumption.
//!
//! In sine coordinates every mode decouples into a 2x2 solve, so the
//! response at the observation point is a fast mode sum.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SchroError;

use std::f64::consts::PI;

/// Partial sum of the free point-response series with an analytic tail bound.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct W3Sum {
    pub value: C64,
    /// `2 sum_{k > K} 1/(k^2 pi^2) <= 2/(pi^2 K)`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `w3(xi, lambda) = -2 sum_k sin^2(k pi xi) / (k^2 pi^2 - i lambda)`.
pub fn w3_series(xi: f64, lambda: C64, terms: usize) -> Result<W3Sum, SchroError> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(SchroError::BadPoint(xi));
    }
    let mut acc = C64::new(0.0, 0.0);
    for k in 1..=terms {
        let s = (k * k) as f64 * PI * PI;
        let sin = (k as f64 * PI * xi).sin();
        acc -= 2.0 * sin * sin / (C64::new(s, 0.0) - C64::new(0.0, 1.0) * lambda);
    }
    Ok(W3Sum {
        value: acc,
        tail_bound: 2.0 / (PI * PI * terms as f64),
        terms,
    })
}

/// Laplace-domain correction response at the observation point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferValue {
    pub lambda: C64,
    /// Observed correction channel `w2(xi, lambda)`.
    pub w2: C64,
    /// Free point response `w3(xi, lambda)`.
    pub w3: C64,
    /// Feedback part `w4 = w2 - w3`.
    pub w4: C64,
    /// Worst relative defect of the per-mode feedback identity
    /// `w4_k = -lambda w2_k / ((k^2 pi^2 + lambda^2)(i k^2 pi^2 + lambda))`.
    pub w4_identity_residual: f64,
}

/// Solve the truncated coupled system
/// `lambda^2 u2 - u2'' + w2 = 0`,
/// `lambda w2 - i w2'' - lambda u2 = -i delta_xi`
/// mode by mode and evaluate the responses at the forcing point.
pub fn transfer_value(
    xi: f64,
    lambda: C64,
    n_modes: usize,
) -> Result<TransferValue, SchroError> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(SchroError::BadPoint(xi));
    }
    if n_modes == 0 {
        return Err(SchroError::TooFewModes { needed: 1, got: 0 });
    }
    let i = C64::new(0.0, 1.0);
    let mut w2_val = C64::new(0.0, 0.0);
    let mut w3_val = C64::new(0.0, 0.0);
    let mut w4_val = C64::new(0.0, 0.0);
    let mut worst_identity = 0.0f64;
    for k in 1..=n_modes {
        let s = (k * k) as f64 * PI * PI;
        let sin = (k as f64 * PI * xi).sin();
        let force = -i * 2f64.sqrt() * sin;
        let wave = lambda * lambda + s; // lambda^2 + k^2 pi^2
        let schro = lambda + i * s; // lambda + i k^2 pi^2
        // determinant of the per-mode 2x2 system in (u2_k, w2_k)
        let det = wave * schro + lambda;
        let scale = wave.norm() * schro.norm() + lambda.norm();
        if det.norm() <= 1e-12 * scale.max(1e-300) {
            return Err(SchroError::SingularSystem { lambda });
        }
        let w2_k = force * wave / det;
        let u2_k = -w2_k / wave;
        let w3_k = force / schro;
        let w4_k = lambda * u2_k / schro;
        let w4_formula = -lambda * w2_k / (wave * schro);
        let denom = w4_k.norm().max(1e-300);
        worst_identity = worst_identity.max((w4_k - w4_formula).norm() / denom);

        let basis = 2f64.sqrt() * sin;
        w2_val += w2_k * basis;
        w3_val += w3_k * basis;
        w4_val += w4_k * basis;
    }
    Ok(TransferValue {
        lambda,
        w2: w2_val,
        w3: w3_val,
        w4: w4_val,
        w4_identity_residual: worst_identity,
    })
}

/// Sweep of the response modulus along a vertical line `Re lambda = beta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferScan {
    pub beta: f64,
    pub max_modulus: f64,
    pub argmax_y: f64,
    pub points: usize,
    pub n_modes: usize,
}

/// Evaluate `|w2(xi, beta + i y)|` over a uniform grid of `points` values of
/// `y` in `[y_lo, y_hi]` and report the maximum: the measured line bound.
pub fn transfer_scan(
    xi: f64,
    beta: f64,
    y_lo: f64,
    y_hi: f64,
    points: usize,
    n_modes: usize,
) -> Result<TransferScan, SchroError> {
    if points < 2 {
        return Err(SchroError::TooFewModes {
            needed: 2,
            got: points,
        });
    }
    let step = (y_hi - y_lo) / (points - 1) as f64;
    let values: Result<Vec<(f64, f64)>, SchroError> = (0..points)
        .into_par_iter()
        .map(|j| {
            let y = y_lo + j as f64 * step;
            let v = transfer_value(xi, C64::new(beta, y), n_modes)?;
            Ok((y, v.w2.norm()))
        })
        .collect();
    let values = values?;
    // deterministic max: first index attaining it
    let mut best = (values[0].0, values[0].1);
    for &(y, m) in &values[1..] {
        if m > best.1 {
            best = (y, m);
        }
    }
    Ok(TransferScan {
        beta,
        max_modulus: best.1,
        argmax_y: best.0,
        points,
        n_modes,
    })
}
