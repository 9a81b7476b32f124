//! Arithmetic quality of the observation point: continued-fraction expansion
//! and the lower envelope of `k |sin(k pi xi)|`, which stays away from zero
//! exactly when the partial quotients are bounded.

use serde::{Deserialize, Serialize};

use super::SchroError;

/// Partial quotients beyond this depth are numerically meaningless in double
/// precision.
pub const MAX_DEPTH: usize = 60;

/// Quotient bound used for the boundedness verdict.
pub const QUOTIENT_BOUND: u64 = 100;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub xi: f64,
    /// `[0; a1, a2, ...]` including the leading integer part.
    pub quotients: Vec<u64>,
    /// Max quotient stays below [`QUOTIENT_BOUND`] over the computed depth.
    /// A finite-depth verdict only: deeper quotients are out of reach.
    pub bounded_to_depth: bool,
    pub max_quotient: u64,
    /// `|xi - p/q|` for the deepest convergent.
    pub reconstruction_error: f64,
}

/// Largest convergent denominator whose quotients are still trustworthy from
/// a double-precision input: past `q ~ 1/sqrt(eps)` the next quotient is
/// driven by the representation error of `xi` rather than by `xi` itself.
const RELIABLE_DENOMINATOR: u128 = 30_000_000;

/// Expand `xi` in (0,1) as a simple continued fraction to the given depth
/// (capped at [`MAX_DEPTH`] and by the precision of the input; the achieved
/// depth is `quotients.len() - 1`). A terminating expansion means the point
/// is rational and is reported as an error.
pub fn continued_fraction(xi: f64, depth: usize) -> Result<ContinuedFraction, SchroError> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(SchroError::BadPoint(xi));
    }
    let depth = depth.min(MAX_DEPTH);
    let mut quotients = vec![0u64];
    let mut x = xi;
    // convergent recurrences p_i = a_i p_{i-1} + p_{i-2}
    let (mut p0, mut p1): (u128, u128) = (1, 0);
    let (mut q0, mut q1): (u128, u128) = (0, 1);
    for _ in 0..depth {
        let inv = 1.0 / x;
        let a = inv.floor();
        if !a.is_finite() || a > 1e15 {
            return Err(SchroError::RationalDetected);
        }
        let nq = a as u128 * q1 + q0;
        if nq > RELIABLE_DENOMINATOR {
            break;
        }
        quotients.push(a as u64);
        let np = a as u128 * p1 + p0;
        p0 = p1;
        p1 = np;
        q0 = q1;
        q1 = nq;
        x = inv - a;
        if x < 1e-13 {
            return Err(SchroError::RationalDetected);
        }
    }
    let reconstruction_error = (xi - p1 as f64 / q1 as f64).abs();
    let max_quotient = quotients.iter().skip(1).copied().max().unwrap_or(0);
    Ok(ContinuedFraction {
        xi,
        quotients,
        bounded_to_depth: max_quotient <= QUOTIENT_BOUND,
        max_quotient,
        reconstruction_error,
    })
}

/// `min_{1 <= k <= k_max} k |sin(k pi xi)|`: bounded away from zero for
/// badly approximable points, with zeros exactly at rational points.
pub fn sine_gap(xi: f64, k_max: usize) -> f64 {
    let mut min = f64::INFINITY;
    for k in 1..=k_max {
        let frac = (k as f64 * xi).rem_euclid(1.0);
        let v = k as f64 * (std::f64::consts::PI * frac).sin().abs();
        if v < min {
            min = v;
        }
    }
    min
}
