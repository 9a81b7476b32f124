//! Branch spectra of the undamped coupled operator. Eigenfrequencies `mu`
//! with sine index `k` solve a cubic: the quadratic `X^2 + (mu^2 - mu) X +
//! mu - mu^3` must have `-k^2 pi^2` among its roots, which pins each `mu` to
//! one of two families (wave-like near `k pi`, Schrodinger-like near
//! `-k^2 pi^2`) plus a finite low set.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::SchroError;
use crate::numeric::{bisect, newton_bracketed};

use std::f64::consts::PI;

pub const EXCLUDED_TOL: f64 = 1e-6;

/// Roots `X_1 <= X_2` of the reduction quadratic at a real frequency, with
/// its discriminant. The roots are complex exactly for `mu` in `(0, 1)`.
pub fn schro_charpoly(mu: f64) -> Result<(C64, C64, f64), SchroError> {
    if mu.abs() < EXCLUDED_TOL || (mu - 1.0).abs() < EXCLUDED_TOL {
        return Err(SchroError::ExcludedMu(mu));
    }
    let delta = mu * (mu - 1.0) * (mu * mu + 3.0 * mu + 4.0);
    let sqrt_delta = C64::new(delta, 0.0).sqrt();
    let half = 0.5 * (mu - mu * mu);
    let x1 = C64::new(half, 0.0) - sqrt_delta * 0.5;
    let x2 = C64::new(half, 0.0) + sqrt_delta * 0.5;
    Ok((x1, x2, delta))
}

/// `p(X) = X^2 + (mu^2 - mu) X + (mu - mu^3)` for residual checks.
pub fn reduction_poly(mu: f64, x: C64) -> C64 {
    x * x + x * (mu * mu - mu) + (mu - mu.powi(3))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// Wave-like family, `mu ~ k pi`; defined for every nonzero `k`.
    One,
    /// Schrodinger-like family, `mu ~ -k^2 pi^2`; defined for `k >= 1`.
    Two,
}

impl Branch {
    pub fn scale_exponent(self) -> i32 {
        match self {
            Branch::One => 1,
            Branch::Two => 4,
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            Branch::One => 1,
            Branch::Two => 2,
        }
    }
}

/// One eigenfrequency with its mode data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchroEigen {
    pub k: i64,
    pub branch: u8,
    pub mu: f64,
    /// Observation trace of the scaled eigenvector,
    /// `(mu^2 - k^2 pi^2) sin(k pi xi) / |k|^{alpha}`.
    pub w_at_xi: f64,
    /// `alpha`: 1 on the wave branch, 4 on the Schrodinger branch.
    pub scale_exp: i32,
    /// Energy norm of the scaled eigenvector.
    pub norm: f64,
    /// `(mu - k pi) 2 pi^2 k^2` on branch one, `(mu + k^2 pi^2) k^2` on
    /// branch two.
    pub asymptotic_residual: f64,
    /// Relative residual of the cubic at the computed root.
    pub cubic_residual: f64,
}

/// Cubic in `mu` equivalent to `-k^2 pi^2` being a root of the reduction
/// quadratic.
fn cubic(s: f64, mu: f64) -> f64 {
    -mu.powi(3) - s * mu * mu + (1.0 + s) * mu + s * s
}

fn cubic_deriv(s: f64, mu: f64) -> f64 {
    -3.0 * mu * mu - 2.0 * s * mu + (1.0 + s)
}

fn solve_near(s: f64, seed: f64, k: i64, branch: Branch) -> Result<f64, SchroError> {
    // widen around the seed until the cubic changes sign
    let mut half_width = 0.2 * (1.0 + seed.abs() * 1e-3);
    let mut bracket = None;
    for _ in 0..12 {
        let (lo, hi) = (seed - half_width, seed + half_width);
        if cubic(s, lo).signum() != cubic(s, hi).signum() {
            bracket = Some((lo, hi));
            break;
        }
        half_width *= 1.7;
    }
    let (lo, hi) = bracket.ok_or(SchroError::SeedDivergence {
        k,
        branch: branch.tag(),
        seed,
    })?;
    let first = bisect(|m| cubic(s, m), lo, hi, 30);
    Ok(newton_bracketed(
        |m| (cubic(s, m), cubic_deriv(s, m)),
        first,
        lo,
        hi,
        1e-15,
        40,
    ))
}

/// Compute one branch eigenvalue by solving the cubic from the asymptotic
/// seed and classifying the root through the reduction quadratic.
pub fn schro_branch_eigenvalue(k: i64, branch: Branch) -> Result<SchroEigen, SchroError> {
    if k == 0 || (branch == Branch::Two && k < 0) {
        return Err(SchroError::BadModeIndex(k));
    }
    let kf = k as f64;
    let s = kf * kf * PI * PI;
    let seed = match branch {
        Branch::One => kf * PI + 1.0 / (2.0 * PI * PI * kf * kf),
        Branch::Two => -s - 1.0 / s,
    };
    let mu = solve_near(s, seed, k, branch)?;
    finish_eigen(k, branch, s, mu)
}

fn finish_eigen(k: i64, branch: Branch, s: f64, mu: f64) -> Result<SchroEigen, SchroError> {
    if mu.abs() < EXCLUDED_TOL || (mu - 1.0).abs() < EXCLUDED_TOL || (mu + 1.0).abs() < EXCLUDED_TOL
    {
        return Err(SchroError::ExcludedMu(mu));
    }
    // classification: exactly one root of the quadratic equals -k^2 pi^2
    let (x1, x2, _) = schro_charpoly(mu)?;
    let target = C64::new(-s, 0.0);
    let tol = 1e-8 * s.max(1.0);
    let match1 = (x1 - target).norm() <= tol;
    let match2 = (x2 - target).norm() <= tol;
    if match1 && match2 {
        return Err(SchroError::BranchAmbiguity { mu });
    }
    let classified = if match1 {
        Branch::One
    } else if match2 {
        Branch::Two
    } else {
        return Err(SchroError::SeedDivergence {
            k,
            branch: branch.tag(),
            seed: mu,
        });
    };
    if classified != branch {
        return Err(SchroError::BranchAmbiguity { mu });
    }

    let kf = k as f64;
    let scale_exp = branch.scale_exponent();
    let scale = kf.abs().powi(scale_exp);
    let w_gap = mu * mu - s;
    // orthonormal-coordinate components (1, i mu, w_gap)/sqrt(2), scaled
    let norm = ((s + mu * mu + w_gap * w_gap) / 2.0).sqrt() / scale;
    let asymptotic_residual = match branch {
        Branch::One => (mu - kf * PI) * 2.0 * PI * PI * kf * kf,
        Branch::Two => (mu + s) * kf * kf,
    };
    let scale_q = cubic(s, 0.0).abs().max(s * s);
    Ok(SchroEigen {
        k,
        branch: branch.tag(),
        mu,
        w_at_xi: f64::NAN,
        scale_exp,
        norm,
        asymptotic_residual,
        cubic_residual: cubic(s, mu).abs() / scale_q,
    })
}

/// Complete a branch eigenvalue with its observation trace at `xi`.
pub fn schro_mode(k: i64, branch: Branch, xi: f64) -> Result<SchroEigen, SchroError> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(SchroError::BadPoint(xi));
    }
    let mut eig = schro_branch_eigenvalue(k, branch)?;
    let kf = k as f64;
    let s = kf * kf * PI * PI;
    let scale = kf.abs().powi(eig.scale_exp);
    eig.w_at_xi = (eig.mu * eig.mu - s) * (kf * PI * xi).sin() / scale;
    Ok(eig)
}

/// All eigenfrequencies of the `n_modes` truncation: for each sine index the
/// two signed wave-branch roots and the Schrodinger-branch root.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchroSpectrum {
    /// Sorted ascending by `mu`.
    pub modes: Vec<SchroEigen>,
    /// First index from which both asymptotic residual bands hold; modes
    /// below it form the finite low set shared by both subspaces.
    pub k0: i64,
}

pub fn schro_eigenvalues(n_modes: usize, xi: f64) -> Result<SchroSpectrum, SchroError> {
    let mut modes = Vec::with_capacity(3 * n_modes);
    for k in 1..=n_modes as i64 {
        modes.push(schro_mode(k, Branch::One, xi)?);
        modes.push(schro_mode(-k, Branch::One, xi)?);
        modes.push(schro_mode(k, Branch::Two, xi)?);
    }
    modes.sort_by(|a, b| a.mu.partial_cmp(&b.mu).unwrap());
    Ok(SchroSpectrum { modes, k0: 3 })
}

impl SchroSpectrum {
    /// Indices of the low set plus the selected branch.
    pub fn subspace_indices(&self, branch: Branch) -> Vec<usize> {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.k.unsigned_abs() < self.k0 as u64 || m.branch == branch.tag())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Smallest distance between the two branch families: left open by the
/// theory, reported as an empirical diagnostic only.
pub fn cross_branch_gap(spectrum: &SchroSpectrum) -> f64 {
    let mut gap = f64::INFINITY;
    for a in spectrum.modes.iter().filter(|m| m.branch == 1) {
        for b in spectrum.modes.iter().filter(|m| m.branch == 2) {
            gap = gap.min((a.mu - b.mu).abs());
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vieta_relations_at_mu_two() {
        let (x1, x2, delta) = schro_charpoly(2.0).unwrap();
        assert!((delta - 28.0).abs() < 1e-12);
        assert!(((x1 + x2) - C64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!(((x1 * x2) - C64::new(-6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quadratic_residual_vanishes_at_roots() {
        for &mu in &[-5.0f64, 2.0, 10.0] {
            let (x1, x2, _) = schro_charpoly(mu).unwrap();
            let scale = (mu * mu - mu).abs().max(1.0);
            assert!(reduction_poly(mu, x1).norm() <= 1e-12 * scale * scale);
            assert!(reduction_poly(mu, x2).norm() <= 1e-12 * scale * scale);
        }
    }

    #[test]
    fn discriminant_negative_exactly_inside_unit_interval() {
        let (.., d) = schro_charpoly(0.5).unwrap();
        assert!(d < 0.0);
        let (.., d) = schro_charpoly(1.5).unwrap();
        assert!(d > 0.0);
        let (.., d) = schro_charpoly(-0.5).unwrap();
        assert!(d > 0.0);
        assert!(matches!(
            schro_charpoly(0.0),
            Err(SchroError::ExcludedMu(_))
        ));
    }

    #[test]
    fn branch_one_residual_band_at_k20() {
        let e = schro_branch_eigenvalue(20, Branch::One).unwrap();
        assert!(
            (0.85..1.15).contains(&e.asymptotic_residual),
            "residual {}",
            e.asymptotic_residual
        );
        let em = schro_branch_eigenvalue(-20, Branch::One).unwrap();
        assert!((0.85..1.15).contains(&em.asymptotic_residual));
    }

    #[test]
    fn branch_two_residual_bounded_at_k20() {
        let e = schro_branch_eigenvalue(20, Branch::Two).unwrap();
        assert!(e.asymptotic_residual.abs() <= 10.0);
        // the sharp value is -1/pi^2
        assert!(
            (e.asymptotic_residual + 1.0 / (PI * PI)).abs() <= 0.01,
            "residual {}",
            e.asymptotic_residual
        );
    }

    #[test]
    fn cubic_roots_satisfy_the_cubic() {
        for k in [1i64, 5, 20, 60] {
            for branch in [Branch::One, Branch::Two] {
                let e = schro_branch_eigenvalue(k, branch).unwrap();
                assert!(
                    e.cubic_residual <= 1e-8,
                    "k = {k}, branch {:?}: residual {}",
                    branch,
                    e.cubic_residual
                );
            }
        }
    }

    #[test]
    fn no_frequency_near_excluded_points() {
        let spectrum = schro_eigenvalues(24, 2f64.sqrt() - 1.0).unwrap();
        for m in &spectrum.modes {
            assert!(m.mu.abs() >= 1e-6);
            assert!((m.mu - 1.0).abs() >= 1e-6);
            assert!((m.mu + 1.0).abs() >= 1e-6);
        }
    }

    #[test]
    fn trace_gap_estimates_hold() {
        // branch one: (mu^2 - k^2 pi^2) k pi -> 1
        let e = schro_mode(30, Branch::One, 0.3).unwrap();
        let v = (e.mu * e.mu - 900.0 * PI * PI) * 30.0 * PI;
        assert!((0.8..1.2).contains(&v), "branch-1 gap scaling {v}");
        // branch two: (mu^2 - k^2 pi^2)/(k^4 pi^4) -> 1
        let e = schro_mode(30, Branch::Two, 0.3).unwrap();
        let v = (e.mu * e.mu - 900.0 * PI * PI) / (30f64.powi(4) * PI.powi(4));
        assert!((v - 1.0).abs() <= 0.05, "branch-2 gap scaling {v}");
    }

    #[test]
    fn trace_vanishes_at_symmetric_points() {
        // even k at xi = 1/2 sits on a sine node (up to the roundoff of pi)
        let e = schro_mode(4, Branch::One, 0.5).unwrap();
        assert!(e.w_at_xi.abs() <= 1e-14, "trace {}", e.w_at_xi);
    }

    #[test]
    fn norms_are_order_one_on_both_branches() {
        for k in [10i64, 30, 60] {
            let e1 = schro_branch_eigenvalue(k, Branch::One).unwrap();
            assert!((1.0..2.0 * PI).contains(&e1.norm), "branch-1 norm {}", e1.norm);
            let e2 = schro_branch_eigenvalue(k, Branch::Two).unwrap();
            let expect = PI.powi(4) / 2f64.sqrt();
            assert!(
                (e2.norm - expect).abs() <= 0.05 * expect,
                "branch-2 norm {} vs {}",
                e2.norm,
                expect
            );
        }
    }

    #[test]
    fn bad_indices_are_rejected() {
        assert!(matches!(
            schro_branch_eigenvalue(0, Branch::One),
            Err(SchroError::BadModeIndex(0))
        ));
        assert!(matches!(
            schro_branch_eigenvalue(-3, Branch::Two),
            Err(SchroError::BadModeIndex(-3))
        ));
        assert!(matches!(
            schro_mode(3, Branch::One, 1.5),
            Err(SchroError::BadPoint(_))
        ));
    }
}
