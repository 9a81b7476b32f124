//! Coupled fourth-order/first-order system with distributed damping on the
//! second channel: closed-form mode solutions, the 2x2 observability matrix,
//! a two-route observability constant and the exponential decay run.
//!
//! The sine basis diagonalizes everything, so the generator splits into
//! independent 3x3 blocks per wavenumber.

use ndarray::{Array1, Array2};
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{
    assemble_generator, evolve, fit_decay, observability_constant, CoreError, DecayModel,
    DecayReport, EvolveMode, FitParams, GeneratorPair, ObservabilityReport, QuadratureRule,
    SpectralWeight,
};

use std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("mode index must be >= 1")]
    ZeroModeIndex,
    #[error("coupling alpha must be positive (got {0})")]
    NonPositiveAlpha(f64),
    #[error("at least {needed} modes required (got {got})")]
    TooFewModes { needed: usize, got: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Sine-series initial data of one mode.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ThermoModeIC {
    pub k: usize,
    pub u0: f64,
    pub u1: f64,
    pub theta0: f64,
    pub alpha: f64,
}

impl ThermoModeIC {
    pub fn new(k: usize, u0: f64, u1: f64, theta0: f64, alpha: f64) -> Result<Self, ThermoError> {
        if k == 0 {
            return Err(ThermoError::ZeroModeIndex);
        }
        if !(alpha > 0.0) {
            return Err(ThermoError::NonPositiveAlpha(alpha));
        }
        Ok(ThermoModeIC {
            k,
            u0,
            u1,
            theta0,
            alpha,
        })
    }

    fn omega(&self) -> f64 {
        let s = (self.k * self.k) as f64 * PI * PI;
        s * (1.0 + self.alpha * self.alpha).sqrt()
    }
}

/// Closed-form conservative solution `(u_k(t), theta_k(t))` of one mode.
pub fn thermo_mode_solution(ic: &ThermoModeIC, t: f64) -> (f64, f64) {
    let a = ic.alpha;
    let s = (ic.k * ic.k) as f64 * PI * PI; // k^2 pi^2
    let one = 1.0 + a * a;
    let forcing = ic.theta0 + a * s * ic.u0;
    let u_part = a * forcing / (s * one);
    let c1 = (s * ic.u0 - a * ic.theta0) / (s * one);
    let c2 = ic.u1 / (s * one.sqrt());
    let w = ic.omega();
    let u = u_part + c1 * (w * t).cos() + c2 * (w * t).sin();
    // theta_k = -a s u_k + theta0 + a s u0
    let theta = forcing / one + (a * (a * ic.theta0 - s * ic.u0) / one) * (w * t).cos()
        - (a * ic.u1 / one.sqrt()) * (w * t).sin();
    (u, theta)
}

/// Time derivative of the closed-form `u_k`, for conservation checks.
pub fn thermo_mode_velocity(ic: &ThermoModeIC, t: f64) -> f64 {
    let a = ic.alpha;
    let s = (ic.k * ic.k) as f64 * PI * PI;
    let one = 1.0 + a * a;
    let c1 = (s * ic.u0 - a * ic.theta0) / (s * one);
    let c2 = ic.u1 / (s * one.sqrt());
    let w = ic.omega();
    -c1 * w * (w * t).sin() + c2 * w * (w * t).cos()
}

/// The 2x2 matrix of the per-mode observation quadratic form, as a function
/// of the coupling, in the `(k^2 u0, theta0)` variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermoObsMatrix {
    pub m: [[f64; 2]; 2],
    pub det: f64,
    pub trace: f64,
    pub lambda_min: f64,
}

/// Closed-form observation matrix, determinant, trace and smallest
/// eigenvalue.
pub fn thermo_obs_matrix(alpha: f64) -> ThermoObsMatrix {
    let a = alpha;
    let one = 1.0 + a * a;
    let pow52 = one.powf(2.5);
    let m11 = 3.0 * a * a * PI.powi(3) / pow52;
    let m12 = -a * (a * a - 2.0) * PI / pow52;
    let m22 = (2.0 + a.powi(4)) / (PI * pow52);
    let det = 2.0 * a * a * PI * PI / one.powi(3);
    let trace = (2.0 + a.powi(4) + 3.0 * a * a * PI.powi(4)) / (PI * pow52);
    let lambda_min = 0.5 * (trace - (trace * trace - 4.0 * det).sqrt());
    ThermoObsMatrix {
        m: [[m11, m12], [m12, m22]],
        det,
        trace,
        lambda_min,
    }
}

/// Same quadratic form in the `(k^2 pi^2 u0, theta0)` variables, which are
/// the ones the block energy norm uses; congruent to [`thermo_obs_matrix`].
fn obs_matrix_pi_normalized(alpha: f64) -> ThermoObsMatrix {
    let a = alpha;
    let one = 1.0 + a * a;
    let pi52 = PI * one.powf(2.5);
    let m11 = 3.0 * a * a / pi52;
    let m12 = a * (2.0 - a * a) / pi52;
    let m22 = (2.0 + a.powi(4)) / pi52;
    let det = m11 * m22 - m12 * m12;
    let trace = m11 + m22;
    let lambda_min = 0.5 * (trace - (trace * trace - 4.0 * det).sqrt());
    ThermoObsMatrix {
        m: [[m11, m12], [m12, m22]],
        det,
        trace,
        lambda_min,
    }
}

/// The horizon at which every oscillatory cross term of the per-mode
/// observation integral cancels exactly.
pub fn thermo_horizon(alpha: f64) -> f64 {
    2.0 / ((1.0 + alpha * alpha).sqrt() * PI)
}

/// `int_0^T |theta_k(t)|^2 dt` at the cancellation horizon, in closed form.
pub fn thermo_theta_integral(ic: &ThermoModeIC) -> f64 {
    let a = ic.alpha;
    let s = (ic.k * ic.k) as f64 * PI * PI;
    let one = 1.0 + a * a;
    let t = thermo_horizon(a);
    let constant = (ic.theta0 + a * s * ic.u0) / one;
    let cos_amp = a * (a * ic.theta0 - s * ic.u0) / one;
    let sin_amp = -a * ic.u1 / one.sqrt();
    t * (constant * constant + 0.5 * (cos_amp * cos_amp + sin_amp * sin_amp))
}

/// Per-mode lower bound of the observation integral: the analytic route.
pub fn thermo_route_a_bound(ic: &ThermoModeIC) -> f64 {
    let a = ic.alpha;
    let one = 1.0 + a * a;
    let t = thermo_horizon(a);
    let lam = obs_matrix_pi_normalized(a).lambda_min;
    let q1 = (ic.k * ic.k) as f64 * PI * PI * ic.u0;
    t * (a * a * ic.u1 * ic.u1 / (one.powf(1.5) * PI) + lam * (q1 * q1 + ic.theta0 * ic.theta0))
}

/// Block-diagonal generator on `n_modes` sine modes; state layout is
/// `(u_k, v_k, theta_k)` per mode, metric `(k^4 pi^4, 1, 1)` per block.
pub fn thermo_generator(
    n_modes: usize,
    alpha: f64,
    beta: f64,
) -> Result<GeneratorPair, ThermoError> {
    if !(alpha > 0.0) {
        return Err(ThermoError::NonPositiveAlpha(alpha));
    }
    if n_modes == 0 {
        return Err(ThermoError::TooFewModes { needed: 1, got: 0 });
    }
    let dim = 3 * n_modes;
    let mut skew = Array2::<C64>::zeros((dim, dim));
    let mut dissipative = Array2::<C64>::zeros((dim, dim));
    let mut metric = vec![1.0; dim];
    let mut obs = Vec::with_capacity(n_modes);
    for k in 1..=n_modes {
        let b = 3 * (k - 1);
        let s = (k * k) as f64 * PI * PI;
        skew[[b, b + 1]] = C64::new(1.0, 0.0);
        skew[[b + 1, b]] = C64::new(-s * s, 0.0);
        skew[[b + 1, b + 2]] = C64::new(alpha * s, 0.0);
        skew[[b + 2, b + 1]] = C64::new(-alpha * s, 0.0);
        dissipative[[b + 2, b + 2]] = C64::new(-beta, 0.0);
        metric[b] = s * s;
        let mut row = Array1::<C64>::zeros(dim);
        row[b + 2] = C64::new(beta.sqrt(), 0.0);
        obs.push(row);
    }
    Ok(assemble_generator(skew, dissipative, obs, metric)?)
}

/// State vector from per-mode sine coefficients `(u_k, v_k, theta_k)`.
pub fn thermo_state(
    n_modes: usize,
    data: impl Fn(usize) -> (f64, f64, f64),
) -> Array1<C64> {
    let mut z = Array1::<C64>::zeros(3 * n_modes);
    for k in 1..=n_modes {
        let (u, v, th) = data(k);
        let b = 3 * (k - 1);
        z[b] = C64::new(u, 0.0);
        z[b + 1] = C64::new(v, 0.0);
        z[b + 2] = C64::new(th, 0.0);
    }
    z
}

/// Two-route observability report at the cancellation horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermoObservability {
    /// Analytic per-mode lower-bound constant (uniform in the wavenumber).
    pub route_a: f64,
    /// Gramian constant in the plain energy norm.
    pub route_b: ObservabilityReport,
    pub horizon: f64,
    pub obs_matrix: ThermoObsMatrix,
}

/// Observability of the undamped flow through the second channel: the
/// analytic route gives `T min(alpha^2/((1+alpha^2)^{3/2} pi), lambda_min)`,
/// the Gramian route computes `c(T)` in the unweighted norm.
pub fn thermo_observability(
    n_modes: usize,
    alpha: f64,
) -> Result<ThermoObservability, ThermoError> {
    if n_modes < 4 {
        return Err(ThermoError::TooFewModes {
            needed: 4,
            got: n_modes,
        });
    }
    let horizon = thermo_horizon(alpha);
    let one = 1.0 + alpha * alpha;
    let lam = obs_matrix_pi_normalized(alpha).lambda_min;
    let route_a = horizon * (alpha * alpha / (one.powf(1.5) * PI)).min(lam);

    let gen = thermo_generator(n_modes, alpha, 1.0)?;
    let weight = SpectralWeight::new(vec![], 0.0);
    let route_b = observability_constant(&gen, horizon, &weight, QuadratureRule::Modal)?;
    Ok(ThermoObservability {
        route_a,
        route_b,
        horizon,
        obs_matrix: thermo_obs_matrix(alpha),
    })
}

/// Initial data for the decay run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum ThermoInit {
    /// Modes weighted by `1/(1 + (k^2 pi^2)^power)` on all three channels.
    Mixed { power: f64 },
    SingleMode { k: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThermoDecayOutcome {
    pub report: DecayReport,
    /// `-2 max_k Re lambda` over the damped block eigenvalues: the true
    /// energy decay rate of the truncation.
    pub oracle_rate: f64,
    /// Slowest (largest) real part per block.
    pub slowest_per_block: Vec<f64>,
}

/// Damped block eigenvalues for wavenumber `k`.
pub fn thermo_block_eigenvalues(
    k: usize,
    alpha: f64,
    beta: f64,
) -> Result<Vec<C64>, ThermoError> {
    let s = (k * k) as f64 * PI * PI;
    let block = ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(-s * s, 0.0), C64::new(0.0, 0.0), C64::new(alpha * s, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-alpha * s, 0.0), C64::new(-beta, 0.0)]
    ];
    let (vals, _) = block.eig().map_err(CoreError::from_linalg)?;
    Ok(vals.to_vec())
}

/// Exponential decay run with the block-eigenvalue rate as oracle.
pub fn thermo_decay_experiment(
    n_modes: usize,
    alpha: f64,
    beta: f64,
    init: ThermoInit,
    t_max: f64,
) -> Result<ThermoDecayOutcome, ThermoError> {
    let gen = thermo_generator(n_modes, alpha, beta)?;
    let mut z0 = match init {
        ThermoInit::Mixed { power } => thermo_state(n_modes, |k| {
            let s = (k * k) as f64 * PI * PI;
            let w = 1.0 / (1.0 + s.powf(power));
            (w / s, w, w)
        }),
        ThermoInit::SingleMode { k } => {
            thermo_state(n_modes, |kk| if kk == k { (0.0, 1.0, 0.5) } else { (0.0, 0.0, 0.0) })
        }
    };
    let norm = gen.norm(&z0);
    z0.mapv_inplace(|x| x / norm);

    let dt = (t_max / 4000.0).min(0.025);
    let traj = evolve(&gen, &z0, dt, t_max, EvolveMode::Damped)?;
    let report = fit_decay(
        &traj.energy_trace(),
        DecayModel::Exponential,
        &FitParams::default(),
    )?;

    let mut slowest_per_block = Vec::with_capacity(n_modes);
    let mut slowest = f64::NEG_INFINITY;
    for k in 1..=n_modes {
        let vals = thermo_block_eigenvalues(k, alpha, beta)?;
        let re = vals.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
        slowest_per_block.push(re);
        slowest = slowest.max(re);
    }
    Ok(ThermoDecayOutcome {
        report,
        oracle_rate: -2.0 * slowest,
        slowest_per_block,
    })
}
