//! Time evolution of the closed-loop flow `z' = A z`, with the energy and the
//! dissipation channel sampled along the run.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::generator::GeneratorPair;
use super::linalg::{general_modes, skew_modes, ModalBasis};
use super::CoreError;
use crate::numeric::exp_integral;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolveMode {
    Conservative,
    Damped,
}

/// Integration scheme.
///
/// `Modal` diagonalizes the generator once and evaluates the flow exactly at
/// the sample times; the dissipation integral is the closed-form integral of
/// the modal expansion. `Rk4` is the classical fixed-step one-step scheme with
/// the requested `dt` as the step; its dissipation integral is the trapezoid
/// rule on the per-step channel samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Modal,
    Rk4,
}

/// Sampled trajectory of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Array1<C64>>,
    pub energies: Vec<f64>,
    /// Observation power `||D* z(t)||^2` per sample.
    pub dissipation: Vec<f64>,
    /// Cumulative `int_0^t ||D* z||^2 ds` per sample; identically zero for
    /// conservative runs, where the damping term is absent from the flow.
    pub diss_integral: Vec<f64>,
    pub mode: EvolveMode,
}

impl Trajectory {
    pub fn final_state(&self) -> &Array1<C64> {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn energy_trace(&self) -> super::decay::EnergyTrace {
        super::decay::EnergyTrace {
            times: self.times.clone(),
            energies: self.energies.clone(),
        }
    }
}

/// dt that keeps the classical fourth-order scheme both stable and accurate:
/// one tenth of the inverse spectral radius.
pub fn stable_dt(gen: &GeneratorPair, mode: EvolveMode) -> f64 {
    let a = match mode {
        EvolveMode::Conservative => gen.skew().clone(),
        EvolveMode::Damped => gen.damped(),
    };
    let rho = super::linalg::spectral_radius_estimate(&a, 60).max(1e-12);
    0.1 / rho
}

/// Evolve with the default (modal) scheme.
pub fn evolve(
    gen: &GeneratorPair,
    z0: &Array1<C64>,
    dt: f64,
    t_max: f64,
    mode: EvolveMode,
) -> Result<Trajectory, CoreError> {
    evolve_with(gen, z0, dt, t_max, mode, Scheme::Modal)
}

pub fn evolve_with(
    gen: &GeneratorPair,
    z0: &Array1<C64>,
    dt: f64,
    t_max: f64,
    mode: EvolveMode,
    scheme: Scheme,
) -> Result<Trajectory, CoreError> {
    if z0.len() != gen.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "initial state has length {}, state dimension is {}",
            z0.len(),
            gen.dim()
        )));
    }
    if !(dt > 0.0) || !(t_max > 0.0) {
        return Err(CoreError::DimensionMismatch(
            "dt and t_max must be positive".into(),
        ));
    }
    match scheme {
        Scheme::Modal => evolve_modal(gen, z0, dt, t_max, mode),
        Scheme::Rk4 => evolve_rk4(gen, z0, dt, t_max, mode),
    }
}

/// Modal decomposition of the requested flow, plus the observation rows
/// mapped into modal coordinates (columns `g_j = D* v_j`).
pub(crate) fn modal_decomposition(
    gen: &GeneratorPair,
    mode: EvolveMode,
) -> Result<(ModalBasis, Array2<C64>), CoreError> {
    let modes = match mode {
        EvolveMode::Conservative => skew_modes(gen.skew(), gen.metric())?,
        EvolveMode::Damped => general_modes(&gen.damped())?,
    };
    let obs_modal = gen.obs().dot(&modes.basis);
    Ok((modes, obs_modal))
}

fn sample_grid(dt: f64, t_max: f64) -> (usize, f64) {
    let n = (t_max / dt).ceil().max(1.0) as usize;
    (n, t_max / n as f64)
}

fn evolve_modal(
    gen: &GeneratorPair,
    z0: &Array1<C64>,
    dt: f64,
    t_max: f64,
    mode: EvolveMode,
) -> Result<Trajectory, CoreError> {
    let (modes, obs_modal) = modal_decomposition(gen, mode)?;
    let n = gen.dim();
    let coeffs = modes.coefficients(z0);
    let recon = modes.reconstruct(&coeffs);
    let z0_norm = gen.norm(z0);
    let err = gen.norm(&(&recon - z0));
    if err > 1e-7 * z0_norm.max(1e-30) {
        return Err(CoreError::IllConditionedModes(err / z0_norm.max(1e-30)));
    }

    let (steps, dt) = sample_grid(dt, t_max);
    let m = obs_modal.nrows();

    // Scaled observation columns g_j = a_j D* v_j; the channel signal is
    // sum_j g_j exp(lambda_j t).
    let mut g = Array2::<C64>::zeros((m, n));
    for j in 0..n {
        for r in 0..m {
            g[[r, j]] = obs_modal[[r, j]] * coeffs[j];
        }
    }

    // Pair data for the closed-form dissipation integral over one step:
    // int ||signal||^2 = sum_{j,l} W_jl exp(s_jl t), s_jl = conj(l_j) + l_l.
    let damped = mode == EvolveMode::Damped;
    let mut pair_k = Vec::new();
    let mut pair_step = Vec::new();
    let mut pair_run = Vec::new();
    if damped && m > 0 {
        pair_k.reserve(n * n);
        pair_step.reserve(n * n);
        pair_run.reserve(n * n);
        for j in 0..n {
            for l in 0..n {
                let mut w = C64::new(0.0, 0.0);
                for r in 0..m {
                    w += g[[r, j]].conj() * g[[r, l]];
                }
                let s = modes.eigenvalues[j].conj() + modes.eigenvalues[l];
                pair_k.push(w * exp_integral(s, dt));
                pair_step.push((s * dt).exp());
                pair_run.push(C64::new(1.0, 0.0));
            }
        }
    }

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    let mut dissipation = Vec::with_capacity(steps + 1);
    let mut diss_integral = Vec::with_capacity(steps + 1);

    let step_phase: Vec<C64> = modes.eigenvalues.iter().map(|l| (l * dt).exp()).collect();
    let mut modal_state: Array1<C64> = coeffs.clone();
    let mut integral = 0.0f64;

    for i in 0..=steps {
        let t = i as f64 * dt;
        let z = modes.reconstruct(&modal_state);
        let energy = gen.energy(&z);
        times.push(t);
        energies.push(energy);
        dissipation.push(gen.dissipation_rate(&z));
        diss_integral.push(integral);
        states.push(z);
        if i == steps {
            break;
        }
        if damped && m > 0 {
            let mut inc = 0.0f64;
            for p in 0..pair_k.len() {
                inc += (pair_k[p] * pair_run[p]).re;
                pair_run[p] *= pair_step[p];
            }
            integral += inc.max(0.0);
        }
        for j in 0..n {
            modal_state[j] *= step_phase[j];
        }
    }

    check_energy_sanity(mode, &energies)?;
    Ok(Trajectory {
        times,
        states,
        energies,
        dissipation,
        diss_integral,
        mode,
    })
}

fn evolve_rk4(
    gen: &GeneratorPair,
    z0: &Array1<C64>,
    dt: f64,
    t_max: f64,
    mode: EvolveMode,
) -> Result<Trajectory, CoreError> {
    let a = match mode {
        EvolveMode::Conservative => gen.skew().clone(),
        EvolveMode::Damped => gen.damped(),
    };
    let (steps, dt) = sample_grid(dt, t_max);
    let damped = mode == EvolveMode::Damped;

    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    let mut dissipation = Vec::with_capacity(steps + 1);
    let mut diss_integral = Vec::with_capacity(steps + 1);

    let mut z = z0.clone();
    let mut integral = 0.0f64;
    let mut last_flux = gen.dissipation_rate(&z);
    for i in 0..=steps {
        let t = i as f64 * dt;
        let energy = gen.energy(&z);
        let flux = gen.dissipation_rate(&z);
        if i > 0 && damped {
            integral += 0.5 * dt * (last_flux + flux);
        }
        times.push(t);
        energies.push(energy);
        dissipation.push(flux);
        diss_integral.push(integral);
        states.push(z.clone());
        last_flux = flux;
        if i == steps {
            break;
        }
        let k1 = a.dot(&z);
        let k2 = a.dot(&(&z + &k1.mapv(|x| x * (0.5 * dt))));
        let k3 = a.dot(&(&z + &k2.mapv(|x| x * (0.5 * dt))));
        let k4 = a.dot(&(&z + &k3.mapv(|x| x * dt)));
        z = &z
            + &(k1 + k2.mapv(|x| x * 2.0) + k3.mapv(|x| x * 2.0) + k4).mapv(|x| x * (dt / 6.0));
    }

    check_energy_sanity(mode, &energies)?;
    Ok(Trajectory {
        times,
        states,
        energies,
        dissipation,
        diss_integral,
        mode,
    })
}

fn check_energy_sanity(mode: EvolveMode, energies: &[f64]) -> Result<(), CoreError> {
    if mode == EvolveMode::Conservative {
        let e0 = energies.first().copied().unwrap_or(0.0);
        let emax = energies.iter().copied().fold(0.0, f64::max);
        if e0 > 0.0 && emax > e0 * (1.0 + 1e-6) {
            return Err(CoreError::UnstableStep {
                growth: (emax - e0) / e0,
            });
        }
    }
    Ok(())
}

/// Maximum defect of the energy identity
/// `E(0) - E(t) = int_0^t ||D* z||^2 ds` over the sampled window.
pub fn dissipation_residual(traj: &Trajectory) -> f64 {
    let e0 = traj.energies[0];
    traj.energies
        .iter()
        .zip(traj.diss_integral.iter())
        .map(|(e, i)| (e0 - e - i).abs())
        .fold(0.0, f64::max)
}
