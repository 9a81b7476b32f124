//! Evolve a damped run and certify the energy balance: the drop of
//! E(t) = ||z(t)||^2 / 2 must equal the integrated observation power.
//!
//! Run with: cargo run --release --example energy_identity

use stabkit::beam::beam_generator;
use stabkit::core::{dissipation_residual, evolve, EvolveMode};

fn main() {
    let gen = beam_generator(12, 1.0).expect("beam generator");
    let dim = gen.dim();
    let mut z0 = ndarray::Array1::zeros(dim);
    for j in 0..dim {
        let mu = gen.skew()[[j, j]].im.abs();
        z0[j] = num_complex::Complex64::new(1.0 / (1.0 + mu), 0.0);
    }
    let norm = gen.norm(&z0);
    z0.mapv_inplace(|x| x / norm);

    let traj = evolve(&gen, &z0, 0.01, 40.0, EvolveMode::Damped).expect("evolve");
    let e0 = traj.energies[0];
    println!("damped boundary-feedback run, dim = {dim}");
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "E(t)", "E(0)-E(t)", "int |D*z|^2");
    for i in (0..traj.times.len()).step_by(traj.times.len() / 10) {
        println!(
            "{:8.2} {:14.6e} {:14.6e} {:14.6e}",
            traj.times[i],
            traj.energies[i],
            e0 - traj.energies[i],
            traj.diss_integral[i]
        );
    }
    let residual = dissipation_residual(&traj);
    println!("\nenergy identity residual: {residual:.3e} (relative {:.3e})", residual / e0);
    assert!(residual <= 1e-6 * e0);
    println!("identity certified.");
}
