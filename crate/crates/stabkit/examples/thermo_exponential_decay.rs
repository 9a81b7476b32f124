//! Uniform decay example: the fitted exponential rate against the exact
//! block-eigenvalue rate of the truncation.
//!
//! Run with: cargo run --release --example thermo_exponential_decay

use stabkit::thermo::{thermo_decay_experiment, ThermoInit};

fn main() {
    for n_modes in [16usize, 32, 64] {
        let out = thermo_decay_experiment(n_modes, 1.0, 1.0, ThermoInit::Mixed { power: 0.75 }, 80.0)
            .expect("decay run");
        let rel = (out.report.rate_or_exponent - out.oracle_rate).abs() / out.oracle_rate;
        println!(
            "modes = {n_modes:>3}: fitted omega = {:.6}, block oracle = {:.6}, rel. err = {:.2}%",
            out.report.rate_or_exponent,
            out.oracle_rate,
            100.0 * rel
        );
    }
    println!("\nslowest block eigenvalue real parts (modes = 16):");
    let out = thermo_decay_experiment(16, 1.0, 1.0, ThermoInit::Mixed { power: 0.75 }, 40.0).unwrap();
    for (k, re) in out.slowest_per_block.iter().enumerate().take(8) {
        println!("  k = {:>2}: Re = {re:.6}", k + 1);
    }
}
