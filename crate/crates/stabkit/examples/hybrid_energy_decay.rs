//! Grid realization of the string with a boundary mass and damper: exact
//! discrete energy identity, second-order convergence under refinement, and
//! the square-root decay fit.
//!
//! Run with: cargo run --release --example hybrid_energy_decay

use stabkit::hybrid1d::{
    hybrid_convergence_order, hybrid_decay_experiment, hybrid_observability, HybridInit,
};

fn main() {
    let order = hybrid_convergence_order(32, 1.0, 1.0, 10.0).expect("refinement study");
    println!("observed spatial convergence order of E(10): {order:.3}");

    let out = hybrid_decay_experiment(128, 1.0, 1.0, HybridInit::SmoothSine, 400.0)
        .expect("decay run");
    println!(
        "decay run (n = 128): sup E(t)(1+t)^(1/2) = {:.4}, best-fit exponent = {:.3}",
        out.report.sup_ratio, out.report.best_fit_exponent
    );
    println!(
        "energy identity residual: {:.3e} (relative {:.3e})",
        out.energy_identity_residual,
        out.energy_identity_residual / out.initial_energy
    );

    for n in [32usize, 64] {
        let rep = hybrid_observability(n, 8.0).expect("observability");
        println!(
            "channel observability (n = {n:>3}, s = -2, T = 8): c = {:.6e}",
            rep.constant
        );
    }
}
