//! Beam eigenfrequencies: transcendental roots, their asymptotic residuals,
//! and the boundary components of the normalized modes.
//!
//! Run with: cargo run --release --example beam_spectrum

use stabkit::beam::beam_eigenvalues;

fn main() {
    let spectrum = beam_eigenvalues(3, 40).expect("spectrum");
    println!(
        "{:>4} {:>14} {:>12} {:>12} {:>12} {:>12}",
        "k", "sqrt(mu_k)", "r_k", "|f~(z_k)|", "eta_k", "z^4 eta^2"
    );
    for m in spectrum.modes.iter().filter(|m| m.k % 4 == 0 || m.k < 4) {
        println!(
            "{:4} {:14.8} {:12.6} {:12.3e} {:12.4e} {:12.6}",
            m.k,
            m.z,
            m.asymptotic_residual,
            m.char_residual,
            m.eta,
            m.z.powi(4) * m.eta * m.eta,
        );
    }
    println!("\nsmallest spacing of the symmetric spectrum: {:.6}", spectrum.gap);
    println!("kernel-mode boundary component: {:.6}", spectrum.zero_eta);
    println!("(r_k -> 1 and z^4 eta^2 -> 2 as the index grows)");
}
