//! Observability constants live or die with the comparison norm: in the
//! right dual weight they are stable under truncation growth, in the plain
//! energy norm they collapse.
//!
//! Run with: cargo run --release --example observability_weights

use stabkit::beam::beam_observability_weighted;
use stabkit::schrodinger::{schro_observability, Subspace};

fn main() {
    let xi = 2f64.sqrt() - 1.0;
    println!("beam boundary channel, horizon T = 4:");
    println!("{:>8} {:>16} {:>16}", "modes", "c(T), s = -1", "c(T), s = 0");
    for n in [8usize, 16, 32] {
        let weak = beam_observability_weighted(n, 4.0, -1.0).unwrap().constant;
        let full = beam_observability_weighted(n, 4.0, 0.0).unwrap().constant;
        println!("{n:>8} {weak:>16.6e} {full:>16.6e}");
    }

    println!("\npoint channel, wave branch (s = -3, T = 12) and full space:");
    println!("{:>8} {:>16} {:>16}", "modes", "c(T) on H1", "full, s = 0");
    for n in [16usize, 32, 48] {
        let h1 = schro_observability(n, xi, Subspace::H1, 12.0).unwrap();
        println!("{n:>8} {:>16.6e} {:>16.6e}", h1.report.constant, h1.full_constant);
    }
    println!("\n(the weighted columns stay level; the unweighted ones sink)");
}
