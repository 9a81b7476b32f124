//! The frequency-domain residual along the wave branch tends to zero, which
//! rules out a uniform spectral bound: the system cannot be exponentially
//! stable for any placement of the damping point.
//!
//! Run with: cargo run --release --example hautus_witness_sequence

use stabkit::schrodinger::hautus_witness;

fn main() {
    let xi = 2f64.sqrt() - 1.0;
    println!("{:>6} {:>16} {:>16}", "n", "witness(n)", "n^4 * witness");
    for n in [10i64, 20, 40, 80, 160] {
        let w = hautus_witness(n, xi).unwrap();
        println!("{n:>6} {w:>16.6e} {:>16.6e}", (n as f64).powi(4) * w);
    }
    println!("\n(the witness vanishes like n^-4; the scaled column stays in a fixed band)");
}
