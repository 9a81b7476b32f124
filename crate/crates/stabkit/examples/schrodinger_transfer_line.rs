//! Transfer-function boundedness on a vertical line: the measured face of
//! the regularity assumption that substitutes for a bounded damping map.
//!
//! Run with: cargo run --release --example schrodinger_transfer_line

use num_complex::Complex64 as C64;
use stabkit::schrodinger::{transfer_scan, transfer_value, w3_series};

fn main() {
    let xi = 2f64.sqrt() - 1.0;
    let scan = transfer_scan(xi, 1.0, -100.0, 100.0, 2001, 400).expect("scan");
    println!(
        "max |w2(xi, 1 + i y)| over y in [-100, 100]: {:.6} at y = {:.3}",
        scan.max_modulus, scan.argmax_y
    );

    let coarse = transfer_value(xi, C64::new(1.0, 1.0), 200).unwrap();
    let fine = transfer_value(xi, C64::new(1.0, 1.0), 400).unwrap();
    println!(
        "truncation refinement at lambda = 1 + i: |w2_200 - w2_400| = {:.3e}",
        (coarse.w2 - fine.w2).norm()
    );
    println!(
        "per-mode feedback identity residual: {:.3e}",
        fine.w4_identity_residual
    );

    for &y in &[1.0f64, 5.0, 20.0] {
        let lambda = C64::new(1.0, std::f64::consts::PI.powi(2) * y * y);
        let sum = w3_series(xi, lambda, 4000).unwrap();
        println!(
            "|w3| at the comparison frequency y = {y:>4}: {:.6} (bound 1/3 + tail = {:.6})",
            sum.value.norm(),
            1.0 / 3.0 + sum.tail_bound
        );
    }
}
