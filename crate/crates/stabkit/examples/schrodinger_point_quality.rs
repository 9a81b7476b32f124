//! Arithmetic quality of the damping point: bounded continued-fraction
//! quotients keep k |sin(k pi xi)| away from zero, which is what keeps the
//! point channel alive on every mode.
//!
//! Run with: cargo run --release --example schrodinger_point_quality

use stabkit::schrodinger::{continued_fraction, sine_gap};

fn main() {
    let candidates = [
        ("sqrt(2) - 1", 2f64.sqrt() - 1.0),
        ("golden mean", (5f64.sqrt() - 1.0) / 2.0),
        ("pi - 3", std::f64::consts::PI - 3.0),
    ];
    for (name, xi) in candidates {
        match continued_fraction(xi, 40) {
            Ok(cf) => println!(
                "{name:>12}: quotients {:?}..., max = {}, bounded = {}, min k|sin(k pi xi)| = {:.4}",
                &cf.quotients[..cf.quotients.len().min(8)],
                cf.max_quotient,
                cf.bounded_to_depth,
                sine_gap(xi, 10_000)
            ),
            Err(e) => println!("{name:>12}: {e}"),
        }
    }
    match continued_fraction(1.0 / 3.0, 40) {
        Ok(_) => unreachable!(),
        Err(e) => println!("{:>12}: {e}", "1/3"),
    }
}
