//! Split a damped run into the free flow plus a correction and compare the
//! observed correction against its a-priori bound T ||D|| ||D*||.
//!
//! Run with: cargo run --release --example correction_split

use num_complex::Complex64 as C64;
use stabkit::beam::beam_generator;
use stabkit::core::correction_split;
use stabkit::thermo::{thermo_generator, thermo_horizon, thermo_state};

fn main() {
    // beam channel, T = 4
    let gen = beam_generator(16, 1.0).unwrap();
    let dim = gen.dim();
    let mut z0 = ndarray::Array1::<C64>::zeros(dim);
    for j in 0..dim {
        let mu = gen.skew()[[j, j]].im.abs();
        z0[j] = C64::new(1.0 / (1.0 + mu), 0.0);
    }
    let rep = correction_split(&gen, &z0, 4.0).unwrap();
    println!(
        "beam:   ratio = {:.6}  bound = {:.6}  (T = 4)",
        rep.ratio, rep.bound
    );

    // distributed-damping example at its cancellation horizon
    let alpha = 1.0;
    let horizon = thermo_horizon(alpha);
    let gen = thermo_generator(16, alpha, 1.0).unwrap();
    let z0 = thermo_state(16, |k| {
        let s = (k * k) as f64 * std::f64::consts::PI.powi(2);
        let w = 1.0 / (1.0 + (k * k) as f64);
        (w / s, w, w)
    });
    let rep = correction_split(&gen, &z0, horizon).unwrap();
    println!(
        "thermo: ratio = {:.6}  bound = {:.6}  (T = {horizon:.4})",
        rep.ratio, rep.bound
    );
}
