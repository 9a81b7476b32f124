//! Frequency-domain (Hautus-type) residual: the quantity whose uniform
//! positivity over all frequencies characterizes exponential stability, and
//! whose vanishing along a sequence of eigenvectors certifies its failure.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use super::generator::GeneratorPair;
use super::CoreError;

/// `(||(i omega - A_c) z||^2 + ||D* z||^2) / ||z||^2` in the metric norm.
///
/// Invariant under rescaling of `z` by construction.
pub fn hautus_residual(
    gen: &GeneratorPair,
    omega: f64,
    z: &Array1<C64>,
) -> Result<f64, CoreError> {
    if z.len() != gen.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "state has length {}, dimension is {}",
            z.len(),
            gen.dim()
        )));
    }
    let nz = gen.norm(z);
    if !(nz > 0.0) {
        return Err(CoreError::ZeroVector);
    }
    let mut resolvent = gen.skew().dot(z).mapv(|x| -x);
    for (r, zi) in resolvent.iter_mut().zip(z.iter()) {
        *r += C64::new(0.0, omega) * zi;
    }
    let res_norm = gen.norm(&resolvent);
    let obs_norm_sq = gen.dissipation_rate(z);
    Ok((res_norm * res_norm + obs_norm_sq) / (nz * nz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::generator::assemble_generator;
    use ndarray::{array, Array2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exact_eigenpair_with_blind_observation_has_zero_residual() {
        // diag(i, -i) with observation on the second coordinate only
        let gen = assemble_generator(
            array![[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            {
                let mut d = Array2::<C64>::zeros((2, 2));
                d[[1, 1]] = c(-1.0, 0.0);
                d
            },
            vec![array![c(0.0, 0.0), c(1.0, 0.0)]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let e1 = array![c(1.0, 0.0), c(0.0, 0.0)];
        let r = hautus_residual(&gen, 1.0, &e1).unwrap();
        assert!(r < 1e-28);

        // eigenvector seen by the observation: residual equals |D* z|^2/|z|^2
        let e2 = array![c(0.0, 0.0), c(2.0, 0.0)];
        let r = hautus_residual(&gen, -1.0, &e2).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_vector_is_rejected() {
        let gen = assemble_generator(
            array![[c(0.0, 1.0)]],
            Array2::zeros((1, 1)),
            vec![],
            vec![1.0],
        )
        .unwrap();
        let res = hautus_residual(&gen, 0.3, &array![c(0.0, 0.0)]);
        assert!(matches!(res, Err(CoreError::ZeroVector)));
    }
}
