//! Spectral-weight norms: modal norms `(sum |c_k|^2 |mu_k|^{2s})^{1/2}` used
//! to grade observability constants between the energy norm and its duals.

use num_complex::Complex64 as C64;

use super::CoreError;

/// Threshold below which an eigenfrequency is treated as the kernel mode.
pub const ZERO_MODE_TOL: f64 = 1e-9;

/// Weight data for a `D(A_c^s)`-type modal norm.
///
/// `eigvals` are the purely imaginary eigenvalues `i mu_k` of the conservative
/// generator (stored as complex numbers); the weight of a coefficient is
/// `|mu_k|^{2 order}`, and the kernel mode (if present) gets
/// `zero_mode_weight` since negative powers are undefined there.
#[derive(Debug, Clone)]
pub struct SpectralWeight {
    pub eigvals: Vec<C64>,
    pub order: f64,
    pub zero_mode_weight: f64,
}

impl SpectralWeight {
    pub fn new(eigvals: Vec<C64>, order: f64) -> Self {
        SpectralWeight {
            eigvals,
            order,
            zero_mode_weight: 1.0,
        }
    }

    pub fn with_zero_mode_weight(mut self, w: f64) -> Self {
        self.zero_mode_weight = w;
        self
    }

    /// Per-mode weights `|mu_k|^{2s}`; errors if any weight degenerates.
    pub fn weights(&self) -> Result<Vec<f64>, CoreError> {
        if !(self.zero_mode_weight > 0.0) {
            return Err(CoreError::SingularWeight(
                "zero_mode_weight must be positive".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.eigvals.len());
        for (k, lam) in self.eigvals.iter().enumerate() {
            let mu = lam.norm();
            let w = if mu < ZERO_MODE_TOL {
                if self.order > 0.0 {
                    return Err(CoreError::SingularWeight(format!(
                        "positive order {} with a kernel mode at index {k}",
                        self.order
                    )));
                }
                self.zero_mode_weight
            } else {
                mu.powf(2.0 * self.order)
            };
            if !(w > 0.0) || !w.is_finite() {
                return Err(CoreError::SingularWeight(format!(
                    "weight for mode {k} (mu = {mu}) is {w}"
                )));
            }
            out.push(w);
        }
        Ok(out)
    }
}

/// Weighted modal norm of eigenbasis coefficients.
pub fn spectral_norm(coeffs: &[C64], weight: &SpectralWeight) -> Result<f64, CoreError> {
    if coeffs.len() != weight.eigvals.len() {
        return Err(CoreError::BasisMismatch {
            coeffs: coeffs.len(),
            basis: weight.eigvals.len(),
        });
    }
    let w = weight.weights()?;
    let sum: f64 = coeffs
        .iter()
        .zip(w.iter())
        .map(|(c, wk)| c.norm_sqr() * wk)
        .sum();
    Ok(sum.sqrt())
}
