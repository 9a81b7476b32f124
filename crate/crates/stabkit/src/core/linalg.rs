//! Complex linear algebra helpers for weighted (diagonal-metric) state spaces.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Inverse, UPLO};
use num_complex::Complex64 as C64;

use super::CoreError;

extern "C" {
    fn openblas_set_num_threads(n: std::os::raw::c_int);
}

static BLAS_SINGLE_THREAD: std::sync::Once = std::sync::Once::new();

/// Results must be bit-reproducible for a fixed configuration, so the BLAS
/// backend is pinned to one thread (no timing-dependent reductions).
pub fn ensure_single_thread_blas() {
    BLAS_SINGLE_THREAD.call_once(|| unsafe { openblas_set_num_threads(1) });
}

/// Weighted inner product `<z, w> = w^H M z` with a diagonal positive metric.
pub fn metric_inner(metric: &[f64], z: &Array1<C64>, w: &Array1<C64>) -> C64 {
    z.iter()
        .zip(w.iter())
        .zip(metric.iter())
        .map(|((zi, wi), m)| wi.conj() * zi * *m)
        .sum()
}

/// Weighted norm induced by [`metric_inner`].
pub fn metric_norm(metric: &[f64], z: &Array1<C64>) -> f64 {
    metric_inner(metric, z, z).re.max(0.0).sqrt()
}

/// Largest absolute entry, used for relative tolerances.
pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Power-iteration estimate of the spectral radius. Deterministic: the start
/// vector is a fixed quasi-random profile, not an RNG draw.
pub fn spectral_radius_estimate(a: &Array2<C64>, iters: usize) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v: Array1<C64> = Array1::from_iter(
        (0..n).map(|j| C64::new((j as f64 + 1.0).cos() + 1.5, (0.7 * (j as f64 + 1.0)).sin())),
    );
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|x| x / norm);
    let mut rho = 0.0;
    for _ in 0..iters {
        let w = a.dot(&v);
        let nw = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        rho = nw;
        v = w.mapv(|x| x / nw);
    }
    rho
}

/// Eigen-decomposition of a generator in a diagonal-metric space.
///
/// `frequencies[j]` holds the eigenvalue, `basis` its eigenvector columns and
/// `inverse` the coordinate map: `inverse.dot(z)` are the modal coefficients.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub eigenvalues: Vec<C64>,
    pub basis: Array2<C64>,
    pub inverse: Array2<C64>,
}

impl ModalBasis {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn coefficients(&self, z: &Array1<C64>) -> Array1<C64> {
        self.inverse.dot(z)
    }

    pub fn reconstruct(&self, coeffs: &Array1<C64>) -> Array1<C64> {
        self.basis.dot(coeffs)
    }
}

/// Decompose a metric-skew-adjoint generator through the similar Hermitian
/// matrix `i B A B^{-1}` with `B = sqrt(metric)`. The returned basis is
/// metric-orthonormal and the eigenvalues are purely imaginary, sorted by
/// ascending imaginary part (ties broken by index, so the order is stable).
pub fn skew_modes(a: &Array2<C64>, metric: &[f64]) -> Result<ModalBasis, CoreError> {
    ensure_single_thread_blas();
    let n = a.nrows();
    let b: Vec<f64> = metric.iter().map(|m| m.sqrt()).collect();
    let mut h = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            h[[i, j]] = C64::new(0.0, 1.0) * a[[i, j]] * b[i] / b[j];
        }
    }
    // Hermiticity is a property of the input; symmetrize away the roundoff.
    let scale = max_abs(&h).max(1e-300);
    let mut herm_defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let avg = 0.5 * (h[[i, j]] + h[[j, i]].conj());
            herm_defect = herm_defect.max((h[[i, j]] - avg).norm());
            h[[i, j]] = avg;
            h[[j, i]] = avg.conj();
        }
    }
    if herm_defect > 1e-8 * scale {
        return Err(CoreError::NotSkewAdjoint {
            defect: herm_defect / scale,
        });
    }
    let (w, y_raw) = h.eigh(UPLO::Lower).map_err(CoreError::from_linalg)?;

    // Depending on the memory layout the LAPACK wrapper can hand back the
    // eigenvectors of the conjugated matrix; pick the conjugation whose
    // eigenpairs actually satisfy H y = w y.
    let pair_defect = |y: &Array2<C64>| -> f64 {
        let hy = h.dot(y);
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((hy[[i, j]] - y[[i, j]] * w[j]).norm());
            }
        }
        worst
    };
    let y_conj = y_raw.mapv(|x| x.conj());
    let (defect, y) = {
        let d_raw = pair_defect(&y_raw);
        let d_conj = pair_defect(&y_conj);
        if d_raw <= d_conj {
            (d_raw, y_raw)
        } else {
            (d_conj, y_conj)
        }
    };
    if defect > 1e-7 * scale.max(1.0) {
        return Err(CoreError::Backend(format!(
            "Hermitian eigenpairs inconsistent (defect {defect:.3e})"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| (-w[i]).partial_cmp(&(-w[j])).unwrap().then(i.cmp(&j)));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut basis = Array2::<C64>::zeros((n, n));
    let mut inverse = Array2::<C64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(C64::new(0.0, -w[src]));
        for i in 0..n {
            basis[[i, col]] = y[[i, src]] / b[i];
            inverse[[col, i]] = y[[i, src]].conj() * b[i];
        }
    }
    Ok(ModalBasis {
        eigenvalues,
        basis,
        inverse,
    })
}

/// General (non-normal) eigen-decomposition via LAPACK.
pub fn general_modes(a: &Array2<C64>) -> Result<ModalBasis, CoreError> {
    ensure_single_thread_blas();
    let n = a.nrows();
    let (vals, vecs) = a.eig().map_err(CoreError::from_linalg)?;

    // The wrapper's layout conventions have bitten once already (see
    // skew_modes); verify the pairing before trusting it.
    let scale = max_abs(a).max(1.0);
    let av = a.dot(&vecs);
    let mut pair_defect = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            pair_defect = pair_defect.max((av[[i, j]] - vecs[[i, j]] * vals[j]).norm());
        }
    }
    if pair_defect > 1e-6 * scale {
        return Err(CoreError::Backend(format!(
            "general eigenpairs inconsistent (defect {pair_defect:.3e})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (vals[i].im, vals[i].re, i)
            .partial_cmp(&(vals[j].im, vals[j].re, j))
            .unwrap()
    });
    let mut basis = Array2::<C64>::zeros((n, n));
    let mut eigenvalues = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(vals[src]);
        for i in 0..n {
            basis[[i, col]] = vecs[[i, src]];
        }
    }
    let inverse = basis.inv().map_err(CoreError::from_linalg)?;
    Ok(ModalBasis {
        eigenvalues,
        basis,
        inverse,
    })
}
