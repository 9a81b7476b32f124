//! Closed-loop generator split into a conservative part and a dissipative
//! perturbation, together with the observation rows and the energy metric.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use super::linalg::{max_abs, metric_inner, metric_norm};
use super::CoreError;

/// Finite realization of a damped generator `A_d = A_c + A_r`.
///
/// * `skew` is the conservative part, skew-adjoint with respect to the
///   diagonal `metric`;
/// * `dissipative` is the damping perturbation, whose metric-symmetric part
///   must reproduce `-||D* z||^2`;
/// * `obs` holds the rows of the observation map `D*` in the same basis.
#[derive(Debug, Clone)]
pub struct GeneratorPair {
    dim: usize,
    skew: Array2<C64>,
    dissipative: Array2<C64>,
    obs: Array2<C64>,
    metric: Vec<f64>,
}

pub const DEFAULT_SKEW_TOL: f64 = 1e-10;

/// Validate and wrap the pieces of a damped generator.
///
/// `obs` may be empty (no observation channel). Rejects non-square or
/// inconsistent shapes, non-positive metric entries, a conservative part that
/// fails skew-adjointness beyond `1e-10` relative, and a dissipative part
/// whose symmetric part does not match `-(D*)^H D*`.
pub fn assemble_generator(
    skew: Array2<C64>,
    dissipative: Array2<C64>,
    obs: Vec<Array1<C64>>,
    metric: Vec<f64>,
) -> Result<GeneratorPair, CoreError> {
    assemble_generator_with_tol(skew, dissipative, obs, metric, DEFAULT_SKEW_TOL)
}

/// Same as [`assemble_generator`] with an explicit relative tolerance, for
/// grid-level realizations where the defect sits at discretization scale.
pub fn assemble_generator_with_tol(
    skew: Array2<C64>,
    dissipative: Array2<C64>,
    obs: Vec<Array1<C64>>,
    metric: Vec<f64>,
    tol: f64,
) -> Result<GeneratorPair, CoreError> {
    let dim = skew.nrows();
    if skew.ncols() != dim {
        return Err(CoreError::DimensionMismatch(format!(
            "skew is {}x{}",
            skew.nrows(),
            skew.ncols()
        )));
    }
    if dissipative.nrows() != dim || dissipative.ncols() != dim {
        return Err(CoreError::DimensionMismatch(format!(
            "dissipative is {}x{}, state dimension is {dim}",
            dissipative.nrows(),
            dissipative.ncols()
        )));
    }
    if metric.len() != dim {
        return Err(CoreError::DimensionMismatch(format!(
            "metric has {} entries, state dimension is {dim}",
            metric.len()
        )));
    }
    for (index, &value) in metric.iter().enumerate() {
        if !(value > 0.0) || !value.is_finite() {
            return Err(CoreError::NonPositiveMetric { index, value });
        }
    }
    let mut obs_mat = Array2::<C64>::zeros((obs.len(), dim));
    for (r, row) in obs.iter().enumerate() {
        if row.len() != dim {
            return Err(CoreError::DimensionMismatch(format!(
                "observation row {r} has length {}, state dimension is {dim}",
                row.len()
            )));
        }
        for c in 0..dim {
            obs_mat[[r, c]] = row[c];
        }
    }

    // M A + A^H M = 0 up to `tol` relative.
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let entry = metric[i] * skew[[i, j]] + skew[[j, i]].conj() * metric[j];
            defect = defect.max(entry.norm());
            scale = scale.max((metric[i] * skew[[i, j]]).norm());
        }
    }
    if defect > tol * scale.max(1.0) {
        return Err(CoreError::NotSkewAdjoint {
            defect: defect / scale.max(1.0),
        });
    }

    // Symmetric part of M A_r must equal -(D*)^H D*, so that
    // Re <A_r z, z> = -||D* z||^2 for every state z.
    let gram = {
        let mut g = Array2::<C64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..obs_mat.nrows() {
                    acc += obs_mat[[r, i]].conj() * obs_mat[[r, j]];
                }
                g[[i, j]] = acc;
            }
        }
        g
    };
    let mut dis_defect = 0.0f64;
    let mut dis_scale = max_abs(&gram).max(1.0);
    for i in 0..dim {
        for j in 0..dim {
            let sym = 0.5 * (metric[i] * dissipative[[i, j]] + dissipative[[j, i]].conj() * metric[j]);
            dis_defect = dis_defect.max((sym + gram[[i, j]]).norm());
            dis_scale = dis_scale.max((metric[i] * dissipative[[i, j]]).norm());
        }
    }
    if dis_defect > tol.max(1e-12) * dis_scale {
        return Err(CoreError::NotDissipative {
            defect: dis_defect / dis_scale,
        });
    }

    Ok(GeneratorPair {
        dim,
        skew,
        dissipative,
        obs: obs_mat,
        metric,
    })
}

impl GeneratorPair {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn skew(&self) -> &Array2<C64> {
        &self.skew
    }

    pub fn dissipative(&self) -> &Array2<C64> {
        &self.dissipative
    }

    /// Observation matrix `D*` (one row per channel).
    pub fn obs(&self) -> &Array2<C64> {
        &self.obs
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    /// Damped generator `A_c + A_r`.
    pub fn damped(&self) -> Array2<C64> {
        &self.skew + &self.dissipative
    }

    pub fn inner(&self, z: &Array1<C64>, w: &Array1<C64>) -> C64 {
        metric_inner(&self.metric, z, w)
    }

    pub fn norm(&self, z: &Array1<C64>) -> f64 {
        metric_norm(&self.metric, z)
    }

    /// Energy `E = 1/2 ||z||^2` in the metric norm.
    pub fn energy(&self, z: &Array1<C64>) -> f64 {
        let n = self.norm(z);
        0.5 * n * n
    }

    /// `D* z`, one complex value per observation row.
    pub fn observe(&self, z: &Array1<C64>) -> Array1<C64> {
        self.obs.dot(z)
    }

    /// Instantaneous dissipation `||D* z||^2`.
    pub fn dissipation_rate(&self, z: &Array1<C64>) -> f64 {
        self.observe(z).iter().map(|x| x.norm_sqr()).sum()
    }

    /// `||D|| ||D*|| = ||D D*||`, the metric operator norm of the damping.
    /// Equals the largest eigenvalue of `M^{-1} (D*)^H D*`.
    pub fn damping_norm(&self) -> f64 {
        // sigma_max(S B^{-1})^2 where B = sqrt(metric); the Gram matrix of the
        // scaled rows is only m x m.
        let m = self.obs.nrows();
        if m == 0 {
            return 0.0;
        }
        let mut gram = Array2::<C64>::zeros((m, m));
        for r in 0..m {
            for s in 0..m {
                let mut acc = C64::new(0.0, 0.0);
                for j in 0..self.dim {
                    acc += self.obs[[r, j]] * self.obs[[s, j]].conj() / self.metric[j];
                }
                gram[[r, s]] = acc;
            }
        }
        // Power iteration on the small Hermitian Gram matrix is plenty here.
        super::linalg::spectral_radius_estimate(&gram, 200)
    }

    /// Graph norm squared `||z||^2 + ||A_d z||^2` of the damped generator.
    pub fn graph_norm_sq(&self, z: &Array1<C64>) -> f64 {
        let az = self.damped().dot(z);
        let nz = self.norm(z);
        let naz = self.norm(&az);
        nz * nz + naz * naz
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_skew_generator_is_valid() {
        let gen = assemble_generator(
            array![[c(0.0, 1.0)]],
            array![[c(0.0, 0.0)]],
            vec![],
            vec![1.0],
        )
        .unwrap();
        assert_eq!(gen.dim(), 1);
        assert_eq!(gen.obs().nrows(), 0);
    }

    #[test]
    fn rotation_generator_is_valid() {
        let gen = assemble_generator(
            array![[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]],
            Array2::zeros((2, 2)),
            vec![],
            vec![1.0, 1.0],
        );
        assert!(gen.is_ok());
    }

    #[test]
    fn upper_triangular_fails_skew_check() {
        let res = assemble_generator(
            array![[c(0.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
            Array2::zeros((2, 2)),
            vec![],
            vec![1.0, 1.0],
        );
        assert!(matches!(res, Err(CoreError::NotSkewAdjoint { .. })));
    }

    #[test]
    fn dissipative_part_must_match_observation_rows() {
        // damping present but no observation row to account for it
        let res = assemble_generator(
            array![[c(0.0, 1.0)]],
            array![[c(-1.0, 0.0)]],
            vec![],
            vec![1.0],
        );
        assert!(matches!(res, Err(CoreError::NotDissipative { .. })));

        // a positive (energy-creating) "dissipative" part is rejected too
        let res = assemble_generator(
            array![[c(0.0, 1.0)]],
            array![[c(1.0, 0.0)]],
            vec![array![c(1.0, 0.0)]],
            vec![1.0],
        );
        assert!(matches!(res, Err(CoreError::NotDissipative { .. })));
    }

    #[test]
    fn dimension_and_metric_validation() {
        let res = assemble_generator(
            Array2::zeros((2, 3)),
            Array2::zeros((2, 2)),
            vec![],
            vec![1.0, 1.0],
        );
        assert!(matches!(res, Err(CoreError::DimensionMismatch(_))));
        let res = assemble_generator(
            Array2::zeros((1, 1)),
            Array2::zeros((1, 1)),
            vec![],
            vec![-1.0],
        );
        assert!(matches!(res, Err(CoreError::NonPositiveMetric { .. })));
    }

    #[test]
    fn damping_norm_matches_rank_one_case() {
        // S = sqrt(beta) * e_1 row: ||D||^2 = beta
        let beta = 0.7;
        let gen = assemble_generator(
            array![[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]],
            array![[c(-beta, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
            vec![array![c(beta.sqrt(), 0.0), c(0.0, 0.0)]],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!((gen.damping_norm() - beta).abs() < 1e-10);
    }
}
