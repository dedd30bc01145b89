//! Kernel functions for configuration comparison.
//!
//! Two kernels are provided: a second-order rational-quadratic kernel on
//! (normalized) joint values, and a workspace kernel that averages the RQ
//! kernel over corresponding forward-kinematics control-point positions.
//! Training consumes kernels column-by-column through [`GramCache`], which
//! computes and memoizes Gram columns lazily.

use crate::kinematics::{Configuration, KinematicsError, RobotModel};
use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("matrix is not symmetric (max asymmetry {0})")]
    NotSymmetric(f64),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// RQ kernel on joint values min-max normalized to [0, 1] per joint.
    RqJointSpace,
    /// Mean of RQ kernels over control-point workspace positions.
    FkWorkspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, gamma: f64) -> Result<Self, KernelError> {
        if !(gamma > 0.0) {
            return Err(KernelError::NonPositiveGamma(gamma));
        }
        Ok(Self { kind, gamma })
    }

    /// Default widths: workspace gamma scales with reach, joint-space gamma
    /// with dimensionality.
    pub fn default_gamma(kind: KernelKind, robot: &RobotModel) -> f64 {
        match kind {
            KernelKind::FkWorkspace => {
                let r = robot.reach();
                10.0 / (r * r)
            }
            KernelKind::RqJointSpace => 10.0 / robot.dof() as f64,
        }
    }
}

/// `(1 + (gamma/2) ||x - x'||^2)^-2` on raw vectors.
pub fn rq_kernel(x: &[f64], x_prime: &[f64], gamma: f64) -> Result<f64, KernelError> {
    if x.len() != x_prime.len() {
        return Err(KernelError::DimensionMismatch(x.len(), x_prime.len()));
    }
    if !(gamma > 0.0) {
        return Err(KernelError::NonPositiveGamma(gamma));
    }
    let sq = x
        .iter()
        .zip(x_prime)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    Ok(rq_of_sq_dist(sq, gamma))
}

#[inline]
fn rq_of_sq_dist(sq_dist: f64, gamma: f64) -> f64 {
    let t = 1.0 + 0.5 * gamma * sq_dist;
    1.0 / (t * t)
}

/// Mean of RQ kernels over corresponding control-point positions.
pub fn fk_kernel(
    robot: &RobotModel,
    x: &Configuration,
    x_prime: &Configuration,
    gamma: f64,
) -> Result<f64, KernelError> {
    if !(gamma > 0.0) {
        return Err(KernelError::NonPositiveGamma(gamma));
    }
    let p = robot.control_point_positions(x)?;
    let p_prime = robot.control_point_positions(x_prime)?;
    Ok(fk_kernel_on_points(&p, &p_prime, gamma))
}

fn fk_kernel_on_points(p: &[Vector3<f64>], p_prime: &[Vector3<f64>], gamma: f64) -> f64 {
    let m = p.len();
    let sum: f64 = p
        .iter()
        .zip(p_prime)
        .map(|(a, b)| rq_of_sq_dist((a - b).norm_squared(), gamma))
        .sum();
    sum / m as f64
}

/// Per-sample representation a kernel evaluation actually consumes, computed
/// once per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Features {
    /// Joint values normalized to [0, 1] per joint.
    Normalized(Vec<f64>),
    /// Control-point world positions.
    ControlPoints(Vec<Vector3<f64>>),
}

/// A kernel bound to a robot, able to featurize configurations and evaluate
/// kernel values on features.
#[derive(Debug, Clone)]
pub struct BoundKernel<'a> {
    pub spec: KernelSpec,
    pub robot: &'a RobotModel,
}

impl<'a> BoundKernel<'a> {
    pub fn new(spec: KernelSpec, robot: &'a RobotModel) -> Self {
        Self { spec, robot }
    }

    pub fn features(&self, x: &Configuration) -> Result<Features, KernelError> {
        match self.spec.kind {
            KernelKind::RqJointSpace => {
                if x.dim() != self.robot.dof() {
                    return Err(KernelError::DimensionMismatch(x.dim(), self.robot.dof()));
                }
                Ok(Features::Normalized(normalize_joints(self.robot, x)))
            }
            KernelKind::FkWorkspace => Ok(Features::ControlPoints(
                self.robot.control_point_positions(x)?,
            )),
        }
    }

    pub fn eval_features(&self, a: &Features, b: &Features) -> f64 {
        match (a, b) {
            (Features::Normalized(u), Features::Normalized(v)) => {
                let sq = u
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>();
                rq_of_sq_dist(sq, self.spec.gamma)
            }
            (Features::ControlPoints(p), Features::ControlPoints(q)) => {
                fk_kernel_on_points(p, q, self.spec.gamma)
            }
            _ => unreachable!("mixed feature kinds for one kernel"),
        }
    }

    pub fn eval(&self, x: &Configuration, y: &Configuration) -> Result<f64, KernelError> {
        let fa = self.features(x)?;
        let fb = self.features(y)?;
        Ok(self.eval_features(&fa, &fb))
    }
}

pub fn normalize_joints(robot: &RobotModel, x: &Configuration) -> Vec<f64> {
    x.0.iter()
        .zip(&robot.joint_limits)
        .map(|(q, &(lo, hi))| (q - lo) / (hi - lo))
        .collect()
}

/// Lazily evaluated Gram matrix over a fixed sample set. Columns are computed
/// on first request and memoized; per-sample features are memoized across
/// columns so FK is run once per sample.
pub struct GramCache {
    n: usize,
    columns: Vec<Option<Vec<f64>>>,
    features: Vec<Option<Features>>,
    /// Number of feature computations performed, observable in tests.
    pub feature_evals: usize,
    /// Number of column computations performed.
    pub column_evals: usize,
}

impl GramCache {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            columns: vec![None; n],
            features: vec![None; n],
            feature_evals: 0,
            column_evals: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_computed(&self, index: usize) -> bool {
        self.columns[index].is_some()
    }

    fn ensure_features(
        &mut self,
        samples: &[Configuration],
        kernel: &BoundKernel,
    ) -> Result<(), KernelError> {
        for (i, slot) in self.features.iter_mut().enumerate() {
            if slot.is_none() {
                *slot = Some(kernel.features(&samples[i])?);
                self.feature_evals += 1;
            }
        }
        Ok(())
    }

    /// Column `index` of the Gram matrix: `K(X_index, X_j)` for all j.
    pub fn column(
        &mut self,
        samples: &[Configuration],
        index: usize,
        kernel: &BoundKernel,
    ) -> Result<&[f64], KernelError> {
        assert_eq!(samples.len(), self.n, "sample set changed under the cache");
        assert!(index < self.n, "column index out of range");
        if self.columns[index].is_none() {
            self.ensure_features(samples, kernel)?;
            let fi = self.features[index].as_ref().unwrap();
            let col: Vec<f64> = self
                .features
                .iter()
                .map(|fj| kernel.eval_features(fi, fj.as_ref().unwrap()))
                .collect();
            self.columns[index] = Some(col);
            self.column_evals += 1;
        }
        Ok(self.columns[index].as_ref().unwrap())
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(matrix: &DMatrix<f64>) -> Result<f64, KernelError> {
    symmetric_eigenvalues(matrix).map(|ev| ev.iter().copied().fold(f64::INFINITY, f64::min))
}

/// All eigenvalues of a symmetric matrix; input symmetry is checked to 1e-9.
pub fn symmetric_eigenvalues(matrix: &DMatrix<f64>) -> Result<Vec<f64>, KernelError> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(KernelError::DimensionMismatch(n, matrix.ncols()));
    }
    let asym = (matrix - matrix.transpose()).amax();
    if asym > 1e-9 {
        return Err(KernelError::NotSymmetric(asym));
    }
    let eig = matrix.clone().symmetric_eigen();
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Dense Gram matrix by direct double loop, the reference path for tests and
/// audits.
pub fn dense_gram(
    samples: &[Configuration],
    kernel: &BoundKernel,
) -> Result<DMatrix<f64>, KernelError> {
    let n = samples.len();
    let feats: Vec<Features> = samples
        .iter()
        .map(|x| kernel.features(x))
        .collect::<Result<_, _>>()?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = kernel.eval_features(&feats[i], &feats[j]);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::RobotModel;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rq_zero_distance_is_one() {
        let x = [0.3, -1.2, 4.0];
        assert_eq!(rq_kernel(&x, &x, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn rq_direct_substitution() {
        // gamma=2, ||x-x'||^2 = 1 -> (1+1)^-2
        assert_relative_eq!(rq_kernel(&[0.0], &[1.0], 2.0).unwrap(), 0.25);
        // gamma=1, ||x-x'||^2 = 2 -> (1+1)^-2
        assert_relative_eq!(rq_kernel(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap(), 0.25);
    }

    #[test]
    fn rq_rejects_bad_inputs() {
        assert!(rq_kernel(&[0.0], &[1.0, 2.0], 1.0).is_err());
        assert!(rq_kernel(&[0.0], &[1.0], 0.0).is_err());
        assert!(rq_kernel(&[0.0], &[1.0], -1.0).is_err());
    }

    #[test]
    fn fk_kernel_identity_and_single_point() {
        let robot = RobotModel::planar_2dof();
        let x = Configuration(vec![0.4, -0.9]);
        assert_relative_eq!(fk_kernel(&robot, &x, &x, 2.0).unwrap(), 1.0);

        // M = 1 degenerates to the RQ kernel on the single control point.
        let mut one_cp = robot.clone();
        one_cp.control_points.truncate(1);
        let y = Configuration(vec![-0.2, 1.1]);
        let px = one_cp.control_point_positions(&x).unwrap()[0];
        let py = one_cp.control_point_positions(&y).unwrap()[0];
        let expect = rq_kernel(px.as_slice(), py.as_slice(), 2.0).unwrap();
        assert_relative_eq!(fk_kernel(&one_cp, &x, &y, 2.0).unwrap(), expect, epsilon = 1e-15);
    }

    /// Independent oracle: control points via explicit 4x4 matrix products,
    /// then RQ averaging, sharing no code with the library path.
    fn fk_kernel_oracle(robot: &RobotModel, x: &Configuration, y: &Configuration, gamma: f64) -> f64 {
        let px = crate::kinematics::tests_support::control_points_oracle(robot, x);
        let py = crate::kinematics::tests_support::control_points_oracle(robot, y);
        let mut sum = 0.0;
        for (a, b) in px.iter().zip(&py) {
            let sq: f64 = (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).sum();
            let t = 1.0 + 0.5 * gamma * sq;
            sum += 1.0 / (t * t);
        }
        sum / px.len() as f64
    }

    #[test]
    fn fk_kernel_matches_independent_oracle() {
        let robot = RobotModel::planar_2dof();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let x = robot.sample_uniform(&mut rng);
            let y = robot.sample_uniform(&mut rng);
            let got = fk_kernel(&robot, &x, &y, 1.7).unwrap();
            let want = fk_kernel_oracle(&robot, &x, &y, 1.7);
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn gram_cache_contract() {
        let robot = RobotModel::planar_2dof();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<Configuration> = (0..8).map(|_| robot.sample_uniform(&mut rng)).collect();
        let kernel = BoundKernel::new(
            KernelSpec::new(KernelKind::FkWorkspace, 2.0).unwrap(),
            &robot,
        );
        let mut cache = GramCache::new(samples.len());

        let col3 = cache.column(&samples, 3, &kernel).unwrap().to_vec();
        assert_relative_eq!(col3[3], 1.0, epsilon = 1e-12);
        let feats_after_first = cache.feature_evals;
        assert_eq!(feats_after_first, samples.len());

        // Second request: same vector, no new feature evaluation.
        let col3_again = cache.column(&samples, 3, &kernel).unwrap().to_vec();
        assert_eq!(col3, col3_again);
        assert_eq!(cache.feature_evals, feats_after_first);
        assert_eq!(cache.column_evals, 1);

        // Assembled matrix equals the dense double-loop oracle.
        let dense = dense_gram(&samples, &kernel).unwrap();
        for i in 0..samples.len() {
            let col = cache.column(&samples, i, &kernel).unwrap().to_vec();
            for j in 0..samples.len() {
                assert_relative_eq!(col[j], dense[(j, i)], epsilon = 1e-15);
            }
        }

        // Symmetry across computed columns.
        for i in 0..samples.len() {
            for j in 0..samples.len() {
                let kij = cache.column(&samples, i, &kernel).unwrap()[j];
                let kji = cache.column(&samples, j, &kernel).unwrap()[i];
                assert!((kij - kji).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn min_eigenvalue_trivial_cases() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_relative_eq!(min_eigenvalue(&id).unwrap(), 1.0, epsilon = 1e-12);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 5.0, -1.0]));
        assert_relative_eq!(min_eigenvalue(&d).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn min_eigenvalue_rejects_asymmetric() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = 0.5;
        assert!(min_eigenvalue(&m).is_err());
    }

    #[test]
    fn min_eigenvalue_matches_characteristic_polynomial_oracle() {
        // Random symmetric 20x20; oracle: smallest root of det(A - t I) found
        // by bisection on the characteristic polynomial sign via LU
        // determinant, independent of the symmetric eigensolver.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20;
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rand::Rng::random_range(&mut rng, -1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let got = min_eigenvalue(&a).unwrap();
        let max_abs = symmetric_eigenvalues(&a)
            .unwrap()
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));

        // Gershgorin bound brackets all eigenvalues.
        let bound: f64 = (0..n)
            .map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let eigvals_below = |t: f64| {
            // Sylvester's law via LDL^T-style count: count sign agreements of
            // leading principal minors of (A - tI). Use a simple approach:
            // count negative eigenvalue estimates by Sturm sequence on the
            // tridiagonalized form is overkill; instead count roots by
            // scanning det sign changes.
            let shifted = &a - DMatrix::identity(n, n) * t;
            shifted.lu().determinant()
        };
        // Bisection for the lowest root: find t where det first changes sign
        // scanning up from below the spectrum.
        let mut lo = -bound - 1.0;
        let mut hi = got + 1e-3; // bracket hint is allowed to come from `got`
        assert!(eigvals_below(lo) > 0.0 || n % 2 == 1);
        // Refine: the smallest eigenvalue is where det(A - tI) = 0 first.
        let f_lo = eigvals_below(lo);
        let mut f_hi = eigvals_below(hi);
        // Walk hi down until sign differs from lo if needed.
        let mut guard = 0;
        while f_lo.signum() == f_hi.signum() && guard < 60 {
            hi -= 1e-3;
            f_hi = eigvals_below(hi);
            guard += 1;
        }
        assert_ne!(f_lo.signum(), f_hi.signum(), "failed to bracket lowest root");
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if eigvals_below(mid).signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert!(
            (got - oracle).abs() <= 1e-8 * max_abs.max(1.0),
            "eigensolver {got} vs bisection oracle {oracle}"
        );
    }

    #[test]
    fn pd_property_for_both_kernels() {
        // 50 unique configurations of the 3-DOF arm: both Gram matrices are
        // positive definite well away from singular.
        let robot = RobotModel::arm_3dof();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let samples: Vec<Configuration> = (0..50).map(|_| robot.sample_uniform(&mut rng)).collect();
        for kind in [KernelKind::FkWorkspace, KernelKind::RqJointSpace] {
            let gamma = KernelSpec::default_gamma(kind, &robot);
            let kernel = BoundKernel::new(KernelSpec::new(kind, gamma).unwrap(), &robot);
            let gram = dense_gram(&samples, &kernel).unwrap();
            let evs = symmetric_eigenvalues(&gram).unwrap();
            let min = evs.iter().copied().fold(f64::INFINITY, f64::min);
            let max = evs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(min > 1e-10 * max, "{kind:?}: min {min} vs max {max}");
        }
    }

    #[test]
    fn fk_gram_is_mean_of_summand_grams() {
        let robot = RobotModel::planar_2dof();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let samples: Vec<Configuration> = (0..12).map(|_| robot.sample_uniform(&mut rng)).collect();
        let gamma = 2.0;
        let kernel = BoundKernel::new(
            KernelSpec::new(KernelKind::FkWorkspace, gamma).unwrap(),
            &robot,
        );
        let gram = dense_gram(&samples, &kernel).unwrap();

        let m = robot.control_points.len();
        let pts: Vec<Vec<Vector3<f64>>> = samples
            .iter()
            .map(|q| robot.control_point_positions(q).unwrap())
            .collect();
        let mut mean = DMatrix::zeros(samples.len(), samples.len());
        for cp in 0..m {
            for i in 0..samples.len() {
                for j in 0..samples.len() {
                    mean[(i, j)] += rq_kernel(
                        pts[i][cp].as_slice(),
                        pts[j][cp].as_slice(),
                        gamma,
                    )
                    .unwrap() / m as f64;
                }
            }
        }
        assert!((gram - mean).amax() <= 1e-12);
    }

    #[test]
    fn isotropy_contrast_between_kernels() {
        // Base configuration b, and p/g equidistant in joint space but with p
        // much closer in the workspace: straight arm vs elbow-only bend of
        // the same joint-space magnitude applied at the shoulder.
        let robot = RobotModel::planar_2dof();
        let delta = 1.2;
        let b = Configuration(vec![0.0, 0.0]);
        let p = Configuration(vec![0.0, delta]); // elbow bend, distal motion only
        let g = Configuration(vec![delta, 0.0]); // shoulder sweep, whole arm moves
        assert_relative_eq!(b.distance(&p), b.distance(&g), epsilon = 1e-15);

        let gamma_rq = KernelSpec::default_gamma(KernelKind::RqJointSpace, &robot);
        let ub = normalize_joints(&robot, &b);
        let up = normalize_joints(&robot, &p);
        let ug = normalize_joints(&robot, &g);
        let k_bp = rq_kernel(&ub, &up, gamma_rq).unwrap();
        let k_bg = rq_kernel(&ub, &ug, gamma_rq).unwrap();
        assert_relative_eq!(k_bp, k_bg, epsilon = 1e-12);

        let gamma_fk = KernelSpec::default_gamma(KernelKind::FkWorkspace, &robot);
        let f_bp = fk_kernel(&robot, &b, &p, gamma_fk).unwrap();
        let f_bg = fk_kernel(&robot, &b, &g, gamma_fk).unwrap();
        assert!(f_bp > f_bg, "fk(b,p)={f_bp} should exceed fk(b,g)={f_bg}");
    }

    proptest! {
        #[test]
        fn kernels_symmetric_and_bounded(
            q1 in proptest::collection::vec(-3.0f64..3.0, 2),
            q2 in proptest::collection::vec(-3.0f64..3.0, 2),
            gamma in 0.1f64..20.0,
        ) {
            let robot = RobotModel::planar_2dof();
            let a = Configuration(q1);
            let b = Configuration(q2);
            let rq_ab = rq_kernel(a.as_slice(), b.as_slice(), gamma).unwrap();
            let rq_ba = rq_kernel(b.as_slice(), a.as_slice(), gamma).unwrap();
            prop_assert_eq!(rq_ab, rq_ba);
            prop_assert!(rq_ab > 0.0 && rq_ab <= 1.0);

            let fk_ab = fk_kernel(&robot, &a, &b, gamma).unwrap();
            let fk_ba = fk_kernel(&robot, &b, &a, gamma).unwrap();
            prop_assert_eq!(fk_ab, fk_ba);
            prop_assert!(fk_ab > 0.0 && fk_ab <= 1.0);
        }
    }
}
