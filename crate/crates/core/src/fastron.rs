//! Kernel-perceptron proxy collision model: greedy coordinate descent
//! training, querying, and the two-stage active-learning resampler for
//! moving obstacles.

use crate::kernels::{BoundKernel, Features, GramCache, KernelError, KernelSpec};
use crate::kinematics::{Configuration, RobotModel};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

/// Label for an in-collision configuration.
pub const C_OBS: f64 = 1.0;
/// Label for a collision-free configuration.
pub const C_FREE: f64 = -1.0;

#[derive(Debug, Error)]
pub enum FastronError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset sizes differ: {0} configurations, {1} labels")]
    SizeMismatch(usize, usize),
    #[error("label at index {0} is {1}, expected +1 or -1")]
    BadLabel(usize, f64),
    #[error("duplicate configuration at indices {0} and {1}")]
    DuplicateSample(usize, usize),
    #[error("model is not trained")]
    NotTrained,
    #[error("model was trained for robot '{expected}', got '{got}'")]
    RobotMismatch { expected: String, got: String },
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("model file i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file parse: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Training set: configurations with collision labels (+1 in-collision).
#[derive(Debug, Clone)]
pub struct Dataset {
    configs: Vec<Configuration>,
    labels: Vec<f64>,
}

fn config_key(q: &Configuration) -> Vec<u64> {
    q.0.iter().map(|v| v.to_bits()).collect()
}

impl Dataset {
    /// Validates labels and rejects exact-duplicate configurations, which
    /// would make the Gram matrix singular.
    pub fn new(configs: Vec<Configuration>, labels: Vec<f64>) -> Result<Self, FastronError> {
        if configs.is_empty() {
            return Err(FastronError::EmptyDataset);
        }
        if configs.len() != labels.len() {
            return Err(FastronError::SizeMismatch(configs.len(), labels.len()));
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != C_OBS && y != C_FREE {
                return Err(FastronError::BadLabel(i, y));
            }
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(configs.len());
        for (i, q) in configs.iter().enumerate() {
            if let Some(&first) = seen.get(&config_key(q)) {
                return Err(FastronError::DuplicateSample(first, i));
            }
            seen.insert(config_key(q), i);
        }
        Ok(Self { configs, labels })
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainParams {
    /// Conditional bias toward predicting in-collision; must be >= 1.
    pub beta: f64,
    pub iter_max: usize,
    pub s_max: usize,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self { beta: 1.0, iter_max: 5000, s_max: 3000 }
    }
}

/// One step of the training loop, recorded for audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainEvent {
    /// Type-(a): weight adjustment on the most-misclassified sample.
    Adjust { index: usize, delta: f64 },
    /// Type-(b): removal of a redundant support point.
    Remove { index: usize },
}

/// Trained proxy model: support configurations with weights. Immutable after
/// training; shareable across threads for concurrent queries.
#[derive(Debug, Clone)]
pub struct FastronModel {
    robot: Arc<RobotModel>,
    spec: KernelSpec,
    support: Vec<Configuration>,
    alpha: Vec<f64>,
    labels: Vec<f64>,
    support_features: Vec<Features>,
    trained: bool,
}

impl FastronModel {
    pub fn untrained(robot: Arc<RobotModel>, spec: KernelSpec) -> Self {
        Self {
            robot,
            spec,
            support: Vec::new(),
            alpha: Vec::new(),
            labels: Vec::new(),
            support_features: Vec::new(),
            trained: false,
        }
    }

    pub fn robot(&self) -> &Arc<RobotModel> {
        &self.robot
    }

    pub fn spec(&self) -> KernelSpec {
        self.spec
    }

    pub fn support(&self) -> &[Configuration] {
        &self.support
    }

    pub fn support_count(&self) -> usize {
        self.support.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn support_labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    fn score_features(&self, fx: &Features) -> f64 {
        let kernel = BoundKernel::new(self.spec, &self.robot);
        self.support_features
            .iter()
            .zip(&self.alpha)
            .map(|(fs, &a)| kernel.eval_features(fs, fx) * a)
            .sum()
    }

    /// Predicted label and raw score. Zero score classifies as free.
    pub fn query(&self, x: &Configuration) -> Result<(f64, f64), FastronError> {
        if !self.trained {
            return Err(FastronError::NotTrained);
        }
        let kernel = BoundKernel::new(self.spec, &self.robot);
        let fx = kernel.features(x)?;
        let score = self.score_features(&fx);
        let label = if score > 0.0 { C_OBS } else { C_FREE };
        Ok((label, score))
    }

    /// `y_true * f(x)`.
    pub fn margin(&self, x: &Configuration, y_true: f64) -> Result<f64, FastronError> {
        let (_, score) = self.query(x)?;
        Ok(y_true * score)
    }
}

/// Outcome of one training run.
#[derive(Debug)]
pub struct TrainReport {
    pub model: FastronModel,
    /// True when the loop exited with every training margin positive.
    pub converged: bool,
    pub iterations: usize,
    pub events: Vec<TrainEvent>,
}

fn bias_target(beta: f64, y: f64) -> f64 {
    // b_i = beta^((y+1)/2): beta for in-collision points, 1 for free.
    if y > 0.0 {
        beta
    } else {
        1.0
    }
}

/// Greedy coordinate descent model update. With `prior`, weights of prior
/// support points found in the dataset (by exact equality) are carried over
/// as the warm start.
pub fn train(
    dataset: &Dataset,
    params: &TrainParams,
    spec: KernelSpec,
    robot: &Arc<RobotModel>,
    prior: Option<&FastronModel>,
) -> Result<TrainReport, FastronError> {
    let n = dataset.len();
    let configs = dataset.configs();
    let y = dataset.labels();
    let kernel = BoundKernel::new(spec, robot);
    let mut gram = GramCache::new(n);
    let mut alpha = vec![0.0f64; n];
    let mut f = vec![0.0f64; n];

    if let Some(prev) = prior {
        let index_of: HashMap<Vec<u64>, usize> = configs
            .iter()
            .enumerate()
            .map(|(i, q)| (config_key(q), i))
            .collect();
        for (sq, &sa) in prev.support.iter().zip(&prev.alpha) {
            if let Some(&i) = index_of.get(&config_key(sq)) {
                if sa != 0.0 {
                    let col = gram.column(configs, i, &kernel)?;
                    for (fj, &kij) in f.iter_mut().zip(col) {
                        *fj += sa * kij;
                    }
                    alpha[i] = sa;
                }
            }
        }
    }

    let mut events = Vec::new();
    let mut iterations = 0;
    let mut support_count = alpha.iter().filter(|&&a| a != 0.0).count();

    for _ in 0..params.iter_max {
        iterations += 1;

        // Most negative margin, lowest index on ties.
        let (worst, worst_margin) = {
            let mut idx = 0;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let m = y[i] * f[i];
                if m < best {
                    best = m;
                    idx = i;
                }
            }
            (idx, best)
        };

        let mut stepped = false;
        if worst_margin <= 0.0 {
            let i = worst;
            if support_count < params.s_max || alpha[i] != 0.0 {
                let col = gram.column(configs, i, &kernel)?;
                let delta = bias_target(params.beta, y[i]) * y[i] - f[i];
                if alpha[i] == 0.0 {
                    support_count += 1;
                }
                alpha[i] += delta;
                if alpha[i] == 0.0 {
                    support_count -= 1;
                }
                for (fj, &kij) in f.iter_mut().zip(col) {
                    *fj += delta * kij;
                }
                events.push(TrainEvent::Adjust { index: i, delta });
                stepped = true;
            }
        }
        if stepped {
            continue;
        }

        // Redundant support point removal: largest margin after removal,
        // lowest index on ties.
        let mut removal: Option<(usize, f64)> = None;
        for i in 0..n {
            if alpha[i] != 0.0 {
                let m = y[i] * (f[i] - alpha[i]);
                if removal.map_or(true, |(_, best)| m > best) {
                    removal = Some((i, m));
                }
            }
        }
        if let Some((i, m)) = removal {
            if m > 0.0 {
                let a_i = alpha[i];
                let col = gram.column(configs, i, &kernel)?;
                for (fj, &kij) in f.iter_mut().zip(col) {
                    *fj -= a_i * kij;
                }
                alpha[i] = 0.0;
                support_count -= 1;
                events.push(TrainEvent::Remove { index: i });
                continue;
            }
        }

        break;
    }

    let converged = (0..n).all(|i| y[i] * f[i] > 0.0);

    // removeNonsupportPoints: keep only the support set.
    let mut support = Vec::with_capacity(support_count);
    let mut sup_alpha = Vec::with_capacity(support_count);
    let mut sup_labels = Vec::with_capacity(support_count);
    let mut sup_features = Vec::with_capacity(support_count);
    for i in 0..n {
        if alpha[i] != 0.0 {
            support.push(configs[i].clone());
            sup_alpha.push(alpha[i]);
            sup_labels.push(y[i]);
            sup_features.push(kernel.features(&configs[i])?);
        }
    }

    Ok(TrainReport {
        model: FastronModel {
            robot: Arc::clone(robot),
            spec,
            support,
            alpha: sup_alpha,
            labels: sup_labels,
            support_features: sup_features,
            trained: true,
        },
        converged,
        iterations,
        events,
    })
}

/// Sample counts for the two active-learning stages.
#[derive(Debug, Clone, Copy)]
pub struct ResampleCounts {
    /// Perturbation samples around uniformly chosen support points.
    pub near: usize,
    /// Uniform exploration samples over the joint limits.
    pub uniform: usize,
}

impl ResampleCounts {
    /// Defaults: two near samples per support point, uniform samples filling
    /// the dataset back up to `target_size`.
    pub fn default_for(support_count: usize, target_size: usize) -> Self {
        Self {
            near: 2 * support_count,
            uniform: target_size.saturating_sub(3 * support_count),
        }
    }
}

/// Per-joint Gaussian scale for stage-1 perturbations: 5% of each joint range
/// unless overridden.
pub fn default_sigma(robot: &RobotModel) -> Vec<f64> {
    robot
        .joint_limits
        .iter()
        .map(|&(lo, hi)| 0.05 * (hi - lo))
        .collect()
}

/// Two-stage resampler: perturbations near support points, then uniform
/// exploration. Relabels the support set plus the new samples with the
/// oracle; prior non-support samples are discarded.
pub fn active_learning_step<O, R>(
    model: &FastronModel,
    oracle: &O,
    counts: ResampleCounts,
    sigma: &[f64],
    rng: &mut R,
) -> Result<Dataset, FastronError>
where
    O: Fn(&Configuration) -> f64,
    R: Rng + ?Sized,
{
    if !model.trained {
        return Err(FastronError::NotTrained);
    }
    let robot = &model.robot;
    let mut configs: Vec<Configuration> = model.support.clone();
    let mut seen: HashMap<Vec<u64>, ()> =
        configs.iter().map(|q| (config_key(q), ())).collect();

    let normals: Vec<Normal<f64>> = sigma
        .iter()
        .map(|&s| Normal::new(0.0, s.max(f64::MIN_POSITIVE)).expect("finite sigma"))
        .collect();

    if !model.support.is_empty() {
        for _ in 0..counts.near {
            let center = &model.support[rng.random_range(0..model.support.len())];
            let mut q = Configuration(
                center
                    .0
                    .iter()
                    .zip(&normals)
                    .map(|(c, n)| c + n.sample(rng))
                    .collect(),
            );
            robot.clamp_to_limits(&mut q);
            if seen.insert(config_key(&q), ()).is_none() {
                configs.push(q);
            }
        }
    }
    for _ in 0..counts.uniform {
        let q = robot.sample_uniform(rng);
        if seen.insert(config_key(&q), ()).is_none() {
            configs.push(q);
        }
    }

    let labels: Vec<f64> = configs.iter().map(|q| oracle(q)).collect();
    Dataset::new(configs, labels)
}

/// One moving-obstacle cycle: resample with the (already updated) oracle and
/// retrain with a warm start from the current model.
pub fn update_cycle<O, R>(
    model: &FastronModel,
    oracle: &O,
    params: &TrainParams,
    counts: ResampleCounts,
    sigma: &[f64],
    rng: &mut R,
) -> Result<TrainReport, FastronError>
where
    O: Fn(&Configuration) -> f64,
    R: Rng + ?Sized,
{
    let dataset = active_learning_step(model, oracle, counts, sigma, rng)?;
    train(&dataset, params, model.spec, &model.robot, Some(model))
}

// ---------------------------------------------------------------------------
// Model serialization
// ---------------------------------------------------------------------------

const MODEL_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    robot: String,
    spec: KernelSpec,
    support: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    labels: Vec<f64>,
}

impl FastronModel {
    pub fn save(&self, path: &Path) -> Result<(), FastronError> {
        if !self.trained {
            return Err(FastronError::NotTrained);
        }
        let file = ModelFile {
            version: MODEL_FILE_VERSION,
            robot: self.robot.name.clone(),
            spec: self.spec,
            support: self.support.iter().map(|q| q.0.clone()).collect(),
            alpha: self.alpha.clone(),
            labels: self.labels.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn load(path: &Path, robot: Arc<RobotModel>) -> Result<FastronModel, FastronError> {
        let file: ModelFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if file.version != MODEL_FILE_VERSION {
            return Err(FastronError::UnsupportedVersion(file.version));
        }
        if file.robot != robot.name {
            return Err(FastronError::RobotMismatch { expected: file.robot, got: robot.name.clone() });
        }
        let kernel = BoundKernel::new(file.spec, &robot);
        let support: Vec<Configuration> = file.support.into_iter().map(Configuration).collect();
        let support_features = support
            .iter()
            .map(|q| kernel.features(q))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FastronModel {
            robot,
            spec: file.spec,
            support,
            alpha: file.alpha,
            labels: file.labels,
            support_features,
            trained: true,
        })
    }
}
