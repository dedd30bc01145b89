//! Experiment harness: scenario configs, correctness metrics, benchmark
//! runners, CSV/table output, and C-space image export.
//!
//! Output hygiene: everything derived purely from (config, seed) goes into
//! the plain CSV files (`metrics.csv`, `sweep.csv`, `planning.csv`), which
//! are byte-reproducible across runs. Wall-clock measurements are written
//! to companion `*_timing.csv` files and are reported, never asserted.

mod csv;
mod image;
mod runners;

pub use csv::{
    render_collision_table, render_planning_table, render_sweep_table, write_collision_csvs,
    write_planning_csvs, write_sweep_csvs,
};
pub use image::{export_cspace_image, parse_ppm, ImageStats};
pub use runners::{
    run_collision_benchmark, run_obstacle_sweep, run_planning_benchmark, CollisionBenchReport,
    MetricsRow, PlanningReport, PlanningRow, SweepReport, SweepRow,
};

use crate::fastron::{TrainParams, C_FREE, C_OBS};
use crate::planners::PlannerParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("prediction and truth vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("config file {0}: {1}")]
    ConfigRead(PathBuf, std::io::Error),
    #[error("config file {0}: {1}")]
    ConfigParse(PathBuf, toml::de::Error),
    #[error("config: {0}")]
    InvalidConfig(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Kinematics(#[from] crate::kinematics::KinematicsError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Fastron(#[from] crate::fastron::FastronError),
    #[error(transparent)]
    Planner(#[from] crate::planners::PlannerError),
    #[error("image: {0}")]
    Image(String),
}

/// Which collision checker a row or column refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckerKind {
    FastronFk,
    FastronRq,
    OracleGjk,
}

impl std::fmt::Display for CheckerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CheckerKind::FastronFk => "fastron_fk",
            CheckerKind::FastronRq => "fastron_rq",
            CheckerKind::OracleGjk => "oracle_gjk",
        };
        f.write_str(s)
    }
}

/// Classification quality of one checker on one labeled test set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    /// (TP+TN)/total; `None` when the test set is empty.
    pub accuracy: Option<f64>,
    /// TP/(TP+FN); `None` when there are no true positives to find.
    pub tpr: Option<f64>,
    /// TN/(TN+FP); `None` when there are no true negatives to find.
    pub tnr: Option<f64>,
}

/// Tally predicted vs true labels (+1 in-collision, -1 free). Ratios with a
/// zero denominator come back as `None` rather than 0.
pub fn compute_metrics(predictions: &[f64], truths: &[f64]) -> Result<MetricsReport, BenchError> {
    if predictions.len() != truths.len() {
        return Err(BenchError::LengthMismatch(predictions.len(), truths.len()));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &t) in predictions.iter().zip(truths) {
        match (p == C_OBS, t == C_OBS) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    Ok(MetricsReport {
        tp,
        fp,
        tn,
        fn_,
        accuracy: ratio(tp + tn, tp + fp + tn + fn_),
        tpr: ratio(tp, tp + fn_),
        tnr: ratio(tn, tn + fp),
    })
}

/// Mean and (population) standard deviation of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
}

impl Stats {
    pub fn from_samples(xs: &[f64]) -> Option<Stats> {
        if xs.is_empty() {
            return None;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        Some(Stats { mean, std: var.sqrt() })
    }
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Pearson correlation coefficient; `None` when either side is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

fn default_test_set_size() -> usize {
    2000
}
fn default_trials() -> usize {
    1
}
fn default_moves() -> usize {
    0
}
fn default_dataset_size() -> usize {
    500
}
fn default_query_reps() -> usize {
    10_000
}
fn default_checkers() -> Vec<CheckerKind> {
    vec![CheckerKind::FastronFk, CheckerKind::FastronRq, CheckerKind::OracleGjk]
}

/// Planner settings as written in a scenario file; scale-dependent fields
/// fall back to robot-derived defaults when omitted.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    pub step_size: Option<f64>,
    pub goal_bias: Option<f64>,
    pub max_iters: Option<usize>,
    pub edge_resolution: Option<f64>,
    pub rewire_radius: Option<f64>,
}

impl PlannerConfig {
    pub fn resolve(&self, robot: &crate::kinematics::RobotModel, seed: u64) -> PlannerParams {
        let mut p = PlannerParams::default_for(robot, seed);
        if let Some(v) = self.step_size {
            p.step_size = v;
        }
        if let Some(v) = self.goal_bias {
            p.goal_bias = v;
        }
        if let Some(v) = self.max_iters {
            p.max_iters = v;
        }
        if let Some(v) = self.edge_resolution {
            p.edge_resolution = v;
        }
        if let Some(v) = self.rewire_radius {
            p.rewire_radius = v;
        }
        p
    }
}

/// One experiment description, loaded from a TOML file. Relative paths are
/// resolved against the config file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub robot: PathBuf,
    pub scene: PathBuf,
    #[serde(default = "default_checkers")]
    pub checkers: Vec<CheckerKind>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_moves")]
    pub moves_per_trial: usize,
    #[serde(default = "default_dataset_size")]
    pub dataset_size: usize,
    #[serde(default = "default_test_set_size")]
    pub test_set_size: usize,
    /// Query-timing repetitions (with warmup) per measurement.
    #[serde(default = "default_query_reps")]
    pub query_reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    /// Obstacle counts for the sweep benchmark; ascending, max 50.
    #[serde(default)]
    pub obstacle_counts: Vec<usize>,
    /// Start/goal for planning benchmarks.
    pub start: Option<Vec<f64>>,
    pub goal: Option<Vec<f64>>,
    /// Grid resolution per joint for image export.
    pub grid_resolution: Option<Vec<usize>>,
}

/// TrainParams as written in a scenario file.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub beta: f64,
    pub iter_max: usize,
    pub s_max: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let p = TrainParams::default();
        Self { beta: p.beta, iter_max: p.iter_max, s_max: p.s_max }
    }
}

impl From<TrainConfig> for TrainParams {
    fn from(c: TrainConfig) -> Self {
        TrainParams { beta: c.beta, iter_max: c.iter_max, s_max: c.s_max }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<ScenarioConfig, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::ConfigRead(path.to_path_buf(), e))?;
        let mut config: ScenarioConfig =
            toml::from_str(&text).map_err(|e| BenchError::ConfigParse(path.to_path_buf(), e))?;
        if let Some(dir) = path.parent() {
            if config.robot.is_relative() {
                config.robot = dir.join(&config.robot);
            }
            if config.scene.is_relative() {
                config.scene = dir.join(&config.scene);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.trials < 1 {
            return Err(BenchError::InvalidConfig("trials must be >= 1".into()));
        }
        if !self.robot.exists() {
            return Err(BenchError::InvalidConfig(format!(
                "robot file not found: {}",
                self.robot.display()
            )));
        }
        if !self.scene.exists() {
            return Err(BenchError::InvalidConfig(format!(
                "scene file not found: {}",
                self.scene.display()
            )));
        }
        if self.checkers.is_empty() {
            return Err(BenchError::InvalidConfig("checkers must be non-empty".into()));
        }
        if !self.obstacle_counts.is_empty() {
            if self.obstacle_counts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(BenchError::InvalidConfig(
                    "obstacle_counts must be strictly ascending".into(),
                ));
            }
            if *self.obstacle_counts.last().unwrap() > 50 {
                return Err(BenchError::InvalidConfig("obstacle_counts max is 50".into()));
            }
        }
        Ok(())
    }
}

/// Formats an optional ratio for CSV output; absent values print as
/// `undef`, never 0.
pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "undef".into(),
    }
}

/// Turns a ±1 prediction vector into labels usable by compute_metrics.
pub(crate) fn label_of_score(score: f64) -> f64 {
    if score > 0.0 {
        C_OBS
    } else {
        C_FREE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn metrics_all_correct() {
        let t = vec![C_OBS, C_FREE, C_OBS];
        let m = compute_metrics(&t, &t).unwrap();
        assert_eq!(m.accuracy, Some(1.0));
        assert_eq!(m.tpr, Some(1.0));
        assert_eq!(m.tnr, Some(1.0));
        assert_eq!(m.tp + m.fp + m.tn + m.fn_, 3);
    }

    #[test]
    fn metrics_all_positive_predictions() {
        let preds = vec![C_OBS; 4];
        let truths = vec![C_OBS, C_OBS, C_FREE, C_FREE];
        let m = compute_metrics(&preds, &truths).unwrap();
        assert_eq!(m.tpr, Some(1.0));
        assert_eq!(m.tnr, Some(0.0));
        assert_eq!(m.accuracy, Some(0.5));
    }

    #[test]
    fn metrics_zero_denominators_are_none() {
        let m = compute_metrics(&[C_FREE, C_FREE], &[C_FREE, C_FREE]).unwrap();
        assert_eq!(m.tpr, None);
        assert_eq!(m.tnr, Some(1.0));
        let empty = compute_metrics(&[], &[]).unwrap();
        assert_eq!(empty.accuracy, None);
    }

    #[test]
    fn metrics_match_independent_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(1..200);
            let preds: Vec<f64> =
                (0..n).map(|_| if rng.random_range(0.0..1.0) < 0.5 { C_OBS } else { C_FREE }).collect();
            let truths: Vec<f64> =
                (0..n).map(|_| if rng.random_range(0.0..1.0) < 0.5 { C_OBS } else { C_FREE }).collect();
            let m = compute_metrics(&preds, &truths).unwrap();
            // Direct tally, written independently of compute_metrics.
            let tp = preds.iter().zip(&truths).filter(|(&p, &t)| p > 0.0 && t > 0.0).count();
            let tn = preds.iter().zip(&truths).filter(|(&p, &t)| p < 0.0 && t < 0.0).count();
            let fp = preds.iter().zip(&truths).filter(|(&p, &t)| p > 0.0 && t < 0.0).count();
            let fn_ = preds.iter().zip(&truths).filter(|(&p, &t)| p < 0.0 && t > 0.0).count();
            assert_eq!((m.tp, m.fp, m.tn, m.fn_), (tp, fp, tn, fn_));
            assert_eq!(m.tp + m.fp + m.tn + m.fn_, n);
            assert_eq!(m.accuracy, Some((tp + tn) as f64 / n as f64));
        }
    }

    #[test]
    fn stats_and_median() {
        let s = Stats::from_samples(&[1.0, 2.0, 3.0]).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-12);
        assert!((s.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn pearson_basics() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 4.0, 6.0, 8.0];
        assert!((pearson(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&xs, &[1.0, 1.0, 1.0, 1.0]), None);
    }

    #[test]
    fn config_defaults_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let robot = dir.path().join("robot.toml");
        let scene = dir.path().join("scene.toml");
        std::fs::write(&robot, "stub").unwrap();
        std::fs::write(&scene, "stub").unwrap();
        let cfg_path = dir.path().join("cfg.toml");
        std::fs::write(&cfg_path, "robot = \"robot.toml\"\nscene = \"scene.toml\"\n").unwrap();
        let cfg = ScenarioConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.test_set_size, 2000);
        assert_eq!(cfg.trials, 1);
        assert_eq!(cfg.robot, robot);
        assert_eq!(TrainParams::from(cfg.train).iter_max, 5000);

        std::fs::write(
            &cfg_path,
            "robot = \"robot.toml\"\nscene = \"scene.toml\"\nobstacle_counts = [5, 1]\n",
        )
        .unwrap();
        assert!(ScenarioConfig::load(&cfg_path).is_err());
        std::fs::write(
            &cfg_path,
            "robot = \"robot.toml\"\nscene = \"scene.toml\"\nobstacle_counts = [1, 60]\n",
        )
        .unwrap();
        assert!(ScenarioConfig::load(&cfg_path).is_err());
        std::fs::write(&cfg_path, "robot = \"missing.toml\"\nscene = \"scene.toml\"\n").unwrap();
        assert!(ScenarioConfig::load(&cfg_path).is_err());
    }
}
