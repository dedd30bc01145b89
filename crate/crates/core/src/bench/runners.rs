//! The three benchmark drivers: moving-obstacle correctness, obstacle-count
//! query-time sweep, and planner comparison with verify-and-repair.

use super::{
    compute_metrics, label_of_score, BenchError, CheckerKind, MetricsReport, ScenarioConfig,
};
use crate::derive_seed;
use crate::fastron::{train, Dataset, FastronModel, ResampleCounts, TrainParams};
use crate::geometry::{in_collision, load_scene, ConvexShape, MotionScript, Scene};
use crate::kernels::{KernelKind, KernelSpec};
use crate::kinematics::{load_robot, Configuration, RobotModel};
use crate::planners::{
    edge_valid, plan, verify_and_repair, Checker, OracleChecker, PlannerKind, ProxyChecker,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

/// One deterministic result row of the collision benchmark.
#[derive(Debug, Clone)]
pub struct MetricsRow {
    pub trial: usize,
    pub move_idx: usize,
    pub checker: CheckerKind,
    pub metrics: MetricsReport,
    /// Support-set size; `None` for the oracle.
    pub support_count: Option<usize>,
    /// Whether the most recent training run converged; `true` for the oracle.
    pub converged: bool,
}

/// Wall-clock measurements matching a MetricsRow.
#[derive(Debug, Clone)]
pub struct TimingRow {
    pub trial: usize,
    pub move_idx: usize,
    pub checker: CheckerKind,
    /// Mean per-query time, microseconds.
    pub query_time_us: f64,
    /// Model update (active learning + retrain) time, milliseconds; `None`
    /// for the oracle.
    pub update_time_ms: Option<f64>,
}

#[derive(Debug)]
pub struct CollisionBenchReport {
    pub rows: Vec<MetricsRow>,
    pub timing: Vec<TimingRow>,
}

impl CollisionBenchReport {
    /// All values of a per-row metric for one checker, in row order.
    pub fn metric_values<F: Fn(&MetricsRow) -> Option<f64>>(
        &self,
        checker: CheckerKind,
        f: F,
    ) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.checker == checker)
            .filter_map(|r| f(r))
            .collect()
    }

    pub fn mean_query_time_us(&self, checker: CheckerKind) -> Option<f64> {
        let xs: Vec<f64> = self
            .timing
            .iter()
            .filter(|t| t.checker == checker)
            .map(|t| t.query_time_us)
            .collect();
        super::Stats::from_samples(&xs).map(|s| s.mean)
    }
}

fn oracle_fn<'a>(
    robot: &'a RobotModel,
    scene: &'a Scene,
) -> impl Fn(&Configuration) -> f64 + 'a {
    move |q: &Configuration| in_collision(robot, q, scene).expect("configuration matches robot")
}

fn sample_labeled(
    robot: &RobotModel,
    scene: &Scene,
    n: usize,
    seed: u64,
) -> Result<Dataset, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = oracle_fn(robot, scene);
    let mut configs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    while configs.len() < n {
        let q = robot.sample_uniform(&mut rng);
        let key: Vec<u64> = q.0.iter().map(|v| v.to_bits()).collect();
        if !seen.insert(key) {
            continue;
        }
        labels.push(oracle(&q));
        configs.push(q);
    }
    Ok(Dataset::new(configs, labels)?)
}

fn sample_queries(robot: &RobotModel, n: usize, seed: u64) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| robot.sample_uniform(&mut rng)).collect()
}

/// Mean per-call time in microseconds over `reps` calls (cycling through
/// `queries`), after a warmup of a tenth of the reps.
fn time_queries<F: FnMut(&Configuration) -> f64>(
    queries: &[Configuration],
    reps: usize,
    mut f: F,
) -> f64 {
    assert!(!queries.is_empty());
    let warmup = (reps / 10).clamp(1, 1000);
    let mut sink = 0.0;
    for i in 0..warmup {
        sink += f(&queries[i % queries.len()]);
    }
    let start = Instant::now();
    for i in 0..reps {
        sink += f(&queries[i % queries.len()]);
    }
    let elapsed = start.elapsed().as_secs_f64();
    std::hint::black_box(sink);
    elapsed * 1e6 / reps as f64
}

/// Median of several repeated measurements, for noise robustness where a
/// single curve point decides an ordering.
fn time_queries_median<F: FnMut(&Configuration) -> f64>(
    queries: &[Configuration],
    reps: usize,
    mut f: F,
) -> f64 {
    let samples: Vec<f64> = (0..5).map(|_| time_queries(queries, reps, &mut f)).collect();
    super::median(&samples).expect("non-empty samples")
}

struct ProxyState {
    kind: CheckerKind,
    model: FastronModel,
    converged: bool,
}

/// Moving-obstacle correctness benchmark. Per trial: label a dataset with
/// the oracle, train the configured Fastron variants, then per obstacle
/// move run the active-learning update cycle and score every checker on a
/// fresh oracle-labeled test set.
pub fn run_collision_benchmark(
    config: &ScenarioConfig,
) -> Result<CollisionBenchReport, BenchError> {
    let robot = Arc::new(load_robot(&config.robot)?);
    let base_scene = load_scene(&config.scene)?;
    let params = TrainParams::from(config.train);
    let mut rows = Vec::new();
    let mut timing = Vec::new();

    for trial in 0..config.trials {
        let trial_seed = derive_seed(config.seed, "collision-trial", trial as u64);
        let mut scene = base_scene.clone();
        let script = scene
            .motion
            .as_ref()
            .map(|spec| MotionScript::generate(spec, derive_seed(trial_seed, "motion", 0)));

        let dataset = sample_labeled(&robot, &scene, config.dataset_size, derive_seed(trial_seed, "data", 0))?;
        let mut proxies = Vec::new();
        for &kind in &config.checkers {
            let kernel_kind = match kind {
                CheckerKind::FastronFk => KernelKind::FkWorkspace,
                CheckerKind::FastronRq => KernelKind::RqJointSpace,
                CheckerKind::OracleGjk => continue,
            };
            let spec = KernelSpec::new(kernel_kind, KernelSpec::default_gamma(kernel_kind, &robot))
                .expect("positive default gamma");
            let report = train(&dataset, &params, spec, &robot, None)?;
            proxies.push(ProxyState { kind, model: report.model, converged: report.converged });
        }

        // Move 0 evaluates the freshly trained models; later moves shift
        // the scene and run one update cycle first.
        let moves = config.moves_per_trial.max(1);
        for move_idx in 0..moves {
            let mut update_ms: Vec<(CheckerKind, f64)> = Vec::new();
            if move_idx > 0 {
                if let Some(script) = &script {
                    let step = script.steps[(move_idx - 1) % script.steps.len()];
                    scene.apply_step(&step);
                }
                let oracle = oracle_fn(&robot, &scene);
                for (i, proxy) in proxies.iter_mut().enumerate() {
                    let counts = ResampleCounts::default_for(
                        proxy.model.support_count(),
                        config.dataset_size,
                    );
                    let sigma = crate::fastron::default_sigma(&robot);
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                        trial_seed,
                        "update",
                        (move_idx * 8 + i) as u64,
                    ));
                    let t0 = Instant::now();
                    let report = crate::fastron::update_cycle(
                        &proxy.model,
                        &oracle,
                        &params,
                        counts,
                        &sigma,
                        &mut rng,
                    )?;
                    update_ms.push((proxy.kind, t0.elapsed().as_secs_f64() * 1e3));
                    proxy.model = report.model;
                    proxy.converged = report.converged;
                }
            }

            let test = sample_queries(
                &robot,
                config.test_set_size,
                derive_seed(trial_seed, "test", move_idx as u64),
            );
            let oracle = oracle_fn(&robot, &scene);
            let truths: Vec<f64> = test.iter().map(&oracle).collect();

            for &kind in &config.checkers {
                let (preds, support, converged): (Vec<f64>, Option<usize>, bool) = match kind {
                    CheckerKind::OracleGjk => (truths.clone(), None, true),
                    _ => {
                        let proxy = proxies
                            .iter()
                            .find(|p| p.kind == kind)
                            .expect("proxy trained for configured checker");
                        let preds = test
                            .iter()
                            .map(|q| label_of_score(proxy.model.query(q).expect("trained").1))
                            .collect();
                        (preds, Some(proxy.model.support_count()), proxy.converged)
                    }
                };
                rows.push(MetricsRow {
                    trial,
                    move_idx,
                    checker: kind,
                    metrics: compute_metrics(&preds, &truths)?,
                    support_count: support,
                    converged,
                });

                let query_time_us = match kind {
                    CheckerKind::OracleGjk => {
                        time_queries(&test, config.query_reps, |q| oracle(q))
                    }
                    _ => {
                        let proxy = proxies.iter().find(|p| p.kind == kind).unwrap();
                        time_queries(&test, config.query_reps, |q| {
                            proxy.model.query(q).expect("trained").0
                        })
                    }
                };
                timing.push(TimingRow {
                    trial,
                    move_idx,
                    checker: kind,
                    query_time_us,
                    update_time_ms: update_ms
                        .iter()
                        .find(|(k, _)| *k == kind)
                        .map(|(_, ms)| *ms),
                });
            }
        }
    }
    Ok(CollisionBenchReport { rows, timing })
}

/// One row of the obstacle sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub obstacle_count: usize,
    pub checker: CheckerKind,
    pub support_count: Option<usize>,
    pub accuracy: Option<f64>,
    /// Mean per-query time, microseconds (timing file only).
    pub query_time_us: f64,
}

#[derive(Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn series(&self, checker: CheckerKind) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.checker == checker).collect()
    }
}

/// Builds a scene of `count` random spheres inside the base scene's bounds.
pub fn random_scene(base: &Scene, count: usize, seed: u64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extent = base.bounds.max - base.bounds.min;
    let r_lo = 0.015 * extent.norm();
    let r_hi = 0.035 * extent.norm();
    let obstacles = (0..count)
        .map(|_| {
            let c = nalgebra::Vector3::new(
                rng.random_range(base.bounds.min.x..=base.bounds.max.x),
                rng.random_range(base.bounds.min.y..=base.bounds.max.y),
                rng.random_range(base.bounds.min.z..=base.bounds.max.z),
            );
            ConvexShape::sphere(c, rng.random_range(r_lo..=r_hi))
        })
        .collect();
    Scene { obstacles, bounds: base.bounds, motion: None }
}

/// Query-time curve over obstacle counts. Each count gets a fresh random
/// scene, fresh training for the Fastron variants, and a shared fixed
/// query set for timing.
pub fn run_obstacle_sweep(
    config: &ScenarioConfig,
    counts: &[usize],
) -> Result<SweepReport, BenchError> {
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "counts must ascend");
    assert!(counts.last().is_none_or(|&c| c <= 50), "max 50 obstacles");
    let robot = Arc::new(load_robot(&config.robot)?);
    let base_scene = load_scene(&config.scene)?;
    let params = TrainParams::from(config.train);
    let queries = sample_queries(&robot, config.test_set_size, derive_seed(config.seed, "sweep-queries", 0));
    let mut rows = Vec::new();

    for &count in counts {
        let scene = random_scene(&base_scene, count, derive_seed(config.seed, "sweep-scene", count as u64));
        let dataset = sample_labeled(
            &robot,
            &scene,
            config.dataset_size,
            derive_seed(config.seed, "sweep-data", count as u64),
        )?;
        let oracle = oracle_fn(&robot, &scene);
        let truths: Vec<f64> = queries.iter().map(&oracle).collect();

        for &kind in &config.checkers {
            let (support, accuracy, query_time_us) = match kind {
                CheckerKind::OracleGjk => {
                    let t = time_queries_median(&queries, config.query_reps, |q| oracle(q));
                    (None, Some(1.0), t)
                }
                _ => {
                    let kernel_kind = match kind {
                        CheckerKind::FastronFk => KernelKind::FkWorkspace,
                        CheckerKind::FastronRq => KernelKind::RqJointSpace,
                        CheckerKind::OracleGjk => unreachable!(),
                    };
                    let spec = KernelSpec::new(
                        kernel_kind,
                        KernelSpec::default_gamma(kernel_kind, &robot),
                    )
                    .expect("positive default gamma");
                    let model = train(&dataset, &params, spec, &robot, None)?.model;
                    let preds: Vec<f64> = queries
                        .iter()
                        .map(|q| label_of_score(model.query(q).expect("trained").1))
                        .collect();
                    let acc = compute_metrics(&preds, &truths)?.accuracy;
                    let t = time_queries_median(&queries, config.query_reps, |q| {
                        model.query(q).expect("trained").0
                    });
                    (Some(model.support_count()), acc, t)
                }
            };
            rows.push(SweepRow {
                obstacle_count: count,
                checker: kind,
                support_count: support,
                accuracy,
                query_time_us,
            });
        }
    }
    Ok(SweepReport { rows })
}

/// One planning run.
#[derive(Debug, Clone)]
pub struct PlanningRow {
    pub planner: PlannerKind,
    pub checker: CheckerKind,
    pub trial: usize,
    pub success: bool,
    pub initial_length: Option<f64>,
    pub final_length: Option<f64>,
    pub repaired_segments: Option<usize>,
    /// Wall-clock fields (timing file only), milliseconds.
    pub plan_time_ms: f64,
    pub verify_time_ms: f64,
    pub repair_time_ms: f64,
}

#[derive(Debug)]
pub struct PlanningReport {
    pub rows: Vec<PlanningRow>,
}

impl PlanningReport {
    pub fn total_times_ms(&self, planner: PlannerKind, checker: CheckerKind) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.planner == planner && r.checker == checker && r.success)
            .map(|r| r.plan_time_ms + r.verify_time_ms + r.repair_time_ms)
            .collect()
    }
}

/// Planner comparison: each configured planner runs with each configured
/// checker; proxy plans are verified and repaired against the oracle.
pub fn run_planning_benchmark(config: &ScenarioConfig) -> Result<PlanningReport, BenchError> {
    let robot = Arc::new(load_robot(&config.robot)?);
    let scene = load_scene(&config.scene)?;
    let start = Configuration(
        config
            .start
            .clone()
            .ok_or_else(|| BenchError::InvalidConfig("planning requires `start`".into()))?,
    );
    let goal = Configuration(
        config
            .goal
            .clone()
            .ok_or_else(|| BenchError::InvalidConfig("planning requires `goal`".into()))?,
    );
    let train_params = TrainParams::from(config.train);
    let oracle = OracleChecker { robot: &robot, scene: &scene };
    if !oracle.is_free(&start) || !oracle.is_free(&goal) {
        return Err(BenchError::InvalidConfig(
            "start and goal must be collision-free under the oracle".into(),
        ));
    }

    // Train one model per configured proxy variant, shared across trials.
    let dataset = sample_labeled(
        &robot,
        &scene,
        config.dataset_size,
        derive_seed(config.seed, "plan-data", 0),
    )?;
    let mut proxies: Vec<(CheckerKind, FastronModel)> = Vec::new();
    for &kind in &config.checkers {
        let kernel_kind = match kind {
            CheckerKind::FastronFk => KernelKind::FkWorkspace,
            CheckerKind::FastronRq => KernelKind::RqJointSpace,
            CheckerKind::OracleGjk => continue,
        };
        let spec = KernelSpec::new(kernel_kind, KernelSpec::default_gamma(kernel_kind, &robot))
            .expect("positive default gamma");
        proxies.push((kind, train(&dataset, &train_params, spec, &robot, None)?.model));
    }

    let proxy_checkers: Vec<(CheckerKind, ProxyChecker<'_>)> = proxies
        .iter()
        .map(|(k, m)| (*k, ProxyChecker { model: m }))
        .collect();

    let planners = [PlannerKind::Rrt, PlannerKind::RrtConnect, PlannerKind::RrtStar];
    let mut rows = Vec::new();

    for trial in 0..config.trials {
        for (pi, &planner) in planners.iter().enumerate() {
            for &kind in &config.checkers {
                let params = config.planner.resolve(
                    &robot,
                    derive_seed(
                        config.seed,
                        "plan-run",
                        (trial * 64 + pi * 8) as u64 + checker_tag(kind),
                    ),
                );
                let checker: &dyn Checker = match kind {
                    CheckerKind::OracleGjk => &oracle,
                    _ => &proxy_checkers.iter().find(|(k, _)| *k == kind).unwrap().1,
                };
                run_one_plan(
                    &mut rows, planner, kind, trial, &robot, checker, &oracle, &start, &goal,
                    &params,
                );
            }
        }
    }
    Ok(PlanningReport { rows })
}

fn checker_tag(kind: CheckerKind) -> u64 {
    match kind {
        CheckerKind::FastronFk => 0,
        CheckerKind::FastronRq => 1,
        CheckerKind::OracleGjk => 2,
    }
}

#[allow(clippy::too_many_arguments)]
fn run_one_plan(
    rows: &mut Vec<PlanningRow>,
    planner: PlannerKind,
    kind: CheckerKind,
    trial: usize,
    robot: &RobotModel,
    checker: &dyn Checker,
    oracle: &OracleChecker<'_>,
    start: &Configuration,
    goal: &Configuration,
    params: &crate::planners::PlannerParams,
) {
    let t0 = Instant::now();
    let planned = plan(planner, robot, checker, start, goal, params);
    let plan_time_ms = t0.elapsed().as_secs_f64() * 1e3;

    let row = match planned {
        Err(_) => PlanningRow {
            planner,
            checker: kind,
            trial,
            success: false,
            initial_length: None,
            final_length: None,
            repaired_segments: None,
            plan_time_ms,
            verify_time_ms: 0.0,
            repair_time_ms: 0.0,
        },
        Ok(path) => {
            let t1 = Instant::now();
            let valid = path
                .waypoints
                .windows(2)
                .all(|w| edge_valid(oracle, &w[0], &w[1], params.edge_resolution));
            let verify_time_ms = t1.elapsed().as_secs_f64() * 1e3;
            let (final_path, repaired, repair_time_ms) = if valid {
                (Some(path.clone()), 0, 0.0)
            } else {
                let t2 = Instant::now();
                match verify_and_repair(&path, robot, oracle, planner, params) {
                    Ok(rep) => {
                        let ms = t2.elapsed().as_secs_f64() * 1e3;
                        (Some(rep.path), rep.repaired_segments, ms)
                    }
                    Err(_) => (None, 0, t2.elapsed().as_secs_f64() * 1e3),
                }
            };
            PlanningRow {
                planner,
                checker: kind,
                trial,
                success: final_path.is_some(),
                initial_length: Some(path.length()),
                final_length: final_path.map(|p| p.length()),
                repaired_segments: Some(repaired),
                plan_time_ms,
                verify_time_ms,
                repair_time_ms,
            }
        }
    };
    rows.push(row);
}
