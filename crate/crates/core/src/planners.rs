//! Sampling-based motion planners over pluggable collision checkers, plus
//! the verify-and-repair protocol that makes proxy-planned paths sound
//! against the geometric oracle.

use crate::fastron::{FastronModel, C_FREE};
use crate::geometry::{in_collision, Scene};
use crate::kinematics::{Configuration, RobotModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::io::Write;
use std::path::Path as FsPath;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("{0} configuration is in collision according to the checker")]
    EndpointInCollision(&'static str),
    #[error("no path found within {0} iterations")]
    NoPathFound(usize),
    #[error("repair failed: could not replan invalid segment between waypoints {0} and {1}")]
    RepairFailed(usize, usize),
    #[error("repair failed: {0} of the path is in collision under the oracle")]
    EndpointInvalidUnderOracle(&'static str),
    #[error("path export i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// A collision-status source: +1 in-collision, -1 free.
pub trait Checker {
    fn label(&self, q: &Configuration) -> f64;

    fn is_free(&self, q: &Configuration) -> bool {
        self.label(q) == C_FREE
    }
}

/// Geometric ground-truth checker.
pub struct OracleChecker<'a> {
    pub robot: &'a RobotModel,
    pub scene: &'a Scene,
}

impl Checker for OracleChecker<'_> {
    fn label(&self, q: &Configuration) -> f64 {
        in_collision(self.robot, q, self.scene).expect("valid configuration for robot")
    }
}

/// Trained proxy model as a checker.
pub struct ProxyChecker<'a> {
    pub model: &'a FastronModel,
}

impl Checker for ProxyChecker<'_> {
    fn label(&self, q: &Configuration) -> f64 {
        self.model.query(q).expect("trained model").0
    }
}

impl<F: Fn(&Configuration) -> f64> Checker for F {
    fn label(&self, q: &Configuration) -> f64 {
        self(q)
    }
}

/// Wraps a checker and counts label calls; used by tests and query-time
/// accounting.
pub struct CountingChecker<'a> {
    pub inner: &'a dyn Checker,
    pub calls: Cell<usize>,
}

impl<'a> CountingChecker<'a> {
    pub fn new(inner: &'a dyn Checker) -> Self {
        Self { inner, calls: Cell::new(0) }
    }
}

impl Checker for CountingChecker<'_> {
    fn label(&self, q: &Configuration) -> f64 {
        self.calls.set(self.calls.get() + 1);
        self.inner.label(q)
    }
}

/// An ordered waypoint sequence in joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub waypoints: Vec<Configuration>,
}

impl Path {
    /// Sum of joint-space segment norms.
    pub fn length(&self) -> f64 {
        self.waypoints
            .windows(2)
            .map(|w| w[0].distance(&w[1]))
            .sum()
    }

    /// Line-oriented export: one waypoint per line, values space-separated.
    pub fn write_text(&self, path: &FsPath) -> Result<(), PlannerError> {
        let mut f = std::fs::File::create(path)?;
        for wp in &self.waypoints {
            let line: Vec<String> = wp.0.iter().map(|v| format!("{v}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlannerParams {
    /// Joint-space extension step.
    pub step_size: f64,
    /// Probability of sampling the goal directly.
    pub goal_bias: f64,
    pub max_iters: usize,
    /// Interpolation spacing for edge checks.
    pub edge_resolution: f64,
    /// Neighborhood radius for rewiring; only used by the optimizing
    /// planner.
    pub rewire_radius: f64,
    pub seed: u64,
}

impl PlannerParams {
    /// Defaults scaled to the robot: steps and radii as fractions of the
    /// joint-range diagonal, edge resolution at 1/50 of it.
    pub fn default_for(robot: &RobotModel, seed: u64) -> Self {
        let diag = robot.joint_range_diagonal();
        Self {
            step_size: diag / 10.0,
            goal_bias: 0.05,
            max_iters: 20_000,
            edge_resolution: diag / 50.0,
            rewire_radius: diag / 5.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    Rrt,
    RrtConnect,
    RrtStar,
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PlannerKind::Rrt => "rrt",
            PlannerKind::RrtConnect => "rrt-connect",
            PlannerKind::RrtStar => "rrt-star",
        };
        f.write_str(s)
    }
}

/// True iff every interpolated configuration at spacing <= `resolution`
/// (endpoints included) is free according to the checker.
pub fn edge_valid(
    checker: &dyn Checker,
    a: &Configuration,
    b: &Configuration,
    resolution: f64,
) -> bool {
    let dist = a.distance(b);
    let segments = (dist / resolution).ceil().max(1.0) as usize;
    for k in 0..=segments {
        let t = k as f64 / segments as f64;
        let q = interpolate(a, b, t);
        if !checker.is_free(&q) {
            return false;
        }
    }
    true
}

fn interpolate(a: &Configuration, b: &Configuration, t: f64) -> Configuration {
    Configuration(
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x + (y - x) * t)
            .collect(),
    )
}

struct Node {
    q: Configuration,
    parent: Option<usize>,
    cost: f64,
}

fn nearest(tree: &[Node], q: &Configuration) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, node) in tree.iter().enumerate() {
        let d = node.q.distance(q);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn steer(from: &Configuration, toward: &Configuration, step: f64) -> Configuration {
    let d = from.distance(toward);
    if d <= step {
        toward.clone()
    } else {
        interpolate(from, toward, step / d)
    }
}

fn extract_path(tree: &[Node], mut idx: usize) -> Vec<Configuration> {
    let mut rev = Vec::new();
    loop {
        rev.push(tree[idx].q.clone());
        match tree[idx].parent {
            Some(p) => idx = p,
            None => break,
        }
    }
    rev.reverse();
    rev
}

fn check_endpoints(
    checker: &dyn Checker,
    start: &Configuration,
    goal: &Configuration,
) -> Result<(), PlannerError> {
    if !checker.is_free(start) {
        return Err(PlannerError::EndpointInCollision("start"));
    }
    if !checker.is_free(goal) {
        return Err(PlannerError::EndpointInCollision("goal"));
    }
    Ok(())
}

/// Goal-biased RRT; returns the first path whose final edge reaches the
/// goal.
pub fn plan_rrt(
    robot: &RobotModel,
    checker: &dyn Checker,
    start: &Configuration,
    goal: &Configuration,
    params: &PlannerParams,
) -> Result<Path, PlannerError> {
    check_endpoints(checker, start, goal)?;
    if start.distance(goal) <= params.step_size
        && edge_valid(checker, start, goal, params.edge_resolution)
    {
        return Ok(Path { waypoints: vec![start.clone(), goal.clone()] });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tree = vec![Node { q: start.clone(), parent: None, cost: 0.0 }];

    for _ in 0..params.max_iters {
        let target = if rng.random_range(0.0..1.0) < params.goal_bias {
            goal.clone()
        } else {
            robot.sample_uniform(&mut rng)
        };
        let near = nearest(&tree, &target);
        let q_new = steer(&tree[near].q, &target, params.step_size);
        if !edge_valid(checker, &tree[near].q, &q_new, params.edge_resolution) {
            continue;
        }
        let cost = tree[near].cost + tree[near].q.distance(&q_new);
        tree.push(Node { q: q_new.clone(), parent: Some(near), cost });
        let new_idx = tree.len() - 1;

        if q_new.distance(goal) <= params.step_size
            && edge_valid(checker, &q_new, goal, params.edge_resolution)
        {
            let mut waypoints = extract_path(&tree, new_idx);
            if waypoints.last() != Some(goal) {
                waypoints.push(goal.clone());
            }
            return Ok(Path { waypoints });
        }
    }
    Err(PlannerError::NoPathFound(params.max_iters))
}

enum ExtendResult {
    Reached(usize),
    Advanced(usize),
    Blocked,
}

fn extend(
    tree: &mut Vec<Node>,
    target: &Configuration,
    checker: &dyn Checker,
    params: &PlannerParams,
) -> ExtendResult {
    let near = nearest(tree, target);
    let q_new = steer(&tree[near].q, target, params.step_size);
    if !edge_valid(checker, &tree[near].q, &q_new, params.edge_resolution) {
        return ExtendResult::Blocked;
    }
    let cost = tree[near].cost + tree[near].q.distance(&q_new);
    let reached = q_new == *target;
    tree.push(Node { q: q_new, parent: Some(near), cost });
    let idx = tree.len() - 1;
    if reached {
        ExtendResult::Reached(idx)
    } else {
        ExtendResult::Advanced(idx)
    }
}

/// Bidirectional RRT with the greedy connect heuristic.
pub fn plan_rrt_connect(
    robot: &RobotModel,
    checker: &dyn Checker,
    start: &Configuration,
    goal: &Configuration,
    params: &PlannerParams,
) -> Result<Path, PlannerError> {
    check_endpoints(checker, start, goal)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tree_a = vec![Node { q: start.clone(), parent: None, cost: 0.0 }];
    let mut tree_b = vec![Node { q: goal.clone(), parent: None, cost: 0.0 }];
    // Tracks whether tree_a is currently rooted at the start.
    let mut a_is_start = true;

    for _ in 0..params.max_iters {
        let target = robot.sample_uniform(&mut rng);
        let grown = match extend(&mut tree_a, &target, checker, params) {
            ExtendResult::Blocked => None,
            ExtendResult::Reached(i) | ExtendResult::Advanced(i) => Some(i),
        };
        if let Some(idx) = grown {
            // Greedily connect the other tree toward the new node.
            let q_connect = tree_a[idx].q.clone();
            loop {
                match extend(&mut tree_b, &q_connect, checker, params) {
                    ExtendResult::Reached(j) => {
                        let mut half_a = extract_path(&tree_a, idx);
                        let half_b = extract_path(&tree_b, j);
                        // half_b ends at the meeting point; walk it back.
                        half_a.extend(half_b.into_iter().rev().skip(1));
                        if !a_is_start {
                            half_a.reverse();
                        }
                        return Ok(Path { waypoints: half_a });
                    }
                    ExtendResult::Advanced(_) => continue,
                    ExtendResult::Blocked => break,
                }
            }
        }
        std::mem::swap(&mut tree_a, &mut tree_b);
        a_is_start = !a_is_start;
    }
    Err(PlannerError::NoPathFound(params.max_iters))
}

/// One rewire record: node index, previous cost, new cost.
pub type RewireEvent = (usize, f64, f64);

/// RRT* that stops at the first feasible path; rewiring still runs while
/// searching. Returns the path and the rewire log.
pub fn plan_rrt_star_logged(
    robot: &RobotModel,
    checker: &dyn Checker,
    start: &Configuration,
    goal: &Configuration,
    params: &PlannerParams,
) -> Result<(Path, Vec<RewireEvent>), PlannerError> {
    check_endpoints(checker, start, goal)?;
    if start.distance(goal) <= params.step_size
        && edge_valid(checker, start, goal, params.edge_resolution)
    {
        return Ok((Path { waypoints: vec![start.clone(), goal.clone()] }, Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tree = vec![Node { q: start.clone(), parent: None, cost: 0.0 }];
    let mut rewires = Vec::new();

    for _ in 0..params.max_iters {
        let target = if rng.random_range(0.0..1.0) < params.goal_bias {
            goal.clone()
        } else {
            robot.sample_uniform(&mut rng)
        };
        let near = nearest(&tree, &target);
        let q_new = steer(&tree[near].q, &target, params.step_size);
        if !edge_valid(checker, &tree[near].q, &q_new, params.edge_resolution) {
            continue;
        }

        // Choose the cheapest valid parent within the rewire radius.
        let neighbors: Vec<usize> = (0..tree.len())
            .filter(|&i| tree[i].q.distance(&q_new) <= params.rewire_radius)
            .collect();
        let mut parent = near;
        let mut cost = tree[near].cost + tree[near].q.distance(&q_new);
        for &i in &neighbors {
            let c = tree[i].cost + tree[i].q.distance(&q_new);
            if c < cost && edge_valid(checker, &tree[i].q, &q_new, params.edge_resolution) {
                parent = i;
                cost = c;
            }
        }
        tree.push(Node { q: q_new.clone(), parent: Some(parent), cost });
        let new_idx = tree.len() - 1;

        // Rewire neighbors through the new node when cheaper.
        for &i in &neighbors {
            let via = cost + q_new.distance(&tree[i].q);
            if via < tree[i].cost
                && edge_valid(checker, &q_new, &tree[i].q, params.edge_resolution)
            {
                rewires.push((i, tree[i].cost, via));
                tree[i].parent = Some(new_idx);
                let delta = via - tree[i].cost;
                tree[i].cost = via;
                // Propagate the improvement to descendants.
                let mut stack: Vec<usize> =
                    (0..tree.len()).filter(|&j| tree[j].parent == Some(i)).collect();
                while let Some(j) = stack.pop() {
                    tree[j].cost += delta;
                    stack.extend((0..tree.len()).filter(|&k| tree[k].parent == Some(j)));
                }
            }
        }

        if q_new.distance(goal) <= params.step_size
            && edge_valid(checker, &q_new, goal, params.edge_resolution)
        {
            let mut waypoints = extract_path(&tree, new_idx);
            if waypoints.last() != Some(goal) {
                waypoints.push(goal.clone());
            }
            return Ok((Path { waypoints }, rewires));
        }
    }
    Err(PlannerError::NoPathFound(params.max_iters))
}

pub fn plan_rrt_star(
    robot: &RobotModel,
    checker: &dyn Checker,
    start: &Configuration,
    goal: &Configuration,
    params: &PlannerParams,
) -> Result<Path, PlannerError> {
    plan_rrt_star_logged(robot, checker, start, goal, params).map(|(p, _)| p)
}

pub fn plan(
    kind: PlannerKind,
    robot: &RobotModel,
    checker: &dyn Checker,
    start: &Configuration,
    goal: &Configuration,
    params: &PlannerParams,
) -> Result<Path, PlannerError> {
    match kind {
        PlannerKind::Rrt => plan_rrt(robot, checker, start, goal, params),
        PlannerKind::RrtConnect => plan_rrt_connect(robot, checker, start, goal, params),
        PlannerKind::RrtStar => plan_rrt_star(robot, checker, start, goal, params),
    }
}

/// Result of [`verify_and_repair`].
#[derive(Debug)]
pub struct RepairReport {
    pub path: Path,
    /// Number of invalid sub-paths that were replanned.
    pub repaired_segments: usize,
}

/// Validates every edge of `path` with the oracle checker; each maximal
/// invalid sub-path is replanned (same planner kind, oracle as checker)
/// between anchors one waypoint beyond the invalid stretch. The returned
/// path passes oracle edge validation end to end.
pub fn verify_and_repair(
    path: &Path,
    robot: &RobotModel,
    oracle: &dyn Checker,
    kind: PlannerKind,
    params: &PlannerParams,
) -> Result<RepairReport, PlannerError> {
    let mut waypoints = path.waypoints.clone();
    if waypoints.is_empty() {
        return Ok(RepairReport { path: Path { waypoints }, repaired_segments: 0 });
    }
    if !oracle.is_free(&waypoints[0]) {
        return Err(PlannerError::EndpointInvalidUnderOracle("start"));
    }
    if !oracle.is_free(waypoints.last().unwrap()) {
        return Err(PlannerError::EndpointInvalidUnderOracle("goal"));
    }

    let mut repaired = 0;
    let mut repair_round = 0u64;
    loop {
        // First invalid edge in the current path.
        let first_bad = waypoints
            .windows(2)
            .position(|w| !edge_valid(oracle, &w[0], &w[1], params.edge_resolution));
        let Some(i) = first_bad else { break };

        // Maximal run of invalid edges starting at i.
        let mut j = i;
        while j + 1 < waypoints.len() - 1
            && !edge_valid(oracle, &waypoints[j + 1], &waypoints[j + 2], params.edge_resolution)
        {
            j += 1;
        }

        // Anchors with one waypoint of padding, pushed further out until
        // they are oracle-free.
        let mut left = i.saturating_sub(1);
        while !oracle.is_free(&waypoints[left]) {
            if left == 0 {
                return Err(PlannerError::EndpointInvalidUnderOracle("start"));
            }
            left -= 1;
        }
        let mut right = (j + 2).min(waypoints.len() - 1);
        while !oracle.is_free(&waypoints[right]) {
            if right == waypoints.len() - 1 {
                return Err(PlannerError::EndpointInvalidUnderOracle("goal"));
            }
            right += 1;
        }

        let mut sub_params = *params;
        sub_params.seed = crate::derive_seed(params.seed, "repair", repair_round);
        repair_round += 1;
        let patch = plan(
            kind,
            robot,
            oracle,
            &waypoints[left],
            &waypoints[right],
            &sub_params,
        )
        .map_err(|_| PlannerError::RepairFailed(left, right))?;

        let mut rebuilt: Vec<Configuration> = waypoints[..left].to_vec();
        rebuilt.extend(patch.waypoints);
        rebuilt.extend_from_slice(&waypoints[right + 1..]);
        waypoints = rebuilt;
        repaired += 1;
    }

    Ok(RepairReport { path: Path { waypoints }, repaired_segments: repaired })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fastron::{C_FREE, C_OBS};
    use approx::assert_relative_eq;

    fn robot() -> RobotModel {
        RobotModel::planar_2dof()
    }

    /// Synthetic joint-space checker: a vertical band of C_obs with a gap
    /// near the top of the second joint's range, so paths must detour.
    fn band_checker(lo: f64, hi: f64) -> impl Fn(&Configuration) -> f64 {
        move |q: &Configuration| {
            if q[0] > lo && q[0] < hi && q[1] < 2.0 {
                C_OBS
            } else {
                C_FREE
            }
        }
    }

    fn free_checker() -> impl Fn(&Configuration) -> f64 {
        |_: &Configuration| C_FREE
    }

    #[test]
    fn edge_valid_basics() {
        let free = free_checker();
        let a = Configuration(vec![0.0, 0.0]);
        assert!(edge_valid(&free, &a, &a, 0.1));

        let band = band_checker(0.4, 0.6);
        let inside = Configuration(vec![0.5, 0.0]);
        assert!(!edge_valid(&band, &a, &inside, 0.1));

        // Segment crossing the band with both endpoints free.
        let b = Configuration(vec![1.0, 0.0]);
        assert!(!edge_valid(&band, &a, &b, 0.05));
        // Fine enough resolution is required to catch a thin band.
        let thin = band_checker(0.49, 0.51);
        assert!(!edge_valid(&thin, &a, &b, 0.005));
    }

    #[test]
    fn rrt_goal_within_one_step() {
        let r = robot();
        let params = PlannerParams::default_for(&r, 1);
        let start = Configuration(vec![0.0, 0.0]);
        let goal = Configuration(vec![0.1, 0.1]);
        let free = free_checker();
        let path = plan_rrt(&r, &free, &start, &goal, &params).unwrap();
        assert_eq!(path.waypoints.len(), 2);
        assert_eq!(path.waypoints[0], start);
        assert_eq!(path.waypoints[1], goal);
    }

    #[test]
    fn rrt_rejects_colliding_endpoints() {
        let r = robot();
        let params = PlannerParams::default_for(&r, 1);
        let band = band_checker(-0.1, 0.1);
        let inside = Configuration(vec![0.0, 0.0]);
        let out = Configuration(vec![1.0, 1.0]);
        assert!(matches!(
            plan_rrt(&r, &band, &inside, &out, &params),
            Err(PlannerError::EndpointInCollision("start"))
        ));
        assert!(matches!(
            plan_rrt(&r, &band, &out, &inside, &params),
            Err(PlannerError::EndpointInCollision("goal"))
        ));
    }

    #[test]
    fn rrt_fails_on_enclosed_goal() {
        // Goal surrounded by a square joint-space moat.
        let r = robot();
        let moat = |q: &Configuration| {
            let d = q[0].abs().max(q[1].abs());
            if d > 0.5 && d < 1.0 {
                C_OBS
            } else {
                C_FREE
            }
        };
        let mut params = PlannerParams::default_for(&r, 2);
        params.max_iters = 2000;
        let start = Configuration(vec![2.0, 2.0]);
        let goal = Configuration(vec![0.0, 0.0]);
        assert!(matches!(
            plan_rrt(&r, &moat, &start, &goal, &params),
            Err(PlannerError::NoPathFound(2000))
        ));
    }

    #[test]
    fn planners_route_around_band_and_self_validate() {
        let r = robot();
        let band = band_checker(-0.3, 0.3);
        let start = Configuration(vec![-2.0, 0.0]);
        let goal = Configuration(vec![2.0, 0.0]);
        for kind in [PlannerKind::Rrt, PlannerKind::RrtConnect, PlannerKind::RrtStar] {
            for seed in 0..20 {
                let params = PlannerParams::default_for(&r, seed);
                let path = plan(kind, &r, &band, &start, &goal, &params)
                    .unwrap_or_else(|e| panic!("{kind} seed {seed}: {e}"));
                assert_eq!(path.waypoints.first(), Some(&start));
                assert_eq!(path.waypoints.last(), Some(&goal));
                for w in path.waypoints.windows(2) {
                    assert!(edge_valid(&band, &w[0], &w[1], params.edge_resolution));
                }
            }
        }
    }

    #[test]
    fn planners_are_deterministic() {
        let r = robot();
        let band = band_checker(-0.3, 0.3);
        let start = Configuration(vec![-2.0, 0.0]);
        let goal = Configuration(vec![2.0, 0.0]);
        for kind in [PlannerKind::Rrt, PlannerKind::RrtConnect, PlannerKind::RrtStar] {
            let params = PlannerParams::default_for(&r, 77);
            let p1 = plan(kind, &r, &band, &start, &goal, &params).unwrap();
            let p2 = plan(kind, &r, &band, &start, &goal, &params).unwrap();
            assert_eq!(p1, p2, "{kind} not deterministic");
        }
    }

    #[test]
    fn rrt_connect_trivial_case_is_fast() {
        let r = robot();
        let mut params = PlannerParams::default_for(&r, 5);
        params.max_iters = 10;
        let free = free_checker();
        let start = Configuration(vec![-1.0, -1.0]);
        let goal = Configuration(vec![1.0, 1.0]);
        let path = plan_rrt_connect(&r, &free, &start, &goal, &params).unwrap();
        assert_eq!(path.waypoints.first(), Some(&start));
        assert_eq!(path.waypoints.last(), Some(&goal));
    }

    #[test]
    fn rrt_star_rewires_only_downward_and_bounds_length() {
        let r = robot();
        let band = band_checker(-0.3, 0.3);
        let start = Configuration(vec![-2.0, 0.0]);
        let goal = Configuration(vec![2.0, 0.0]);
        let params = PlannerParams::default_for(&r, 9);
        let (path, rewires) = plan_rrt_star_logged(&r, &band, &start, &goal, &params).unwrap();
        for (_, old, new) in &rewires {
            assert!(new < old, "rewire increased cost: {old} -> {new}");
        }
        assert!(path.length() >= start.distance(&goal) - 1e-12);
    }

    #[test]
    fn rrt_star_trivial_adjacent() {
        let r = robot();
        let params = PlannerParams::default_for(&r, 3);
        let free = free_checker();
        let start = Configuration(vec![0.0, 0.0]);
        let goal = Configuration(vec![0.05, 0.0]);
        let path = plan_rrt_star(&r, &free, &start, &goal, &params).unwrap();
        assert_eq!(path.waypoints.len(), 2);
        assert_relative_eq!(path.length(), 0.05, epsilon = 1e-12);
    }

    #[test]
    fn repair_leaves_oracle_path_unchanged() {
        let r = robot();
        let band = band_checker(-0.3, 0.3);
        let start = Configuration(vec![-2.0, 0.0]);
        let goal = Configuration(vec![2.0, 0.0]);
        let params = PlannerParams::default_for(&r, 4);
        let path = plan_rrt(&r, &band, &start, &goal, &params).unwrap();
        let report =
            verify_and_repair(&path, &r, &band, PlannerKind::Rrt, &params).unwrap();
        assert_eq!(report.repaired_segments, 0);
        assert_eq!(report.path, path);
    }

    #[test]
    fn repair_removes_injected_colliding_waypoint() {
        let r = robot();
        let band = band_checker(-0.2, 0.2);
        let free = free_checker();
        let start = Configuration(vec![-2.0, 0.0]);
        let goal = Configuration(vec![2.0, 0.0]);
        let params = PlannerParams::default_for(&r, 6);
        // Plan against the permissive checker, which happily goes straight
        // through the band.
        let proxy_path = plan_rrt(&r, &free, &start, &goal, &params).unwrap();
        let report =
            verify_and_repair(&proxy_path, &r, &band, PlannerKind::Rrt, &params).unwrap();
        assert!(report.repaired_segments >= 1);
        assert_eq!(report.path.waypoints.first(), Some(&start));
        assert_eq!(report.path.waypoints.last(), Some(&goal));
        for w in report.path.waypoints.windows(2) {
            assert!(edge_valid(&band, &w[0], &w[1], params.edge_resolution));
        }
    }

    #[test]
    fn repair_fails_cleanly_when_endpoint_invalid() {
        let r = robot();
        let band = band_checker(-0.3, 0.3);
        let params = PlannerParams::default_for(&r, 6);
        let bad = Path {
            waypoints: vec![Configuration(vec![0.0, 0.0]), Configuration(vec![2.0, 0.0])],
        };
        assert!(matches!(
            verify_and_repair(&bad, &r, &band, PlannerKind::Rrt, &params),
            Err(PlannerError::EndpointInvalidUnderOracle("start"))
        ));
    }

    #[test]
    fn planners_only_touch_the_supplied_checker() {
        let r = robot();
        let band = band_checker(-0.3, 0.3);
        let other = free_checker();
        let counted_band = CountingChecker::new(&band);
        let counted_other = CountingChecker::new(&other);
        let start = Configuration(vec![-2.0, 0.0]);
        let goal = Configuration(vec![2.0, 0.0]);
        let params = PlannerParams::default_for(&r, 8);
        plan_rrt(&r, &counted_band, &start, &goal, &params).unwrap();
        assert!(counted_band.calls.get() > 0);
        assert_eq!(counted_other.calls.get(), 0);
    }

    #[test]
    fn path_text_export() {
        let dir = tempfile::tempdir().unwrap();
        let p = Path {
            waypoints: vec![Configuration(vec![0.5, -1.0]), Configuration(vec![1.5, 2.0])],
        };
        let file = dir.path().join("path.txt");
        p.write_text(&file).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        assert_eq!(text, "0.5 -1\n1.5 2\n");
    }
}
