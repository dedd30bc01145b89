//! Geometric ground-truth collision checking.
//!
//! Convex shapes with support functions, a GJK distance-based intersection
//! test, capsule models of robot links, and scene-level collision queries.
//! Everything here is deterministic and serves as the reference oracle for
//! the proxy model.

use crate::fastron::{C_FREE, C_OBS};
use crate::kinematics::{Configuration, KinematicsError, RobotModel};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use thiserror::Error;

/// GJK iteration-cap hits since process start; nonzero values mean some
/// queries fell back to the conservative "intersecting" answer.
pub static GJK_CAP_HITS: AtomicUsize = AtomicUsize::new(0);

const GJK_MAX_ITERS: usize = 64;
const GJK_SUPPORT_GAP_TOL: f64 = 1e-10;
/// Distances below this resolve as intersecting.
const TANGENCY_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("grid ground truth supports at most 3 DOF, robot has {0}")]
    UnsupportedDof(usize),
    #[error("scene file i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("scene file parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// A convex workspace shape in world coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConvexShape {
    Sphere {
        center: Vector3<f64>,
        radius: f64,
    },
    Box {
        center: Vector3<f64>,
        half_extents: Vector3<f64>,
        rotation: Matrix3<f64>,
    },
    Capsule {
        a: Vector3<f64>,
        b: Vector3<f64>,
        radius: f64,
    },
    Hull {
        vertices: Vec<Vector3<f64>>,
    },
}

impl ConvexShape {
    pub fn sphere(center: Vector3<f64>, radius: f64) -> Self {
        ConvexShape::Sphere { center, radius }
    }

    pub fn aligned_box(center: Vector3<f64>, half_extents: Vector3<f64>) -> Self {
        ConvexShape::Box { center, half_extents, rotation: Matrix3::identity() }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            ConvexShape::Sphere { radius, .. } | ConvexShape::Capsule { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(GeometryError::InvalidShape("radius must be > 0".into()));
                }
            }
            ConvexShape::Box { half_extents, .. } => {
                if half_extents.iter().any(|&h| h <= 0.0) {
                    return Err(GeometryError::InvalidShape("half extents must be > 0".into()));
                }
            }
            ConvexShape::Hull { vertices } => {
                if vertices.len() < 4 {
                    return Err(GeometryError::InvalidShape("hull needs >= 4 vertices".into()));
                }
            }
        }
        Ok(())
    }

    /// Farthest point of the shape in direction `dir` (need not be unit).
    pub fn support(&self, dir: &Vector3<f64>) -> Vector3<f64> {
        match self {
            ConvexShape::Sphere { center, radius } => {
                let n = dir.norm();
                if n > 0.0 {
                    center + dir * (radius / n)
                } else {
                    center + Vector3::new(*radius, 0.0, 0.0)
                }
            }
            ConvexShape::Box { center, half_extents, rotation } => {
                let local = rotation.transpose() * dir;
                let corner = Vector3::new(
                    half_extents.x.copysign(local.x),
                    half_extents.y.copysign(local.y),
                    half_extents.z.copysign(local.z),
                );
                center + rotation * corner
            }
            ConvexShape::Capsule { a, b, radius } => {
                let end = if a.dot(dir) >= b.dot(dir) { a } else { b };
                let n = dir.norm();
                if n > 0.0 {
                    end + dir * (radius / n)
                } else {
                    end + Vector3::new(*radius, 0.0, 0.0)
                }
            }
            ConvexShape::Hull { vertices } => {
                *vertices
                    .iter()
                    .max_by(|p, q| p.dot(dir).total_cmp(&q.dot(dir)))
                    .expect("validated hull is nonempty")
            }
        }
    }

    /// A point inside the shape, used to seed the GJK search direction.
    pub fn centroid(&self) -> Vector3<f64> {
        match self {
            ConvexShape::Sphere { center, .. } | ConvexShape::Box { center, .. } => *center,
            ConvexShape::Capsule { a, b, .. } => (a + b) * 0.5,
            ConvexShape::Hull { vertices } => {
                vertices.iter().sum::<Vector3<f64>>() / vertices.len() as f64
            }
        }
    }

    pub fn translate(&mut self, d: &Vector3<f64>) {
        match self {
            ConvexShape::Sphere { center, .. } | ConvexShape::Box { center, .. } => *center += d,
            ConvexShape::Capsule { a, b, .. } => {
                *a += d;
                *b += d;
            }
            ConvexShape::Hull { vertices } => {
                for v in vertices {
                    *v += d;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Closed-form distances
// ---------------------------------------------------------------------------

fn point_segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_squared();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len_sq).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Closest distance between segments [p1,q1] and [p2,q2].
fn segment_segment_distance(
    p1: &Vector3<f64>,
    q1: &Vector3<f64>,
    p2: &Vector3<f64>,
    q2: &Vector3<f64>,
) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);

    let (s, t);
    if a == 0.0 && e == 0.0 {
        return r.norm();
    }
    if a == 0.0 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e == 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s_ = if denom != 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t_ = (b * s_ + f) / e;
            if t_ < 0.0 {
                t_ = 0.0;
                s_ = (-c / a).clamp(0.0, 1.0);
            } else if t_ > 1.0 {
                t_ = 1.0;
                s_ = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s_;
            t = t_;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

// ---------------------------------------------------------------------------
// GJK
// ---------------------------------------------------------------------------

fn closest_on_segment(a: &Vector3<f64>, b: &Vector3<f64>) -> (Vector3<f64>, Vec<usize>) {
    // Closest point to the origin on segment ab; second item lists the
    // supporting vertex indices (0 = a, 1 = b).
    let ab = b - a;
    let len_sq = ab.norm_squared();
    if len_sq == 0.0 {
        return (*a, vec![0]);
    }
    let t = (-a.dot(&ab)) / len_sq;
    if t <= 0.0 {
        (*a, vec![0])
    } else if t >= 1.0 {
        (*b, vec![1])
    } else {
        (a + ab * t, vec![0, 1])
    }
}

fn closest_on_triangle(
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> (Vector3<f64>, Vec<usize>) {
    // Ericson's closest-point-on-triangle with p = origin.
    let ab = b - a;
    let ac = c - a;
    let ap = -a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (*a, vec![0]);
    }

    let bp = -b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (*b, vec![1]);
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (a + ab * v, vec![0, 1]);
    }

    let cp = -c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (*c, vec![2]);
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (a + ac * w, vec![0, 2]);
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * w, vec![1, 2]);
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, vec![0, 1, 2])
}

fn origin_in_tetrahedron(pts: &[Vector3<f64>]) -> bool {
    // A degenerate (near-coplanar) tetrahedron encloses no volume; fall back
    // to the face-distance path for those.
    let same_side = |a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, d: &Vector3<f64>| {
        let n = (b - a).cross(&(c - a));
        let sd = n.dot(&(d - a));
        if sd.abs() <= 1e-12 {
            return false;
        }
        let so = n.dot(&(-a));
        sd * so >= 0.0
    };
    same_side(&pts[0], &pts[1], &pts[2], &pts[3])
        && same_side(&pts[1], &pts[2], &pts[3], &pts[0])
        && same_side(&pts[2], &pts[3], &pts[0], &pts[1])
        && same_side(&pts[3], &pts[0], &pts[1], &pts[2])
}

/// Closest point to the origin on the current simplex; reduces the simplex to
/// the supporting sub-simplex in place.
fn closest_on_simplex(pts: &mut Vec<Vector3<f64>>) -> Vector3<f64> {
    match pts.len() {
        1 => pts[0],
        2 => {
            let (p, keep) = closest_on_segment(&pts[0], &pts[1]);
            *pts = keep.iter().map(|&i| pts[i]).collect();
            p
        }
        3 => {
            let (p, keep) = closest_on_triangle(&pts[0], &pts[1], &pts[2]);
            *pts = keep.iter().map(|&i| pts[i]).collect();
            p
        }
        4 => {
            if origin_in_tetrahedron(pts) {
                return Vector3::zeros();
            }
            let faces = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
            let mut best: Option<(f64, Vector3<f64>, Vec<usize>)> = None;
            for face in faces {
                let (p, keep) = closest_on_triangle(&pts[face[0]], &pts[face[1]], &pts[face[2]]);
                let d = p.norm_squared();
                if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
                    best = Some((d, p, keep.iter().map(|&k| face[k]).collect()));
                }
            }
            let (_, p, keep) = best.unwrap();
            *pts = keep.iter().map(|&i| pts[i]).collect();
            p
        }
        _ => unreachable!("simplex size is 1..=4"),
    }
}

/// GJK intersection test on the Minkowski difference with a distance-style
/// termination: converges when the support gap falls below tolerance.
/// Sphere and capsule pairs short-circuit through closed-form distances.
pub fn gjk_intersect(a: &ConvexShape, b: &ConvexShape) -> bool {
    use ConvexShape::*;
    match (a, b) {
        (Sphere { center: c1, radius: r1 }, Sphere { center: c2, radius: r2 }) => {
            (c1 - c2).norm() <= r1 + r2 + TANGENCY_EPS
        }
        (Sphere { center, radius: r1 }, Capsule { a, b, radius: r2 })
        | (Capsule { a, b, radius: r2 }, Sphere { center, radius: r1 }) => {
            point_segment_distance(center, a, b) <= r1 + r2 + TANGENCY_EPS
        }
        (
            Capsule { a: p1, b: q1, radius: r1 },
            Capsule { a: p2, b: q2, radius: r2 },
        ) => segment_segment_distance(p1, q1, p2, q2) <= r1 + r2 + TANGENCY_EPS,
        _ => gjk_intersect_general(a, b),
    }
}

impl ConvexShape {
    /// Support of the sharp core: the shape with its sweep radius stripped
    /// (sphere -> point, capsule -> segment). Keeps GJK on polytopes, where
    /// the distance iteration converges in finitely many steps.
    fn core_support(&self, dir: &Vector3<f64>) -> Vector3<f64> {
        match self {
            ConvexShape::Sphere { center, .. } => *center,
            ConvexShape::Capsule { a, b, .. } => {
                if a.dot(dir) >= b.dot(dir) {
                    *a
                } else {
                    *b
                }
            }
            _ => self.support(dir),
        }
    }

    fn sweep_radius(&self) -> f64 {
        match self {
            ConvexShape::Sphere { radius, .. } | ConvexShape::Capsule { radius, .. } => *radius,
            _ => 0.0,
        }
    }
}

fn gjk_intersect_general(a: &ConvexShape, b: &ConvexShape) -> bool {
    let r_sum = a.sweep_radius() + b.sweep_radius();
    let minkowski_support = |dir: &Vector3<f64>| a.core_support(dir) - b.core_support(&-dir);

    let mut dir = a.centroid() - b.centroid();
    if dir.norm_squared() == 0.0 {
        dir = Vector3::x();
    }
    let mut simplex = vec![minkowski_support(&dir)];

    for _ in 0..GJK_MAX_ITERS {
        let v = closest_on_simplex(&mut simplex);
        let v_len = v.norm();
        if v_len <= r_sum + TANGENCY_EPS {
            return true;
        }
        let d = -v / v_len;
        let s = minkowski_support(&d);
        // Supporting hyperplane at s bounds the core distance from below.
        if -s.dot(&d) > r_sum + TANGENCY_EPS {
            return false;
        }
        // Upper bound on the core distance is |v|; when the support gap
        // closes, the distance is pinned at |v| > r_sum, so no intersection.
        let gap = v_len + s.dot(&d);
        if gap < GJK_SUPPORT_GAP_TOL {
            return false;
        }
        simplex.push(s);
    }
    GJK_CAP_HITS.fetch_add(1, Ordering::Relaxed);
    true
}

// ---------------------------------------------------------------------------
// Robot capsules and collision labeling
// ---------------------------------------------------------------------------

/// World-frame link capsules for a configuration.
pub fn robot_capsules(
    robot: &RobotModel,
    config: &Configuration,
) -> Result<Vec<ConvexShape>, GeometryError> {
    let poses = robot.joint_poses(config)?;
    let mut out = Vec::with_capacity(robot.link_capsules.len());
    // Capsules map onto links in order; robots with fewer capsules than links
    // pair each capsule with the link of the same index among extent links.
    let extent_links: Vec<usize> = if robot.link_capsules.len() == robot.links.len() {
        (0..robot.links.len()).collect()
    } else {
        (0..robot.links.len())
            .filter(|&i| robot.links[i].d != 0.0 || robot.links[i].a != 0.0)
            .collect()
    };
    for (cap, &link_idx) in robot.link_capsules.iter().zip(&extent_links) {
        let pose = &poses[link_idx];
        out.push(ConvexShape::Capsule {
            a: pose.transform_point(&cap.a),
            b: pose.transform_point(&cap.b),
            radius: cap.radius,
        });
    }
    Ok(out)
}

/// Ground-truth collision label: +1 if any link capsule intersects any
/// obstacle, -1 otherwise. Self-collision is not checked.
pub fn in_collision(
    robot: &RobotModel,
    config: &Configuration,
    scene: &Scene,
) -> Result<f64, GeometryError> {
    let capsules = robot_capsules(robot, config)?;
    for cap in &capsules {
        for obs in &scene.obstacles {
            if gjk_intersect(cap, obs) {
                return Ok(C_OBS);
            }
        }
    }
    Ok(C_FREE)
}

// ---------------------------------------------------------------------------
// Scenes and obstacle motion
// ---------------------------------------------------------------------------

/// Workspace axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn clamp_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }
}

/// Obstacles plus workspace bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub obstacles: Vec<ConvexShape>,
    pub bounds: Aabb,
    /// Obstacle motion parameters for moving-obstacle benchmarks.
    #[serde(default)]
    pub motion: Option<MotionSpec>,
}

/// Random-walk motion parameters stored with a scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    pub steps: usize,
    pub step_range: (f64, f64),
}

/// Concrete per-step displacement vectors, generated from a seed.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionScript {
    pub steps: Vec<Vector3<f64>>,
}

impl MotionScript {
    /// Unit random direction scaled by a step size drawn from `step_range`.
    pub fn generate(spec: &MotionSpec, seed: u64) -> MotionScript {
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let steps = (0..spec.steps)
            .map(|_| {
                let dir: [f64; 3] = UnitSphere.sample(&mut rng);
                let size = rng.random_range(spec.step_range.0..=spec.step_range.1);
                Vector3::new(dir[0], dir[1], dir[2]) * size
            })
            .collect();
        MotionScript { steps }
    }
}

impl Scene {
    /// Displace every obstacle, clamping centroids into bounds.
    pub fn apply_step(&mut self, delta: &Vector3<f64>) {
        for obs in &mut self.obstacles {
            let c = obs.centroid();
            let clamped = self.bounds.clamp_point(&(c + delta));
            let actual = clamped - c;
            obs.translate(&actual);
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for obs in &self.obstacles {
            obs.validate()?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Grid ground truth
// ---------------------------------------------------------------------------

/// Collision labels over a regular grid of joint values, for low-DOF audits
/// and images.
#[derive(Debug, Clone)]
pub struct LabelGrid {
    /// Grid vertices per joint.
    pub resolution: Vec<usize>,
    pub joint_limits: Vec<(f64, f64)>,
    /// Row-major over joints, last joint fastest.
    pub labels: Vec<f64>,
}

impl LabelGrid {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn config_at(&self, indices: &[usize]) -> Configuration {
        Configuration(
            indices
                .iter()
                .zip(&self.joint_limits)
                .zip(&self.resolution)
                .map(|((&i, &(lo, hi)), &r)| {
                    if r == 1 {
                        0.5 * (lo + hi)
                    } else {
                        lo + (hi - lo) * i as f64 / (r - 1) as f64
                    }
                })
                .collect(),
        )
    }

    pub fn flat_index(&self, indices: &[usize]) -> usize {
        let mut idx = 0;
        for (&i, &r) in indices.iter().zip(&self.resolution) {
            idx = idx * r + i;
        }
        idx
    }

    /// Iterate all grid vertex index tuples in flat order.
    pub fn iter_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let dims = self.resolution.clone();
        let total: usize = dims.iter().product();
        (0..total).map(move |mut flat| {
            let mut idx = vec![0; dims.len()];
            for d in (0..dims.len()).rev() {
                idx[d] = flat % dims[d];
                flat /= dims[d];
            }
            idx
        })
    }

    /// Fraction of grid vertices labeled in-collision.
    pub fn obstacle_fraction(&self) -> f64 {
        let hits = self.labels.iter().filter(|&&l| l == C_OBS).count();
        hits as f64 / self.labels.len() as f64
    }
}

/// Evaluate the oracle at every vertex of a per-joint grid. Only supported
/// for robots with at most 3 DOF.
pub fn grid_ground_truth(
    robot: &RobotModel,
    scene: &Scene,
    resolution: &[usize],
) -> Result<LabelGrid, GeometryError> {
    if robot.dof() > 3 {
        return Err(GeometryError::UnsupportedDof(robot.dof()));
    }
    assert_eq!(resolution.len(), robot.dof(), "one resolution per joint");
    let mut grid = LabelGrid {
        resolution: resolution.to_vec(),
        joint_limits: robot.joint_limits.clone(),
        labels: Vec::new(),
    };
    let total: usize = resolution.iter().product();
    let mut labels = Vec::with_capacity(total);
    for idx in grid.iter_indices() {
        let q = grid.config_at(&idx);
        labels.push(in_collision(robot, &q, scene)?);
    }
    grid.labels = labels;
    Ok(grid)
}

// ---------------------------------------------------------------------------
// Scene files
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct SceneFile {
    bounds: BoundsFile,
    #[serde(rename = "obstacle", default)]
    obstacles: Vec<ObstacleFile>,
    #[serde(default)]
    motion: Option<MotionFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BoundsFile {
    min: [f64; 3],
    max: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
struct ObstacleFile {
    kind: String,
    #[serde(default)]
    center: Option<[f64; 3]>,
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default)]
    half_extents: Option<[f64; 3]>,
    #[serde(default)]
    a: Option<[f64; 3]>,
    #[serde(default)]
    b: Option<[f64; 3]>,
    #[serde(default)]
    vertices: Option<Vec<[f64; 3]>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MotionFile {
    steps: usize,
    step_range: [f64; 2],
}

pub fn load_scene(path: &Path) -> Result<Scene, GeometryError> {
    parse_scene(&std::fs::read_to_string(path)?)
}

pub fn parse_scene(text: &str) -> Result<Scene, GeometryError> {
    let file: SceneFile = toml::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
    let need = |o: &Option<[f64; 3]>, what: &str| -> Result<Vector3<f64>, GeometryError> {
        o.map(Vector3::from)
            .ok_or_else(|| GeometryError::Parse(format!("obstacle missing `{what}`")))
    };
    let mut obstacles = Vec::new();
    for obs in &file.obstacles {
        let shape = match obs.kind.as_str() {
            "sphere" => ConvexShape::Sphere {
                center: need(&obs.center, "center")?,
                radius: obs
                    .radius
                    .ok_or_else(|| GeometryError::Parse("sphere missing `radius`".into()))?,
            },
            "box" => ConvexShape::Box {
                center: need(&obs.center, "center")?,
                half_extents: need(&obs.half_extents, "half_extents")?,
                rotation: Matrix3::identity(),
            },
            "capsule" => ConvexShape::Capsule {
                a: need(&obs.a, "a")?,
                b: need(&obs.b, "b")?,
                radius: obs
                    .radius
                    .ok_or_else(|| GeometryError::Parse("capsule missing `radius`".into()))?,
            },
            "hull" => ConvexShape::Hull {
                vertices: obs
                    .vertices
                    .as_ref()
                    .ok_or_else(|| GeometryError::Parse("hull missing `vertices`".into()))?
                    .iter()
                    .map(|&v| Vector3::from(v))
                    .collect(),
            },
            other => {
                return Err(GeometryError::Parse(format!("unknown obstacle kind `{other}`")))
            }
        };
        shape.validate()?;
        obstacles.push(shape);
    }
    Ok(Scene {
        obstacles,
        bounds: Aabb { min: Vector3::from(file.bounds.min), max: Vector3::from(file.bounds.max) },
        motion: file.motion.map(|m| MotionSpec {
            steps: m.steps,
            step_range: (m.step_range[0], m.step_range[1]),
        }),
    })
}
