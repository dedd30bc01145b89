//! Denavit-Hartenberg forward kinematics for serial chains.
//!
//! Standard D-H convention only: the frame of joint `i` sits at the distal
//! end of link `i`, and the link transform is built from (theta, d, a, alpha).
//! All operations here are pure functions of immutable inputs.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("joint index {index} out of range for {dof}-DOF robot")]
    JointIndexOutOfRange { index: usize, dof: usize },
    #[error("configuration has {got} joints, robot has {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("invalid robot model: {0}")]
    InvalidModel(String),
    #[error("failed to read robot file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse robot file: {0}")]
    Parse(String),
}

/// Whether theta or d is the joint variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKind {
    Revolute,
    Prismatic,
}

/// D-H parameters of one link. The field matching the joint variable slot
/// (`theta_offset` for revolute, `d` for prismatic) is a constant offset
/// added to the joint value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhParams {
    pub joint_kind: JointKind,
    pub theta_offset: f64,
    pub d: f64,
    pub a: f64,
    pub alpha: f64,
}

impl DhParams {
    pub fn revolute(theta_offset: f64, d: f64, a: f64, alpha: f64) -> Self {
        Self { joint_kind: JointKind::Revolute, theta_offset, d, a, alpha }
    }

    pub fn prismatic(theta_offset: f64, d_offset: f64, a: f64, alpha: f64) -> Self {
        Self { joint_kind: JointKind::Prismatic, theta_offset, d: d_offset, a, alpha }
    }
}

/// Rigid transform: 3x3 rotation plus translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl HomTransform {
    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Self { rotation: Matrix3::identity(), translation: t }
    }

    /// Composition `self * other` (apply `other` first in the local frame).
    pub fn compose(&self, other: &HomTransform) -> HomTransform {
        HomTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn inverse(&self) -> HomTransform {
        let rt = self.rotation.transpose();
        HomTransform { rotation: rt, translation: -(rt * self.translation) }
    }

    /// Max deviation of `R^T R` from the identity plus `|det - 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let e = self.rotation.transpose() * self.rotation - Matrix3::identity();
        let det_err = (self.rotation.determinant() - 1.0).abs();
        e.amax().max(det_err)
    }
}

/// A fixed point on the chain: static transform `T` appended to the pose of
/// joint `joint_index`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPointSpec {
    pub joint_index: usize,
    pub static_transform: HomTransform,
}

impl ControlPointSpec {
    pub fn at_joint_origin(joint_index: usize) -> Self {
        Self { joint_index, static_transform: HomTransform::identity() }
    }
}

/// Link collision capsule: two endpoints in the link's own frame plus radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapsuleSpec {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub radius: f64,
}

/// A joint-space point: one value per joint (radians for revolute joints,
/// length units for prismatic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration(pub Vec<f64>);

impl Configuration {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean joint-space distance.
    pub fn distance(&self, other: &Configuration) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for Configuration {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A serial manipulator: base pose, D-H links, joint limits, control points
/// for the FK kernel, and per-link collision capsules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub name: String,
    pub base: HomTransform,
    pub links: Vec<DhParams>,
    /// Closed [lo, hi] per joint.
    pub joint_limits: Vec<(f64, f64)>,
    pub control_points: Vec<ControlPointSpec>,
    pub link_capsules: Vec<CapsuleSpec>,
}

/// Eq. of the standard D-H link transform.
pub fn dh_transform(params: &DhParams, joint_value: f64) -> Result<HomTransform, KinematicsError> {
    if !joint_value.is_finite() {
        return Err(KinematicsError::NonFinite("joint_value"));
    }
    let (theta, d) = match params.joint_kind {
        JointKind::Revolute => (joint_value + params.theta_offset, params.d),
        JointKind::Prismatic => (params.theta_offset, joint_value + params.d),
    };
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = params.alpha.sin_cos();
    let a = params.a;
    let rotation = Matrix3::new(
        ct, -ca * st, sa * st, //
        st, ca * ct, -sa * ct, //
        0.0, sa, ca,
    );
    let translation = Vector3::new(a * ct, a * st, d);
    Ok(HomTransform { rotation, translation })
}

impl RobotModel {
    pub fn dof(&self) -> usize {
        self.links.len()
    }

    /// Largest possible distance from base to any control point, used for
    /// scale-dependent kernel width defaults.
    pub fn reach(&self) -> f64 {
        self.links
            .iter()
            .map(|l| (l.a * l.a + l.d * l.d).sqrt())
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        if self.links.is_empty() {
            return Err(KinematicsError::InvalidModel("no links".into()));
        }
        if self.joint_limits.len() != self.links.len() {
            return Err(KinematicsError::InvalidModel(format!(
                "{} joint limits for {} links",
                self.joint_limits.len(),
                self.links.len()
            )));
        }
        for (i, &(lo, hi)) in self.joint_limits.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(KinematicsError::InvalidModel(format!(
                    "joint {i} limits [{lo}, {hi}] invalid"
                )));
            }
        }
        if self.control_points.is_empty() {
            return Err(KinematicsError::InvalidModel("no control points".into()));
        }
        for cp in &self.control_points {
            if cp.joint_index >= self.links.len() {
                return Err(KinematicsError::JointIndexOutOfRange {
                    index: cp.joint_index,
                    dof: self.links.len(),
                }
                .into_invalid());
            }
        }
        for cap in &self.link_capsules {
            if cap.radius <= 0.0 {
                return Err(KinematicsError::InvalidModel("capsule radius <= 0".into()));
            }
        }
        Ok(())
    }

    fn check_config(&self, config: &Configuration) -> Result<(), KinematicsError> {
        if config.dim() != self.dof() {
            return Err(KinematicsError::DimensionMismatch {
                got: config.dim(),
                expected: self.dof(),
            });
        }
        Ok(())
    }

    /// World poses of every joint frame, base-to-tip in one pass.
    pub fn joint_poses(&self, config: &Configuration) -> Result<Vec<HomTransform>, KinematicsError> {
        self.check_config(config)?;
        let mut poses = Vec::with_capacity(self.dof());
        let mut acc = self.base;
        for (link, &q) in self.links.iter().zip(&config.0) {
            acc = acc.compose(&dh_transform(link, q)?);
            poses.push(acc);
        }
        Ok(poses)
    }

    /// World pose of one joint frame: `wA0 * 0A1 * ... * (i-1)Ai`.
    pub fn joint_pose(
        &self,
        config: &Configuration,
        joint_index: usize,
    ) -> Result<HomTransform, KinematicsError> {
        if joint_index >= self.dof() {
            return Err(KinematicsError::JointIndexOutOfRange {
                index: joint_index,
                dof: self.dof(),
            });
        }
        Ok(self.joint_poses(config)?[joint_index])
    }

    /// World positions of the control points, in spec order.
    pub fn control_point_positions(
        &self,
        config: &Configuration,
    ) -> Result<Vec<Vector3<f64>>, KinematicsError> {
        let poses = self.joint_poses(config)?;
        Ok(self
            .control_points
            .iter()
            .map(|cp| {
                poses[cp.joint_index]
                    .compose(&cp.static_transform)
                    .translation
            })
            .collect())
    }

    /// Uniform sample within joint limits.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Configuration {
        Configuration(
            self.joint_limits
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect(),
        )
    }

    pub fn clamp_to_limits(&self, config: &mut Configuration) {
        for (q, &(lo, hi)) in config.0.iter_mut().zip(&self.joint_limits) {
            *q = q.clamp(lo, hi);
        }
    }

    /// Joint-range diagonal, the norm of the vector of per-joint ranges.
    pub fn joint_range_diagonal(&self) -> f64 {
        self.joint_limits
            .iter()
            .map(|&(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }
}

impl KinematicsError {
    fn into_invalid(self) -> KinematicsError {
        KinematicsError::InvalidModel(self.to_string())
    }
}

/// Default control-point placement: one point at each joint-frame origin,
/// skipping revolute joints whose origin coincides with the previous one
/// (d = 0 and a = 0).
pub fn auto_control_points(links: &[DhParams]) -> Vec<ControlPointSpec> {
    links
        .iter()
        .enumerate()
        .filter(|(_, l)| {
            !(l.joint_kind == JointKind::Revolute && l.d == 0.0 && l.a == 0.0)
        })
        .map(|(i, _)| ControlPointSpec::at_joint_origin(i))
        .collect()
}

/// Capsule spanning a link, expressed in the link's own frame: from the
/// previous joint origin to this one. For a revolute joint the previous
/// origin lies on the joint axis, so its link-frame position does not depend
/// on the joint value.
pub fn link_span_capsule(params: &DhParams, radius: f64) -> CapsuleSpec {
    let t = dh_transform(params, 0.0).expect("finite D-H constants");
    let prev_origin_in_link = t.inverse().translation;
    CapsuleSpec { a: prev_origin_in_link, b: Vector3::zeros(), radius }
}

// ---------------------------------------------------------------------------
// Robot file format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct RobotFile {
    name: String,
    #[serde(default)]
    base: Option<BaseFile>,
    #[serde(rename = "link")]
    links: Vec<LinkFile>,
    #[serde(rename = "control_point", default)]
    control_points: Vec<ControlPointFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BaseFile {
    #[serde(default)]
    rotation: Option<[[f64; 3]; 3]>,
    #[serde(default)]
    translation: Option<[f64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LinkFile {
    joint_kind: JointKind,
    #[serde(default)]
    theta_offset: f64,
    #[serde(default)]
    d: f64,
    #[serde(default)]
    a: f64,
    #[serde(default)]
    alpha: f64,
    limits: [f64; 2],
    #[serde(default)]
    capsule: Option<CapsuleFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CapsuleFile {
    /// Endpoints in the link frame; when omitted the capsule spans the link.
    #[serde(default)]
    a: Option<[f64; 3]>,
    #[serde(default)]
    b: Option<[f64; 3]>,
    radius: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ControlPointFile {
    joint: usize,
    #[serde(default)]
    translation: Option<[f64; 3]>,
}

/// Load a robot definition from a TOML file. See `scenarios/` for the field
/// names; missing control points fall back to [`auto_control_points`].
pub fn load_robot(path: &Path) -> Result<RobotModel, KinematicsError> {
    let text = std::fs::read_to_string(path)?;
    parse_robot(&text)
}

pub fn parse_robot(text: &str) -> Result<RobotModel, KinematicsError> {
    let file: RobotFile = toml::from_str(text).map_err(|e| KinematicsError::Parse(e.to_string()))?;

    let base = match file.base {
        None => HomTransform::identity(),
        Some(b) => {
            let rotation = match b.rotation {
                None => Matrix3::identity(),
                Some(rows) => Matrix3::new(
                    rows[0][0], rows[0][1], rows[0][2], //
                    rows[1][0], rows[1][1], rows[1][2], //
                    rows[2][0], rows[2][1], rows[2][2],
                ),
            };
            let translation = b
                .translation
                .map(Vector3::from)
                .unwrap_or_else(Vector3::zeros);
            HomTransform { rotation, translation }
        }
    };

    let mut links = Vec::new();
    let mut joint_limits = Vec::new();
    let mut link_capsules = Vec::new();
    for lf in &file.links {
        let dh = DhParams {
            joint_kind: lf.joint_kind,
            theta_offset: lf.theta_offset,
            d: lf.d,
            a: lf.a,
            alpha: lf.alpha,
        };
        if let Some(cap) = &lf.capsule {
            let span = link_span_capsule(&dh, cap.radius);
            link_capsules.push(CapsuleSpec {
                a: cap.a.map(Vector3::from).unwrap_or(span.a),
                b: cap.b.map(Vector3::from).unwrap_or(span.b),
                radius: cap.radius,
            });
        }
        links.push(dh);
        joint_limits.push((lf.limits[0], lf.limits[1]));
    }

    let control_points = if file.control_points.is_empty() {
        auto_control_points(&links)
    } else {
        file.control_points
            .iter()
            .map(|cp| ControlPointSpec {
                joint_index: cp.joint,
                static_transform: HomTransform::from_translation(
                    cp.translation.map(Vector3::from).unwrap_or_else(Vector3::zeros),
                ),
            })
            .collect()
    };

    let robot = RobotModel {
        name: file.name,
        base,
        links,
        joint_limits,
        control_points,
        link_capsules,
    };
    robot.validate()?;
    Ok(robot)
}

// ---------------------------------------------------------------------------
// Desk-scale robots used by tests and shipped scenarios
// ---------------------------------------------------------------------------

impl RobotModel {
    /// Two-link planar arm, unit link lengths, joints about z.
    pub fn planar_2dof() -> RobotModel {
        let links = vec![
            DhParams::revolute(0.0, 0.0, 1.0, 0.0),
            DhParams::revolute(0.0, 0.0, 1.0, 0.0),
        ];
        let link_capsules = links.iter().map(|l| link_span_capsule(l, 0.08)).collect();
        let control_points = auto_control_points(&links);
        RobotModel {
            name: "planar-2dof".into(),
            base: HomTransform::identity(),
            joint_limits: vec![
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
            ],
            links,
            control_points,
            link_capsules,
        }
    }

    /// Articulated 3-DOF arm: shoulder yaw on a vertical offset, then two
    /// in-plane links.
    pub fn arm_3dof() -> RobotModel {
        use std::f64::consts::{FRAC_PI_2, PI};
        let links = vec![
            DhParams::revolute(0.0, 0.5, 0.0, FRAC_PI_2),
            DhParams::revolute(0.0, 0.0, 1.0, 0.0),
            DhParams::revolute(0.0, 0.0, 0.8, 0.0),
        ];
        let link_capsules = links.iter().map(|l| link_span_capsule(l, 0.08)).collect();
        let control_points = auto_control_points(&links);
        RobotModel {
            name: "arm-3dof".into(),
            base: HomTransform::identity(),
            joint_limits: vec![(-PI, PI), (-FRAC_PI_2, FRAC_PI_2), (-2.5, 2.5)],
            links,
            control_points,
            link_capsules,
        }
    }

    /// 7-DOF S-R-S arm with all-zero `a` and coincident origins at the even
    /// joints, so the control-point skip rule leaves M = 4.
    pub fn arm_7dof() -> RobotModel {
        use std::f64::consts::{FRAC_PI_2, PI};
        let links = vec![
            DhParams::revolute(0.0, 0.34, 0.0, -FRAC_PI_2),
            DhParams::revolute(0.0, 0.0, 0.0, FRAC_PI_2),
            DhParams::revolute(0.0, 0.4, 0.0, FRAC_PI_2),
            DhParams::revolute(0.0, 0.0, 0.0, -FRAC_PI_2),
            DhParams::revolute(0.0, 0.4, 0.0, -FRAC_PI_2),
            DhParams::revolute(0.0, 0.0, 0.0, FRAC_PI_2),
            DhParams::revolute(0.0, 0.126, 0.0, 0.0),
        ];
        // Capsules only on the links with extent.
        let link_capsules = links
            .iter()
            .filter(|l| l.d != 0.0 || l.a != 0.0)
            .map(|l| link_span_capsule(l, 0.07))
            .collect::<Vec<_>>();
        let control_points = auto_control_points(&links);
        let lim = |v: f64| (-v, v);
        RobotModel {
            name: "arm-7dof".into(),
            base: HomTransform::identity(),
            joint_limits: vec![
                lim(PI),
                lim(2.0),
                lim(PI),
                lim(2.0),
                lim(PI),
                lim(2.0),
                lim(PI),
            ],
            links,
            control_points,
            link_capsules,
        }
    }
}

/// Independent reference path used only by tests and the acceptance suite:
/// forward kinematics via explicit numeric 4x4 matrix products, sharing no
/// code with [`HomTransform`] composition.
#[doc(hidden)]
pub mod tests_support {
    use super::{Configuration, JointKind, RobotModel};

    type Mat4 = [[f64; 4]; 4];

    fn mat4_identity() -> Mat4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        m
    }

    fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..4).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        out
    }

    fn dh_mat4(kind: JointKind, theta_offset: f64, d0: f64, a: f64, alpha: f64, q: f64) -> Mat4 {
        let (theta, d) = match kind {
            JointKind::Revolute => (q + theta_offset, d0),
            JointKind::Prismatic => (theta_offset, q + d0),
        };
        let (st, ct) = (theta.sin(), theta.cos());
        let (sa, ca) = (alpha.sin(), alpha.cos());
        [
            [ct, -ca * st, sa * st, a * ct],
            [st, ca * ct, -sa * ct, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    }

    /// World pose matrices of every joint, built step-by-step with raw 4x4
    /// products.
    pub fn pose_matrices_oracle(robot: &RobotModel, q: &Configuration) -> Vec<Mat4> {
        let mut base = mat4_identity();
        for r in 0..3 {
            for c in 0..3 {
                base[r][c] = robot.base.rotation[(r, c)];
            }
            base[r][3] = robot.base.translation[r];
        }
        let mut acc = base;
        let mut out = Vec::with_capacity(robot.dof());
        for (link, &qi) in robot.links.iter().zip(&q.0) {
            let step = dh_mat4(
                link.joint_kind,
                link.theta_offset,
                link.d,
                link.a,
                link.alpha,
                qi,
            );
            acc = mat4_mul(&acc, &step);
            out.push(acc);
        }
        out
    }

    /// Control-point positions through the oracle pose matrices.
    pub fn control_points_oracle(robot: &RobotModel, q: &Configuration) -> Vec<[f64; 3]> {
        let mats = pose_matrices_oracle(robot, q);
        robot
            .control_points
            .iter()
            .map(|spec| {
                let m = &mats[spec.joint_index];
                let t = spec.static_transform.translation;
                let mut out = [0.0; 3];
                for (row, cell) in out.iter_mut().enumerate() {
                    *cell = m[row][0] * t[0] + m[row][1] * t[1] + m[row][2] * t[2] + m[row][3];
                }
                out
            })
            .collect()
    }
}
