//! The shipped scenario files must stay in sync with the built-in robot
//! constructors and load cleanly.

use cspace::bench::ScenarioConfig;
use cspace::geometry::load_scene;
use cspace::kinematics::{load_robot, RobotModel};
use std::path::{Path, PathBuf};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

#[test]
fn robot_files_match_constructors() {
    let cases: [(&str, fn() -> RobotModel); 3] = [
        ("planar_2dof.toml", RobotModel::planar_2dof),
        ("arm_3dof.toml", RobotModel::arm_3dof),
        ("arm_7dof.toml", RobotModel::arm_7dof),
    ];
    for (file, ctor) in cases {
        let loaded = load_robot(&scenarios().join(file)).unwrap();
        assert_eq!(loaded, ctor(), "{file} drifted from the built-in model");
    }
}

#[test]
fn seven_dof_arm_has_four_control_points() {
    let robot = load_robot(&scenarios().join("arm_7dof.toml")).unwrap();
    assert_eq!(robot.dof(), 7);
    assert_eq!(robot.control_points.len(), 4);
}

#[test]
fn scene_files_load_and_validate() {
    for file in ["planar_hulls.toml", "hulls_3dof.toml", "spheres_7dof.toml", "empty_planar.toml"] {
        let scene = load_scene(&scenarios().join(file)).unwrap();
        scene.validate().unwrap();
        if file != "empty_planar.toml" {
            assert!(!scene.obstacles.is_empty(), "{file} should have obstacles");
        }
    }
}

#[test]
fn config_files_load() {
    for file in [
        "collision_3dof.toml",
        "collision_7dof.toml",
        "sweep_planar.toml",
        "planning_planar.toml",
        "cspace_planar.toml",
    ] {
        let cfg = ScenarioConfig::load(&scenarios().join(file)).unwrap();
        assert!(cfg.robot.exists() && cfg.scene.exists(), "{file} references missing files");
    }
}

#[test]
fn planning_endpoints_are_oracle_free() {
    let cfg = ScenarioConfig::load(&scenarios().join("planning_planar.toml")).unwrap();
    let robot = load_robot(&cfg.robot).unwrap();
    let scene = load_scene(&cfg.scene).unwrap();
    for q in [cfg.start.unwrap(), cfg.goal.unwrap()] {
        let label =
            cspace::geometry::in_collision(&robot, &cspace::kinematics::Configuration(q), &scene)
                .unwrap();
        assert_eq!(label, cspace::fastron::C_FREE);
    }
}
