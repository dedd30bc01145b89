//! Configuration-space modeling and proxy collision checking for serial
//! manipulators.
//!
//! The crate is organized around a kernel-perceptron proxy collision checker
//! driven by a forward-kinematics workspace kernel:
//!
//! - [`kinematics`]: D-H chains, joint poses, control-point positions
//! - [`kernels`]: rational-quadratic and FK kernels, lazy Gram columns
//! - [`fastron`]: the perceptron trainer, querying, active learning
//! - [`geometry`]: GJK-based geometric ground-truth collision oracle
//! - [`planners`]: RRT / RRT-Connect / RRT* plus verify-and-repair
//! - [`bench`]: benchmark runners, metrics, C-space image export, CLI config

pub mod bench;
pub mod fastron;
pub mod geometry;
pub mod kernels;
pub mod kinematics;
pub mod planners;

mod seeding;

pub use seeding::derive_seed;
