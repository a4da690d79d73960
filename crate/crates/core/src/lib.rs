//! Kinematic synthesis of an underactuated linkage exoskeleton for the index
//! finger: loop closure, reduced Jacobian, joint torques, length sensitivity,
//! exhaustive design search and a quasi-static grasp simulation.
//!
//! Start from [`config::reference_geometry`] and [`solver::solve_pose`], or run
//! the programs under `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod config;
pub mod diffkin;
pub mod error;
pub mod geometry;
pub mod grasp;
pub mod loops;
pub mod optimizer;
pub mod report;
pub mod sensitivity;
pub mod solver;
pub mod statics;

pub use error::{Error, Result};
