//! Trajectory refinement: per-step references from the decision stage and
//! a joint tracking optimal-control problem under bicycle kinematics with
//! two-circle collision keep-out.

mod collision;
mod kinematics;
mod ocp;
mod reference;

pub use collision::{front_rear_circles, validate_collisions, CollisionReport, CollisionRow};
pub use kinematics::{rolling_distance, step_jacobians, step_kinematics, BicycleParams};
pub use ocp::{solve_ocp, ControlLimits, OcpSettings, TrajectorySolution, VehicleTrajectory};
pub use reference::decision_to_reference;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rear-axle midpoint pose and longitudinal speed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
}

/// Steering angle and longitudinal acceleration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ControlInput {
    pub steer: f64,
    pub accel: f64,
}

/// Reference states on the fixed step grid, plus the plan they came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceTrajectory {
    pub vehicle: usize,
    pub states: Vec<VehicleState>,
    pub source_vertices: Vec<usize>,
    pub source_times: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("vehicle {vehicle}: plan timestamps are not strictly increasing")]
    NonmonotoneTimestamps { vehicle: usize },
    #[error("kinematic domain violation: |tau_s v sin(steer)| = {value} exceeds wheelbase {wheelbase}")]
    KinematicDomain { value: f64, wheelbase: f64 },
    #[error("vehicles {i} and {j} start {distance:.3} m apart, below the safety distance")]
    InfeasibleStart { i: usize, j: usize, distance: f64 },
    #[error(
        "optimizer stopped before convergence: projected gradient {grad_norm:.3e}, max violation {max_violation:.3e} m"
    )]
    NotConverged {
        solution: Box<TrajectorySolution>,
        grad_norm: f64,
        max_violation: f64,
    },
}
