//! Two-circle vehicle approximation and pairwise distance validation.

use super::{ocp::VehicleTrajectory, VehicleState};
use crate::math::Vec2;
use serde::{Deserialize, Serialize};

/// Centers of the front and rear coverage circles for a state.
pub fn front_rear_circles(state: &VehicleState, d_f: f64, d_r: f64) -> (Vec2, Vec2) {
    let dir = Vec2::from_angle(state.theta);
    let base = Vec2::new(state.x, state.y);
    (base + dir * d_f, base + dir * d_r)
}

/// Minimum circle-pair distance for one vehicle pair at one step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollisionRow {
    pub step: usize,
    pub vehicle_a: usize,
    pub vehicle_b: usize,
    pub circle_a: char,
    pub circle_b: char,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollisionReport {
    pub min_distance: f64,
    pub first_violation: Option<CollisionRow>,
    /// Per shared step and vehicle pair, the closest circle pair.
    pub rows: Vec<CollisionRow>,
    pub d_safe: f64,
}

impl CollisionReport {
    pub fn clean(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Scans every vehicle pair over their shared steps and reports the
/// closest circle pair per step, the global minimum, and the first
/// violation of the safety distance if any.
pub fn validate_collisions(
    trajectories: &[VehicleTrajectory],
    d_safe: f64,
    d_f: f64,
    d_r: f64,
) -> CollisionReport {
    let mut rows = Vec::new();
    let mut min_distance = f64::INFINITY;
    let mut first_violation: Option<CollisionRow> = None;
    for a in 0..trajectories.len() {
        for b in (a + 1)..trajectories.len() {
            let shared = trajectories[a].states.len().min(trajectories[b].states.len());
            for step in 0..shared {
                let (fa, ra) = front_rear_circles(&trajectories[a].states[step], d_f, d_r);
                let (fb, rb) = front_rear_circles(&trajectories[b].states[step], d_f, d_r);
                let candidates = [
                    ('f', 'f', fa.distance(fb)),
                    ('f', 'r', fa.distance(rb)),
                    ('r', 'f', ra.distance(fb)),
                    ('r', 'r', ra.distance(rb)),
                ];
                let &(ca, cb, dist) = candidates
                    .iter()
                    .min_by(|x, y| x.2.total_cmp(&y.2))
                    .unwrap();
                let row = CollisionRow {
                    step,
                    vehicle_a: trajectories[a].vehicle,
                    vehicle_b: trajectories[b].vehicle,
                    circle_a: ca,
                    circle_b: cb,
                    distance: dist,
                };
                if dist < min_distance {
                    min_distance = dist;
                }
                if dist < d_safe && first_violation.is_none() {
                    first_violation = Some(row.clone());
                }
                rows.push(row);
            }
        }
    }
    CollisionReport {
        min_distance,
        first_violation,
        rows,
        d_safe,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const D_F: f64 = 2.279;
    const D_R: f64 = 0.126;

    fn traj(vehicle: usize, states: Vec<VehicleState>) -> VehicleTrajectory {
        VehicleTrajectory {
            vehicle,
            states,
            controls: Vec::new(),
            tracking_cost: Vec::new(),
        }
    }

    #[test]
    fn circles_at_table_offsets() {
        let s = VehicleState {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            v: 0.0,
        };
        let (f, r) = front_rear_circles(&s, D_F, D_R);
        assert_relative_eq!(f.x, 2.279);
        assert_relative_eq!(f.y, 0.0);
        assert_relative_eq!(r.x, 0.126);
    }

    #[test]
    fn circles_rotate_with_heading() {
        let s = VehicleState {
            x: 0.0,
            y: 0.0,
            theta: std::f64::consts::FRAC_PI_2,
            v: 0.0,
        };
        let (f, r) = front_rear_circles(&s, D_F, D_R);
        assert_relative_eq!(f.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(f.y, 2.279);
        assert_relative_eq!(r.y, 0.126);
    }

    #[test]
    fn single_vehicle_is_vacuously_clean() {
        let report = validate_collisions(
            &[traj(
                0,
                vec![VehicleState {
                    x: 0.0,
                    y: 0.0,
                    theta: 0.0,
                    v: 0.0,
                }],
            )],
            2.366,
            D_F,
            D_R,
        );
        assert!(report.clean());
        assert!(report.rows.is_empty());
    }

    #[test]
    fn parallel_lanes_stay_clean() {
        let mk = |y: f64| {
            (0..20)
                .map(|k| VehicleState {
                    x: k as f64,
                    y,
                    theta: 0.0,
                    v: 10.0,
                })
                .collect::<Vec<_>>()
        };
        let report = validate_collisions(
            &[traj(0, mk(0.0)), traj(1, mk(3.75))],
            2.366,
            D_F,
            D_R,
        );
        assert!(report.clean());
        assert_relative_eq!(report.min_distance, 3.75, epsilon = 1e-12);
    }

    #[test]
    fn head_on_violation_at_step_zero() {
        let a = VehicleState {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            v: 0.0,
        };
        let b = VehicleState {
            x: 5.0,
            y: 0.0,
            theta: std::f64::consts::PI,
            v: 0.0,
        };
        let report = validate_collisions(&[traj(0, vec![a]), traj(1, vec![b])], 2.366, D_F, D_R);
        assert!(!report.clean());
        let v = report.first_violation.unwrap();
        assert_eq!(v.step, 0);
        assert_relative_eq!(v.distance, 5.0 - 2.0 * 2.279, epsilon = 1e-12);
    }
}
