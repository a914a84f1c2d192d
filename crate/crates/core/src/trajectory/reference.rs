//! Conversion of a decision into per-step reference trajectories: linear
//! interpolation of the vehicle center between plan vertices, shifted back
//! to the rear axle along the current segment.

use super::{ReferenceTrajectory, TrajectoryError, VehicleState};
use crate::decision::DecisionSolution;
use crate::graph::WaypointGraph;
use crate::math::Vec2;

/// Builds one reference per vehicle on the shared step grid. With `trim`
/// set, every horizon is cut to the shortest one so all references cover
/// the same window.
pub fn decision_to_reference(
    graph: &WaypointGraph,
    decision: &DecisionSolution,
    d_b: f64,
    tau_s: f64,
    trim: bool,
) -> Result<Vec<ReferenceTrajectory>, TrajectoryError> {
    let mut refs = Vec::with_capacity(decision.plans.len());
    for plan in &decision.plans {
        if plan.vertices.len() < 2 {
            return Err(TrajectoryError::NonmonotoneTimestamps {
                vehicle: plan.vehicle,
            });
        }
        for w in plan.vertices.windows(2) {
            if w[1].1 <= w[0].1 {
                return Err(TrajectoryError::NonmonotoneTimestamps {
                    vehicle: plan.vehicle,
                });
            }
        }
        let times: Vec<f64> = plan.vertices.iter().map(|&(_, t)| t).collect();
        let points: Vec<Vec2> = plan
            .vertices
            .iter()
            .map(|&(v, _)| graph.vertices[v].position)
            .collect();
        let t_first = times[0];
        let t_last = *times.last().unwrap();
        let horizon = (t_last / tau_s).floor() as usize;
        let mut states = Vec::with_capacity(horizon + 1);
        for step in 0..=horizon {
            let t = (step as f64 * tau_s).clamp(t_first, t_last);
            // bracketing segment; exact vertex hits use the segment that
            // starts there, except at the final vertex
            let mut k = match times.windows(2).position(|w| t >= w[0] && t <= w[1]) {
                Some(k) => k,
                None => times.len() - 2,
            };
            while k + 1 < times.len() - 1 && t >= times[k + 1] {
                k += 1;
            }
            let seg = points[k + 1] - points[k];
            let dir = seg.normalized();
            let dt = times[k + 1] - times[k];
            let frac = (t - times[k]) / dt;
            let center = points[k] + seg * frac;
            let rear = center - dir * d_b;
            states.push(VehicleState {
                x: rear.x,
                y: rear.y,
                theta: dir.angle(),
                v: seg.norm() / dt,
            });
        }
        refs.push(ReferenceTrajectory {
            vehicle: plan.vehicle,
            states,
            source_vertices: plan.vertices.iter().map(|&(v, _)| v).collect(),
            source_times: times,
        });
    }
    if trim {
        let shortest = refs.iter().map(|r| r.states.len()).min().unwrap_or(0);
        for r in &mut refs {
            r.states.truncate(shortest);
        }
    }
    Ok(refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::VehiclePlan;
    use approx::assert_relative_eq;

    const D_B: f64 = (2.279 + 0.126) / 2.0;

    fn line_graph() -> WaypointGraph {
        let mut g = WaypointGraph::new();
        g.add_vertex(Vec2::new(0.0, 0.0), None);
        g.add_vertex(Vec2::new(10.0, 0.0), None);
        g.add_vertex(Vec2::new(20.0, 0.0), None);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g
    }

    fn plan(vertices: Vec<(usize, f64)>, edges: Vec<usize>) -> DecisionSolution {
        DecisionSolution {
            plans: vec![VehiclePlan {
                vehicle: 0,
                vertices,
                edges,
            }],
            active_transitions: Vec::new(),
        }
    }

    #[test]
    fn midpoint_interpolation_with_rear_axle_offset() {
        let g = line_graph();
        let d = plan(vec![(0, 1.0), (1, 2.0)], vec![0]);
        let refs = decision_to_reference(&g, &d, D_B, 0.1, false).unwrap();
        // step 15 sits at t = 1.5: center (5, 0), rear axle 1.2025 m back
        let s = &refs[0].states[15];
        assert_relative_eq!(s.x, 5.0 - 1.2025, epsilon = 1e-12);
        assert_relative_eq!(s.y, 0.0);
        assert_relative_eq!(s.theta, 0.0);
        assert_relative_eq!(s.v, 10.0);
    }

    #[test]
    fn vertex_timestamp_hits_vertex_position() {
        let g = line_graph();
        let d = plan(vec![(0, 0.0), (1, 1.0), (2, 2.0)], vec![0, 1]);
        let refs = decision_to_reference(&g, &d, D_B, 0.1, false).unwrap();
        let s = &refs[0].states[10];
        assert_relative_eq!(s.x, 10.0 - D_B, epsilon = 1e-12);
        // final step lands on the last vertex
        let last = refs[0].states.last().unwrap();
        assert_relative_eq!(last.x, 20.0 - D_B, epsilon = 1e-12);
    }

    #[test]
    fn trim_cuts_to_shortest_horizon() {
        let g = line_graph();
        let mut d = plan(vec![(0, 0.0), (1, 1.0), (2, 2.0)], vec![0, 1]);
        d.plans.push(VehiclePlan {
            vehicle: 1,
            vertices: vec![(0, 0.0), (1, 1.5)],
            edges: vec![0],
        });
        let refs = decision_to_reference(&g, &d, D_B, 0.1, true).unwrap();
        assert_eq!(refs[0].states.len(), 16);
        assert_eq!(refs[1].states.len(), 16);
    }

    #[test]
    fn nonmonotone_timestamps_rejected() {
        let g = line_graph();
        let d = plan(vec![(0, 1.0), (1, 0.5)], vec![0]);
        assert!(matches!(
            decision_to_reference(&g, &d, D_B, 0.1, false),
            Err(TrajectoryError::NonmonotoneTimestamps { vehicle: 0 })
        ));
    }
}
