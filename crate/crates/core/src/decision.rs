//! Extraction of per-vehicle plans from a solved model, and the
//! decision-level validators: path structure, velocity envelopes, region
//! consistency, and replayed conflict separation.

use crate::model::{ModelIr, VarId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("vehicle {vehicle}: {reason}")]
    ExtractionFailed { vehicle: usize, reason: String },
}

/// One vehicle's chosen route: vertices with their timestamps, and the
/// edge sequence connecting them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehiclePlan {
    pub vehicle: usize,
    pub vertices: Vec<(usize, f64)>,
    pub edges: Vec<usize>,
}

/// A transition both of whose edges are used, with the region indicator
/// chosen for it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActiveTransition {
    pub vehicle: usize,
    pub vertex: usize,
    pub inbound: Option<usize>,
    pub outbound: usize,
    pub region: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionSolution {
    pub plans: Vec<VehiclePlan>,
    pub active_transitions: Vec<ActiveTransition>,
}

/// Outcome of one validation check with its worst margin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    /// Positive margin = slack to the nearest violation.
    pub margin: f64,
    pub detail: String,
}

impl CheckReport {
    fn pass(name: &str, margin: f64, detail: String) -> Self {
        CheckReport {
            name: name.into(),
            pass: true,
            margin,
            detail,
        }
    }

    fn fail(name: &str, margin: f64, detail: String) -> Self {
        CheckReport {
            name: name.into(),
            pass: false,
            margin,
            detail,
        }
    }
}

fn used(assignment: &[f64], var: VarId) -> bool {
    assignment[var.index()] > 0.5
}

/// Walks each vehicle's chosen edges from its start vertex and reads the
/// vertex timestamps along the way.
pub fn extract_decision(
    model: &ModelIr,
    assignment: &[f64],
) -> Result<DecisionSolution, DecisionError> {
    let n_vehicles = model.meta.starts.len();
    let mut plans = Vec::with_capacity(n_vehicles);
    for vehicle in 0..n_vehicles {
        let start = model.meta.starts[vehicle];
        let chosen: Vec<usize> = model
            .meta
            .y
            .iter()
            .filter(|((i, _), var)| *i == vehicle && used(assignment, **var))
            .map(|((_, e), _)| *e)
            .collect();
        let mut vertices = vec![(start, assignment[model.meta.t[&(vehicle, start)].index()])];
        let mut edges = Vec::new();
        let mut current = start;
        loop {
            let next: Vec<usize> = chosen
                .iter()
                .copied()
                .filter(|e| model.meta.edge_endpoints[e].0 == current)
                .collect();
            match next.len() {
                0 => break,
                1 => {
                    let e = next[0];
                    let (_, target, _) = model.meta.edge_endpoints[&e];
                    edges.push(e);
                    vertices.push((target, assignment[model.meta.t[&(vehicle, target)].index()]));
                    current = target;
                }
                _ => {
                    return Err(DecisionError::ExtractionFailed {
                        vehicle,
                        reason: format!("vertex {current} has multiple outgoing chosen edges"),
                    })
                }
            }
            if model.meta.destinations[vehicle].contains(&current) {
                break;
            }
        }
        if edges.len() != chosen.len() {
            return Err(DecisionError::ExtractionFailed {
                vehicle,
                reason: format!(
                    "{} chosen edges but only {} lie on the walked path",
                    chosen.len(),
                    edges.len()
                ),
            });
        }
        if !model.meta.destinations[vehicle].contains(&current) {
            return Err(DecisionError::ExtractionFailed {
                vehicle,
                reason: format!("path ends at non-destination vertex {current}"),
            });
        }
        plans.push(VehiclePlan {
            vehicle,
            vertices,
            edges,
        });
    }

    let mut active_transitions = Vec::new();
    for tr in &model.meta.transitions {
        let y_out = model.meta.y[&(tr.vehicle, tr.outbound)];
        if !used(assignment, y_out) {
            continue;
        }
        if let Some(a) = tr.inbound {
            if !used(assignment, model.meta.y[&(tr.vehicle, a)]) {
                continue;
            }
        }
        let region = tr
            .m_vars
            .iter()
            .position(|&m| used(assignment, m))
            .unwrap_or(0);
        active_transitions.push(ActiveTransition {
            vehicle: tr.vehicle,
            vertex: tr.vertex,
            inbound: tr.inbound,
            outbound: tr.outbound,
            region,
        });
    }
    Ok(DecisionSolution {
        plans,
        active_transitions,
    })
}

/// Structural path check: the chosen edges form one simple path from the
/// start into exactly one destination, with consistent degrees.
pub fn validate_path_structure(model: &ModelIr, assignment: &[f64]) -> CheckReport {
    let mut problems = Vec::new();
    for vehicle in 0..model.meta.starts.len() {
        let chosen: Vec<usize> = model
            .meta
            .y
            .iter()
            .filter(|((i, _), var)| *i == vehicle && used(assignment, **var))
            .map(|((_, e), _)| *e)
            .collect();
        let mut out_deg = std::collections::BTreeMap::new();
        let mut in_deg = std::collections::BTreeMap::new();
        for &e in &chosen {
            let (s, t, _) = model.meta.edge_endpoints[&e];
            *out_deg.entry(s).or_insert(0usize) += 1;
            *in_deg.entry(t).or_insert(0usize) += 1;
        }
        let start = model.meta.starts[vehicle];
        if out_deg.get(&start).copied().unwrap_or(0) != 1 {
            problems.push(format!("vehicle {vehicle}: start degree != 1"));
        }
        let dest_entries: usize = model.meta.destinations[vehicle]
            .iter()
            .map(|d| in_deg.get(d).copied().unwrap_or(0))
            .sum();
        if dest_entries != 1 {
            problems.push(format!(
                "vehicle {vehicle}: {dest_entries} destination entries"
            ));
        }
        for (&v, &d_out) in &out_deg {
            if d_out > 1 {
                problems.push(format!("vehicle {vehicle}: branching at vertex {v}"));
            }
        }
        if extract_decision(model, assignment).is_err() {
            problems.push(format!("vehicle {vehicle}: walk fails"));
        }
    }
    if problems.is_empty() {
        CheckReport::pass("path_structure", 0.0, "all paths simple".into())
    } else {
        CheckReport::fail("path_structure", 0.0, problems.join("; "))
    }
}

/// Average speed on every traversed edge must stay inside the vehicle's
/// allowed band.
pub fn validate_velocity_envelope(
    model: &ModelIr,
    decision: &DecisionSolution,
    tol: f64,
) -> CheckReport {
    let mut min_margin = f64::INFINITY;
    let mut problems = Vec::new();
    for plan in &decision.plans {
        let band = &model.meta.regions[plan.vehicle];
        for (k, &e) in plan.edges.iter().enumerate() {
            let (_, _, len) = model.meta.edge_endpoints[&e];
            let dt = plan.vertices[k + 1].1 - plan.vertices[k].1;
            if dt <= 0.0 {
                problems.push(format!(
                    "vehicle {}: nonpositive traversal time on edge {e}",
                    plan.vehicle
                ));
                continue;
            }
            let speed = len / dt;
            let margin = (speed - band.slow).min(band.fast - speed);
            min_margin = min_margin.min(margin);
            if margin < -tol {
                problems.push(format!(
                    "vehicle {}: speed {speed:.4} outside [{:.4}, {:.4}] on edge {e}",
                    plan.vehicle, band.slow, band.fast
                ));
            }
        }
    }
    let detail = format!("min speed margin {min_margin:.3e} m/s");
    if problems.is_empty() {
        CheckReport::pass("velocity_envelope", min_margin, detail)
    } else {
        CheckReport::fail("velocity_envelope", min_margin, problems.join("; "))
    }
}

/// The region indicator selected at every active transition must contain
/// the realized two-edge average speed.
pub fn validate_region_consistency(
    model: &ModelIr,
    assignment: &[f64],
    decision: &DecisionSolution,
    tol: f64,
) -> CheckReport {
    let mut min_margin = f64::INFINITY;
    let mut problems = Vec::new();
    for tr in &decision.active_transitions {
        let regions = &model.meta.regions[tr.vehicle];
        let region = regions.regions[tr.region];
        let (out_src, out_tgt, out_len) = model.meta.edge_endpoints[&tr.outbound];
        let (t_first, length) = match tr.inbound {
            Some(a) => {
                let (in_src, _, in_len) = model.meta.edge_endpoints[&a];
                (
                    assignment[model.meta.t[&(tr.vehicle, in_src)].index()],
                    in_len + out_len,
                )
            }
            None => (
                assignment[model.meta.t[&(tr.vehicle, out_src)].index()],
                out_len,
            ),
        };
        let t_last = assignment[model.meta.t[&(tr.vehicle, out_tgt)].index()];
        let dt = t_last - t_first;
        if dt <= 0.0 {
            problems.push(format!(
                "vehicle {}: nonpositive window at vertex {}",
                tr.vehicle, tr.vertex
            ));
            continue;
        }
        let speed = length / dt;
        let margin = (speed - region.slow).min(region.fast - speed);
        min_margin = min_margin.min(margin);
        if margin < -tol {
            problems.push(format!(
                "vehicle {}: window speed {speed:.4} outside region {} [{:.4}, {:.4}]",
                tr.vehicle, tr.region, region.slow, region.fast
            ));
        }
    }
    let detail = format!("min region margin {min_margin:.3e} m/s");
    if problems.is_empty() {
        CheckReport::pass("region_consistency", min_margin, detail)
    } else {
        CheckReport::fail("region_consistency", min_margin, problems.join("; "))
    }
}

/// Replays the interpolated motion of every conflicting edge pair in use
/// and checks the projected gap against the pair's safety distance at a
/// fixed sampling interval.
pub fn validate_separation(
    model: &ModelIr,
    assignment: &[f64],
    sample_dt: f64,
    tol: f64,
) -> CheckReport {
    let mut min_margin = f64::INFINITY;
    let mut problems = Vec::new();
    for (pair, _, _) in &model.meta.pairs {
        let y_i = model.meta.y[&(pair.vehicle_i, pair.edge_i)];
        let y_j = model.meta.y[&(pair.vehicle_j, pair.edge_j)];
        if !used(assignment, y_i) || !used(assignment, y_j) {
            continue;
        }
        let time_at = |vehicle: usize, edge: usize, theta: f64| {
            let (src, tgt, _) = model.meta.edge_endpoints[&edge];
            (1.0 - theta) * assignment[model.meta.t[&(vehicle, src)].index()]
                + theta * assignment[model.meta.t[&(vehicle, tgt)].index()]
        };
        let (ti_en, ti_ex) = (
            time_at(pair.vehicle_i, pair.edge_i, pair.theta_i.0),
            time_at(pair.vehicle_i, pair.edge_i, pair.theta_i.1),
        );
        let (tj_en, tj_ex) = (
            time_at(pair.vehicle_j, pair.edge_j, pair.theta_j.0),
            time_at(pair.vehicle_j, pair.edge_j, pair.theta_j.1),
        );
        let lo = ti_en.max(tj_en);
        let hi = ti_ex.min(tj_ex);
        if hi <= lo {
            continue; // the vehicles never occupy their regions together
        }
        let pos_i = |t: f64| {
            if ti_ex > ti_en {
                pair.s_i.0 + (t - ti_en) / (ti_ex - ti_en) * (pair.s_i.1 - pair.s_i.0)
            } else {
                pair.s_i.0
            }
        };
        let pos_j = |t: f64| {
            if tj_ex > tj_en {
                pair.s_j_hat.0 + (t - tj_en) / (tj_ex - tj_en) * (pair.s_j_hat.1 - pair.s_j_hat.0)
            } else {
                pair.s_j_hat.0
            }
        };
        let steps = ((hi - lo) / sample_dt).ceil().max(1.0) as usize;
        for k in 0..=steps {
            let t = lo + (hi - lo) * k as f64 / steps as f64;
            let gap = (pos_i(t) - pos_j(t)).abs();
            let margin = gap - pair.safety_distance;
            if margin < min_margin {
                min_margin = margin;
            }
            if margin < -tol {
                problems.push(format!(
                    "pair ({},e{})/({},e{}): gap {gap:.4} below safety {:.4} at t={t:.3}",
                    pair.vehicle_i,
                    pair.edge_i,
                    pair.vehicle_j,
                    pair.edge_j,
                    pair.safety_distance
                ));
                break;
            }
        }
    }
    let detail = if min_margin.is_finite() {
        format!("min projected margin {min_margin:.3e} m")
    } else {
        "no simultaneous region occupancy".into()
    };
    if problems.is_empty() {
        CheckReport::pass("decision_separation", min_margin, detail)
    } else {
        CheckReport::fail("decision_separation", min_margin, problems.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{find_critical_pairs, Footprint};
    use crate::graph::WaypointGraph;
    use crate::math::Vec2;
    use crate::model::{assemble, MilpInput, VehicleParams, Weights};
    use crate::solver::{solve_milp, SolveLimits};

    fn chain_scene() -> (WaypointGraph, ModelIr) {
        let mut g = WaypointGraph::new();
        for i in 0..4 {
            g.add_vertex(Vec2::new(i as f64 * 15.0, 0.0), None);
        }
        for i in 0..3 {
            g.add_edge(i, i + 1).unwrap();
        }
        let sub0 = g.extract_subgraph(0, 0, &[3]).unwrap();
        let sub1 = g.extract_subgraph(1, 1, &[3]).unwrap();
        let fp = Footprint::new(3.826, 1.673);
        let subs = vec![sub0, sub1];
        let pairs = find_critical_pairs(&g, &subs, &[fp, fp], 1);
        let vehicles = vec![
            VehicleParams {
                initial_velocity: 10.0,
                reference_velocity: 10.0,
                slow_factor: 0.6,
                fast_factor: 1.3,
                initial_heading: Vec2::new(1.0, 0.0),
            };
            2
        ];
        let input = MilpInput {
            graph: &g,
            subgraphs: &subs,
            vehicles: &vehicles,
            pairs: &pairs,
            weights: Weights::default(),
            region_count: 3,
            gamma_max: 3.0,
            gamma_min: -4.5,
            eta_max: 3.0,
        };
        let model = assemble(&input).unwrap();
        (g, model)
    }

    #[test]
    fn extraction_and_validators_on_solved_chain() {
        let (_, model) = chain_scene();
        let sol = solve_milp(&model, &SolveLimits::default()).unwrap();
        assert_eq!(sol.status, crate::solver::MilpStatus::Optimal);
        let decision = extract_decision(&model, &sol.assignment).unwrap();
        assert_eq!(decision.plans.len(), 2);
        assert_eq!(decision.plans[0].edges, vec![0, 1, 2]);
        assert_eq!(decision.plans[1].edges, vec![1, 2]);
        for plan in &decision.plans {
            for w in plan.vertices.windows(2) {
                assert!(w[1].1 > w[0].1, "timestamps must increase along the path");
            }
        }
        assert!(validate_path_structure(&model, &sol.assignment).pass);
        assert!(validate_velocity_envelope(&model, &decision, 1e-6).pass);
        assert!(validate_region_consistency(&model, &sol.assignment, &decision, 1e-6).pass);
        let sep = validate_separation(&model, &sol.assignment, 0.01, 1e-6);
        assert!(sep.pass, "{}", sep.detail);
    }

    #[test]
    fn corrupted_timestamp_is_flagged() {
        let (_, model) = chain_scene();
        let sol = solve_milp(&model, &SolveLimits::default()).unwrap();
        let mut x = sol.assignment.clone();
        // drag vehicle 1's arrival at vertex 2 onto vehicle 0's schedule
        let t_v2 = model.meta.t[&(1, 2)];
        x[t_v2.index()] = x[model.meta.t[&(0, 2)].index()];
        let sep = validate_separation(&model, &x, 0.01, 1e-6);
        assert!(!sep.pass);
        assert!(sep.detail.contains("below safety"));
    }
}
