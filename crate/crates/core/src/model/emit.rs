//! Constraint emitters and model assembly.
//!
//! Variable registration happens first in fixed family-major order, then
//! each emitter walks the subgraphs and appends its constraint family.
//! Rows that can be switched off by binaries go through `add_gated`, which
//! sizes the big-M from the variable box.

use crate::geometry::CriticalEdgePair;
use crate::graph::{VehicleSubgraph, WaypointGraph};
use crate::math::{angle_between, Vec2};
use crate::model::ir::*;
use log::{debug, info};

/// Per-vehicle parameters the model needs.
#[derive(Debug, Clone)]
pub struct VehicleParams {
    pub initial_velocity: f64,
    pub reference_velocity: f64,
    pub slow_factor: f64,
    pub fast_factor: f64,
    pub initial_heading: Vec2,
}

/// Everything `assemble` consumes. Subgraphs and vehicles are parallel
/// slices indexed by internal vehicle index.
pub struct MilpInput<'a> {
    pub graph: &'a WaypointGraph,
    pub subgraphs: &'a [VehicleSubgraph],
    pub vehicles: &'a [VehicleParams],
    pub pairs: &'a [CriticalEdgePair],
    pub weights: Weights,
    pub region_count: usize,
    pub gamma_max: f64,
    pub gamma_min: f64,
    pub eta_max: f64,
}

/// Shortest path lengths from the start over the subgraph edges, by
/// dynamic programming over a topological order. Vertices outside the
/// subgraph keep infinity.
fn shortest_paths_from_start(graph: &WaypointGraph, sub: &VehicleSubgraph) -> Vec<f64> {
    let order = graph
        .check_acyclic()
        .expect("model assembly requires an acyclic graph");
    let mut dist = vec![f64::INFINITY; graph.vertices.len()];
    dist[sub.start] = 0.0;
    for &v in &order {
        if dist[v] == f64::INFINITY {
            continue;
        }
        for e in sub.out_edges(graph, v) {
            let edge = graph.edge(e);
            let cand = dist[v] + edge.length;
            if cand < dist[edge.target] {
                dist[edge.target] = cand;
            }
        }
    }
    dist
}

/// Longest path from the start vertex within the subgraph, by dynamic
/// programming over a topological order.
fn longest_path_from_start(graph: &WaypointGraph, sub: &VehicleSubgraph) -> f64 {
    let order = graph
        .check_acyclic()
        .expect("model assembly requires an acyclic graph");
    let mut dist = vec![f64::NEG_INFINITY; graph.vertices.len()];
    dist[sub.start] = 0.0;
    for &v in &order {
        if dist[v] == f64::NEG_INFINITY {
            continue;
        }
        for e in sub.out_edges(graph, v) {
            let edge = graph.edge(e);
            let cand = dist[v] + edge.length;
            if cand > dist[edge.target] {
                dist[edge.target] = cand;
            }
        }
    }
    dist.into_iter().filter(|d| d.is_finite()).fold(0.0, f64::max)
}

pub fn assemble(input: &MilpInput) -> Result<ModelIr, ModelError> {
    let n = input.subgraphs.len();
    if n != input.vehicles.len() {
        return Err(ModelError::BadInput(
            "subgraph and vehicle counts differ".into(),
        ));
    }
    if input.region_count == 0 {
        return Err(ModelError::BadInput("region count must be positive".into()));
    }
    if input.gamma_max <= 0.0 || input.gamma_min >= 0.0 || input.eta_max <= 0.0 {
        return Err(ModelError::BadInput(
            "acceleration bounds must straddle zero and eta_max must be positive".into(),
        ));
    }
    let w = input.weights;
    if w.alpha_t < 0.0 || w.alpha_v < 0.0 || w.alpha_a < 0.0 || w.alpha_theta < 0.0 {
        return Err(ModelError::BadInput(
            "objective weights must be nonnegative".into(),
        ));
    }

    let mut model = ModelIr {
        weights: input.weights,
        ..Default::default()
    };

    let regions: Vec<VelocityRegions> = input
        .vehicles
        .iter()
        .map(|v| {
            VelocityRegions::build(
                v.reference_velocity,
                v.slow_factor,
                v.fast_factor,
                input.region_count,
            )
        })
        .collect();

    let longest = input
        .subgraphs
        .iter()
        .map(|s| longest_path_from_start(input.graph, s))
        .fold(0.0, f64::max);
    let min_slow = regions.iter().map(|r| r.slow).fold(f64::INFINITY, f64::min);
    if longest <= 0.0 {
        return Err(ModelError::BadInput(
            "no vehicle has a nonempty subgraph".into(),
        ));
    }
    model.t_max = (longest / min_slow).ceil();
    model.meta.regions = regions;
    model.meta.starts = input.subgraphs.iter().map(|s| s.start).collect();
    model.meta.destinations = input
        .subgraphs
        .iter()
        .map(|s| s.destinations.clone())
        .collect();
    for e in &input.graph.edges {
        model
            .meta
            .edge_endpoints
            .insert(e.id, (e.source, e.target, e.length));
    }

    register_variables(&mut model, input);

    let c_path = emit_path_constraints(&mut model, input)?;
    let c_vel = emit_velocity_constraints(&mut model, input);
    let c_reg = emit_region_constraints(&mut model, input);
    let c_acc = emit_acceleration_constraints(&mut model, input);
    let c_steer = emit_steering_constraints(&mut model, input);
    let c_coll = emit_collision_constraints(&mut model);
    emit_objective(&mut model);

    info!(
        "assembled model: {} vars ({} binary), {} rows (path {}, velocity {}, region {}, accel {}, steering {}, collision {}), t_max {}, max big-M {:.3}",
        model.vars.len(),
        model.num_binaries(),
        model.constraints.len(),
        c_path,
        c_vel,
        c_reg,
        c_acc,
        c_steer,
        c_coll,
        model.t_max,
        model.big_m,
    );
    Ok(model)
}

/// Registers every variable family in deterministic order and records the
/// lookup tables. Start-vertex times are pinned to zero through their
/// bounds, which removes the free time translation.
fn register_variables(model: &mut ModelIr, input: &MilpInput) {
    let graph = input.graph;
    for sub in input.subgraphs {
        let i = sub.vehicle;
        for &e in &sub.edges {
            let id = model.add_var(
                VarName::EdgeUse { vehicle: i, edge: e },
                VarKind::Binary,
                0.0,
                1.0,
            );
            model.meta.y.insert((i, e), id);
        }
    }
    let t_max = model.t_max;
    for sub in input.subgraphs {
        let i = sub.vehicle;
        // no vertex can be reached earlier than the shortest path to it
        // at the top of the speed band, so those times make valid lower
        // bounds; they lift the relaxation off zero and shrink the big-Ms.
        // Destinations share their smallest bound, which keeps the arrival
        // objective a constant shift of the unbounded form.
        let fast = model.meta.regions[i].fast;
        let earliest = shortest_paths_from_start(graph, sub);
        let dest_lb = sub
            .destinations
            .iter()
            .map(|&d| earliest[d] / fast)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        for &v in &sub.vertices {
            let (lb, ub) = if v == sub.start {
                (0.0, 0.0)
            } else if sub.destinations.contains(&v) {
                (dest_lb, t_max)
            } else {
                ((earliest[v] / fast).max(0.0), t_max)
            };
            let id = model.add_var(
                VarName::VertexTime { vehicle: i, vertex: v },
                VarKind::Continuous,
                lb,
                ub.max(lb),
            );
            model.meta.t.insert((i, v), id);
        }
    }
    for sub in input.subgraphs {
        let i = sub.vehicle;
        let r = model.meta.regions[i].clone();
        for &e in &sub.edges {
            let sf = model.add_var(
                VarName::SlackFast { vehicle: i, edge: e },
                VarKind::Continuous,
                0.0,
                (r.fast - r.reference) * t_max,
            );
            let ss = model.add_var(
                VarName::SlackSlow { vehicle: i, edge: e },
                VarKind::Continuous,
                0.0,
                (r.reference - r.slow) * t_max,
            );
            model.meta.vel_slacks.insert((i, e), (sf, ss));
        }
    }
    // transitions: per vehicle, start combos first, then interior by vertex
    let mut transitions = Vec::new();
    for sub in input.subgraphs {
        let i = sub.vehicle;
        for beta in sub.out_edges(graph, sub.start) {
            transitions.push(Transition {
                vehicle: i,
                vertex: sub.start,
                inbound: None,
                outbound: beta,
                m_vars: Vec::new(),
            });
        }
        for v in sub.intermediate_vertices() {
            for alpha in sub.in_edges(graph, v) {
                for beta in sub.out_edges(graph, v) {
                    transitions.push(Transition {
                        vehicle: i,
                        vertex: v,
                        inbound: Some(alpha),
                        outbound: beta,
                        m_vars: Vec::new(),
                    });
                }
            }
        }
    }
    for tr in &mut transitions {
        for k in 0..input.region_count {
            tr.m_vars.push(model.add_var(
                VarName::RegionPick {
                    vehicle: tr.vehicle,
                    region: k,
                    vertex: tr.vertex,
                    inbound: tr.inbound,
                    outbound: tr.outbound,
                },
                VarKind::Binary,
                0.0,
                1.0,
            ));
        }
    }
    for tr in &transitions {
        let mut per_region = Vec::with_capacity(input.region_count);
        for k in 0..input.region_count {
            let v_ref = model.meta.regions[tr.vehicle].regions[k].reference;
            let acc_scale = t_max / (2.0 * v_ref * v_ref);
            let accp = model.add_var(
                VarName::AccelPos {
                    vehicle: tr.vehicle,
                    region: k,
                    vertex: tr.vertex,
                    inbound: tr.inbound,
                    outbound: tr.outbound,
                },
                VarKind::Continuous,
                0.0,
                input.gamma_max * acc_scale,
            );
            let accn = model.add_var(
                VarName::AccelNeg {
                    vehicle: tr.vehicle,
                    region: k,
                    vertex: tr.vertex,
                    inbound: tr.inbound,
                    outbound: tr.outbound,
                },
                VarKind::Continuous,
                0.0,
                -input.gamma_min * acc_scale,
            );
            per_region.push((accp, accn));
        }
        model.meta.accel_slacks.push(per_region);
    }
    for tr in &transitions {
        let mut per_region = Vec::with_capacity(input.region_count);
        for k in 0..input.region_count {
            per_region.push(model.add_var(
                VarName::Steering {
                    vehicle: tr.vehicle,
                    region: k,
                    vertex: tr.vertex,
                    inbound: tr.inbound,
                    outbound: tr.outbound,
                },
                VarKind::Continuous,
                0.0,
                input.eta_max * t_max,
            ));
        }
        model.meta.steer_slacks.push(per_region);
    }
    model.meta.transitions = transitions;
    // passing-order binaries, one canonical orientation per unordered pair
    for pair in input.pairs {
        if pair.vehicle_i >= pair.vehicle_j {
            continue;
        }
        let before = model.add_var(
            VarName::Precedence {
                first: pair.vehicle_i,
                first_edge: pair.edge_i,
                second: pair.vehicle_j,
                second_edge: pair.edge_j,
            },
            VarKind::Binary,
            0.0,
            1.0,
        );
        let after = model.add_var(
            VarName::Precedence {
                first: pair.vehicle_j,
                first_edge: pair.edge_j,
                second: pair.vehicle_i,
                second_edge: pair.edge_i,
            },
            VarKind::Binary,
            0.0,
            1.0,
        );
        model.meta.pairs.push((pair.clone(), before, after));
    }
}

/// Flow conservation: leave the start once, enter exactly one destination,
/// and keep in-flow equal to out-flow at every intermediate vertex.
pub fn emit_path_constraints(model: &mut ModelIr, input: &MilpInput) -> Result<usize, ModelError> {
    let before = model.constraints.len();
    for sub in input.subgraphs {
        let i = sub.vehicle;
        let mut start = LinExpr::new();
        for e in sub.out_edges(input.graph, sub.start) {
            start.add(model.meta.y[&(i, e)], 1.0);
        }
        if start.terms.is_empty() {
            return Err(ModelError::EmptyOutgoing {
                vehicle: i,
                vertex: sub.start,
            });
        }
        model.add_constraint(format!("path_start[{i}]"), start, Sense::Eq, 1.0);

        let mut dest = LinExpr::new();
        for &v in &sub.destinations {
            for e in sub.in_edges(input.graph, v) {
                dest.add(model.meta.y[&(i, e)], 1.0);
            }
        }
        if dest.terms.is_empty() {
            return Err(ModelError::NoDestinationInflow { vehicle: i });
        }
        model.add_constraint(format!("path_dest[{i}]"), dest, Sense::Eq, 1.0);

        for v in sub.intermediate_vertices() {
            let mut expr = LinExpr::new();
            for e in sub.in_edges(input.graph, v) {
                expr.add(model.meta.y[&(i, e)], 1.0);
            }
            for e in sub.out_edges(input.graph, v) {
                expr.add(model.meta.y[&(i, e)], -1.0);
            }
            if expr.terms.is_empty() {
                continue;
            }
            model.add_constraint(format!("path_flow[{i},v{v}]"), expr, Sense::Eq, 0.0);
        }
    }
    Ok(model.constraints.len() - before)
}

/// Per traversed edge, the deviation of the travel time from the
/// reference profile is absorbed by a slack pair, and the slack caps keep
/// the average speed within the allowed band.
pub fn emit_velocity_constraints(model: &mut ModelIr, input: &MilpInput) -> usize {
    let before = model.constraints.len();
    for sub in input.subgraphs {
        let i = sub.vehicle;
        let r = model.meta.regions[i].clone();
        for &e in &sub.edges {
            let edge = input.graph.edge(e);
            let y = model.meta.y[&(i, e)];
            let t1 = model.meta.t[&(i, edge.source)];
            let t2 = model.meta.t[&(i, edge.target)];
            let (sf, ss) = model.meta.vel_slacks[&(i, e)];
            let gate = LinExpr::new().with_constant(1.0).term(y, -1.0);

            let dev = LinExpr::new().term(t1, r.reference).term(t2, -r.reference);
            model.add_gated(
                format!("vel_hi[{i},e{e}]"),
                dev.clone().term(sf, -1.0),
                Sense::Le,
                -edge.length,
                gate.clone(),
            );
            model.add_gated(
                format!("vel_lo[{i},e{e}]"),
                dev.term(ss, 1.0),
                Sense::Ge,
                -edge.length,
                gate.clone(),
            );
            let d_fast = r.fast - r.reference;
            model.add_gated(
                format!("vel_cap_hi[{i},e{e}]"),
                LinExpr::new().term(sf, 1.0).term(t2, -d_fast).term(t1, d_fast),
                Sense::Le,
                0.0,
                gate.clone(),
            );
            let d_slow = r.reference - r.slow;
            model.add_gated(
                format!("vel_cap_lo[{i},e{e}]"),
                LinExpr::new().term(ss, 1.0).term(t2, -d_slow).term(t1, d_slow),
                Sense::Le,
                0.0,
                gate,
            );
        }
    }
    model.constraints.len() - before
}

/// Transition window: times spanning the incoming/outgoing edge pair, the
/// length that the average-speed envelopes divide by, and the gates.
struct TransitionTimes {
    t_first: VarId,
    t_last: VarId,
    length: f64,
    gate: LinExpr,
    gate_with_m: Vec<LinExpr>,
}

fn transition_times(model: &ModelIr, tr: &Transition) -> TransitionTimes {
    let i = tr.vehicle;
    let (beta_src, beta_tgt, beta_len) = model.meta.edge_endpoints[&tr.outbound];
    let y_beta = model.meta.y[&(i, tr.outbound)];
    let t_last = model.meta.t[&(i, beta_tgt)];
    let (t_first, length, gate) = match tr.inbound {
        Some(a) => {
            let (alpha_src, _, alpha_len) = model.meta.edge_endpoints[&a];
            let y_alpha = model.meta.y[&(i, a)];
            (
                model.meta.t[&(i, alpha_src)],
                alpha_len + beta_len,
                LinExpr::new()
                    .with_constant(2.0)
                    .term(y_alpha, -1.0)
                    .term(y_beta, -1.0),
            )
        }
        None => (
            model.meta.t[&(i, beta_src)],
            beta_len,
            LinExpr::new().with_constant(1.0).term(y_beta, -1.0),
        ),
    };
    let gate_with_m = tr
        .m_vars
        .iter()
        .map(|&m| {
            let mut g = gate.clone();
            g.constant += 1.0;
            g.add(m, -1.0);
            g
        })
        .collect();
    TransitionTimes {
        t_first,
        t_last,
        length,
        gate,
        gate_with_m,
    }
}

fn transition_label(tr: &Transition) -> String {
    match tr.inbound {
        Some(a) => format!("{},v{},e{a},e{}", tr.vehicle, tr.vertex, tr.outbound),
        None => format!("{},v{},s,e{}", tr.vehicle, tr.vertex, tr.outbound),
    }
}

/// One-hot region choice per transition plus traversal-time envelopes that
/// force the chosen region to contain the realized average speed.
pub fn emit_region_constraints(model: &mut ModelIr, _input: &MilpInput) -> usize {
    let before = model.constraints.len();
    for tr in model.meta.transitions.clone() {
        let times = transition_times(model, &tr);
        let regions = model.meta.regions[tr.vehicle].clone();
        let label = transition_label(&tr);

        let mut one_hot = LinExpr::new();
        for &m in &tr.m_vars {
            one_hot.add(m, 1.0);
        }
        model.add_constraint(format!("region_pick[{label}]"), one_hot, Sense::Eq, 1.0);

        let mut lower = LinExpr::new().term(times.t_first, 1.0).term(times.t_last, -1.0);
        let mut upper = LinExpr::new().term(times.t_first, 1.0).term(times.t_last, -1.0);
        for (k, &m) in tr.m_vars.iter().enumerate() {
            lower.add(m, times.length / regions.regions[k].slow);
            upper.add(m, times.length / regions.regions[k].fast);
        }
        model.add_gated(
            format!("region_lo[{label}]"),
            lower,
            Sense::Ge,
            0.0,
            times.gate.clone(),
        );
        model.add_gated(format!("region_hi[{label}]"), upper, Sense::Le, 0.0, times.gate);
    }
    model.constraints.len() - before
}

/// Linearized acceleration around each transition: the inverse-speed
/// difference is bounded by a slack pair, and the slack caps encode the
/// physical acceleration limits at the region's operating speed.
pub fn emit_acceleration_constraints(model: &mut ModelIr, input: &MilpInput) -> usize {
    let before = model.constraints.len();
    for (t_idx, tr) in model.meta.transitions.clone().into_iter().enumerate() {
        let times = transition_times(model, &tr);
        let regions = model.meta.regions[tr.vehicle].clone();
        let label = transition_label(&tr);
        let (_, beta_tgt, beta_len) = model.meta.edge_endpoints[&tr.outbound];
        let t_beta2 = model.meta.t[&(tr.vehicle, beta_tgt)];

        for (k, gate) in times.gate_with_m.iter().enumerate() {
            let v_ref = regions.regions[k].reference;
            let (accp, accn) = model.meta.accel_slacks[t_idx][k];

            // finite-difference term in inverse-speed units
            let (diff, rhs) = match tr.inbound {
                Some(a) => {
                    let (alpha_src, alpha_tgt, alpha_len) = model.meta.edge_endpoints[&a];
                    let t_v = model.meta.t[&(tr.vehicle, alpha_tgt)];
                    let t_alpha1 = model.meta.t[&(tr.vehicle, alpha_src)];
                    let e = LinExpr::new()
                        .term(t_v, 1.0 / alpha_len + 1.0 / beta_len)
                        .term(t_alpha1, -1.0 / alpha_len)
                        .term(t_beta2, -1.0 / beta_len);
                    (e, 0.0)
                }
                None => {
                    let (beta_src, _, _) = model.meta.edge_endpoints[&tr.outbound];
                    let t_s = model.meta.t[&(tr.vehicle, beta_src)];
                    let e = LinExpr::new()
                        .term(t_beta2, -1.0 / beta_len)
                        .term(t_s, 1.0 / beta_len);
                    let v_init = input.vehicles[tr.vehicle].initial_velocity;
                    (e, -(2.0 * v_ref - v_init) / (v_ref * v_ref))
                }
            };
            model.add_gated(
                format!("acc_hi[{label},k{k}]"),
                diff.clone().term(accp, -1.0),
                Sense::Le,
                rhs,
                gate.clone(),
            );
            model.add_gated(
                format!("acc_lo[{label},k{k}]"),
                diff.term(accn, 1.0),
                Sense::Ge,
                rhs,
                gate.clone(),
            );

            let scale = 2.0 * v_ref * v_ref;
            model.add_gated(
                format!("acc_cap_hi[{label},k{k}]"),
                LinExpr::new()
                    .term(accp, 1.0)
                    .term(times.t_last, -input.gamma_max / scale)
                    .term(times.t_first, input.gamma_max / scale),
                Sense::Le,
                0.0,
                gate.clone(),
            );
            model.add_gated(
                format!("acc_cap_lo[{label},k{k}]"),
                LinExpr::new()
                    .term(accn, 1.0)
                    .term(times.t_last, input.gamma_min / scale)
                    .term(times.t_first, -input.gamma_min / scale),
                Sense::Le,
                0.0,
                gate.clone(),
            );
        }
    }
    model.constraints.len() - before
}

/// Lateral-acceleration proxy: turning through the inter-edge angle at the
/// region's operating speed must fit under the slack, and the slack cap
/// limits it by the allowed lateral acceleration over the window.
/// Straight transitions carry no steering cost and emit nothing.
pub fn emit_steering_constraints(model: &mut ModelIr, input: &MilpInput) -> usize {
    let before = model.constraints.len();
    for (t_idx, tr) in model.meta.transitions.clone().into_iter().enumerate() {
        let theta = match tr.inbound {
            Some(a) => angle_between(
                input.graph.edge_direction(a),
                input.graph.edge_direction(tr.outbound),
            ),
            None => angle_between(
                input.vehicles[tr.vehicle].initial_heading,
                input.graph.edge_direction(tr.outbound),
            ),
        };
        if theta < 1e-12 {
            continue;
        }
        let times = transition_times(model, &tr);
        let regions = model.meta.regions[tr.vehicle].clone();
        let label = transition_label(&tr);
        for (k, gate) in times.gate_with_m.iter().enumerate() {
            let eta = model.meta.steer_slacks[t_idx][k];
            model.add_gated(
                format!("steer_lo[{label},k{k}]"),
                LinExpr::new().term(eta, 1.0),
                Sense::Ge,
                regions.regions[k].reference * theta,
                gate.clone(),
            );
            model.add_gated(
                format!("steer_cap[{label},k{k}]"),
                LinExpr::new()
                    .term(eta, 1.0)
                    .term(times.t_last, -input.eta_max)
                    .term(times.t_first, input.eta_max),
                Sense::Le,
                0.0,
                gate.clone(),
            );
        }
    }
    model.constraints.len() - before
}

/// Interpolated time at which a vehicle's center reaches the normalized
/// position `theta` of an edge, assuming uniform motion along it.
fn region_time(model: &ModelIr, vehicle: usize, edge: usize, theta: f64) -> LinExpr {
    let (src, tgt, _) = model.meta.edge_endpoints[&edge];
    LinExpr::new()
        .term(model.meta.t[&(vehicle, src)], 1.0 - theta)
        .term(model.meta.t[&(vehicle, tgt)], theta)
}

/// Pairwise passing-order constraints over the critical pairs. A
/// conflicting edge pair may only be used by both vehicles once an order
/// is chosen, and the chosen order couples the interpolated times at
/// which each vehicle enters and leaves its critical region. The
/// two-inequality corridor form applies when the projected regions
/// genuinely overlap along the travel axis; otherwise plain precedence of
/// region exit before region entry is emitted.
pub fn emit_collision_constraints(model: &mut ModelIr) -> usize {
    let before = model.constraints.len();
    for (pair, i_first, j_first) in model.meta.pairs.clone() {
        let label = format!(
            "{},e{},{},e{}",
            pair.vehicle_i, pair.edge_i, pair.vehicle_j, pair.edge_j
        );
        let y_i = model.meta.y[&(pair.vehicle_i, pair.edge_i)];
        let y_j = model.meta.y[&(pair.vehicle_j, pair.edge_j)];

        model.add_gated(
            format!("coll_select[{label}]"),
            LinExpr::new().term(y_i, 1.0).term(y_j, 1.0),
            Sense::Le,
            1.0,
            LinExpr::new().term(i_first, 1.0).term(j_first, 1.0),
        );
        model.add_constraint(
            format!("coll_one_order[{label}]"),
            LinExpr::new().term(i_first, 1.0).term(j_first, 1.0),
            Sense::Le,
            1.0,
        );

        let t_i_en = region_time(model, pair.vehicle_i, pair.edge_i, pair.theta_i.0);
        let t_i_ex = region_time(model, pair.vehicle_i, pair.edge_i, pair.theta_i.1);
        let t_j_en = region_time(model, pair.vehicle_j, pair.edge_j, pair.theta_j.0);
        let t_j_ex = region_time(model, pair.vehicle_j, pair.edge_j, pair.theta_j.1);

        let d = pair.safety_distance;
        let (s1, s2) = pair.s_i;
        let (h1, h2) = pair.s_j_hat;
        let den_j = h2 - h1;
        let den_i = s2 - s1;
        const DEN_TOL: f64 = 1e-9;

        // order: i passes after j (gate opens unless j_first is chosen)
        let gate_after = LinExpr::new().with_constant(1.0).term(j_first, -1.0);
        if s1 < h2 - d && den_j > DEN_TOL && den_i > DEN_TOL {
            let lam = ((s1 - (h1 - d)) / den_j).clamp(0.0, 1.0);
            let mut lhs = t_i_en.clone();
            lhs.add_scaled(&t_j_ex, -lam);
            lhs.add_scaled(&t_j_en, -(1.0 - lam));
            model.add_gated(
                format!("coll_after_entry[{label}]"),
                lhs,
                Sense::Ge,
                0.0,
                gate_after.clone(),
            );
            let mu = (((h2 - d) - s1) / den_i).clamp(0.0, 1.0);
            let mut lhs = t_j_ex.clone();
            lhs.add_scaled(&t_i_ex, -mu);
            lhs.add_scaled(&t_i_en, -(1.0 - mu));
            model.add_gated(
                format!("coll_after_exit[{label}]"),
                lhs,
                Sense::Le,
                0.0,
                gate_after,
            );
        } else {
            if den_j.abs() <= DEN_TOL || den_i.abs() <= DEN_TOL {
                debug!("pair [{label}]: projected region degenerate, plain precedence used");
            }
            let mut lhs = t_i_en.clone();
            lhs.add_scaled(&t_j_ex, -1.0);
            model.add_gated(
                format!("coll_after[{label}]"),
                lhs,
                Sense::Ge,
                0.0,
                gate_after,
            );
        }

        // order: i passes before j
        let gate_before = LinExpr::new().with_constant(1.0).term(i_first, -1.0);
        if s2 > h1 + d && den_j > DEN_TOL && den_i > DEN_TOL {
            let lam = ((s2 - (h1 + d)) / den_j).clamp(0.0, 1.0);
            let mut lhs = t_i_ex.clone();
            lhs.add_scaled(&t_j_ex, -lam);
            lhs.add_scaled(&t_j_en, -(1.0 - lam));
            model.add_gated(
                format!("coll_before_exit[{label}]"),
                lhs,
                Sense::Le,
                0.0,
                gate_before.clone(),
            );
            let mu = (((h1 + d) - s1) / den_i).clamp(0.0, 1.0);
            let mut lhs = t_j_en.clone();
            lhs.add_scaled(&t_i_ex, -mu);
            lhs.add_scaled(&t_i_en, -(1.0 - mu));
            model.add_gated(
                format!("coll_before_entry[{label}]"),
                lhs,
                Sense::Ge,
                0.0,
                gate_before,
            );
        } else {
            let mut lhs = t_i_ex.clone();
            lhs.add_scaled(&t_j_en, -1.0);
            model.add_gated(
                format!("coll_before[{label}]"),
                lhs,
                Sense::Le,
                0.0,
                gate_before,
            );
        }
    }
    model.constraints.len() - before
}

/// Weighted sum of destination arrival times, velocity deviation slacks,
/// squared-reference-speed weighted acceleration slacks, and steering
/// slacks.
pub fn emit_objective(model: &mut ModelIr) {
    let w = model.weights;
    let mut obj = LinExpr::new();
    for (id, def) in model.vars.iter().enumerate() {
        let var = VarId(id);
        match def.name {
            VarName::VertexTime { vehicle, vertex } => {
                if model.meta.destinations[vehicle].contains(&vertex) {
                    obj.add(var, w.alpha_t);
                }
            }
            VarName::SlackFast { .. } | VarName::SlackSlow { .. } => obj.add(var, w.alpha_v),
            VarName::AccelPos { vehicle, region, .. }
            | VarName::AccelNeg { vehicle, region, .. } => {
                let v_ref = model.meta.regions[vehicle].regions[region].reference;
                obj.add(var, w.alpha_a * v_ref * v_ref);
            }
            VarName::Steering { .. } => obj.add(var, w.alpha_theta),
            _ => {}
        }
    }
    obj.normalize();
    model.objective = obj;
}
