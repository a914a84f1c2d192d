//! Scenario files: TOML documents that declare the road geometry through
//! lane generators (or explicit vertices and edges), the vehicles with
//! their tasks, and the solver and refinement settings.
//!
//! Vertex numbering is deterministic: straight lanes in file order, then
//! arc lanes in file order, each sampled source-to-target, then explicit
//! vertices. Lane-change links connect waypoint `i` of one lane to
//! waypoint `i+1` of an adjacent lane, as the road topology sketches do.

use crate::graph::{GraphError, VertexId, WaypointGraph};
use crate::math::Vec2;
use crate::model::Weights;
use crate::solver::SolveLimits;
use crate::trajectory::{ControlLimits, OcpSettings, VehicleState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn schema(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema(msg.into())
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StraightLaneSpec {
    pub id: String,
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub spacing: f64,
    #[serde(default = "default_lane_width")]
    pub width: f64,
}

fn default_lane_width() -> f64 {
    3.75
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ArcLaneSpec {
    pub id: String,
    pub center: [f64; 2],
    pub radius: f64,
    pub start_angle_deg: f64,
    pub end_angle_deg: f64,
    pub step_deg: f64,
    #[serde(default = "default_lane_width")]
    pub width: f64,
}

/// Lane-change edges from waypoint `i` of `from` to waypoint `i+1` of
/// `to`. Source indices listed in `skip_source_indices` emit no edge,
/// which is how changes are prohibited near entrances and exits.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LaneLinkSpec {
    pub from: String,
    pub to: String,
    #[serde(default)]
    pub bidirectional: bool,
    #[serde(default)]
    pub skip_source_indices: Vec<usize>,
}

/// Explicit edge between lane waypoints: (lane id, waypoint index).
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    pub from: (String, usize),
    pub to: (String, usize),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitVertexSpec {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitEdgeSpec {
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(default)]
    pub straight_lanes: Vec<StraightLaneSpec>,
    #[serde(default)]
    pub arc_lanes: Vec<ArcLaneSpec>,
    #[serde(default)]
    pub lane_links: Vec<LaneLinkSpec>,
    #[serde(default)]
    pub connections: Vec<ConnectionSpec>,
    #[serde(default)]
    pub vertices: Vec<ExplicitVertexSpec>,
    #[serde(default)]
    pub edges: Vec<ExplicitEdgeSpec>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSpec {
    pub id: usize,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    pub position: [f64; 2],
    #[serde(default)]
    pub heading_deg: f64,
    pub initial_velocity: f64,
    pub reference_velocity: f64,
    #[serde(default = "default_slow_factor")]
    pub slow_factor: f64,
    #[serde(default = "default_fast_factor")]
    pub fast_factor: f64,
    pub destinations: Vec<usize>,
}

fn default_length() -> f64 {
    3.826
}
fn default_width() -> f64 {
    1.673
}
fn default_slow_factor() -> f64 {
    0.6
}
fn default_fast_factor() -> f64 {
    1.3
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MilpSpec {
    #[serde(default = "default_alpha_t")]
    pub alpha_t: f64,
    #[serde(default = "default_alpha_v")]
    pub alpha_v: f64,
    #[serde(default = "default_alpha_a")]
    pub alpha_a: f64,
    #[serde(default = "default_alpha_theta")]
    pub alpha_theta: f64,
    #[serde(default = "default_gamma_max")]
    pub gamma_max: f64,
    #[serde(default = "default_gamma_min")]
    pub gamma_min: f64,
    #[serde(default = "default_eta_max")]
    pub eta_max: f64,
    #[serde(default = "default_regions")]
    pub regions: usize,
    #[serde(default = "default_extension_edges")]
    pub extension_edges: usize,
    #[serde(default)]
    pub solver: SolverSpec,
}

fn default_alpha_t() -> f64 {
    0.1
}
fn default_alpha_v() -> f64 {
    1.0
}
fn default_alpha_a() -> f64 {
    0.5
}
fn default_alpha_theta() -> f64 {
    0.5
}
fn default_gamma_max() -> f64 {
    3.0
}
fn default_gamma_min() -> f64 {
    -4.5
}
fn default_eta_max() -> f64 {
    3.0
}
fn default_regions() -> usize {
    3
}
fn default_extension_edges() -> usize {
    3
}

impl Default for MilpSpec {
    fn default() -> Self {
        toml::from_str("").expect("defaults parse")
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_node_limit")]
    pub node_limit: usize,
    pub time_limit_s: Option<f64>,
    #[serde(default = "default_gap")]
    pub gap: f64,
}

fn default_node_limit() -> usize {
    1_000_000
}
fn default_gap() -> f64 {
    1e-6
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            node_limit: default_node_limit(),
            time_limit_s: None,
            gap: default_gap(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OcpSpec {
    #[serde(default = "default_tau_s")]
    pub tau_s: f64,
    #[serde(default = "default_q")]
    pub q: [f64; 4],
    #[serde(default = "default_r")]
    pub r: [f64; 2],
    #[serde(default = "default_d_safe")]
    pub d_safe: f64,
    #[serde(default = "default_d_f")]
    pub d_f: f64,
    #[serde(default = "default_d_r")]
    pub d_r: f64,
    #[serde(default = "default_wheelbase")]
    pub wheelbase: f64,
    #[serde(default = "default_a_min")]
    pub a_min: f64,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default = "default_delta_min")]
    pub delta_min: f64,
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
    /// Cut all reference horizons to the shortest one.
    #[serde(default)]
    pub trim: bool,
}

fn default_tau_s() -> f64 {
    0.1
}
fn default_q() -> [f64; 4] {
    [20.0, 20.0, 0.0, 0.0]
}
fn default_r() -> [f64; 2] {
    [20.0, 0.1]
}
fn default_d_safe() -> f64 {
    2.366
}
fn default_d_f() -> f64 {
    2.279
}
fn default_d_r() -> f64 {
    0.126
}
fn default_wheelbase() -> f64 {
    2.405
}
fn default_a_min() -> f64 {
    -6.0
}
fn default_a_max() -> f64 {
    4.0
}
fn default_delta_min() -> f64 {
    -0.6
}
fn default_delta_max() -> f64 {
    0.6
}

impl Default for OcpSpec {
    fn default() -> Self {
        toml::from_str("").expect("defaults parse")
    }
}

/// Raw file contents before materialization.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub graph: GraphSpec,
    pub vehicles: Vec<VehicleSpec>,
    #[serde(default)]
    pub milp: MilpSpec,
    #[serde(default)]
    pub ocp: OcpSpec,
}

/// A parsed scenario with the waypoint graph materialized (vehicle start
/// vertices not yet added; the pipeline extends the graph per vehicle).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub graph: WaypointGraph,
    /// Lane id -> vertex ids in sample order.
    pub lanes: BTreeMap<String, Vec<VertexId>>,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        Scenario::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Scenario, ScenarioError> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| schema(e.to_string()))?;
        Scenario::from_spec(spec)
    }

    pub fn from_spec(spec: ScenarioSpec) -> Result<Scenario, ScenarioError> {
        let (graph, lanes) = build_graph(&spec.graph)?;
        validate(&spec, &graph)?;
        Ok(Scenario { spec, graph, lanes })
    }

    pub fn vehicle_heading(&self, idx: usize) -> Vec2 {
        Vec2::from_angle(self.spec.vehicles[idx].heading_deg.to_radians())
    }

    /// Rear-axle initial state of a vehicle; positions in the file locate
    /// the vehicle center.
    pub fn initial_state(&self, idx: usize) -> VehicleState {
        let v = &self.spec.vehicles[idx];
        let d_b = (self.spec.ocp.d_f + self.spec.ocp.d_r) / 2.0;
        let heading = self.vehicle_heading(idx);
        let center = Vec2::new(v.position[0], v.position[1]);
        let rear = center - heading * d_b;
        VehicleState {
            x: rear.x,
            y: rear.y,
            theta: heading.angle(),
            v: v.initial_velocity,
        }
    }

    pub fn weights(&self) -> Weights {
        Weights {
            alpha_t: self.spec.milp.alpha_t,
            alpha_v: self.spec.milp.alpha_v,
            alpha_a: self.spec.milp.alpha_a,
            alpha_theta: self.spec.milp.alpha_theta,
        }
    }

    pub fn solve_limits(&self) -> SolveLimits {
        SolveLimits {
            node_limit: Some(self.spec.milp.solver.node_limit),
            time_limit_s: self.spec.milp.solver.time_limit_s,
            gap: self.spec.milp.solver.gap,
        }
    }

    pub fn ocp_settings(&self) -> OcpSettings {
        let o = &self.spec.ocp;
        OcpSettings {
            q: o.q,
            r: o.r,
            d_safe: o.d_safe,
            limits: ControlLimits {
                steer_min: o.delta_min,
                steer_max: o.delta_max,
                accel_min: o.a_min,
                accel_max: o.a_max,
            },
            wheelbase: o.wheelbase,
            tau_s: o.tau_s,
            d_f: o.d_f,
            d_r: o.d_r,
            ..OcpSettings::default()
        }
    }
}

fn build_graph(
    spec: &GraphSpec,
) -> Result<(WaypointGraph, BTreeMap<String, Vec<VertexId>>), ScenarioError> {
    let mut graph = WaypointGraph::new();
    let mut lanes: BTreeMap<String, Vec<VertexId>> = BTreeMap::new();

    let add_lane = |graph: &mut WaypointGraph,
                        lanes: &mut BTreeMap<String, Vec<VertexId>>,
                        id: &str,
                        points: Vec<Vec2>|
     -> Result<(), ScenarioError> {
        if lanes.contains_key(id) {
            return Err(schema(format!("duplicate lane id '{id}'")));
        }
        let mut ids = Vec::with_capacity(points.len());
        for p in &points {
            ids.push(graph.add_vertex(*p, Some(id.to_string())));
        }
        for w in ids.windows(2) {
            graph.add_edge(w[0], w[1])?;
        }
        lanes.insert(id.to_string(), ids);
        Ok(())
    };

    for lane in &spec.straight_lanes {
        let start = Vec2::new(lane.start[0], lane.start[1]);
        let end = Vec2::new(lane.end[0], lane.end[1]);
        let len = start.distance(end);
        if len <= 0.0 {
            return Err(ScenarioError::Geometry(format!(
                "lane '{}' has zero length",
                lane.id
            )));
        }
        if lane.spacing <= 0.0 || lane.width <= 0.0 {
            return Err(ScenarioError::Geometry(format!(
                "lane '{}' needs positive spacing and width",
                lane.id
            )));
        }
        let count = (len / lane.spacing).round() as usize;
        if count == 0 {
            return Err(ScenarioError::Geometry(format!(
                "lane '{}' is shorter than its sampling interval",
                lane.id
            )));
        }
        let points = (0..=count)
            .map(|k| start + (end - start) * (k as f64 / count as f64))
            .collect();
        add_lane(&mut graph, &mut lanes, &lane.id, points)?;
    }

    for lane in &spec.arc_lanes {
        if lane.radius <= 0.0 || lane.step_deg <= 0.0 || lane.width <= 0.0 {
            return Err(ScenarioError::Geometry(format!(
                "arc lane '{}' needs positive radius, step, and width",
                lane.id
            )));
        }
        let span = lane.end_angle_deg - lane.start_angle_deg;
        if span.abs() < lane.step_deg {
            return Err(ScenarioError::Geometry(format!(
                "arc lane '{}' spans less than one step",
                lane.id
            )));
        }
        let count = (span.abs() / lane.step_deg).floor() as usize;
        let step = span.signum() * lane.step_deg;
        let center = Vec2::new(lane.center[0], lane.center[1]);
        let points = (0..=count)
            .map(|k| {
                let a = (lane.start_angle_deg + step * k as f64).to_radians();
                center + Vec2::from_angle(a) * lane.radius
            })
            .collect();
        add_lane(&mut graph, &mut lanes, &lane.id, points)?;
    }

    for v in &spec.vertices {
        graph.add_vertex(Vec2::new(v.x, v.y), None);
    }

    for link in &spec.lane_links {
        let emit = |graph: &mut WaypointGraph,
                    from: &str,
                    to: &str,
                    skips: &[usize]|
         -> Result<(), ScenarioError> {
            let from_ids = lanes
                .get(from)
                .ok_or_else(|| schema(format!("lane link references unknown lane '{from}'")))?;
            let to_ids = lanes
                .get(to)
                .ok_or_else(|| schema(format!("lane link references unknown lane '{to}'")))?;
            for i in 0..from_ids.len() {
                if i + 1 >= to_ids.len() || skips.contains(&i) {
                    continue;
                }
                graph.add_edge(from_ids[i], to_ids[i + 1])?;
            }
            Ok(())
        };
        emit(&mut graph, &link.from, &link.to, &link.skip_source_indices)?;
        if link.bidirectional {
            emit(&mut graph, &link.to, &link.from, &link.skip_source_indices)?;
        }
    }

    for conn in &spec.connections {
        let resolve = |(lane, idx): &(String, usize)| -> Result<VertexId, ScenarioError> {
            let ids = lanes
                .get(lane)
                .ok_or_else(|| schema(format!("connection references unknown lane '{lane}'")))?;
            ids.get(*idx).copied().ok_or_else(|| {
                schema(format!(
                    "connection index {idx} out of range for lane '{lane}' ({} waypoints)",
                    ids.len()
                ))
            })
        };
        let from = resolve(&conn.from)?;
        let to = resolve(&conn.to)?;
        graph.add_edge(from, to)?;
    }

    for e in &spec.edges {
        graph.add_edge(e.source, e.target)?;
    }

    graph.check_acyclic()?;
    Ok((graph, lanes))
}

fn validate(spec: &ScenarioSpec, graph: &WaypointGraph) -> Result<(), ScenarioError> {
    if spec.vehicles.is_empty() {
        return Err(schema("at least one vehicle required"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for v in &spec.vehicles {
        if !seen.insert(v.id) {
            return Err(schema(format!("duplicate vehicle id {}", v.id)));
        }
        if v.destinations.is_empty() {
            return Err(schema(format!("vehicle {} has no destinations", v.id)));
        }
        for &d in &v.destinations {
            if d >= graph.vertices.len() {
                return Err(schema(format!(
                    "vehicle {}: destination vertex {d} does not exist (graph has {})",
                    v.id,
                    graph.vertices.len()
                )));
            }
        }
        if v.length <= 0.0 || v.width <= 0.0 {
            return Err(schema(format!("vehicle {}: nonpositive footprint", v.id)));
        }
        if !(0.0 < v.slow_factor && v.slow_factor < 1.0 && v.fast_factor > 1.0) {
            return Err(schema(format!(
                "vehicle {}: velocity factors must satisfy 0 < slow < 1 < fast",
                v.id
            )));
        }
        if v.initial_velocity <= 0.0 || v.reference_velocity <= 0.0 {
            return Err(schema(format!("vehicle {}: velocities must be positive", v.id)));
        }
    }
    if spec.milp.regions == 0 {
        return Err(schema("milp.regions must be at least 1"));
    }
    if spec.milp.extension_edges == 0 {
        return Err(schema("milp.extension_edges must be at least 1"));
    }
    if spec.ocp.tau_s <= 0.0 {
        return Err(schema("ocp.tau_s must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LANE: &str = r#"
name = "two-lane"

[graph]
[[graph.straight_lanes]]
id = "lane1"
start = [0.0, 0.0]
end = [70.0, 0.0]
spacing = 10.0

[[graph.straight_lanes]]
id = "lane2"
start = [0.0, 3.75]
end = [70.0, 3.75]
spacing = 10.0

[[graph.lane_links]]
from = "lane1"
to = "lane2"
bidirectional = true

[[vehicles]]
id = 1
position = [2.0, 0.0]
initial_velocity = 20.0
reference_velocity = 20.0
destinations = [7, 15]
"#;

    #[test]
    fn two_lane_road_materializes() {
        let sc = Scenario::from_toml(TWO_LANE).unwrap();
        assert_eq!(sc.graph.vertices.len(), 16);
        // 7 straight per lane + 7 lane changes each way
        assert_eq!(sc.graph.edges.len(), 14 + 14);
        assert_eq!(sc.lanes["lane1"], (0..8).collect::<Vec<_>>());
        assert_eq!(sc.lanes["lane2"], (8..16).collect::<Vec<_>>());
        sc.graph.check_acyclic().unwrap();
    }

    #[test]
    fn missing_destination_is_schema_error() {
        let bad = TWO_LANE.replace("destinations = [7, 15]", "");
        match Scenario::from_toml(&bad) {
            Err(ScenarioError::Schema(msg)) => assert!(msg.contains("destinations")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_field_rejected_with_path() {
        let bad = TWO_LANE.replace("spacing = 10.0", "spacing = 10.0\nwobble = 3");
        match Scenario::from_toml(&bad) {
            Err(ScenarioError::Schema(msg)) => assert!(msg.contains("wobble"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn zero_length_lane_rejected() {
        let bad = TWO_LANE.replace("end = [70.0, 0.0]", "end = [0.0, 0.0]");
        assert!(matches!(
            Scenario::from_toml(&bad),
            Err(ScenarioError::Geometry(_))
        ));
    }

    #[test]
    fn arc_lane_vertex_count() {
        let text = r#"
name = "ring"

[graph]
[[graph.arc_lanes]]
id = "ring"
center = [0.0, 0.0]
radius = 15.0
start_angle_deg = 90.0
end_angle_deg = 330.0
step_deg = 20.0

[[vehicles]]
id = 1
position = [0.0, 14.0]
heading_deg = 180.0
initial_velocity = 7.0
reference_velocity = 7.0
destinations = [12]
"#;
        let sc = Scenario::from_toml(text).unwrap();
        // floor(240 / 20) + 1
        assert_eq!(sc.graph.vertices.len(), 13);
        assert_eq!(sc.graph.edges.len(), 12);
        let first = sc.graph.vertices[0].position;
        assert!((first.x - 0.0).abs() < 1e-9 && (first.y - 15.0).abs() < 1e-9);
    }

    #[test]
    fn lane_link_skips_listed_sources() {
        let text = TWO_LANE.replace(
            "bidirectional = true",
            "bidirectional = false\nskip_source_indices = [0, 6]",
        );
        let sc = Scenario::from_toml(&text).unwrap();
        // 14 straight + (7 - 2) lane changes
        assert_eq!(sc.graph.edges.len(), 14 + 5);
    }

    #[test]
    fn initial_state_offsets_to_rear_axle() {
        let sc = Scenario::from_toml(TWO_LANE).unwrap();
        let s = sc.initial_state(0);
        assert!((s.x - (2.0 - 1.2025)).abs() < 1e-12);
        assert_eq!(s.v, 20.0);
    }
}
