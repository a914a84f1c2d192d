//! Cooperative decision making and trajectory planning for connected
//! vehicles on directed-acyclic waypoint graphs.
//!
//! The pipeline has two stages. First a mixed-integer linear program is
//! assembled over per-vehicle subgraphs of a waypoint graph and solved to
//! pick a path and a time profile for every vehicle, with big-M gated
//! velocity, acceleration, steering, and pairwise collision-ordering
//! constraints. Second, the chosen paths are interpolated into per-step
//! references and a joint tracking optimal-control problem under bicycle
//! kinematics refines them into feasible, collision-free trajectories.

pub mod decision;
pub mod geometry;
pub mod graph;
pub mod math;
pub mod model;
pub mod pipeline;
pub mod scenario;
pub mod solver;
pub mod trajectory;

pub use decision::DecisionSolution;
pub use graph::{Edge, EdgeId, Vertex, VertexId, VehicleSubgraph, WaypointGraph};
pub use model::ModelIr;
pub use pipeline::RunReport;
pub use scenario::Scenario;
