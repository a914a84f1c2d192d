//! Directed acyclic waypoint graphs, start-pose extension, and per-vehicle
//! subgraph extraction.
//!
//! Road topology is a DAG of waypoints sampled along lane centerlines. A
//! vehicle is attached to the graph by adding a vertex at its pose with
//! edges to the nearest waypoints ahead of it, and planning then works on
//! the subgraph of vertices that can be reached from the start and can
//! still reach a destination.

use crate::math::Vec2;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub position: Vec2,
    pub lane_tag: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub source: VertexId,
    pub target: VertexId,
    pub length: f64,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph contains a cycle through vertices {0:?}")]
    CycleFound(Vec<VertexId>),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no existing vertex lies ahead of the pose")]
    NoVertexAhead,
    #[error("no destination is reachable from vertex {start}")]
    UnreachableDestination { start: VertexId },
    #[error("inconsistent graph: {0}")]
    Inconsistent(String),
}

/// Directed acyclic waypoint graph with adjacency indices.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WaypointGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub out_adjacency: Vec<Vec<EdgeId>>,
    pub in_adjacency: Vec<Vec<EdgeId>>,
}

impl WaypointGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, position: Vec2, lane_tag: Option<String>) -> VertexId {
        assert!(position.is_finite(), "vertex position must be finite");
        let id = self.vertices.len();
        self.vertices.push(Vertex {
            id,
            position,
            lane_tag,
        });
        self.out_adjacency.push(Vec::new());
        self.in_adjacency.push(Vec::new());
        id
    }

    pub fn add_edge(&mut self, source: VertexId, target: VertexId) -> Result<EdgeId, GraphError> {
        if source >= self.vertices.len() {
            return Err(GraphError::UnknownVertex(source));
        }
        if target >= self.vertices.len() {
            return Err(GraphError::UnknownVertex(target));
        }
        if source == target {
            return Err(GraphError::Inconsistent(format!(
                "self loop on vertex {source}"
            )));
        }
        let length = self.vertices[source]
            .position
            .distance(self.vertices[target].position);
        if length <= 0.0 {
            return Err(GraphError::Inconsistent(format!(
                "zero-length edge {source}->{target}"
            )));
        }
        let id = self.edges.len();
        self.edges.push(Edge {
            id,
            source,
            target,
            length,
        });
        self.out_adjacency[source].push(id);
        self.in_adjacency[target].push(id);
        Ok(id)
    }

    pub fn vertex(&self, id: VertexId) -> Result<&Vertex, GraphError> {
        self.vertices.get(id).ok_or(GraphError::UnknownVertex(id))
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn edge_direction(&self, id: EdgeId) -> Vec2 {
        let e = &self.edges[id];
        (self.vertices[e.target].position - self.vertices[e.source].position).normalized()
    }

    /// Kahn topological sort. Returns an order in which every edge goes
    /// forward, or the vertex sequence of a cycle.
    pub fn check_acyclic(&self) -> Result<Vec<VertexId>, GraphError> {
        let n = self.vertices.len();
        let mut in_deg: Vec<usize> = self.in_adjacency.iter().map(|l| l.len()).collect();
        let mut queue: VecDeque<VertexId> =
            (0..n).filter(|&v| in_deg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &self.out_adjacency[v] {
                let w = self.edges[e].target;
                in_deg[w] -= 1;
                if in_deg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        Err(GraphError::CycleFound(self.find_cycle(&in_deg)))
    }

    /// Walks the residual graph (vertices with remaining in-degree) until a
    /// vertex repeats, then trims the tail to the cycle itself.
    fn find_cycle(&self, in_deg: &[usize]) -> Vec<VertexId> {
        let start = (0..self.vertices.len())
            .find(|&v| in_deg[v] > 0)
            .expect("cycle requested on acyclic graph");
        let mut seen = vec![usize::MAX; self.vertices.len()];
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            if seen[v] != usize::MAX {
                return walk[seen[v]..].to_vec();
            }
            seen[v] = walk.len();
            walk.push(v);
            v = self.out_adjacency[v]
                .iter()
                .map(|&e| self.edges[e].target)
                .find(|&w| in_deg[w] > 0)
                .expect("residual vertex without residual successor");
        }
    }

    /// Vertices reachable from `v` by directed paths, including `v` itself.
    pub fn forward_reachable(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.reachable(v, false)
    }

    /// Vertices that can reach `v`, including `v` itself.
    pub fn backward_reachable(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.reachable(v, true)
    }

    fn reachable(&self, v: VertexId, backward: bool) -> Result<Vec<VertexId>, GraphError> {
        if v >= self.vertices.len() {
            return Err(GraphError::UnknownVertex(v));
        }
        let mut visited = vec![false; self.vertices.len()];
        let mut stack = vec![v];
        visited[v] = true;
        let mut out = Vec::new();
        while let Some(u) = stack.pop() {
            out.push(u);
            let adj = if backward {
                &self.in_adjacency[u]
            } else {
                &self.out_adjacency[u]
            };
            for &e in adj {
                let w = if backward {
                    self.edges[e].source
                } else {
                    self.edges[e].target
                };
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Adds a vertex at the vehicle pose and edges to the `k` nearest
    /// existing vertices in front of it (positive projection of the
    /// displacement onto the heading). The new vertex has in-degree zero,
    /// so acyclicity is preserved.
    pub fn extend_with_start(
        &mut self,
        position: Vec2,
        heading: Vec2,
        k: usize,
    ) -> Result<VertexId, GraphError> {
        assert!(k >= 1, "extension edge count must be at least 1");
        let mut ahead: Vec<(f64, VertexId)> = self
            .vertices
            .iter()
            .filter(|v| {
                let d = v.position - position;
                d.dot(heading) > 0.0 && d.norm() > 0.0
            })
            .map(|v| (v.position.distance(position), v.id))
            .collect();
        if ahead.is_empty() {
            return Err(GraphError::NoVertexAhead);
        }
        ahead.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let start = self.add_vertex(position, None);
        for &(_, v) in ahead.iter().take(k) {
            self.add_edge(start, v)?;
        }
        Ok(start)
    }

    /// Per-vehicle subgraph: vertices reachable from the start that can
    /// still reach a destination, plus every edge with both endpoints
    /// inside.
    pub fn extract_subgraph(
        &self,
        vehicle: usize,
        start: VertexId,
        destinations: &[VertexId],
    ) -> Result<VehicleSubgraph, GraphError> {
        let forward = self.forward_reachable(start)?;
        let mut to_dest = vec![false; self.vertices.len()];
        for &d in destinations {
            for v in self.backward_reachable(d)? {
                to_dest[v] = true;
            }
        }
        let vertices: Vec<VertexId> = forward.into_iter().filter(|&v| to_dest[v]).collect();
        let mut member = vec![false; self.vertices.len()];
        for &v in &vertices {
            member[v] = true;
        }
        if !destinations.iter().any(|&d| member[d]) {
            return Err(GraphError::UnreachableDestination { start });
        }
        let edges: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|e| member[e.source] && member[e.target])
            .map(|e| e.id)
            .collect();
        let destinations = destinations
            .iter()
            .copied()
            .filter(|&d| member[d])
            .collect();
        Ok(VehicleSubgraph {
            vehicle,
            vertices,
            edges,
            start,
            destinations,
        })
    }
}

/// The slice of the waypoint graph relevant to one vehicle's task.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleSubgraph {
    pub vehicle: usize,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub start: VertexId,
    pub destinations: Vec<VertexId>,
}

impl VehicleSubgraph {
    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn is_destination(&self, v: VertexId) -> bool {
        self.destinations.contains(&v)
    }

    /// Vertices that are neither the start nor a destination.
    pub fn intermediate_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .copied()
            .filter(|&v| v != self.start && !self.is_destination(v))
    }

    pub fn out_edges<'g>(&'g self, graph: &'g WaypointGraph, v: VertexId) -> Vec<EdgeId> {
        graph.out_adjacency[v]
            .iter()
            .copied()
            .filter(|&e| self.edges.binary_search(&e).is_ok())
            .collect()
    }

    pub fn in_edges<'g>(&'g self, graph: &'g WaypointGraph, v: VertexId) -> Vec<EdgeId> {
        graph.in_adjacency[v]
            .iter()
            .copied()
            .filter(|&e| self.edges.binary_search(&e).is_ok())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_graph(edges: &[(usize, usize)], n: usize) -> WaypointGraph {
        let mut g = WaypointGraph::new();
        for i in 0..n {
            // positions spread out so edge lengths are positive
            g.add_vertex(Vec2::new(i as f64 * 10.0, (i % 3) as f64), None);
        }
        for &(a, b) in edges {
            g.add_edge(a, b).unwrap();
        }
        g
    }

    /// Test-local reachability by repeated relaxation, independent of the
    /// library's traversal.
    fn reach_oracle(edges: &[(usize, usize)], n: usize, from: usize, backward: bool) -> Vec<usize> {
        let mut reach = vec![false; n];
        reach[from] = true;
        loop {
            let mut changed = false;
            for &(a, b) in edges {
                let (src, dst) = if backward { (b, a) } else { (a, b) };
                if reach[src] && !reach[dst] {
                    reach[dst] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..n).filter(|&v| reach[v]).collect()
    }

    #[test]
    fn acyclic_chain() {
        let g = grid_graph(&[(0, 1), (1, 2)], 3);
        assert_eq!(g.check_acyclic().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn acyclic_single_vertex() {
        let g = grid_graph(&[], 1);
        assert_eq!(g.check_acyclic().unwrap(), vec![0]);
    }

    #[test]
    fn two_cycle_detected() {
        let g = grid_graph(&[(0, 1), (1, 0)], 2);
        match g.check_acyclic() {
            Err(GraphError::CycleFound(c)) => {
                assert_eq!(c.len(), 2);
                assert!(c.contains(&0) && c.contains(&1));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn reachability_matches_hand_enumeration() {
        // a->b, a->c, c->d
        let edges = [(0, 1), (0, 2), (2, 3)];
        let g = grid_graph(&edges, 4);
        assert_eq!(g.forward_reachable(0).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(g.backward_reachable(3).unwrap(), vec![0, 2, 3]);
        assert_eq!(reach_oracle(&edges, 4, 0, false), vec![0, 1, 2, 3]);
        assert_eq!(reach_oracle(&edges, 4, 3, true), vec![0, 2, 3]);
    }

    #[test]
    fn reachability_reflexive_on_isolated_vertex() {
        let g = grid_graph(&[], 1);
        assert_eq!(g.forward_reachable(0).unwrap(), vec![0]);
    }

    #[test]
    fn unknown_vertex_rejected() {
        let g = grid_graph(&[], 1);
        assert!(matches!(
            g.forward_reachable(7),
            Err(GraphError::UnknownVertex(7))
        ));
    }

    #[test]
    fn extend_picks_nearest_forward() {
        let mut g = WaypointGraph::new();
        g.add_vertex(Vec2::new(10.0, 0.0), None);
        g.add_vertex(Vec2::new(20.0, 0.0), None);
        g.add_vertex(Vec2::new(-10.0, 0.0), None);
        let s = g
            .extend_with_start(Vec2::ZERO, Vec2::new(1.0, 0.0), 2)
            .unwrap();
        let targets: Vec<_> = g.out_adjacency[s]
            .iter()
            .map(|&e| g.edges[e].target)
            .collect();
        assert_eq!(targets, vec![0, 1]);
        assert!(g.in_adjacency[s].is_empty());
        g.check_acyclic().unwrap();
    }

    #[test]
    fn extend_from_coincident_position() {
        let mut g = WaypointGraph::new();
        g.add_vertex(Vec2::ZERO, None);
        g.add_vertex(Vec2::new(10.0, 0.0), None);
        let s = g
            .extend_with_start(Vec2::ZERO, Vec2::new(1.0, 0.0), 1)
            .unwrap();
        // the coincident vertex is skipped, edge goes to the next one ahead
        let targets: Vec<_> = g.out_adjacency[s]
            .iter()
            .map(|&e| g.edges[e].target)
            .collect();
        assert_eq!(targets, vec![1]);
    }

    #[test]
    fn extend_with_everything_behind() {
        let mut g = WaypointGraph::new();
        g.add_vertex(Vec2::new(-5.0, 0.0), None);
        assert!(matches!(
            g.extend_with_start(Vec2::ZERO, Vec2::new(1.0, 0.0), 3),
            Err(GraphError::NoVertexAhead)
        ));
    }

    #[test]
    fn subgraph_by_hand() {
        // a->b, a->c, c->d; s=a, des={d}
        let g = grid_graph(&[(0, 1), (0, 2), (2, 3)], 4);
        let sub = g.extract_subgraph(0, 0, &[3]).unwrap();
        assert_eq!(sub.vertices, vec![0, 2, 3]);
        let edge_pairs: Vec<_> = sub
            .edges
            .iter()
            .map(|&e| (g.edges[e].source, g.edges[e].target))
            .collect();
        assert_eq!(edge_pairs, vec![(0, 2), (2, 3)]);
    }

    #[test]
    fn subgraph_start_is_destination() {
        let g = grid_graph(&[(0, 1), (0, 2), (2, 3)], 4);
        let sub = g.extract_subgraph(0, 3, &[3]).unwrap();
        assert_eq!(sub.vertices, vec![3]);
        assert!(sub.edges.is_empty());
    }

    #[test]
    fn subgraph_unreachable_destination() {
        let g = grid_graph(&[(0, 1), (0, 2), (2, 3)], 4);
        assert!(matches!(
            g.extract_subgraph(0, 1, &[3]),
            Err(GraphError::UnreachableDestination { start: 1 })
        ));
    }

    #[test]
    fn subgraph_vertices_lie_on_start_to_destination_paths() {
        let edges = [(0, 1), (0, 2), (2, 3), (1, 3), (3, 4), (2, 5)];
        let g = grid_graph(&edges, 6);
        let sub = g.extract_subgraph(0, 0, &[4]).unwrap();
        for &v in &sub.vertices {
            let fwd = reach_oracle(&edges, 6, 0, false);
            assert!(fwd.contains(&v));
            let back = reach_oracle(&edges, 6, 4, true);
            assert!(back.contains(&v));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Random DAG: edges only go from lower to higher index.
        fn random_dag(n: usize, density: f64, seed: u64) -> (WaypointGraph, Vec<(usize, usize)>) {
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64
            };
            let mut edges = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if next() < density {
                        edges.push((a, b));
                    }
                }
            }
            (grid_graph(&edges, n), edges)
        }

        proptest! {
            #[test]
            fn forward_backward_are_adjoint(n in 1usize..200, seed in 0u64..500) {
                let (g, _) = random_dag(n, 3.0 / n as f64, seed);
                for v in 0..n {
                    for &w in &g.forward_reachable(v).unwrap() {
                        prop_assert!(g.backward_reachable(w).unwrap().contains(&v));
                    }
                }
            }

            #[test]
            fn subgraphs_stay_acyclic_and_path_covered(n in 2usize..60, seed in 0u64..200) {
                let (g, edges) = random_dag(n, 4.0 / n as f64, seed);
                let dest = n - 1;
                if let Ok(sub) = g.extract_subgraph(0, 0, &[dest]) {
                    for &v in &sub.vertices {
                        prop_assert!(reach_oracle(&edges, n, 0, false).contains(&v));
                        prop_assert!(reach_oracle(&edges, n, dest, true).contains(&v));
                    }
                }
            }

            #[test]
            fn extension_never_creates_cycles(n in 1usize..40, seed in 0u64..200) {
                let (mut g, _) = random_dag(n, 4.0 / n as f64, seed);
                let pose = Vec2::new(-1.0, 0.0);
                if g.extend_with_start(pose, Vec2::new(1.0, 0.0), 3).is_ok() {
                    prop_assert!(g.check_acyclic().is_ok());
                }
            }
        }
    }
}
