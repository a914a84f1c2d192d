//! Swept-region geometry for collision analysis: which edge pairs can put
//! two vehicles in conflict, on which part of each edge, and what 1-D
//! separation along the first edge's axis rules the conflict out.

use crate::graph::{EdgeId, VehicleSubgraph, WaypointGraph};
use crate::math::{angle_between, Vec2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Normalized position step of the coarse scan over an edge.
const THETA_GRID_STEP: f64 = 0.01;
/// Bisection refinement tolerance on normalized position.
const THETA_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Footprint {
    pub length: f64,
    pub width: f64,
}

impl Footprint {
    pub fn new(length: f64, width: f64) -> Self {
        assert!(
            length > 0.0 && width > 0.0,
            "footprint dimensions must be positive"
        );
        Footprint { length, width }
    }
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("swept regions do not overlap for any position on the edge")]
    NoOverlap,
}

/// Convex polygon with counterclockwise vertices.
#[derive(Debug, Clone)]
pub struct ConvexPolygon {
    pub vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Oriented rectangle centered at `center`, long axis along `axis`.
    pub fn rectangle(center: Vec2, axis: Vec2, half_length: f64, half_width: f64) -> Self {
        let u = axis.normalized();
        let w = u.perp();
        ConvexPolygon {
            vertices: vec![
                center + u * half_length + w * half_width,
                center - u * half_length + w * half_width,
                center - u * half_length - w * half_width,
                center + u * half_length - w * half_width,
            ],
        }
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let mut a = 0.0;
        for i in 0..n {
            a += self.vertices[i].cross(self.vertices[(i + 1) % n]);
        }
        a / 2.0
    }

    fn project(&self, axis: Vec2) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &p in &self.vertices {
            let q = p.dot(axis);
            lo = lo.min(q);
            hi = hi.max(q);
        }
        (lo, hi)
    }

    /// Separating-axis test; touching polygons count as intersecting.
    pub fn intersects(&self, other: &ConvexPolygon) -> bool {
        for poly in [self, other] {
            let n = poly.vertices.len();
            for i in 0..n {
                let edge = poly.vertices[(i + 1) % n] - poly.vertices[i];
                let axis = edge.perp();
                let (a_lo, a_hi) = self.project(axis);
                let (b_lo, b_hi) = other.project(axis);
                if a_hi < b_lo || b_hi < a_lo {
                    return false;
                }
            }
        }
        true
    }
}

/// Region swept by a footprint travelling source-to-target along an edge:
/// a rectangle of length `l_e + L` and width `W` centered on the segment.
pub type SweptRegion = ConvexPolygon;

pub fn swept_region(graph: &WaypointGraph, edge: EdgeId, footprint: &Footprint) -> SweptRegion {
    let e = graph.edge(edge);
    let p1 = graph.vertices[e.source].position;
    let p2 = graph.vertices[e.target].position;
    let center = (p1 + p2) * 0.5;
    ConvexPolygon::rectangle(
        center,
        p2 - p1,
        (e.length + footprint.length) / 2.0,
        footprint.width / 2.0,
    )
}

/// Footprint of a vehicle aligned with an edge at normalized position theta.
fn footprint_at(
    graph: &WaypointGraph,
    edge: EdgeId,
    theta: f64,
    footprint: &Footprint,
) -> ConvexPolygon {
    let e = graph.edge(edge);
    let p1 = graph.vertices[e.source].position;
    let p2 = graph.vertices[e.target].position;
    let center = p1 + (p2 - p1) * theta;
    ConvexPolygon::rectangle(
        center,
        p2 - p1,
        footprint.length / 2.0,
        footprint.width / 2.0,
    )
}

/// Precomputed conflict geometry for one ordered edge pair. The `s` axis
/// runs along `edge_i` from its source vertex; `s_j_hat` holds the
/// projections of the entry and exit points of vehicle j's critical region
/// onto that axis, in j's direction of motion (so it runs backward when the
/// edges point more than 90 degrees apart).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalEdgePair {
    pub vehicle_i: usize,
    pub edge_i: EdgeId,
    pub vehicle_j: usize,
    pub edge_j: EdgeId,
    pub theta_i: (f64, f64),
    pub theta_j: (f64, f64),
    pub s_i: (f64, f64),
    pub s_j_hat: (f64, f64),
    pub projected_length: f64,
    pub safety_distance: f64,
    pub phi: f64,
}

impl CriticalEdgePair {
    /// The entry/exit coordinates of i's critical region must sit within
    /// the safety distance of the matching projected endpoint of j's
    /// region (entry-to-entry below pi/2, crossed above).
    pub fn projection_bounds_hold(&self, tol: f64) -> bool {
        let d = self.safety_distance;
        let (a, b) = if self.phi < std::f64::consts::FRAC_PI_2 {
            (self.s_j_hat.0, self.s_j_hat.1)
        } else {
            (self.s_j_hat.1, self.s_j_hat.0)
        };
        (self.s_i.0 - a).abs() <= d + tol && (self.s_i.1 - b).abs() <= d + tol
    }
}

/// Critical region of the moving footprint on `edge_i` against the swept
/// region of `edge_j`: the outermost normalized positions where the two
/// can still touch. A coarse scan brackets the boundary and bisection
/// tightens it; the returned bounds err outward.
pub fn critical_region(
    graph: &WaypointGraph,
    edge_i: EdgeId,
    footprint_i: &Footprint,
    edge_j: EdgeId,
    footprint_j: &Footprint,
) -> Result<(f64, f64), GeometryError> {
    let obstacle = swept_region(graph, edge_j, footprint_j);
    let hit = |theta: f64| footprint_at(graph, edge_i, theta, footprint_i).intersects(&obstacle);

    let steps = (1.0 / THETA_GRID_STEP).round() as usize;
    let samples: Vec<bool> = (0..=steps)
        .map(|k| hit(k as f64 * THETA_GRID_STEP))
        .collect();
    let first = samples.iter().position(|&h| h);
    let last = samples.iter().rposition(|&h| h);
    let (first, last) = match (first, last) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(GeometryError::NoOverlap),
    };

    // refine between a non-overlapping outer point and an overlapping one,
    // returning the outer side so the region is never underestimated
    let bisect = |mut outside: f64, mut inside: f64| {
        while (inside - outside).abs() > THETA_TOL {
            let mid = (outside + inside) / 2.0;
            if hit(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        outside
    };

    let lo = if first == 0 {
        0.0
    } else {
        bisect((first - 1) as f64 * THETA_GRID_STEP, first as f64 * THETA_GRID_STEP)
    };
    let hi = if last == steps {
        1.0
    } else {
        bisect((last + 1) as f64 * THETA_GRID_STEP, last as f64 * THETA_GRID_STEP)
    };
    Ok((lo, hi))
}

/// Fills the 1-D projection data for an ordered pair whose theta intervals
/// are already known. The projected extent of j's footprint along the axis
/// of `edge_i` is the support width of its rotated rectangle.
pub fn project_pair(
    graph: &WaypointGraph,
    vehicle_i: usize,
    edge_i: EdgeId,
    vehicle_j: usize,
    edge_j: EdgeId,
    theta_i: (f64, f64),
    theta_j: (f64, f64),
    footprint_i: &Footprint,
    footprint_j: &Footprint,
) -> CriticalEdgePair {
    let ei = graph.edge(edge_i);
    let ej = graph.edge(edge_j);
    let origin = graph.vertices[ei.source].position;
    let u = graph.edge_direction(edge_i);
    let pj1 = graph.vertices[ej.source].position;
    let pj2 = graph.vertices[ej.target].position;

    let phi = angle_between(
        graph.vertices[ei.target].position - origin,
        pj2 - pj1,
    );
    let project = |theta: f64| {
        let q = pj1 + (pj2 - pj1) * theta;
        (q - origin).dot(u)
    };
    let projected_length =
        footprint_j.length * phi.cos().abs() + footprint_j.width * phi.sin().abs();
    CriticalEdgePair {
        vehicle_i,
        edge_i,
        vehicle_j,
        edge_j,
        theta_i,
        theta_j,
        s_i: (theta_i.0 * ei.length, theta_i.1 * ei.length),
        s_j_hat: (project(theta_j.0), project(theta_j.1)),
        projected_length,
        safety_distance: (footprint_i.length + projected_length) / 2.0,
        phi,
    }
}

/// Enumerates every ordered edge pair of distinct vehicles whose swept
/// regions intersect, including shared edges, with the full projection
/// geometry filled in. Output is sorted by (vehicle_i, vehicle_j, edge_i,
/// edge_j) regardless of thread count.
pub fn find_critical_pairs(
    graph: &WaypointGraph,
    subgraphs: &[VehicleSubgraph],
    footprints: &[Footprint],
    threads: usize,
) -> Vec<CriticalEdgePair> {
    let mut tasks: Vec<(usize, usize)> = Vec::new();
    for a in 0..subgraphs.len() {
        for b in 0..subgraphs.len() {
            if a != b {
                tasks.push((a, b));
            }
        }
    }

    let run = |&(a, b): &(usize, usize)| -> Vec<CriticalEdgePair> {
        let (si, sj) = (&subgraphs[a], &subgraphs[b]);
        let (fi, fj) = (&footprints[si.vehicle], &footprints[sj.vehicle]);
        let mut out = Vec::new();
        for &ei in &si.edges {
            let sweep_i = swept_region(graph, ei, fi);
            for &ej in &sj.edges {
                let sweep_j = swept_region(graph, ej, fj);
                if !sweep_i.intersects(&sweep_j) {
                    continue;
                }
                let theta_i = critical_region(graph, ei, fi, ej, fj)
                    .expect("swept regions intersect, so some position must conflict");
                let theta_j = critical_region(graph, ej, fj, ei, fi)
                    .expect("swept regions intersect, so some position must conflict");
                let pair = project_pair(
                    graph, si.vehicle, ei, sj.vehicle, ej, theta_i, theta_j, fi, fj,
                );
                let tol = 1e-3 * (graph.edge(ei).length + graph.edge(ej).length) + 1e-9;
                assert!(
                    pair.projection_bounds_hold(tol),
                    "projection bounds violated for pair {pair:?}"
                );
                out.push(pair);
            }
        }
        out
    };

    let mut pairs: Vec<CriticalEdgePair> = if threads > 1 && tasks.len() > 1 {
        let chunk = tasks.len().div_ceil(threads);
        let mut chunks: Vec<Vec<CriticalEdgePair>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks
                .chunks(chunk)
                .map(|slice| scope.spawn(move || slice.iter().flat_map(run).collect::<Vec<_>>()))
                .collect();
            for h in handles {
                chunks.push(h.join().expect("pair enumeration worker panicked"));
            }
        });
        chunks.into_iter().flatten().collect()
    } else {
        tasks.iter().flat_map(|t| run(t)).collect()
    };

    pairs.sort_by_key(|p| (p.vehicle_i, p.vehicle_j, p.edge_i, p.edge_j));
    pairs
}
