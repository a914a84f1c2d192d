//! Best-bound branch and bound over the binary variables of an assembled
//! model, with an initial depth-first dive for a quick incumbent, plus an
//! exhaustive-enumeration oracle for small instances.

use crate::model::{ModelIr, VarKind};
use crate::solver::lp::{LpError, LpProblem, LpStatus, Simplex};
use log::debug;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::time::Instant;

/// Binary values within this distance of an integer count as integral.
const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveLimits {
    pub node_limit: Option<usize>,
    pub time_limit_s: Option<f64>,
    /// Relative optimality gap that counts as proven optimal.
    pub gap: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            node_limit: Some(1_000_000),
            time_limit_s: None,
            gap: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    /// A node, time, or gap limit stopped the search; the incumbent (if
    /// any) is returned with its proven bound gap.
    GapLimit,
}

/// One line of the machine-parsable search log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node: usize,
    pub depth: usize,
    pub bound: f64,
    pub incumbent: f64,
    pub gap: f64,
}

impl std::fmt::Display for NodeRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "node={} depth={} bound={:.9} incumbent={:.9} gap={:.3e}",
            self.node, self.depth, self.bound, self.incumbent, self.gap
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Values for every model variable (empty when no incumbent exists).
    pub assignment: Vec<f64>,
    pub objective: f64,
    pub bound_gap: f64,
    pub node_count: usize,
    pub wall_time_s: f64,
    pub log: Vec<NodeRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("model has {binaries} binary variables, above the enumeration cap {cap}")]
    TooLarge { binaries: usize, cap: usize },
}

/// Flattens a model into solver form, returning the column indices of the
/// binary variables.
pub fn model_to_lp(model: &ModelIr) -> (LpProblem, Vec<usize>) {
    let n = model.vars.len();
    let mut objective = vec![0.0; n];
    for &(v, c) in &model.objective.terms {
        objective[v.index()] = c;
    }
    let rows: Vec<Vec<(usize, f64)>> = model
        .constraints
        .iter()
        .map(|c| c.expr.terms.iter().map(|&(v, w)| (v.index(), w)).collect())
        .collect();
    let senses = model.constraints.iter().map(|c| c.sense).collect();
    let rhs = model.constraints.iter().map(|c| c.rhs).collect();
    let bounds = model.vars.iter().map(|d| (d.lb, d.ub)).collect();
    let binaries = model
        .vars
        .iter()
        .enumerate()
        .filter(|(_, d)| d.kind == VarKind::Binary)
        .map(|(i, _)| i)
        .collect();
    (
        LpProblem {
            objective,
            rows,
            senses,
            rhs,
            bounds,
        },
        binaries,
    )
}

#[derive(Debug, Clone)]
struct Node {
    id: usize,
    parent: usize,
    depth: usize,
    bound: f64,
    /// Cumulative bound fixings from the root.
    changes: Vec<(usize, f64, f64)>,
}

struct Open(Node);

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.0.bound == other.0.bound && self.0.id == other.0.id
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap: best (lowest bound, then lowest id) on top
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then(other.0.id.cmp(&self.0.id))
    }
}

/// Branching class per column: path binaries first, then passing orders,
/// then region picks. Within a class the most fractional wins, with ties
/// to the lowest variable index.
pub fn branch_priorities(model: &ModelIr) -> Vec<u8> {
    model
        .vars
        .iter()
        .map(|d| match d.name.family() {
            "edge_use" | "aux" => 0,
            "precedence" => 1,
            "region_pick" => 2,
            _ => 3,
        })
        .collect()
}

/// Linear interpolation stencil for the time at which a vehicle reaches a
/// fixed position fraction of an edge.
#[derive(Clone, Copy)]
struct TimeStencil {
    t_src: usize,
    t_tgt: usize,
    theta: f64,
}

impl TimeStencil {
    fn eval(&self, x: &[f64]) -> f64 {
        (1.0 - self.theta) * x[self.t_src] + self.theta * x[self.t_tgt]
    }
}

/// Indicator group per transition with the data to pick the region from
/// realized times, plus order pairs with the data to pick a passing order
/// from a relaxed schedule.
struct RoundingGroups {
    /// (m columns, t_first, t_last, window length, region [slow, fast]).
    one_hot: Vec<(Vec<usize>, usize, usize, f64, Vec<(f64, f64)>)>,
    /// (y_i, y_j, before, after, mid-region time of i, of j).
    orders: Vec<(usize, usize, usize, usize, TimeStencil, TimeStencil)>,
    /// Column -> (orders index, is-the-before-column).
    order_of_col: std::collections::BTreeMap<usize, (usize, bool)>,
    /// Column -> (one_hot index, region index).
    region_of_col: std::collections::BTreeMap<usize, (usize, usize)>,
}

impl RoundingGroups {
    /// Preferred branch side for a column given the current relaxation:
    /// passing orders follow the schedule, region picks follow the
    /// realized window speed.
    fn preference(&self, j: usize, x: &[f64]) -> Option<bool> {
        if let Some(&(idx, is_before)) = self.order_of_col.get(&j) {
            let (_, _, _, _, mid_i, mid_j) = self.orders[idx];
            let i_first = mid_i.eval(x) <= mid_j.eval(x);
            return Some(if is_before { i_first } else { !i_first });
        }
        if let Some(&(idx, k)) = self.region_of_col.get(&j) {
            let (_, t_first, t_last, length, bands) = &self.one_hot[idx];
            let dt = x[*t_last] - x[*t_first];
            let speed = if dt > 1e-9 { length / dt } else { f64::INFINITY };
            let mut pick = 0;
            for (kk, &(slow, fast)) in bands.iter().enumerate() {
                if speed >= slow && speed <= fast {
                    pick = kk;
                    break;
                }
                if speed > fast {
                    pick = kk;
                }
            }
            return Some(k == pick);
        }
        None
    }
}

fn build_rounding(model: &ModelIr) -> RoundingGroups {
    let one_hot = model
        .meta
        .transitions
        .iter()
        .map(|tr| {
            let cols = tr.m_vars.iter().map(|v| v.index()).collect();
            let (out_src, out_tgt, out_len) = model.meta.edge_endpoints[&tr.outbound];
            let (t_first, length) = match tr.inbound {
                Some(a) => {
                    let (in_src, _, in_len) = model.meta.edge_endpoints[&a];
                    (model.meta.t[&(tr.vehicle, in_src)].index(), in_len + out_len)
                }
                None => (model.meta.t[&(tr.vehicle, out_src)].index(), out_len),
            };
            let t_last = model.meta.t[&(tr.vehicle, out_tgt)].index();
            let bands = model.meta.regions[tr.vehicle]
                .regions
                .iter()
                .map(|r| (r.slow, r.fast))
                .collect();
            (cols, t_first, t_last, length, bands)
        })
        .collect();
    let orders = model
        .meta
        .pairs
        .iter()
        .map(|(pair, before, after)| {
            let stencil = |vehicle: usize, edge: usize, theta: (f64, f64)| {
                let (src, tgt, _) = model.meta.edge_endpoints[&edge];
                TimeStencil {
                    t_src: model.meta.t[&(vehicle, src)].index(),
                    t_tgt: model.meta.t[&(vehicle, tgt)].index(),
                    theta: 0.5 * (theta.0 + theta.1),
                }
            };
            (
                model.meta.y[&(pair.vehicle_i, pair.edge_i)].index(),
                model.meta.y[&(pair.vehicle_j, pair.edge_j)].index(),
                before.index(),
                after.index(),
                stencil(pair.vehicle_i, pair.edge_i, pair.theta_i),
                stencil(pair.vehicle_j, pair.edge_j, pair.theta_j),
            )
        })
        .collect();
    let mut groups = RoundingGroups {
        one_hot,
        orders,
        order_of_col: Default::default(),
        region_of_col: Default::default(),
    };
    for (idx, &(_, _, before, after, _, _)) in groups.orders.iter().enumerate() {
        groups.order_of_col.insert(before, (idx, true));
        groups.order_of_col.insert(after, (idx, false));
    }
    for (idx, (cols, ..)) in groups.one_hot.iter().enumerate() {
        for (k, &j) in cols.iter().enumerate() {
            groups.region_of_col.insert(j, (idx, k));
        }
    }
    groups
}

/// Route structure for guided diving: per vehicle, the start vertex and
/// the usable edges with their binary columns.
struct DiveGuide {
    per_vehicle: Vec<(usize, Vec<(usize, usize, usize)>)>,
}

fn build_guide(model: &ModelIr) -> DiveGuide {
    let mut per_vehicle = Vec::with_capacity(model.meta.starts.len());
    for (vehicle, &start) in model.meta.starts.iter().enumerate() {
        let edges: Vec<(usize, usize, usize)> = model
            .meta
            .y
            .iter()
            .filter(|((i, _), _)| *i == vehicle)
            .map(|((_, e), var)| {
                let (src, tgt, _) = model.meta.edge_endpoints[e];
                (var.index(), src, tgt)
            })
            .collect();
        per_vehicle.push((start, edges));
    }
    DiveGuide { per_vehicle }
}

impl DiveGuide {
    /// Walks each vehicle's settled path prefix and returns the column of
    /// the strongest fractional out-edge at the first undecided vertex.
    fn frontier_pick(&self, x: &[f64]) -> Option<usize> {
        for (start, edges) in &self.per_vehicle {
            let mut current = *start;
            loop {
                let mut settled_next = None;
                let mut best: Option<(usize, f64)> = None;
                for &(col, src, tgt) in edges {
                    if src != current {
                        continue;
                    }
                    if x[col] > 1.0 - INT_TOL {
                        settled_next = Some(tgt);
                        break;
                    }
                    if x[col] > INT_TOL {
                        match best {
                            Some((_, v)) if x[col] <= v => {}
                            _ => best = Some((col, x[col])),
                        }
                    }
                }
                match (settled_next, best) {
                    (Some(next), _) => current = next,
                    (None, Some((col, _))) => return Some(col),
                    (None, None) => break,
                }
            }
        }
        None
    }
}

fn pick_branch_var(x: &[f64], binaries: &[usize], priorities: &[u8]) -> Option<usize> {
    let mut best: Option<(u8, f64, usize)> = None;
    for &j in binaries {
        let frac = (x[j] - x[j].round()).abs();
        if frac <= INT_TOL {
            continue;
        }
        let score = 0.5 - (x[j].fract() - 0.5).abs();
        let class = priorities.get(j).copied().unwrap_or(0);
        let better = match best {
            None => true,
            Some((bc, bs, _)) => class < bc || (class == bc && score > bs),
        };
        if better {
            best = Some((class, score, j));
        }
    }
    best.map(|(_, _, j)| j)
}

struct Search<'a> {
    lp: &'a LpProblem,
    binaries: &'a [usize],
    priorities: Vec<u8>,
    guide: DiveGuide,
    rounding: RoundingGroups,
    last_processed: Option<usize>,
    simplex: Simplex,
    incumbent: Option<(f64, Vec<f64>)>,
    heap: BinaryHeap<Open>,
    node_count: usize,
    next_id: usize,
    log: Vec<NodeRecord>,
    limits: SolveLimits,
    started: Instant,
    best_bound_seen: f64,
    stopped: bool,
}

enum NodeOutcome {
    Pruned,
    Infeasible,
    Incumbent,
    Branched(Node, Node),
}

impl<'a> Search<'a> {
    fn gap_abs(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => self.limits.gap * (1.0 + obj.abs()),
            None => 0.0,
        }
    }

    fn hit_limit(&self) -> bool {
        if let Some(nl) = self.limits.node_limit {
            if self.node_count >= nl {
                return true;
            }
        }
        if let Some(tl) = self.limits.time_limit_s {
            if self.started.elapsed().as_secs_f64() > tl {
                return true;
            }
        }
        false
    }

    fn bounds_for(&self, node: &Node) -> Vec<(f64, f64)> {
        let mut bounds = self.lp.bounds.clone();
        for &(j, lo, hi) in &node.changes {
            bounds[j] = (lo, hi);
        }
        bounds
    }

    fn record(&mut self, node: &Node, bound: f64) {
        let incumbent = self.incumbent.as_ref().map_or(f64::INFINITY, |(o, _)| *o);
        let lb = self
            .heap
            .peek()
            .map_or(bound, |top| top.0.bound.min(bound));
        // the global best bound never regresses
        let lb = lb.max(self.best_bound_seen);
        debug_assert!(lb >= self.best_bound_seen - 1e-9);
        self.best_bound_seen = lb;
        let gap = if incumbent.is_finite() {
            (incumbent - lb).max(0.0) / (1.0 + incumbent.abs())
        } else {
            f64::INFINITY
        };
        let rec = NodeRecord {
            node: node.id,
            depth: node.depth,
            bound,
            incumbent,
            gap,
        };
        debug!("{rec}");
        self.log.push(rec);
    }

    /// Completes a routes-settled relaxation into a candidate incumbent.
    /// Stage one fixes the passing orders from the relaxed schedule (the
    /// vehicle whose conflict-region midpoint comes first goes first,
    /// which cannot deadlock). Stage two re-reads the realized window
    /// speeds and fixes each region indicator to the band containing its
    /// speed, then re-solves for exact binaries.
    fn try_round(
        &mut self,
        node_bounds: &[(f64, f64)],
        x: &[f64],
    ) -> Result<Option<(f64, Vec<f64>)>, SolverError> {
        self.last_processed = None; // the basis stops matching any node
        let mut bounds = node_bounds.to_vec();
        let fix = |bounds: &mut Vec<(f64, f64)>, j: usize, v: f64| {
            let (lo, hi) = bounds[j];
            let v = v.clamp(lo, hi);
            bounds[j] = (v, v);
        };
        // every binary follows its rounded value; the indicator groups
        // stay relaxed until stage two, the orders come from the schedule
        for &j in self.binaries {
            fix(&mut bounds, j, x[j].round());
        }
        for (cols, ..) in &self.rounding.one_hot {
            for &j in cols {
                bounds[j] = node_bounds[j];
            }
        }
        for &(yi, yj, before, after, mid_i, mid_j) in &self.rounding.orders {
            fix(&mut bounds, yi, x[yi].round());
            fix(&mut bounds, yj, x[yj].round());
            let (b, a): (f64, f64) = if x[yi].round() + x[yj].round() > 1.5 {
                if mid_i.eval(x) <= mid_j.eval(x) {
                    (1.0, 0.0)
                } else {
                    (0.0, 1.0)
                }
            } else {
                (0.0, 0.0)
            };
            // stay inside fixings the node already carries
            let (lo_b, hi_b) = node_bounds[before];
            let (lo_a, hi_a) = node_bounds[after];
            bounds[before] = (b.clamp(lo_b, hi_b), b.clamp(lo_b, hi_b));
            bounds[after] = (a.clamp(lo_a, hi_a), a.clamp(lo_a, hi_a));
        }
        debug_assert!(bounds.iter().all(|b| b.0 <= b.1));
        let staged = self.simplex.solve(&bounds, true)?;
        if staged.status != LpStatus::Optimal {
            debug!("rounding stage 1 infeasible");
            return Ok(None);
        }
        for (cols, t_first, t_last, length, bands) in &self.rounding.one_hot {
            let dt = staged.x[*t_last] - staged.x[*t_first];
            let speed = if dt > 1e-9 { length / dt } else { f64::INFINITY };
            let mut pick = 0;
            for (k, &(slow, fast)) in bands.iter().enumerate() {
                if speed >= slow && speed <= fast {
                    pick = k;
                    break;
                }
                if speed > fast {
                    pick = k; // keep the fastest band below the speed
                }
            }
            for (k, &j) in cols.iter().enumerate() {
                let v: f64 = if k == pick { 1.0 } else { 0.0 };
                let (lo, hi) = node_bounds[j];
                bounds[j] = (v.clamp(lo, hi), v.clamp(lo, hi));
            }
        }
        let sol = self.simplex.solve(&bounds, true)?;
        if sol.status != LpStatus::Optimal {
            debug!("rounding stage 2 infeasible");
        }
        Ok(match sol.status {
            LpStatus::Optimal => Some((sol.objective, sol.x)),
            _ => None,
        })
    }

    fn offer_incumbent(&mut self, obj: f64, x: Vec<f64>) -> bool {
        let better = match &self.incumbent {
            Some((best, _)) => obj < *best,
            None => true,
        };
        if better {
            debug!("incumbent improved to {obj:.9}");
            self.incumbent = Some((obj, x));
        }
        better
    }

    /// Solves one node and classifies it. Integral nodes are polished by
    /// fixing every binary at its rounded value and re-solving, so the
    /// stored incumbent carries exact 0/1 values.
    fn process(&mut self, node: &Node) -> Result<NodeOutcome, SolverError> {
        self.node_count += 1;
        let bounds = self.bounds_for(node);
        // a basis is only worth keeping when this node extends the one
        // just solved; anywhere else a fresh start is faster and steadier
        let warm = self.last_processed == Some(node.parent);
        self.last_processed = Some(node.id);
        let sol = self.simplex.solve(&bounds, warm)?;
        match sol.status {
            LpStatus::Infeasible => {
                self.record(node, f64::INFINITY);
                return Ok(NodeOutcome::Infeasible);
            }
            LpStatus::Unbounded => {
                return Err(SolverError::Lp(LpError::NumericalBreakdown(
                    "relaxation unbounded; time variables must be boxed".into(),
                )))
            }
            LpStatus::Optimal => {}
        }
        let bound = sol.objective;
        self.record(node, bound);
        if let Some((inc, _)) = &self.incumbent {
            if bound >= inc - self.gap_abs() {
                return Ok(NodeOutcome::Pruned);
            }
        }
        let frontier = self.guide.frontier_pick(&sol.x);
        let fallback = pick_branch_var(&sol.x, self.binaries, &self.priorities);
        if frontier.is_none() {
            match fallback {
                None => {
                    // fully integral: polish to exact binaries
                    let exact = self
                        .binaries
                        .iter()
                        .all(|&j| (sol.x[j] - sol.x[j].round()).abs() < 1e-9);
                    if exact {
                        self.offer_incumbent(sol.objective, sol.x);
                    } else if let Some((obj, x)) = self.try_round(&bounds, &sol.x)? {
                        self.offer_incumbent(obj, x);
                    } else {
                        debug!("polish failed at node {}, keeping raw solution", node.id);
                        self.offer_incumbent(sol.objective, sol.x);
                    }
                    return Ok(NodeOutcome::Incumbent);
                }
                Some(j) => {
                    // routes are settled: try completing by rounding, then
                    // hand both children to the queue instead of grinding
                    // the plunge through every indicator
                    let attempt = self.incumbent.is_none() || node.depth % 16 == 0;
                    if attempt {
                        if let Some((obj, x)) = self.try_round(&bounds, &sol.x)? {
                            self.offer_incumbent(obj, x);
                        }
                    }
                    let prefer = self
                        .rounding
                        .preference(j, &sol.x)
                        .unwrap_or(sol.x[j] >= 0.5);
                    // keep plunging: informed branching sees each choice's
                    // consequences through the re-solved relaxation
                    let (first, second) = self.children(node, j, bound, prefer);
                    return Ok(NodeOutcome::Branched(first, second));
                }
            }
        }
        match frontier {
            None => unreachable!("handled above"),
            Some(j) => {
                let (first, second) = self.children(node, j, bound, true);
                Ok(NodeOutcome::Branched(first, second))
            }
        }
    }

    /// Child pair for branching on column `j`; the preferred child comes
    /// first.
    fn children(&mut self, node: &Node, j: usize, bound: f64, prefer_up: bool) -> (Node, Node) {
        let mut up = node.changes.clone();
        up.push((j, 1.0, 1.0));
        let mut down = node.changes.clone();
        down.push((j, 0.0, 0.0));
        let up_node = Node {
            id: self.next_id,
            parent: node.id,
            depth: node.depth + 1,
            bound,
            changes: up,
        };
        let down_node = Node {
            id: self.next_id + 1,
            parent: node.id,
            depth: node.depth + 1,
            bound,
            changes: down,
        };
        self.next_id += 2;
        if prefer_up {
            (up_node, down_node)
        } else {
            (down_node, up_node)
        }
    }
}

/// Solves the model to proven optimality (within the relative gap) or
/// until a limit stops the search.
pub fn solve_milp(model: &ModelIr, limits: &SolveLimits) -> Result<MilpSolution, SolverError> {
    let (lp, binaries) = model_to_lp(model);
    let simplex = Simplex::new(&lp);
    let mut search = Search {
        lp: &lp,
        binaries: &binaries,
        priorities: branch_priorities(model),
        guide: build_guide(model),
        rounding: build_rounding(model),
        last_processed: None,
        simplex,
        incumbent: None,
        heap: BinaryHeap::new(),
        node_count: 0,
        next_id: 1,
        log: Vec::new(),
        limits: limits.clone(),
        started: Instant::now(),
        best_bound_seen: f64::NEG_INFINITY,
        stopped: false,
    };

    search.heap.push(Open(Node {
        id: 0,
        parent: usize::MAX,
        depth: 0,
        bound: f64::NEG_INFINITY,
        changes: Vec::new(),
    }));

    // best-bound over the open set; every popped node starts a plunge so
    // incumbents appear early and consecutive solves stay warm
    'outer: while let Some(Open(node)) = search.heap.pop() {
        if let Some((inc, _)) = &search.incumbent {
            if node.bound >= inc - search.gap_abs() {
                // heap is bound-ordered: everything left proves out too
                search.best_bound_seen = search.best_bound_seen.max(node.bound);
                break;
            }
        }
        let mut dive = Some(node);
        while let Some(node) = dive.take() {
            if search.hit_limit() {
                search.heap.push(Open(node));
                search.stopped = true;
                break 'outer;
            }
            if let Some((inc, _)) = &search.incumbent {
                if node.bound >= inc - search.gap_abs() {
                    continue;
                }
            }
            match search.process(&node)? {
                NodeOutcome::Branched(first, second) => {
                    search.heap.push(Open(second));
                    dive = Some(first);
                }
                NodeOutcome::Incumbent | NodeOutcome::Pruned | NodeOutcome::Infeasible => {}
            }
        }
    }

    let wall = search.started.elapsed().as_secs_f64();
    let (status, assignment, objective, gap) = match (&search.incumbent, search.stopped) {
        (Some((obj, x)), stopped) => {
            let lb = search
                .heap
                .peek()
                .map_or(*obj, |t| t.0.bound)
                .max(search.best_bound_seen)
                .min(*obj);
            let gap = (obj - lb).max(0.0) / (1.0 + obj.abs());
            let status = if !stopped || gap <= search.limits.gap {
                MilpStatus::Optimal
            } else {
                MilpStatus::GapLimit
            };
            (status, x.clone(), *obj, gap)
        }
        (None, true) => (MilpStatus::GapLimit, Vec::new(), f64::INFINITY, f64::INFINITY),
        (None, false) => (
            MilpStatus::Infeasible,
            Vec::new(),
            f64::INFINITY,
            f64::INFINITY,
        ),
    };
    Ok(MilpSolution {
        status,
        assignment,
        objective,
        bound_gap: gap,
        node_count: search.node_count,
        wall_time_s: wall,
        log: search.log,
    })
}

/// Exhaustive oracle: enumerates every assignment of the binary variables
/// and solves the continuous relaxation of each. Exact up to LP tolerance.
pub fn brute_force_milp(model: &ModelIr, max_binaries: usize) -> Result<MilpSolution, SolverError> {
    let (lp, binaries) = model_to_lp(model);
    if binaries.len() > max_binaries {
        return Err(SolverError::TooLarge {
            binaries: binaries.len(),
            cap: max_binaries,
        });
    }
    let started = Instant::now();
    let mut simplex = Simplex::new(&lp);
    // rows over binaries only can veto an assignment without an LP solve
    let binary_set: Vec<bool> = {
        let mut s = vec![false; lp.objective.len()];
        for &j in &binaries {
            s[j] = true;
        }
        s
    };
    let pure_rows: Vec<usize> = (0..lp.rows.len())
        .filter(|&r| lp.rows[r].iter().all(|&(j, _)| binary_set[j]))
        .collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut lps = 0usize;
    let k = binaries.len();
    for mask in 0u64..(1u64 << k) {
        let mut bounds = lp.bounds.clone();
        for (i, &j) in binaries.iter().enumerate() {
            let v = ((mask >> i) & 1) as f64;
            // respect prior fixings from the model itself
            let (lo, hi) = lp.bounds[j];
            if v < lo || v > hi {
                bounds[j] = (f64::NAN, f64::NAN);
                break;
            }
            bounds[j] = (v, v);
        }
        if bounds.iter().any(|b| b.0.is_nan()) {
            continue;
        }
        let violated = pure_rows.iter().any(|&r| {
            let act: f64 = lp.rows[r]
                .iter()
                .map(|&(j, c)| c * bounds[j].0)
                .sum();
            match lp.senses[r] {
                crate::model::Sense::Le => act > lp.rhs[r] + 1e-9,
                crate::model::Sense::Ge => act < lp.rhs[r] - 1e-9,
                crate::model::Sense::Eq => (act - lp.rhs[r]).abs() > 1e-9,
            }
        });
        if violated {
            continue;
        }
        lps += 1;
        let sol = simplex.solve(&bounds, true)?;
        if sol.status == LpStatus::Optimal {
            let better = match &best {
                Some((obj, _)) => sol.objective < *obj - 1e-12,
                None => true,
            };
            if better {
                best = Some((sol.objective, sol.x));
            }
        }
    }
    let wall = started.elapsed().as_secs_f64();
    Ok(match best {
        Some((obj, x)) => MilpSolution {
            status: MilpStatus::Optimal,
            assignment: x,
            objective: obj,
            bound_gap: 0.0,
            node_count: lps,
            wall_time_s: wall,
            log: Vec::new(),
        },
        None => MilpSolution {
            status: MilpStatus::Infeasible,
            assignment: Vec::new(),
            objective: f64::INFINITY,
            bound_gap: f64::INFINITY,
            node_count: lps,
            wall_time_s: wall,
            log: Vec::new(),
        },
    })
}
