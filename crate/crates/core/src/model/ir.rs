//! Intermediate representation of the assembled mixed-integer linear
//! program: a variable registry, linear constraints (optionally gated by
//! big-M terms on binaries), and a linear objective.
//!
//! Gated constraints remember their gate expression and big-M value, so
//! the relaxation can be audited: a gated row must be satisfiable over the
//! whole variable box whenever its gate is open. The big-M of each row is
//! derived from exactly that interval bound, which keeps the relaxation as
//! tight as the formulation allows.

use crate::geometry::CriticalEdgePair;
use crate::graph::{EdgeId, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// Structured variable label. Vehicles are internal indices (scenario file
/// order); `inbound: None` marks a start-vertex transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarName {
    EdgeUse {
        vehicle: usize,
        edge: EdgeId,
    },
    VertexTime {
        vehicle: usize,
        vertex: VertexId,
    },
    SlackFast {
        vehicle: usize,
        edge: EdgeId,
    },
    SlackSlow {
        vehicle: usize,
        edge: EdgeId,
    },
    RegionPick {
        vehicle: usize,
        region: usize,
        vertex: VertexId,
        inbound: Option<EdgeId>,
        outbound: EdgeId,
    },
    AccelPos {
        vehicle: usize,
        region: usize,
        vertex: VertexId,
        inbound: Option<EdgeId>,
        outbound: EdgeId,
    },
    AccelNeg {
        vehicle: usize,
        region: usize,
        vertex: VertexId,
        inbound: Option<EdgeId>,
        outbound: EdgeId,
    },
    Steering {
        vehicle: usize,
        region: usize,
        vertex: VertexId,
        inbound: Option<EdgeId>,
        outbound: EdgeId,
    },
    /// Passing order binary: 1 means `first` clears the conflict region
    /// before `second` enters it.
    Precedence {
        first: usize,
        first_edge: EdgeId,
        second: usize,
        second_edge: EdgeId,
    },
    /// Free-form variable for hand-built models.
    Aux {
        id: usize,
    },
}

impl VarName {
    pub fn family(&self) -> &'static str {
        match self {
            VarName::EdgeUse { .. } => "edge_use",
            VarName::VertexTime { .. } => "vertex_time",
            VarName::SlackFast { .. } => "slack_fast",
            VarName::SlackSlow { .. } => "slack_slow",
            VarName::RegionPick { .. } => "region_pick",
            VarName::AccelPos { .. } => "accel_pos",
            VarName::AccelNeg { .. } => "accel_neg",
            VarName::Steering { .. } => "steering",
            VarName::Precedence { .. } => "precedence",
            VarName::Aux { .. } => "aux",
        }
    }
}

fn fmt_transition(
    f: &mut fmt::Formatter<'_>,
    prefix: &str,
    vehicle: usize,
    region: usize,
    vertex: VertexId,
    inbound: Option<EdgeId>,
    outbound: EdgeId,
) -> fmt::Result {
    match inbound {
        Some(a) => write!(f, "{prefix}_{vehicle}_k{region}_v{vertex}_e{a}_e{outbound}"),
        None => write!(f, "{prefix}_{vehicle}_k{region}_v{vertex}_s_e{outbound}"),
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VarName::EdgeUse { vehicle, edge } => write!(f, "y_{vehicle}_e{edge}"),
            VarName::VertexTime { vehicle, vertex } => write!(f, "t_{vehicle}_v{vertex}"),
            VarName::SlackFast { vehicle, edge } => write!(f, "sfast_{vehicle}_e{edge}"),
            VarName::SlackSlow { vehicle, edge } => write!(f, "sslow_{vehicle}_e{edge}"),
            VarName::RegionPick {
                vehicle,
                region,
                vertex,
                inbound,
                outbound,
            } => fmt_transition(f, "m", vehicle, region, vertex, inbound, outbound),
            VarName::AccelPos {
                vehicle,
                region,
                vertex,
                inbound,
                outbound,
            } => fmt_transition(f, "accp", vehicle, region, vertex, inbound, outbound),
            VarName::AccelNeg {
                vehicle,
                region,
                vertex,
                inbound,
                outbound,
            } => fmt_transition(f, "accn", vehicle, region, vertex, inbound, outbound),
            VarName::Steering {
                vehicle,
                region,
                vertex,
                inbound,
                outbound,
            } => fmt_transition(f, "steer", vehicle, region, vertex, inbound, outbound),
            VarName::Precedence {
                first,
                first_edge,
                second,
                second_edge,
            } => write!(f, "prec_{first}_e{first_edge}_{second}_e{second_edge}"),
            VarName::Aux { id } => write!(f, "x_{id}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VarDef {
    pub name: VarName,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

/// Sparse linear expression: sorted unique terms plus a constant.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LinExpr {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, var: VarId, coeff: f64) -> Self {
        self.add(var, coeff);
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn add(&mut self, var: VarId, coeff: f64) {
        self.terms.push((var, coeff));
    }

    pub fn add_scaled(&mut self, other: &LinExpr, scale: f64) {
        for &(v, c) in &other.terms {
            self.terms.push((v, c * scale));
        }
        self.constant += other.constant * scale;
    }

    /// Sort by variable, merge duplicates, drop vanishing coefficients.
    pub fn normalize(&mut self) {
        self.terms.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(VarId, f64)> = Vec::with_capacity(self.terms.len());
        for &(v, c) in &self.terms {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|&(_, c)| c.abs() > 1e-12);
        self.terms = out;
    }

    pub fn value(&self, assignment: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(v, c)| c * assignment[v.index()])
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Le => write!(f, "<="),
            Sense::Ge => write!(f, ">="),
            Sense::Eq => write!(f, "="),
        }
    }
}

/// Big-M relaxation metadata of a gated row. The stored row equals the
/// core inequality relaxed by `big_m * gate` where `gate` is a nonnegative
/// integer expression over binaries (zero = constraint active).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gate {
    pub expr: LinExpr,
    pub big_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinConstraint {
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: String,
    pub gate: Option<Gate>,
}

impl LinConstraint {
    /// Core inequality with the big-M gate terms removed.
    pub fn core(&self) -> (LinExpr, f64) {
        match &self.gate {
            None => (self.expr.clone(), self.rhs),
            Some(gate) => {
                let sign = match self.sense {
                    Sense::Le => 1.0,
                    Sense::Ge => -1.0,
                    Sense::Eq => unreachable!("equality rows are never gated"),
                };
                let mut core = self.expr.clone();
                // stored row: core - sign*M*(gate - gate.constant) folded in
                let mut gate_terms = gate.expr.clone();
                gate_terms.constant = 0.0;
                core.add_scaled(&gate_terms, sign * gate.big_m);
                core.normalize();
                (core, self.rhs + sign * gate.big_m * gate.expr.constant)
            }
        }
    }
}

/// One `[V_slow, V_fast]` cell of a vehicle's speed partition with its
/// linearization reference speed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VelocityRegion {
    pub slow: f64,
    pub fast: f64,
    pub reference: f64,
}

/// Partition of a vehicle's allowed speed range into contiguous regions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VelocityRegions {
    pub regions: Vec<VelocityRegion>,
    pub slow: f64,
    pub fast: f64,
    pub reference: f64,
}

impl VelocityRegions {
    /// Splits `[slow_factor, fast_factor] * v_ref`. Three regions use the
    /// 0.85/1.15 interior breakpoints; other counts split uniformly. The
    /// region containing the reference speed adopts it as its operating
    /// point, the rest use their midpoint.
    pub fn build(v_ref: f64, slow_factor: f64, fast_factor: f64, count: usize) -> Self {
        assert!(count >= 1, "at least one velocity region required");
        assert!(
            0.0 < slow_factor && slow_factor < 1.0 && 1.0 < fast_factor,
            "velocity factors must satisfy 0 < slow < 1 < fast"
        );
        let slow = slow_factor * v_ref;
        let fast = fast_factor * v_ref;
        let mut breaks = Vec::with_capacity(count + 1);
        if count == 3 && slow_factor < 0.85 && fast_factor > 1.15 {
            breaks.extend([slow, 0.85 * v_ref, 1.15 * v_ref, fast]);
        } else {
            for k in 0..=count {
                breaks.push(slow + (fast - slow) * k as f64 / count as f64);
            }
        }
        let mut regions: Vec<VelocityRegion> = breaks
            .windows(2)
            .map(|w| VelocityRegion {
                slow: w[0],
                fast: w[1],
                reference: (w[0] + w[1]) / 2.0,
            })
            .collect();
        if let Some(home) = regions
            .iter_mut()
            .find(|r| r.slow <= v_ref && v_ref <= r.fast)
        {
            home.reference = v_ref;
        }
        VelocityRegions {
            regions,
            slow,
            fast,
            reference: v_ref,
        }
    }
}

/// Objective weights for travel time, velocity deviation, acceleration,
/// and steering penalties.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Weights {
    pub alpha_t: f64,
    pub alpha_v: f64,
    pub alpha_a: f64,
    pub alpha_theta: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            alpha_t: 0.1,
            alpha_v: 1.0,
            alpha_a: 0.5,
            alpha_theta: 0.5,
        }
    }
}

/// One gated vertex transition of a vehicle plan, with the region-pick
/// binaries registered for it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transition {
    pub vehicle: usize,
    pub vertex: VertexId,
    pub inbound: Option<EdgeId>,
    pub outbound: EdgeId,
    pub m_vars: Vec<VarId>,
}

/// Lookup tables tying model variables back to graph entities. Edge
/// endpoints and per-vehicle task data are snapshotted so solution
/// extraction and validation do not need the original graph.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelMeta {
    pub y: BTreeMap<(usize, EdgeId), VarId>,
    pub t: BTreeMap<(usize, VertexId), VarId>,
    /// Per (vehicle, edge): (fast-side, slow-side) velocity slack.
    pub vel_slacks: BTreeMap<(usize, EdgeId), (VarId, VarId)>,
    pub transitions: Vec<Transition>,
    /// Parallel to `transitions`: per region (positive, negative) acceleration slack.
    pub accel_slacks: Vec<Vec<(VarId, VarId)>>,
    /// Parallel to `transitions`: per region steering slack.
    pub steer_slacks: Vec<Vec<VarId>>,
    /// Per canonical critical pair: (pair, var of "i before j", var of "j before i").
    pub pairs: Vec<(CriticalEdgePair, VarId, VarId)>,
    pub regions: Vec<VelocityRegions>,
    /// Edge id -> (source, target, length).
    pub edge_endpoints: BTreeMap<EdgeId, (VertexId, VertexId, f64)>,
    pub starts: Vec<VertexId>,
    pub destinations: Vec<Vec<VertexId>>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("vehicle {vehicle}: start vertex {vertex} has no outgoing edges in its subgraph")]
    EmptyOutgoing { vehicle: usize, vertex: VertexId },
    #[error("vehicle {vehicle}: no edge enters any destination in its subgraph")]
    NoDestinationInflow { vehicle: usize },
    #[error("invalid model input: {0}")]
    BadInput(String),
}

/// The assembled MILP.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelIr {
    pub vars: Vec<VarDef>,
    pub constraints: Vec<LinConstraint>,
    pub objective: LinExpr,
    pub weights: Weights,
    /// Largest big-M used by any gated row.
    pub big_m: f64,
    /// Horizon bound: every time variable lives in [0, t_max].
    pub t_max: f64,
    pub meta: ModelMeta,
}

impl ModelIr {
    pub fn add_var(&mut self, name: VarName, kind: VarKind, lb: f64, ub: f64) -> VarId {
        debug_assert!(lb <= ub, "bounds crossed for {name}");
        if kind == VarKind::Binary {
            debug_assert!(lb >= 0.0 && ub <= 1.0);
        }
        let id = VarId(self.vars.len());
        self.vars.push(VarDef { name, kind, lb, ub });
        id
    }

    pub fn var(&self, id: VarId) -> &VarDef {
        &self.vars[id.index()]
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn add_constraint(&mut self, tag: impl Into<String>, mut expr: LinExpr, sense: Sense, rhs: f64) {
        expr.normalize();
        let rhs = rhs - expr.constant;
        expr.constant = 0.0;
        self.constraints.push(LinConstraint {
            expr,
            sense,
            rhs,
            tag: tag.into(),
            gate: None,
        });
    }

    /// Adds `core (sense) rhs` relaxed by `big_m * gate`, with the big-M
    /// sized from interval arithmetic so the row is satisfiable over the
    /// whole variable box once the gate is open.
    pub fn add_gated(
        &mut self,
        tag: impl Into<String>,
        mut core: LinExpr,
        sense: Sense,
        rhs: f64,
        mut gate: LinExpr,
    ) {
        core.normalize();
        let rhs = rhs - core.constant;
        core.constant = 0.0;
        gate.normalize();
        let needed = match sense {
            Sense::Le => self.interval_max(&core) - rhs,
            Sense::Ge => rhs - self.interval_min(&core),
            Sense::Eq => panic!("equality rows cannot be gated"),
        };
        assert!(
            needed.is_finite(),
            "gated row over unbounded variables cannot be sized"
        );
        let big_m = needed.max(0.0) + 1e-6;
        self.big_m = self.big_m.max(big_m);
        let sign = match sense {
            Sense::Le => 1.0,
            Sense::Ge => -1.0,
            _ => unreachable!(),
        };
        let mut expr = core;
        let mut gate_terms = gate.clone();
        gate_terms.constant = 0.0;
        expr.add_scaled(&gate_terms, -sign * big_m);
        expr.normalize();
        self.constraints.push(LinConstraint {
            expr,
            sense,
            rhs: rhs + sign * big_m * gate.constant,
            tag: tag.into(),
            gate: Some(Gate { expr: gate, big_m }),
        });
    }

    fn interval_max(&self, expr: &LinExpr) -> f64 {
        expr.constant
            + expr
                .terms
                .iter()
                .map(|&(v, c)| {
                    let d = self.var(v);
                    (c * d.lb).max(c * d.ub)
                })
                .sum::<f64>()
    }

    fn interval_min(&self, expr: &LinExpr) -> f64 {
        expr.constant
            + expr
                .terms
                .iter()
                .map(|&(v, c)| {
                    let d = self.var(v);
                    (c * d.lb).min(c * d.ub)
                })
                .sum::<f64>()
    }

    /// Structural linearity and consistency scan: every coefficient
    /// finite, every referenced variable registered, binaries boxed in
    /// [0,1], and slack-penalty objective coefficients nonnegative.
    pub fn audit_structure(&self) -> Result<(), String> {
        let check_expr = |expr: &LinExpr, what: &str| -> Result<(), String> {
            let mut prev: Option<VarId> = None;
            for &(v, c) in &expr.terms {
                if v.index() >= self.vars.len() {
                    return Err(format!("{what}: unregistered variable {v:?}"));
                }
                if !c.is_finite() {
                    return Err(format!("{what}: non-finite coefficient on {v:?}"));
                }
                if prev == Some(v) {
                    return Err(format!("{what}: duplicate term for {v:?}"));
                }
                prev = Some(v);
            }
            Ok(())
        };
        for (i, c) in self.constraints.iter().enumerate() {
            check_expr(&c.expr, &format!("row {i} [{}]", c.tag))?;
            if !c.rhs.is_finite() {
                return Err(format!("row {i} [{}]: non-finite rhs", c.tag));
            }
        }
        check_expr(&self.objective, "objective")?;
        for def in &self.vars {
            if def.kind == VarKind::Binary && (def.lb < 0.0 || def.ub > 1.0) {
                return Err(format!("binary {} has bounds outside [0,1]", def.name));
            }
            if def.lb > def.ub {
                return Err(format!("variable {} has crossed bounds", def.name));
            }
        }
        for &(v, c) in &self.objective.terms {
            let fam = self.var(v).name.family();
            if matches!(
                fam,
                "slack_fast" | "slack_slow" | "accel_pos" | "accel_neg" | "steering"
            ) && c < 0.0
            {
                return Err(format!(
                    "objective coefficient on slack {} is negative",
                    self.var(v).name
                ));
            }
        }
        Ok(())
    }

    /// Checks every gated row against interval arithmetic: with the gate
    /// open by one unit, the core inequality must hold everywhere in the
    /// variable box.
    pub fn audit_big_m(&self) -> Result<(), String> {
        for (i, c) in self.constraints.iter().enumerate() {
            let Some(gate) = &c.gate else { continue };
            let (core, rhs) = c.core();
            let slack = match c.sense {
                Sense::Le => gate.big_m - (self.interval_max(&core) - rhs),
                Sense::Ge => gate.big_m - (rhs - self.interval_min(&core)),
                Sense::Eq => return Err(format!("row {i}: gated equality")),
            };
            if !(slack >= -1e-9) {
                return Err(format!(
                    "row {i} [{}]: big-M {:.6} short by {:.3e}",
                    c.tag, gate.big_m, -slack
                ));
            }
        }
        Ok(())
    }

    /// Counts of variables per family and constraints per tag family, the
    /// model inventory printed as a diagnostic.
    pub fn inventory(&self) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
        let mut vars = BTreeMap::new();
        for def in &self.vars {
            *vars.entry(def.name.family().to_string()).or_insert(0) += 1;
        }
        let mut cons = BTreeMap::new();
        for c in &self.constraints {
            let family = c.tag.split('[').next().unwrap_or(&c.tag).to_string();
            *cons.entry(family).or_insert(0) += 1;
        }
        (vars, cons)
    }
}
