//! Bounded-variable primal simplex with a product-form basis inverse.
//!
//! The solver works on rows brought to equality form by one slack per row.
//! Phase 1 drives the summed bound violations of basic variables to zero
//! with composite piecewise-linear costs; phase 2 优化 the true objective.
//! The basis inverse is a list of eta vectors, rebuilt periodically by
//! reinversion that peels column singletons first so triangular parts of
//! the basis produce no fill.

use crate::model::Sense;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Feasibility tolerance on primal values.
const FEAS_TOL: f64 = 1e-7;
/// Reduced-cost tolerance for entering candidates.
const DUAL_TOL: f64 = 1e-7;
/// Smallest pivot magnitude accepted.
const PIVOT_TOL: f64 = 1e-9;
/// Step below which an iteration counts as degenerate.
const DEGEN_TOL: f64 = 1e-10;
/// Consecutive degenerate pivots before Bland's rule engages.
const BLAND_TRIGGER: u32 = 50;
/// Eta-file length that triggers reinversion.
const REFACTOR_ETAS: usize = 128;

/// Row-major sparse LP: minimize `objective . x` subject to
/// `rows[i] . x (senses[i]) rhs[i]` and `bounds[j].0 <= x_j <= bounds[j].1`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values (empty unless optimal).
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Row duals at the final basis (optimal only).
    pub duals: Vec<f64>,
    /// Structural reduced costs at the final basis (optimal only).
    pub reduced_costs: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("numerical breakdown in simplex: {0}")]
    NumericalBreakdown(String),
}

/// Solves from a cold (all-slack) basis.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let mut simplex = Simplex::new(problem);
    simplex.solve(&problem.bounds, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VStat {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable parked at zero.
    Free,
}

#[derive(Debug, Clone)]
struct Eta {
    pivot_row: usize,
    pivot_val: f64,
    /// Off-pivot nonzeros (row, value).
    entries: Vec<(usize, f64)>,
}

/// Reusable simplex state: keeps the basis between solves so branch and
/// bound restarts warm after bound changes.
pub struct Simplex {
    m: usize,
    n: usize,
    // structural columns, CSC
    col_ptr: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    basic: Vec<usize>,
    vstat: Vec<VStat>,
    xval: Vec<f64>,
    etas: Vec<Eta>,
    degenerate_run: u32,
    iterations: usize,
}

impl Simplex {
    pub fn new(problem: &LpProblem) -> Self {
        let m = problem.rows.len();
        let n = problem.objective.len();
        let mut col_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (r, row) in problem.rows.iter().enumerate() {
            for &(j, v) in row {
                assert!(j < n, "row references unknown column {j}");
                col_entries[j].push((r, v));
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut col_rows = Vec::new();
        let mut col_vals = Vec::new();
        col_ptr.push(0);
        for entries in &col_entries {
            for &(r, v) in entries {
                col_rows.push(r);
                col_vals.push(v);
            }
            col_ptr.push(col_rows.len());
        }
        let mut cost = problem.objective.clone();
        cost.resize(n + m, 0.0);
        let mut lb = vec![0.0; n + m];
        let mut ub = vec![0.0; n + m];
        for r in 0..m {
            let (slo, shi) = match problem.senses[r] {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb[n + r] = slo;
            ub[n + r] = shi;
        }
        Simplex {
            m,
            n,
            col_ptr,
            col_rows,
            col_vals,
            cost,
            rhs: problem.rhs.clone(),
            lb,
            ub,
            basic: Vec::new(),
            vstat: Vec::new(),
            xval: Vec::new(),
            etas: Vec::new(),
            degenerate_run: 0,
            iterations: 0,
        }
    }

    pub fn num_structurals(&self) -> usize {
        self.n
    }

    /// Solves with the given structural bounds. With `warm` the previous
    /// basis is kept; nonbasic variables outside their new bounds are
    /// snapped to the nearest bound before phase 1 repairs feasibility.
    pub fn solve(&mut self, bounds: &[(f64, f64)], warm: bool) -> Result<LpSolution, LpError> {
        assert_eq!(bounds.len(), self.n);
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            debug_assert!(lo <= hi);
            self.lb[j] = lo;
            self.ub[j] = hi;
        }
        self.iterations = 0;
        self.degenerate_run = 0;

        if !warm || self.basic.len() != self.m {
            self.set_slack_basis();
        } else {
            for j in 0..self.n + self.m {
                if self.vstat[j] == VStat::Basic {
                    continue;
                }
                self.vstat[j] = self.nonbasic_status(j);
                self.xval[j] = self.nonbasic_value(j);
            }
            self.refactor()
                .map_err(|e| LpError::NumericalBreakdown(e))?;
        }
        self.compute_basic_values();

        if !self.phase1()? {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: f64::INFINITY,
                iterations: self.iterations,
                duals: Vec::new(),
                reduced_costs: Vec::new(),
            });
        }
        self.phase2()
    }

    fn set_slack_basis(&mut self) {
        self.basic = (self.n..self.n + self.m).collect();
        self.vstat = vec![VStat::AtLower; self.n + self.m];
        self.xval = vec![0.0; self.n + self.m];
        for j in 0..self.n + self.m {
            self.vstat[j] = self.nonbasic_status(j);
            self.xval[j] = self.nonbasic_value(j);
        }
        for r in 0..self.m {
            self.vstat[self.n + r] = VStat::Basic;
        }
        self.etas.clear();
    }

    fn nonbasic_status(&self, j: usize) -> VStat {
        if self.lb[j].is_finite() {
            VStat::AtLower
        } else if self.ub[j].is_finite() {
            VStat::AtUpper
        } else {
            VStat::Free
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.nonbasic_status(j) {
            VStat::AtLower => self.lb[j],
            VStat::AtUpper => self.ub[j],
            _ => 0.0,
        }
    }

    /// Column j of the full [A | I] matrix scattered into `out`.
    fn scatter_column(&self, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if j >= self.n {
            out[j - self.n] = 1.0;
        } else {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                out[self.col_rows[k]] = self.col_vals[k];
            }
        }
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j >= self.n {
            y[j - self.n]
        } else {
            let mut s = 0.0;
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                s += self.col_vals[k] * y[self.col_rows[k]];
            }
            s
        }
    }

    /// v <- B^{-1} v via the eta file.
    fn ftran(&self, v: &mut [f64]) {
        for eta in &self.etas {
            let vr = v[eta.pivot_row];
            if vr == 0.0 {
                continue;
            }
            let piv = vr / eta.pivot_val;
            v[eta.pivot_row] = piv;
            for &(r, w) in &eta.entries {
                v[r] -= w * piv;
            }
        }
    }

    /// y <- B^{-T} y via the eta file in reverse.
    fn btran(&self, y: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut dot = 0.0;
            for &(r, w) in &eta.entries {
                dot += w * y[r];
            }
            y[eta.pivot_row] = (y[eta.pivot_row] - dot) / eta.pivot_val;
        }
    }

    fn push_eta(&mut self, pivot_row: usize, w: &[f64]) {
        let entries: Vec<(usize, f64)> = w
            .iter()
            .enumerate()
            .filter(|&(r, &v)| r != pivot_row && v != 0.0)
            .map(|(r, &v)| (r, v))
            .collect();
        self.etas.push(Eta {
            pivot_row,
            pivot_val: w[pivot_row],
            entries,
        });
    }

    /// Rebuilds the eta file for the current basic set. Slacks sit on
    /// their own rows without an eta; structural column singletons are
    /// peeled next (no fill on triangular parts); the remaining bump
    /// columns pivot on their largest live entry. A dependent basic
    /// column is demoted and the uncovered row falls back to its slack.
    fn refactor(&mut self) -> Result<(), String> {
        self.etas.clear();
        let mut active_row = vec![true; self.m];
        let mut assigned: Vec<Option<usize>> = vec![None; self.m]; // row -> basic var
        let mut structurals: Vec<usize> = Vec::new();
        for &j in &self.basic {
            if j >= self.n {
                debug_assert!(active_row[j - self.n], "duplicate slack in basis");
                assigned[j - self.n] = Some(j);
                active_row[j - self.n] = false;
            } else {
                structurals.push(j);
            }
        }

        // singleton peel with decrement bookkeeping
        let mut count: Vec<usize> = structurals
            .iter()
            .map(|&j| {
                (self.col_ptr[j]..self.col_ptr[j + 1])
                    .filter(|&k| active_row[self.col_rows[k]])
                    .count()
            })
            .collect();
        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); self.m];
        for (idx, &j) in structurals.iter().enumerate() {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                row_cols[self.col_rows[k]].push(idx);
            }
        }
        let mut peeled = vec![false; structurals.len()];
        let mut queue: Vec<usize> = (0..structurals.len()).filter(|&i| count[i] == 1).collect();
        let mut peel_order: Vec<(usize, usize)> = Vec::new(); // (structural idx, row)
        while let Some(idx) = queue.pop() {
            if peeled[idx] || count[idx] != 1 {
                continue;
            }
            let j = structurals[idx];
            let Some(r) = (self.col_ptr[j]..self.col_ptr[j + 1])
                .map(|k| self.col_rows[k])
                .find(|&r| active_row[r])
            else {
                continue;
            };
            peeled[idx] = true;
            active_row[r] = false;
            assigned[r] = Some(j);
            peel_order.push((idx, r));
            for &other in &row_cols[r] {
                if !peeled[other] && count[other] > 0 {
                    count[other] -= 1;
                    if count[other] == 1 {
                        queue.push(other);
                    }
                }
            }
        }
        let mut bump: Vec<usize> = (0..structurals.len()).filter(|&i| !peeled[i]).collect();
        bump.sort_by_key(|&i| (count[i], structurals[i]));

        let mut w = vec![0.0; self.m];
        for (idx, hint) in peel_order
            .into_iter()
            .map(|(i, r)| (i, Some(r)))
            .chain(bump.into_iter().map(|i| (i, None)))
        {
            let j = structurals[idx];
            self.scatter_column(j, &mut w);
            self.ftran(&mut w);
            let row = match hint {
                Some(r) if w[r].abs() > PIVOT_TOL => Some(r),
                other => {
                    // release a numerically dead peel assignment
                    if let Some(r) = other {
                        active_row[r] = true;
                        assigned[r] = None;
                    }
                    let mut best = None;
                    let mut best_mag = PIVOT_TOL;
                    for r in 0..self.m {
                        if active_row[r] && w[r].abs() > best_mag {
                            best_mag = w[r].abs();
                            best = Some(r);
                        }
                    }
                    best
                }
            };
            match row {
                Some(r) => {
                    assigned[r] = Some(j);
                    active_row[r] = false;
                    self.push_eta(r, &w);
                }
                None => {
                    // dependent column leaves the basis
                    self.vstat[j] = self.nonbasic_status(j);
                    self.xval[j] = self.nonbasic_value(j);
                }
            }
        }
        // uncovered rows fall back to their slack
        for r in 0..self.m {
            if assigned[r].is_none() {
                let slack = self.n + r;
                assigned[r] = Some(slack);
                self.scatter_column(slack, &mut w);
                self.ftran(&mut w);
                if w[r].abs() <= PIVOT_TOL {
                    return Err("singular basis after slack repair".into());
                }
                self.push_eta(r, &w);
            }
        }
        for r in 0..self.m {
            self.basic[r] = assigned[r].expect("all rows assigned");
            self.vstat[self.basic[r]] = VStat::Basic;
        }
        Ok(())
    }

    /// x_B <- B^{-1} (b - N x_N).
    fn compute_basic_values(&mut self) {
        let mut v = self.rhs.clone();
        for j in 0..self.n + self.m {
            if self.vstat[j] != VStat::Basic && self.xval[j] != 0.0 {
                let xj = self.xval[j];
                if j >= self.n {
                    v[j - self.n] -= xj;
                } else {
                    for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                        v[self.col_rows[k]] -= self.col_vals[k] * xj;
                    }
                }
            }
        }
        self.ftran(&mut v);
        for r in 0..self.m {
            self.xval[self.basic[r]] = v[r];
        }
    }

    fn infeasibility(&self) -> f64 {
        let mut total = 0.0;
        for r in 0..self.m {
            let j = self.basic[r];
            let x = self.xval[j];
            if x < self.lb[j] - FEAS_TOL {
                total += self.lb[j] - x;
            } else if x > self.ub[j] + FEAS_TOL {
                total += x - self.ub[j];
            }
        }
        total
    }

    /// Returns false when the problem is primal infeasible.
    fn phase1(&mut self) -> Result<bool, LpError> {
        let max_iter = 200 * (self.m + self.n) + 20_000;
        loop {
            if self.infeasibility() <= FEAS_TOL {
                return Ok(true);
            }
            if self.iterations > max_iter {
                return Err(LpError::NumericalBreakdown(format!(
                    "phase-1 iteration limit at infeasibility {:.3e}",
                    self.infeasibility()
                )));
            }
            // composite costs: -1 below the lower bound, +1 above the upper
            let mut cb = vec![0.0; self.m];
            for r in 0..self.m {
                let j = self.basic[r];
                if self.xval[j] < self.lb[j] - FEAS_TOL {
                    cb[r] = -1.0;
                } else if self.xval[j] > self.ub[j] + FEAS_TOL {
                    cb[r] = 1.0;
                }
            }
            self.btran(&mut cb);
            let entering = self.price(&cb, None);
            let Some((q, dir)) = entering else {
                // phase-1 optimal but infeasibility remains
                return Ok(false);
            };
            self.step(q, dir, true)?;
        }
    }

    fn phase2(&mut self) -> Result<LpSolution, LpError> {
        let max_iter = 200 * (self.m + self.n) + 20_000;
        loop {
            if self.iterations > max_iter {
                return Err(LpError::NumericalBreakdown(
                    "phase-2 iteration limit".into(),
                ));
            }
            let mut y = vec![0.0; self.m];
            for r in 0..self.m {
                y[r] = self.cost[self.basic[r]];
            }
            self.btran(&mut y);
            let entering = self.price(&y, Some(&self.cost));
            let Some((q, dir)) = entering else {
                return Ok(self.extract_solution(&y));
            };
            match self.step(q, dir, false)? {
                StepOutcome::Moved => {}
                StepOutcome::Unbounded => {
                    return Ok(LpSolution {
                        status: LpStatus::Unbounded,
                        x: Vec::new(),
                        objective: f64::NEG_INFINITY,
                        iterations: self.iterations,
                        duals: Vec::new(),
                        reduced_costs: Vec::new(),
                    });
                }
            }
        }
    }

    /// Dantzig pricing over all nonbasic columns; Bland's smallest-index
    /// rule takes over after a run of degenerate pivots. Returns the
    /// entering column and its direction of motion.
    fn price(&self, y: &[f64], cost: Option<&[f64]>) -> Option<(usize, f64)> {
        let bland = self.degenerate_run >= BLAND_TRIGGER;
        let mut best: Option<(usize, f64, f64)> = None; // (col, dir, |d|)
        for j in 0..self.n + self.m {
            let stat = self.vstat[j];
            if stat == VStat::Basic || self.lb[j] == self.ub[j] {
                continue;
            }
            let cj = cost.map_or(0.0, |c| c[j]);
            let d = cj - self.column_dot(j, y);
            let candidate = match stat {
                VStat::AtLower if d < -DUAL_TOL => Some((j, 1.0, -d)),
                VStat::AtUpper if d > DUAL_TOL => Some((j, -1.0, d)),
                VStat::Free if d.abs() > DUAL_TOL => Some((j, if d < 0.0 { 1.0 } else { -1.0 }, d.abs())),
                _ => None,
            };
            let Some(cand) = candidate else { continue };
            if bland {
                return Some((cand.0, cand.1));
            }
            match best {
                Some((_, _, mag)) if cand.2 <= mag => {}
                _ => best = Some(cand),
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn step(&mut self, q: usize, dir: f64, phase1: bool) -> Result<StepOutcome, LpError> {
        self.iterations += 1;
        let mut w = vec![0.0; self.m];
        self.scatter_column(q, &mut w);
        self.ftran(&mut w);

        // ratio test over basic variables; in phase 1 an infeasible basic
        // moving toward its violated bound stops there (cost kink)
        let bland = self.degenerate_run >= BLAND_TRIGGER;
        let own_range = self.ub[q] - self.lb[q];
        let mut limit = if own_range.is_finite() { own_range } else { f64::INFINITY };
        let mut leaving: Option<(usize, f64, f64)> = None; // (row, |pivot|, bound hit)
        for r in 0..self.m {
            if w[r].abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basic[r];
            let rate = -dir * w[r];
            let x = self.xval[j];
            let below = x < self.lb[j] - FEAS_TOL;
            let above = x > self.ub[j] + FEAS_TOL;
            let _ = phase1; // infeasible basics only exist during phase 1
            let (dist, bound) = if rate > 0.0 {
                if above {
                    continue; // rising further above: the kink is already priced
                } else if below {
                    (self.lb[j] - x, self.lb[j]) // rising toward its violated lower bound
                } else if self.ub[j].is_finite() {
                    (self.ub[j] - x, self.ub[j])
                } else {
                    continue;
                }
            } else if below {
                continue; // sinking further below: the kink is already priced
            } else if above {
                (x - self.ub[j], self.ub[j])
            } else if self.lb[j].is_finite() {
                (x - self.lb[j], self.lb[j])
            } else {
                continue;
            };
            let ratio = (dist.max(0.0)) / rate.abs();
            let better = match leaving {
                None => ratio < limit - 1e-12,
                Some((r_old, mag_old, _)) => {
                    if bland {
                        ratio < limit - 1e-12
                            || (ratio <= limit + 1e-12 && self.basic[r] < self.basic[r_old])
                    } else {
                        ratio < limit - 1e-12
                            || (ratio <= limit + 1e-12 && w[r].abs() > mag_old)
                    }
                }
            };
            if better {
                limit = ratio.max(0.0);
                leaving = Some((r, w[r].abs(), bound));
            }
        }

        if limit.is_infinite() {
            if phase1 {
                return Err(LpError::NumericalBreakdown(
                    "unbounded ray in phase 1".into(),
                ));
            }
            return Ok(StepOutcome::Unbounded);
        }

        let delta = limit;
        if delta > DEGEN_TOL {
            self.degenerate_run = 0;
        } else {
            self.degenerate_run += 1;
        }

        match leaving {
            None => {
                // bound flip of the entering variable
                for r in 0..self.m {
                    if w[r] != 0.0 {
                        self.xval[self.basic[r]] -= dir * w[r] * delta;
                    }
                }
                self.xval[q] += dir * delta;
                self.vstat[q] = match self.vstat[q] {
                    VStat::AtLower => VStat::AtUpper,
                    VStat::AtUpper => VStat::AtLower,
                    other => other,
                };
                // snap exactly
                self.xval[q] = match self.vstat[q] {
                    VStat::AtLower => self.lb[q],
                    VStat::AtUpper => self.ub[q],
                    _ => self.xval[q],
                };
            }
            Some((r, _, bound)) => {
                for i in 0..self.m {
                    if w[i] != 0.0 {
                        self.xval[self.basic[i]] -= dir * w[i] * delta;
                    }
                }
                self.xval[q] += dir * delta;
                let leaving_var = self.basic[r];
                self.xval[leaving_var] = bound;
                self.vstat[leaving_var] = if (bound - self.lb[leaving_var]).abs() < 1e-12 {
                    VStat::AtLower
                } else {
                    VStat::AtUpper
                };
                self.basic[r] = q;
                self.vstat[q] = VStat::Basic;
                self.push_eta(r, &w);
                if self.etas.len() > REFACTOR_ETAS {
                    self.refactor().map_err(LpError::NumericalBreakdown)?;
                    self.compute_basic_values();
                }
            }
        }
        Ok(StepOutcome::Moved)
    }

    fn extract_solution(&self, y: &[f64]) -> LpSolution {
        let mut x = vec![0.0; self.n];
        let mut objective = 0.0;
        for j in 0..self.n {
            x[j] = self.xval[j];
            objective += self.cost[j] * x[j];
        }
        let reduced_costs = (0..self.n)
            .map(|j| self.cost[j] - self.column_dot(j, y))
            .collect();
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            iterations: self.iterations,
            duals: y.to_vec(),
            reduced_costs,
        }
    }
}

enum StepOutcome {
    Moved,
    Unbounded,
}

/// Independent optimality certificate: primal feasibility, dual sign
/// conditions, and complementary slackness at the reported solution.
pub fn verify_kkt(problem: &LpProblem, sol: &LpSolution, tol: f64) -> Result<(), String> {
    if sol.status != LpStatus::Optimal {
        return Err("solution is not optimal".into());
    }
    let n = problem.objective.len();
    for j in 0..n {
        let (lo, hi) = problem.bounds[j];
        if sol.x[j] < lo - tol || sol.x[j] > hi + tol {
            return Err(format!("x[{j}] = {} violates bounds", sol.x[j]));
        }
    }
    let row_activity: Vec<f64> = problem
        .rows
        .iter()
        .map(|row| row.iter().map(|&(j, v)| v * sol.x[j]).sum())
        .collect();
    for (r, &act) in row_activity.iter().enumerate() {
        let scale = 1.0 + problem.rhs[r].abs();
        let resid = act - problem.rhs[r];
        let ok = match problem.senses[r] {
            Sense::Le => resid <= tol * scale,
            Sense::Ge => resid >= -tol * scale,
            Sense::Eq => resid.abs() <= tol * scale,
        };
        if !ok {
            return Err(format!("row {r} violated by {resid:.3e}"));
        }
        // dual sign: y <= 0 for <=-rows, y >= 0 for >=-rows (minimization,
        // slack in [0, inf) resp. (-inf, 0])
        let y = sol.duals[r];
        let sign_ok = match problem.senses[r] {
            Sense::Le => y <= tol,
            Sense::Ge => y >= -tol,
            Sense::Eq => true,
        };
        if !sign_ok {
            return Err(format!("dual sign violated on row {r}: {y:.3e}"));
        }
        // complementary slackness on rows
        if matches!(problem.senses[r], Sense::Le | Sense::Ge) && y.abs() > tol {
            let slack = problem.rhs[r] - act;
            if slack.abs() > 1e-6 * scale {
                return Err(format!(
                    "complementary slackness violated on row {r}: y={y:.3e}, slack={slack:.3e}"
                ));
            }
        }
    }
    // reduced-cost conditions on structurals
    for j in 0..n {
        let d = sol.reduced_costs[j];
        let (lo, hi) = problem.bounds[j];
        if lo == hi {
            continue;
        }
        let at_lower = (sol.x[j] - lo).abs() <= 1e-6 * (1.0 + lo.abs());
        let at_upper = (sol.x[j] - hi).abs() <= 1e-6 * (1.0 + hi.abs());
        if at_lower && !at_upper {
            if d < -tol {
                return Err(format!("reduced cost on x[{j}] at lower bound: {d:.3e}"));
            }
        } else if at_upper && !at_lower {
            if d > tol {
                return Err(format!("reduced cost on x[{j}] at upper bound: {d:.3e}"));
            }
        } else if !at_lower && !at_upper && d.abs() > 1e-6 {
            return Err(format!("nonzero reduced cost on interior x[{j}]: {d:.3e}"));
        }
    }
    Ok(())
}
