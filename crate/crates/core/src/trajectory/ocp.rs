//! Joint tracking optimal control by direct shooting: all vehicles'
//! control sequences are optimized together with an augmented-Lagrangian
//! treatment of the pairwise circle keep-out constraints. Gradients come
//! from reverse accumulation through the rollout; box limits on the
//! controls are handled by clipping inside the line search.

use super::collision::{validate_collisions, CollisionReport};
use super::kinematics::{step_jacobians, step_kinematics, BicycleParams};
use super::{ControlInput, ReferenceTrajectory, TrajectoryError, VehicleState};
use log::debug;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ControlLimits {
    pub steer_min: f64,
    pub steer_max: f64,
    pub accel_min: f64,
    pub accel_max: f64,
}

impl Default for ControlLimits {
    fn default() -> Self {
        ControlLimits {
            steer_min: -0.6,
            steer_max: 0.6,
            accel_min: -6.0,
            accel_max: 4.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OcpSettings {
    /// State deviation weights (x, y, heading, speed).
    pub q: [f64; 4],
    /// Control weights (steer, accel).
    pub r: [f64; 2],
    pub d_safe: f64,
    pub limits: ControlLimits,
    pub wheelbase: f64,
    pub tau_s: f64,
    pub d_f: f64,
    pub d_r: f64,
    pub grad_tol: f64,
    pub violation_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub penalty_init: f64,
    pub penalty_growth: f64,
}

impl Default for OcpSettings {
    fn default() -> Self {
        OcpSettings {
            q: [20.0, 20.0, 0.0, 0.0],
            r: [20.0, 0.1],
            d_safe: 2.366,
            limits: ControlLimits::default(),
            wheelbase: 2.405,
            tau_s: 0.1,
            d_f: 2.279,
            d_r: 0.126,
            grad_tol: 1e-4,
            violation_tol: 1e-3,
            max_outer: 20,
            max_inner: 600,
            penalty_init: 10.0,
            penalty_growth: 5.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleTrajectory {
    pub vehicle: usize,
    pub states: Vec<VehicleState>,
    pub controls: Vec<ControlInput>,
    /// Q-weighted state deviation per step.
    pub tracking_cost: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySolution {
    pub vehicles: Vec<VehicleTrajectory>,
    /// Tracking plus control cost (the collision penalty excluded).
    pub objective: f64,
    pub grad_norm: f64,
    pub max_violation: f64,
    pub inner_iterations: usize,
    pub collision: CollisionReport,
}

/// Pair bookkeeping: vehicles (by slot), number of penalized steps.
struct PairSlot {
    a: usize,
    b: usize,
    steps: usize,
    lambda_base: usize,
}

struct OcpWork<'a> {
    refs: &'a [ReferenceTrajectory],
    initial: &'a [VehicleState],
    set: &'a OcpSettings,
    bicycle: BicycleParams,
    horizons: Vec<usize>,
    offsets: Vec<usize>,
    pairs: Vec<PairSlot>,
    lambda_len: usize,
}

impl<'a> OcpWork<'a> {
    fn new(
        refs: &'a [ReferenceTrajectory],
        initial: &'a [VehicleState],
        set: &'a OcpSettings,
    ) -> Self {
        let horizons: Vec<usize> = refs.iter().map(|r| r.states.len().saturating_sub(1)).collect();
        let mut offsets = Vec::with_capacity(refs.len());
        let mut acc = 0;
        for &h in &horizons {
            offsets.push(acc);
            acc += 2 * h;
        }
        let mut pairs = Vec::new();
        let mut lambda_base = 0;
        for a in 0..refs.len() {
            for b in (a + 1)..refs.len() {
                let steps = (horizons[a].min(horizons[b])).max(0);
                pairs.push(PairSlot {
                    a,
                    b,
                    steps,
                    lambda_base,
                });
                lambda_base += steps * 4;
            }
        }
        OcpWork {
            refs,
            initial,
            set,
            bicycle: BicycleParams {
                wheelbase: set.wheelbase,
                tau_s: set.tau_s,
            },
            horizons,
            offsets,
            pairs,
            lambda_len: lambda_base,
        }
    }

    fn total_controls(&self) -> usize {
        self.offsets.last().map_or(0, |&o| o) + self.horizons.last().map_or(0, |&h| 2 * h)
    }

    fn control(&self, u: &[f64], vehicle: usize, step: usize) -> ControlInput {
        let k = self.offsets[vehicle] + 2 * step;
        ControlInput {
            steer: u[k],
            accel: u[k + 1],
        }
    }

    fn bounds(&self, k: usize) -> (f64, f64) {
        if k % 2 == 0 {
            (self.set.limits.steer_min, self.set.limits.steer_max)
        } else {
            (self.set.limits.accel_min, self.set.limits.accel_max)
        }
    }

    fn project(&self, u: &mut [f64]) {
        for k in 0..u.len() {
            let (lo, hi) = self.bounds(k);
            u[k] = u[k].clamp(lo, hi);
        }
    }

    fn rollout(&self, u: &[f64]) -> Result<Vec<Vec<VehicleState>>, TrajectoryError> {
        let mut all = Vec::with_capacity(self.refs.len());
        for i in 0..self.refs.len() {
            let mut states = Vec::with_capacity(self.horizons[i] + 1);
            states.push(self.initial[i]);
            for step in 0..self.horizons[i] {
                let next =
                    step_kinematics(&states[step], &self.control(u, i, step), &self.bicycle)?;
                states.push(next);
            }
            all.push(states);
        }
        Ok(all)
    }

    /// Distances of the four circle pairs at one shared step.
    fn circle_gaps(&self, sa: &VehicleState, sb: &VehicleState) -> [(f64, f64, f64, f64); 4] {
        // entries: (offset_a, offset_b, dx, dy) folded below into distances
        let combos = [
            (self.set.d_f, self.set.d_f),
            (self.set.d_f, self.set.d_r),
            (self.set.d_r, self.set.d_f),
            (self.set.d_r, self.set.d_r),
        ];
        let mut out = [(0.0, 0.0, 0.0, 0.0); 4];
        for (k, &(da, db)) in combos.iter().enumerate() {
            let ax = sa.x + da * sa.theta.cos();
            let ay = sa.y + da * sa.theta.sin();
            let bx = sb.x + db * sb.theta.cos();
            let by = sb.y + db * sb.theta.sin();
            out[k] = (da, db, ax - bx, ay - by);
        }
        out
    }

    /// Augmented-Lagrangian objective and, optionally, its gradient.
    fn eval(
        &self,
        u: &[f64],
        lambda: &[f64],
        mu: f64,
        want_grad: bool,
    ) -> Result<(f64, Option<Vec<f64>>), TrajectoryError> {
        let states = self.rollout(u)?;
        let mut cost = 0.0;
        let n = self.refs.len();
        // per-state cost gradients
        let mut dx: Vec<Vec<[f64; 4]>> = states
            .iter()
            .map(|s| vec![[0.0; 4]; s.len()])
            .collect();
        let mut grad = vec![0.0; u.len()];

        for i in 0..n {
            for (tau, (s, r)) in states[i].iter().zip(&self.refs[i].states).enumerate() {
                let e = [s.x - r.x, s.y - r.y, s.theta - r.theta, s.v - r.v];
                for k in 0..4 {
                    cost += self.set.q[k] * e[k] * e[k];
                    if want_grad {
                        dx[i][tau][k] += 2.0 * self.set.q[k] * e[k];
                    }
                }
            }
            for step in 0..self.horizons[i] {
                let c = self.control(u, i, step);
                cost += self.set.r[0] * c.steer * c.steer + self.set.r[1] * c.accel * c.accel;
                if want_grad {
                    let k = self.offsets[i] + 2 * step;
                    grad[k] += 2.0 * self.set.r[0] * c.steer;
                    grad[k + 1] += 2.0 * self.set.r[1] * c.accel;
                }
            }
        }

        for pair in &self.pairs {
            for tau in 1..=pair.steps {
                let sa = &states[pair.a][tau];
                let sb = &states[pair.b][tau];
                for (k, (da, db, ddx, ddy)) in self.circle_gaps(sa, sb).iter().enumerate() {
                    let dist = (ddx * ddx + ddy * ddy).sqrt().max(1e-9);
                    let g = self.set.d_safe - dist;
                    let lam = lambda[pair.lambda_base + (tau - 1) * 4 + k];
                    let shifted = lam + mu * g;
                    if shifted > 0.0 {
                        cost += (shifted * shifted - lam * lam) / (2.0 * mu);
                        if want_grad {
                            // d cost / d dist = -shifted
                            let ux = ddx / dist;
                            let uy = ddy / dist;
                            let coef = -shifted;
                            let da_theta =
                                da * (-sa.theta.sin() * ux + sa.theta.cos() * uy);
                            let db_theta =
                                db * (-sb.theta.sin() * ux + sb.theta.cos() * uy);
                            dx[pair.a][tau][0] += coef * ux;
                            dx[pair.a][tau][1] += coef * uy;
                            dx[pair.a][tau][2] += coef * da_theta;
                            dx[pair.b][tau][0] -= coef * ux;
                            dx[pair.b][tau][1] -= coef * uy;
                            dx[pair.b][tau][2] -= coef * db_theta;
                        }
                    } else {
                        cost += -(lam * lam) / (2.0 * mu);
                    }
                }
            }
        }

        if !want_grad {
            return Ok((cost, None));
        }

        // backward sweep per vehicle
        for i in 0..n {
            let h = self.horizons[i];
            let mut adj = dx[i][h];
            for step in (0..h).rev() {
                let (jx, ju) = step_jacobians(
                    &states[i][step],
                    &self.control(u, i, step),
                    &self.bicycle,
                );
                let k = self.offsets[i] + 2 * step;
                for col in 0..2 {
                    let mut s = 0.0;
                    for row in 0..4 {
                        s += ju[row * 2 + col] * adj[row];
                    }
                    grad[k + col] += s;
                }
                let mut prev = dx[i][step];
                for col in 0..4 {
                    let mut s = 0.0;
                    for row in 0..4 {
                        s += jx[row * 4 + col] * adj[row];
                    }
                    prev[col] += s;
                }
                adj = prev;
            }
        }
        Ok((cost, Some(grad)))
    }

    /// Constraint values g = d_safe - dist over all penalized slots.
    fn violations(&self, states: &[Vec<VehicleState>]) -> Vec<f64> {
        let mut g = vec![0.0; self.lambda_len];
        for pair in &self.pairs {
            for tau in 1..=pair.steps {
                for (k, (_, _, ddx, ddy)) in self
                    .circle_gaps(&states[pair.a][tau], &states[pair.b][tau])
                    .iter()
                    .enumerate()
                {
                    let dist = (ddx * ddx + ddy * ddy).sqrt();
                    g[pair.lambda_base + (tau - 1) * 4 + k] = self.set.d_safe - dist;
                }
            }
        }
        g
    }

    fn projected_gradient_norm(&self, u: &[f64], grad: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..u.len() {
            let (lo, hi) = self.bounds(k);
            let step = (u[k] - grad[k]).clamp(lo, hi) - u[k];
            s += step * step;
        }
        s.sqrt()
    }
}

/// Limited-memory BFGS direction from stored (s, y) pairs.
fn lbfgs_direction(grad: &[f64], memory: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let alpha = rho * dot(s, &q);
        for k in 0..q.len() {
            q[k] -= alpha * y[k];
        }
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = memory.last() {
        let scale = dot(s, y) / dot(y, y).max(1e-300);
        for v in &mut q {
            *v *= scale;
        }
    }
    for ((s, y, rho), alpha) in memory.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for k in 0..q.len() {
            q[k] += s[k] * (alpha - beta);
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the joint tracking problem. Convergence means the projected
/// gradient of the augmented objective is below `grad_tol` or the iterate
/// is penalty-feasible with every violation under `violation_tol`.
pub fn solve_ocp(
    references: &[ReferenceTrajectory],
    initial: &[VehicleState],
    settings: &OcpSettings,
) -> Result<TrajectorySolution, TrajectoryError> {
    assert_eq!(references.len(), initial.len());
    // reject starts that already violate the keep-out distance
    for i in 0..initial.len() {
        for j in (i + 1)..initial.len() {
            let (fa, ra) = super::front_rear_circles(&initial[i], settings.d_f, settings.d_r);
            let (fb, rb) = super::front_rear_circles(&initial[j], settings.d_f, settings.d_r);
            let dist = fa
                .distance(fb)
                .min(fa.distance(rb))
                .min(ra.distance(fb))
                .min(ra.distance(rb));
            if dist < settings.d_safe - 1e-9 {
                return Err(TrajectoryError::InfeasibleStart { i, j, distance: dist });
            }
        }
    }

    let work = OcpWork::new(references, initial, settings);
    let mut u = vec![0.0; work.total_controls()];
    // start from reference-following accelerations: zero steer, zero accel
    work.project(&mut u);

    let mut lambda = vec![0.0; work.lambda_len];
    let mut mu = settings.penalty_init;
    let mut best: Option<(f64, f64, Vec<f64>)> = None; // (violation, objective, u)
    let mut total_inner = 0usize;
    let mut last_pg = f64::INFINITY;
    let mut prev_max_g = f64::INFINITY;

    for outer in 0..settings.max_outer {
        let inner_tol = (settings.grad_tol * 10f64.powi((2 - outer as i32).max(0))).max(settings.grad_tol);
        let mut memory: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
        let (mut f, g) = work.eval(&u, &lambda, mu, true)?;
        let mut grad = g.unwrap();
        for _ in 0..settings.max_inner {
            total_inner += 1;
            last_pg = work.projected_gradient_norm(&u, &grad);
            if last_pg <= inner_tol {
                break;
            }
            let mut dir = lbfgs_direction(&grad, &memory);
            // keep bound-active coordinates from pushing outward
            for k in 0..u.len() {
                let (lo, hi) = work.bounds(k);
                if (u[k] <= lo + 1e-12 && dir[k] < 0.0) || (u[k] >= hi - 1e-12 && dir[k] > 0.0) {
                    dir[k] = 0.0;
                }
            }
            if dot(&dir, &grad) >= 0.0 {
                dir = grad.iter().map(|g| -g).collect();
            }
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..50 {
                let mut trial: Vec<f64> = u
                    .iter()
                    .zip(&dir)
                    .map(|(uk, dk)| uk + alpha * dk)
                    .collect();
                work.project(&mut trial);
                let slope: f64 = grad
                    .iter()
                    .zip(trial.iter().zip(&u))
                    .map(|(g, (t, uk))| g * (t - uk))
                    .sum();
                if slope >= 0.0 {
                    alpha *= 0.5;
                    continue;
                }
                match work.eval(&trial, &lambda, mu, false) {
                    Ok((ft, _)) if ft <= f + 1e-4 * slope => {
                        let (ft2, gt) = work.eval(&trial, &lambda, mu, true)?;
                        debug_assert!(ft2 <= f + 1e-9, "line search must not increase the objective");
                        let gt = gt.unwrap();
                        let s: Vec<f64> = trial.iter().zip(&u).map(|(a, b)| a - b).collect();
                        let yv: Vec<f64> = gt.iter().zip(&grad).map(|(a, b)| a - b).collect();
                        let sy = dot(&s, &yv);
                        if sy > 1e-10 * dot(&s, &s).sqrt() * dot(&yv, &yv).sqrt() {
                            if memory.len() == 10 {
                                memory.remove(0);
                            }
                            memory.push((s, yv, 1.0 / sy));
                        }
                        u = trial;
                        f = ft2;
                        grad = gt;
                        accepted = true;
                        break;
                    }
                    _ => alpha *= 0.5,
                }
            }
            if !accepted {
                break; // stalled on this subproblem
            }
        }

        let states = work.rollout(&u)?;
        let g_all = work.violations(&states);
        let max_g = g_all.iter().cloned().fold(0.0f64, f64::max);
        let objective = pure_objective(&work, &u, &states);
        debug!(
            "outer {outer}: objective {objective:.6}, max violation {max_g:.3e}, pg {last_pg:.3e}, mu {mu:.1}"
        );
        let improved = match &best {
            Some((bv, bo, _)) => {
                (max_g <= settings.violation_tol && *bv > settings.violation_tol)
                    || (max_g <= settings.violation_tol
                        && *bv <= settings.violation_tol
                        && objective < *bo)
                    || (*bv > settings.violation_tol && max_g < *bv)
            }
            None => true,
        };
        if improved {
            best = Some((max_g, objective, u.clone()));
        }
        if max_g <= settings.violation_tol && last_pg <= settings.grad_tol {
            return Ok(build_solution(&work, &u, total_inner)?);
        }
        for (l, g) in lambda.iter_mut().zip(&g_all) {
            *l = (*l + mu * g).max(0.0);
        }
        if max_g > 0.25 * prev_max_g && max_g > settings.violation_tol {
            mu = (mu * settings.penalty_growth).min(1e8);
        }
        prev_max_g = max_g;
    }

    let (_, _, u_best) = best.expect("at least one outer iteration ran");
    let solution = build_solution(&work, &u_best, total_inner)?;
    let grad_norm = last_pg;
    let max_violation = solution.max_violation;
    if max_violation <= settings.violation_tol {
        // collision-feasible but the gradient tolerance was not met
        return Ok(solution);
    }
    Err(TrajectoryError::NotConverged {
        grad_norm,
        max_violation,
        solution: Box::new(solution),
    })
}

fn pure_objective(work: &OcpWork, u: &[f64], states: &[Vec<VehicleState>]) -> f64 {
    let mut cost = 0.0;
    for i in 0..work.refs.len() {
        for (s, r) in states[i].iter().zip(&work.refs[i].states) {
            let e = [s.x - r.x, s.y - r.y, s.theta - r.theta, s.v - r.v];
            for k in 0..4 {
                cost += work.set.q[k] * e[k] * e[k];
            }
        }
        for step in 0..work.horizons[i] {
            let c = work.control(u, i, step);
            cost += work.set.r[0] * c.steer * c.steer + work.set.r[1] * c.accel * c.accel;
        }
    }
    cost
}

fn build_solution(
    work: &OcpWork,
    u: &[f64],
    inner_iterations: usize,
) -> Result<TrajectorySolution, TrajectoryError> {
    let states = work.rollout(u)?;
    let objective = pure_objective(work, u, &states);
    let mut vehicles = Vec::with_capacity(work.refs.len());
    for i in 0..work.refs.len() {
        let tracking_cost = states[i]
            .iter()
            .zip(&work.refs[i].states)
            .map(|(s, r)| {
                let e = [s.x - r.x, s.y - r.y, s.theta - r.theta, s.v - r.v];
                (0..4).map(|k| work.set.q[k] * e[k] * e[k]).sum()
            })
            .collect();
        let controls = (0..work.horizons[i])
            .map(|step| work.control(u, i, step))
            .collect();
        vehicles.push(VehicleTrajectory {
            vehicle: work.refs[i].vehicle,
            states: states[i].clone(),
            controls,
            tracking_cost,
        });
    }
    let collision = validate_collisions(&vehicles, work.set.d_safe, work.set.d_f, work.set.d_r);
    let max_violation = (work.set.d_safe - collision.min_distance).max(0.0);
    let grad_norm = {
        let lambda = vec![0.0; work.lambda_len];
        let (_, g) = work.eval(u, &lambda, work.set.penalty_init, true)?;
        work.projected_gradient_norm(u, &g.unwrap())
    };
    Ok(TrajectorySolution {
        vehicles,
        objective,
        grad_norm,
        max_violation,
        inner_iterations,
        collision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn straight_reference(vehicle: usize, y: f64, v: f64, steps: usize) -> ReferenceTrajectory {
        let states = (0..=steps)
            .map(|k| VehicleState {
                x: v * 0.1 * k as f64,
                y,
                theta: 0.0,
                v,
            })
            .collect();
        ReferenceTrajectory {
            vehicle,
            states,
            source_vertices: Vec::new(),
            source_times: Vec::new(),
        }
    }

    #[test]
    fn feasible_reference_is_reproduced() {
        let refs = vec![straight_reference(0, 0.0, 10.0, 40)];
        let initial = vec![VehicleState {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            v: 10.0,
        }];
        let sol = solve_ocp(&refs, &initial, &OcpSettings::default()).unwrap();
        assert!(sol.objective < 1e-6, "tracking cost {}", sol.objective);
        for c in &sol.vehicles[0].controls {
            assert!(c.steer.abs() < 1e-3 && c.accel.abs() < 1e-3);
        }
    }

    #[test]
    fn converging_references_get_separated() {
        // two parallel references 2.0 m apart: closer than the keep-out
        let refs = vec![
            straight_reference(0, 0.0, 8.0, 50),
            straight_reference(1, 2.0, 8.0, 50),
        ];
        let initial = vec![
            VehicleState {
                x: 0.0,
                y: 0.0,
                theta: 0.0,
                v: 8.0,
            },
            VehicleState {
                x: 0.0,
                y: 2.0,
                theta: 0.0,
                v: 8.0,
            },
        ];
        // shift the second vehicle far enough to start feasible
        let mut refs = refs;
        let mut initial = initial;
        initial[1].y = 3.0;
        for s in &mut refs[1].states {
            s.y = 2.0; // reference still pulls it into conflict
        }
        refs[1].states[0].y = 3.0;
        let sol = solve_ocp(&refs, &initial, &OcpSettings::default()).unwrap();
        assert!(
            sol.collision.min_distance >= 2.366 - 1e-3,
            "min distance {}",
            sol.collision.min_distance
        );
    }

    #[test]
    fn infeasible_start_rejected() {
        let refs = vec![
            straight_reference(0, 0.0, 8.0, 10),
            straight_reference(1, 1.0, 8.0, 10),
        ];
        let initial = vec![
            VehicleState {
                x: 0.0,
                y: 0.0,
                theta: 0.0,
                v: 8.0,
            },
            VehicleState {
                x: 0.0,
                y: 1.0,
                theta: 0.0,
                v: 8.0,
            },
        ];
        assert!(matches!(
            solve_ocp(&refs, &initial, &OcpSettings::default()),
            Err(TrajectoryError::InfeasibleStart { .. })
        ));
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let refs = vec![
            straight_reference(0, 0.0, 9.0, 10),
            straight_reference(1, 3.0, 9.0, 10),
        ];
        let initial = vec![
            VehicleState {
                x: 0.0,
                y: 0.0,
                theta: 0.05,
                v: 9.0,
            },
            VehicleState {
                x: 1.0,
                y: 3.0,
                theta: -0.03,
                v: 8.5,
            },
        ];
        let settings = OcpSettings::default();
        let work = OcpWork::new(&refs, &initial, &settings);
        let mut state = 42u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut u = vec![0.0; work.total_controls()];
        for (k, v) in u.iter_mut().enumerate() {
            *v = if k % 2 == 0 {
                (next() - 0.5) * 0.4
            } else {
                (next() - 0.5) * 2.0
            };
        }
        let lambda: Vec<f64> = (0..work.lambda_len).map(|_| next() * 2.0).collect();
        let mu = 15.0;
        let (_, grad) = work.eval(&u, &lambda, mu, true).unwrap();
        let grad = grad.unwrap();
        let h = 1e-5;
        for k in (0..u.len()).step_by(3) {
            let mut up = u.clone();
            let mut um = u.clone();
            up[k] += h;
            um[k] -= h;
            let (fp, _) = work.eval(&up, &lambda, mu, false).unwrap();
            let (fm, _) = work.eval(&um, &lambda, mu, false).unwrap();
            let fd = (fp - fm) / (2.0 * h);
            let denom = fd.abs().max(grad[k].abs()).max(1e-8);
            assert!(
                (grad[k] - fd).abs() / denom <= 1e-4,
                "entry {k}: analytic {} vs fd {}",
                grad[k],
                fd
            );
        }
    }

    #[test]
    fn cost_not_worse_than_zero_control_baseline() {
        let refs = vec![straight_reference(0, 0.0, 10.0, 30)];
        let initial = vec![VehicleState {
            x: 0.0,
            y: 0.5,
            theta: 0.0,
            v: 9.0,
        }];
        let settings = OcpSettings::default();
        let work = OcpWork::new(&refs, &initial, &settings);
        let zero = vec![0.0; work.total_controls()];
        let lambda = vec![0.0; work.lambda_len];
        let (f_zero, _) = work.eval(&zero, &lambda, settings.penalty_init, false).unwrap();
        let sol = solve_ocp(&refs, &initial, &settings).unwrap();
        assert!(sol.objective <= f_zero + 1e-9);
    }

    #[test]
    fn states_are_the_rollout_of_controls() {
        let refs = vec![straight_reference(0, 0.0, 10.0, 25)];
        let initial = vec![VehicleState {
            x: 0.0,
            y: 0.3,
            theta: 0.02,
            v: 9.5,
        }];
        let settings = OcpSettings::default();
        let sol = solve_ocp(&refs, &initial, &settings).unwrap();
        let p = BicycleParams {
            wheelbase: settings.wheelbase,
            tau_s: settings.tau_s,
        };
        let mut s = initial[0];
        for (k, c) in sol.vehicles[0].controls.iter().enumerate() {
            s = step_kinematics(&s, c, &p).unwrap();
            let t = &sol.vehicles[0].states[k + 1];
            assert!(
                (s.x - t.x).abs() <= 1e-9
                    && (s.y - t.y).abs() <= 1e-9
                    && (s.theta - t.theta).abs() <= 1e-9
                    && (s.v - t.v).abs() <= 1e-9
            );
        }
    }

    #[test]
    fn trivial_horizon_is_handled() {
        let refs = vec![ReferenceTrajectory {
            vehicle: 0,
            states: vec![VehicleState {
                x: 0.0,
                y: 0.0,
                theta: 0.0,
                v: 5.0,
            }],
            source_vertices: Vec::new(),
            source_times: Vec::new(),
        }];
        let initial = vec![VehicleState {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            v: 5.0,
        }];
        let sol = solve_ocp(&refs, &initial, &OcpSettings::default()).unwrap();
        assert_relative_eq!(sol.objective, 0.0);
        assert!(sol.vehicles[0].controls.is_empty());
    }
}
