//! End-to-end pipeline: extend the graph with vehicle start vertices,
//! extract subgraphs, enumerate conflicts, assemble and solve the program,
//! refine trajectories, validate everything, and write the run artifacts.

use crate::decision::{
    extract_decision, validate_path_structure, validate_region_consistency,
    validate_separation, validate_velocity_envelope, CheckReport, DecisionError,
    DecisionSolution,
};
use crate::geometry::{find_critical_pairs, CriticalEdgePair, Footprint};
use crate::graph::{GraphError, VehicleSubgraph, WaypointGraph};
use crate::model::{assemble, MilpInput, ModelError, ModelIr, VehicleParams};
use crate::scenario::{Scenario, ScenarioError};
use crate::solver::{
    brute_force_milp, solve_milp, MilpSolution, MilpStatus, SolveLimits, SolverError,
};
use crate::trajectory::{
    decision_to_reference, solve_ocp, TrajectoryError, TrajectorySolution, VehicleState,
};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error("trajectory phase failed: {0}")]
    Trajectory(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("oracle mode requires at most {cap} binaries, model has {binaries}")]
    OracleTooLarge { binaries: usize, cap: usize },
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub decision_only: bool,
    pub threads: usize,
    /// Overrides of the scenario's solver limits.
    pub node_limit: Option<usize>,
    pub time_limit_s: Option<f64>,
    pub gap: Option<f64>,
}

/// Scenario graph extended with one start vertex per vehicle, plus the
/// per-vehicle subgraphs and footprints.
pub struct PreparedScene {
    pub graph: WaypointGraph,
    pub subgraphs: Vec<VehicleSubgraph>,
    pub starts: Vec<usize>,
    pub footprints: Vec<Footprint>,
}

pub fn prepare(scenario: &Scenario) -> Result<PreparedScene, PipelineError> {
    let mut graph = scenario.graph.clone();
    let k = scenario.spec.milp.extension_edges;
    let mut starts = Vec::new();
    for (idx, v) in scenario.spec.vehicles.iter().enumerate() {
        let pos = crate::math::Vec2::new(v.position[0], v.position[1]);
        let start = graph.extend_with_start(pos, scenario.vehicle_heading(idx), k)?;
        starts.push(start);
    }
    graph.check_acyclic()?;
    let mut subgraphs = Vec::new();
    for (idx, v) in scenario.spec.vehicles.iter().enumerate() {
        subgraphs.push(graph.extract_subgraph(idx, starts[idx], &v.destinations)?);
    }
    let footprints = scenario
        .spec
        .vehicles
        .iter()
        .map(|v| Footprint::new(v.length, v.width))
        .collect();
    Ok(PreparedScene {
        graph,
        subgraphs,
        starts,
        footprints,
    })
}

pub fn conflicts(scene: &PreparedScene, threads: usize) -> Vec<CriticalEdgePair> {
    find_critical_pairs(
        &scene.graph,
        &scene.subgraphs,
        &scene.footprints,
        threads.max(1),
    )
}

pub fn build_model(
    scenario: &Scenario,
    scene: &PreparedScene,
    pairs: &[CriticalEdgePair],
) -> Result<ModelIr, PipelineError> {
    let vehicles: Vec<VehicleParams> = scenario
        .spec
        .vehicles
        .iter()
        .enumerate()
        .map(|(idx, v)| VehicleParams {
            initial_velocity: v.initial_velocity,
            reference_velocity: v.reference_velocity,
            slow_factor: v.slow_factor,
            fast_factor: v.fast_factor,
            initial_heading: scenario.vehicle_heading(idx),
        })
        .collect();
    let input = MilpInput {
        graph: &scene.graph,
        subgraphs: &scene.subgraphs,
        vehicles: &vehicles,
        pairs,
        weights: scenario.weights(),
        region_count: scenario.spec.milp.regions,
        gamma_max: scenario.spec.milp.gamma_max,
        gamma_min: scenario.spec.milp.gamma_min,
        eta_max: scenario.spec.milp.eta_max,
    };
    Ok(assemble(&input)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelStats {
    pub variables: usize,
    pub binaries: usize,
    pub constraints: usize,
    pub critical_pairs: usize,
    pub t_max: f64,
    pub big_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSummary {
    pub status: String,
    pub objective: f64,
    pub bound_gap: f64,
    pub nodes: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub prepare_s: f64,
    pub conflicts_s: f64,
    pub assemble_s: f64,
    pub solve_s: f64,
    pub trajectory_s: f64,
    pub validate_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub model: ModelStats,
    pub solver: SolverSummary,
    /// Per vehicle (external id): destination arrival time.
    pub arrivals: Vec<(usize, f64)>,
    pub checks: Vec<CheckReport>,
    pub phase_times: PhaseTimes,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.solver.status != "infeasible" && self.checks.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        let _ = writeln!(
            out,
            "model: {} vars ({} binary), {} rows, {} critical pairs, t_max {}, big-M {:.3}",
            self.model.variables,
            self.model.binaries,
            self.model.constraints,
            self.model.critical_pairs,
            self.model.t_max,
            self.model.big_m
        );
        let _ = writeln!(
            out,
            "solver: {} objective {:.6} gap {:.3e} nodes {} wall {:.2}s",
            self.solver.status,
            self.solver.objective,
            self.solver.bound_gap,
            self.solver.nodes,
            self.solver.wall_time_s
        );
        for (id, t) in &self.arrivals {
            let _ = writeln!(out, "vehicle {id}: arrives at {t:.3}s");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "check {:<20} {}  margin {:+.6e}  {}",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.margin,
                c.detail
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(
            out,
            "phases: prepare {:.3}s conflicts {:.3}s assemble {:.3}s solve {:.3}s trajectory {:.3}s validate {:.3}s",
            self.phase_times.prepare_s,
            self.phase_times.conflicts_s,
            self.phase_times.assemble_s,
            self.phase_times.solve_s,
            self.phase_times.trajectory_s,
            self.phase_times.validate_s
        );
        let _ = writeln!(out, "result: {}", if self.all_passed() { "PASS" } else { "FAIL" });
        out
    }
}

fn effective_limits(scenario: &Scenario, options: &RunOptions) -> SolveLimits {
    let mut limits = scenario.solve_limits();
    if let Some(n) = options.node_limit {
        limits.node_limit = Some(n);
    }
    if let Some(t) = options.time_limit_s {
        limits.time_limit_s = Some(t);
    }
    if let Some(g) = options.gap {
        limits.gap = g;
    }
    limits
}

/// Runs every phase and writes the artifacts into `out_dir`. Solver
/// infeasibility and trajectory non-convergence are recorded in the
/// report rather than returned as errors.
pub fn run_pipeline(
    scenario: &Scenario,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<RunReport, PipelineError> {
    std::fs::create_dir_all(out_dir)?;
    let mut outputs = Vec::new();
    let mut warnings = Vec::new();
    let mut times = PhaseTimes::default();

    let t0 = Instant::now();
    let scene = prepare(scenario)?;
    times.prepare_s = t0.elapsed().as_secs_f64();
    write_graph_csvs(out_dir, &scene, &mut outputs)?;

    let t0 = Instant::now();
    let pairs = conflicts(&scene, options.threads);
    times.conflicts_s = t0.elapsed().as_secs_f64();
    write_pairs_csv(out_dir, &pairs, &mut outputs)?;

    let t0 = Instant::now();
    let model = build_model(scenario, &scene, &pairs)?;
    times.assemble_s = t0.elapsed().as_secs_f64();
    std::fs::write(out_dir.join("model.lp"), crate::model::to_lp_text(&model))?;
    outputs.push("model.lp".into());

    let limits = effective_limits(scenario, options);
    let t0 = Instant::now();
    let solution = solve_milp(&model, &limits)?;
    times.solve_s = t0.elapsed().as_secs_f64();
    write_solver_log(out_dir, &solution, &mut outputs)?;

    let model_stats = ModelStats {
        variables: model.vars.len(),
        binaries: model.num_binaries(),
        constraints: model.constraints.len(),
        critical_pairs: model.meta.pairs.len(),
        t_max: model.t_max,
        big_m: model.big_m,
    };
    let solver_summary = SolverSummary {
        status: match solution.status {
            MilpStatus::Optimal => "optimal".into(),
            MilpStatus::Infeasible => "infeasible".into(),
            MilpStatus::GapLimit => "gap-limit".into(),
        },
        objective: solution.objective,
        bound_gap: solution.bound_gap,
        nodes: solution.node_count,
        wall_time_s: solution.wall_time_s,
    };

    if solution.assignment.is_empty() {
        warn!("no incumbent found; stopping after the decision phase");
        let report = RunReport {
            scenario: scenario.spec.name.clone(),
            model: model_stats,
            solver: solver_summary,
            arrivals: Vec::new(),
            checks: Vec::new(),
            phase_times: times,
            outputs,
            warnings,
        };
        write_report(out_dir, &report)?;
        return Ok(report);
    }

    let decision = extract_decision(&model, &solution.assignment)?;
    write_decision_csv(out_dir, scenario, &decision, &mut outputs)?;
    let arrivals = decision
        .plans
        .iter()
        .map(|p| {
            (
                scenario.spec.vehicles[p.vehicle].id,
                p.vertices.last().map(|&(_, t)| t).unwrap_or(0.0),
            )
        })
        .collect();

    let t0 = Instant::now();
    let mut checks = vec![
        validate_path_structure(&model, &solution.assignment),
        validate_velocity_envelope(&model, &decision, 1e-6),
        validate_region_consistency(&model, &solution.assignment, &decision, 1e-6),
        validate_separation(&model, &solution.assignment, 0.01, 1e-6),
    ];
    times.validate_s = t0.elapsed().as_secs_f64();

    if !options.decision_only {
        let t0 = Instant::now();
        match trajectory_phase(scenario, &scene, &decision) {
            Ok((trajectories, mut traj_checks)) => {
                times.trajectory_s = t0.elapsed().as_secs_f64();
                write_trajectory_csvs(out_dir, scenario, &trajectories, &mut outputs)?;
                checks.append(&mut traj_checks);
            }
            Err(TrajectoryError::NotConverged {
                solution,
                grad_norm,
                max_violation,
            }) => {
                times.trajectory_s = t0.elapsed().as_secs_f64();
                warnings.push(format!(
                    "trajectory optimizer stopped early: gradient {grad_norm:.3e}, violation {max_violation:.3e} m"
                ));
                write_trajectory_csvs(out_dir, scenario, &solution, &mut outputs)?;
                checks.push(trajectory_check(&solution, scenario.spec.ocp.d_safe));
                checks.push(control_limit_check(&solution, scenario));
            }
            Err(e) => return Err(PipelineError::Trajectory(e.to_string())),
        }
    }

    let report = RunReport {
        scenario: scenario.spec.name.clone(),
        model: model_stats,
        solver: solver_summary,
        arrivals,
        checks,
        phase_times: times,
        outputs,
        warnings,
    };
    write_report(out_dir, &report)?;
    info!("pipeline finished: {}", if report.all_passed() { "pass" } else { "fail" });
    Ok(report)
}

fn trajectory_phase(
    scenario: &Scenario,
    scene: &PreparedScene,
    decision: &DecisionSolution,
) -> Result<(TrajectorySolution, Vec<CheckReport>), TrajectoryError> {
    let d_b = (scenario.spec.ocp.d_f + scenario.spec.ocp.d_r) / 2.0;
    let references = decision_to_reference(
        &scene.graph,
        decision,
        d_b,
        scenario.spec.ocp.tau_s,
        scenario.spec.ocp.trim,
    )?;
    let initial: Vec<VehicleState> = (0..scenario.spec.vehicles.len())
        .map(|idx| scenario.initial_state(idx))
        .collect();
    let settings = scenario.ocp_settings();
    let solution = solve_ocp(&references, &initial, &settings)?;
    let checks = vec![
        trajectory_check(&solution, settings.d_safe),
        control_limit_check(&solution, scenario),
    ];
    Ok((solution, checks))
}

fn trajectory_check(solution: &TrajectorySolution, d_safe: f64) -> CheckReport {
    let margin = solution.collision.min_distance - d_safe;
    CheckReport {
        name: "trajectory_separation".into(),
        pass: margin >= -1e-3,
        margin,
        detail: format!(
            "min circle distance {:.4} m vs safety {:.3} m",
            solution.collision.min_distance, d_safe
        ),
    }
}

fn control_limit_check(solution: &TrajectorySolution, scenario: &Scenario) -> CheckReport {
    let o = &scenario.spec.ocp;
    let mut margin = f64::INFINITY;
    for v in &solution.vehicles {
        for c in &v.controls {
            margin = margin
                .min(c.steer - o.delta_min)
                .min(o.delta_max - c.steer)
                .min(c.accel - o.a_min)
                .min(o.a_max - c.accel);
        }
    }
    CheckReport {
        name: "control_limits".into(),
        pass: margin >= -1e-9,
        margin,
        detail: format!("min control margin {margin:.3e}"),
    }
}

/// Compares branch and bound against the enumeration oracle on the
/// scenario's model.
pub fn verify_oracle(
    scenario: &Scenario,
    options: &RunOptions,
    cap: usize,
) -> Result<Vec<CheckReport>, PipelineError> {
    let scene = prepare(scenario)?;
    let pairs = conflicts(&scene, options.threads);
    let model = build_model(scenario, &scene, &pairs)?;
    let binaries = model.num_binaries();
    if binaries > cap {
        return Err(PipelineError::OracleTooLarge { binaries, cap });
    }
    let bb = solve_milp(&model, &effective_limits(scenario, options))?;
    let brute = brute_force_milp(&model, cap)?;
    let mut checks = Vec::new();
    let status_match = bb.status == brute.status
        || (bb.status == MilpStatus::Optimal && brute.status == MilpStatus::Optimal);
    checks.push(CheckReport {
        name: "oracle_status".into(),
        pass: status_match,
        margin: 0.0,
        detail: format!("branch-and-bound {:?} vs enumeration {:?}", bb.status, brute.status),
    });
    if bb.status == MilpStatus::Optimal && brute.status == MilpStatus::Optimal {
        let rel = (bb.objective - brute.objective).abs() / (1.0 + brute.objective.abs());
        checks.push(CheckReport {
            name: "oracle_objective".into(),
            pass: rel <= 1e-6,
            margin: 1e-6 - rel,
            detail: format!(
                "objectives {:.9} vs {:.9} (rel diff {rel:.3e})",
                bb.objective, brute.objective
            ),
        });
    }
    Ok(checks)
}

/// Runs the decision phase (and optionally the refinement) in memory and
/// returns the validator verdicts.
pub fn verify_validate(
    scenario: &Scenario,
    options: &RunOptions,
) -> Result<Vec<CheckReport>, PipelineError> {
    let scene = prepare(scenario)?;
    let pairs = conflicts(&scene, options.threads);
    let model = build_model(scenario, &scene, &pairs)?;
    let solution = solve_milp(&model, &effective_limits(scenario, options))?;
    if solution.assignment.is_empty() {
        return Ok(vec![CheckReport {
            name: "decision_phase".into(),
            pass: false,
            margin: 0.0,
            detail: format!("solver status {:?}", solution.status),
        }]);
    }
    let decision = extract_decision(&model, &solution.assignment)?;
    let mut checks = vec![
        validate_path_structure(&model, &solution.assignment),
        validate_velocity_envelope(&model, &decision, 1e-6),
        validate_region_consistency(&model, &solution.assignment, &decision, 1e-6),
        validate_separation(&model, &solution.assignment, 0.01, 1e-6),
    ];
    if !options.decision_only {
        match trajectory_phase(scenario, &scene, &decision) {
            Ok((_, mut traj_checks)) => checks.append(&mut traj_checks),
            Err(TrajectoryError::NotConverged { solution, .. }) => {
                checks.push(trajectory_check(&solution, scenario.spec.ocp.d_safe));
                checks.push(control_limit_check(&solution, scenario));
            }
            Err(e) => return Err(PipelineError::Trajectory(e.to_string())),
        }
    }
    Ok(checks)
}

// ---- writers ----

fn write_graph_csvs(
    out_dir: &Path,
    scene: &PreparedScene,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let mut v = String::from("vertex_id,x_m,y_m,lane\n");
    for vert in &scene.graph.vertices {
        let _ = writeln!(
            v,
            "{},{:.9},{:.9},{}",
            vert.id,
            vert.position.x,
            vert.position.y,
            vert.lane_tag.as_deref().unwrap_or("")
        );
    }
    std::fs::write(out_dir.join("graph_vertices.csv"), v)?;
    let mut e = String::from("edge_id,source,target,length_m\n");
    for edge in &scene.graph.edges {
        let _ = writeln!(
            e,
            "{},{},{},{:.9}",
            edge.id, edge.source, edge.target, edge.length
        );
    }
    std::fs::write(out_dir.join("graph_edges.csv"), e)?;
    outputs.push("graph_vertices.csv".into());
    outputs.push("graph_edges.csv".into());
    Ok(())
}

fn write_pairs_csv(
    out_dir: &Path,
    pairs: &[CriticalEdgePair],
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let mut s = String::from(
        "vehicle_i,edge_i,vehicle_j,edge_j,theta_i1,theta_i2,theta_j1,theta_j2,s_i1,s_i2,s_j_hat1,s_j_hat2,projected_length_m,safety_distance_m,phi_rad\n",
    );
    for p in pairs {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            p.vehicle_i,
            p.edge_i,
            p.vehicle_j,
            p.edge_j,
            p.theta_i.0,
            p.theta_i.1,
            p.theta_j.0,
            p.theta_j.1,
            p.s_i.0,
            p.s_i.1,
            p.s_j_hat.0,
            p.s_j_hat.1,
            p.projected_length,
            p.safety_distance,
            p.phi
        );
    }
    std::fs::write(out_dir.join("critical_pairs.csv"), s)?;
    outputs.push("critical_pairs.csv".into());
    Ok(())
}

fn write_solver_log(
    out_dir: &Path,
    solution: &MilpSolution,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let mut s = String::new();
    for rec in &solution.log {
        let _ = writeln!(s, "{rec}");
    }
    let _ = writeln!(
        s,
        "final status={:?} objective={:.9} gap={:.3e} nodes={} wall={:.3}s",
        solution.status,
        solution.objective,
        solution.bound_gap,
        solution.node_count,
        solution.wall_time_s
    );
    std::fs::write(out_dir.join("solver.log"), s)?;
    outputs.push("solver.log".into());
    Ok(())
}

fn write_decision_csv(
    out_dir: &Path,
    scenario: &Scenario,
    decision: &DecisionSolution,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let mut s = String::from("vehicle_id,seq,vertex_id,time_s\n");
    for plan in &decision.plans {
        let ext_id = scenario.spec.vehicles[plan.vehicle].id;
        for (seq, &(v, t)) in plan.vertices.iter().enumerate() {
            let _ = writeln!(s, "{ext_id},{seq},{v},{t:.9}");
        }
    }
    std::fs::write(out_dir.join("decision.csv"), s)?;
    outputs.push("decision.csv".into());
    Ok(())
}

fn write_trajectory_csvs(
    out_dir: &Path,
    scenario: &Scenario,
    solution: &TrajectorySolution,
    outputs: &mut Vec<String>,
) -> Result<(), PipelineError> {
    let tau_s = scenario.spec.ocp.tau_s;
    let mut t = String::from("step,time_s,vehicle_id,x_m,y_m,theta_rad,v_mps,delta_rad,a_mps2\n");
    let mut p = String::from("time_s,vehicle_id,v_mps,a_mps2,delta_rad\n");
    for veh in &solution.vehicles {
        let ext_id = scenario.spec.vehicles[veh.vehicle].id;
        for (step, state) in veh.states.iter().enumerate() {
            // the control applied over [t, t + tau_s); the last state row
            // repeats the final control
            let c = veh
                .controls
                .get(step.min(veh.controls.len().saturating_sub(1)))
                .copied()
                .unwrap_or(crate::trajectory::ControlInput {
                    steer: 0.0,
                    accel: 0.0,
                });
            let time = step as f64 * tau_s;
            let _ = writeln!(
                t,
                "{step},{time:.3},{ext_id},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
                state.x, state.y, state.theta, state.v, c.steer, c.accel
            );
            let _ = writeln!(
                p,
                "{time:.3},{ext_id},{:.9},{:.9},{:.9}",
                state.v, c.accel, c.steer
            );
        }
    }
    std::fs::write(out_dir.join("trajectories.csv"), t)?;
    std::fs::write(out_dir.join("plot_data.csv"), p)?;
    let mut c = String::from("step,id_a,id_b,circle_a,circle_b,distance_m\n");
    for row in &solution.collision.rows {
        let id_a = scenario.spec.vehicles[row.vehicle_a].id;
        let id_b = scenario.spec.vehicles[row.vehicle_b].id;
        let _ = writeln!(
            c,
            "{},{},{},{},{},{:.9}",
            row.step, id_a, id_b, row.circle_a, row.circle_b, row.distance
        );
    }
    std::fs::write(out_dir.join("collision_report.csv"), c)?;
    outputs.push("trajectories.csv".into());
    outputs.push("plot_data.csv".into());
    outputs.push("collision_report.csv".into());
    Ok(())
}

fn write_report(out_dir: &Path, report: &RunReport) -> Result<(), PipelineError> {
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    std::fs::write(out_dir.join("report.json"), json)?;
    std::fs::write(out_dir.join("report.txt"), report.render_text())?;
    Ok(())
}

/// Convenience wrapper for callers that only track an output directory.
pub fn run_from_file(
    scenario_path: &Path,
    out_dir: &PathBuf,
    options: &RunOptions,
) -> Result<RunReport, PipelineError> {
    let scenario = Scenario::load(scenario_path)?;
    run_pipeline(&scenario, out_dir, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE_CHAIN: &str = r#"
name = "single-chain"

[graph]
[[graph.straight_lanes]]
id = "lane"
start = [0.0, 0.0]
end = [45.0, 0.0]
spacing = 15.0

[[vehicles]]
id = 1
position = [-5.0, 0.0]
initial_velocity = 10.0
reference_velocity = 10.0
destinations = [3]

[milp]
extension_edges = 1
"#;

    #[test]
    fn single_chain_pipeline_passes() {
        let scenario = Scenario::from_toml(SINGLE_CHAIN).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_pipeline(&scenario, dir.path(), &RunOptions::default()).unwrap();
        assert!(report.all_passed(), "{}", report.render_text());
        assert_eq!(report.solver.status, "optimal");
        for name in [
            "graph_vertices.csv",
            "graph_edges.csv",
            "critical_pairs.csv",
            "model.lp",
            "solver.log",
            "decision.csv",
            "trajectories.csv",
            "plot_data.csv",
            "collision_report.csv",
            "report.json",
            "report.txt",
        ] {
            assert!(dir.path().join(name).exists(), "missing {name}");
        }
        // free-flow arrival: 50 m at 10 m/s
        assert!((report.arrivals[0].1 - 5.0).abs() < 0.2);
    }

    #[test]
    fn decision_only_skips_trajectories() {
        let scenario = Scenario::from_toml(SINGLE_CHAIN).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let options = RunOptions {
            decision_only: true,
            ..Default::default()
        };
        let report = run_pipeline(&scenario, dir.path(), &options).unwrap();
        assert!(report.all_passed());
        assert!(!dir.path().join("trajectories.csv").exists());
    }

    #[test]
    fn pipeline_is_deterministic() {
        let scenario = Scenario::from_toml(SINGLE_CHAIN).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run_pipeline(&scenario, dir_a.path(), &RunOptions::default()).unwrap();
        run_pipeline(&scenario, dir_b.path(), &RunOptions::default()).unwrap();
        let a = std::fs::read(dir_a.path().join("decision.csv")).unwrap();
        let b = std::fs::read(dir_b.path().join("decision.csv")).unwrap();
        assert_eq!(a, b, "decision files must be byte-identical");
    }

    #[test]
    fn oracle_mode_matches_on_small_scenario() {
        let scenario = Scenario::from_toml(SINGLE_CHAIN).unwrap();
        let checks = verify_oracle(&scenario, &RunOptions::default(), 20).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    /// Two vehicles feeding the same single lane from nearly the same
    /// pose: the velocity band leaves no room to separate in time.
    #[test]
    fn blocked_lane_reports_infeasible() {
        let text = r#"
name = "blocked"

[graph]
[[graph.straight_lanes]]
id = "lane"
start = [0.0, 0.0]
end = [30.0, 0.0]
spacing = 10.0

[[vehicles]]
id = 1
position = [-1.0, 0.2]
initial_velocity = 10.0
reference_velocity = 10.0
destinations = [3]

[[vehicles]]
id = 2
position = [-1.0, -0.2]
initial_velocity = 10.0
reference_velocity = 10.0
destinations = [3]

[milp]
extension_edges = 1
"#;
        let scenario = Scenario::from_toml(text).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_pipeline(&scenario, dir.path(), &RunOptions::default()).unwrap();
        assert_eq!(report.solver.status, "infeasible");
        assert!(!report.all_passed());
    }
}
