//! Command-line driver: build the graph, solve the decision stage, plan
//! trajectories, validate, or run the whole pipeline on a scenario file.

use anyhow::{bail, Context, Result};
use cavplan::pipeline::{
    prepare, run_pipeline, verify_oracle, verify_validate, PreparedScene, RunOptions,
};
use cavplan::scenario::Scenario;
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "cavplan",
    version,
    about = "Cooperative vehicle decision and trajectory planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario file (TOML)
    scenario: PathBuf,
    /// Output directory
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    /// Worker threads for conflict enumeration (the solver stays
    /// single-threaded for reproducibility)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Override the scenario's node limit
    #[arg(long)]
    node_limit: Option<usize>,
    /// Override the scenario's time limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    /// Override the scenario's relative optimality gap
    #[arg(long)]
    gap: Option<f64>,
}

impl CommonArgs {
    fn options(&self, decision_only: bool) -> RunOptions {
        RunOptions {
            decision_only,
            threads: self.threads,
            node_limit: self.node_limit,
            time_limit_s: self.time_limit,
            gap: self.gap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Materialize the waypoint graph and write its CSV dump
    BuildGraph(CommonArgs),
    /// Assemble and solve the decision stage only
    SolveDecision(CommonArgs),
    /// Full pipeline including trajectory refinement
    PlanTrajectory(CommonArgs),
    /// Check a scenario: solver-vs-oracle or full validation replay
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// oracle: compare branch-and-bound against exhaustive
        /// enumeration (small models); validate: replay and check all
        /// safety margins
        #[arg(long, default_value = "validate")]
        mode: String,
    },
    /// Full pipeline: graph, decision, trajectories, validation, reports
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Stop after the decision stage
        #[arg(long)]
        decision_only: bool,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = match run(Cli::parse()) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::BuildGraph(common) => {
            let scenario = load(&common)?;
            let scene = prepare(&scenario)?;
            std::fs::create_dir_all(&common.output)?;
            write_graph_dump(&common.output, &scene)?;
            println!(
                "graph: {} vertices, {} edges ({} vehicle start vertices added)",
                scene.graph.vertices.len(),
                scene.graph.edges.len(),
                scene.starts.len()
            );
            for (lane, ids) in &scenario.lanes {
                println!("lane {lane}: vertices {}..{}", ids[0], ids.last().unwrap());
            }
            Ok(true)
        }
        Command::SolveDecision(common) => {
            let scenario = load(&common)?;
            let options = common.options(true);
            let report = run_pipeline(&scenario, &common.output, &options)?;
            print!("{}", report.render_text());
            Ok(report.all_passed())
        }
        Command::PlanTrajectory(common) | Command::Run {
            common,
            decision_only: false,
        } => {
            let scenario = load(&common)?;
            let options = common.options(false);
            let report = run_pipeline(&scenario, &common.output, &options)?;
            print!("{}", report.render_text());
            Ok(report.all_passed())
        }
        Command::Run {
            common,
            decision_only: true,
        } => {
            let scenario = load(&common)?;
            let options = common.options(true);
            let report = run_pipeline(&scenario, &common.output, &options)?;
            print!("{}", report.render_text());
            Ok(report.all_passed())
        }
        Command::Validate { common, mode } => {
            let scenario = load(&common)?;
            let options = common.options(false);
            let checks = match mode.as_str() {
                "oracle" => verify_oracle(&scenario, &options, 20)?,
                "validate" => verify_validate(&scenario, &options)?,
                other => bail!("unknown mode '{other}', expected oracle or validate"),
            };
            let mut all = true;
            for c in &checks {
                println!(
                    "check {:<20} {}  margin {:+.6e}  {}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.margin,
                    c.detail
                );
                all &= c.pass;
            }
            Ok(all)
        }
    }
}

fn load(common: &CommonArgs) -> Result<Scenario> {
    Scenario::load(&common.scenario)
        .with_context(|| format!("loading scenario {:?}", common.scenario))
}

fn write_graph_dump(out: &Path, scene: &PreparedScene) -> Result<()> {
    use std::fmt::Write as _;
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
    std::fs::write(out.join("graph_vertices.csv"), v)?;
    let mut e = String::from("edge_id,source,target,length_m\n");
    for edge in &scene.graph.edges {
        let _ = writeln!(
            e,
            "{},{},{},{:.9}",
            edge.id, edge.source, edge.target, edge.length
        );
    }
    std::fs::write(out.join("graph_edges.csv"), e)?;
    Ok(())
}
