//! Command-line front end.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::executor::{run_mission, MissionReport};
use crate::planner::{HeuristicBackend, HttpTransport, MissionSpec, PlanBackend, RemoteBackend};
use crate::plot::render_plot;
use crate::report::{write_atomic, write_run_dir, PLOT_FILE};
use crate::scenario::{load_scenario, Scenario};

pub const EXIT_COMPLETED: i32 = 0;
pub const EXIT_INCOMPLETE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "usv-mission",
    version,
    about = "Plan and simulate USV inspection missions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a mission and write its report to the output directory.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Heuristic,
    Remote,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub scenario: PathBuf,
    /// Mission text, or a shorthand: `visit_all`, `ordered:ds_1,ds_2`.
    #[arg(long)]
    pub mission: Option<String>,
    #[arg(long, value_enum, default_value = "heuristic")]
    pub backend: BackendKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
    /// Also write plot.svg.
    #[arg(long)]
    pub plot: bool,
    /// Simulation step override, s.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulated-time cap override, s.
    #[arg(long)]
    pub max_sim_time: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] crate::scenario::ScenarioError),
    #[error(transparent)]
    Validation(#[from] crate::world::ValidationError),
    #[error("{0}")]
    Backend(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

/// Loads the scenario and applies the command-line overrides.
pub fn prepare_scenario(args: &RunArgs) -> Result<Scenario, CliError> {
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(m) = &args.mission {
        scenario.mission = MissionSpec::from_cli(m);
    }
    if let Some(dt) = args.dt {
        scenario.executor.dt = dt;
    }
    if let Some(t) = args.max_sim_time {
        scenario.executor.max_sim_time = t;
    }
    scenario.validate()?;
    if args.backend == BackendKind::Heuristic && scenario.mission.structured.is_none() {
        return Err(CliError::Backend(
            "the heuristic backend needs a structured mission: pass --mission visit_all or --mission ordered:<id>,<id>".into(),
        ));
    }
    Ok(scenario)
}

fn make_backend(args: &RunArgs, scenario: &Scenario) -> Result<Box<dyn PlanBackend>, CliError> {
    Ok(match args.backend {
        BackendKind::Heuristic => Box::new(HeuristicBackend {
            capabilities: scenario.capabilities.clone(),
        }),
        BackendKind::Remote => {
            let config = scenario.remote.clone().unwrap_or_default();
            let transport =
                HttpTransport::from_env(&config).map_err(|e| CliError::Backend(e.to_string()))?;
            Box::new(RemoteBackend::new(transport, config.model))
        }
    })
}

/// Runs the mission and writes every artifact. Nothing is written when the
/// scenario or backend setup fails.
pub fn execute(args: &RunArgs) -> Result<MissionReport, CliError> {
    let scenario = prepare_scenario(args)?;
    let mut backend = make_backend(args, &scenario)?;
    let mut report = run_mission(&scenario, backend.as_mut());
    report.seed = Some(args.seed);
    write_run_dir(&args.out, &report, backend.transcript())?;
    if args.plot {
        write_atomic(
            &args.out.join(PLOT_FILE),
            render_plot(&report, &scenario.world).as_bytes(),
        )?;
    }
    Ok(report)
}

pub fn exit_code(result: &Result<MissionReport, CliError>) -> i32 {
    match result {
        Ok(r) if r.is_completed() => EXIT_COMPLETED,
        Ok(_) => EXIT_INCOMPLETE,
        Err(_) => EXIT_CONFIG,
    }
}

/// Entry point shared by the binary and tests. Returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_COMPLETED
            };
        }
    };
    match cli.command {
        Command::Run(args) => {
            let result = execute(&args);
            match &result {
                Ok(report) => {
                    println!("{}", report.final_status);
                    println!(
                        "  stations recorded: {}",
                        report.recorded_stations().join(", ")
                    );
                    if !report.unreachable.is_empty() {
                        println!("  unreachable: {}", report.unreachable.join(", "));
                    }
                    println!("  plan episodes: {}", report.plans.len());
                    println!("  output: {}", args.out.display());
                }
                Err(e) => eprintln!("error: {e}"),
            }
            exit_code(&result)
        }
    }
}
