use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nanobec::scenario::{parse_config, Pipeline, RunSummary, ScenarioError};

/// Nanowire–condensate coupling: figure of merit, figure data and amplification dynamics.
///
/// Exit status: 0 stable, 10 amplifying, 1 I/O error, 2 configuration error,
/// 3 numerical failure.
#[derive(Parser)]
#[command(name = "nanobec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON scenario configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted-path override, e.g. `nanowire.current=1e-5`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Chemical potential, couplings, threshold and stability verdict.
    FigureOfMerit(Common),
    /// Coupling density: closed form, numerical and Lorentzian fit.
    Fig2(Common),
    /// Level-shift function on a complex grid with the graphical-solution planes.
    Fig3(Common),
    /// Poles of the propagator in the upper half plane.
    Poles(Common),
    /// Largest growth rate over the (Ω, Δ) sweep grid.
    GainMap(Common),
    /// Time-domain propagator and fitted growth rate.
    Trace(Common),
    /// Analytic and exact amplification thresholds.
    Threshold(Common),
    /// Poles, gain map and time trace together.
    Dynamics(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::FigureOfMerit(c)
            | Command::Fig2(c)
            | Command::Fig3(c)
            | Command::Poles(c)
            | Command::GainMap(c)
            | Command::Trace(c)
            | Command::Threshold(c)
            | Command::Dynamics(c) => c,
        }
    }
}

fn run(cmd: &Command) -> Result<RunSummary, ScenarioError> {
    let common = cmd.common();
    let mut overrides = common.overrides.clone();
    if let Some(out) = &common.out {
        let dir = serde_json::to_string(&out.to_string_lossy()).expect("string serializes");
        overrides.push(format!("output.directory={dir}"));
    }
    let config = parse_config(&common.config, &overrides)?;
    let pipeline = Pipeline::build(config)?;
    match cmd {
        Command::FigureOfMerit(_) => pipeline.run_figure_of_merit().map(|(_, s)| s),
        Command::Fig2(_) => pipeline.emit_fig2(),
        Command::Fig3(_) => pipeline.emit_fig3(),
        Command::Poles(_) => pipeline.run_poles(),
        Command::GainMap(_) => pipeline.run_gain_map(),
        Command::Trace(_) => pipeline.run_trace(),
        Command::Threshold(_) => pipeline.run_threshold(),
        Command::Dynamics(_) => pipeline.run_dynamics(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(summary) => {
            println!("{}", summary.message.trim_end());
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(if summary.amplifying { 10 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
