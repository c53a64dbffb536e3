use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use beamfrac_core::io::config::{parse_config, parse_config_str};
use beamfrac_core::io::{output, shipped};
use beamfrac_core::scenarios::{self, RunOptions, ScenarioConfig, DEFAULT_BETAS, DEFAULT_LEVELS};
use beamfrac_core::solvers::stable_timestep;
use beamfrac_core::Error;

/// Fracture simulations of slender beams with a discontinuous Galerkin /
/// cohesive zone model.
#[derive(Parser)]
#[command(name = "beamfrac", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write history.csv, snapshots and summary.txt
    Run {
        /// Config file, or the name of a shipped config
        config: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Steps between snapshots (default: 100 dynamic, 1 quasi-static)
        #[arg(long)]
        stride: Option<usize>,
        /// Also write a legacy VTK polyline per snapshot
        #[arg(long)]
        vtk: bool,
    },
    /// Mesh and penalty refinement study of the cantilever
    Converge {
        config: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
    },
    /// Print the largest natural frequency and the critical time step
    Eigen { config: String },
    /// List the shipped configs, optionally writing them to a directory
    List {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn load(config: &str) -> beamfrac_core::Result<ScenarioConfig> {
    let path = Path::new(config);
    match shipped::find(config) {
        Some(text) if !path.exists() => parse_config_str(text),
        _ => parse_config(path),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::UnsupportedScenario(_) => 2,
        Error::Io { .. } | Error::Csv { .. } => 4,
        _ => 3,
    }
}

fn run(cli: Cli) -> beamfrac_core::Result<()> {
    match cli.command {
        Command::Run { config, out, stride, vtk } => {
            let cfg = load(&config)?;
            let options = RunOptions { snapshot_stride: stride, snapshots: true };
            let result = scenarios::run_scenario(&cfg, &options)?;
            let files = output::write_run(&result, &out, vtk)?;
            print!("{}", result.summary.render());
            eprintln!(
                "wrote {}, {} and {} snapshot(s)",
                files.history.display(),
                files.summary.display(),
                files.snapshots.len()
            );
        }
        Command::Converge { config, out, levels } => {
            let cfg = load(&config)?;
            let rows = scenarios::converge(&cfg, levels, &DEFAULT_BETAS)?;
            let path = output::write_convergence(&rows, &out)?;
            print!("{}", output::convergence_csv(&rows)?);
            eprintln!("wrote {}", path.display());
        }
        Command::Eigen { config } => {
            let cfg = load(&config)?;
            let problem = scenarios::build_scenario(&cfg)?;
            let model = &problem.stages.last().expect("at least one stage").model;
            let est = stable_timestep(model, &model.mesh.reference_state())?;
            println!("omega_max: {:e}", est.omega_max);
            println!("dt_c: {:e}", est.dt_c);
        }
        Command::List { write } => {
            for (name, text) in shipped::CONFIGS {
                let about = text.lines().next().and_then(|l| l.strip_prefix("# ")).unwrap_or("");
                println!("{name:<26}{about}");
                if let Some(dir) = &write {
                    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
                    let path = dir.join(name);
                    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("beamfrac: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
