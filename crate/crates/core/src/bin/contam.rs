use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use contam_core::bounds;
use contam_core::harness::{self, ComponentFile, ExperimentConfig, InitialState};
use contam_core::sim::{run_game_traced, Init, Termination};
use contam_core::strategies::strategy_by_name;
use contam_core::{Result, WorldConfig};

#[derive(Parser)]
#[command(name = "contam", version, about = "Swarm contamination game simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch experiment and write games.csv and aggregate.csv.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads. CONTAM_JOBS takes precedence.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Play one game and print its outcome.
    Game {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Agents per side.
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value = "circle")]
        healthy: String,
        #[arg(long, default_value = "circle")]
        contaminated: String,
        /// JSON-lines dump of every step.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Initial-state file; replaces --n.
        #[arg(long)]
        init: Option<PathBuf>,
    },
    /// Weak-point conquest value of a component file.
    Wpc {
        #[arg(long)]
        component: PathBuf,
    },
    /// Capacity bounds for the given radii.
    Bounds {
        #[arg(long)]
        smin: Option<f64>,
        #[arg(long)]
        smax: Option<f64>,
        #[arg(long)]
        dr: Option<f64>,
    },
}

#[derive(Serialize)]
struct GameSummary {
    seed: u64,
    healthy: String,
    contaminated: String,
    termination: Termination,
    steps: u64,
    final_healthy: usize,
    final_contaminated: usize,
    final_healthy_pct: f64,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, output, jobs } => {
            let cfg = ExperimentConfig::load(&config)?;
            let jobs = harness::resolve_jobs(jobs, cfg.jobs)?;
            let dir = output.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("results"));
            let out = harness::run_batch(&cfg, jobs)?;
            harness::write_batch(&out, &dir)?;
            harness::write_aggregate_csv(&out.aggregates, io::stdout().lock())?;
        }
        Command::Game {
            seed,
            n,
            healthy,
            contaminated,
            trajectory,
            init,
        } => {
            let (cfg, init) = match init {
                Some(path) => {
                    let state: InitialState = serde_json::from_str(&fs::read_to_string(path)?)?;
                    (state.cfg, state.init)
                }
                None => (
                    WorldConfig::default(),
                    Init::Random {
                        n_healthy: n,
                        n_contaminated: n,
                    },
                ),
            };
            let h = strategy_by_name(&healthy, &cfg)?;
            let c = strategy_by_name(&contaminated, &cfg)?;
            let (res, records) = run_game_traced(&cfg, h, c, &init, seed)?;
            if let Some(path) = trajectory {
                harness::write_trajectory(&records, BufWriter::new(fs::File::create(path)?))?;
            }
            print_json(&GameSummary {
                seed,
                healthy,
                contaminated,
                termination: res.termination,
                steps: res.steps,
                final_healthy: res.final_healthy,
                final_contaminated: res.final_contaminated,
                final_healthy_pct: res.final_healthy_pct,
            })?;
        }
        Command::Wpc { component } => {
            let file = ComponentFile::from_json(&fs::read_to_string(component)?)?;
            print_json(&harness::wpc_report(&file)?)?;
        }
        Command::Bounds { smin, smax, dr } => {
            let d = WorldConfig::default();
            let cfg = WorldConfig::with_radii(smin.unwrap_or(d.s_min), smax.unwrap_or(d.s_max), dr.unwrap_or(d.d_r));
            cfg.validate()?;
            print_json(&bounds::report(&cfg)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
