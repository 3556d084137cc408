//! `stepfield` — lattice speed neighborhoods and a floor-field pedestrian CA.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use stepfield_cli::config::{FieldChoice, SimulationConfig};
use stepfield_cli::{experiments, pgm, tables, TimeoutError};
use stepfield_core::kinematics::{select_neighborhood, BorderMode, SelectionMode};

#[derive(Parser)]
#[command(
    name = "stepfield",
    version,
    about = "Lattice speed neighborhoods and a floor-field pedestrian cellular automaton",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Staircase,
    Hull,
}

impl From<Mode> for BorderMode {
    fn from(m: Mode) -> BorderMode {
        match m {
            Mode::Staircase => BorderMode::Staircase,
            Mode::Hull => BorderMode::Hull,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectMode {
    Canonical,
    Scoring,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Average speed and angular deviation of every complete neighborhood.
    Table {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, value_enum, default_value = "staircase")]
        mode: Mode,
        /// Largest speed to enumerate neighborhoods for.
        #[arg(long, default_value_t = 10)]
        v_max: u32,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Neighborhood choice for an integer speed.
    Select {
        #[arg(long)]
        speed: u32,
        #[arg(long, value_enum, default_value = "both")]
        mode: SelectMode,
    },
    /// Samples v(phi) of one neighborhood for plotting.
    Profile {
        #[arg(long)]
        d2: u64,
        #[arg(long, default_value_t = 181)]
        samples: u32,
        #[arg(long, value_enum, default_value = "staircase")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quarter-plane map of speed classes for the canonical selection.
    SpeedMap {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long, default_value_t = 10)]
        v_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a simulation described by a JSON config file.
    Simulate {
        /// Path to the config (see README for the schema).
        #[arg(long)]
        config: PathBuf,
        /// Write a per-round trajectory log (CSV: round,agent_id,x,y).
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Measurement campaigns.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Args)]
struct ExperimentCommon {
    /// Coupling strength of the static field.
    #[arg(long, default_value_t = 10.0)]
    ks: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "integer")]
    field: FieldChoice,
    /// Output directory for result files (stdout summary only when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Single-agent travel times over eight directions of equal length.
    Directional {
        /// Speeds to run (repeatable).
        #[arg(long = "speed", default_values_t = [1u8, 5u8])]
        speeds: Vec<u8>,
        #[arg(long, default_value_t = 100)]
        reps: u32,
        #[command(flatten)]
        common: ExperimentCommon,
    },
    /// Radially collapsing crowd with center exits.
    Radial {
        #[arg(long = "speed", default_values_t = [1u8, 5u8])]
        speeds: Vec<u8>,
        #[arg(long, default_value_t = 249)]
        radius: u32,
        #[arg(long, default_value_t = 1948)]
        agents: u32,
        /// Snapshot rounds (repeatable). Defaults to 180 for speed 1 and 36
        /// for speed 5, scaled as 180/v for other speeds.
        #[arg(long = "round")]
        rounds: Vec<u64>,
        /// Also write PGM occupancy snapshots.
        #[arg(long)]
        pgm: bool,
        #[command(flatten)]
        common: ExperimentCommon,
    },
    /// Axis versus diagonal route timing (route B is sqrt(2) longer).
    TwoRoutes {
        #[arg(long = "speed", default_values_t = [1u8, 2u8, 3u8, 4u8, 5u8])]
        speeds: Vec<u8>,
        #[arg(long, default_value_t = 10)]
        reps: u32,
        #[command(flatten)]
        common: ExperimentCommon,
    },
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn out_file(dir: &Option<PathBuf>, name: &str) -> Option<PathBuf> {
    dir.as_ref().map(|d| d.join(name))
}

fn ensure_dir(dir: &Option<PathBuf>) -> Result<()> {
    if let Some(d) = dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table {
            format,
            mode,
            v_max,
            out,
        } => {
            let content = match format {
                Format::Csv => tables::results_csv(v_max, mode.into()),
                Format::Json => tables::results_json(v_max, mode.into())?,
            };
            emit(out.as_deref(), &content)
        }
        Command::Select { speed, mode } => {
            match mode {
                SelectMode::Canonical | SelectMode::Scoring => {
                    let m = if matches!(mode, SelectMode::Canonical) {
                        SelectionMode::Canonical
                    } else {
                        SelectionMode::Scoring
                    };
                    println!("{}", select_neighborhood(speed, m)?);
                }
                SelectMode::Both => {
                    let canonical = select_neighborhood(speed, SelectionMode::Canonical)?;
                    let scoring = select_neighborhood(speed, SelectionMode::Scoring)?;
                    println!("canonical: {canonical}");
                    println!("scoring: {scoring}");
                    if canonical != scoring {
                        println!("note: the published choice differs from the scoring rule here");
                    }
                }
            }
            Ok(())
        }
        Command::Profile {
            d2,
            samples,
            mode,
            out,
        } => emit(
            out.as_deref(),
            &tables::profile_csv(d2, samples, mode.into())?,
        ),
        Command::SpeedMap { format, v_max, out } => {
            let content = match format {
                Format::Csv => tables::speed_map_csv(v_max)?,
                Format::Json => tables::speed_map_json(v_max)?,
            };
            emit(out.as_deref(), &content)
        }
        Command::Simulate { config, trajectory } => simulate(&config, trajectory.as_deref()),
        Command::Experiment(cmd) => experiment(cmd),
    }
}

fn simulate(config: &Path, trajectory: Option<&Path>) -> Result<()> {
    let cfg = SimulationConfig::load(config)?;
    let (mut sim, _) = cfg.build()?;
    let mut log = trajectory
        .map(|p| fs::File::create(p).with_context(|| format!("creating {}", p.display())))
        .transpose()?;
    if let Some(f) = log.as_mut() {
        writeln!(f, "round,agent_id,x,y")?;
        for a in sim.agents() {
            writeln!(f, "0,{},{},{}", a.id, a.position.x, a.position.y)?;
        }
    }
    while !sim.all_evacuated() && sim.round() < cfg.max_rounds {
        sim.step();
        if let Some(f) = log.as_mut() {
            for a in sim.agents() {
                // Log agents still inside plus the exit entry itself.
                if !a.evacuated() || a.evacuated_at == Some(sim.round()) {
                    writeln!(
                        f,
                        "{},{},{},{}",
                        sim.round(),
                        a.id,
                        a.position.x,
                        a.position.y
                    )?;
                }
            }
        }
    }
    let summary = serde_json::json!({
        "rounds": sim.round(),
        "timed_out": !sim.all_evacuated(),
        "evacuated": sim.agents().iter().filter(|a| a.evacuated()).count(),
        "agents": sim.agents().len(),
        "evacuation_rounds": sim.agents().iter().map(|a| a.evacuated_at).collect::<Vec<_>>(),
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if !sim.all_evacuated() {
        anyhow::bail!(TimeoutError {
            max_rounds: cfg.max_rounds
        });
    }
    Ok(())
}

fn experiment(cmd: ExperimentCmd) -> Result<()> {
    match cmd {
        ExperimentCmd::Directional {
            speeds,
            reps,
            common,
        } => {
            ensure_dir(&common.out)?;
            let mut spreads: Vec<(u8, f64)> = Vec::new();
            for v in speeds {
                let spec = experiments::DirectionalSpec {
                    v_max: v,
                    k_s: common.ks,
                    repetitions: reps,
                    seed: common.seed,
                    field: common.field.into(),
                };
                let result = experiments::experiment_directional(&spec)?;
                let content = match common.format {
                    Format::Csv => experiments::directional_csv(&result),
                    Format::Json => serde_json::to_string_pretty(&result)?,
                };
                let ext = if matches!(common.format, Format::Csv) {
                    "csv"
                } else {
                    "json"
                };
                emit(
                    out_file(&common.out, &format!("directional_v{v}.{ext}")).as_deref(),
                    &content,
                )?;
                eprintln!(
                    "v={v}: overall {:.2} ± {:.2} ({:.2}%)",
                    result.overall_mean,
                    result.overall_spread,
                    100.0 * result.relative_spread
                );
                spreads.push((v, result.relative_spread));
            }
            if spreads.len() >= 2 {
                let (v0, s0) = spreads[0];
                let (v1, s1) = spreads[spreads.len() - 1];
                eprintln!(
                    "anisotropy ratio (relative spread v={v0} / v={v1}): {:.1}",
                    s0 / s1
                );
            }
            Ok(())
        }
        ExperimentCmd::Radial {
            speeds,
            radius,
            agents,
            rounds,
            pgm: write_pgm,
            common,
        } => {
            ensure_dir(&common.out)?;
            for v in speeds {
                let snapshot_rounds = if rounds.is_empty() {
                    vec![(180.0 / v as f64).round() as u64]
                } else {
                    rounds.clone()
                };
                let spec = experiments::RadialSpec {
                    radius,
                    n_agents: agents,
                    v_max: v,
                    k_s: common.ks,
                    seed: common.seed,
                    field: common.field.into(),
                    snapshot_rounds,
                };
                let (scenario, snaps) = experiments::experiment_radial(&spec)?;
                let mut content = match common.format {
                    Format::Csv => String::from("round,boundary_cv,agents_inside\n"),
                    Format::Json => serde_json::to_string_pretty(&snaps)?,
                };
                for s in &snaps {
                    if matches!(common.format, Format::Csv) {
                        content.push_str(&format!(
                            "{},{:.4},{}\n",
                            s.round, s.boundary_cv, s.agents_inside
                        ));
                    }
                    if write_pgm {
                        if let Some(path) =
                            out_file(&common.out, &format!("radial_v{v}_round{}.pgm", s.round))
                        {
                            pgm::write_occupancy(&path, &scenario, &s.occupied)?;
                        }
                    }
                    eprintln!("v={v} round {}: boundary CV {:.4}", s.round, s.boundary_cv);
                }
                let ext = if matches!(common.format, Format::Csv) {
                    "csv"
                } else {
                    "json"
                };
                emit(
                    out_file(&common.out, &format!("radial_v{v}.{ext}")).as_deref(),
                    &content,
                )?;
            }
            Ok(())
        }
        ExperimentCmd::TwoRoutes {
            speeds,
            reps,
            common,
        } => {
            ensure_dir(&common.out)?;
            let mut rows = Vec::new();
            for v in speeds {
                let spec = experiments::TwoRoutesSpec {
                    v_max: v,
                    k_s: common.ks,
                    repetitions: reps,
                    seed: common.seed,
                    field: common.field.into(),
                };
                let row = experiments::experiment_two_routes(&spec)?;
                eprintln!(
                    "v={v}: T_A {:.1}, T_B {:.1}, T_B/(sqrt2 T_A) = {:.3}",
                    row.t_a, row.t_b, row.ratio_vs_sqrt2
                );
                rows.push(row);
            }
            let content = match common.format {
                Format::Csv => experiments::two_routes_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)?,
            };
            let ext = if matches!(common.format, Format::Csv) {
                "csv"
            } else {
                "json"
            };
            emit(
                out_file(&common.out, &format!("two_routes.{ext}")).as_deref(),
                &content,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<TimeoutError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
