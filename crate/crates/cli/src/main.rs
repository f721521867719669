//! `armfatigue` command-line tool.
//!
//! Exit status is 0 on success, 2 for bad arguments or scenario input and 1
//! when a computation fails. Warnings go to stderr; results go to stdout or
//! the `--out` file.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use armfatigue::fatigue::IndexMode;
use armfatigue::report::{emit_report, Format, Report};
use armfatigue::scenario::{
    endurance_report, load_scenario, run_scenario, schedule_report, strength_report, sweep_report,
    torque_report, Context, Scenario,
};
use armfatigue::{Error, Execution};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "armfatigue", version, about = "Arm muscle fatigue and posture evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Endurance times, fatigue indices, recovery times and hole counts.
    Endurance(Common),
    /// Capacity trajectories over the work/rest schedule.
    Schedule(Common),
    /// Joint torques at the working posture.
    Torque(Common),
    /// Strength at the working posture and the strength surface.
    Strength {
        #[command(flatten)]
        common: Common,
        /// Strength surface grid spacing, degrees.
        #[arg(long, default_value_t = 5.0)]
        step: f64,
    },
    /// Working-distance sweep, optimum and Pareto set.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Objective weights `w1,w2` for fatigue and discomfort.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<[f64; 2]>,
        /// Sweep step, m.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Everything the scenario defines.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Population offsets in standard deviations, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    z: Option<Vec<f64>>,
    /// Fatigue index definition.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Run batch evaluations on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Table,
    Literal,
}

fn parse_weights(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `w1,w2`, got `{s}`"));
    }
    let w1 = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let w2 = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([w1, w2])
}

fn prepare(common: &Common) -> Result<(Scenario, PathBuf), Error> {
    let (mut s, base) = load_scenario(&common.scenario)?;
    if let Some(z) = &common.z {
        s.population_z = z.clone();
    }
    if let Some(m) = common.mode {
        s.fatigue.index_mode = match m {
            Mode::Table => IndexMode::Table,
            Mode::Literal => IndexMode::Literal,
        };
    }
    Ok((s, base))
}

fn execution(common: &Common) -> Execution {
    if common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn context(s: &Scenario, base: &Path, common: &Common) -> Result<Context, Error> {
    Context::new(s, base, execution(common))
}

fn run(cmd: &Command) -> Result<(Report, &Common), Error> {
    match cmd {
        Command::Endurance(c) => {
            let (s, base) = prepare(c)?;
            Ok((endurance_report(&context(&s, &base, c)?)?, c))
        }
        Command::Schedule(c) => {
            let (s, base) = prepare(c)?;
            Ok((schedule_report(&context(&s, &base, c)?)?, c))
        }
        Command::Torque(c) => {
            let (s, base) = prepare(c)?;
            Ok((torque_report(&context(&s, &base, c)?)?, c))
        }
        Command::Strength { common, step } => {
            let (s, base) = prepare(common)?;
            if !(*step > 0.0) {
                return Err(Error::Scenario(format!("--step must be > 0, got {step}")));
            }
            Ok((strength_report(&context(&s, &base, common)?, *step)?, common))
        }
        Command::Optimize { common, weights, step } => {
            let (mut s, base) = prepare(common)?;
            let sweep = s
                .sweep
                .as_mut()
                .ok_or_else(|| Error::Scenario("optimize needs a [sweep] section".into()))?;
            if let Some(w) = weights {
                sweep.weights = *w;
            }
            if let Some(st) = step {
                sweep.step_m = *st;
            }
            Ok((sweep_report(&context(&s, &base, common)?)?, common))
        }
        Command::Report(c) => {
            let (s, base) = prepare(c)?;
            Ok((run_scenario(&s, &base, execution(c))?, c))
        }
    }
}

fn write(report: &Report, common: &Common) -> Result<(), Error> {
    let format = match common.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Jsonl => Format::Jsonl,
    };
    match &common.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            emit_report(report, format, BufWriter::new(f))
        }
        None => emit_report(report, format, io::stdout().lock()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|(report, common)| {
        let mut err = io::stderr().lock();
        for w in &report.warnings {
            let _ = writeln!(err, "warning: {w}");
        }
        write(&report, common)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
