mod commands;
mod error;
mod problem;
mod report;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ejof_core::dynamics::TimeScaling;
use ejof_core::qec::Pauli;

use commands::{Common, Outcome};
use error::{CliError, EXIT_OK, EXIT_VERIFICATION};
use scenario::ScenarioParams;

#[derive(Parser)]
#[command(
    name = "ejof",
    version,
    about = "Effective Lindbladians inside decoherence-free subspaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Write the machine-readable JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the main verification tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for flat CSV series.
    #[arg(long, global = true)]
    plot_data: Option<PathBuf>,
    /// Compute the general route even when structure validation fails.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Effective Lindbladian of a problem file by both routes.
    Effective { file: PathBuf },
    /// Dual-route, identity and corner checks on a file or random instances.
    Verify {
        file: Option<PathBuf>,
        /// D N TRIALS SEED: random instances with a D-dim DFS and N decaying states.
        #[arg(long, num_args = 4, value_names = ["D", "N", "TRIALS", "SEED"], conflicts_with = "file")]
        random: Option<Vec<u64>>,
    },
    /// Run a named scenario.
    Scenario {
        name: ScenarioName,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "Gamma")]
        gamma_big: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_enum)]
        targets: Option<TargetsArg>,
        #[arg(long, value_enum)]
        miscal: Option<PauliArg>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Robustness of a continuous error-correcting code to miscalibration.
    Qec {
        code: Code,
        #[arg(long, value_enum)]
        miscal: PauliArg,
        #[arg(long, default_value_t = ejof_core::qec::DEFAULT_EPSILON)]
        eps: f64,
    },
    /// Compare projected full dynamics with the effective evolution.
    Evolve {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Comma-separated perturbation scales.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Comma-separated rescaled times.
        #[arg(long, value_delimiter = ',')]
        tau: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioName {
    ThreeLevel,
    Cancellation,
    CoherentCancel,
    Universal,
    Repetition,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetsArg {
    Pauli,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum PauliArg {
    #[value(name = "X", alias = "x")]
    X,
    #[value(name = "Y", alias = "y")]
    Y,
    #[value(name = "Z", alias = "z")]
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum Code {
    Repetition,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FirstOrder,
    SecondOrder,
}

impl From<PauliArg> for Pauli {
    fn from(p: PauliArg) -> Self {
        match p {
            PauliArg::X => Pauli::X,
            PauliArg::Y => Pauli::Y,
            PauliArg::Z => Pauli::Z,
        }
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let common = Common {
        tol: cli.global.tol,
        seed: cli.global.seed,
        force: cli.global.force,
    };
    if let Some(t) = common.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {t}")));
        }
    }
    match &cli.command {
        Command::Effective { file } => commands::effective(&read(file)?, &common),
        Command::Verify { file, random } => match (file, random) {
            (Some(f), None) => commands::verify_file(&read(f)?, &common),
            (None, Some(r)) => {
                commands::verify_random(r[0] as usize, r[1] as usize, r[2] as usize, r[3], &common)
            }
            _ => Err(CliError::Input(
                "verify needs a problem file or --random D N TRIALS SEED".into(),
            )),
        },
        Command::Scenario {
            name,
            delta,
            gamma_big,
            gamma,
            targets,
            miscal,
            eps,
        } => {
            let params = ScenarioParams {
                name: value_name(*name),
                delta: *delta,
                gamma_big: *gamma_big,
                gamma: *gamma,
                seed: Some(common.seed),
                targets: targets.map(value_name),
                miscal: miscal.map(|m| Pauli::from(m).label().to_string()),
                eps: *eps,
            };
            commands::scenario(&params, &common)
        }
        Command::Qec {
            code: _,
            miscal,
            eps,
        } => commands::qec((*miscal).into(), *eps, &common),
        Command::Evolve {
            file,
            mode,
            eps,
            tau,
        } => {
            let mode = match mode {
                ModeArg::FirstOrder => TimeScaling::FirstOrder,
                ModeArg::SecondOrder => TimeScaling::SecondOrder,
            };
            commands::evolve(&read(file)?, mode, eps.clone(), tau.clone(), &common)
        }
    }
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    if let Some(out) = &cli.global.out {
        let mut text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
        text.push('\n');
        write(out, &text)?;
        if let Command::Evolve { .. } = cli.command {
            if let Some((_, csv)) = outcome.plots.first() {
                write(&out.with_extension("csv"), csv)?;
            }
        }
    }
    if let Some(dir) = &cli.global.plot_data {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        for (name, csv) in &outcome.plots {
            write(&dir.join(name), csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli).and_then(|outcome| emit(&cli, &outcome).map(|_| outcome));
    match result {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            println!("elapsed {:.3}s", start.elapsed().as_secs_f64());
            ExitCode::from(if outcome.verified {
                EXIT_OK
            } else {
                EXIT_VERIFICATION
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
