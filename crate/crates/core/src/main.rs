use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mutual_review::cli::{self, CliError, Overrides};
use mutual_review::Engine;

/// Simulate distributed peer review with Modified Borda Count and quality bonuses.
#[derive(Parser)]
#[command(name = "mutual-review", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig1 … fig12) or a scenario file and write CSV results.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
    /// Print the scenario text of a preset.
    Show { preset: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        matches!(s, Switch::On)
    }
}

#[derive(clap::Args)]
struct RunArgs {
    /// Preset name or path to a TOML scenario.
    target: String,
    /// Directory for result files.
    #[arg(long, short, default_value = "results")]
    out: PathBuf,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    rate: Option<f64>,
    /// Distance-decay exponent of the utility model.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    replications: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Force bonuses on or off in every arm.
    #[arg(long, value_enum)]
    bonus: Option<Switch>,
    /// Common random numbers across compared arms.
    #[arg(long, value_enum)]
    paired: Option<Switch>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "MUTUAL_REVIEW_WORKERS")]
    workers: Option<usize>,
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let overrides = Overrides {
        n: args.n,
        m: args.m,
        rate: args.rate,
        p: args.p,
        replications: args.replications,
        seed: args.seed,
        bonus: args.bonus.map(Into::into),
        paired: args.paired.map(Into::into),
    };
    let resolved = cli::load(&args.target, &overrides)?;
    let engine = match args.workers {
        Some(w) if w > 0 => Engine::with_workers(w),
        _ => Engine::new(),
    };
    let results = cli::execute(&resolved, &engine)?;
    let files = cli::write_results(&results, &args.out)?;
    for line in cli::summary_lines(&results) {
        println!("{line}");
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match args.command {
        Command::Run(r) => run(r),
        Command::Presets => {
            for name in cli::preset_names() {
                println!("{name}");
            }
            Ok(())
        }
        Command::Show { preset } => match cli::preset_source(&preset) {
            Some(src) => {
                print!("{src}");
                Ok(())
            }
            None => Err(CliError::NotFound(preset)),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
