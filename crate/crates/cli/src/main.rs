use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use boundwealth_cli::commands::{
    cmd_price, cmd_probability, cmd_quantiles, cmd_shadow, cmd_simulate, SimulateOptions,
};
use boundwealth_cli::{CliError, ScenarioFile};

#[derive(Parser)]
#[command(name = "boundwealth", version)]
#[command(about = "Exponential-utility strategies with bounded terminal wealth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML)
    #[arg(long)]
    scenario: PathBuf,

    /// Write the main CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the budget constraint for the shadow initial wealth
    Shadow(Common),
    /// Theoretical vs empirical terminal-wealth quantiles
    Quantiles(Common),
    /// Run the Monte Carlo simulation
    Simulate {
        #[command(flatten)]
        common: Common,

        /// Write the step-by-step record of one path to this file
        #[arg(long)]
        dump_path: Option<PathBuf>,

        /// Which path to dump
        #[arg(long, default_value_t = 0)]
        path_index: u64,

        /// Write a histogram of terminal wealth to this file
        #[arg(long)]
        histogram_out: Option<PathBuf>,

        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
    /// Probabilities that capping the investment never or always binds
    Probability(Common),
    /// Option prices and replicating portfolios
    Price {
        #[command(flatten)]
        common: Common,

        /// Valuation time in years
        #[arg(long, default_value_t = 0.0)]
        t: f64,

        /// Shadow wealth at `t` (defaults to the shadow value grown at r)
        #[arg(long, allow_negative_numbers = true)]
        shadow: Option<f64>,
    },
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Shadow(c) => {
            let file = ScenarioFile::load(&c.scenario)?;
            write_output(c.out.as_deref(), &cmd_shadow(&file)?)
        }
        Command::Quantiles(c) => {
            let file = ScenarioFile::load(&c.scenario)?;
            write_output(c.out.as_deref(), &cmd_quantiles(&file)?)
        }
        Command::Probability(c) => {
            let file = ScenarioFile::load(&c.scenario)?;
            write_output(c.out.as_deref(), &cmd_probability(&file)?)
        }
        Command::Price { common, t, shadow } => {
            let file = ScenarioFile::load(&common.scenario)?;
            write_output(common.out.as_deref(), &cmd_price(&file, t, shadow)?)
        }
        Command::Simulate {
            common,
            dump_path,
            path_index,
            histogram_out,
            bins,
        } => {
            let file = ScenarioFile::load(&common.scenario)?;
            let options = SimulateOptions {
                dump_path: dump_path.as_ref().map(|_| path_index),
                histogram_bins: histogram_out.as_ref().map(|_| bins),
            };
            let output = cmd_simulate(&file, &options)?;
            if let (Some(p), Some(csv)) = (&dump_path, &output.path) {
                write_output(Some(p), csv)?;
            }
            if let (Some(p), Some(csv)) = (&histogram_out, &output.histogram) {
                write_output(Some(p), csv)?;
            }
            write_output(common.out.as_deref(), &output.terminal)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
