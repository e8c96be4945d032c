mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use report::{envelope, render_text, Inputs, EXIT_OK, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "parrep", version, about = "Structure, values and repetition experiments for multiplayer games")]
struct Cli {
    /// Output rendering.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structural flags, embedding witnesses and the marginal condition of a game's support.
    Classify {
        /// `gallery:<name>` or a path to a game JSON file.
        game: String,
    },
    /// Exact value by exhaustive search over deterministic strategies.
    Value {
        game: String,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Largest number of strategy profiles enumerated.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Greedy hard-coordinate chain of the optimal strategy of the repeated game.
    Chain {
        game: String,
        #[arg(long)]
        repeat: usize,
        /// Mass threshold for the hypothesis scan, as a rational.
        #[arg(long, default_value = "1/1048576")]
        alpha: String,
        #[arg(long, value_enum, default_value_t = commands::Family::ChainPrefixes)]
        family: commands::Family,
    },
    /// Embedding strategy of one copy inside the repeated game, conditioned on an event.
    SimulateEmbed {
        game: String,
        #[arg(long)]
        repeat: usize,
        /// JSON file: per player, the list of repeated question labels in the event.
        #[arg(long)]
        event: String,
        /// Enumerate the shared randomness instead of sampling.
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Uniformize a family of bounded functions with generalized random restrictions.
    Uniformize {
        /// JSON file with `n`, the measure and the function tables.
        functions: String,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a gallery game, e.g. `gallery ghz` or `gallery rect 3 2`.
    Gallery {
        name: String,
        params: Vec<String>,
        /// Print only the game JSON.
        #[arg(long)]
        raw: bool,
    },
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let started = Instant::now();
    let mut inputs = Inputs::default();
    for a in &argv[1..] {
        inputs.add("arg", a.as_bytes());
    }
    let outcome = commands::run(&cli.command, &mut inputs);

    if let (Command::Gallery { raw: true, .. }, Ok(v)) = (&cli.command, &outcome) {
        emit(&serde_json::to_string_pretty(&v["game"]).expect("serializable"));
        return ExitCode::from(EXIT_OK);
    }
    let code = match &outcome {
        Ok(_) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    let report = envelope(&argv[1..], inputs, started, &outcome);
    emit(&match cli.format {
        Format::Json => report.to_string(),
        Format::Pretty => serde_json::to_string_pretty(&report).expect("serializable"),
        Format::Text => render_text(&report),
    });
    ExitCode::from(code)
}
