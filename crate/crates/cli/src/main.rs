mod check;
mod commands;
mod input;

use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use posigraph::decomposition::DEFAULT_BITS;
use posigraph::Error;
use serde_json::Value;

use commands::Outcome;

#[derive(Parser)]
#[command(name = "posigraph", version)]
#[command(about = "Exact homomorphism densities and positivity certificates for hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a named object as JSON: grid R, single-edge R, fano, cycle N,
    /// star K, subdivision-krr R, set-inclusion N M K, set-inclusion-graph
    /// N M K, levi [OBJ], double [OBJ], box-product A B, signed-box-square [OBJ]
    Construct {
        kind: String,
        args: Vec<String>,
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Count homomorphisms (or sum their weights for a weighted target)
    Homcount {
        #[arg(long, default_value = "-")]
        input: String,
        /// Object name or JSON file
        #[arg(long)]
        target: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Homomorphism density against a step function
    Density {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        step: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Exhaustive stable-involution search
    Involution {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Quick positivity checks and odd-edge certificate
    Certify {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Grid counterexample pipeline, ending in a negativity certificate
    GridPipeline {
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<String>,
    },
    /// Rank-one decomposition of a symmetric step function
    Decompose {
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BITS)]
        precision: u32,
        #[arg(long)]
        output: Option<String>,
    },
    /// Move a negative density from H to its Levi graph
    Transfer {
        /// Pattern (with --step) or a negativity certificate
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        step: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BITS)]
        precision: u32,
        /// Where to write the real-mode witness step function
        #[arg(long)]
        output: Option<String>,
    },
    /// Re-check a certificate file
    Verify {
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Compare the engines against the brute-force oracle on random instances
    Check {
        #[arg(long, default_value_t = 30)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Inconclusive(_) | Error::GeneratorShortfall(_) => 3,
        Error::Internal(_) => 4,
        _ => 2,
    }
}

fn write_file(path: &str, value: &Value) -> Result<(), Error> {
    fs::write(path, format!("{value}\n")).map_err(|e| Error::InvalidParameter(format!("writing {path}: {e}")))
}

fn run(command: Command) -> Result<(Outcome, Option<String>), Error> {
    Ok(match command {
        Command::Construct {
            kind,
            args,
            input,
            output,
        } => (commands::construct(&kind, &args, &input)?, output),
        Command::Homcount { input, target, output } => (commands::homcount(&input, &target)?, output),
        Command::Density { input, step, output } => (commands::density(&input, &step)?, output),
        Command::Involution { input, output } => (commands::involution(&input)?, output),
        Command::Certify { input, output } => (commands::certify(&input)?, output),
        Command::GridPipeline { r, n, seed, output } => (commands::pipeline(r, n, seed)?, output),
        Command::Decompose {
            input,
            seed,
            precision,
            output,
        } => (commands::decompose(&input, seed, precision)?, output),
        Command::Transfer {
            input,
            step,
            seed,
            precision,
            output,
        } => {
            let (outcome, witness) = commands::transfer(&input, step.as_deref(), seed, precision)?;
            if let (Some(path), Some(w)) = (&output, witness) {
                write_file(path, &w)?;
            }
            (outcome, None)
        }
        Command::Verify { input } => (commands::verify(&input)?, None),
        Command::Check { budget, seed } => (check::check(budget, seed)?, None),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((outcome, output)) => {
            if !outcome.report.is_empty() {
                eprintln!("{}", outcome.report);
            }
            match output {
                Some(path) => {
                    if let Err(e) = write_file(&path, &outcome.json) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{}", outcome.json),
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
