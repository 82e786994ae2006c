//! Batch front end. Reads line-oriented input files (or stdin with `-`),
//! runs one of the three commands, prints the deterministic report, and
//! exits 0 on success, 1 on a mathematical failure, 2 on usage or guard
//! errors.

mod commands;
mod input;

use clap::{Args, Parser, Subcommand};
use commands::{
    cmd_expand, cmd_synth, cmd_verify, CliFailure, ExpandOpts, Format, Strategy, SynthOpts,
    VerifyOpts,
};
use std::io::Read;
use std::process::exit;

#[derive(Parser)]
#[command(
    name = "mcf",
    version,
    about = "Exact multidimensional continued fractions over Laurent series with prime-field coefficients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a series vector into its continued fraction structure
    Expand(ExpandCli),
    /// Joint linear-complexity profile of sequence rows
    Synth(SynthCli),
    /// Check the structural laws on a series, a structure, or both
    Verify(VerifyCli),
}

#[derive(Args)]
struct CommonCli {
    /// Field characteristic (overrides any p= header)
    #[arg(long)]
    p: Option<u64>,
    /// Component count; must match the input rows
    #[arg(long)]
    m: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExpandCli {
    /// Input file, or - for stdin
    input: String,
    #[command(flatten)]
    common: CommonCli,
    /// Position budget for emitted steps (overrides any N= header)
    #[arg(long)]
    precision: Option<i64>,
    /// Carry strategy during expansion
    #[arg(long, value_enum, default_value_t = Strategy::Zero)]
    strategy: Strategy,
}

#[derive(Args)]
struct SynthCli {
    /// Input file, or - for stdin
    input: String,
    #[command(flatten)]
    common: CommonCli,
    /// Use only the first N columns (overrides any N= header)
    #[arg(long)]
    precision: Option<i64>,
    /// Append an enumeration column and an agreement marker to each row
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct VerifyCli {
    /// Input file, or - for stdin; may hold rows, a cf: line, or both
    input: Option<String>,
    /// File holding a structure in the canonical serialization
    #[arg(long)]
    cf: Option<String>,
    #[command(flatten)]
    common: CommonCli,
    /// Expansion budget / evaluation window (overrides any N= header)
    #[arg(long)]
    precision: Option<i64>,
    /// Carry strategy when expanding series input
    #[arg(long, value_enum, default_value_t = Strategy::Zero)]
    strategy: Strategy,
    /// Degree cap for the best-approximation enumeration
    #[arg(long, default_value_t = 3)]
    oracle_degree: i64,
    /// Worker threads for the enumeration
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn read_source(path: &str) -> Result<String, CliFailure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliFailure {
                code: 2,
                message: format!("cannot read stdin: {e}"),
            })?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliFailure {
            code: 2,
            message: format!("cannot read {path}: {e}"),
        })
    }
}

fn run() -> Result<(String, i32), CliFailure> {
    let cli = Cli::parse();
    match cli.command {
        Command::Expand(args) => {
            let text = read_source(&args.input)?;
            cmd_expand(
                &text,
                &ExpandOpts {
                    p: args.common.p,
                    m: args.common.m,
                    precision: args.precision,
                    strategy: args.strategy,
                    format: args.common.format,
                },
            )
        }
        Command::Synth(args) => {
            let text = read_source(&args.input)?;
            cmd_synth(
                &text,
                &SynthOpts {
                    p: args.common.p,
                    m: args.common.m,
                    precision: args.precision,
                    oracle: args.oracle,
                    format: args.common.format,
                },
            )
        }
        Command::Verify(args) => {
            let text = match &args.input {
                Some(path) => Some(read_source(path)?),
                None => None,
            };
            let cf_text = match &args.cf {
                Some(path) => Some(read_source(path)?),
                None => None,
            };
            cmd_verify(
                text.as_deref(),
                cf_text.as_deref(),
                &VerifyOpts {
                    p: args.common.p,
                    m: args.common.m,
                    precision: args.precision,
                    strategy: args.strategy,
                    oracle_degree: args.oracle_degree,
                    jobs: args.jobs,
                    format: args.common.format,
                },
            )
        }
    }
}

fn main() {
    match run() {
        Ok((output, code)) => {
            print!("{output}");
            exit(code);
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            exit(failure.code);
        }
    }
}
