use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod args;
mod commands;
mod manifest;

use commands::{encode, limits, verify};

/// Upper limits on the AC Huffman code length of one 8x8 JPEG Baseline block.
#[derive(Debug, Parser)]
#[command(name = "acbound", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate limits for annex-K tables at the given scale factors.
    Limits(limits::LimitsArgs),
    /// Encode one block file and report its AC code length.
    Encode(encode::EncodeArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Limits(args) => limits::run(args).map(|out| (out, true)),
        Command::Encode(args) => encode::run(args).map(|out| (out, true)),
        Command::Verify(args) => verify::run(args),
    };
    match result {
        Ok((out, passed)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
