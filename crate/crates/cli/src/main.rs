use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hamming_cli::args::{Cli, Command};
use hamming_cli::{certify, compute, fit, sweep, CliResult, Exit};

fn run(cli: Cli) -> CliResult<Exit> {
    match cli.command {
        Command::Compute(a) => {
            println!("{}", compute::run(&a)?);
            Ok(Exit::Ok)
        }
        Command::Sweep(a) => {
            let out = sweep::run(&a)?;
            match &out.destination {
                None => std::io::stdout().write_all(&out.bytes)?,
                Some(path) => eprintln!("wrote {} rows ({} failed) to {}", out.rows, out.failed, path.display()),
            }
            if out.exit() != Exit::Ok {
                eprintln!("error: every grid point failed");
            }
            Ok(out.exit())
        }
        Command::Certify(a) => {
            let (line, passed) = certify::run(&a)?;
            println!("{line}");
            Ok(if passed { Exit::Ok } else { Exit::Failure })
        }
        Command::Fit(a) => {
            println!("{}", fit::run(&a)?);
            Ok(Exit::Ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exit = match run(cli) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit
        }
    };
    ExitCode::from(exit as u8)
}
