use std::process::ExitCode;

use clap::Parser;
use matdist_cli::{run, Cli, CliError, ErrorKind};

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::new(ErrorKind::Parse, e.to_string().trim_end())),
    };
    let report = match run(&cli.command) {
        Ok(report) => report.to_json(),
        Err(e) => return fail(&e),
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, report.as_bytes()),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(report.as_bytes())
        }
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&CliError::from(e)),
    }
}
