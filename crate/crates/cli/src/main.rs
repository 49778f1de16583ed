use std::process::ExitCode;

use clap::error::ErrorKind;
use riesz_lab_cli::{cli_parse, run, CliError};

fn main() -> ExitCode {
    let config = match cli_parse(std::env::args_os()) {
        Ok(c) => c,
        Err(CliError::Usage(e)) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(e),
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    match &config.output {
        Some(prefix) => {
            if let Err(e) = report.write(prefix) {
                return fail(e);
            }
            print!("{}", report.to_json());
        }
        None => {
            print!("{}", report.to_csv());
            eprint!("{}", report.to_json());
        }
    }
    ExitCode::SUCCESS
}

fn fail(e: CliError) -> ExitCode {
    match &e {
        CliError::Usage(u) => {
            let _ = u.print();
        }
        other => eprintln!("error: {other}"),
    }
    ExitCode::from(e.exit_code() as u8)
}
