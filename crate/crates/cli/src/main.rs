mod args;
mod commands;
mod error;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format, OutputArgs};
use error::CliError;
use report::{Report, Summary};

fn output_args(command: &Command) -> Option<&OutputArgs> {
    match command {
        Command::Pmf(a) => Some(&a.out),
        Command::Stirling(a) => Some(&a.out),
        Command::Divergence(a) => Some(&a.out),
        Command::Ldp(a) => Some(&a.out),
        Command::Clt(a) => Some(&a.out),
        Command::Collapse(a) => Some(&a.out),
        Command::Report(_) => None,
    }
}

fn write_report<W: Write>(report: &Report, format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => report.write_csv(out),
        Format::Json => report.write_json(out),
    }
}

fn emit(report: &Report, out: &OutputArgs) -> Result<(), CliError> {
    let line = report.summary.line();
    match &out.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_report(report, out.format, &mut file)?;
            file.flush()?;
            println!("{line}");
        }
        None => {
            write_report(report, out.format, io::stdout().lock())?;
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn replay(path: &std::path::Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage("--input", e.to_string()))?;
    let report: Report = serde_json::from_str(&text).map_err(|e| CliError::usage("--input", e.to_string()))?;
    println!("{}", report.summary.line());
    Ok(())
}

fn report_failure(err: &CliError, summary: &Summary, out: Option<&OutputArgs>) {
    eprintln!("error: {err}");
    let Some(mut diagnostic) = err.diagnostic() else { return };
    diagnostic["summary"] = serde_json::to_value(summary).expect("summary serializes");
    let text = serde_json::to_string_pretty(&diagnostic).expect("diagnostic serializes");
    eprintln!("{text}");
    if let Some(OutputArgs {
        output: Some(path),
        format: Format::Json,
    }) = out
    {
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("error: could not write diagnostic to {}: {e}", path.display());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Report(a) = &cli.command {
        return match replay(&a.input) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }
    let summary = commands::describe(&cli.command);
    let out = output_args(&cli.command);
    let result = commands::run(&cli.command, summary.clone())
        .and_then(|report| emit(&report, out.expect("computing commands take output flags")));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report_failure(&e, &summary, out);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
