mod args;
mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;

/// Writes the document; a closed pipe is not an error of ours.
fn emit(json: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{json}");
}

fn fail(message: &str) -> ExitCode {
    emit(&commands::error_document(message));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return fail(&e);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let rendered = e.to_string();
            return fail(rendered.lines().next().unwrap_or("usage error").trim_start_matches("error: "));
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return fail(&e.to_string());
        }
    }
    match commands::run(&cli) {
        Ok(out) => {
            emit(&out.json);
            eprintln!("{}", out.summary);
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            fail(&e.to_string())
        }
    }
}
