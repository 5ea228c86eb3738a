//! `degennes`: band functions of the de Gennes operator from the command line.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage error, 3 a
//! verification criterion failed.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use degennes::Error;

use crate::args::FormatArg;
use crate::output::Format;

const EXIT_NUMERICAL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

fn is_usage_error(e: &Error) -> bool {
    match e {
        Error::Config(_) | Error::Domain(_) => true,
        Error::AtParameter { source, .. } => is_usage_error(source),
        _ => false,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("DEGENNES_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = match value.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return Err(format!("DEGENNES_NUM_THREADS must be a positive integer, got `{value}`")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot configure the thread pool: {e}"))
}

fn main() -> ExitCode {
    let cli = match args::parse(std::env::args_os().collect()) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let outcome = match commands::run(&cli.global, &cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_usage_error(&e) { EXIT_USAGE } else { EXIT_NUMERICAL });
        }
    };

    let format = match cli.global.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let bytes = outcome.report.render(format);
    let path = cli
        .global
        .out
        .clone()
        .unwrap_or_else(|| format!("{}.{}", cli.command.name(), format.extension()).into());
    if let Err(e) = std::fs::write(&path, &bytes) {
        eprintln!("error: cannot write {}: {e}", path.display());
        return ExitCode::from(EXIT_USAGE);
    }
    eprintln!("wrote {}", path.display());
    if cli.global.stdout {
        let mut out = std::io::stdout().lock();
        if out.write_all(&bytes).and_then(|_| out.flush()).is_err() {
            return ExitCode::from(EXIT_NUMERICAL);
        }
    }
    if outcome.verified {
        ExitCode::SUCCESS
    } else {
        eprintln!("verification failed; see the summary in {}", path.display());
        ExitCode::from(EXIT_VERIFICATION)
    }
}
