use std::process::ExitCode;

use clap::Parser;
use foliated_hodge::scalar::set_float_tolerance;
use foliated_hodge_cli::{output_path, run, Cli, EXIT_MODEL_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(eps) = std::env::var("FOLIATED_HODGE_EPS") {
        match eps.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => set_float_tolerance(x),
            _ => {
                eprintln!("error: FOLIATED_HODGE_EPS must be a positive number, got `{eps}`");
                return ExitCode::from(EXIT_MODEL_ERROR as u8);
            }
        }
    }
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_MODEL_ERROR as u8);
        }
    };
    match output_path(&cli) {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_MODEL_ERROR as u8);
            }
        }
        None => print!("{}", outcome.output),
    }
    ExitCode::from(outcome.code as u8)
}
