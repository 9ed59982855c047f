//! Shared input/output helpers for the subcommands.

use std::io::Read;
use std::path::{Path, PathBuf};

use slsdist::cnf::CnfFormula;
use slsdist::dimacs::parse_dimacs;

use crate::errors::CliError;

/// Reads a DIMACS formula from a path, or from stdin when no path is given.
pub fn read_formula(input: Option<&Path>) -> Result<CnfFormula, CliError> {
    let text = match input {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let parsed = parse_dimacs(&text)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(parsed.formula)
}

/// Writes text to a path, or to stdout when no path is given.
pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Prints the effective configuration of a subcommand to stderr as a single
/// JSON line, so runs are self-describing without polluting stdout.
pub fn print_config(config: &serde_json::Value) {
    eprintln!("config: {config}");
}

/// Renders an optional path for config JSON.
pub fn path_json(p: Option<&PathBuf>) -> serde_json::Value {
    match p {
        Some(path) => serde_json::Value::String(path.display().to_string()),
        None => serde_json::Value::Null,
    }
}
