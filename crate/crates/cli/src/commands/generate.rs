//! `slsdist generate` — random k-CNF instances.

use std::path::{Path, PathBuf};

use serde_json::json;
use slsdist::dimacs::{emit_dimacs, emit_dimacs_with_comments};
use slsdist::generate::{gen_planted, gen_uniform, GenSpec};

use super::witness_literals;
use crate::args::{GenerateArgs, KindArg};
use crate::errors::CliError;
use crate::io_util::{path_json, print_config, write_text};

pub fn run(args: &GenerateArgs) -> Result<(), CliError> {
    let spec = GenSpec {
        num_vars: args.num_vars,
        clause_width: args.clause_width,
        ratio: args.ratio,
        seed: args.seed,
    };
    print_config(&json!({
        "command": "generate",
        "kind": format!("{:?}", args.kind).to_lowercase(),
        "num_vars": args.num_vars,
        "clause_width": args.clause_width,
        "ratio": args.ratio,
        "seed": args.seed,
        "out": path_json(args.out.as_ref()),
    }));

    match args.kind {
        KindArg::Uniform => {
            let f = gen_uniform(&spec)?;
            write_text(args.out.as_deref(), &emit_dimacs(&f))
        }
        KindArg::Planted => {
            let (f, witness) = gen_planted(&spec)?;
            let lits: Vec<String> =
                witness_literals(&witness).iter().map(|l| l.to_string()).collect();
            let lit_line = format!("{} 0", lits.join(" "));
            match &args.out {
                Some(path) => {
                    write_text(Some(path), &emit_dimacs(&f))?;
                    let wpath = witness_path(path);
                    std::fs::write(&wpath, format!("{lit_line}\n")).map_err(|e| {
                        CliError::Data(format!("cannot write {}: {e}", wpath.display()))
                    })?;
                    eprintln!("witness: {}", wpath.display());
                    Ok(())
                }
                None => {
                    let text =
                        emit_dimacs_with_comments(&f, &[format!("witness {lit_line}")]);
                    write_text(None, &text)
                }
            }
        }
    }
}

fn witness_path(out: &Path) -> PathBuf {
    PathBuf::from(format!("{}.witness", out.display()))
}
