//! `slsdist extend` — sample a resolvent extension of a CNF.

use serde_json::json;
use slsdist::cnf::CnfFormula;
use slsdist::dimacs::emit_dimacs;
use slsdist::resolution::{
    calibrate_inclusion_prob, resolution_closure, sample_extension_from_pool, ClosureLimits,
};

use crate::args::ExtendArgs;
use crate::errors::CliError;
use crate::io_util::{path_json, print_config, read_formula, write_text};

pub fn run(args: &ExtendArgs) -> Result<(), CliError> {
    let f = read_formula(args.input.as_deref())?;
    let limits =
        ClosureLimits { max_clauses: args.max_clauses, max_rounds: args.max_rounds };
    let closure = resolution_closure(&f, args.width, limits)?;

    let target_fraction = match args.inclusion_prob {
        Some(_) => None,
        None => Some(args.target_fraction.unwrap_or(0.1)),
    };
    let p = match (args.inclusion_prob, target_fraction) {
        (Some(p), _) => p,
        (None, Some(fraction)) => calibrate_inclusion_prob(
            closure.pool.len(),
            fraction * f.num_clauses() as f64,
        )?,
        (None, None) => unreachable!("one sizing rule always applies"),
    };
    let ext = sample_extension_from_pool(&f, &closure.pool, args.width, p, args.seed)?;

    print_config(&json!({
        "command": "extend",
        "input": path_json(args.input.as_ref()),
        "width": args.width,
        "target_fraction": target_fraction,
        "effective_inclusion_prob": p,
        "seed": args.seed,
        "max_clauses": args.max_clauses,
        "max_rounds": args.max_rounds,
        "resolvents_only": args.resolvents_only,
        "out": path_json(args.out.as_ref()),
        "base_clauses": f.num_clauses(),
        "pool_size": closure.pool.len(),
        "closure_rounds": closure.stats.rounds,
        "closure_kept": closure.stats.kept,
        "extension_size": ext.resolvents.len(),
    }));

    let out_formula = if args.resolvents_only {
        CnfFormula::new(f.num_vars(), ext.resolvents.clone())?
    } else {
        f.extended(&ext.resolvents)
    };
    write_text(args.out.as_deref(), &emit_dimacs(&out_formula))
}
