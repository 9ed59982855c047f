//! One module per subcommand.

pub mod check;
pub mod experiment;
pub mod extend;
pub mod fit;
pub mod generate;
pub mod restart;
pub mod shares;
pub mod solve;

use slsdist::cnf::Assignment;

/// An assignment as signed DIMACS literals (`var` if true, `-var` if not).
pub fn witness_literals(w: &Assignment) -> Vec<i64> {
    w.values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let var = (i + 1) as i64;
            if v {
                var
            } else {
                -var
            }
        })
        .collect()
}
