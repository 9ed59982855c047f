//! Throwaway timing probe; not part of the suite.

use std::io::Write as _;
use std::time::Instant;

use slsdist::generate::{gen_uniform, GenSpec};
use slsdist::resolution::{resolution_closure, ClosureLimits};
use slsdist::rng::{derive_seed, Role};

#[test]
#[ignore]
fn probe_closures() {
    let mut log = std::fs::File::create("/tmp/probe.log").unwrap();
    for n in [20u32, 30, 40] {
        let f = gen_uniform(&GenSpec {
            num_vars: n,
            clause_width: 3,
            ratio: 4.267,
            seed: derive_seed(3, Role::Generate, 0),
        })
        .unwrap();
        let t = Instant::now();
        let c = resolution_closure(&f, 4, ClosureLimits { max_clauses: 8_000_000, max_rounds: 64 })
            .unwrap();
        writeln!(
            log,
            "n={n}: closure={} pool={} rounds={} generated={} in {:?}",
            c.clauses.len(),
            c.pool.len(),
            c.stats.rounds,
            c.stats.generated,
            t.elapsed()
        )
        .unwrap();
        log.flush().unwrap();
    }
    let f = gen_uniform(&GenSpec {
        num_vars: 50,
        clause_width: 3,
        ratio: 4.267,
        seed: derive_seed(3, Role::Generate, 0),
    })
    .unwrap();
    let t = Instant::now();
    let c = resolution_closure(&f, 4, ClosureLimits { max_clauses: 8_000_000, max_rounds: 64 })
        .unwrap();
    writeln!(
        log,
        "n=50: closure={} pool={} rounds={} generated={} in {:?}",
        c.clauses.len(),
        c.pool.len(),
        c.stats.rounds,
        c.stats.generated,
        t.elapsed()
    )
    .unwrap();
    log.flush().unwrap();
}
