//! Runtime-distribution workbench for stochastic local search SAT solving.
//!
//! The crate covers the full experimental loop for studying how adding
//! redundant resolvent clauses to a CNF formula reshapes the distribution of
//! solver runtimes (counted in variable flips):
//!
//! * [`cnf`] / [`dimacs`] — formulas, assignments, exact queries, DIMACS I/O.
//! * [`resolution`] — width-restricted resolution closures and random
//!   extension sampling from them.
//! * [`solvers`] — Schöning-style random walk and probSAT, instrumented to
//!   report exact flip counts.
//! * [`generate`] — uniform and planted random k-CNF instance generation.
//! * [`dist`] — normal, Johnson SB, and lognormal distributions plus tail
//!   and hazard diagnostics.
//! * [`fit`] — maximum-likelihood fitting, chi-square statistics, and the
//!   parametric bootstrap goodness-of-fit test.
//! * [`restart`] — when restarting a randomized solver beats letting it run.
//! * [`shares`] — Monte-Carlo models of the clause-selection share ratios a
//!   random extension induces.
//! * [`experiment`] — deterministic, resumable batch orchestration.
//!
//! All randomness flows through [`rng`], a fixed SplitMix64 generator with
//! explicit seed derivation, so every result in the crate is reproducible
//! bit-for-bit regardless of platform or thread count.

#![warn(missing_docs)]

pub mod cnf;
pub mod dimacs;
pub mod dist;
pub mod experiment;
pub mod fit;
pub mod generate;
pub mod quad;
pub mod resolution;
mod resolution_masked;
pub mod restart;
pub mod rng;
pub mod shares;
pub mod solvers;
