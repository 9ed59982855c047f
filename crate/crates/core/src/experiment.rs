//! Deterministic, resumable batch orchestration.
//!
//! An [`ExperimentPlan`] fixes everything about a hardness-distribution
//! experiment: the base instance (a DIMACS file or generation
//! parameters), the number of modifications `M`, the resolution width
//! bound and extension sizing rule, the solver, and one master seed.
//! [`run_experiment`] then produces the hardness dataset — one row per
//! modification, each row the mean flip count of `runs_per_mod`
//! independent solver runs on the extended formula — with three hard
//! guarantees:
//!
//! * **Determinism**: every random choice is drawn from a seed derived as
//!   `derive_seed(master_seed, role, index)`, and worker results merge in
//!   task-index order, so the output file is byte-identical for the same
//!   plan regardless of thread count.
//! * **Resumability**: rows are flushed as they complete; on restart the
//!   valid prefix of an existing dataset is kept (a torn tail line from a
//!   kill is dropped) and work continues at the first missing row. The
//!   file carries a digest of the plan, so resuming under a different
//!   plan is an error, not a silent mix.
//! * **Auditability**: the dataset is a schema-versioned CSV whose rows
//!   record the per-modification extension seed and size next to the
//!   runtime statistics.
//!
//! Per-run seeds are independent across modifications (run `j` of
//! modification `i` is seeded from the modification's own extension
//! seed), not shared run-index seeds — the cross-instance coupling that
//! sharing would induce is unwanted here.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula};
use crate::dimacs::{parse_dimacs, DimacsError};
use crate::fit::{FitError, NoiseModel, Sample};
use crate::generate::{gen_planted, gen_uniform, screen_satisfiable, GenError, GenSpec, Screen};
use crate::resolution::{
    calibrate_inclusion_prob, resolution_closure, sample_extension_from_pool, ClosureLimits,
    ResolutionError,
};
use crate::rng::{derive_seed, Role};
use crate::solvers::{run_batch, Algorithm, SolverConfig, SolverError};

/// First line of every dataset file.
pub const DATASET_MAGIC: &str = "# slsdist-dataset v1";
/// Column header line of every dataset file.
pub const DATASET_COLUMNS: &str =
    "mod_index,extension_seed,extension_size,mean_flips,flips_var,runs,censored";

/// Orchestration failures.
#[derive(Debug, Error)]
pub enum ExperimentError {
    /// A plan must request at least one modification.
    #[error("plan requests zero modifications")]
    NoModifications,
    /// A plan must request at least one run per modification.
    #[error("plan requests zero runs per modification")]
    NoRuns,
    /// Explicit inclusion probabilities must lie in (0, 1].
    #[error("inclusion probability {p} outside (0, 1]")]
    BadInclusionProb {
        /// Offending value.
        p: f64,
    },
    /// Target extension fractions must be positive and finite.
    #[error("target extension fraction {fraction} is not positive and finite")]
    BadTargetFraction {
        /// Offending value.
        fraction: f64,
    },
    /// The base instance is unsatisfiable; hardness is undefined.
    #[error("base instance is unsatisfiable")]
    BaseUnsatisfiable,
    /// The screen could not certify the base within budget.
    #[error(
        "satisfiability screen exhausted its budget without a verdict; \
         set trust_base to proceed anyway"
    )]
    BaseUnverified,
    /// The dataset file does not start with the schema line.
    #[error("{path}: not a dataset file (missing `{DATASET_MAGIC}` header)")]
    BadHeader {
        /// Offending file.
        path: PathBuf,
    },
    /// The dataset was produced by a different plan.
    #[error("{path}: dataset belongs to plan {found}, expected {expected}")]
    PlanMismatch {
        /// Offending file.
        path: PathBuf,
        /// Digest recorded in the file.
        found: String,
        /// Digest of the active plan.
        expected: String,
    },
    /// A data row failed to parse under strict loading.
    #[error("{path}:{line}: malformed dataset row")]
    BadRow {
        /// Offending file.
        path: PathBuf,
        /// 1-based line number.
        line: usize,
    },
    /// No row carries both a mean and a variance.
    #[error("dataset has no usable rows (all censored or single-run)")]
    NoUsableRows,
    /// Propagated I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// Propagated DIMACS parse failure.
    #[error(transparent)]
    Dimacs(#[from] DimacsError),
    /// Propagated generation failure.
    #[error(transparent)]
    Gen(#[from] GenError),
    /// Propagated resolution failure.
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    /// Propagated solver failure.
    #[error(transparent)]
    Solver(#[from] SolverError),
    /// Propagated sample-construction failure.
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Which random instance family a generated base uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    /// Uniform random k-CNF (must pass the satisfiability screen).
    Uniform,
    /// Planted-solution random k-CNF (satisfiable by construction).
    Planted,
}

/// The base instance: an on-disk DIMACS file or generation parameters.
/// Generated bases draw their seed from the plan's master seed, so the
/// plan stays self-contained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseInstance {
    /// Path to a DIMACS CNF file.
    Path(PathBuf),
    /// Generate the base from these parameters.
    Generate {
        /// Instance family.
        kind: GenKind,
        /// Number of variables.
        num_vars: u32,
        /// Literals per clause.
        clause_width: usize,
        /// Clause-to-variable ratio.
        ratio: f64,
    },
}

/// How to size extensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionSizing {
    /// Use this inclusion probability directly.
    InclusionProb(f64),
    /// Calibrate the probability so the expected extension size is this
    /// fraction of the base clause count (the protocol default is 0.1).
    TargetFraction(f64),
}

/// Solver settings as they appear in a plan (the per-run seeds and the
/// test-only initial-assignment hook are not plan matters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    /// Flip-selection rule.
    pub algorithm: Algorithm,
    /// Flip budget per run, counted across restarts.
    pub max_flips: u64,
    /// Restart interval in flips; `None` runs uninterrupted.
    pub restart_interval: Option<u64>,
    /// probSAT break exponent; ignored by the random walk.
    pub cb: f64,
}

impl SolverSpec {
    fn config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            algorithm: self.algorithm,
            seed,
            max_flips: self.max_flips,
            restart_interval: self.restart_interval,
            cb: self.cb,
            initial: None,
        }
    }
}

/// Everything a hardness-distribution experiment depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    /// Base instance source.
    pub base: BaseInstance,
    /// Number of modifications `M` (the protocol's full scale is 5000;
    /// 200 is a desk-scale default).
    pub modifications: u32,
    /// Solver runs per modification (full scale 100; desk default 20).
    pub runs_per_mod: u32,
    /// Resolution width bound `w` for the resolvent pool.
    pub width_bound: usize,
    /// Extension sizing rule.
    pub sizing: ExtensionSizing,
    /// Solver settings.
    pub solver: SolverSpec,
    /// Master seed; every other seed in the run derives from it.
    pub master_seed: u64,
    /// Skip the satisfiability screen on the base instance.
    #[serde(default)]
    pub trust_base: bool,
}

impl ExperimentPlan {
    fn validate(&self) -> Result<(), ExperimentError> {
        if self.modifications == 0 {
            return Err(ExperimentError::NoModifications);
        }
        if self.runs_per_mod == 0 {
            return Err(ExperimentError::NoRuns);
        }
        match self.sizing {
            ExtensionSizing::InclusionProb(p) => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(ExperimentError::BadInclusionProb { p });
                }
            }
            ExtensionSizing::TargetFraction(fraction) => {
                if !(fraction > 0.0 && fraction.is_finite()) {
                    return Err(ExperimentError::BadTargetFraction { fraction });
                }
            }
        }
        Ok(())
    }
}

/// Hex SHA-256 of the plan's canonical JSON; identifies a dataset's plan.
pub fn plan_digest(plan: &ExperimentPlan) -> String {
    let json = serde_json::to_string(plan).expect("plans serialize infallibly");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// One modification's outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardnessRow {
    /// Modification index, 0-based and contiguous.
    pub mod_index: u32,
    /// Seed the extension was sampled with (also the root of the row's
    /// run seeds).
    pub extension_seed: u64,
    /// Number of resolvents in the extension.
    pub extension_size: usize,
    /// Mean flips over solved runs; `None` if every run was censored.
    pub mean_flips: Option<f64>,
    /// Unbiased flip variance over solved runs; `None` below two solves.
    pub flips_var: Option<f64>,
    /// Runs attempted.
    pub runs: u32,
    /// Runs that exhausted their budget.
    pub censored: u32,
}

impl HardnessRow {
    fn to_csv(&self) -> String {
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.mod_index,
            self.extension_seed,
            self.extension_size,
            fmt_opt(self.mean_flips),
            fmt_opt(self.flips_var),
            self.runs,
            self.censored
        )
    }

    fn from_csv(line: &str) -> Option<HardnessRow> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return None;
        }
        let parse_opt = |s: &str| -> Option<Option<f64>> {
            if s.is_empty() {
                return Some(None);
            }
            let v: f64 = s.parse().ok()?;
            v.is_finite().then_some(Some(v))
        };
        Some(HardnessRow {
            mod_index: fields[0].parse().ok()?,
            extension_seed: fields[1].parse().ok()?,
            extension_size: fields[2].parse().ok()?,
            mean_flips: parse_opt(fields[3])?,
            flips_var: parse_opt(fields[4])?,
            runs: fields[5].parse().ok()?,
            censored: fields[6].parse().ok()?,
        })
    }
}

/// A completed (or loaded) hardness dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct HardnessDataset {
    /// One row per modification, in index order.
    pub rows: Vec<HardnessRow>,
    /// Digest of the plan that produced it.
    pub plan_digest: String,
}

/// The realized base instance plus how we know it is satisfiable.
#[derive(Debug)]
pub struct RealizedBase {
    /// The base formula.
    pub formula: CnfFormula,
    /// A satisfying assignment, when one is in hand (planted witness or
    /// screen output).
    pub witness: Option<Assignment>,
}

/// Materializes a plan's base instance and screens it for satisfiability
/// (unless the plan says to trust it). Generated bases are seeded from
/// the master seed; the screen gets its own derived seed.
pub fn realize_base(plan: &ExperimentPlan) -> Result<RealizedBase, ExperimentError> {
    let gen_seed = derive_seed(plan.master_seed, Role::Generate, 0);
    let (formula, witness) = match &plan.base {
        BaseInstance::Path(path) => {
            let text = fs::read_to_string(path)?;
            (parse_dimacs(&text)?.formula, None)
        }
        BaseInstance::Generate { kind, num_vars, clause_width, ratio } => {
            let spec = GenSpec {
                num_vars: *num_vars,
                clause_width: *clause_width,
                ratio: *ratio,
                seed: gen_seed,
            };
            match kind {
                GenKind::Uniform => (gen_uniform(&spec)?, None),
                GenKind::Planted => {
                    let (f, hidden) = gen_planted(&spec)?;
                    (f, Some(hidden))
                }
            }
        }
    };
    if plan.trust_base || witness.is_some() {
        return Ok(RealizedBase { formula, witness });
    }
    let screen_seed = derive_seed(plan.master_seed, Role::Generate, 1);
    match screen_satisfiable(&formula, plan.solver.max_flips, screen_seed) {
        Screen::Satisfiable(w) => Ok(RealizedBase { formula, witness: Some(w) }),
        Screen::Unsatisfiable => Err(ExperimentError::BaseUnsatisfiable),
        Screen::Unknown => Err(ExperimentError::BaseUnverified),
    }
}

/// Reads the valid prefix of an existing dataset file for resumption:
/// checks the schema and plan digest, then keeps rows as long as they
/// parse and their indices run 0, 1, 2, … — the first torn or out-of-order
/// line ends the prefix.
fn read_resumable_prefix(
    path: &Path,
    expected_digest: &str,
) -> Result<Vec<HardnessRow>, ExperimentError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(DATASET_MAGIC) {
        return Err(ExperimentError::BadHeader { path: path.to_path_buf() });
    }
    let digest_line = lines.next().unwrap_or_default();
    let found = digest_line.strip_prefix("# plan-digest: ").unwrap_or_default();
    if found != expected_digest {
        return Err(ExperimentError::PlanMismatch {
            path: path.to_path_buf(),
            found: found.to_string(),
            expected: expected_digest.to_string(),
        });
    }
    if lines.next() != Some(DATASET_COLUMNS) {
        return Err(ExperimentError::BadHeader { path: path.to_path_buf() });
    }
    let mut rows = Vec::new();
    for line in lines {
        match HardnessRow::from_csv(line) {
            Some(row) if row.mod_index as usize == rows.len() => rows.push(row),
            _ => break,
        }
    }
    Ok(rows)
}

/// Loads a dataset file strictly: every line must parse, indices must be
/// contiguous. Use this for analysis; resumption uses the tolerant
/// prefix reader internally.
pub fn load_dataset(path: &Path) -> Result<HardnessDataset, ExperimentError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let bad_header = || ExperimentError::BadHeader { path: path.to_path_buf() };
    if lines.next().map(|(_, l)| l) != Some(DATASET_MAGIC) {
        return Err(bad_header());
    }
    let digest = lines
        .next()
        .and_then(|(_, l)| l.strip_prefix("# plan-digest: "))
        .ok_or_else(bad_header)?
        .to_string();
    if lines.next().map(|(_, l)| l) != Some(DATASET_COLUMNS) {
        return Err(bad_header());
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        match HardnessRow::from_csv(line) {
            Some(row) if row.mod_index as usize == rows.len() => rows.push(row),
            _ => {
                return Err(ExperimentError::BadRow {
                    path: path.to_path_buf(),
                    line: idx + 1,
                })
            }
        }
    }
    Ok(HardnessDataset { rows, plan_digest: digest })
}

/// Converts dataset rows into a fitting sample plus its per-point noise
/// model. A row is usable when it carries both a mean and a variance
/// (i.e. at least two runs solved); each usable row contributes its mean,
/// with noise variance `flips_var / solved_runs`. The sample is marked
/// tainted when any censoring occurred or any row was dropped.
pub fn dataset_sample(rows: &[HardnessRow]) -> Result<(Sample, NoiseModel), ExperimentError> {
    let mut values = Vec::new();
    let mut noise_vars = Vec::new();
    let mut tainted = false;
    let mut runs = 1u32;
    for row in rows {
        runs = runs.max(row.runs);
        if row.censored > 0 {
            tainted = true;
        }
        match (row.mean_flips, row.flips_var) {
            (Some(mean), Some(var)) => {
                let solved = row.runs - row.censored;
                values.push(mean);
                noise_vars.push(var / solved as f64);
            }
            _ => tainted = true,
        }
    }
    if values.is_empty() {
        return Err(ExperimentError::NoUsableRows);
    }
    let sample = Sample::new(values, runs, tainted)?;
    Ok((sample, NoiseModel::PerPoint(noise_vars)))
}

/// Pool caps for experiment closures; wider than the library default
/// rounds cap because protocol-scale instances are small but dense.
const EXPERIMENT_CLOSURE_LIMITS: ClosureLimits =
    ClosureLimits { max_clauses: 6_000_000, max_rounds: 64 };

/// Runs (or resumes) the full pipeline for a plan, writing the dataset to
/// `out_path` as it goes and returning the completed dataset.
///
/// `workers` bounds the solver thread pool; `None` uses all available
/// parallelism. The output is byte-identical for a given plan regardless
/// of `workers`.
pub fn run_experiment(
    plan: &ExperimentPlan,
    out_path: &Path,
    workers: Option<usize>,
) -> Result<HardnessDataset, ExperimentError> {
    plan.validate()?;
    let digest = plan_digest(plan);
    let existing = if out_path.exists() {
        read_resumable_prefix(out_path, &digest)?
    } else {
        Vec::new()
    };
    let mut rows = existing;
    rows.truncate(plan.modifications as usize);

    // Rewrite the header plus the valid prefix; this normalizes any torn
    // tail line before appending resumes.
    let file = fs::File::create(out_path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{DATASET_MAGIC}")?;
    writeln!(out, "# plan-digest: {digest}")?;
    writeln!(out, "{DATASET_COLUMNS}")?;
    for row in &rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()?;

    if rows.len() == plan.modifications as usize {
        return Ok(HardnessDataset { rows, plan_digest: digest });
    }

    let base = realize_base(plan)?;
    let closure =
        resolution_closure(&base.formula, plan.width_bound, EXPERIMENT_CLOSURE_LIMITS)?;
    let inclusion_prob = match plan.sizing {
        ExtensionSizing::InclusionProb(p) => p,
        ExtensionSizing::TargetFraction(fraction) => calibrate_inclusion_prob(
            closure.pool.len(),
            fraction * base.formula.num_clauses() as f64,
        )?,
    };

    let pool = build_thread_pool(workers)?;
    for i in rows.len() as u32..plan.modifications {
        let extension_seed = derive_seed(plan.master_seed, Role::Extension, i as u64);
        let extension = sample_extension_from_pool(
            &base.formula,
            &closure.pool,
            plan.width_bound,
            inclusion_prob,
            extension_seed,
        )?;
        let extended = base.formula.extended(&extension.resolvents);
        let cfg = plan.solver.config(extension_seed);
        let batch = pool.install(|| run_batch(&extended, &cfg, plan.runs_per_mod))?;
        let row = HardnessRow {
            mod_index: i,
            extension_seed,
            extension_size: extension.resolvents.len(),
            mean_flips: batch.mean_flips,
            flips_var: batch.flips_var,
            runs: plan.runs_per_mod,
            censored: batch.censored as u32,
        };
        writeln!(out, "{}", row.to_csv())?;
        out.flush()?;
        rows.push(row);
    }
    Ok(HardnessDataset { rows, plan_digest: digest })
}

fn build_thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| ExperimentError::Io(std::io::Error::other(e.to_string())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn small_plan() -> ExperimentPlan {
        ExperimentPlan {
            base: BaseInstance::Generate {
                kind: GenKind::Planted,
                num_vars: 12,
                clause_width: 3,
                ratio: 3.5,
            },
            modifications: 4,
            runs_per_mod: 3,
            width_bound: 3,
            sizing: ExtensionSizing::TargetFraction(0.1),
            solver: SolverSpec {
                algorithm: Algorithm::Schoening,
                max_flips: 100_000,
                restart_interval: None,
                cb: 2.3,
            },
            master_seed: 2024,
            trust_base: false,
        }
    }

    #[test]
    fn plan_round_trips_through_json_and_digests_stably() {
        let plan = small_plan();
        let json = serde_json::to_string(&plan).unwrap();
        let back: ExperimentPlan = serde_json::from_str(&json).unwrap();
        assert_eq!(back, plan);
        assert_eq!(plan_digest(&plan), plan_digest(&back));
        let mut other = plan.clone();
        other.master_seed += 1;
        assert_ne!(plan_digest(&plan), plan_digest(&other));
    }

    #[test]
    fn plan_validation_rejects_nonsense() {
        let mut plan = small_plan();
        plan.modifications = 0;
        assert!(matches!(
            run_experiment(&plan, Path::new("/nonexistent/x.csv"), None),
            Err(ExperimentError::NoModifications)
        ));
        let mut plan = small_plan();
        plan.runs_per_mod = 0;
        assert!(matches!(
            run_experiment(&plan, Path::new("/nonexistent/x.csv"), None),
            Err(ExperimentError::NoRuns)
        ));
        let mut plan = small_plan();
        plan.sizing = ExtensionSizing::InclusionProb(1.5);
        assert!(matches!(
            run_experiment(&plan, Path::new("/nonexistent/x.csv"), None),
            Err(ExperimentError::BadInclusionProb { .. })
        ));
        let mut plan = small_plan();
        plan.sizing = ExtensionSizing::TargetFraction(-0.5);
        assert!(matches!(
            run_experiment(&plan, Path::new("/nonexistent/x.csv"), None),
            Err(ExperimentError::BadTargetFraction { .. })
        ));
    }

    #[test]
    fn rows_round_trip_through_csv() {
        let full = HardnessRow {
            mod_index: 3,
            extension_seed: 0xDEAD_BEEF,
            extension_size: 17,
            mean_flips: Some(4321.25),
            flips_var: Some(10.5),
            runs: 20,
            censored: 1,
        };
        assert_eq!(HardnessRow::from_csv(&full.to_csv()), Some(full.clone()));
        let censored = HardnessRow { mean_flips: None, flips_var: None, ..full };
        let line = censored.to_csv();
        assert!(line.contains(",,"));
        assert_eq!(HardnessRow::from_csv(&line), Some(censored));
        assert_eq!(HardnessRow::from_csv("1,2,3"), None);
        assert_eq!(HardnessRow::from_csv("x,2,3,4,5,6,7"), None);
        assert_eq!(HardnessRow::from_csv("1,2,3,NaN,5,6,7"), None);
    }

    #[test]
    fn experiment_is_deterministic_across_worker_counts() {
        let dir = tempdir().unwrap();
        let plan = small_plan();
        let path1 = dir.path().join("w1.csv");
        let path4 = dir.path().join("w4.csv");
        run_experiment(&plan, &path1, Some(1)).unwrap();
        run_experiment(&plan, &path4, Some(4)).unwrap();
        let bytes1 = fs::read(&path1).unwrap();
        let bytes4 = fs::read(&path4).unwrap();
        assert!(!bytes1.is_empty());
        assert_eq!(bytes1, bytes4);
    }

    #[test]
    fn resume_after_truncation_reproduces_the_dataset() {
        let dir = tempdir().unwrap();
        let plan = small_plan();
        let full_path = dir.path().join("full.csv");
        run_experiment(&plan, &full_path, Some(2)).unwrap();
        let full_bytes = fs::read_to_string(&full_path).unwrap();

        // Kill mid-write: keep the header, the first row, and a torn
        // fragment of the second.
        let lines: Vec<&str> = full_bytes.lines().collect();
        let torn = format!(
            "{}\n{}\n{}\n{}\n{}",
            lines[0],
            lines[1],
            lines[2],
            lines[3],
            &lines[4][..lines[4].len() / 2]
        );
        let resumed_path = dir.path().join("resumed.csv");
        fs::write(&resumed_path, torn).unwrap();
        let resumed = run_experiment(&plan, &resumed_path, Some(2)).unwrap();
        assert_eq!(fs::read_to_string(&resumed_path).unwrap(), full_bytes);
        assert_eq!(resumed.rows.len(), plan.modifications as usize);

        // A finished dataset resumes to itself without solving anything.
        let again = run_experiment(&plan, &full_path, Some(2)).unwrap();
        assert_eq!(again.rows, resumed.rows);
        assert_eq!(fs::read_to_string(&full_path).unwrap(), full_bytes);
    }

    #[test]
    fn resume_under_a_different_plan_is_refused() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.csv");
        run_experiment(&small_plan(), &path, Some(2)).unwrap();
        let mut other = small_plan();
        other.master_seed += 1;
        assert!(matches!(
            run_experiment(&other, &path, Some(2)),
            Err(ExperimentError::PlanMismatch { .. })
        ));
        fs::write(&path, "not a dataset\n").unwrap();
        assert!(matches!(
            run_experiment(&small_plan(), &path, Some(2)),
            Err(ExperimentError::BadHeader { .. })
        ));
    }

    #[test]
    fn degenerate_width_bound_yields_empty_extensions() {
        // Width bound 0 admits no resolvents at all, so every
        // modification is the base formula; rows differ only through
        // run seeds.
        let dir = tempdir().unwrap();
        let mut plan = small_plan();
        plan.width_bound = 0;
        plan.sizing = ExtensionSizing::InclusionProb(1.0);
        let path = dir.path().join("deg.csv");
        let dataset = run_experiment(&plan, &path, Some(2)).unwrap();
        assert!(dataset.rows.iter().all(|r| r.extension_size == 0));
        let means: Vec<f64> = dataset.rows.iter().filter_map(|r| r.mean_flips).collect();
        assert_eq!(means.len(), plan.modifications as usize);
        assert!(means.windows(2).any(|w| w[0] != w[1]), "seeds must differ");
    }

    #[test]
    fn strict_loading_round_trips_and_rejects_corruption() {
        let dir = tempdir().unwrap();
        let plan = small_plan();
        let path = dir.path().join("d.csv");
        let dataset = run_experiment(&plan, &path, Some(2)).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert_eq!(loaded, dataset);

        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("torn,row\n");
        fs::write(&path, &text).unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(ExperimentError::BadRow { .. })
        ));
    }

    #[test]
    fn dataset_sample_filters_and_taints() {
        let row = |i: u32, mean: Option<f64>, var: Option<f64>, censored: u32| HardnessRow {
            mod_index: i,
            extension_seed: i as u64,
            extension_size: 1,
            mean_flips: mean,
            flips_var: var,
            runs: 10,
            censored,
        };
        let clean = vec![
            row(0, Some(100.0), Some(25.0), 0),
            row(1, Some(200.0), Some(50.0), 0),
        ];
        let (sample, noise) = dataset_sample(&clean).unwrap();
        assert!(!sample.tainted());
        assert_eq!(sample.values(), &[100.0, 200.0]);
        match noise {
            NoiseModel::PerPoint(vars) => assert_eq!(vars, vec![2.5, 5.0]),
            other => panic!("expected per-point noise, got {other:?}"),
        }

        // A censored row taints and its noise uses the solved count.
        let censored = vec![
            row(0, Some(100.0), Some(25.0), 0),
            row(1, Some(300.0), Some(45.0), 1),
        ];
        let (sample, noise) = dataset_sample(&censored).unwrap();
        assert!(sample.tainted());
        match noise {
            NoiseModel::PerPoint(vars) => assert_eq!(vars, vec![2.5, 5.0]),
            other => panic!("expected per-point noise, got {other:?}"),
        }

        // Fully censored rows are dropped; all-dropped errors out.
        let unusable = vec![row(0, None, None, 10)];
        assert!(matches!(
            dataset_sample(&unusable),
            Err(ExperimentError::NoUsableRows)
        ));
    }

    #[test]
    fn realize_base_screens_unsatisfiable_input() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("unsat.cnf");
        fs::write(&path, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let mut plan = small_plan();
        plan.base = BaseInstance::Path(path.clone());
        assert!(matches!(
            realize_base(&plan),
            Err(ExperimentError::BaseUnsatisfiable)
        ));
        // Trusting skips the screen (the caller owns the consequences).
        plan.trust_base = true;
        assert!(realize_base(&plan).is_ok());
    }

    #[test]
    fn realized_planted_base_carries_its_witness() {
        let plan = small_plan();
        let base = realize_base(&plan).unwrap();
        let witness = base.witness.expect("planted bases carry a witness");
        assert!(base.formula.evaluate(&witness));
    }
}
