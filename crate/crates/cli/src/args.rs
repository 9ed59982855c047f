//! Command-line surface: one subcommand per pipeline stage.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slsdist::experiment::GenKind;
use slsdist::fit::Family;
use slsdist::solvers::Algorithm;

/// Workbench for stochastic-local-search SAT runtime distributions:
/// generate instances, extend them with random resolvents, measure solver
/// hardness, and fit/test runtime-distribution models.
#[derive(Debug, Parser)]
#[command(name = "slsdist", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random k-CNF instance as DIMACS.
    Generate(GenerateArgs),
    /// Extend a CNF with a Bernoulli sample of its width-bounded resolvents.
    Extend(ExtendArgs),
    /// Run an SLS solver on a CNF and report flip counts as JSON.
    Solve(SolveArgs),
    /// Run a full hardness-distribution experiment to a CSV dataset.
    Experiment(ExperimentArgs),
    /// Fit a runtime-distribution family to a dataset (optionally with a
    /// bootstrap test and plot data).
    Fit(FitArgs),
    /// Parametric-bootstrap goodness-of-fit test on a dataset.
    Goftest(GoftestArgs),
    /// Decide whether restarting the solver would beat letting it run.
    RestartAnalyze(RestartAnalyzeArgs),
    /// Monte-Carlo simulation of extension-induced clause-share ratios.
    SimulateShares(SimulateSharesArgs),
    /// Numeric self-checks of the distribution-theory building blocks.
    #[command(subcommand)]
    Check(CheckCommand),
}

/// Instance family, mirroring the library's generation kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Uniform random k-CNF (satisfiability not guaranteed).
    Uniform,
    /// Planted-solution k-CNF (satisfiable by construction).
    Planted,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> GenKind {
        match k {
            KindArg::Uniform => GenKind::Uniform,
            KindArg::Planted => GenKind::Planted,
        }
    }
}

/// Flip-selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    /// Schöning-style random walk over unsatisfied clauses.
    Schoening,
    /// probSAT with exponential break weighting.
    ProbsatExp,
    /// probSAT with polynomial break weighting.
    ProbsatPoly,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Schoening => Algorithm::Schoening,
            AlgorithmArg::ProbsatExp => Algorithm::ProbSatExp,
            AlgorithmArg::ProbsatPoly => Algorithm::ProbSatPoly,
        }
    }
}

/// Distribution family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// Four-parameter Johnson SB.
    Sb,
    /// Three-parameter (shifted) lognormal.
    Lognormal3,
    /// Two-parameter lognormal.
    Lognormal2,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Sb => Family::Sb,
            FamilyArg::Lognormal3 => Family::LogNormal3,
            FamilyArg::Lognormal2 => Family::LogNormal2,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Instance family.
    #[arg(long, value_enum, default_value = "uniform")]
    pub kind: KindArg,
    /// Number of variables.
    #[arg(long)]
    pub num_vars: u32,
    /// Literals per clause.
    #[arg(long, default_value_t = 3)]
    pub clause_width: usize,
    /// Clause-to-variable ratio; the instance gets floor(ratio * num_vars)
    /// clauses.
    #[arg(long)]
    pub ratio: f64,
    /// Generation seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output DIMACS path; stdout when omitted. Planted instances also get
    /// a `<out>.witness` sidecar (or `c witness` comments on stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    /// Input DIMACS path; stdin when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Resolution width bound for the resolvent pool.
    #[arg(long, default_value_t = 4)]
    pub width: usize,
    /// Bernoulli inclusion probability for each pool clause.
    #[arg(long, conflicts_with = "target_fraction")]
    pub inclusion_prob: Option<f64>,
    /// Calibrate the inclusion probability so the expected extension size
    /// is this fraction of the base clause count.
    #[arg(long)]
    pub target_fraction: Option<f64>,
    /// Extension sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Closure size budget (distinct clauses).
    #[arg(long, default_value_t = 6_000_000)]
    pub max_clauses: usize,
    /// Closure round budget.
    #[arg(long, default_value_t = 64)]
    pub max_rounds: usize,
    /// Emit only the sampled resolvents instead of the extended formula.
    #[arg(long)]
    pub resolvents_only: bool,
    /// Output DIMACS path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Input DIMACS path; stdin when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Flip-selection rule.
    #[arg(long, value_enum, default_value = "schoening")]
    pub algorithm: AlgorithmArg,
    /// Master seed; run `i` derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flip budget per run, counted across restarts.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_flips: u64,
    /// Restart interval in flips; omit to run uninterrupted.
    #[arg(long)]
    pub restart: Option<u64>,
    /// probSAT break exponent (ignored by the random walk).
    #[arg(long, default_value_t = 2.3)]
    pub cb: f64,
    /// Number of independent runs.
    #[arg(long, default_value_t = 1)]
    pub runs: u32,
    /// Include satisfying assignments in the JSON output.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Plan as a JSON file; conflicts with the inline base flags.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Base instance as a DIMACS file.
    #[arg(long, conflicts_with = "plan")]
    pub base: Option<PathBuf>,
    /// Generate the base: instance family.
    #[arg(long, value_enum, conflicts_with_all = ["plan", "base"])]
    pub kind: Option<KindArg>,
    /// Generate the base: number of variables.
    #[arg(long, conflicts_with = "plan")]
    pub num_vars: Option<u32>,
    /// Generate the base: literals per clause.
    #[arg(long, default_value_t = 3, conflicts_with = "plan")]
    pub clause_width: usize,
    /// Generate the base: clause-to-variable ratio.
    #[arg(long, conflicts_with = "plan")]
    pub ratio: Option<f64>,
    /// Number of modified instances.
    #[arg(long, default_value_t = 200, conflicts_with = "plan")]
    pub mods: u32,
    /// Solver runs per modified instance.
    #[arg(long, default_value_t = 20, conflicts_with = "plan")]
    pub runs: u32,
    /// Resolution width bound for the resolvent pool.
    #[arg(long, default_value_t = 4, conflicts_with = "plan")]
    pub width: usize,
    /// Bernoulli inclusion probability for each pool clause.
    #[arg(long, conflicts_with_all = ["plan", "target_fraction"])]
    pub inclusion_prob: Option<f64>,
    /// Calibrate the inclusion probability to this expected extension-size
    /// fraction of the base clause count (default 0.1).
    #[arg(long, conflicts_with = "plan")]
    pub target_fraction: Option<f64>,
    /// Flip-selection rule.
    #[arg(long, value_enum, default_value = "schoening", conflicts_with = "plan")]
    pub algorithm: AlgorithmArg,
    /// Flip budget per run.
    #[arg(long, default_value_t = 2_000_000, conflicts_with = "plan")]
    pub max_flips: u64,
    /// Restart interval in flips; omit to run uninterrupted.
    #[arg(long, conflicts_with = "plan")]
    pub restart: Option<u64>,
    /// probSAT break exponent.
    #[arg(long, default_value_t = 2.3, conflicts_with = "plan")]
    pub cb: f64,
    /// Master seed; everything else derives from it.
    #[arg(long, default_value_t = 0, conflicts_with = "plan")]
    pub master_seed: u64,
    /// Skip the satisfiability screen on the base instance.
    #[arg(long, conflicts_with = "plan")]
    pub trust_base: bool,
    /// Output CSV dataset path (resumable; appends to a matching prefix).
    #[arg(long)]
    pub out: PathBuf,
    /// Solver thread-pool size; omit to use all cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input CSV dataset (from `slsdist experiment`).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Distribution family to fit.
    #[arg(long, value_enum, default_value = "sb")]
    pub family: FamilyArg,
    /// Bootstrap replicates for the goodness-of-fit test; 0 fits without
    /// testing.
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    /// Significance level for the bootstrap test.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for plot-ready CSVs (ECDF vs fitted CDF, log-log left
    /// tail, log-log survival); created if missing.
    #[arg(long)]
    pub plots_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GoftestArgs {
    /// Input CSV dataset (from `slsdist experiment`).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Distribution family to test.
    #[arg(long, value_enum, default_value = "sb")]
    pub family: FamilyArg,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 200)]
    pub replicates: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Bootstrap master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RestartAnalyzeArgs {
    /// Dataset to analyze; reports the empirical verdict plus the verdict
    /// of a fitted three-parameter lognormal, side by side.
    #[arg(long, required_unless_present = "mu", conflicts_with_all = ["mu", "sigma", "shift"])]
    pub dataset: Option<PathBuf>,
    /// Analyze a parametric lognormal instead: log-mean.
    #[arg(long, requires = "sigma")]
    pub mu: Option<f64>,
    /// Parametric lognormal: log-standard-deviation.
    #[arg(long, requires = "mu")]
    pub sigma: Option<f64>,
    /// Parametric lognormal: support shift.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    /// Comma-separated witness-probability grid; omit for the default grid.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SimulateSharesArgs {
    /// Which share to simulate.
    #[arg(long, value_enum, default_value = "flip")]
    pub which: WhichShare,
    /// Pool clauses containing the flipped variable.
    #[arg(long)]
    pub containing: u64,
    /// Pool clauses avoiding the flipped variable.
    #[arg(long)]
    pub avoiding: u64,
    /// Pool clauses unsatisfied under the current assignment.
    #[arg(long)]
    pub implied_unsat: u64,
    /// Base clauses unsatisfied under the current assignment.
    #[arg(long)]
    pub base_unsat: u64,
    /// Bernoulli inclusion probability of the extension.
    #[arg(long)]
    pub inclusion_prob: f64,
    /// Clause length (for the flip-share weighting).
    #[arg(long, default_value_t = 3)]
    pub clause_len: usize,
    /// Monte-Carlo repetitions.
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    /// Simulation seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path for the raw simulated values.
    #[arg(long)]
    pub out: PathBuf,
    /// Also fit a Johnson SB to the simulated values and report it.
    #[arg(long)]
    pub fit_sb: bool,
}

/// Which simulated share to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WhichShare {
    /// Probability that a flip repair touches the extension.
    Flip,
    /// Base share of the unsatisfied-clause pool.
    Base,
    /// Extension share of the unsatisfied-clause pool.
    Ext,
    /// Base and extension shares from common draws (two-column output).
    Paired,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Check that 1/(c + lognormal) matches its closed-form Johnson SB law.
    ReciprocalSb(ReciprocalSbArgs),
    /// Check the asymptotic normality of log binomial sample means.
    LogBinomial(LogBinomialArgs),
    /// Check that Johnson SB embeds the lognormal as its upper endpoint
    /// grows.
    Embedding(EmbeddingArgs),
}

#[derive(Debug, Args)]
pub struct ReciprocalSbArgs {
    /// Lognormal log-mean.
    #[arg(long)]
    pub mu: f64,
    /// Lognormal log-standard-deviation.
    #[arg(long)]
    pub sigma: f64,
    /// Additive shift `c` in `1/(c + X)`.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    /// Monte-Carlo draws.
    #[arg(long, default_value_t = 100_000)]
    pub draws: u64,
    /// Simulation seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum acceptable Kolmogorov-Smirnov distance.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct LogBinomialArgs {
    /// Bernoulli trials per sample mean.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Bernoulli success probability.
    #[arg(long)]
    pub prob: f64,
    /// Monte-Carlo repetitions.
    #[arg(long, default_value_t = 20_000)]
    pub reps: u64,
    /// Simulation seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum acceptable deviation in Monte-Carlo standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub max_se: f64,
    /// Fallback: maximum acceptable relative deviation.
    #[arg(long, default_value_t = 0.10)]
    pub max_rel: f64,
}

#[derive(Debug, Args)]
pub struct EmbeddingArgs {
    /// Lognormal log-mean.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Lognormal log-standard-deviation (the SB shape delta).
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,
    /// Common support lower endpoint.
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    /// Comma-separated increasing SB upper endpoints.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,10000")]
    pub endpoints: Vec<f64>,
    /// Quantile-grid size for the density comparison.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Maximum acceptable final sup-density distance.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
}
