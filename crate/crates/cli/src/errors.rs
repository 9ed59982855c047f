//! CLI error type and the exit-code mapping from library errors.
//!
//! Exit codes:
//! * `0` — success (including `--help` / `--version`).
//! * `1` — usage error: bad flags or nonsensical parameter values.
//! * `2` — data error: unreadable/invalid input files, datasets failing
//!   their preconditions, unsatisfiable or unverifiable base instances.
//! * `3` — numeric failure: an optimizer, simulation, or closure blew a
//!   budget or could not produce a trustworthy result.

use slsdist::dist::DistError;
use slsdist::experiment::ExperimentError;
use slsdist::fit::FitError;
use slsdist::generate::GenError;
use slsdist::resolution::ResolutionError;
use slsdist::restart::RestartError;
use slsdist::shares::ShareError;
use slsdist::solvers::SolverError;

/// What went wrong, coarse enough to map onto an exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad command-line parameters (exit 1).
    Usage(String),
    /// Bad input data (exit 2).
    Data(String),
    /// Numeric or budget failure (exit 3).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(format!("io error: {e}"))
    }
}

impl From<slsdist::dimacs::DimacsError> for CliError {
    fn from(e: slsdist::dimacs::DimacsError) -> Self {
        CliError::Data(format!("invalid DIMACS input: {e}"))
    }
}

impl From<slsdist::cnf::CnfError> for CliError {
    fn from(e: slsdist::cnf::CnfError) -> Self {
        CliError::Data(format!("invalid formula: {e}"))
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Usage(format!("bad generation parameters: {e}"))
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        CliError::Usage(format!("bad distribution parameters: {e}"))
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Data(format!("solver rejected the formula: {e}"))
    }
}

impl From<ResolutionError> for CliError {
    fn from(e: ResolutionError) -> Self {
        match e {
            ResolutionError::LimitExceeded { .. } => {
                CliError::Numeric(format!("resolution closure blew its budget: {e}"))
            }
            other => CliError::Usage(format!("bad resolution parameters: {other}")),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::OptimizerFailed { .. }
            | FitError::CdfNotIncreasing { .. }
            | FitError::TooManyRefitFailures { .. } => {
                CliError::Numeric(format!("fit failed: {e}"))
            }
            FitError::BadProbability { .. } | FitError::BadBootstrapArgs { .. } => {
                CliError::Usage(format!("bad fit parameters: {e}"))
            }
            other => CliError::Data(format!("sample unfit for fitting: {other}")),
        }
    }
}

impl From<RestartError> for CliError {
    fn from(e: RestartError) -> Self {
        match e {
            RestartError::BadProbability { .. }
            | RestartError::BadThreshold { .. }
            | RestartError::TooFewReps { .. }
            | RestartError::GridNotIncreasing => {
                CliError::Usage(format!("bad restart-analysis parameters: {e}"))
            }
            RestartError::NegativeSupport { .. } | RestartError::NoMassBelowThreshold { .. } => {
                CliError::Data(format!("model unsuited to restart analysis: {e}"))
            }
            RestartError::Fit(inner) => CliError::from(inner),
            RestartError::Dist(inner) => CliError::from(inner),
            other => CliError::Numeric(format!("restart analysis failed: {other}")),
        }
    }
}

impl From<ShareError> for CliError {
    fn from(e: ShareError) -> Self {
        match e {
            ShareError::RejectionRateTooHigh { .. } | ShareError::RegimeTooThin { .. } => {
                CliError::Numeric(format!("share simulation failed: {e}"))
            }
            other => CliError::Usage(format!("bad share-simulation parameters: {other}")),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::NoModifications
            | ExperimentError::NoRuns
            | ExperimentError::BadInclusionProb { .. }
            | ExperimentError::BadTargetFraction { .. } => {
                CliError::Usage(format!("bad experiment plan: {e}"))
            }
            ExperimentError::Gen(inner) => CliError::from(inner),
            ExperimentError::Resolution(inner) => CliError::from(inner),
            ExperimentError::Fit(inner) => CliError::from(inner),
            ExperimentError::Solver(inner) => CliError::from(inner),
            ExperimentError::Dimacs(inner) => CliError::from(inner),
            ExperimentError::Io(inner) => CliError::from(inner),
            other => CliError::Data(format!("experiment failed: {other}")),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(format!("invalid JSON: {e}"))
    }
}
