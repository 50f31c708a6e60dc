use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("root not bracketed on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("no called genotypes: every record is missing")]
    EmptyDesign,
    #[error("record {index}: {sex} cannot carry allele count {count}")]
    IllegalCount {
        index: usize,
        sex: &'static str,
        count: u8,
    },
    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("degenerate allele frequency {0}: genotype variance is zero")]
    DegenerateFrequency(f64),
    #[error("design matrix is singular (monomorphic genotype column?)")]
    SingularDesign,
    #[error("length mismatch: {what} has {got} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("outcome has a single class; both cases and controls are required")]
    DegenerateOutcome,
    #[error("outcome values must be 0 or 1 (found {0})")]
    NonBinaryOutcome(f64),
    #[error("Gaussian anchor is degenerate: zero sample variance in parameter {0}")]
    AnchorDegenerate(usize),
    #[error("density is not finite at sample {index} ({value})")]
    NonFiniteDensity { index: usize, value: f64 },
    #[error("need at least {need} draws, got {got}")]
    TooFewDraws { need: usize, got: usize },
    #[error("logistic MLE failed: {0}")]
    IrlsFailure(String),
    #[error("no effect size in (0, 20] attains EV = {0}")]
    InfeasibleEv(f64),
    #[error("rejection sampling exceeded {0} draws")]
    RejectionCap(usize),
    #[error("{failed} of {total} replicates failed (more than 5%)")]
    TooManyFailures { failed: usize, total: usize },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no analyzable SNPs after filtering")]
    NothingToAnalyze,
}

impl Error {
    /// Input problems the user can fix, as opposed to runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::IllegalCount { .. }
                | Error::InvalidParameter(_)
                | Error::NonBinaryOutcome(_)
                | Error::DegenerateOutcome
                | Error::NothingToAnalyze
                | Error::LengthMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
