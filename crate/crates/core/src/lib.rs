//! Bayesian model averaging for X-chromosome SNP association when the
//! X-inactivation status of the locus is unknown.

pub mod bma;
pub mod error;
pub mod geno;
pub mod linear;
pub mod logistic;
pub mod numeric;
pub mod rng;
pub mod scan;
pub mod simulate;
pub mod zmax;

pub use error::{Error, NumericError, Result};

use serde::{Deserialize, Serialize};

/// Outcome scale of the phenotype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraitType {
    Linear,
    Binary,
}

pub use rayon::ThreadPool;

/// Worker pool with a fixed number of threads.
pub fn thread_pool(threads: usize) -> Result<ThreadPool> {
    if threads == 0 {
        return Err(Error::InvalidParameter("threads must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}
