//! Run configuration shared by the library drivers and the CLI.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Bound on `|n|` for points with `x = n / d^2` in the naive search.
    pub point_height: u64,
    /// Bound on `d` in the naive point search.
    pub point_denominator: u64,
    /// Witness primes for sign patterns are searched below this bound.
    pub witness_prime_bound: u64,
    /// Number of terms in the L-series sum.
    pub lvalue_terms: usize,
    /// Overrides the top rung of the Hensel precision ladder.
    pub max_precision: Option<u32>,
    /// Worker threads; `None` lets rayon decide. Output never depends on it.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    /// Record wall-clock timing in certificates (breaks byte determinism).
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            point_height: 10_000,
            point_denominator: 100,
            witness_prime_bound: 10_000,
            lvalue_terms: 4000,
            max_precision: None,
            threads: None,
            output: None,
            timing: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("point_height", self.point_height),
            ("point_denominator", self.point_denominator),
            ("witness_prime_bound", self.witness_prime_bound),
            ("lvalue_terms", self.lvalue_terms as u64),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if self.max_precision == Some(0) || self.threads == Some(0) {
            return Err(Error::InvalidInput("precision and threads must be positive".into()));
        }
        Ok(())
    }

    /// Runs `f` inside a rayon pool of the configured width.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(|pool| pool.install(f))
                .unwrap_or_else(|_| panic!("could not build a pool of {n} threads")),
            None => f(),
        }
    }
}
