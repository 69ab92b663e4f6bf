//! The check suites. Each returns its rows in a fixed order.
//!
//! Suite `i` (its position in [`SUITES`]) draws from the stream family
//! `RngStream::derive(seed, i + 1)`, and check `j` inside it from
//! `.child(j)`, so a suite's results do not depend on which other suites run.

mod crofton;
mod identities;
mod poisson;
mod russo;
mod stable;

use pivotality::numerics::RngStream;
use serde_json::Value;

use crate::config::{Config, SUITES};
use crate::report::Row;

pub struct Context<'a> {
    pub config: &'a Config,
    pub seed: u64,
    suite: &'static str,
}

impl Context<'_> {
    fn stream(&self, check: u64) -> RngStream {
        let index = SUITES.iter().position(|s| *s == self.suite).expect("known suite") as u64 + 1;
        RngStream::derive(self.seed, index).child(check)
    }

    /// Evaluates one check, turning a numerical error into a failed row.
    fn row<F>(&self, id: &str, params: Value, threshold: f64, f: F) -> Row
    where
        F: FnOnce(&str, &str, Value) -> pivotality::Result<Row>,
    {
        f(self.suite, id, params.clone()).unwrap_or_else(|e| Row::error(self.suite, id, params, threshold, &e))
    }
}

pub fn run_suite(name: &str, config: &Config, seed: u64) -> Vec<Row> {
    let suite = SUITES.iter().copied().find(|s| *s == name).expect("suite names are validated first");
    let ctx = Context { config, seed, suite };
    match suite {
        "identities" => identities::run(&ctx),
        "russo" => russo::run(&ctx),
        "poisson-derivative" => poisson::run(&ctx),
        "stable" => stable::run(&ctx),
        "crofton" => crofton::run(&ctx),
        _ => unreachable!("SUITES is exhaustive"),
    }
}
