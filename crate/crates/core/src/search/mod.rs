//! Exact searches over small finite instances: monochromatic images, forcing
//! bounds, separation of Milliken–Taylor systems, image domination, translated
//! witnesses, plus certificate checkers for first-entries and linear IPR
//! witnesses and the rapid-growth condition.
//!
//! Every search distinguishes a completed exhaustive run from one stopped by
//! its node budget. Absence within bounds is evidence, never a proof.

mod certify;
mod engine;
mod forcing;
mod mono;

pub use certify::{
    certify_ipr, check_rapid, first_entries, is_first_entries, make_rapid, refute_nonconstant, Verdict,
};
pub use engine::{parallel_least, Branch, Outcome};
pub use forcing::{forcing_bound, ForcingResult};
pub use mono::{
    check_separation, dominates_on, find_monochromatic, translate_witness, SeparationOutcome,
    SeparationResult, SeparationWitness, TranslateWitness,
};

use serde::{Deserialize, Serialize};

use crate::colourings::Colour;
use crate::ratcore::ImageSet;

/// Default cap on explored nodes.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Bounds and flags for a witness search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchConfig {
    pub variable_bound: u64,
    #[serde(default)]
    pub distinct_entries: bool,
    #[serde(default)]
    pub distinct_image: bool,
    #[serde(default = "one")]
    pub min_entry: u64,
    #[serde(default = "default_budget")]
    pub node_budget: u64,
    /// Worker threads; 0 uses every core. Never affects results.
    #[serde(skip, default = "one_usize")]
    pub threads: usize,
}

fn one() -> u64 {
    1
}

fn one_usize() -> usize {
    1
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

impl SearchConfig {
    pub fn new(variable_bound: u64) -> Self {
        SearchConfig {
            variable_bound,
            distinct_entries: false,
            distinct_image: false,
            min_entry: 1,
            node_budget: DEFAULT_BUDGET,
            threads: 1,
        }
    }

    pub fn distinct(mut self, on: bool) -> Self {
        self.distinct_entries = on;
        self
    }

    pub fn budget(mut self, nodes: u64) -> Self {
        self.node_budget = nodes;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn min_entry(mut self, m: u64) -> Self {
        self.min_entry = m;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.min_entry == 0 || self.variable_bound < self.min_entry {
            return Err(crate::Error::InvalidParameter(format!(
                "need variableBound >= minEntry >= 1, got {} and {}",
                self.variable_bound, self.min_entry
            )));
        }
        Ok(())
    }
}

/// An assignment whose image is monochromatic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchWitness {
    pub assignment: Vec<u64>,
    pub image: ImageSet,
    pub colour: Colour,
}

/// Outcome of a search together with the nodes it explored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult<T> {
    pub outcome: Outcome<T>,
    pub nodes_explored: u64,
}

impl<T> SearchResult<T> {
    pub fn witness(&self) -> Option<&T> {
        self.outcome.found()
    }

    /// True when the search space was fully explored or a witness was found.
    pub fn exhausted(&self) -> bool {
        !matches!(self.outcome, Outcome::BudgetHit)
    }
}
