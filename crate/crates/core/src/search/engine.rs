//! Backtracking core shared by the witness searches.
//!
//! Variables are assigned in column order and each row is evaluated as soon as
//! its last column is fixed, so the first complete assignment found is the
//! lexicographically least one. Work is split on the value of the first
//! variable; [`parallel_least`] explores those branches concurrently while
//! reporting exactly what a sequential left-to-right run would.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ratcore::FiniteMatrix;

/// Result of exploring one first-level branch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Branch<T> {
    Found(T),
    Exhausted,
    /// More nodes were needed than the limit allowed.
    Exceeded,
    /// Abandoned because an earlier branch already decided the answer.
    Cancelled,
}

/// Aggregate outcome of a search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    Exhausted,
    BudgetHit,
}

impl<T> Outcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Found(t) => Outcome::Found(f(t)),
            Outcome::Exhausted => Outcome::Exhausted,
            Outcome::BudgetHit => Outcome::BudgetHit,
        }
    }
}

/// Runs `n` branches in order and returns the first decisive one, with the node
/// count a sequential run under `budget` would report.
///
/// `f(i, limit, cancelled)` explores branch `i` using at most `limit` nodes and
/// returns its result with the nodes it used. With `threads == 1` branches run
/// sequentially; otherwise they run on a pool of that many threads (0 means the
/// rayon default). The answer does not depend on `threads`.
pub fn parallel_least<T, F>(n: usize, threads: usize, budget: u64, f: F) -> (Outcome<T>, u64)
where
    T: Send,
    F: Fn(usize, u64, &dyn Fn() -> bool) -> (Branch<T>, u64) + Sync,
{
    if threads == 1 {
        let mut used = 0u64;
        for i in 0..n {
            let (b, nodes) = f(i, budget - used, &|| false);
            match b {
                Branch::Found(t) => return (Outcome::Found(t), used + nodes),
                Branch::Exceeded => return (Outcome::BudgetHit, budget),
                Branch::Exhausted => used += nodes,
                Branch::Cancelled => unreachable!("sequential branches are never cancelled"),
            }
        }
        return (Outcome::Exhausted, used);
    }

    let stop = AtomicUsize::new(usize::MAX);
    let run = || -> Vec<(Branch<T>, u64)> {
        (0..n)
            .into_par_iter()
            .with_max_len(1)
            .map(|i| {
                if stop.load(Ordering::Relaxed) < i {
                    return (Branch::Cancelled, 0);
                }
                let cancelled = || stop.load(Ordering::Relaxed) < i;
                let (b, nodes) = f(i, budget, &cancelled);
                if matches!(b, Branch::Found(_) | Branch::Exceeded) {
                    stop.fetch_min(i, Ordering::Relaxed);
                }
                (b, nodes)
            })
            .collect()
    };
    let results = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };

    let mut used = 0u64;
    for (b, nodes) in results {
        match b {
            Branch::Exceeded => return (Outcome::BudgetHit, budget),
            _ if used + nodes > budget => return (Outcome::BudgetHit, budget),
            Branch::Found(t) => return (Outcome::Found(t), used + nodes),
            Branch::Exhausted => used += nodes,
            Branch::Cancelled => unreachable!("cancelled branches lie past a decisive one"),
        }
    }
    (Outcome::Exhausted, used)
}

/// A row scaled to integer coefficients: its value is `Σ c·x / denom`.
#[derive(Clone, Debug)]
pub(crate) struct IntRow {
    pub coeffs: Vec<(usize, i128)>,
    pub denom: i128,
    /// Rows with equal ids are identical.
    pub class: usize,
}

impl IntRow {
    /// The row's value when it is a positive integer.
    pub fn eval(&self, x: &[u64]) -> Result<Option<i128>> {
        let mut sum: i128 = 0;
        for &(c, a) in &self.coeffs {
            sum = (x[c] as i128)
                .checked_mul(a)
                .and_then(|t| sum.checked_add(t))
                .ok_or_else(|| Error::InvalidParameter("row value overflows 128 bits".into()))?;
        }
        Ok((sum > 0 && sum % self.denom == 0).then(|| sum / self.denom))
    }
}

/// Integer form of a matrix, with rows grouped by their last column.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub width: usize,
    pub rows: Vec<IntRow>,
    pub completed_at: Vec<Vec<usize>>,
    pub has_zero_row: bool,
}

pub(crate) fn compile(a: &FiniteMatrix) -> Result<Compiled> {
    let mut rows = Vec::with_capacity(a.row_count());
    let mut completed_at = vec![Vec::new(); a.width()];
    let mut classes: HashMap<&crate::ratcore::SparseRow, usize> = HashMap::new();
    let mut has_zero_row = false;
    for (i, r) in a.rows().iter().enumerate() {
        let next = classes.len();
        let class = *classes.entry(r).or_insert(next);
        let l = r.entries().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
        let coeffs = r
            .entries()
            .map(|(c, v)| {
                (v.numer() * (&l / v.denom()))
                    .to_i128()
                    .map(|n| (c, n))
                    .ok_or_else(|| Error::InvalidParameter("matrix entry too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let denom = l.to_i128().ok_or_else(|| Error::InvalidParameter("denominator too large".into()))?;
        match r.max_column() {
            Some(c) => completed_at[c].push(i),
            None => has_zero_row = true,
        }
        rows.push(IntRow { coeffs, denom, class });
    }
    Ok(Compiled { width: a.width(), rows, completed_at, has_zero_row })
}

/// One backtracking problem: bounds per variable, distinctness groups, and a
/// labelling of row values. A row value is acceptable when the labelling
/// returns `Some`, and all rows must receive the same label.
pub(crate) struct Problem<'a, L> {
    pub compiled: &'a Compiled,
    pub bounds: Vec<(u64, u64)>,
    /// Variables sharing a group must take pairwise distinct values.
    pub groups: Vec<Option<usize>>,
    pub distinct_image: bool,
    pub label: &'a (dyn Fn(i128) -> Option<L> + Sync),
}

struct Frame<'p, L> {
    x: Vec<u64>,
    labels: Vec<Option<L>>,
    values: Vec<(i128, usize)>,
    memo: HashMap<i128, Option<L>>,
    nodes: u64,
    limit: u64,
    cancelled: &'p dyn Fn() -> bool,
}

enum Step {
    Found,
    Exhausted,
    Exceeded,
    Cancelled,
}

impl<'a, L: Clone + Eq + Send + Sync> Problem<'a, L> {
    pub fn validate(&self) -> Result<()> {
        if self.compiled.width == 0 {
            return Err(Error::InvalidParameter("matrix has no columns".into()));
        }
        if self.bounds.len() != self.compiled.width || self.groups.len() != self.compiled.width {
            return Err(Error::DimensionMismatch { expected: self.compiled.width, found: self.bounds.len() });
        }
        for &(lo, hi) in &self.bounds {
            if lo == 0 || lo > hi {
                return Err(Error::InvalidParameter(format!("bad variable range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Least assignment and its common label.
    pub fn solve(&self, threads: usize, budget: u64) -> Result<(Outcome<(Vec<u64>, Option<L>)>, u64)> {
        self.validate()?;
        if self.compiled.has_zero_row {
            return Ok((Outcome::Exhausted, 0));
        }
        let (lo, hi) = self.bounds[0];
        let n = (hi - lo + 1) as usize;
        let error = std::sync::Mutex::new(None);
        let res = parallel_least(n, threads, budget, |i, limit, cancelled| {
            match self.branch(lo + i as u64, limit, cancelled) {
                Ok(r) => r,
                Err(e) => {
                    error.lock().expect("error slot").get_or_insert(e);
                    (Branch::Exceeded, limit)
                }
            }
        });
        if let Some(e) = error.into_inner().expect("error slot") {
            return Err(e);
        }
        Ok(res)
    }

    fn branch(&self, v0: u64, limit: u64, cancelled: &dyn Fn() -> bool) -> Result<(Branch<(Vec<u64>, Option<L>)>, u64)> {
        let w = self.compiled.width;
        let mut f = Frame {
            x: vec![0; w],
            labels: vec![None; w + 1],
            values: Vec::new(),
            memo: HashMap::new(),
            nodes: 0,
            limit,
            cancelled,
        };
        let step = self.try_value(0, v0, &mut f)?;
        let step = match step {
            Some(s) => s,
            None => Step::Exhausted,
        };
        let nodes = f.nodes;
        Ok(match step {
            Step::Found => (Branch::Found((f.x, f.labels[w].clone())), nodes),
            Step::Exhausted => (Branch::Exhausted, nodes),
            Step::Exceeded => (Branch::Exceeded, nodes),
            Step::Cancelled => (Branch::Cancelled, nodes),
        })
    }

    /// Assigns `x_k = v`; `None` means the value was rejected at this level.
    fn try_value(&self, k: usize, v: u64, f: &mut Frame<'_, L>) -> Result<Option<Step>> {
        f.nodes += 1;
        if f.nodes > f.limit {
            return Ok(Some(Step::Exceeded));
        }
        if f.nodes % 4096 == 0 && (f.cancelled)() {
            return Ok(Some(Step::Cancelled));
        }
        if let Some(g) = self.groups[k] {
            if (0..k).any(|j| self.groups[j] == Some(g) && f.x[j] == v) {
                return Ok(None);
            }
        }
        f.x[k] = v;
        let mut label = f.labels[k].clone();
        let pushed = f.values.len();
        let ok = self.check_rows(k, f, &mut label)?;
        if !ok {
            f.values.truncate(pushed);
            return Ok(None);
        }
        f.labels[k + 1] = label;
        let step = if k + 1 == self.compiled.width {
            Step::Found
        } else {
            self.descend(k + 1, f)?
        };
        if !matches!(step, Step::Found) {
            f.values.truncate(pushed);
        }
        Ok(Some(step))
    }

    fn descend(&self, k: usize, f: &mut Frame<'_, L>) -> Result<Step> {
        let (lo, hi) = self.bounds[k];
        for v in lo..=hi {
            match self.try_value(k, v, f)? {
                None | Some(Step::Exhausted) => {}
                Some(s) => return Ok(s),
            }
        }
        Ok(Step::Exhausted)
    }

    fn check_rows(&self, k: usize, f: &mut Frame<'_, L>, label: &mut Option<L>) -> Result<bool> {
        for &ri in &self.compiled.completed_at[k] {
            let row = &self.compiled.rows[ri];
            let Some(value) = row.eval(&f.x)? else {
                return Ok(false);
            };
            let l = f.memo.entry(value).or_insert_with(|| (self.label)(value)).clone();
            let Some(l) = l else {
                return Ok(false);
            };
            match label {
                Some(prev) if *prev != l => return Ok(false),
                Some(_) => {}
                None => *label = Some(l),
            }
            if self.distinct_image {
                if f.values.iter().any(|&(u, c)| u == value && c != row.class) {
                    return Ok(false);
                }
                f.values.push((value, row.class));
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake(n: usize, found: &[usize], cost: u64) -> impl Fn(usize, u64, &dyn Fn() -> bool) -> (Branch<usize>, u64) + Sync + '_ {
        move |i, limit, _| {
            if cost > limit {
                return (Branch::Exceeded, limit);
            }
            let _ = n;
            if found.contains(&i) {
                (Branch::Found(i), cost)
            } else {
                (Branch::Exhausted, cost)
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        for threads in [1, 2, 3, 8] {
            assert_eq!(parallel_least(10, threads, 1000, fake(10, &[4, 7], 10)), (Outcome::Found(4), 50));
            assert_eq!(parallel_least(10, threads, 1000, fake(10, &[], 10)), (Outcome::Exhausted, 100));
            assert_eq!(parallel_least(10, threads, 45, fake(10, &[7], 10)), (Outcome::BudgetHit, 45));
            assert_eq!(parallel_least(10, threads, 50, fake(10, &[4], 10)), (Outcome::Found(4), 50));
            assert_eq!(parallel_least(0, threads, 50, fake(0, &[], 10)), (Outcome::Exhausted, 0));
        }
    }
}
