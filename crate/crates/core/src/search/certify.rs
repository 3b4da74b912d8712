use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::digits::{big_pow, divisible_by_power, floor_log};
use crate::error::{Error, Result};
use crate::ratcore::{FiniteMatrix, Rat, SparseRow};

/// No zero row, and rows whose first nonzero entry sits in the same column
/// agree on a positive value there.
pub fn is_first_entries(a: &FiniteMatrix) -> bool {
    let mut firsts: BTreeMap<usize, &Rat> = BTreeMap::new();
    for r in a.rows() {
        let Some((c, v)) = r.leading() else { return false };
        if !v.is_positive() || *firsts.entry(c).or_insert(v) != v {
            return false;
        }
    }
    true
}

/// The set of leading entries of the rows.
pub fn first_entries(a: &FiniteMatrix) -> BTreeSet<Rat> {
    a.rows().iter().filter_map(|r| r.leading().map(|(_, v)| v.clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    WitnessInvalid(String),
}

/// Checks the linear witness `x = C·y` for `A`: `B` is first-entries,
/// `A·C = B` exactly, and `C` has non-negative integer entries with no zero
/// row, so every positive `y` gives a positive integer `x` with `A·x = B·y`.
pub fn certify_ipr(a: &FiniteMatrix, b: &FiniteMatrix, c: &FiniteMatrix) -> Result<Verdict> {
    if a.row_count() != b.row_count() {
        return Err(Error::DimensionMismatch { expected: a.row_count(), found: b.row_count() });
    }
    if c.row_count() != a.width() {
        return Err(Error::DimensionMismatch { expected: a.width(), found: c.row_count() });
    }
    if c.width() != b.width() {
        return Err(Error::DimensionMismatch { expected: b.width(), found: c.width() });
    }
    if !is_first_entries(b) {
        return Ok(Verdict::WitnessInvalid("B is not a first entries matrix".into()));
    }
    if let Some(i) = c.rows().iter().position(|r| r.entries().any(|(_, v)| !v.is_integer() || !(v.is_positive() || v.is_zero()))) {
        return Ok(Verdict::WitnessInvalid(format!("row {i} of C has an entry outside the non-negative integers")));
    }
    if let Some(i) = c.rows().iter().position(SparseRow::is_zero) {
        return Ok(Verdict::WitnessInvalid(format!("row {i} of C is zero")));
    }
    let ac = a.mul(c)?;
    if let Some(i) = (0..a.row_count()).find(|&i| ac.row(i) != b.row(i)) {
        return Ok(Verdict::WitnessInvalid(format!("row {i} of A·C differs from B")));
    }
    Ok(Verdict::Certified)
}

/// For each consecutive pair, `p^{s+8} | x_{i+1}` where `s = ⌊log_p x_i⌋`.
pub fn check_rapid(x: &[BigInt], p: u32) -> Result<bool> {
    if x.iter().any(|v| !v.is_positive()) {
        return Err(Error::NotPositiveInteger("rapid sequences are positive".into()));
    }
    for w in x.windows(2) {
        let s = floor_log(&w[0], p)?;
        if !divisible_by_power(&w[1], p, s + 8) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces each seed after the first with its least multiple that satisfies
/// the growth condition relative to the previous term.
pub fn make_rapid(p: u32, seeds: &[BigInt]) -> Result<Vec<BigInt>> {
    let mut out: Vec<BigInt> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        if !seed.is_positive() {
            return Err(Error::NotPositiveInteger(seed.to_string()));
        }
        let next = match out.last() {
            None => seed.clone(),
            Some(prev) => seed.lcm(&big_pow(p, floor_log(prev, p)? + 8)),
        };
        out.push(next);
    }
    Ok(out)
}

/// A row with sum `c` whose value at `x` is negative, built from a pair of
/// unequal entries: `c + r` at the first minimal entry `m`, `−r` at the first
/// entry `n` differing from it, with `r = ⌊c·x_m⌋ + 1` (at least 1).
pub fn refute_nonconstant(c: &Rat, x: &[u64]) -> Result<SparseRow> {
    let min = *x.iter().min().ok_or(Error::ConstantVector)?;
    let m = x.iter().position(|&v| v == min).expect("minimum exists");
    let n = x.iter().position(|&v| v != min).ok_or(Error::ConstantVector)?;
    let cx = c * &Rat::from(min);
    let r = Rat::from(cx.floor() + 1).max(Rat::one());
    Ok(SparseRow::from_entries([(m, c + &r), (n, -r)]))
}
