//! Compressed sequences and the finite-prefix image constructions built on
//! them: finite sums, Milliken–Taylor sums, their translates, and the
//! set-valued variants where each term is drawn from a finite set.
//!
//! Infinite sequences are modelled by finite prefixes; the prefix length is
//! the depth of every enumeration.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratcore::{ImageSet, Rat};

/// Nonempty integer sequence with no zero term and no two equal adjacent terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CompressedSeq(Vec<i64>);

impl CompressedSeq {
    /// Validates an already compressed sequence.
    pub fn new(terms: Vec<i64>) -> Result<Self> {
        if terms.is_empty() || terms.iter().all(|&t| t == 0) {
            return Err(Error::AllZeroSequence);
        }
        let ok = terms.iter().all(|&t| t != 0) && terms.windows(2).all(|w| w[0] != w[1]);
        if !ok {
            return Err(Error::NotCompressed(format!("{terms:?}")));
        }
        Ok(CompressedSeq(terms))
    }

    pub fn terms(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> i64 {
        *self.0.last().expect("nonempty")
    }
}

impl fmt::Display for CompressedSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

impl<'de> Deserialize<'de> for CompressedSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms: Vec<i64> = Deserialize::deserialize(d)?;
        CompressedSeq::new(terms).map_err(serde::de::Error::custom)
    }
}

/// Parameters of a Milliken–Taylor system.
///
/// The Milliken–Taylor theorem needs a positive last coefficient, while the
/// matrix form of the system does not; the flag records which reading a
/// caller relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MtParams {
    pub a: CompressedSeq,
    pub require_positive_last: bool,
}

impl MtParams {
    pub fn new(a: CompressedSeq, require_positive_last: bool) -> Result<Self> {
        if require_positive_last && a.last() <= 0 {
            return Err(Error::InvalidParameter(format!("last term of {a} must be positive")));
        }
        Ok(MtParams { a, require_positive_last })
    }
}

/// Deletes zeros, then collapses runs of equal adjacent values.
pub fn compress(a: &[i64]) -> Result<CompressedSeq> {
    let mut out: Vec<i64> = Vec::with_capacity(a.len());
    for &t in a.iter().filter(|&&t| t != 0) {
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err(Error::AllZeroSequence);
    }
    Ok(CompressedSeq(out))
}

/// All sums over nonempty subsets of `x`. Provenance is the row index of the
/// Finite Sums matrix whose binary support is the subset.
pub fn fs_image(x: &[u64]) -> ImageSet {
    assert!(x.len() < 64, "prefix too long to enumerate subsets");
    let mut out = ImageSet::from_rows(std::iter::empty());
    for mask in 1u64..(1u64 << x.len()) {
        let s: i128 = (0..x.len())
            .filter(|&t| mask >> t & 1 == 1)
            .map(|t| x[t] as i128)
            .sum();
        out.insert_with_row(Rat::from(s), (mask - 1) as usize);
    }
    out
}

/// Block assignments `F_0 < F_1 < … < F_k` inside columns `0..n`, encoded as
/// coefficient rows: column `t` carries `a_i` when `t ∈ F_i`, else 0.
///
/// Rows are ordered by the largest used column, then by the depth-first
/// choice order (unused, current block, next block) from column 0 upward.
pub fn mt_coefficient_rows(a: &CompressedSeq, n: usize) -> Vec<Vec<i64>> {
    let k = a.len();
    let mut out = Vec::new();
    // labels: block index + 1, 0 = unused
    let mut labels = vec![0usize; n];
    for last in 0..n {
        fill_blocks(0, last, 0, k, &mut labels, &mut |labels| {
            out.push(
                labels
                    .iter()
                    .map(|&l| if l == 0 { 0 } else { a.terms()[l - 1] })
                    .collect(),
            );
        });
    }
    out
}

/// Labels columns `col..=last`; `block` is the label of the most recent used
/// column. Column `last` is forced into the final block.
fn fill_blocks(
    col: usize,
    last: usize,
    block: usize,
    k: usize,
    labels: &mut [usize],
    emit: &mut dyn FnMut(&[usize]),
) {
    if col == last {
        // last column must close block k; allowed if we are in block k or k-1.
        if block == k || block + 1 == k {
            labels[col] = k;
            emit(labels);
            labels[col] = 0;
        }
        return;
    }
    // unused
    labels[col] = 0;
    fill_blocks(col + 1, last, block, k, labels, emit);
    // continue current block
    if block > 0 {
        labels[col] = block;
        fill_blocks(col + 1, last, block, k, labels, emit);
    }
    // open next block
    if block < k {
        labels[col] = block + 1;
        fill_blocks(col + 1, last, block + 1, k, labels, emit);
    }
    labels[col] = 0;
}

/// `MT(a, x)` over the prefix `x`: all `∑ a_i ∑_{t∈F_i} x_t` with
/// `F_0 < … < F_k` nonempty. Empty when `x` is shorter than `a`.
pub fn mt_image(a: &CompressedSeq, x: &[u64]) -> ImageSet {
    let rows = mt_coefficient_rows(a, x.len());
    ImageSet::from_rows(rows.iter().map(|r| {
        let s: i128 = r.iter().zip(x).map(|(&c, &v)| c as i128 * v as i128).sum();
        Rat::from(s)
    }))
}

/// `b + MT(a, x)`; `b` must be a positive integer.
pub fn translated_mt_image(b: u64, a: &CompressedSeq, x: &[u64]) -> Result<ImageSet> {
    if b == 0 {
        return Err(Error::InvalidParameter("translation b must be positive".into()));
    }
    Ok(mt_image(a, x).translated(&Rat::from(b)))
}

/// Finite sums choosing at most one term from each `Y_n`.
pub fn fs_over_sets(ys: &[BTreeSet<Rat>]) -> Result<ImageSet> {
    if ys.iter().any(BTreeSet::is_empty) {
        return Err(Error::InvalidParameter("every Y_n must be nonempty".into()));
    }
    // sums over nonempty subsets of the sets seen so far
    let mut acc: BTreeSet<Rat> = BTreeSet::new();
    for y in ys {
        let mut next = acc.clone();
        next.extend(y.iter().cloned());
        for s in &acc {
            for v in y {
                next.insert(s + v);
            }
        }
        acc = next;
    }
    Ok(ImageSet::from_values(acc))
}

/// `MT(a, ⟨Y_n⟩)`: Milliken–Taylor sums where each used index `t` draws its
/// term independently from `Y_t`.
pub fn mt_over_sets(a: &CompressedSeq, ys: &[BTreeSet<Rat>]) -> Result<ImageSet> {
    if ys.iter().any(BTreeSet::is_empty) {
        return Err(Error::InvalidParameter("every Y_n must be nonempty".into()));
    }
    let mut out = BTreeSet::new();
    for row in mt_coefficient_rows(a, ys.len()) {
        let mut sums: BTreeSet<Rat> = BTreeSet::from([Rat::zero()]);
        for (t, &c) in row.iter().enumerate().filter(|(_, &c)| c != 0) {
            let c = Rat::from(c);
            let terms: Vec<Rat> = ys[t].iter().map(|y| &c * y).collect();
            sums = sums
                .iter()
                .flat_map(|s| terms.iter().map(move |y| s + y))
                .collect();
        }
        out.extend(sums);
    }
    Ok(ImageSet::from_values(out))
}

/// The positive rational `r` with `a = r·b` termwise, if any.
pub fn rationally_proportional(a: &CompressedSeq, b: &CompressedSeq) -> Option<Rat> {
    if a.len() != b.len() {
        return None;
    }
    let r = Rat::new(a.terms()[0], b.terms()[0]).ok()?;
    if !r.is_positive() {
        return None;
    }
    a.terms()
        .iter()
        .zip(b.terms())
        .all(|(&ai, &bi)| Rat::from(ai) == &r * &Rat::from(bi))
        .then_some(r)
}
