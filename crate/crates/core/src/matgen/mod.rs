//! Generators for the concrete matrix families: the Finite Sums matrix and its
//! truncations, Milliken–Taylor matrices, band matrices, `(m,p,c)` and Deuber
//! matrices, DH-style block concatenations, and the stacking helpers used to
//! build extension and translation systems.
//!
//! Infinite families take an explicit column bound and row budget and return
//! a finite truncation. Generation is deterministic: the same parameters
//! always produce the same rows in the same order.

mod family;

pub use family::RowFamily;

use crate::error::{Error, Result};
use crate::ratcore::{FiniteMatrix, Rat, SparseRow};
use crate::seqs::{compress, CompressedSeq};

fn ones_row(cols: impl IntoIterator<Item = usize>) -> SparseRow {
    SparseRow::from_entries(cols.into_iter().map(|c| (c, Rat::one())))
}

fn bits(n: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&j| n >> j & 1 == 1)
}

/// Row `i` of the Finite Sums matrix: the 0/1 row whose binary value is `i+1`.
pub fn f_row(i: u64) -> SparseRow {
    ones_row(bits(i + 1))
}

/// `F_v`: the first `2^v − 1` rows and first `v` columns of the Finite Sums matrix.
pub fn f_truncation(v: usize) -> Result<FiniteMatrix> {
    if v == 0 || v >= 63 {
        return Err(Error::InvalidParameter(format!("F_v needs 1 <= v < 63, got {v}")));
    }
    FiniteMatrix::new(v, (0..(1u64 << v) - 1).map(f_row).collect())
}

/// Rows of the Finite Sums matrix with at most two ones, in Finite Sums order.
pub fn f_prime_rows(column_bound: usize, row_budget: usize) -> FiniteMatrix {
    // f-order on rows with at most two ones: by top column, then the lower one
    let rows = (0..column_bound)
        .flat_map(|hi| std::iter::once(None).chain((0..hi).map(Some)).map(move |lo| (lo, hi)))
        .take(row_budget)
        .map(|(lo, hi)| ones_row(lo.into_iter().chain([hi])))
        .collect();
    FiniteMatrix::new(column_bound, rows).expect("distinct rows")
}

/// Key ordering rows by largest column, then by support bitmask, then entries.
/// For 0/1 rows this is exactly the Finite Sums row order.
fn support_order_key(r: &SparseRow) -> (Option<usize>, Vec<usize>, Vec<Rat>) {
    let mut supp: Vec<usize> = r.support().collect();
    supp.reverse();
    (r.max_column(), supp, r.entries().map(|(_, v)| v.clone()).collect())
}

/// All rows with support below `column_bound` whose compressed form is `a`.
///
/// Found by scanning every row over the alphabet `{0} ∪ a` and keeping those
/// that compress to `a`; the scan costs `(|a|+1)^column_bound`.
pub fn mt_rows(a: &CompressedSeq, column_bound: usize, row_budget: usize) -> FiniteMatrix {
    let mut alphabet: Vec<i64> = vec![0];
    for &t in a.terms() {
        if !alphabet.contains(&t) {
            alphabet.push(t);
        }
    }
    let base = alphabet.len();
    let mut rows = Vec::new();
    let mut digits = vec![0usize; column_bound];
    loop {
        let dense: Vec<i64> = digits.iter().map(|&d| alphabet[d]).collect();
        if compress(&dense).ok().as_ref() == Some(a) {
            rows.push(SparseRow::from_dense(&dense));
        }
        // odometer increment
        let mut i = 0;
        while i < column_bound && digits[i] + 1 == base {
            digits[i] = 0;
            i += 1;
        }
        if i == column_bound {
            break;
        }
        digits[i] += 1;
    }
    rows.sort_by_cached_key(support_order_key);
    rows.truncate(row_budget);
    FiniteMatrix::new(column_bound, rows).expect("distinct rows")
}

/// Row `n` carries `coeffs` in columns `n..n+k`.
pub fn band_matrix(coeffs: &[i64], row_count: usize, width: usize) -> Result<FiniteMatrix> {
    let k = coeffs.len();
    if k == 0 || coeffs[0] == 0 || coeffs[k - 1] == 0 {
        return Err(Error::InvalidParameter(
            "band coefficients must be nonempty with nonzero first and last entries".into(),
        ));
    }
    if row_count + k > width + 1 {
        return Err(Error::WidthTooSmall { needed: row_count + k - 1, width });
    }
    let rows = (0..row_count)
        .map(|n| SparseRow::from_entries(coeffs.iter().enumerate().map(|(j, &c)| (n + j, Rat::from(c)))))
        .collect();
    FiniteMatrix::new(width, rows)
}

/// First-entries rows with `m` columns and leading entry `c`, every later
/// entry drawn from `tail`. Rows are grouped by leading column, then ordered
/// lexicographically.
fn first_entries_family(m: usize, c: i64, tail: &[i64]) -> Result<FiniteMatrix> {
    let mut rows = Vec::new();
    for lead in 0..m {
        let free = m - lead - 1;
        let count = tail.len().checked_pow(free as u32).filter(|&n| n <= 10_000_000).ok_or_else(|| {
            Error::InvalidParameter("first-entries family too large to enumerate".into())
        })?;
        for code in 0..count {
            let mut dense = vec![0i64; m];
            dense[lead] = c;
            let mut rest = code;
            for j in (lead + 1..m).rev() {
                dense[j] = tail[rest % tail.len()];
                rest /= tail.len();
            }
            rows.push(SparseRow::from_dense(&dense));
        }
    }
    FiniteMatrix::new(m, rows)
}

fn check_mpc(m: usize, p: i64, c: i64) -> Result<()> {
    if m == 0 || p < 1 || c < 1 {
        return Err(Error::InvalidParameter(format!("(m,p,c) must be positive, got ({m},{p},{c})")));
    }
    Ok(())
}

/// All first-entries rows with `m` columns, first entry `c`, and the remaining
/// entries in `{0,…,p}`. There are `((p+1)^m − 1)/p` of them.
pub fn mpc_matrix(m: usize, p: i64, c: i64) -> Result<FiniteMatrix> {
    check_mpc(m, p, c)?;
    first_entries_family(m, c, &(0..=p).collect::<Vec<_>>())
}

/// Deuber's signed variant: remaining entries range over `{−p,…,p}`.
pub fn deuber_matrix(m: usize, p: i64, c: i64) -> Result<FiniteMatrix> {
    check_mpc(m, p, c)?;
    first_entries_family(m, c, &(-p..=p).collect::<Vec<_>>())
}

/// Row `i` of the non-dominated matrix: 2 at column `i`, 1 at columns
/// `2^i … 2^{i+1}−1`, truncated at `width`.
pub fn anodom_row(i: usize, width: usize) -> SparseRow {
    let mut row = SparseRow::new();
    if i < width {
        row.set(i, Rat::from(2));
    }
    if i < 63 {
        for j in (1usize << i)..(1usize << (i + 1)).min(width) {
            row.set(j, Rat::one());
        }
    }
    row
}

/// Identity on `width` columns stacked over the rows `i` whose 1-block fits
/// inside `width` (at most `row_budget` of them).
pub fn anodom_matrix(width: usize, row_budget: usize) -> FiniteMatrix {
    let a_rows = (0..row_budget)
        .take_while(|&i| i < 62 && (1usize << (i + 1)) <= width)
        .map(|i| anodom_row(i, width));
    let rows = FiniteMatrix::identity(width).into_rows().into_iter().chain(a_rows).collect();
    FiniteMatrix::new_with_duplicates(width, rows).expect("supports inside width")
}

/// The block matrix with a shared column 0: the unit row on column 0, then for
/// each `n ≥ 1` a block of `n` fresh columns contributing their unit rows and
/// one combined row with `c_n` in column 0 and ones across the block.
/// Only blocks that fit completely inside `width` are emitted.
pub fn script_i_matrix(c: &[u64], width: usize) -> Result<FiniteMatrix> {
    if c.is_empty() {
        return Err(Error::InvalidParameter("script-I needs at least one c_n".into()));
    }
    if c.contains(&0) {
        return Err(Error::InvalidParameter("c_n must be positive".into()));
    }
    if width == 0 {
        return Ok(FiniteMatrix::empty(0));
    }
    let mut rows = vec![ones_row([0])];
    let mut next_col = 1;
    for (idx, &cn) in c.iter().enumerate() {
        let n = idx + 1;
        if next_col + n > width {
            break;
        }
        let block: Vec<usize> = (next_col..next_col + n).collect();
        rows.extend(block.iter().map(|&j| ones_row([j])));
        let mut combined = ones_row(block.iter().copied());
        combined.set(0, Rat::from(cn));
        rows.push(combined);
        next_col += n;
    }
    FiniteMatrix::new(width, rows)
}

/// Distinct nonzero integer rows of length `width` with entries in
/// `[−entry_bound, entry_bound]` summing to `c`, in lexicographic order.
///
/// Rational row sums are reached by scaling an integer family; a non-integer
/// `c` yields no integer rows.
pub fn constant_rowsum_rows(c: &Rat, width: usize, row_budget: usize, entry_bound: u32) -> FiniteMatrix {
    let mut rows = Vec::new();
    let Some(target) = c.to_i64() else {
        return FiniteMatrix::empty(width);
    };
    let b = entry_bound as i64;
    let mut dense = vec![-b; width];
    fn walk(
        pos: usize,
        sum: i64,
        target: i64,
        b: i64,
        dense: &mut Vec<i64>,
        rows: &mut Vec<SparseRow>,
        budget: usize,
    ) {
        if rows.len() >= budget {
            return;
        }
        let left = (dense.len() - pos) as i64;
        if pos == dense.len() {
            if sum == target && dense.iter().any(|&v| v != 0) {
                rows.push(SparseRow::from_dense(dense));
            }
            return;
        }
        // remaining entries can move the sum by at most ±b each
        if (target - sum).abs() > left * b {
            return;
        }
        for v in -b..=b {
            dense[pos] = v;
            walk(pos + 1, sum + v, target, b, dense, rows, budget);
        }
    }
    walk(0, 0, target, b, &mut dense, &mut rows, row_budget);
    FiniteMatrix::new(width, rows).expect("distinct rows")
}

/// Column offsets `k(0)=0, k(n+1)=k(n)+v(n)` of a block list.
pub fn block_offsets(blocks: &[FiniteMatrix]) -> Vec<usize> {
    blocks
        .iter()
        .scan(0, |acc, b| {
            let k = *acc;
            *acc += b.width();
            Some(k)
        })
        .collect()
}

/// DH-style concatenation: every row picks either the zero block or one row of
/// each block, not all zero. Row order is a mixed-radix counter with block 0
/// varying fastest.
pub fn dh_truncation(blocks: &[FiniteMatrix], row_budget: usize) -> FiniteMatrix {
    let offsets = block_offsets(blocks);
    let width = offsets.last().map_or(0, |&k| k + blocks.last().unwrap().width());
    let mut rows = Vec::new();
    let mut choice = vec![0usize; blocks.len()]; // 0 = zero block, j = row j-1
    loop {
        let mut i = 0;
        while i < blocks.len() && choice[i] == blocks[i].row_count() {
            choice[i] = 0;
            i += 1;
        }
        if i == blocks.len() || rows.len() >= row_budget {
            break;
        }
        choice[i] += 1;
        let offsets = &offsets;
        let row = SparseRow::from_entries(choice.iter().enumerate().filter(|(_, &ch)| ch > 0).flat_map(
            |(b, &ch)| {
                blocks[b].row(ch - 1).entries().map(move |(c, v)| (c + offsets[b], v.clone()))
            },
        ));
        rows.push(row);
    }
    FiniteMatrix::new_with_duplicates(width, rows).expect("supports inside width")
}

/// `A` over `B`, padding the narrower one with zero columns.
pub fn stack(a: &FiniteMatrix, b: &FiniteMatrix) -> FiniteMatrix {
    let width = a.width().max(b.width());
    let rows: Vec<SparseRow> = a.rows().iter().chain(b.rows()).cloned().collect();
    let m = FiniteMatrix::new_with_duplicates(width, rows).expect("supports inside width");
    if m.has_duplicate_rows() {
        m
    } else {
        FiniteMatrix::new(width, m.into_rows()).expect("checked")
    }
}

/// Moves every column `k` places to the right.
pub fn shift_columns(m: &FiniteMatrix, k: usize) -> FiniteMatrix {
    let rows = m.rows().iter().map(|r| r.shifted(k)).collect();
    if m.duplicates_allowed() {
        FiniteMatrix::new_with_duplicates(m.width() + k, rows).expect("shifted")
    } else {
        FiniteMatrix::new(m.width() + k, rows).expect("shifted")
    }
}

/// Prepends a constant-1 column: row `r` becomes `(1, r)`.
pub fn augment_translate(m: &FiniteMatrix) -> FiniteMatrix {
    let shifted = shift_columns(m, 1);
    let rows = shifted
        .rows()
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.set(0, Rat::one());
            r
        })
        .collect();
    FiniteMatrix::new_with_duplicates(shifted.width(), rows).expect("augmented")
}

/// The translation system with one translation column per system:
/// row block `i` is `(e_i, M_i)`, and the last block is `(0, F)`.
pub fn translate_system(systems: &[FiniteMatrix], f: &FiniteMatrix) -> FiniteMatrix {
    let t = systems.len();
    let mut out = FiniteMatrix::empty(t);
    for (i, m) in systems.iter().enumerate() {
        let rows = shift_columns(m, t)
            .rows()
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.set(i, Rat::one());
                r
            })
            .collect();
        let block = FiniteMatrix::new_with_duplicates(m.width() + t, rows).expect("block");
        out = stack(&out, &block);
    }
    stack(&out, &shift_columns(f, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{image, rat_vec};
    use crate::search::is_first_entries;
    use crate::seqs::{fs_over_sets, mt_image};
    use proptest::prelude::*;
    use std::collections::{BTreeSet, HashSet};

    fn dense(m: &FiniteMatrix) -> Vec<Vec<i64>> {
        m.to_dense()
            .iter()
            .map(|r| r.iter().map(|v| v.to_i64().unwrap()).collect())
            .collect()
    }

    fn seq(t: &[i64]) -> CompressedSeq {
        CompressedSeq::new(t.to_vec()).unwrap()
    }

    fn as_set(rows: Vec<Vec<i64>>) -> BTreeSet<Vec<i64>> {
        rows.into_iter().collect()
    }

    #[test]
    fn f_rows() {
        assert_eq!(f_row(0).support().collect::<Vec<_>>(), vec![0]);
        assert_eq!(f_row(2).support().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(f_row(6).support().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(f_row(3).support().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn f_row_bijection() {
        let mut seen = HashSet::new();
        for i in 0..1024u64 {
            let r = f_row(i);
            let val: u64 = r.support().map(|c| 1u64 << c).sum();
            assert_eq!(val, i + 1);
            assert!(r.entries().all(|(_, v)| *v == Rat::one()));
            assert!(seen.insert(r));
        }
    }

    #[test]
    fn f_truncations() {
        assert_eq!(dense(&f_truncation(1).unwrap()), vec![vec![1]]);
        assert_eq!(dense(&f_truncation(2).unwrap()), vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(f_truncation(3).unwrap().row_count(), 7);
        assert!(f_truncation(0).is_err());
    }

    #[test]
    fn f_prime() {
        assert_eq!(dense(&f_prime_rows(2, 100)), vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(f_prime_rows(3, 6).row_count(), 6);
        assert_eq!(dense(&f_prime_rows(1, 10)), vec![vec![1]]);
        // F_4 has 15 rows, of which the one with three or four ones are dropped
        assert_eq!(f_prime_rows(4, 100).row_count(), 4 + 6);
        let fp = f_prime_rows(4, 100);
        let f4 = f_truncation(4).unwrap();
        let kept: Vec<_> = f4.rows().iter().filter(|r| r.nnz() <= 2).cloned().collect();
        assert_eq!(fp.rows(), &kept[..]);
    }

    #[test]
    fn mt_rows_examples() {
        assert_eq!(dense(&mt_rows(&seq(&[1]), 2, 100)), vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(dense(&mt_rows(&seq(&[2, 1]), 2, 100)), vec![vec![2, 1]]);
        assert_eq!(
            as_set(dense(&mt_rows(&seq(&[2, 1]), 3, 100))),
            as_set(vec![vec![2, 1, 0], vec![0, 2, 1], vec![2, 0, 1], vec![2, 2, 1], vec![2, 1, 1]])
        );
        assert_eq!(mt_rows(&seq(&[2, 1]), 3, 2).row_count(), 2);
        // MT(<1>) rows are F's rows in the same order
        assert_eq!(mt_rows(&seq(&[1]), 4, 100), f_truncation(4).unwrap());
    }

    #[test]
    fn band_examples() {
        assert_eq!(
            dense(&band_matrix(&[1, 2, 1], 3, 5).unwrap()),
            vec![vec![1, 2, 1, 0, 0], vec![0, 1, 2, 1, 0], vec![0, 0, 1, 2, 1]]
        );
        assert_eq!(band_matrix(&[1], 2, 2).unwrap(), FiniteMatrix::identity(2));
        assert_eq!(dense(&band_matrix(&[2, 1], 2, 3).unwrap()), vec![vec![2, 1, 0], vec![0, 2, 1]]);
        assert_eq!(band_matrix(&[1, 2, 1], 3, 4), Err(Error::WidthTooSmall { needed: 5, width: 4 }));
        assert!(band_matrix(&[0, 1], 1, 3).is_err());
        assert!(band_matrix(&[], 1, 3).is_err());
    }

    #[test]
    fn mpc_examples() {
        assert_eq!(dense(&mpc_matrix(2, 2, 1).unwrap()), vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]]);
        assert_eq!(dense(&mpc_matrix(1, 5, 3).unwrap()), vec![vec![3]]);
        assert_eq!(mpc_matrix(3, 2, 1).unwrap().row_count(), 13);
        assert!(mpc_matrix(0, 1, 1).is_err());
        for m in 1..=4usize {
            for p in 1..=4i64 {
                let expected = ((p + 1).pow(m as u32) - 1) / p;
                assert_eq!(mpc_matrix(m, p, 1).unwrap().row_count() as i64, expected, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn deuber_examples() {
        assert_eq!(
            dense(&deuber_matrix(2, 2, 1).unwrap()),
            vec![vec![1, -2], vec![1, -1], vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]]
        );
        assert_eq!(dense(&deuber_matrix(1, 3, 2).unwrap()), vec![vec![2]]);
        for p in 1..=5 {
            assert_eq!(deuber_matrix(2, p, 3).unwrap().row_count() as i64, 2 * p + 2);
        }
    }

    #[test]
    fn first_entries_families_have_single_first_entry() {
        for (m, p, c) in [(2, 2, 1), (3, 2, 2), (3, 3, 1), (2, 4, 3)] {
            for a in [mpc_matrix(m, p, c).unwrap(), deuber_matrix(m, p, c).unwrap()] {
                assert!(is_first_entries(&a));
                assert_eq!(crate::search::first_entries(&a), BTreeSet::from([Rat::from(c)]));
            }
        }
    }

    #[test]
    fn anodom_rows() {
        assert_eq!(anodom_row(0, 4).to_dense(4), rat_vec(&[2i64, 1, 0, 0]));
        assert_eq!(anodom_row(1, 5).to_dense(5), rat_vec(&[0i64, 2, 1, 1, 0]));
        assert_eq!(anodom_row(2, 9).to_dense(9), rat_vec(&[0i64, 0, 2, 0, 1, 1, 1, 1, 0]));
        let c = anodom_matrix(8, 10);
        // identity(8) + rows 0,1,2
        assert_eq!(c.row_count(), 11);
        let d = dense(&c);
        assert_eq!(d[8], vec![2, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(d[10], vec![0, 0, 2, 0, 1, 1, 1, 1]);
        let sums: Vec<i64> = (0..8).map(|j| d.iter().map(|r| r[j]).sum()).collect();
        assert_eq!(sums, vec![3, 4, 4, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn script_i_layout() {
        let m = script_i_matrix(&[7, 8, 9], 7).unwrap();
        let d = dense(&m);
        assert_eq!(d[0], vec![1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(d[1], vec![0, 1, 0, 0, 0, 0, 0]);
        assert_eq!(d[2], vec![7, 1, 0, 0, 0, 0, 0]);
        assert_eq!(d[5], vec![8, 0, 1, 1, 0, 0, 0]);
        assert_eq!(d[9], vec![9, 0, 0, 0, 1, 1, 1]);
        // rows through block n: 1 + sum_{j<=n} (j + 1)
        assert_eq!(m.row_count(), 1 + 2 + 3 + 4);
        for (n, w) in [(1usize, 2usize), (2, 4), (3, 7), (4, 11)] {
            let rows = script_i_matrix(&vec![1; n], w).unwrap().row_count();
            assert_eq!(rows, 1 + (1..=n).map(|j| j + 1).sum::<usize>());
        }
        let ones = script_i_matrix(&[1, 1], 4).unwrap();
        assert_eq!(dense(&ones)[..3], [vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![1, 1, 0, 0]]);
        // a partial block is not emitted
        assert_eq!(script_i_matrix(&[1, 1], 3).unwrap().row_count(), 3);
    }

    #[test]
    fn constant_rowsum() {
        assert_eq!(
            as_set(dense(&constant_rowsum_rows(&Rat::one(), 2, 100, 1))),
            as_set(vec![vec![1, 0], vec![0, 1]])
        );
        let m = constant_rowsum_rows(&Rat::one(), 2, 100, 3);
        assert!(dense(&m).contains(&vec![3, -2]));
        assert!(m.rows().iter().all(|r| r.row_sum() == Rat::one()));
        assert_eq!(constant_rowsum_rows(&Rat::zero(), 1, 100, 3).row_count(), 0);
        assert_eq!(constant_rowsum_rows(&Rat::new(1, 2).unwrap(), 2, 100, 3).row_count(), 0);
        assert_eq!(constant_rowsum_rows(&Rat::one(), 3, 4, 2).row_count(), 4);
    }

    #[test]
    fn dh_examples() {
        let one = FiniteMatrix::from_dense(&[&[1i64][..]]).unwrap();
        assert_eq!(dense(&dh_truncation(&[one.clone()], 100)), vec![vec![1]]);
        let schur = f_truncation(2).unwrap();
        let d = dh_truncation(&[schur.clone(), one.clone()], 100);
        assert_eq!(d.row_count(), 7);
        assert_eq!(d.width(), 3);
        assert_eq!(block_offsets(&[schur, one]), vec![0, 2]);
    }

    #[test]
    fn stacking() {
        let row = FiniteMatrix::from_dense(&[&[1i64, 2][..]]).unwrap();
        let b = stack(&row, &f_truncation(2).unwrap());
        assert_eq!(dense(&b), vec![vec![1, 2], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(dense(&augment_translate(&FiniteMatrix::from_dense(&[&[2i64, 1][..]]).unwrap())), vec![vec![1, 2, 1]]);
        let a = f_truncation(2).unwrap();
        assert_eq!(stack(&a, &FiniteMatrix::empty(0)), a);
        let sys = translate_system(&[mt_rows(&seq(&[2, 1]), 2, 10)], &f_truncation(2).unwrap());
        assert_eq!(dense(&sys), vec![vec![1, 2, 1], vec![0, 1, 0], vec![0, 0, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn generation_is_deterministic() {
        let fams = [
            RowFamily::F,
            RowFamily::Mt { a: seq(&[2, -1, 3]) },
            RowFamily::Deuber { m: 3, p: 2, c: 1 },
            RowFamily::ScriptI { c: vec![2, 3, 4] },
        ];
        for f in fams {
            let a = serde_json::to_string(&f.generate(Some(6), Some(50)).unwrap()).unwrap();
            let b = serde_json::to_string(&f.generate(Some(6), Some(50)).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    fn block_strategy() -> impl Strategy<Value = FiniteMatrix> {
        prop_oneof![
            (1usize..=2).prop_map(|v| f_truncation(v).unwrap()),
            Just(FiniteMatrix::from_dense(&[&[1i64, 0][..], &[1, 1], &[1, 2]]).unwrap()),
            Just(FiniteMatrix::from_dense(&[&[2i64][..]]).unwrap()),
            Just(deuber_matrix(2, 1, 1).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn mt_rows_all_compress_to_a(a in proptest::collection::vec(-2i64..=2, 1..=3), n in 0usize..=5) {
            if let Ok(a) = compress(&a) {
                for r in mt_rows(&a, n, usize::MAX).rows() {
                    let d: Vec<i64> = r.to_dense(n).iter().map(|v| v.to_i64().unwrap()).collect();
                    prop_assert_eq!(compress(&d).unwrap(), a.clone());
                }
            }
        }

        #[test]
        fn mt_rows_image_matches_mt_image(
            a in proptest::collection::vec(-2i64..=3, 1..=3),
            x in proptest::collection::vec(1u64..=25, 1..=6),
        ) {
            if let Ok(a) = compress(&a) {
                let m = mt_rows(&a, x.len(), usize::MAX);
                let im = image(&m, &rat_vec(&x)).unwrap();
                prop_assert_eq!(im.values().clone(), mt_image(&a, &x).values().clone());
            }
        }

        #[test]
        fn dh_image_is_fs_over_block_images(
            blocks in proptest::collection::vec(block_strategy(), 1..=3),
            seed in proptest::collection::vec(1u64..=9, 6),
        ) {
            let d = dh_truncation(&blocks, usize::MAX);
            let x: Vec<Rat> = rat_vec(&seed[..d.width()]);
            let offsets = block_offsets(&blocks);
            let ys: Vec<BTreeSet<Rat>> = blocks
                .iter()
                .zip(&offsets)
                .map(|(b, &k)| image(b, &x[k..k + b.width()]).unwrap().values().clone())
                .collect();
            prop_assert_eq!(image(&d, &x).unwrap().values().clone(), fs_over_sets(&ys).unwrap().values().clone());
        }
    }
}
