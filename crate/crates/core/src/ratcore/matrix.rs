use std::collections::{BTreeMap, HashSet};

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::rat::{bigint_from_json, bigint_to_json, Rat};
use crate::error::{Error, Result};

/// A row with finitely many nonzero entries, keyed by 0-based column.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SparseRow {
    entries: BTreeMap<usize, Rat>,
}

impl SparseRow {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a row from `(column, value)` pairs; zero values are dropped and
    /// repeated columns are summed.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, Rat)>,
    {
        let mut row = SparseRow::new();
        for (col, v) in entries {
            let cur = row.entries.remove(&col).unwrap_or_else(Rat::zero) + v;
            if !cur.is_zero() {
                row.entries.insert(col, cur);
            }
        }
        row
    }

    pub fn from_dense<T: Into<Rat> + Copy>(values: &[T]) -> Self {
        Self::from_entries(values.iter().enumerate().map(|(c, &v)| (c, v.into())))
    }

    pub fn from_dense_rat(values: &[Rat]) -> Self {
        Self::from_entries(values.iter().cloned().enumerate())
    }

    pub fn set(&mut self, col: usize, value: Rat) {
        if value.is_zero() {
            self.entries.remove(&col);
        } else {
            self.entries.insert(col, value);
        }
    }

    pub fn get(&self, col: usize) -> Rat {
        self.entries.get(&col).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &Rat)> + '_ {
        self.entries.iter().map(|(&c, v)| (c, v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn max_column(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// First nonzero column and its entry.
    pub fn leading(&self) -> Option<(usize, &Rat)> {
        self.entries.iter().next().map(|(&c, v)| (c, v))
    }

    pub fn row_sum(&self) -> Rat {
        self.entries.values().cloned().sum()
    }

    /// Exact dot product with a dense vector. Columns past the end of `x` must
    /// not be in the support.
    pub fn dot(&self, x: &[Rat]) -> Rat {
        self.entries.iter().map(|(&c, v)| v * &x[c]).sum()
    }

    pub fn to_dense(&self, width: usize) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); width];
        for (&c, v) in &self.entries {
            if c < width {
                out[c] = v.clone();
            }
        }
        out
    }

    /// Moves every entry `offset` columns to the right.
    pub fn shifted(&self, offset: usize) -> SparseRow {
        SparseRow {
            entries: self.entries.iter().map(|(&c, v)| (c + offset, v.clone())).collect(),
        }
    }

    /// Keeps only the entries in columns below `width`.
    pub fn truncated(&self, width: usize) -> SparseRow {
        SparseRow {
            entries: self.entries.range(..width).map(|(&c, v)| (c, v.clone())).collect(),
        }
    }
}

/// Finite truncation of a (possibly infinite) matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteMatrix {
    width: usize,
    rows: Vec<SparseRow>,
    duplicates_allowed: bool,
}

impl FiniteMatrix {
    /// Rejects supports outside `[0, width)` and duplicate rows.
    pub fn new(width: usize, rows: Vec<SparseRow>) -> Result<Self> {
        Self::check_support(width, &rows)?;
        let mut seen = HashSet::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if !seen.insert(r) {
                return Err(Error::DuplicateRow(i));
            }
        }
        Ok(FiniteMatrix { width, rows, duplicates_allowed: false })
    }

    /// Like [`FiniteMatrix::new`] but keeps repeated rows.
    pub fn new_with_duplicates(width: usize, rows: Vec<SparseRow>) -> Result<Self> {
        Self::check_support(width, &rows)?;
        Ok(FiniteMatrix { width, rows, duplicates_allowed: true })
    }

    fn check_support(width: usize, rows: &[SparseRow]) -> Result<()> {
        for r in rows {
            if let Some(c) = r.max_column() {
                if c >= width {
                    return Err(Error::SupportOutOfRange { column: c, width });
                }
            }
        }
        Ok(())
    }

    pub fn from_dense<T: Into<Rat> + Copy>(rows: &[&[T]]) -> Result<Self> {
        let width = rows.iter().map(|r| r.len()).max().unwrap_or(0);
        Self::new(width, rows.iter().map(|r| SparseRow::from_dense(r)).collect())
    }

    pub fn empty(width: usize) -> Self {
        FiniteMatrix { width, rows: Vec::new(), duplicates_allowed: false }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| SparseRow::from_entries([(i, Rat::one())])).collect();
        FiniteMatrix { width: n, rows, duplicates_allowed: false }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseRow {
        &self.rows[i]
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn duplicates_allowed(&self) -> bool {
        self.duplicates_allowed
    }

    pub fn has_duplicate_rows(&self) -> bool {
        let mut seen = HashSet::new();
        self.rows.iter().any(|r| !seen.insert(r))
    }

    pub fn into_rows(self) -> Vec<SparseRow> {
        self.rows
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        self.rows.iter().map(|r| r.to_dense(self.width)).collect()
    }

    /// Same rows viewed in a wider column space.
    pub fn widened(&self, width: usize) -> Self {
        FiniteMatrix {
            width: width.max(self.width),
            rows: self.rows.clone(),
            duplicates_allowed: self.duplicates_allowed,
        }
    }

    /// Exact product `self · other`, with `other` given row-wise
    /// (`other.row_count()` must equal `self.width()`).
    pub fn mul(&self, other: &FiniteMatrix) -> Result<FiniteMatrix> {
        if other.row_count() != self.width {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                found: other.row_count(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                SparseRow::from_entries(r.entries().flat_map(|(k, a)| {
                    other.rows[k].entries().map(move |(j, b)| (j, a * b))
                }))
            })
            .collect();
        FiniteMatrix::new_with_duplicates(other.width, rows)
    }
}

/// A·x computed exactly.
pub fn apply(a: &FiniteMatrix, x: &[Rat]) -> Result<Vec<Rat>> {
    if x.len() != a.width() {
        return Err(Error::DimensionMismatch { expected: a.width(), found: x.len() });
    }
    Ok(a.rows().iter().map(|r| r.dot(x)).collect())
}

/// True iff every entry of A·x is a positive integer.
pub fn is_natural_image(a: &FiniteMatrix, x: &[Rat]) -> Result<bool> {
    Ok(apply(a, x)?.iter().all(Rat::is_positive_integer))
}

// JSON: {"width": w, "rows": [[[col, num, den], ...], ...]}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    width: usize,
    rows: Vec<Vec<[serde_json::Value; 3]>>,
}

fn row_to_json(r: &SparseRow) -> Vec<[serde_json::Value; 3]> {
    r.entries()
        .map(|(c, v)| [serde_json::Value::from(c), bigint_to_json(v.numer()), bigint_to_json(v.denom())])
        .collect()
}

fn row_from_json(entries: &[[serde_json::Value; 3]]) -> Result<SparseRow> {
    let mut row = SparseRow::new();
    for [c, n, d] in entries {
        let col = c
            .as_u64()
            .ok_or_else(|| Error::Parse(format!("bad column index {c}")))? as usize;
        row.set(col, Rat::new(bigint_from_json(n)?, bigint_from_json(d)?)?);
    }
    Ok(row)
}

impl Serialize for SparseRow {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        row_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseRow {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<[serde_json::Value; 3]> = Deserialize::deserialize(d)?;
        row_from_json(&raw).map_err(de::Error::custom)
    }
}

impl Serialize for FiniteMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson { width: self.width, rows: self.rows.iter().map(row_to_json).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let rows = raw
            .rows
            .iter()
            .map(|r| row_from_json(r))
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        let m = FiniteMatrix::new_with_duplicates(raw.width, rows).map_err(de::Error::custom)?;
        let dup = m.has_duplicate_rows();
        Ok(FiniteMatrix { duplicates_allowed: dup, ..m })
    }
}
