use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::matrix::{apply, FiniteMatrix};
use super::rat::Rat;
use crate::error::Result;

/// The set of entries of some A·x, optionally remembering which row produced
/// each value first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImageSet {
    values: BTreeSet<Rat>,
    provenance: Option<BTreeMap<Rat, usize>>,
}

impl ImageSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set with provenance from values listed in row order.
    pub fn from_rows<I: IntoIterator<Item = Rat>>(values: I) -> Self {
        let mut out = ImageSet { values: BTreeSet::new(), provenance: Some(BTreeMap::new()) };
        for (i, v) in values.into_iter().enumerate() {
            out.insert_with_row(v, i);
        }
        out
    }

    pub fn from_values<I: IntoIterator<Item = Rat>>(values: I) -> Self {
        ImageSet { values: values.into_iter().collect(), provenance: None }
    }

    pub(crate) fn insert_with_row(&mut self, v: Rat, row: usize) {
        if let Some(p) = self.provenance.as_mut() {
            p.entry(v.clone()).or_insert(row);
        }
        self.values.insert(v);
    }

    pub fn insert(&mut self, v: Rat) {
        self.values.insert(v);
    }

    pub fn values(&self) -> &BTreeSet<Rat> {
        &self.values
    }

    pub fn provenance(&self) -> Option<&BTreeMap<Rat, usize>> {
        self.provenance.as_ref()
    }

    /// Row index that first produced `v`.
    pub fn source_row(&self, v: &Rat) -> Option<usize> {
        self.provenance.as_ref()?.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, v: &Rat) -> bool {
        self.values.contains(v)
    }

    pub fn is_subset(&self, other: &ImageSet) -> bool {
        self.values.is_subset(&other.values)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rat> + '_ {
        self.values.iter()
    }

    pub fn all_positive_integers(&self) -> bool {
        self.values.iter().all(Rat::is_positive_integer)
    }

    /// Adds `b` to every value; provenance is kept.
    pub fn translated(&self, b: &Rat) -> ImageSet {
        ImageSet {
            values: self.values.iter().map(|v| v + b).collect(),
            provenance: self
                .provenance
                .as_ref()
                .map(|p| p.iter().map(|(v, &i)| (v + b, i)).collect()),
        }
    }

    pub fn union(&self, other: &ImageSet) -> ImageSet {
        ImageSet::from_values(self.values.union(&other.values).cloned())
    }

    /// Values as positive integers, when they all are and fit in 64 bits.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.values
            .iter()
            .map(|v| v.to_i64().filter(|&n| n > 0).map(|n| n as u64))
            .collect()
    }
}

impl FromIterator<Rat> for ImageSet {
    fn from_iter<I: IntoIterator<Item = Rat>>(iter: I) -> Self {
        ImageSet::from_values(iter)
    }
}

/// Serialized as the sorted array of `[num, den]` pairs.
impl Serialize for ImageSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ImageSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values: Vec<Rat> = Deserialize::deserialize(d)?;
        Ok(ImageSet::from_values(values))
    }
}

/// Distinct values of A·x, with the first producing row of each.
pub fn image(a: &FiniteMatrix, x: &[Rat]) -> Result<ImageSet> {
    Ok(ImageSet::from_rows(apply(a, x)?))
}
