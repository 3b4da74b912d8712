//! Exact rational arithmetic, sparse rows, finite matrices and image sets.
//!
//! Everything here is exact: entries are arbitrary-precision rationals in
//! lowest terms and there is no floating point anywhere. Infinite matrices
//! are never materialized; generators in [`crate::matgen`] produce finite
//! truncations of them.

mod image;
mod matrix;
mod rat;

pub use image::{image, ImageSet};
pub use matrix::{apply, is_natural_image, FiniteMatrix, SparseRow};
pub use rat::Rat;
pub(crate) use rat::{bigint_from_json, bigint_to_json};


/// Converts a slice of integers into a vector of rationals.
pub fn rat_vec<T: Into<Rat> + Copy>(xs: &[T]) -> Vec<Rat> {
    xs.iter().map(|&x| x.into()).collect()
}
