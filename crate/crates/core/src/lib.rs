//! Computational workbench for image partition regular matrices.
//!
//! The crate materializes the matrix families around the Finite Sums and
//! Milliken–Taylor systems, base `p` and base `-p` digit machinery, a set of
//! explicit separating colourings, and an exact backtracking search engine
//! that looks for monochromatic images, forcing bounds, image domination and
//! translated Milliken–Taylor witnesses at desk scale.

pub mod cli;
pub mod colourings;
pub mod digits;
pub mod error;
pub mod matgen;
pub mod ratcore;
pub mod search;
pub mod seqs;

pub use error::{Error, Result};
