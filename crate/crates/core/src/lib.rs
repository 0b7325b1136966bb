//! Exact analysis of finitely generated semigroups of doubly stochastic
//! matrices.
//!
//! The crate tests ε-domesticity, splits matrices into a permutation and a
//! domestic part, predicts limits of infinite products as averagings, and
//! enumerates generated semigroups to inspect the entries they produce.

pub mod convergence;
pub mod domestic;
pub mod error;
pub mod exact;
pub mod explorer;
pub mod factorization;
pub mod float;
pub mod majorization;
pub mod sample;
pub mod union_find;

pub use error::{Error, Result};
pub use exact::{
    averaging, permutation_matrix, DSMatrix, GeneratorSet, Partition, Permutation, Rational,
    SimplexVector, SubsetPair, Word,
};
