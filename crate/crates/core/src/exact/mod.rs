//! Exact value layer: rationals, doubly stochastic matrices, permutations,
//! partitions and the generator sets everything else consumes.
//!
//! Internally indices are 0-based; every external format is 1-based.

mod generators;
mod matrix;
mod partition;
mod permutation;
mod rational;
pub mod subset;
mod vector;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use generators::{GeneratorSet, Word};
pub use matrix::{ds, DSMatrix};
pub use partition::Partition;
pub use permutation::{all_permutations, Permutation};
pub use rational::{sup_distance, Rational};
pub use subset::SubsetPair;
pub use vector::{simplex, SimplexVector};

use crate::error::Result;

/// Validating constructor from a grid of rationals.
pub fn ds_from_rows(rows: Vec<Vec<Rational>>) -> Result<DSMatrix> {
    DSMatrix::from_rows(rows)
}

pub fn multiply(a: &DSMatrix, b: &DSMatrix) -> Result<DSMatrix> {
    a.multiply(b)
}

/// Averaging over `p`: `1/|P_t|` where row and column share block `P_t`.
pub fn averaging(p: &Partition) -> DSMatrix {
    let n = p.n();
    let den = p
        .blocks()
        .iter()
        .fold(BigInt::one(), |acc, b| acc.lcm(&BigInt::from(b.len())));
    let labels = p.labels();
    let mut num = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                num[i * n + j] = &den / BigInt::from(p.blocks()[labels[i]].len());
            }
        }
    }
    DSMatrix::from_parts(n, den, num)
}

/// `P[i,j] = 1` exactly when `i = P(j)`.
pub fn permutation_matrix(p: &Permutation) -> DSMatrix {
    let n = p.n();
    let mut num = vec![BigInt::zero(); n * n];
    for j in 0..n {
        num[p.apply(j) * n + j] = BigInt::one();
    }
    DSMatrix::from_parts(n, BigInt::one(), num)
}

pub fn canonical_key(m: &DSMatrix) -> Vec<u8> {
    m.canonical_key()
}

/// Support partition: classes of the equivalence closure of `M[i,j] > 0`.
pub fn support_partition<'a>(n: usize, ms: impl IntoIterator<Item = &'a DSMatrix>) -> Partition {
    let mut uf = crate::union_find::UnionFind::new(n);
    for m in ms {
        for i in 0..n {
            for j in 0..n {
                if i != j && m.is_positive_at(i, j) {
                    uf.union(i, j);
                }
            }
        }
    }
    Partition::from_union_find(&mut uf)
}
