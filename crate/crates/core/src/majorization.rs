//! Majorization on the simplex: the descending prefix-sum test, a
//! constructive witness built from T-transforms, and the sandwich bound for
//! chains `p ≻ q ≻ r`.

use crate::error::{Error, Result};
use crate::exact::{permutation_matrix, sup_distance, DSMatrix, Permutation, Rational, SimplexVector};

/// `M` with `M·p = q` exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorizationWitness {
    pub matrix: DSMatrix,
    /// Number of T-transforms used (at most `n − 1`).
    pub steps: usize,
}

/// Indices of `p` in stable descending order of value (ties by index).
pub fn descending_order(p: &SimplexVector) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..p.n()).collect();
    idx.sort_by(|&a, &b| p.coords()[b].cmp(&p.coords()[a]));
    idx
}

pub fn sort_desc(p: &SimplexVector) -> SimplexVector {
    let coords = descending_order(p)
        .into_iter()
        .map(|i| p.coords()[i].clone())
        .collect();
    SimplexVector::new_unchecked(coords)
}

fn check_dims(p: &SimplexVector, q: &SimplexVector) -> Result<()> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            left: p.n(),
            right: q.n(),
        });
    }
    Ok(())
}

/// Prefix sums of the descending rearrangement of `p` dominate those of `q`.
pub fn majorizes(p: &SimplexVector, q: &SimplexVector) -> Result<bool> {
    check_dims(p, q)?;
    let (ps, qs) = (sort_desc(p), sort_desc(q));
    let mut sp = Rational::zero();
    let mut sq = Rational::zero();
    for (a, b) in ps.coords().iter().zip(qs.coords()) {
        sp = sp + a;
        sq = sq + b;
        if sp < sq {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `λ·I + (1−λ)·(j k)`.
fn t_transform(n: usize, j: usize, k: usize, lambda: &Rational) -> DSMatrix {
    let mu = Rational::one() - lambda;
    let rows = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    if r == c && (r == j || r == k) {
                        lambda.clone()
                    } else if r == c {
                        Rational::one()
                    } else if (r == j && c == k) || (r == k && c == j) {
                        mu.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    DSMatrix::from_rows(rows).expect("T-transform is doubly stochastic")
}

/// Doubly stochastic `M` with `M·p = q`, built in the sorted frame.
///
/// Each step picks the largest `j` with `x_j > y_j` and the first `k > j`
/// with `x_k < y_k`, then moves `δ = min(x_j − y_j, y_k − x_k)` from `j` to
/// `k`. Every step settles one coordinate, so at most `n − 1` steps run. The
/// sorted-frame product is conjugated back by the two sorting permutations.
pub fn majorization_witness(p: &SimplexVector, q: &SimplexVector) -> Result<MajorizationWitness> {
    if !majorizes(p, q)? {
        return Err(Error::NotMajorized);
    }
    let n = p.n();
    let order_p = descending_order(p);
    let order_q = descending_order(q);
    let mut x: Vec<Rational> = order_p.iter().map(|&i| p.coords()[i].clone()).collect();
    let y: Vec<Rational> = order_q.iter().map(|&i| q.coords()[i].clone()).collect();

    let mut t = DSMatrix::identity(n);
    let mut steps = 0;
    while let Some(j) = (0..n).rev().find(|&j| x[j] > y[j]) {
        let k = (j + 1..n)
            .find(|&k| x[k] < y[k])
            .ok_or_else(|| Error::Internal("no receiving coordinate in T-transform".into()))?;
        let delta = (&x[j] - &y[j]).min(&y[k] - &x[k]);
        let lambda = Rational::one() - &delta / &(&x[j] - &x[k]);
        x[j] = &x[j] - &delta;
        x[k] = &x[k] + &delta;
        t = t_transform(n, j, k, &lambda).mul(&t);
        steps += 1;
    }
    debug_assert!(steps < n.max(1));

    // p↓ = S⁻¹ p with S(k) = order_p[k]; q = R q↓ with R(k) = order_q[k].
    let sort_p = Permutation::from_map(order_p).expect("order is a permutation");
    let sort_q = Permutation::from_map(order_q).expect("order is a permutation");
    let matrix = permutation_matrix(&sort_q)
        .mul(&t)
        .mul(&permutation_matrix(&sort_p.inverse()));
    Ok(MajorizationWitness { matrix, steps })
}

/// Outcome of the sandwich inequality `|p↓−q↓|∞ ≤ 2n·|p↓−r↓|∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichBound {
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

pub fn sorted_distance(p: &SimplexVector, q: &SimplexVector) -> Rational {
    sup_distance(sort_desc(p).coords(), sort_desc(q).coords())
}

pub fn sandwich_bound_check(
    p: &SimplexVector,
    q: &SimplexVector,
    r: &SimplexVector,
) -> Result<SandwichBound> {
    check_dims(p, q)?;
    check_dims(q, r)?;
    if !majorizes(p, q)? || !majorizes(q, r)? {
        return Err(Error::ChainNotMajorized);
    }
    let lhs = sorted_distance(p, q);
    let rhs = Rational::from(2 * p.n() as i64) * sorted_distance(p, r);
    let holds = lhs <= rhs;
    Ok(SandwichBound { lhs, rhs, holds })
}
