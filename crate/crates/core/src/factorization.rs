//! Splitting a doubly stochastic matrix into a permutation and a domestic
//! part (`M = P·M′`), and Birkhoff decomposition into permutation matrices.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::domestic::{self, ORACLE_DIM_LIMIT};
use crate::error::{Error, Result};
use crate::exact::subset::{Mask, SubsetPair};
use crate::exact::{permutation_matrix, DSMatrix, Permutation, Rational};
use crate::union_find::UnionFind;

/// Pairs `(X, Y)`, `X ≠ Y`, whose block sum is exactly `|X|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightPairSet {
    /// Sorted by `X` bitmask, then `Y` bitmask.
    pub pairs: Vec<SubsetPair>,
}

/// Exhaustive search for tight pairs. Exponential; kept as an oracle.
pub fn tight_pairs(m: &DSMatrix) -> Result<TightPairSet> {
    let n = m.n();
    if n > ORACLE_DIM_LIMIT {
        return Err(Error::DimensionTooLarge {
            n,
            limit: ORACLE_DIM_LIMIT,
        });
    }
    let mut pairs = Vec::new();
    for x in 1..(1 as Mask) << n {
        let k = Rational::from(x.count_ones() as i64);
        for y in 1..(1 as Mask) << n {
            if x != y
                && x.count_ones() == y.count_ones()
                && domestic::block_sum(m, x, y) == k
            {
                pairs.push(SubsetPair { x, y });
            }
        }
    }
    Ok(TightPairSet { pairs })
}

/// Connected component of the bipartite support graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Component {
    pub fn rows_one_based(&self) -> Vec<usize> {
        self.rows.iter().map(|i| i + 1).collect()
    }

    pub fn cols_one_based(&self) -> Vec<usize> {
        self.cols.iter().map(|i| i + 1).collect()
    }
}

/// Components of the graph joining row `i` to column `j` when `M[i,j] > 0`,
/// ordered by smallest row. Each has as many rows as columns.
pub fn support_components(m: &DSMatrix) -> Vec<Component> {
    let n = m.n();
    let mut uf = UnionFind::new(2 * n);
    for i in 0..n {
        for j in 0..n {
            if m.is_positive_at(i, j) {
                uf.union(i, n + j);
            }
        }
    }
    uf.classes()
        .into_iter()
        .filter(|c| c[0] < n)
        .map(|c| {
            let (rows, cols): (Vec<usize>, Vec<usize>) = c.into_iter().partition(|&v| v < n);
            Component {
                rows,
                cols: cols.into_iter().map(|v| v - n).collect(),
            }
        })
        .collect()
}

/// `M = P·M′` with `M′` domestic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationFactorization {
    pub p: Permutation,
    pub m_prime: DSMatrix,
    /// `min(1/(2n), 1 − margin(M′))`; `None` when not requested.
    pub eps: Option<Rational>,
}

/// Permutation sending each component's columns onto its rows in ascending
/// order, and the rewritten `M′ = P⁻¹·M`.
pub fn permutation_part(m: &DSMatrix) -> Result<(Permutation, DSMatrix)> {
    let n = m.n();
    let mut map = vec![usize::MAX; n];
    for c in support_components(m) {
        if c.rows.len() != c.cols.len() {
            return Err(Error::Internal(format!(
                "support component with {} rows and {} columns",
                c.rows.len(),
                c.cols.len()
            )));
        }
        for (&col, &row) in c.cols.iter().zip(&c.rows) {
            map[col] = row;
        }
    }
    let p = Permutation::from_map(map)?;
    let m_prime = m.unpermute_rows(&p);
    Ok((p, m_prime))
}

pub fn factor_permutation(m: &DSMatrix) -> Result<PermutationFactorization> {
    factor_permutation_opts(m, true)
}

/// With `with_eps = false` only the support structure is needed, so any
/// dimension works.
pub fn factor_permutation_opts(m: &DSMatrix, with_eps: bool) -> Result<PermutationFactorization> {
    let (p, m_prime) = permutation_part(m)?;
    let eps = if with_eps {
        let report = domestic::domesticity_margin(&m_prime)?;
        Some(report.domestic_for_eps(m.n()).ok_or_else(|| {
            Error::Internal("rewritten factor still has a tight off-diagonal pair".into())
        })?)
    } else {
        None
    };
    Ok(PermutationFactorization { p, m_prime, eps })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirkhoffDecomposition {
    /// Positive coefficients summing to one, in extraction order.
    pub terms: Vec<(Rational, Permutation)>,
}

impl BirkhoffDecomposition {
    pub fn reconstruct(&self) -> Result<DSMatrix> {
        let n = self.terms.first().ok_or(Error::Empty)?.1.n();
        let mut acc = vec![vec![Rational::zero(); n]; n];
        for (c, p) in &self.terms {
            for j in 0..n {
                let i = p.apply(j);
                acc[i][j] = &acc[i][j] + c;
            }
        }
        DSMatrix::from_rows(acc)
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.terms.iter().map(|(c, _)| c).sum()
    }
}

/// Augmenting-path (Kuhn) matching on the positive entries of `w`.
/// Rows are matched in order; a free column is taken before any reassignment,
/// columns in ascending order.
fn perfect_matching(n: usize, w: &[BigInt]) -> Option<Vec<usize>> {
    fn augment(
        i: usize,
        n: usize,
        w: &[BigInt],
        seen: &mut [bool],
        col_match: &mut [usize],
    ) -> bool {
        if let Some(j) = (0..n).find(|&j| col_match[j] == usize::MAX && !w[i * n + j].is_zero()) {
            col_match[j] = i;
            return true;
        }
        for j in 0..n {
            if w[i * n + j].is_zero() || seen[j] {
                continue;
            }
            seen[j] = true;
            if augment(col_match[j], n, w, seen, col_match) {
                col_match[j] = i;
                return true;
            }
        }
        false
    }

    let mut col_match = vec![usize::MAX; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, n, w, &mut seen, &mut col_match) {
            return None;
        }
    }
    Some(col_match)
}

/// Greedy extraction: match the support, peel off the smallest matched
/// weight, repeat. Each round zeroes at least one entry.
pub fn birkhoff_decompose(m: &DSMatrix) -> Result<BirkhoffDecomposition> {
    let n = m.n();
    let den = m.denominator().clone();
    let mut w: Vec<BigInt> = m.numerators().to_vec();
    let mut terms = Vec::new();
    while w.iter().any(|x| !x.is_zero()) {
        let col_match = perfect_matching(n, &w).ok_or_else(|| {
            Error::Internal("support of a doubly stochastic remainder has no perfect matching".into())
        })?;
        let lambda = (0..n)
            .map(|j| &w[col_match[j] * n + j])
            .min()
            .expect("n ≥ 1")
            .clone();
        for (j, &i) in col_match.iter().enumerate() {
            w[i * n + j] -= &lambda;
        }
        let coeff = Rational::new(lambda, den.clone())?;
        terms.push((coeff, Permutation::from_map(col_match)?));
    }
    Ok(BirkhoffDecomposition { terms })
}

/// `P·M′` recomputed, for round-trip checks.
pub fn recompose(f: &PermutationFactorization) -> DSMatrix {
    permutation_matrix(&f.p).mul(&f.m_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{averaging, Partition};
    use crate::exact::subset;
    use crate::sample;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn swap(n: usize) -> Permutation {
        Permutation::transposition(n, 0, 1)
    }

    fn swap_a13() -> DSMatrix {
        let a13 = averaging(&Partition::single_block(3, &[0, 2]).unwrap());
        permutation_matrix(&swap(3)).mul(&a13)
    }

    fn pairs(v: &[(&[usize], &[usize])]) -> Vec<SubsetPair> {
        let m = |s: &[usize]| subset::from_indices(&s.iter().map(|i| i - 1).collect::<Vec<_>>());
        v.iter().map(|(x, y)| SubsetPair { x: m(x), y: m(y) }).collect()
    }

    #[test]
    fn tight_pair_examples() {
        assert!(tight_pairs(&DSMatrix::identity(2)).unwrap().pairs.is_empty());
        assert_eq!(
            tight_pairs(&permutation_matrix(&swap(2))).unwrap().pairs,
            pairs(&[(&[1], &[2]), (&[2], &[1])])
        );
        assert_eq!(
            tight_pairs(&swap_a13()).unwrap().pairs,
            pairs(&[(&[1], &[2]), (&[2, 3], &[1, 3])])
        );
    }

    #[test]
    fn component_examples() {
        let comps = support_components(&DSMatrix::identity(3));
        assert_eq!(
            comps,
            (0..3).map(|i| Component { rows: vec![i], cols: vec![i] }).collect::<Vec<_>>()
        );
        assert_eq!(
            support_components(&DSMatrix::uniform(3)),
            vec![Component { rows: vec![0, 1, 2], cols: vec![0, 1, 2] }]
        );
        let comps = support_components(&swap_a13());
        assert_eq!(
            comps,
            vec![
                Component { rows: vec![0], cols: vec![1] },
                Component { rows: vec![1, 2], cols: vec![0, 2] },
            ]
        );
    }

    #[test]
    fn factor_examples() {
        let f = factor_permutation(&DSMatrix::identity(3)).unwrap();
        assert!(f.p.is_identity());
        assert_eq!(f.m_prime, DSMatrix::identity(3));
        assert_eq!(f.eps, Some(Rational::frac(1, 6)));

        let f = factor_permutation(&permutation_matrix(&swap(2))).unwrap();
        assert_eq!(f.p, swap(2));
        assert_eq!(f.m_prime, DSMatrix::identity(2));
        assert_eq!(f.eps, Some(Rational::frac(1, 4)));

        let f = factor_permutation(&swap_a13()).unwrap();
        assert_eq!(f.p, swap(3));
        assert_eq!(f.m_prime, averaging(&Partition::single_block(3, &[0, 2]).unwrap()));
        assert_eq!(f.eps, Some(Rational::frac(1, 6)));
    }

    #[test]
    fn factor_without_eps_skips_margin() {
        let big = permutation_matrix(&Permutation::from_map((0..20).rev().collect()).unwrap());
        assert!(matches!(
            factor_permutation(&big),
            Err(Error::DimensionTooLarge { .. })
        ));
        let f = factor_permutation_opts(&big, false).unwrap();
        assert!(f.m_prime.is_identity());
        assert_eq!(f.eps, None);
        assert_eq!(recompose(&f), big);
    }

    #[test]
    fn birkhoff_examples() {
        let cyc = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let d = birkhoff_decompose(&permutation_matrix(&cyc)).unwrap();
        assert_eq!(d.terms, vec![(Rational::one(), cyc)]);

        let d = birkhoff_decompose(&DSMatrix::uniform(2)).unwrap();
        assert_eq!(
            d.terms,
            vec![
                (Rational::frac(1, 2), Permutation::identity(2)),
                (Rational::frac(1, 2), swap(2)),
            ]
        );

        let a12 = averaging(&Partition::single_block(3, &[0, 1]).unwrap());
        let d = birkhoff_decompose(&a12).unwrap();
        assert_eq!(
            d.terms,
            vec![
                (Rational::frac(1, 2), Permutation::identity(3)),
                (Rational::frac(1, 2), swap(3)),
            ]
        );
    }

    /// Every union of components, as pairs with `X ≠ Y`.
    fn pairs_from_components(comps: &[Component]) -> BTreeSet<(Mask, Mask)> {
        let mut out = BTreeSet::new();
        for pick in 1u32..1 << comps.len() {
            let (mut x, mut y) = (0, 0);
            for (t, c) in comps.iter().enumerate() {
                if pick >> t & 1 == 1 {
                    x |= subset::from_indices(&c.rows);
                    y |= subset::from_indices(&c.cols);
                }
            }
            if x != y {
                out.insert((x, y));
            }
        }
        out
    }

    #[test]
    fn components_generate_tight_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            // sparse mixtures produce several components
            let terms = rng.gen_range(1..=3);
            let m = sample::random_ds(&mut rng, n, terms, 6);
            let oracle: BTreeSet<(Mask, Mask)> = tight_pairs(&m)
                .unwrap()
                .pairs
                .into_iter()
                .map(|p| (p.x, p.y))
                .collect();
            assert_eq!(pairs_from_components(&support_components(&m)), oracle, "{m:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn factorization_round_trips(seed in any::<u64>(), n in 1usize..8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = sample::random_permutation(&mut rng, n);
            let inner = sample::random_ds(&mut rng, n, 2, 6);
            let m = permutation_matrix(&q).mul(&inner);
            let f = factor_permutation(&m).unwrap();
            prop_assert_eq!(recompose(&f), m);
            let eps = f.eps.clone().unwrap();
            prop_assert!(domestic::is_domestic(&f.m_prime, &eps).unwrap().domestic);
            // every support component of M′ is diagonal
            for c in support_components(&f.m_prime) {
                prop_assert_eq!(c.rows, c.cols);
            }
        }

        #[test]
        fn factor_commutes_with_left_permutation(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sample::random_ds(&mut rng, n, 2, 4);
            let q = sample::random_permutation(&mut rng, n);
            let comps = support_components(&m);
            // the ascending pairing is only equivariant when q keeps row order inside components
            let monotone = comps.iter().all(|c| c.rows.windows(2).all(|w| q.apply(w[0]) < q.apply(w[1])));
            prop_assume!(monotone);
            let base = factor_permutation_opts(&m, false).unwrap();
            let moved = factor_permutation_opts(&permutation_matrix(&q).mul(&m), false).unwrap();
            prop_assert_eq!(moved.p, q.compose(&base.p));
        }

        #[test]
        fn birkhoff_is_exact_and_short(seed in any::<u64>(), n in 1usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let terms = rng.gen_range(1..=6);
            let m = sample::random_ds(&mut rng, n, terms, 24);
            let d = birkhoff_decompose(&m).unwrap();
            prop_assert_eq!(d.reconstruct().unwrap(), m.clone());
            prop_assert!(d.coefficient_sum().is_one());
            prop_assert!(d.terms.len() <= n * n + 2 - 2 * n);
            for (c, p) in &d.terms {
                prop_assert!(c.is_positive());
                prop_assert!((0..n).all(|j| m.is_positive_at(p.apply(j), j)));
            }
        }
    }
}
