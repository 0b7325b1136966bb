//! Seeded random instances with small denominators, used by the property
//! tests, the acceptance suite and the `PseudoRandom` schedule's callers.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::exact::{DSMatrix, Permutation, Rational, SimplexVector};

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(rng);
    Permutation::from_map(map).expect("shuffle is a bijection")
}

/// `parts` positive integers summing to `total` (`parts ≤ total`).
pub fn positive_composition<R: Rng + ?Sized>(rng: &mut R, parts: usize, total: u64) -> Vec<u64> {
    assert!(parts >= 1 && parts as u64 <= total);
    let mut cuts: Vec<u64> = rand::seq::index::sample(rng, (total - 1) as usize, parts - 1)
        .into_iter()
        .map(|c| c as u64 + 1)
        .collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// Convex combination of permutation matrices with positive integer weights
/// over `den`, so every entry's denominator divides `den`.
pub fn combination<R: Rng + ?Sized>(
    rng: &mut R,
    perms: &[Permutation],
    den: u64,
) -> DSMatrix {
    let n = perms[0].n();
    let weights = positive_composition(rng, perms.len(), den);
    let mut num = vec![BigInt::zero(); n * n];
    for (p, w) in perms.iter().zip(weights) {
        for j in 0..n {
            num[p.apply(j) * n + j] += w;
        }
    }
    DSMatrix::from_parts(n, BigInt::from(den), num)
}

/// Random doubly stochastic matrix from up to `terms` random permutations.
pub fn random_ds<R: Rng + ?Sized>(rng: &mut R, n: usize, terms: usize, den: u64) -> DSMatrix {
    let terms = terms.clamp(1, den as usize);
    let perms: Vec<Permutation> = (0..terms).map(|_| random_permutation(rng, n)).collect();
    combination(rng, &perms, den)
}

/// Random matrix that keeps at least half of its mass on the diagonal.
pub fn random_lazy_ds<R: Rng + ?Sized>(rng: &mut R, n: usize, terms: usize, den: u64) -> DSMatrix {
    let half = DSMatrix::identity(n);
    let other = random_ds(rng, n, terms, den);
    let lambda = Rational::frac(rng.gen_range(den / 2 + 1..=den) as i64, den as i64);
    mix(&half, &other, &lambda)
}

/// `λ·a + (1−λ)·b`.
pub fn mix(a: &DSMatrix, b: &DSMatrix, lambda: &Rational) -> DSMatrix {
    let mu = Rational::one() - lambda;
    let rows = a
        .rows()
        .into_iter()
        .zip(b.rows())
        .map(|(ra, rb)| {
            ra.iter()
                .zip(&rb)
                .map(|(x, y)| lambda * x + &mu * y)
                .collect()
        })
        .collect();
    DSMatrix::from_rows(rows).expect("convex combination stays doubly stochastic")
}

/// Simplex point with coordinates over `den` (zeros allowed).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize, den: u64) -> SimplexVector {
    let mut cuts: Vec<u64> = (0..n.saturating_sub(1)).map(|_| rng.gen_range(0..=den)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let coords = cuts
        .into_iter()
        .chain(std::iter::once(den))
        .map(|c| {
            let v = Rational::frac((c - prev) as i64, den as i64);
            prev = c;
            v
        })
        .collect();
    SimplexVector::new(coords).expect("composition sums to one")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compositions_are_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let parts = rng.gen_range(1..=6);
            let c = positive_composition(&mut rng, parts, 12);
            assert_eq!(c.len(), parts);
            assert!(c.iter().all(|&x| x >= 1));
            assert_eq!(c.iter().sum::<u64>(), 12);
        }
    }

    #[test]
    fn samples_respect_denominators() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_ds(&mut rng, 4, 3, 12);
            assert!(m.entries().all(|e| (BigInt::from(12) % e.denom()).is_zero()));
            let lazy = random_lazy_ds(&mut rng, 4, 2, 8);
            assert!((0..4).all(|i| lazy.entry(i, i) > Rational::frac(1, 2)));
            random_simplex(&mut rng, 5, 7);
        }
    }
}
