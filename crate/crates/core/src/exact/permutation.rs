use std::fmt;

use crate::error::{Error, Result};

/// Element of the symmetric group on `n` points.
///
/// Stored 0-based with `map[j] = P(j)`; the associated matrix has a one at
/// `(P(j), j)` for every column `j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    /// Builds from a 0-based image table.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not a bijection on 1..{n}",
                    map.iter().map(|v| v + 1).collect::<Vec<_>>()
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    /// Builds from a 1-based image table as used by the JSON formats.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation("indices are 1-based".into()));
        }
        Self::from_map(images.iter().map(|v| v - 1).collect())
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Permutation { map }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// Image of `j` (0-based).
    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|v| v + 1).collect()
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n(), "permutation sizes differ");
        Permutation {
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (j, &i) in self.map.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// Image of a subset given as a bitmask.
    pub fn apply_mask(&self, mask: u32) -> u32 {
        let mut out = 0;
        for j in 0..self.n() {
            if mask >> j & 1 == 1 {
                out |= 1 << self.map[j];
            }
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_based())
    }
}

/// Every permutation of `0..n` in lexicographic order of image tables.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { map: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_based(&[1, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 3]).is_err());
        assert!(Permutation::from_one_based(&[]).is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let cycle = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let swap = Permutation::transposition(3, 0, 1);
        // cycle(swap(1)) = cycle(2) = 3
        assert_eq!(cycle.compose(&swap).apply(0), 2);
        assert!(cycle.compose(&cycle.inverse()).is_identity());
    }

    #[test]
    fn enumerates_symmetric_group() {
        assert_eq!(all_permutations(1).len(), 1);
        assert_eq!(all_permutations(4).len(), 24);
        let all = all_permutations(3);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mask_image() {
        let p = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        assert_eq!(p.apply_mask(0b011), 0b101);
    }
}
