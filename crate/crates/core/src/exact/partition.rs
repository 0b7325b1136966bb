use std::fmt;

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// Set partition of `0..n` in canonical form: blocks ordered by their
/// smallest element, members ascending. Canonical form makes derived
/// equality and ordering coincide with equality of partitions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes 0-based blocks covering `0..n`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("empty ground set".into()));
        }
        let mut seen = vec![false; n];
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {} outside 1..{n}",
                        i + 1
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!(
                        "index {} appears twice",
                        i + 1
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {} missing", i + 1)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { n, blocks })
    }

    /// Parses 1-based blocks; the ground set size is the total member count.
    pub fn from_one_based(blocks: &[Vec<usize>]) -> Result<Self> {
        let n = blocks.iter().map(Vec::len).sum();
        let mut zero = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut out = Vec::with_capacity(b.len());
            for &i in b {
                if i == 0 {
                    return Err(Error::InvalidPartition("indices are 1-based".into()));
                }
                out.push(i - 1);
            }
            zero.push(out);
        }
        Self::new(n, zero)
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// `members` as one block, everything else singletons.
    pub fn single_block(n: usize, members: &[usize]) -> Result<Self> {
        let mut blocks = vec![members.to_vec()];
        blocks.extend((0..n).filter(|i| !members.contains(i)).map(|i| vec![i]));
        Self::new(n, blocks)
    }

    pub fn from_union_find(uf: &mut UnionFind) -> Self {
        let blocks = uf.classes();
        let n = blocks.iter().map(Vec::len).sum();
        Partition { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn one_based(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|i| i + 1).collect())
            .collect()
    }

    /// Block index of every point.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (t, b) in self.blocks.iter().enumerate() {
            for &i in b {
                out[i] = t;
            }
        }
        out
    }

    /// Finest common coarsening.
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.n, other.n, "partition sizes differ");
        let mut uf = UnionFind::new(self.n);
        for b in self.blocks.iter().chain(&other.blocks) {
            for w in b.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        Partition::from_union_find(&mut uf)
    }

    /// True when every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let labels = other.labels();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| labels[i] == labels[b[0]]))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            let items: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}
