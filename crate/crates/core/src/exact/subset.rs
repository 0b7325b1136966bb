use std::fmt;

use crate::error::{Error, Result};

/// Subsets of `0..n` are bitmasks; bit `i` stands for index `i + 1`.
pub type Mask = u32;

/// Largest dimension that fits a [`Mask`].
pub const MAX_MASK_DIM: usize = 31;

pub fn indices(mask: Mask) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn one_based(mask: Mask) -> Vec<usize> {
    indices(mask).into_iter().map(|i| i + 1).collect()
}

pub fn from_indices(idx: &[usize]) -> Mask {
    idx.iter().fold(0, |m, &i| m | 1 << i)
}

/// Pair of distinct, equal-size index sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetPair {
    pub x: Mask,
    pub y: Mask,
}

impl SubsetPair {
    pub fn new(x: Mask, y: Mask) -> Result<Self> {
        if x.count_ones() != y.count_ones() {
            return Err(Error::Input(format!(
                "|X| = {} differs from |Y| = {}",
                x.count_ones(),
                y.count_ones()
            )));
        }
        if x == y {
            return Err(Error::Input("X and Y coincide".into()));
        }
        Ok(SubsetPair { x, y })
    }

    pub fn size(&self) -> usize {
        self.x.count_ones() as usize
    }

    pub fn x_one_based(&self) -> Vec<usize> {
        one_based(self.x)
    }

    pub fn y_one_based(&self) -> Vec<usize> {
        one_based(self.y)
    }
}

impl fmt::Debug for SubsetPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.x_one_based(), self.y_one_based())
    }
}
