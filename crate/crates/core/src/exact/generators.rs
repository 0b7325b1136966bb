use std::fmt;

use super::matrix::DSMatrix;
use crate::error::{Error, Result};

/// Named, nonempty set of equal-size doubly stochastic matrices.
///
/// Entries are kept sorted by name, so generator indices follow name order
/// and index-lexicographic words are name-lexicographic.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    n: usize,
    items: Vec<(String, DSMatrix)>,
}

impl GeneratorSet {
    pub fn new(items: impl IntoIterator<Item = (String, DSMatrix)>) -> Result<Self> {
        let mut items: Vec<(String, DSMatrix)> = items.into_iter().collect();
        let Some(n) = items.first().map(|(_, m)| m.n()) else {
            return Err(Error::InvalidGenerators("no generators".into()));
        };
        if let Some((name, m)) = items.iter().find(|(_, m)| m.n() != n) {
            return Err(Error::InvalidGenerators(format!(
                "{name:?} is {0}x{0}, expected {n}x{n}",
                m.n()
            )));
        }
        items.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = items.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidGenerators(format!(
                "duplicate name {:?}",
                w[0].0
            )));
        }
        Ok(GeneratorSet { n, items })
    }

    /// Names the matrices `g1, g2, ...` (zero-padded so name order is input order).
    pub fn from_matrices(ms: impl IntoIterator<Item = DSMatrix>) -> Result<Self> {
        let ms: Vec<DSMatrix> = ms.into_iter().collect();
        let width = ms.len().to_string().len();
        Self::new(
            ms.into_iter()
                .enumerate()
                .map(|(i, m)| (format!("g{:0width$}", i + 1), m)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DSMatrix)> {
        self.items.iter().map(|(n, m)| (n.as_str(), m))
    }

    pub fn matrices(&self) -> impl Iterator<Item = &DSMatrix> {
        self.items.iter().map(|(_, m)| m)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(n, _)| n.as_str())
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.items[idx].0
    }

    pub fn matrix(&self, idx: usize) -> &DSMatrix {
        &self.items[idx].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.items
            .binary_search_by(|(n, _)| n.as_str().cmp(name))
            .ok()
    }

    pub fn get(&self, name: &str) -> Option<&DSMatrix> {
        self.index_of(name).map(|i| &self.items[i].1)
    }

    /// Subset picked by index.
    pub fn select(&self, idx: &[usize]) -> Result<GeneratorSet> {
        GeneratorSet::new(idx.iter().map(|&i| self.items[i].clone()))
    }

    /// Adds a generator, renaming with a `'` suffix on a name clash.
    pub fn with(&self, name: &str, m: DSMatrix) -> Result<GeneratorSet> {
        let mut name = name.to_string();
        while self.index_of(&name).is_some() {
            name.push('\'');
        }
        let mut items = self.items.clone();
        items.push((name, m));
        GeneratorSet::new(items)
    }
}

impl fmt::Debug for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.items.iter().map(|(n, m)| (n, m)))
            .finish()
    }
}

/// Finite product written as a sequence of generator names.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<String>);

impl Word {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Word(names.into_iter().map(Into::into).collect())
    }

    /// Splits `"a,b,c"`.
    pub fn parse(text: &str) -> Self {
        Word::new(text.split(',').map(str::trim).filter(|s| !s.is_empty()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_indices(gens: &GeneratorSet, idx: &[usize]) -> Self {
        Word(idx.iter().map(|&i| gens.name(i).to_string()).collect())
    }

    pub fn resolve(&self, gens: &GeneratorSet) -> Result<Vec<usize>> {
        self.0
            .iter()
            .map(|n| gens.index_of(n).ok_or_else(|| Error::UnknownGenerator(n.clone())))
            .collect()
    }

    /// Exact product of the letters, left to right.
    pub fn product(&self, gens: &GeneratorSet) -> Result<DSMatrix> {
        let idx = self.resolve(gens)?;
        let (first, rest) = idx.split_first().ok_or(Error::EmptyWord)?;
        Ok(rest
            .iter()
            .fold(gens.matrix(*first).clone(), |acc, &i| acc.mul(gens.matrix(i))))
    }
}
