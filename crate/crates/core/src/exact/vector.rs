use super::rational::Rational;
use crate::error::{Error, Result};

/// Point of the standard simplex: coordinates in `[0, 1]` summing to 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SimplexVector {
    coords: Vec<Rational>,
}

impl SimplexVector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidVector("no coordinates".into()));
        }
        let one = Rational::one();
        if let Some(i) = coords.iter().position(|c| c.is_negative() || *c > one) {
            return Err(Error::InvalidVector(format!(
                "coordinate {} = {} is outside [0, 1]",
                i + 1,
                coords[i]
            )));
        }
        let sum: Rational = coords.iter().sum();
        if !sum.is_one() {
            return Err(Error::InvalidVector(format!(
                "coordinates sum to {sum}, expected 1"
            )));
        }
        Ok(SimplexVector { coords })
    }

    pub(crate) fn new_unchecked(coords: Vec<Rational>) -> Self {
        SimplexVector { coords }
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = vec![Rational::zero(); n];
        coords[i] = Rational::one();
        SimplexVector { coords }
    }

    pub fn uniform(n: usize) -> Self {
        SimplexVector {
            coords: vec![Rational::frac(1, n as i64); n],
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// Standard inner product with another vector.
    pub fn dot(&self, other: &SimplexVector) -> Rational {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Parses `["1/2", "1/2"]`-style coordinates.
pub fn simplex(coords: &[&str]) -> SimplexVector {
    SimplexVector::new(coords.iter().map(|s| s.parse().expect("rational")).collect())
        .expect("fixture is a simplex vector")
}
