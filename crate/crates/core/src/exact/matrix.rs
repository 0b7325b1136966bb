use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::permutation::Permutation;
use super::rational::Rational;
use super::vector::SimplexVector;
use crate::error::{Error, Result};
use crate::float::FloatMatrix;

/// Exact `n×n` doubly stochastic matrix.
///
/// Entries are held over one common positive denominator, reduced so that
/// the denominator and all numerators are jointly coprime. That form is
/// unique per matrix value, so the derived `Eq`/`Hash` are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DSMatrix {
    n: usize,
    den: BigInt,
    num: Vec<BigInt>,
}

impl DSMatrix {
    /// Validates a square grid of rationals.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row: i + 1,
                    len: r.len(),
                    n,
                });
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if let Some(j) = r.iter().position(Rational::is_negative) {
                return Err(Error::NegativeEntry { row: i + 1, col: j + 1 });
            }
        }
        for (i, r) in rows.iter().enumerate() {
            let sum: Rational = r.iter().sum();
            if !sum.is_one() {
                return Err(Error::RowSumNotOne {
                    row: i + 1,
                    sum: sum.to_string(),
                });
            }
        }
        for j in 0..n {
            let sum: Rational = rows.iter().map(|r| &r[j]).sum();
            if !sum.is_one() {
                return Err(Error::ColSumNotOne {
                    col: j + 1,
                    sum: sum.to_string(),
                });
            }
        }
        let den = rows
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let num = rows
            .iter()
            .flatten()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        Ok(DSMatrix { n, den, num })
    }

    /// Trusted constructor for values produced by closed operations.
    pub(crate) fn from_parts(n: usize, den: BigInt, num: Vec<BigInt>) -> Self {
        let mut m = DSMatrix { n, den, num };
        m.reduce();
        debug_assert!(m.check_sums(), "not doubly stochastic: {m:?}");
        m
    }

    fn reduce(&mut self) {
        let mut g = self.den.clone();
        for x in &self.num {
            if g.is_one() {
                return;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for x in &mut self.num {
                *x /= &g;
            }
        }
    }

    fn check_sums(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).map(|j| &self.num[i * n + j]).sum::<BigInt>() == self.den
                && (0..n).map(|j| &self.num[j * n + i]).sum::<BigInt>() == self.den
        }) && self.num.iter().all(|x| !x.is_negative())
    }

    pub fn identity(n: usize) -> Self {
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            num[i * n + i] = BigInt::one();
        }
        DSMatrix {
            n,
            den: BigInt::one(),
            num,
        }
    }

    /// Uniform `1/n` matrix.
    pub fn uniform(n: usize) -> Self {
        DSMatrix {
            n,
            den: BigInt::from(n),
            num: vec![BigInt::one(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Common denominator of the reduced representation.
    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Row-major numerators over [`Self::denominator`].
    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn numerator(&self, i: usize, j: usize) -> &BigInt {
        &self.num[i * self.n + j]
    }

    /// Entry at 0-based `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.num[i * self.n + j].clone(), self.den.clone())
            .expect("positive denominator")
    }

    pub fn is_positive_at(&self, i: usize, j: usize) -> bool {
        !self.num[i * self.n + j].is_zero()
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    /// Every entry, row-major.
    pub fn entries(&self) -> impl Iterator<Item = Rational> + '_ {
        self.num
            .iter()
            .map(|x| Rational::new(x.clone(), self.den.clone()).expect("positive denominator"))
    }

    pub fn multiply(&self, rhs: &DSMatrix) -> Result<DSMatrix> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    /// Product of equal-size matrices; panics on a size mismatch.
    pub fn mul(&self, rhs: &DSMatrix) -> DSMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        self.mul_unchecked(rhs)
    }

    fn mul_unchecked(&self, rhs: &DSMatrix) -> DSMatrix {
        let n = self.n;
        let mut num = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.num[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.num[k * n + j];
                    if !b.is_zero() {
                        num[i * n + j] += a * b;
                    }
                }
            }
        }
        DSMatrix::from_parts(n, &self.den * &rhs.den, num)
    }

    pub fn transpose(&self) -> DSMatrix {
        let n = self.n;
        let mut num = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                num.push(self.num[j * n + i].clone());
            }
        }
        DSMatrix {
            n,
            den: self.den.clone(),
            num,
        }
    }

    fn remap(&self, f: impl Fn(usize, usize) -> (usize, usize)) -> DSMatrix {
        let n = self.n;
        let mut num = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = f(i, j);
                num.push(self.num[a * n + b].clone());
            }
        }
        DSMatrix {
            n,
            den: self.den.clone(),
            num,
        }
    }

    /// `P⁻¹ · self · P`, entrywise `M[P i, P j]`.
    pub fn conjugate(&self, p: &Permutation) -> DSMatrix {
        self.remap(|i, j| (p.apply(i), p.apply(j)))
    }

    /// `P · self`, entrywise `M[P⁻¹ i, j]`.
    pub fn permute_rows(&self, p: &Permutation) -> DSMatrix {
        let inv = p.inverse();
        self.remap(|i, j| (inv.apply(i), j))
    }

    /// `P⁻¹ · self`, entrywise `M[P i, j]`.
    pub fn unpermute_rows(&self, p: &Permutation) -> DSMatrix {
        self.remap(|i, j| (p.apply(i), j))
    }

    /// `M · p`.
    pub fn apply(&self, p: &SimplexVector) -> Result<SimplexVector> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        let coords = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.entry(i, j) * &p.coords()[j]).sum())
            .collect();
        Ok(SimplexVector::new_unchecked(coords))
    }

    pub fn is_identity(&self) -> bool {
        self.den.is_one()
            && (0..self.n).all(|i| {
                (0..self.n).all(|j| self.num[i * self.n + j] == BigInt::from((i == j) as u8))
            })
    }

    /// Recovers the permutation when this is a 0/1 matrix.
    pub fn as_permutation(&self) -> Option<Permutation> {
        if !self.den.is_one() {
            return None;
        }
        let n = self.n;
        let map = (0..n)
            .map(|j| (0..n).find(|&i| self.num[i * n + j].is_one()))
            .collect::<Option<Vec<_>>>()?;
        Permutation::from_map(map).ok()
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    /// Injective byte encoding of the matrix value.
    ///
    /// Layout: `n` (u32 LE), then the common denominator and each numerator
    /// row-major, every integer as a u32 length prefix followed by its
    /// two's-complement little-endian bytes.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 5 * (self.n * self.n + 1));
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for x in std::iter::once(&self.den).chain(&self.num) {
            let bytes = x.to_signed_bytes_le();
            out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }

    pub fn to_float(&self) -> FloatMatrix {
        FloatMatrix::from_fn(self.n, |i, j| self.entry(i, j).to_f64())
    }
}

impl fmt::Debug for DSMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .rows()
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        write!(f, "DSMatrix{rows:?}")
    }
}

/// Shorthand for tests and fixtures: rows of `(num, den)` pairs.
pub fn ds(rows: &[&[(i64, i64)]]) -> DSMatrix {
    DSMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&(a, b)| Rational::frac(a, b)).collect())
            .collect(),
    )
    .expect("fixture is doubly stochastic")
}
