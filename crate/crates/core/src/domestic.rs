//! ε-domesticity.
//!
//! The domesticity margin of `M` is the largest normalized block sum
//! `(1/|X|)·Σ_{i∈X, j∈Y} M[i,j]` over index sets `X ≠ Y` of equal size; `M`
//! is ε-domestic exactly when the margin is at most `1 − ε`.
//!
//! [`domesticity_margin`] walks every `X` in Gray-code order, updating the
//! row-block sums `r_X[j] = Σ_{i∈X} M[i,j]` with one row per step. The best
//! `Y` for a given `X` is a top-`|X|` set of `r_X`; when the only top set is
//! `X` itself, the best admissible `Y` swaps the smallest selected coordinate
//! for the largest unselected one. The brute-force [`margin_brute_force`]
//! enumerates all pairs and is kept as the oracle.
//!
//! Witnesses are canonical: among maximizing pairs the smallest `X` bitmask
//! wins, then the smallest `Y` bitmask. Both routes agree on the witness.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::subset::{self, Mask, SubsetPair};
use crate::exact::{sup_distance, DSMatrix, Rational, SimplexVector};
use crate::majorization::sorted_distance;

pub const DEFAULT_DIM_LIMIT: usize = 14;
pub const ORACLE_DIM_LIMIT: usize = 8;

/// Gray-code positions handled per parallel task.
const CHUNK: u64 = 1 << 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginReport {
    pub margin: Rational,
    /// `None` only for `n = 1`, where no admissible pair exists.
    pub witness: Option<SubsetPair>,
}

impl MarginReport {
    /// Largest ε in `(0, 1/(2n)]` for which the matrix is ε-domestic.
    pub fn domestic_for_eps(&self, n: usize) -> Option<Rational> {
        let cap = Rational::frac(1, 2 * n as i64);
        let slack = Rational::one() - &self.margin;
        if !slack.is_positive() {
            return None;
        }
        Some(cap.min(slack))
    }
}

/// Block sum numerator over the matrix denominator, with `k = |X|`.
#[derive(Clone, Debug)]
struct Candidate {
    sum: BigInt,
    k: u32,
    x: Mask,
    y: Mask,
}

impl Candidate {
    /// Greater is better: higher `sum/k`, then smaller `X`, then smaller `Y`.
    fn rank(&self, other: &Candidate) -> Ordering {
        let lhs = &self.sum * BigInt::from(other.k);
        let rhs = &other.sum * BigInt::from(self.k);
        lhs.cmp(&rhs)
            .then_with(|| other.x.cmp(&self.x))
            .then_with(|| other.y.cmp(&self.y))
    }

    fn better(self, other: Candidate) -> Candidate {
        if other.rank(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    fn into_report(self, m: &DSMatrix) -> MarginReport {
        let margin = Rational::new(self.sum, m.denominator() * BigInt::from(self.k))
            .expect("positive denominator");
        MarginReport {
            margin,
            witness: Some(SubsetPair { x: self.x, y: self.y }),
        }
    }
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(subset::MAX_MASK_DIM);
    if n > limit {
        return Err(Error::DimensionTooLarge { n, limit });
    }
    Ok(())
}

fn trivial(n: usize) -> Option<MarginReport> {
    (n == 1).then(|| MarginReport {
        margin: Rational::zero(),
        witness: None,
    })
}

/// Best admissible `Y` for one `X`, given its row-block sums.
fn best_for(x: Mask, k: usize, r: &[BigInt]) -> Candidate {
    let n = r.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(a.cmp(&b)));
    let t = &r[order[k - 1]];
    let greater: Vec<usize> = order.iter().copied().take_while(|&j| &r[j] > t).collect();
    let tied: Vec<usize> = (0..n).filter(|&j| &r[j] == t).collect();
    let m = k - greater.len();
    let top_sum: BigInt = greater.iter().map(|&j| &r[j]).sum::<BigInt>() + t * BigInt::from(m);
    let base = subset::from_indices(&greater);
    let lowest = base | subset::from_indices(&tied[..m]);

    if lowest != x {
        return Candidate { sum: top_sum, k: k as u32, x, y: lowest };
    }
    if tied.len() > m {
        // colex successor among the m-subsets of the tied block
        let y = base | subset::from_indices(&tied[..m - 1]) | 1 << tied[m];
        return Candidate { sum: top_sum, k: k as u32, x, y };
    }
    // X is the unique top set: trade its smallest coordinate for the best outsider.
    let drop = *tied.last().expect("tied block is nonempty");
    let (add, best_out) = (0..n)
        .filter(|&j| x >> j & 1 == 0)
        .map(|j| (j, &r[j]))
        .fold(None::<(usize, &BigInt)>, |acc, (j, v)| match acc {
            Some((_, bv)) if bv >= v => acc,
            _ => Some((j, v)),
        })
        .expect("X is a proper subset");
    Candidate {
        sum: top_sum - t + best_out,
        k: k as u32,
        x,
        y: (x & !(1 << drop)) | 1 << add,
    }
}

fn gray(g: u64) -> Mask {
    (g ^ (g >> 1)) as Mask
}

/// Scans Gray-code positions `start..end`.
fn scan_range(m: &DSMatrix, start: u64, end: u64) -> Option<Candidate> {
    let n = m.n();
    let full: Mask = if n == 32 { Mask::MAX } else { (1 << n) - 1 };
    let mut x = gray(start);
    let mut r: Vec<BigInt> = (0..n)
        .map(|j| {
            subset::indices(x)
                .into_iter()
                .map(|i| m.numerator(i, j))
                .sum()
        })
        .collect();
    let mut best: Option<Candidate> = None;
    for g in start..end {
        if g > start {
            let next = gray(g);
            let row = (x ^ next).trailing_zeros() as usize;
            let adding = next >> row & 1 == 1;
            for (j, rj) in r.iter_mut().enumerate() {
                let v = m.numerator(row, j);
                if adding {
                    *rj += v;
                } else {
                    *rj -= v;
                }
            }
            x = next;
        }
        if x == 0 || x == full {
            continue;
        }
        let c = best_for(x, x.count_ones() as usize, &r);
        best = Some(match best {
            Some(b) => b.better(c),
            None => c,
        });
    }
    best
}

/// Exact domesticity margin with the default dimension cap.
pub fn domesticity_margin(m: &DSMatrix) -> Result<MarginReport> {
    domesticity_margin_with_limit(m, DEFAULT_DIM_LIMIT)
}

pub fn domesticity_margin_with_limit(m: &DSMatrix, limit: usize) -> Result<MarginReport> {
    let n = m.n();
    check_limit(n, limit)?;
    if let Some(r) = trivial(n) {
        return Ok(r);
    }
    let total = 1u64 << n;
    let chunks = total.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .filter_map(|c| scan_range(m, c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .reduce_with(Candidate::better)
        .ok_or_else(|| Error::Internal("no admissible subset pair".into()))?;
    Ok(best.into_report(m))
}

/// Naive enumeration of every admissible pair; the oracle for the fast path.
pub fn margin_brute_force(m: &DSMatrix) -> Result<MarginReport> {
    let n = m.n();
    check_limit(n, ORACLE_DIM_LIMIT)?;
    if let Some(r) = trivial(n) {
        return Ok(r);
    }
    let mut best: Option<Candidate> = None;
    for x in 1..(1 as Mask) << n {
        for y in 1..(1 as Mask) << n {
            if x == y || x.count_ones() != y.count_ones() {
                continue;
            }
            let sum: BigInt = subset::indices(x)
                .into_iter()
                .flat_map(|i| subset::indices(y).into_iter().map(move |j| (i, j)))
                .map(|(i, j)| m.numerator(i, j))
                .sum();
            let c = Candidate { sum, k: x.count_ones(), x, y };
            best = Some(match best {
                Some(b) => b.better(c),
                None => c,
            });
        }
    }
    Ok(best.expect("n ≥ 2 has admissible pairs").into_report(m))
}

/// `Σ_{i∈X, j∈Y} M[i,j]`.
pub fn block_sum(m: &DSMatrix, x: Mask, y: Mask) -> Rational {
    let sum: BigInt = subset::indices(x)
        .into_iter()
        .flat_map(|i| subset::indices(y).into_iter().map(move |j| (i, j)))
        .map(|(i, j)| m.numerator(i, j))
        .fold(BigInt::zero(), |a, b| a + b);
    Rational::new(sum, m.denominator().clone()).expect("positive denominator")
}

pub fn check_eps(n: usize, eps: &Rational) -> Result<()> {
    let max = Rational::frac(1, 2 * n as i64);
    if !eps.is_positive() || *eps > max {
        return Err(Error::EpsilonOutOfRange {
            eps: eps.to_string(),
            max: max.to_string(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomesticVerdict {
    pub domestic: bool,
    /// Pair whose block sum exceeds `(1−ε)|X|`, present when not domestic.
    pub violation: Option<SubsetPair>,
    pub report: MarginReport,
}

pub fn is_domestic(m: &DSMatrix, eps: &Rational) -> Result<DomesticVerdict> {
    check_eps(m.n(), eps)?;
    Ok(DomesticVerdict::from_report(domesticity_margin(m)?, eps))
}

impl DomesticVerdict {
    /// Verdict for an already computed margin; `eps` is not range-checked.
    pub fn from_report(report: MarginReport, eps: &Rational) -> Self {
        let domestic = report.margin <= Rational::one() - eps;
        DomesticVerdict {
            domestic,
            violation: if domestic { None } else { report.witness },
            report,
        }
    }
}

pub(crate) fn not_domestic(name: &str, m: &DSMatrix, pair: SubsetPair) -> Error {
    Error::NotDomestic {
        name: name.to_string(),
        x: pair.x_one_based(),
        y: pair.y_one_based(),
        sum: block_sum(m, pair.x, pair.y).to_string(),
    }
}

/// Quantities of the domestic contraction bound for `q = M·p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    /// `|p − q|∞`
    pub displacement: Rational,
    /// `|p↓ − q↓|∞`
    pub sorted_gap: Rational,
    /// `2n·ε⁻¹·|p↓ − q↓|∞`
    pub bound: Rational,
    pub holds: bool,
}

pub fn contraction_diagnostic(
    m: &DSMatrix,
    p: &SimplexVector,
    eps: &Rational,
) -> Result<Contraction> {
    let verdict = is_domestic(m, eps)?;
    if let Some(pair) = verdict.violation {
        return Err(not_domestic("matrix", m, pair));
    }
    let q = m.apply(p)?;
    let displacement = sup_distance(p.coords(), q.coords());
    let sorted_gap = sorted_distance(p, &q);
    let bound = Rational::from(2 * m.n() as i64) / eps * &sorted_gap;
    Ok(Contraction {
        holds: displacement <= bound,
        displacement,
        sorted_gap,
        bound,
    })
}
