//! Limits of infinite right products of domestic matrices.
//!
//! Over a domestic tail, products converge to the averaging of the partition
//! generated by the support edges of the tail. This module predicts that
//! partition exactly, iterates products in floating point, and matches the
//! numeric limit back to an exact averaging.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{averaging, support_partition, DSMatrix, GeneratorSet, Partition, Word};
use crate::factorization::support_components;
use crate::float::FloatMatrix;
use crate::union_find::UnionFind;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MATCH_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const SUBSET_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleRule {
    /// Generators in name order, cyclically.
    RoundRobin,
    /// The word repeated forever.
    RepeatWord(Word),
    /// Each round is a fresh seeded shuffle of all generators.
    PseudoRandom(u64),
}

#[derive(Clone, Debug)]
pub struct ProductSchedule {
    pub generators: GeneratorSet,
    pub rule: ScheduleRule,
}

impl ProductSchedule {
    pub fn new(generators: GeneratorSet, rule: ScheduleRule) -> Result<Self> {
        if let ScheduleRule::RepeatWord(w) = &rule {
            if w.is_empty() {
                return Err(Error::EmptyWord);
            }
            w.resolve(&generators)?;
        }
        Ok(ProductSchedule { generators, rule })
    }

    pub fn round_robin(generators: GeneratorSet) -> Self {
        ProductSchedule {
            generators,
            rule: ScheduleRule::RoundRobin,
        }
    }

    /// Indices of generators used infinitely often, ascending.
    pub fn recurring(&self) -> Vec<usize> {
        match &self.rule {
            ScheduleRule::RepeatWord(w) => {
                let set: BTreeSet<usize> = w
                    .resolve(&self.generators)
                    .expect("validated on construction")
                    .into_iter()
                    .collect();
                set.into_iter().collect()
            }
            _ => (0..self.generators.len()).collect(),
        }
    }

    /// Shortest run length guaranteed to contain every recurring generator.
    pub fn period(&self) -> usize {
        match &self.rule {
            ScheduleRule::RoundRobin => self.generators.len(),
            ScheduleRule::RepeatWord(w) => w.len(),
            ScheduleRule::PseudoRandom(_) => 2 * self.generators.len() - 1,
        }
    }

    /// Infinite sequence of generator indices.
    pub fn indices(&self) -> Box<dyn Iterator<Item = usize> + Send + '_> {
        let len = self.generators.len();
        match &self.rule {
            ScheduleRule::RoundRobin => Box::new((0..len).cycle()),
            ScheduleRule::RepeatWord(w) => Box::new(
                w.resolve(&self.generators)
                    .expect("validated on construction")
                    .into_iter()
                    .cycle(),
            ),
            ScheduleRule::PseudoRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Box::new(
                    std::iter::repeat_with(move || {
                        let mut round: Vec<usize> = (0..len).collect();
                        round.shuffle(&mut rng);
                        round
                    })
                    .flatten(),
                )
            }
        }
    }
}

/// Numeric limit of a product schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub value: Vec<Vec<f64>>,
    /// Number of factors in the partial product where the stable run began.
    pub iterations: usize,
    pub residual: f64,
    pub matched_averaging: Option<Partition>,
    pub match_error: Option<f64>,
}

/// Fails with `NotDomestic` on the first matrix that has an off-diagonal
/// tight pair, reported as a support component with rows ≠ columns.
pub fn ensure_domestic(set: &GeneratorSet) -> Result<()> {
    for (name, m) in set.iter() {
        if let Some(c) = support_components(m).into_iter().find(|c| c.rows != c.cols) {
            return Err(Error::NotDomestic {
                name: name.to_string(),
                sum: c.rows.len().to_string(),
                x: c.rows_one_based(),
                y: c.cols_one_based(),
            });
        }
    }
    Ok(())
}

/// Partition generated by all support edges of the tail.
pub fn predict_limit_partition(tail: &GeneratorSet) -> Result<Partition> {
    ensure_domestic(tail)?;
    Ok(support_partition(tail.n(), tail.matrices()))
}

pub fn iterate_product(schedule: &ProductSchedule, tol: f64, max_iter: usize) -> Result<LimitReport> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance must be positive, got {tol}")));
    }
    if max_iter == 0 {
        return Err(Error::OutOfRange("max_iter must be at least 1".into()));
    }
    let window = schedule.generators.n().max(schedule.period());
    let gens: Vec<FloatMatrix> = schedule.generators.matrices().map(DSMatrix::to_float).collect();
    let mut seq = schedule.indices();

    let mut prod = gens[seq.next().expect("infinite schedule")].clone();
    let mut previous = prod.clone();
    let mut factors = 1;
    let mut residual = f64::INFINITY;
    let mut stable = 0;
    let mut stable_from = 0;
    while stable < window {
        if factors >= max_iter {
            return Err(Error::NonConvergent {
                iterations: factors,
                residual,
                last: prod.rows(),
                previous: previous.rows(),
            });
        }
        let next = prod.mul(&gens[seq.next().expect("infinite schedule")]);
        factors += 1;
        residual = next.max_abs_diff(&prod);
        if residual <= tol {
            if stable == 0 {
                stable_from = factors - 1;
            }
            stable += 1;
        } else {
            stable = 0;
        }
        previous = std::mem::replace(&mut prod, next);
    }

    let (matched_averaging, match_error) = match_limit(schedule, &prod, tol)?;
    Ok(LimitReport {
        value: prod.rows(),
        iterations: stable_from,
        residual,
        matched_averaging,
        match_error,
    })
}

/// Partition linking `i` and `j` whenever the limit has a non-negligible
/// `[i,j]` entry.
fn candidate_partition(limit: &FloatMatrix, threshold: f64) -> Partition {
    let n = limit.n();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in 0..n {
            if limit.get(i, j) > threshold {
                uf.union(i, j);
            }
        }
    }
    Partition::from_union_find(&mut uf)
}

fn averaging_distance(limit: &FloatMatrix, p: &Partition) -> f64 {
    limit.max_abs_diff(&averaging(p).to_float())
}

fn match_limit(
    schedule: &ProductSchedule,
    limit: &FloatMatrix,
    tol: f64,
) -> Result<(Option<Partition>, Option<f64>)> {
    let threshold = tol.sqrt();
    let candidate = candidate_partition(limit, threshold);
    let tail = schedule.generators.select(&schedule.recurring())?;
    let found = match predict_limit_partition(&tail) {
        Ok(predicted) => (predicted == candidate).then_some(predicted),
        Err(Error::NotDomestic { .. }) => {
            (averaging_distance(limit, &candidate) <= threshold).then_some(candidate)
        }
        Err(e) => return Err(e),
    };
    Ok(match found {
        Some(p) => {
            let err = averaging_distance(limit, &p);
            (Some(p), Some(err))
        }
        None => (None, None),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoreParams {
    pub tol: f64,
    pub match_tol: f64,
    pub max_iter: usize,
}

impl Default for CoreParams {
    fn default() -> Self {
        CoreParams {
            tol: DEFAULT_TOL,
            match_tol: DEFAULT_MATCH_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetCheck {
    pub members: Vec<String>,
    pub predicted: Partition,
    pub iterations: usize,
    pub distance: f64,
    pub within_tol: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoreReport {
    /// One entry per nonempty subset, ordered by subset bitmask over name order.
    pub subsets: Vec<SubsetCheck>,
    pub all_within_tol: bool,
}

/// Round-robin limit of every nonempty subset, compared to its predicted
/// averaging.
pub fn verify_convergence_core(set: &GeneratorSet, params: CoreParams) -> Result<CoreReport> {
    if set.len() > SUBSET_LIMIT {
        return Err(Error::SubsetBudgetExceeded {
            count: set.len(),
            limit: SUBSET_LIMIT,
        });
    }
    ensure_domestic(set)?;
    let subsets = (1u32..1 << set.len())
        .into_par_iter()
        .map(|mask| {
            let idx: Vec<usize> = (0..set.len()).filter(|i| mask >> i & 1 == 1).collect();
            let sub = set.select(&idx)?;
            let predicted = predict_limit_partition(&sub)?;
            let report = iterate_product(&ProductSchedule::round_robin(sub.clone()), params.tol, params.max_iter)?;
            let distance = FloatMatrix::from_rows(&report.value).max_abs_diff(&averaging(&predicted).to_float());
            Ok(SubsetCheck {
                members: sub.names().map(str::to_string).collect(),
                predicted,
                iterations: report.iterations,
                distance,
                within_tol: distance <= params.match_tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_within_tol = subsets.iter().all(|s| s.within_tol);
    Ok(CoreReport {
        subsets,
        all_within_tol,
    })
}

/// Least set of averagings containing each generator's support averaging and
/// closed under joins. Sorted finest first, then by non-singleton blocks.
pub fn averaging_core(set: &GeneratorSet) -> Result<Vec<DSMatrix>> {
    Ok(core_partitions(set)?.iter().map(averaging).collect())
}

pub fn core_partitions(set: &GeneratorSet) -> Result<Vec<Partition>> {
    ensure_domestic(set)?;
    let n = set.n();
    let mut found: BTreeSet<Partition> = set
        .matrices()
        .map(|m| support_partition(n, std::iter::once(m)))
        .collect();
    loop {
        let current: Vec<&Partition> = found.iter().collect();
        let fresh: Vec<Partition> = current
            .iter()
            .enumerate()
            .flat_map(|(a, p)| current[a + 1..].iter().map(move |q| p.join(q)))
            .filter(|j| !found.contains(j))
            .collect();
        if fresh.is_empty() {
            break;
        }
        found.extend(fresh);
    }
    let mut out: Vec<Partition> = found.into_iter().collect();
    out.sort_by_cached_key(|p| {
        let merged: Vec<Vec<usize>> = p.blocks().iter().filter(|b| b.len() > 1).cloned().collect();
        (std::cmp::Reverse(p.blocks().len()), merged)
    });
    Ok(out)
}
