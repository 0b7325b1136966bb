//! Depth-bounded enumeration of generated semigroups and what can be read
//! off the enumeration: entry sets, gaps in `[0,1]`, the sub-unit entry law,
//! normal forms, and the bilinear-form reduction to a single entry.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::convergence::core_partitions;
use crate::error::{Error, Result};
use crate::exact::{
    averaging, canonical_key, permutation_matrix, DSMatrix, GeneratorSet, Permutation, Rational, SimplexVector,
    Word,
};
use crate::factorization::factor_permutation_opts;
use crate::float::FloatMatrix;

pub const DEFAULT_BUDGET: usize = 1_000_000;
pub const BUDGET_ENV: &str = "DSTOCH_BUDGET";

/// Element budget from `DSTOCH_BUDGET`, or the default when unset.
pub fn budget_from_env() -> Result<usize> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&b| b > 0)
            .ok_or_else(|| Error::Input(format!("{BUDGET_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub matrix: DSMatrix,
    /// Generator indices, in name order.
    pub word: Vec<usize>,
    pub key: Vec<u8>,
}

/// Elements of the generated semigroup reachable by words of length at most
/// `depth`, each with its lexicographically least shortest word.
#[derive(Clone, Debug)]
pub struct SemigroupSnapshot {
    pub generators: GeneratorSet,
    pub depth: usize,
    /// Ordered by word length, then word.
    pub elements: Vec<Element>,
    pub truncated: bool,
    index: HashMap<Vec<u8>, usize>,
}

impl SemigroupSnapshot {
    pub fn n(&self) -> usize {
        self.generators.n()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn word(&self, e: &Element) -> Word {
        Word::from_indices(&self.generators, &e.word)
    }

    pub fn find(&self, m: &DSMatrix) -> Option<&Element> {
        self.index.get(&canonical_key(m)).map(|&i| &self.elements[i])
    }

    pub fn contains(&self, m: &DSMatrix) -> bool {
        self.find(m).is_some()
    }
}

/// [`generate_with_budget`] with the budget taken from the environment.
pub fn generate(set: &GeneratorSet, depth: usize) -> Result<SemigroupSnapshot> {
    generate_with_budget(set, depth, budget_from_env()?)
}

/// Breadth-first enumeration. Each level is expanded in parallel and merged
/// in frontier order, so the result does not depend on scheduling.
///
/// When the budget runs out, the error carries the partial snapshot.
pub fn generate_with_budget(set: &GeneratorSet, depth: usize, budget: usize) -> Result<SemigroupSnapshot> {
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    if budget == 0 {
        return Err(Error::OutOfRange("budget must be at least 1".into()));
    }
    let mut snap = SemigroupSnapshot {
        generators: set.clone(),
        depth,
        elements: Vec::new(),
        truncated: false,
        index: HashMap::new(),
    };

    let seeds: Vec<Element> = set
        .matrices()
        .enumerate()
        .map(|(g, m)| Element {
            matrix: m.clone(),
            word: vec![g],
            key: canonical_key(m),
        })
        .collect();
    let mut frontier = admit(&mut snap, seeds, budget);
    for level in 2..=depth {
        if snap.truncated || frontier.is_empty() {
            break;
        }
        let candidates: Vec<Element> = frontier
            .par_iter()
            .flat_map_iter(|&i| {
                let base = &snap.elements[i];
                set.matrices().enumerate().map(move |(g, m)| {
                    let matrix = base.matrix.mul(m);
                    let key = canonical_key(&matrix);
                    let mut word = base.word.clone();
                    word.push(g);
                    Element { matrix, word, key }
                })
            })
            .collect();
        frontier = admit(&mut snap, candidates, budget);
        if snap.truncated {
            snap.depth = level;
        }
    }

    if snap.truncated {
        let depth = snap.depth;
        return Err(Error::BudgetExceeded {
            budget,
            depth,
            partial: Box::new(snap),
        });
    }
    Ok(snap)
}

/// Inserts unseen candidates in order; returns the indices added.
fn admit(snap: &mut SemigroupSnapshot, candidates: Vec<Element>, budget: usize) -> Vec<usize> {
    let mut added = Vec::new();
    for e in candidates {
        if snap.index.contains_key(&e.key) {
            continue;
        }
        if snap.elements.len() >= budget {
            snap.truncated = true;
            break;
        }
        snap.index.insert(e.key.clone(), snap.elements.len());
        added.push(snap.elements.len());
        snap.elements.push(e);
    }
    added
}

/// Distinct entries over all elements, ascending.
pub fn entry_set(snap: &SemigroupSnapshot) -> Vec<Rational> {
    let mut out: Vec<Rational> = snap.elements.iter().flat_map(|e| e.matrix.entries()).collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub entries: Vec<Rational>,
    /// Open intervals free of entries, ascending.
    pub gaps: Vec<(Rational, Rational)>,
    /// False when the entries came from a truncated enumeration.
    pub exhaustive: bool,
}

/// Maximal entry-free open intervals of length at least `min_gap`. The
/// endpoints 0 and 1 bound the first and last interval even when they are not
/// entries themselves.
pub fn gap_report(entries: &[Rational], min_gap: &Rational) -> Result<GapReport> {
    if entries.is_empty() {
        return Err(Error::Input("entry list is empty".into()));
    }
    let (zero, one) = (Rational::zero(), Rational::one());
    if let Some(bad) = entries.iter().find(|e| **e < zero || **e > one) {
        return Err(Error::OutOfRange(format!("entry {bad} is outside [0,1]")));
    }
    if min_gap.is_negative() {
        return Err(Error::OutOfRange(format!("min_gap {min_gap} is negative")));
    }
    let mut sorted = entries.to_vec();
    sorted.sort();
    sorted.dedup();

    let mut points = Vec::with_capacity(sorted.len() + 2);
    if sorted[0] != zero {
        points.push(zero);
    }
    points.extend(sorted.iter().cloned());
    if *sorted.last().expect("nonempty") != one {
        points.push(one);
    }
    let gaps = points
        .windows(2)
        .filter(|w| &(&w[1] - &w[0]) >= min_gap && w[1] > w[0])
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    Ok(GapReport {
        entries: sorted,
        gaps,
        exhaustive: true,
    })
}

pub fn snapshot_gap_report(snap: &SemigroupSnapshot, min_gap: &Rational) -> Result<GapReport> {
    let mut report = gap_report(&entry_set(snap), min_gap)?;
    report.exhaustive = !snap.truncated;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapLawReport {
    /// Largest generator entry strictly below 1.
    pub x: Rational,
    pub holds: bool,
    /// First element, in enumeration order, with an entry in `(x, 1)`.
    pub counterexample: Option<(Word, Rational)>,
    /// Largest sub-unit entry seen anywhere in the enumeration.
    pub max_observed: Option<Rational>,
    pub elements: usize,
    pub truncated: bool,
}

/// Checks that every enumerated entry is either 1 or at most `x`. A budget
/// overrun is not an error here: the partial enumeration is checked and the
/// report is marked truncated.
pub fn entry_gap_law_check(set: &GeneratorSet, depth: usize, budget: usize) -> Result<GapLawReport> {
    let one = Rational::one();
    if set.matrices().all(|m| m.as_permutation().is_some()) {
        return Err(Error::NoSubUnitEntry);
    }
    let x = set
        .matrices()
        .flat_map(|m| m.entries())
        .filter(|e| *e < one)
        .max()
        .ok_or(Error::NoSubUnitEntry)?;
    let snap = match generate_with_budget(set, depth, budget) {
        Ok(s) => s,
        Err(Error::BudgetExceeded { partial, .. }) => *partial,
        Err(e) => return Err(e),
    };
    let mut counterexample = None;
    let mut max_observed: Option<Rational> = None;
    for e in &snap.elements {
        for v in e.matrix.entries() {
            if v == one {
                continue;
            }
            if counterexample.is_none() && v > x {
                counterexample = Some((snap.word(e), v.clone()));
            }
            if max_observed.as_ref().is_none_or(|m| v > *m) {
                max_observed = Some(v);
            }
        }
    }
    Ok(GapLawReport {
        x,
        holds: counterexample.is_none(),
        counterexample,
        max_observed,
        elements: snap.len(),
        truncated: snap.truncated,
    })
}

/// `P·(D₁⋯D_m)` with every `Dᵢ` domestic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub p: Permutation,
    pub domestic_word: Vec<DSMatrix>,
}

impl NormalForm {
    pub fn product(&self) -> DSMatrix {
        self.domestic_word
            .iter()
            .fold(permutation_matrix(&self.p), |acc, d| acc.mul(d))
    }
}

/// Rewrites `P₁M₁′⋯P_kM_k′` as `(P₁⋯P_k)·∏ Q_i⁻¹M_i′Q_i` with
/// `Q_i = P_{i+1}⋯P_k`, dropping letters whose domestic part is the identity.
pub fn normal_form(set: &GeneratorSet, word: &Word) -> Result<NormalForm> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let idx = word.resolve(set)?;
    let factors = idx
        .iter()
        .map(|&g| {
            factor_permutation_opts(set.matrix(g), false).map_err(|e| Error::FactorizationFailed {
                name: set.name(g).to_string(),
                detail: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = set.n();
    let mut q = Permutation::identity(n);
    let mut conjugates = Vec::with_capacity(factors.len());
    for f in factors.iter().rev() {
        if !f.m_prime.is_identity() {
            conjugates.push(f.m_prime.conjugate(&q));
        }
        q = f.p.compose(&q);
    }
    conjugates.reverse();
    Ok(NormalForm {
        p: q,
        domestic_word: conjugates,
    })
}

/// Doubly stochastic matrix whose first column is `p`; remaining columns
/// spread each row's leftover mass evenly.
pub fn complete_to_ds(p: &SimplexVector) -> Result<DSMatrix> {
    let n = p.n();
    if n == 1 {
        return if p.coords()[0].is_one() {
            Ok(DSMatrix::identity(1))
        } else {
            Err(Error::DimensionTooSmall(1))
        };
    }
    let spread = Rational::from((n - 1) as i64);
    let rows = p
        .coords()
        .iter()
        .map(|pi| {
            let rest = (Rational::one() - pi) / &spread;
            std::iter::once(pi.clone())
                .chain(std::iter::repeat_n(rest, n - 1))
                .collect()
        })
        .collect();
    DSMatrix::from_rows(rows)
}

#[derive(Clone, Debug)]
pub struct BilinearReduction {
    pub generators: GeneratorSet,
    /// Name and matrix of `A` with `A·e₁ = p`.
    pub a: (String, DSMatrix),
    /// Name and matrix of `Bᵀ` with `B·e₁ = q`.
    pub bt: (String, DSMatrix),
}

impl BilinearReduction {
    /// `(Bᵀ·W·A)[1,1]`.
    pub fn sandwich_entry(&self, w: &DSMatrix) -> Rational {
        self.bt.1.mul(w).mul(&self.a.1).entry(0, 0)
    }
}

pub fn bilinear_reduction(set: &GeneratorSet, p: &SimplexVector, q: &SimplexVector) -> Result<BilinearReduction> {
    for v in [p, q] {
        if v.n() != set.n() {
            return Err(Error::DimensionMismatch {
                left: set.n(),
                right: v.n(),
            });
        }
    }
    let a = complete_to_ds(p)?;
    let bt = complete_to_ds(q)?.transpose();
    let with_a = set.with("A_p", a.clone())?;
    let a_name = added_name(set, &with_a);
    let generators = with_a.with("B_q^T", bt.clone())?;
    let bt_name = added_name(&with_a, &generators);
    Ok(BilinearReduction {
        generators,
        a: (a_name, a),
        bt: (bt_name, bt),
    })
}

fn added_name(before: &GeneratorSet, after: &GeneratorSet) -> String {
    after
        .names()
        .find(|n| before.index_of(n).is_none())
        .expect("one generator was added")
        .to_string()
}

/// `qᵀ·W·p`.
pub fn bilinear_value(q: &SimplexVector, w: &DSMatrix, p: &SimplexVector) -> Result<Rational> {
    Ok(q.dot(&w.apply(p)?))
}

/// Matrix with `[1,1] = a`, `(1−a)/(n−1)` elsewhere in the first row and
/// column, and the remaining mass spread evenly over the lower block.
pub fn entry_embed(a: &Rational, n: usize) -> Result<DSMatrix> {
    if *a < Rational::zero() || *a > Rational::one() {
        return Err(Error::OutOfRange(format!("entry {a} is outside [0,1]")));
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let d = Rational::from((n - 1) as i64);
    let edge = (Rational::one() - a) / &d;
    let inner = (Rational::one() - &edge) / &d;
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i, j) {
                    (0, 0) => a.clone(),
                    (0, _) | (_, 0) => edge.clone(),
                    _ => inner.clone(),
                })
                .collect()
        })
        .collect();
    DSMatrix::from_rows(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub word: Word,
    pub power: u32,
    pub distance: f64,
    /// Witness word of the closest element over the augmented generators.
    pub nearest: Word,
    pub nearest_matrix: DSMatrix,
    pub within_tol: bool,
}

#[derive(Clone, Debug)]
pub struct ContainmentReport {
    /// Generators plus the averaging core, named by partition.
    pub augmented: GeneratorSet,
    pub elements: usize,
    pub probes: Vec<ProbeResult>,
}

/// Compares `(∏w)^power` for each probe word with the enumeration of the
/// generators together with their averaging core.
pub fn closure_containment_check(
    set: &GeneratorSet,
    probes: &[Word],
    power: u32,
    depth: usize,
    tol: f64,
    budget: usize,
) -> Result<ContainmentReport> {
    if probes.is_empty() {
        return Err(Error::Input("no probe words".into()));
    }
    if power == 0 {
        return Err(Error::OutOfRange("power must be at least 1".into()));
    }
    let mut augmented = set.clone();
    for p in core_partitions(set)? {
        let a = averaging(&p);
        if set.matrices().all(|m| *m != a) {
            augmented = augmented.with(&format!("A{p}"), a)?;
        }
    }
    let snap = generate_with_budget(&augmented, depth, budget)?;
    let floats: Vec<FloatMatrix> = snap.elements.par_iter().map(|e| e.matrix.to_float()).collect();

    let probes = probes
        .iter()
        .map(|w| {
            let proxy = w.product(set)?.to_float().pow(power);
            let (best, distance) = floats
                .iter()
                .enumerate()
                .map(|(i, f)| (i, f.max_abs_diff(&proxy)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            let e = &snap.elements[best];
            Ok(ProbeResult {
                word: w.clone(),
                power,
                distance,
                nearest: snap.word(e),
                nearest_matrix: e.matrix.clone(),
                within_tol: distance <= tol,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContainmentReport {
        augmented,
        elements: snap.len(),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domestic::domesticity_margin;
    use crate::exact::{ds, simplex, Partition};
    use crate::sample;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn block(n: usize, one_based: &[usize]) -> DSMatrix {
        let members: Vec<usize> = one_based.iter().map(|i| i - 1).collect();
        averaging(&Partition::single_block(n, &members).unwrap())
    }

    fn gens(ms: Vec<DSMatrix>) -> GeneratorSet {
        GeneratorSet::from_matrices(ms).unwrap()
    }

    fn swap2() -> DSMatrix {
        permutation_matrix(&Permutation::transposition(2, 0, 1))
    }

    fn r(a: i64, b: i64) -> Rational {
        Rational::frac(a, b)
    }

    #[test]
    fn generate_examples() {
        assert_eq!(generate_with_budget(&gens(vec![DSMatrix::identity(3)]), 5, 100).unwrap().len(), 1);
        assert_eq!(generate_with_budget(&gens(vec![DSMatrix::uniform(2)]), 5, 100).unwrap().len(), 1);
        let set = gens(vec![block(3, &[1, 2]), block(3, &[1, 3])]);
        let snap = generate_with_budget(&set, 2, 100).unwrap();
        assert_eq!(snap.len(), 4);
        let words: Vec<Vec<usize>> = snap.elements.iter().map(|e| e.word.clone()).collect();
        assert_eq!(words, vec![vec![0], vec![1], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn witness_words_reproduce_elements() {
        let set = gens(vec![block(3, &[1, 2]), block(3, &[2, 3]), permutation_matrix(&Permutation::from_one_based(&[2, 3, 1]).unwrap())]);
        let snap = generate_with_budget(&set, 4, 10_000).unwrap();
        for e in &snap.elements {
            assert_eq!(snap.word(e).product(&set).unwrap(), e.matrix);
            assert_eq!(snap.find(&e.matrix), Some(e));
        }
        for (a, b) in snap.elements.iter().zip(snap.elements.iter().skip(1)) {
            assert!((a.word.len(), &a.word) < (b.word.len(), &b.word));
        }
    }

    #[test]
    fn budget_overrun_returns_partial_snapshot() {
        let set = gens(vec![block(3, &[1, 2]), block(3, &[2, 3])]);
        match generate_with_budget(&set, 10, 5) {
            Err(Error::BudgetExceeded { budget, partial, .. }) => {
                assert_eq!(budget, 5);
                assert!(partial.truncated);
                assert_eq!(partial.len(), 5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn entry_set_examples() {
        let snap = generate_with_budget(&gens(vec![DSMatrix::identity(2)]), 3, 10).unwrap();
        assert_eq!(entry_set(&snap), vec![r(0, 1), r(1, 1)]);
        let snap = generate_with_budget(&gens(vec![DSMatrix::uniform(2)]), 3, 10).unwrap();
        assert_eq!(entry_set(&snap), vec![r(1, 2)]);
        let snap = generate_with_budget(&gens(vec![block(3, &[1, 2]), block(3, &[1, 3])]), 2, 10).unwrap();
        assert_eq!(entry_set(&snap), vec![r(0, 1), r(1, 4), r(1, 2), r(1, 1)]);
    }

    #[test]
    fn gap_examples() {
        let g = gap_report(&[r(0, 1), r(1, 4), r(1, 2), r(1, 1)], &r(1, 5)).unwrap();
        assert_eq!(g.gaps, vec![(r(0, 1), r(1, 4)), (r(1, 4), r(1, 2)), (r(1, 2), r(1, 1))]);
        let g = gap_report(&[r(0, 1), r(1, 1)], &r(1, 2)).unwrap();
        assert_eq!(g.gaps, vec![(r(0, 1), r(1, 1))]);
        let g = gap_report(&[r(1, 2)], &r(1, 4)).unwrap();
        assert_eq!(g.gaps, vec![(r(0, 1), r(1, 2)), (r(1, 2), r(1, 1))]);
        let g = gap_report(&[r(0, 1), r(1, 4), r(1, 2), r(1, 1)], &r(1, 3)).unwrap();
        assert_eq!(g.gaps, vec![(r(1, 2), r(1, 1))]);
    }

    #[test]
    fn gap_rejects_bad_entries() {
        assert!(gap_report(&[], &r(1, 2)).is_err());
        assert!(matches!(gap_report(&[r(3, 2)], &r(1, 2)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn gap_law_examples() {
        let rep = entry_gap_law_check(&gens(vec![DSMatrix::uniform(2)]), 4, 1000).unwrap();
        assert_eq!((rep.x.clone(), rep.holds), (r(1, 2), true));

        let rep = entry_gap_law_check(&gens(vec![block(2, &[1, 2]), swap2()]), 6, 1000).unwrap();
        assert_eq!((rep.x.clone(), rep.holds), (r(1, 2), true));

        let rep = entry_gap_law_check(&gens(vec![block(3, &[1, 2]), block(3, &[2, 3])]), 4, 1000).unwrap();
        assert_eq!((rep.x.clone(), rep.holds), (r(1, 2), true));
        assert!(rep.max_observed.unwrap() <= r(1, 2));

        assert!(matches!(
            entry_gap_law_check(&gens(vec![swap2()]), 3, 1000),
            Err(Error::NoSubUnitEntry)
        ));
    }

    #[test]
    fn normal_form_examples() {
        let set = gens(vec![block(2, &[1, 2]), swap2()]);
        let nf = normal_form(&set, &Word::new(["g1"])).unwrap();
        assert_eq!((nf.p.is_identity(), nf.domestic_word.clone()), (true, vec![block(2, &[1, 2])]));

        let nf = normal_form(&set, &Word::new(["g2", "g2"])).unwrap();
        assert!(nf.p.is_identity());
        assert!(nf.domestic_word.is_empty());

        let nf = normal_form(&set, &Word::new(["g2", "g1"])).unwrap();
        assert_eq!(nf.p, Permutation::transposition(2, 0, 1));
        assert_eq!(nf.domestic_word, vec![block(2, &[1, 2])]);
    }

    #[test]
    fn completion_examples() {
        assert_eq!(complete_to_ds(&simplex(&["1", "0"])).unwrap(), DSMatrix::identity(2));
        assert_eq!(complete_to_ds(&simplex(&["1/2", "1/2"])).unwrap(), DSMatrix::uniform(2));
        assert_eq!(
            complete_to_ds(&simplex(&["1/2", "1/3", "1/6"])).unwrap(),
            ds(&[&[(1, 2), (1, 4), (1, 4)], &[(1, 3), (1, 3), (1, 3)], &[(1, 6), (5, 12), (5, 12)]])
        );
        assert_eq!(complete_to_ds(&simplex(&["1"])).unwrap(), DSMatrix::identity(1));
    }

    #[test]
    fn reduction_examples() {
        let set = gens(vec![swap2()]);
        let p = simplex(&["3/4", "1/4"]);
        let q = simplex(&["1", "0"]);
        let red = bilinear_reduction(&set, &p, &q).unwrap();
        assert_eq!(red.a.1, ds(&[&[(3, 4), (1, 4)], &[(1, 4), (3, 4)]]));
        assert_eq!(red.bt.1, DSMatrix::identity(2));
        assert_eq!(bilinear_value(&q, &swap2(), &p).unwrap(), r(1, 4));
        assert_eq!(red.sandwich_entry(&swap2()), r(1, 4));
        assert_eq!(red.generators.len(), 3);

        let u = simplex(&["1/3", "1/3", "1/3"]);
        let m = sample::random_ds(&mut ChaCha8Rng::seed_from_u64(1), 3, 3, 6);
        assert_eq!(bilinear_value(&u, &m, &u).unwrap(), r(1, 3));

        let e = bilinear_reduction(&set, &u, &q);
        assert!(matches!(e, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn reduction_renames_on_clash() {
        let set = GeneratorSet::new([("A_p".to_string(), DSMatrix::identity(2))]).unwrap();
        let red = bilinear_reduction(&set, &simplex(&["1", "0"]), &simplex(&["1", "0"])).unwrap();
        assert_eq!(red.a.0, "A_p'");
        assert_eq!(red.bt.0, "B_q^T");
    }

    #[test]
    fn embed_examples() {
        assert_eq!(entry_embed(&r(1, 1), 2).unwrap(), DSMatrix::identity(2));
        assert_eq!(entry_embed(&r(0, 1), 2).unwrap(), swap2());
        assert_eq!(
            entry_embed(&r(1, 2), 3).unwrap(),
            ds(&[&[(1, 2), (1, 4), (1, 4)], &[(1, 4), (3, 8), (3, 8)], &[(1, 4), (3, 8), (3, 8)]])
        );
        assert!(matches!(entry_embed(&r(3, 2), 3), Err(Error::OutOfRange(_))));
        assert!(matches!(entry_embed(&r(1, 2), 1), Err(Error::DimensionTooSmall(1))));
    }

    #[test]
    fn containment_examples() {
        let set = gens(vec![block(3, &[1, 2])]);
        let rep = closure_containment_check(&set, &[Word::new(["g1"])], 7, 2, 1e-8, 1000).unwrap();
        assert_eq!(rep.probes[0].distance, 0.0);

        let set = gens(vec![block(3, &[1, 2]), block(3, &[2, 3])]);
        let probe = [Word::new(["g1", "g2"])];
        let rep = closure_containment_check(&set, &probe, 20, 3, 1e-8, 10_000).unwrap();
        assert!(rep.probes[0].within_tol);
        assert_eq!(rep.probes[0].nearest_matrix, DSMatrix::uniform(3));

        let set = gens(vec![block(4, &[1, 2]), block(4, &[3, 4])]);
        let rep = closure_containment_check(&set, &[Word::new(["g1", "g2"])], 1, 2, 1e-8, 1000).unwrap();
        assert_eq!(rep.probes[0].distance, 0.0);
    }

    #[test]
    fn products_never_cycle_between_distinct_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(2..=4);
            let set = gens((0..2).map(|_| sample::random_lazy_ds(&mut rng, n, 1, 2)).collect());
            let snap = generate_with_budget(&set, 3, 60).unwrap_or_else(|e| match e {
                Error::BudgetExceeded { partial, .. } => *partial,
                other => panic!("{other:?}"),
            });
            let ms: Vec<&DSMatrix> = snap.elements.iter().map(|e| &e.matrix).collect();
            for a in &ms {
                for s in &ms {
                    let b = a.mul(s);
                    if b == **a {
                        continue;
                    }
                    for t in &ms {
                        assert_ne!(b.mul(t), **a);
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gap_law_holds_on_random_sets(seed in any::<u64>(), n in 2usize..5, count in 2usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ms: Vec<DSMatrix> = (0..count).map(|_| {
                let terms = rng.gen_range(1..=3);
                sample::random_ds(&mut rng, n, terms, 6)
            }).collect();
            if let Ok(rep) = entry_gap_law_check(&gens(ms), 4, 20_000) {
                prop_assert!(rep.holds, "{:?}", rep.counterexample);
            }
        }

        #[test]
        fn normal_form_preserves_products(seed in any::<u64>(), n in 2usize..6, len in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ms: Vec<DSMatrix> = (0..3).map(|_| {
                let q = sample::random_permutation(&mut rng, n);
                permutation_matrix(&q).mul(&sample::random_ds(&mut rng, n, 2, 4))
            }).collect();
            let set = gens(ms);
            let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..3)).collect();
            let word = Word::from_indices(&set, &idx);
            let nf = normal_form(&set, &word).unwrap();
            prop_assert_eq!(nf.product(), word.product(&set).unwrap());
            for d in &nf.domestic_word {
                prop_assert!(domesticity_margin(d).unwrap().margin < Rational::one());
            }
        }

        #[test]
        fn embed_is_a_double_averaging(seed in any::<u64>(), n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = sample::random_ds(&mut rng, n, 3, 12);
            let rest: Vec<usize> = (1..n).collect();
            let a = averaging(&Partition::single_block(n, &rest).unwrap());
            prop_assert_eq!(entry_embed(&m.entry(0, 0), n).unwrap(), a.mul(&m).mul(&a));
        }

        #[test]
        fn reduction_matches_bilinear_form(seed in any::<u64>(), n in 1usize..6, len in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = gens((0..2).map(|_| sample::random_ds(&mut rng, n, 2, 6)).collect());
            let p = sample::random_simplex(&mut rng, n, 8);
            let q = sample::random_simplex(&mut rng, n, 8);
            let red = bilinear_reduction(&set, &p, &q).unwrap();
            let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..2)).collect();
            let w = Word::from_indices(&set, &idx).product(&set).unwrap();
            prop_assert_eq!(bilinear_value(&q, &w, &p).unwrap(), red.sandwich_entry(&w));
        }
    }
}
