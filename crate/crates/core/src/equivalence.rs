//! Equivalences between traces and between trace sets.
//!
//! Trace-level relations range from plain equality to stutter closures built
//! from single deletions of repeated letters. Set-level checks lift a trace
//! relation through every bounded assignment tuple, or compare pointwise
//! value profiles at every tuple of positions.

use itertools::Itertools;
use num_integer::lcm;
use thiserror::Error;

use crate::hyperltl::{flatten, TraceAssignment};
use crate::traces::{Trace, TraceError, TraceSet, Valuation};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("the two trace sets use different alphabets")]
    AlphabetMismatch,
    #[error("a witness map must pair every trace of one set with one of the other")]
    InvalidWitness,
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// True when positions `j ..= j + n + 1` are all defined and carry the same
/// letter, so deleting position `j` removes one copy of a repeated letter
/// that keeps repeating for `n` more steps.
pub fn n_redundant(trace: &Trace, j: usize, n: usize) -> bool {
    let Some(first) = trace.index(j) else {
        return false;
    };
    (j + 1..=j + n + 1).all(|i| trace.index(i) == Some(first))
}

/// True when deleting one `n`-redundant position of `from` yields `to`.
/// Deleting never counts when it reproduces `from` itself, as it does inside
/// a constant period.
pub fn one_step_n_deletion(to: &Trace, from: &Trace, n: usize) -> bool {
    deletion_bound(to, from)
        .filter(|&j| n_redundant(from, j, n))
        .filter_map(|j| from.with_position_deleted(j))
        .any(|shrunk| shrunk == *to && shrunk != *from)
}

// a deletion matching `to` keeps every earlier position unchanged, so the
// deleted index cannot lie past the first place where the two words disagree,
// and distinct words disagree before the joint stems plus one joint period
fn deletion_bound(to: &Trace, from: &Trace) -> std::ops::Range<usize> {
    0..match (from.finite_len(), to.finite_len()) {
        (Some(len), _) => len,
        (None, Some(_)) => 0,
        (None, None) => {
            from.stem_len().max(to.stem_len())
                + lcm(from.period_len().unwrap(), to.period_len().unwrap())
        }
    }
}

fn deletion_positions(trace: &Trace) -> std::ops::Range<usize> {
    0..match trace.finite_len() {
        Some(len) => len,
        None => trace.stem_len() + trace.period_len().unwrap(),
    }
}

/// True when the traces have the same set of letters, at whichever positions.
pub fn globally_equiv(left: &Trace, right: &Trace) -> bool {
    left.letter_set() == right.letter_set()
}

fn insertion_candidates(trace: &Trace, n: usize) -> Vec<Trace> {
    // positions past one full period repeat earlier deletions, so this window
    // covers every insertion with a distinct canonical result
    let window = deletion_positions(trace).end + n + 2;
    let mut out = Vec::new();
    for j in 0..window {
        let Some(letter) = trace.index(j).cloned() else {
            break;
        };
        let grown = match trace {
            Trace::Finite(letters) => {
                let mut letters = letters.clone();
                letters.insert(j, letter);
                Trace::finite(letters)
            }
            Trace::Lasso { stem, period } => {
                let mut stem = stem.clone();
                while stem.len() <= j {
                    stem.extend(period.iter().cloned());
                }
                stem.insert(j, letter);
                Trace::lasso(stem, period.clone()).unwrap()
            }
        };
        out.push(grown);
    }
    out
}

/// Trace relations selectable by the set-level checks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TraceEquivalence {
    /// Canonical equality.
    Exact,
    /// Equal letter sets.
    GloballyLetters,
    /// Equal, or one `n`-redundant deletion apart in either direction.
    NStutterOneStep(usize),
    /// Connected by at most `max_steps` single `n`-redundant deletions or
    /// insertions.
    NStutterBounded { n: usize, max_steps: usize },
}

impl TraceEquivalence {
    pub fn equivalent(&self, left: &Trace, right: &Trace) -> bool {
        match *self {
            TraceEquivalence::Exact => left == right,
            TraceEquivalence::GloballyLetters => globally_equiv(left, right),
            TraceEquivalence::NStutterOneStep(n) => {
                left == right
                    || one_step_n_deletion(left, right, n)
                    || one_step_n_deletion(right, left, n)
            }
            TraceEquivalence::NStutterBounded { n, max_steps } => {
                stutter_reachable(left, right, n, max_steps)
            }
        }
    }
}

fn stutter_reachable(left: &Trace, right: &Trace, n: usize, max_steps: usize) -> bool {
    let mut frontier = vec![right.clone()];
    let mut seen = vec![right.clone()];
    for _ in 0..max_steps {
        if frontier.iter().any(|t| t == left) {
            return true;
        }
        let mut next = Vec::new();
        for trace in frontier {
            let shrunk = deletion_positions(&trace)
                .filter(|&j| n_redundant(&trace, j, n))
                .filter_map(|j| trace.with_position_deleted(j));
            let grown = insertion_candidates(&trace, n)
                .into_iter()
                .filter(|g| one_step_n_deletion(&trace, g, n));
            for neighbour in shrunk.chain(grown) {
                if neighbour != trace && !seen.contains(&neighbour) {
                    seen.push(neighbour.clone());
                    next.push(neighbour);
                }
            }
        }
        frontier = next;
    }
    frontier.iter().any(|t| t == left)
}

/// A pairing of the traces of two equal-sized sets, queried in both
/// directions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessBijection {
    pairs: Vec<(Trace, Trace)>,
}

impl WitnessBijection {
    pub fn new(
        left: &TraceSet,
        right: &TraceSet,
        pairs: Vec<(Trace, Trace)>,
    ) -> Result<WitnessBijection, EquivalenceError> {
        let valid = pairs.len() == left.len()
            && pairs.len() == right.len()
            && left.traces().iter().all(|t| {
                pairs.iter().filter(|(l, _)| l == t).count() == 1
            })
            && right.traces().iter().all(|u| {
                pairs.iter().filter(|(_, r)| r == u).count() == 1
            });
        if valid {
            Ok(WitnessBijection { pairs })
        } else {
            Err(EquivalenceError::InvalidWitness)
        }
    }

    pub fn image(&self, t: &Trace) -> Option<&Trace> {
        self.pairs.iter().find(|(l, _)| l == t).map(|(_, r)| r)
    }

    pub fn preimage(&self, u: &Trace) -> Option<&Trace> {
        self.pairs.iter().find(|(_, r)| r == u).map(|(l, _)| l)
    }

    pub fn pairs(&self) -> &[(Trace, Trace)] {
        &self.pairs
    }
}

/// Result of an assignment-wise set comparison.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KcOutcome {
    Equivalent { witness: WitnessBijection },
    /// Some assignment flattens to inequivalent words under the given
    /// pairing; `forward` tells which set the assignment draws from.
    Distinguished {
        assignment: Vec<(String, Trace)>,
        forward: bool,
    },
    SizeMismatch,
    NoWitnessFound,
}

impl KcOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, KcOutcome::Equivalent { .. })
    }
}

fn assignment_vars(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("p{i}")).collect()
}

fn flatten_tuple(vars: &[String], traces: &[&Trace]) -> Result<Trace, TraceError> {
    let mut assignment = TraceAssignment::new();
    for (var, trace) in vars.iter().zip(traces) {
        assignment.bind(var.clone(), (*trace).clone());
    }
    flatten(&assignment)
}

fn distinguishing_tuple<'a>(
    source: &'a TraceSet,
    k: usize,
    eq: &TraceEquivalence,
    map: impl Fn(&Trace) -> &'a Trace,
) -> Result<Option<Vec<&'a Trace>>, EquivalenceError> {
    let vars = assignment_vars(k);
    for tuple in std::iter::repeat_n(source.traces().iter(), k).multi_cartesian_product() {
        let image: Vec<&Trace> = tuple.iter().map(|t| map(t)).collect();
        let flat = flatten_tuple(&vars, &tuple)?;
        let mapped = flatten_tuple(&vars, &image)?;
        if !eq.equivalent(&flat, &mapped) {
            return Ok(Some(tuple));
        }
    }
    Ok(None)
}

/// A named distinguishing assignment plus the direction it was found in.
type Distinguisher = (Vec<(String, Trace)>, bool);

fn check_bijection(
    left: &TraceSet,
    right: &TraceSet,
    k: usize,
    eq: &TraceEquivalence,
    witness: &WitnessBijection,
) -> Result<Option<Distinguisher>, EquivalenceError> {
    let vars = assignment_vars(k);
    let name = |tuple: Vec<&Trace>| {
        vars.iter()
            .cloned()
            .zip(tuple.into_iter().cloned())
            .collect()
    };
    if let Some(tuple) = distinguishing_tuple(left, k, eq, |t| witness.image(t).unwrap())? {
        return Ok(Some((name(tuple), true)));
    }
    if let Some(tuple) = distinguishing_tuple(right, k, eq, |u| witness.preimage(u).unwrap())? {
        return Ok(Some((name(tuple), false)));
    }
    Ok(None)
}

/// Compare two trace sets through every assignment of `k` trace variables:
/// a pairing of the sets must carry each flattened assignment to an
/// equivalent flattened word, in both directions. With no witness given,
/// every pairing is tried.
pub fn kc_equivalent(
    left: &TraceSet,
    right: &TraceSet,
    k: usize,
    eq: &TraceEquivalence,
    witness: Option<&WitnessBijection>,
) -> Result<KcOutcome, EquivalenceError> {
    if left.alphabet() != right.alphabet() {
        return Err(EquivalenceError::AlphabetMismatch);
    }
    if left.len() != right.len() {
        return Ok(KcOutcome::SizeMismatch);
    }
    if let Some(witness) = witness {
        return Ok(match check_bijection(left, right, k, eq, witness)? {
            None => KcOutcome::Equivalent {
                witness: witness.clone(),
            },
            Some((assignment, forward)) => KcOutcome::Distinguished { assignment, forward },
        });
    }
    for image in right.traces().iter().permutations(right.len()) {
        let pairs = left
            .traces()
            .iter()
            .cloned()
            .zip(image.into_iter().cloned())
            .collect();
        let candidate = WitnessBijection::new(left, right, pairs)?;
        if check_bijection(left, right, k, eq, &candidate)?.is_none() {
            return Ok(KcOutcome::Equivalent { witness: candidate });
        }
    }
    Ok(KcOutcome::NoWitnessFound)
}

/// Result of a pointwise tuple comparison.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KPointOutcome {
    pub holds: bool,
    pub distinguishing_tuple: Option<Vec<usize>>,
}

fn position_signature<'a>(trace: &'a Trace, tuple: &[usize]) -> Vec<Option<&'a Valuation>> {
    tuple.iter().map(|&i| trace.index(i)).collect()
}

/// Compare two trace sets position-wise: at every tuple of `k` positions
/// below the joint periodic horizon, the multisets of per-trace value
/// profiles must agree.
pub fn k_point_equivalent(
    left: &TraceSet,
    right: &TraceSet,
    k: usize,
) -> Result<KPointOutcome, EquivalenceError> {
    if left.alphabet() != right.alphabet() {
        return Err(EquivalenceError::AlphabetMismatch);
    }
    let horizon = left.max_stem().max(right.max_stem())
        + lcm(left.lcm_periods(), right.lcm_periods());
    let mut tuple = vec![0usize; k];
    loop {
        let mut sig_left: Vec<_> = left
            .traces()
            .iter()
            .map(|t| position_signature(t, &tuple))
            .collect();
        let mut sig_right: Vec<_> = right
            .traces()
            .iter()
            .map(|u| position_signature(u, &tuple))
            .collect();
        sig_left.sort();
        sig_right.sort();
        if sig_left != sig_right {
            return Ok(KPointOutcome {
                holds: false,
                distinguishing_tuple: Some(tuple),
            });
        }
        let mut pos = 0;
        while pos < k && tuple[pos] + 1 == horizon {
            tuple[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
        tuple[pos] += 1;
    }
    Ok(KPointOutcome {
        holds: true,
        distinguishing_tuple: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const X: &[&str] = &["x"];

    fn letters(bits: &str) -> Vec<Valuation> {
        bits.split_whitespace()
            .map(|b| Valuation::from_pairs([("x".to_string(), b == "1")]))
            .collect()
    }

    fn lasso(stem: &str, period: &str) -> Trace {
        Trace::lasso(letters(stem), letters(period)).unwrap()
    }

    fn finite(bits: &str) -> Trace {
        Trace::finite(letters(bits))
    }

    fn set(traces: Vec<Trace>) -> TraceSet {
        TraceSet::new(X.iter().map(|v| v.to_string()).collect(), traces).unwrap()
    }

    #[test]
    fn redundancy_counts_the_repeats_after_the_deleted_copy() {
        let t = finite("0 0 0 1");
        assert!(n_redundant(&t, 0, 0));
        assert!(n_redundant(&t, 0, 1));
        assert!(!n_redundant(&t, 0, 2));
        assert!(!n_redundant(&t, 2, 0));
        assert!(!n_redundant(&t, 3, 0));
        // periods supply repeats beyond the stem
        let l = lasso("1", "0");
        assert!(n_redundant(&l, 1, 7));
        assert!(!n_redundant(&l, 0, 0));
    }

    #[test]
    fn one_step_deletion_on_finite_traces() {
        assert!(one_step_n_deletion(&finite("0 1"), &finite("0 0 1"), 0));
        assert!(!one_step_n_deletion(&finite("0 1"), &finite("0 0 1"), 1));
        assert!(!one_step_n_deletion(&finite("0 0"), &finite("0 0 1"), 0));
    }

    #[test]
    fn one_step_deletion_on_lassos() {
        let long = lasso("0 0", "1");
        let short = lasso("0", "1");
        assert!(one_step_n_deletion(&short, &long, 0));
        assert!(!one_step_n_deletion(&long, &short, 0));
    }

    #[test]
    fn deleting_inside_a_constant_period_changes_nothing() {
        let t = lasso("", "0");
        assert_eq!(t.with_position_deleted(0), Some(t.clone()));
        assert!(!one_step_n_deletion(&t, &t, 0));
        assert!(TraceEquivalence::NStutterOneStep(0).equivalent(&t, &t));
    }

    #[test]
    fn one_step_relation_is_symmetric() {
        let eq = TraceEquivalence::NStutterOneStep(0);
        assert!(eq.equivalent(&finite("0 1"), &finite("0 0 1")));
        assert!(eq.equivalent(&finite("0 0 1"), &finite("0 1")));
        assert!(!eq.equivalent(&finite("0 1"), &finite("0 0 0 1")));
    }

    #[test]
    fn bounded_closure_chains_deletions() {
        let eq = TraceEquivalence::NStutterBounded { n: 0, max_steps: 2 };
        assert!(eq.equivalent(&finite("0 1"), &finite("0 0 0 1")));
        let one = TraceEquivalence::NStutterBounded { n: 0, max_steps: 1 };
        assert!(!one.equivalent(&finite("0 1"), &finite("0 0 0 1")));
        // one deletion and one insertion apart
        assert!(eq.equivalent(&finite("0 0 1 1"), &finite("0 1")));
    }

    #[test]
    fn letter_sets_ignore_order_and_multiplicity() {
        assert!(globally_equiv(&finite("0 1 1"), &finite("1 0")));
        assert!(!globally_equiv(&finite("0 0"), &finite("0 1")));
        assert!(TraceEquivalence::GloballyLetters.equivalent(&lasso("0", "1"), &lasso("1", "0")));
    }

    #[test]
    fn assignment_comparison_accepts_a_stutter_pairing() {
        let left = set(vec![lasso("", "0"), lasso("0 0", "1")]);
        let right = set(vec![lasso("", "0"), lasso("0", "1")]);
        let witness = WitnessBijection::new(
            &left,
            &right,
            vec![
                (lasso("", "0"), lasso("", "0")),
                (lasso("0 0", "1"), lasso("0", "1")),
            ],
        )
        .unwrap();
        for k in 1..=2 {
            let outcome = kc_equivalent(
                &left,
                &right,
                k,
                &TraceEquivalence::NStutterOneStep(0),
                Some(&witness),
            )
            .unwrap();
            assert!(outcome.holds(), "k = {k}: {outcome:?}");
        }
        // the search finds the same pairing without help
        let searched = kc_equivalent(&left, &right, 1, &TraceEquivalence::NStutterOneStep(0), None)
            .unwrap();
        assert!(searched.holds());
    }

    #[test]
    fn assignment_comparison_reports_the_failing_side() {
        let left = set(vec![lasso("", "0"), lasso("", "1")]);
        let right = set(vec![lasso("", "0"), lasso("0", "1")]);
        let witness = WitnessBijection::new(
            &left,
            &right,
            vec![
                (lasso("", "0"), lasso("", "0")),
                (lasso("", "1"), lasso("0", "1")),
            ],
        )
        .unwrap();
        match kc_equivalent(&left, &right, 1, &TraceEquivalence::Exact, Some(&witness)).unwrap() {
            KcOutcome::Distinguished { assignment, forward } => {
                assert_eq!(assignment.len(), 1);
                assert!(forward);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
        assert_eq!(
            kc_equivalent(&left, &right, 1, &TraceEquivalence::Exact, None).unwrap(),
            KcOutcome::NoWitnessFound
        );
        let smaller = set(vec![lasso("", "0")]);
        assert_eq!(
            kc_equivalent(&left, &smaller, 1, &TraceEquivalence::Exact, None).unwrap(),
            KcOutcome::SizeMismatch
        );
    }

    #[test]
    fn witness_maps_must_biject() {
        let left = set(vec![lasso("", "0"), lasso("", "1")]);
        let right = set(vec![lasso("", "0"), lasso("0", "1")]);
        let doubled = WitnessBijection::new(
            &left,
            &right,
            vec![
                (lasso("", "0"), lasso("", "0")),
                (lasso("", "1"), lasso("", "0")),
            ],
        );
        assert_eq!(doubled, Err(EquivalenceError::InvalidWitness));
    }

    #[test]
    fn pointwise_tuples_separate_alternation_from_constancy() {
        let alternating = set(vec![lasso("", "0 1"), lasso("", "1 0")]);
        let constant = set(vec![lasso("", "0"), lasso("", "1")]);
        assert!(k_point_equivalent(&alternating, &constant, 1).unwrap().holds);
        let outcome = k_point_equivalent(&alternating, &constant, 2).unwrap();
        assert!(!outcome.holds);
        let tuple = outcome.distinguishing_tuple.unwrap();
        assert_eq!(tuple.len(), 2);
        assert_ne!(tuple[0], tuple[1]);
    }
}
