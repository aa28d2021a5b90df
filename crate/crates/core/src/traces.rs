//! Finite and ultimately periodic traces over boolean variables, and sets of
//! them with a shared alphabet.
//!
//! Lassos are kept in a canonical form (minimal period, then minimal stem), so
//! two representations of the same infinite word compare equal.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use thiserror::Error;

/// Errors from building or combining traces.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("a lasso needs a nonempty period")]
    EmptyPeriod,
    #[error("traces have different shapes and cannot be combined pointwise")]
    ShapeMismatch,
    #[error("every trace must be a lasso for the pointwise view")]
    FiniteTracePresent,
    #[error("variable `{0}` is not part of the alphabet")]
    UnknownVariable(String),
    #[error("alphabet declares variable `{0}` twice")]
    DuplicateVariable(String),
    #[error("letter uses variables {found:?}, expected {expected:?}")]
    AlphabetMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("pointwise word has an empty letter set at position {0}")]
    EmptyPosition(usize),
}

/// A total assignment of boolean values to a finite set of variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Valuation {
    values: BTreeMap<String, bool>,
}

impl Valuation {
    /// The empty valuation (no variables).
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, bool)>) -> Self {
        Valuation {
            values: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// The value of `var`, or `None` when the valuation does not mention it.
    pub fn get(&self, var: &str) -> Option<bool> {
        self.values.get(var).copied()
    }

    pub fn set(&mut self, var: impl Into<String>, value: bool) {
        self.values.insert(var.into(), value);
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise union; on shared variables the right operand wins.
    pub fn compose(&self, other: &Valuation) -> Valuation {
        let mut values = self.values.clone();
        for (k, v) in &other.values {
            values.insert(k.clone(), *v);
        }
        Valuation { values }
    }

    /// A copy without `var`.
    pub fn without(&self, var: &str) -> Valuation {
        let mut values = self.values.clone();
        values.remove(var);
        Valuation { values }
    }

    /// A copy with every variable renamed through `f`.
    pub fn rename(&self, mut f: impl FnMut(&str) -> String) -> Valuation {
        Valuation {
            values: self.values.iter().map(|(k, v)| (f(k), *v)).collect(),
        }
    }

    fn same_domain(&self, vars: &BTreeSet<&str>) -> bool {
        self.values.len() == vars.len() && self.values.keys().all(|k| vars.contains(k.as_str()))
    }
}

/// Reduce a lasso representation to minimal period, then minimal stem.
///
/// Rolling a stem letter equal to the period's last letter into a rotated
/// period preserves the represented word; iterating both steps reaches the
/// unique minimal representation.
fn canonical_lasso_parts<T: Clone + PartialEq>(
    mut stem: Vec<T>,
    mut period: Vec<T>,
) -> (Vec<T>, Vec<T>) {
    let plen = period.len();
    for d in 1..=plen {
        if plen.is_multiple_of(d) && (d..plen).all(|i| period[i] == period[i % d]) {
            period.truncate(d);
            break;
        }
    }
    while stem.last().is_some() && stem.last() == period.last() {
        stem.pop();
        let last = period.pop().expect("period stays nonempty");
        period.insert(0, last);
    }
    (stem, period)
}

/// A finite word or a lasso (stem plus forever-repeated period) of valuations.
///
/// Lassos are canonical, so `==`, `Ord` and `Hash` all agree with equality of
/// the represented words.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Trace {
    Finite(Vec<Valuation>),
    Lasso {
        stem: Vec<Valuation>,
        period: Vec<Valuation>,
    },
}

impl Trace {
    pub fn finite(letters: Vec<Valuation>) -> Trace {
        Trace::Finite(letters)
    }

    /// Build a lasso; the result is canonicalized.
    pub fn lasso(stem: Vec<Valuation>, period: Vec<Valuation>) -> Result<Trace, TraceError> {
        if period.is_empty() {
            return Err(TraceError::EmptyPeriod);
        }
        let (stem, period) = canonical_lasso_parts(stem, period);
        Ok(Trace::Lasso { stem, period })
    }

    pub fn is_lasso(&self) -> bool {
        matches!(self, Trace::Lasso { .. })
    }

    /// Length of a finite trace, `None` for lassos.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            Trace::Finite(l) => Some(l.len()),
            Trace::Lasso { .. } => None,
        }
    }

    /// Stem length for lassos, full length for finite traces.
    pub fn stem_len(&self) -> usize {
        match self {
            Trace::Finite(l) => l.len(),
            Trace::Lasso { stem, .. } => stem.len(),
        }
    }

    pub fn period_len(&self) -> Option<usize> {
        match self {
            Trace::Finite(_) => None,
            Trace::Lasso { period, .. } => Some(period.len()),
        }
    }

    /// The letters before the loop (all letters for a finite trace).
    pub fn stem_letters(&self) -> &[Valuation] {
        match self {
            Trace::Finite(l) => l,
            Trace::Lasso { stem, .. } => stem,
        }
    }

    pub fn period_letters(&self) -> Option<&[Valuation]> {
        match self {
            Trace::Finite(_) => None,
            Trace::Lasso { period, .. } => Some(period),
        }
    }

    /// The letter at position `i`; `None` past the end of a finite trace.
    pub fn index(&self, i: usize) -> Option<&Valuation> {
        match self {
            Trace::Finite(l) => l.get(i),
            Trace::Lasso { stem, period } => {
                if i < stem.len() {
                    Some(&stem[i])
                } else {
                    Some(&period[(i - stem.len()) % period.len()])
                }
            }
        }
    }

    pub fn defined_at(&self, i: usize) -> bool {
        self.index(i).is_some()
    }

    /// The first `i` letters as a finite trace (shorter when the trace ends
    /// earlier).
    pub fn prefix(&self, i: usize) -> Trace {
        let letters = (0..i).map_while(|j| self.index(j).cloned()).collect();
        Trace::Finite(letters)
    }

    /// The trace from position `i` on; lassos stay lassos, finite traces may
    /// become empty.
    pub fn suffix(&self, i: usize) -> Trace {
        match self {
            Trace::Finite(l) => Trace::Finite(l.get(i.min(l.len())..).unwrap_or(&[]).to_vec()),
            Trace::Lasso { stem, period } => {
                if i <= stem.len() {
                    Trace::lasso(stem[i..].to_vec(), period.clone())
                } else {
                    let r = (i - stem.len()) % period.len();
                    let rotated: Vec<Valuation> =
                        period[r..].iter().chain(&period[..r]).cloned().collect();
                    Trace::lasso(Vec::new(), rotated)
                }
                .expect("period stays nonempty")
            }
        }
    }

    /// First `n` letters, unrolling the period as needed.
    pub fn unroll(&self, n: usize) -> Vec<Valuation> {
        (0..n).map_while(|i| self.index(i).cloned()).collect()
    }

    /// Pointwise composition. Finite traces must have equal length; lassos are
    /// aligned on the longer stem and the period lcm. Mixing shapes fails.
    pub fn compose(&self, other: &Trace) -> Result<Trace, TraceError> {
        match (self, other) {
            (Trace::Finite(a), Trace::Finite(b)) => {
                if a.len() != b.len() {
                    return Err(TraceError::ShapeMismatch);
                }
                Ok(Trace::Finite(
                    a.iter().zip(b).map(|(x, y)| x.compose(y)).collect(),
                ))
            }
            (Trace::Lasso { .. }, Trace::Lasso { .. }) => {
                let stem = self.stem_len().max(other.stem_len());
                let period = self
                    .period_len()
                    .unwrap()
                    .lcm(&other.period_len().unwrap());
                let letter = |i: usize| {
                    self.index(i)
                        .unwrap()
                        .compose(other.index(i).unwrap())
                };
                Trace::lasso(
                    (0..stem).map(letter).collect(),
                    (stem..stem + period).map(letter).collect(),
                )
            }
            _ => Err(TraceError::ShapeMismatch),
        }
    }

    /// Every letter occurring in the trace.
    pub fn letter_set(&self) -> BTreeSet<&Valuation> {
        match self {
            Trace::Finite(l) => l.iter().collect(),
            Trace::Lasso { stem, period } => stem.iter().chain(period).collect(),
        }
    }

    /// A copy with every letter mapped through `f` (canonicalized again, since
    /// the map may merge letters).
    pub fn map_letters(&self, mut f: impl FnMut(&Valuation) -> Valuation) -> Trace {
        match self {
            Trace::Finite(l) => Trace::Finite(l.iter().map(f).collect()),
            Trace::Lasso { stem, period } => Trace::lasso(
                stem.iter().map(&mut f).collect(),
                period.iter().map(&mut f).collect(),
            )
            .expect("period stays nonempty"),
        }
    }

    /// Remove the letter at position `j` of the represented word. `None` when
    /// a finite trace has no position `j`.
    pub fn with_position_deleted(&self, j: usize) -> Option<Trace> {
        match self {
            Trace::Finite(l) => {
                if j >= l.len() {
                    return None;
                }
                let mut letters = l.clone();
                letters.remove(j);
                Some(Trace::Finite(letters))
            }
            Trace::Lasso { stem, period } => {
                let mut new_stem = stem.clone();
                if j < stem.len() {
                    new_stem.remove(j);
                } else {
                    let offset = j - stem.len();
                    let (copies, r) = (offset / period.len(), offset % period.len());
                    for _ in 0..copies {
                        new_stem.extend(period.iter().cloned());
                    }
                    new_stem.extend(period[..r].iter().cloned());
                    new_stem.extend(period[r + 1..].iter().cloned());
                }
                Some(Trace::lasso(new_stem, period.clone()).expect("period stays nonempty"))
            }
        }
    }
}

/// An infinite word of valuation sets, in the same canonical lasso form as
/// [`Trace`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValuationSetWord {
    stem: Vec<BTreeSet<Valuation>>,
    period: Vec<BTreeSet<Valuation>>,
}

impl ValuationSetWord {
    pub fn new(
        stem: Vec<BTreeSet<Valuation>>,
        period: Vec<BTreeSet<Valuation>>,
    ) -> Result<Self, TraceError> {
        if period.is_empty() {
            return Err(TraceError::EmptyPeriod);
        }
        let (stem, period) = canonical_lasso_parts(stem, period);
        Ok(ValuationSetWord { stem, period })
    }

    pub fn stem(&self) -> &[BTreeSet<Valuation>] {
        &self.stem
    }

    pub fn period(&self) -> &[BTreeSet<Valuation>] {
        &self.period
    }

}

impl std::ops::Index<usize> for ValuationSetWord {
    type Output = BTreeSet<Valuation>;

    fn index(&self, i: usize) -> &BTreeSet<Valuation> {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.period[(i - self.stem.len()) % self.period.len()]
        }
    }
}

/// A set of traces over a shared alphabet. Duplicates collapse (lassos compare
/// by represented word), so membership is set membership.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceSet {
    alphabet: Vec<String>,
    traces: Vec<Trace>,
}

impl TraceSet {
    /// Build a set; every letter of every trace must assign exactly the
    /// declared variables.
    pub fn new(alphabet: Vec<String>, mut traces: Vec<Trace>) -> Result<Self, TraceError> {
        let mut seen = BTreeSet::new();
        for var in &alphabet {
            if !seen.insert(var.as_str()) {
                return Err(TraceError::DuplicateVariable(var.clone()));
            }
        }
        for trace in &traces {
            let letters = trace.stem_letters().iter().chain(
                trace.period_letters().unwrap_or(&[]),
            );
            for letter in letters {
                if !letter.same_domain(&seen) {
                    return Err(TraceError::AlphabetMismatch {
                        expected: alphabet.clone(),
                        found: letter.vars().map(str::to_owned).collect(),
                    });
                }
            }
        }
        traces.sort();
        traces.dedup();
        Ok(TraceSet { alphabet, traces })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn contains(&self, trace: &Trace) -> bool {
        self.traces.binary_search(trace).is_ok()
    }

    /// Largest stem length (finite traces count their full length).
    pub fn max_stem(&self) -> usize {
        self.traces.iter().map(Trace::stem_len).max().unwrap_or(0)
    }

    /// Least common multiple of the lasso period lengths; 1 without lassos.
    pub fn lcm_periods(&self) -> usize {
        self.traces
            .iter()
            .filter_map(Trace::period_len)
            .fold(1usize, |acc, p| acc.lcm(&p))
    }

    /// Bound past which every lasso letter repeats: `max_stem + lcm_periods`.
    pub fn horizon(&self) -> usize {
        self.max_stem() + self.lcm_periods()
    }

    /// Drop `var` from the alphabet and from every letter.
    pub fn restrict(&self, var: &str) -> Result<TraceSet, TraceError> {
        if !self.alphabet.iter().any(|v| v == var) {
            return Err(TraceError::UnknownVariable(var.to_owned()));
        }
        let alphabet = self
            .alphabet
            .iter()
            .filter(|v| *v != var)
            .cloned()
            .collect();
        let traces = self
            .traces
            .iter()
            .map(|t| t.map_letters(|l| l.without(var)))
            .collect();
        TraceSet::new(alphabet, traces)
    }
}

/// The word of letter sets seen at each position: position `i` maps to the set
/// of letters of the member traces at `i`. All traces must be lassos.
pub fn point_interpretation(ts: &TraceSet) -> Result<ValuationSetWord, TraceError> {
    if ts.traces().iter().any(|t| !t.is_lasso()) {
        return Err(TraceError::FiniteTracePresent);
    }
    let stem = ts.max_stem();
    let period = ts.lcm_periods();
    let sets = |range: std::ops::Range<usize>| {
        range
            .map(|i| {
                ts.traces()
                    .iter()
                    .map(|t| t.index(i).unwrap().clone())
                    .collect::<BTreeSet<_>>()
            })
            .collect::<Vec<_>>()
    };
    ValuationSetWord::new(sets(0..stem), sets(stem..stem + period))
}

/// A trace set whose pointwise view is exactly `word`. Positions cycle through
/// their letter sets in order, with enough traces to cover every set.
pub fn trace_set_from_pointwise(word: &ValuationSetWord) -> Result<TraceSet, TraceError> {
    let positions: Vec<&BTreeSet<Valuation>> =
        word.stem().iter().chain(word.period()).collect();
    for (i, set) in positions.iter().enumerate() {
        if set.is_empty() {
            return Err(TraceError::EmptyPosition(i));
        }
    }
    let first = positions[0].iter().next().unwrap();
    let alphabet: Vec<String> = first.vars().map(str::to_owned).collect();
    let domain: BTreeSet<&str> = alphabet.iter().map(String::as_str).collect();
    for set in &positions {
        for letter in set.iter() {
            if !letter.same_domain(&domain) {
                return Err(TraceError::AlphabetMismatch {
                    expected: alphabet.clone(),
                    found: letter.vars().map(str::to_owned).collect(),
                });
            }
        }
    }
    let distinct: BTreeSet<&BTreeSet<Valuation>> = positions.iter().copied().collect();
    let widest = positions.iter().map(|s| s.len()).max().unwrap_or(0);
    let count = distinct.len().max(widest);
    let ordered: Vec<Vec<&Valuation>> = positions.iter().map(|s| s.iter().collect()).collect();
    let traces = (0..count)
        .map(|k| {
            let letter = |i: usize| ordered[i][k % ordered[i].len()].clone();
            let stem = (0..word.stem().len()).map(letter).collect();
            let period = (word.stem().len()..positions.len()).map(letter).collect();
            Trace::lasso(stem, period).expect("period stays nonempty")
        })
        .collect();
    TraceSet::new(alphabet, traces)
}
