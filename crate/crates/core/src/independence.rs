//! Independence of observation variables over trace sets, and the two-phase
//! checks that split every trace at an action variable.
//!
//! The point reading allows a fresh witness trace at every position; the
//! segment reading demands one witness per ordered pair of traces. The
//! two-phase check slices each trace at its first action position (sync
//! additionally requires that position to be shared, hidden searches for cut
//! positions instead of reading them off a variable) and requires x/y
//! independence before the cut and x/z independence after it.

use thiserror::Error;

use crate::hyperltl::{hyperltl_eval, HyperLtlError};
use crate::syntax::{
    ActionDiscipline, HyperAtom, HyperLtlFormula, IndependenceSemantics, Ltl, PropertySelector,
    Quantifier,
};
use crate::traces::{Trace, TraceError, TraceSet};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum IndependenceError {
    #[error("variable `{0}` is not part of the alphabet")]
    UnknownVariable(String),
    #[error("the sync and async disciplines need an action variable")]
    MissingActionVariable,
    #[error("the hidden discipline takes no action variable")]
    HiddenActionVariable,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Hyper(#[from] HyperLtlError),
}

/// A failed pointwise closure: at `time`, no member trace carries the first
/// variable's value from `left` together with the second variable's value
/// from `right`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointViolation {
    pub time: usize,
    pub left: Trace,
    pub right: Trace,
    pub left_value: bool,
    pub right_value: bool,
}

/// An ordered pair with no single witness trace covering all shared times.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SegmentViolation {
    pub left: Trace,
    pub right: Trace,
}

/// A cut position per trace, found by the hidden search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CutProfile {
    pub cuts: Vec<(Trace, usize)>,
    pub bound: usize,
}

/// Why a two-phase check failed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TwoStateFailure {
    /// Sync only: the action does not rise at one shared position.
    NotSynchronized {
        first_positions: Vec<(Trace, Option<usize>)>,
    },
    BeforePoint(PointViolation),
    AfterPoint(PointViolation),
    BeforeSegment(SegmentViolation),
    AfterSegment(SegmentViolation),
    /// Hidden only: the full decisive cut range was searched without success.
    NoCutProfile { bound: usize },
}

/// Result of a two-phase check. `Unknown` can only arise from a hidden search
/// whose bound did not cover the decisive cut range.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TwoStateOutcome {
    Holds { cuts: Option<CutProfile> },
    Fails(TwoStateFailure),
    Unknown { bound: usize },
}

impl TwoStateOutcome {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            TwoStateOutcome::Holds { .. } => Some(true),
            TwoStateOutcome::Fails(_) => Some(false),
            TwoStateOutcome::Unknown { .. } => None,
        }
    }
}

fn require_vars<'a>(
    ts: &TraceSet,
    vars: impl IntoIterator<Item = &'a str>,
) -> Result<(), IndependenceError> {
    for var in vars {
        if !ts.alphabet().iter().any(|v| v == var) {
            return Err(IndependenceError::UnknownVariable(var.to_owned()));
        }
    }
    Ok(())
}

fn value(trace: &Trace, i: usize, var: &str) -> bool {
    trace.index(i).is_some_and(|l| l.get(var) == Some(true))
}

/// First position where `var` holds, `None` when it never does.
pub fn min_index(trace: &Trace, var: &str) -> Option<usize> {
    let limit = match trace.finite_len() {
        Some(len) => len,
        None => trace.stem_len() + trace.period_len().unwrap(),
    };
    (0..limit).find(|&i| value(trace, i, var))
}

/// The strict prefixes up to each trace's first `var` position. Traces where
/// `var` never holds are dropped.
pub fn slice_before(ts: &TraceSet, var: &str) -> Result<TraceSet, IndependenceError> {
    require_vars(ts, [var])?;
    let kept = ts
        .traces()
        .iter()
        .filter_map(|t| min_index(t, var).map(|m| t.prefix(m)))
        .collect();
    Ok(TraceSet::new(ts.alphabet().to_vec(), kept)?)
}

/// The suffixes from each trace's first `var` position on. Traces where `var`
/// never holds are dropped.
pub fn slice_after(ts: &TraceSet, var: &str) -> Result<TraceSet, IndependenceError> {
    require_vars(ts, [var])?;
    let kept = ts
        .traces()
        .iter()
        .filter_map(|t| min_index(t, var).map(|m| t.suffix(m)))
        .collect();
    Ok(TraceSet::new(ts.alphabet().to_vec(), kept)?)
}

/// Earliest failure of the pointwise closure for `(x, y)`, scanning times in
/// order and trace pairs in set order.
pub fn point_violation(
    ts: &TraceSet,
    x: &str,
    y: &str,
) -> Result<Option<PointViolation>, IndependenceError> {
    require_vars(ts, [x, y])?;
    for i in 0..ts.horizon() {
        let members: Vec<&Trace> = ts.traces().iter().filter(|t| t.defined_at(i)).collect();
        for left in &members {
            for right in &members {
                let left_value = value(left, i, x);
                let right_value = value(right, i, y);
                let witnessed = members
                    .iter()
                    .any(|w| value(w, i, x) == left_value && value(w, i, y) == right_value);
                if !witnessed {
                    return Ok(Some(PointViolation {
                        time: i,
                        left: (*left).clone(),
                        right: (*right).clone(),
                        left_value,
                        right_value,
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn point_independent(ts: &TraceSet, x: &str, y: &str) -> Result<bool, IndependenceError> {
    Ok(point_violation(ts, x, y)?.is_none())
}

fn has_segment_witness(ts: &TraceSet, left: &Trace, right: &Trace, x: &str, y: &str) -> bool {
    let shared_finite = match (left.finite_len(), right.finite_len()) {
        (None, None) => None,
        (Some(l), None) | (None, Some(l)) => Some(l),
        (Some(l), Some(r)) => Some(l.min(r)),
    };
    ts.traces().iter().any(|w| match shared_finite {
        Some(shared) => {
            w.finite_len().is_none_or(|l| l >= shared)
                && (0..shared)
                    .all(|i| value(w, i, x) == value(left, i, x) && value(w, i, y) == value(right, i, y))
        }
        None => {
            if !w.is_lasso() {
                return false;
            }
            let stems = left.stem_len().max(right.stem_len()).max(w.stem_len());
            let span = [left, right, w]
                .iter()
                .map(|t| t.period_len().unwrap())
                .fold(1usize, num_integer::lcm);
            (0..stems + span)
                .all(|i| value(w, i, x) == value(left, i, x) && value(w, i, y) == value(right, i, y))
        }
    })
}

/// First ordered pair with no single witness for `(x, y)` over all shared
/// times.
pub fn segment_violation(
    ts: &TraceSet,
    x: &str,
    y: &str,
) -> Result<Option<SegmentViolation>, IndependenceError> {
    require_vars(ts, [x, y])?;
    for left in ts.traces() {
        for right in ts.traces() {
            if !has_segment_witness(ts, left, right, x, y) {
                return Ok(Some(SegmentViolation {
                    left: left.clone(),
                    right: right.clone(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn segment_independent(ts: &TraceSet, x: &str, y: &str) -> Result<bool, IndependenceError> {
    Ok(segment_violation(ts, x, y)?.is_none())
}

/// True when every trace sees `a` first at one shared position (vacuously on
/// the empty set).
pub fn sync_action(ts: &TraceSet, a: &str) -> Result<bool, IndependenceError> {
    require_vars(ts, [a])?;
    let mut mins = ts.traces().iter().map(|t| min_index(t, a));
    Ok(match mins.next() {
        None => true,
        Some(first) => first.is_some() && mins.all(|m| m == first),
    })
}

fn violation_outcome(
    semantics: IndependenceSemantics,
    before: &TraceSet,
    after: &TraceSet,
    x: &str,
    y: &str,
    z: &str,
) -> Result<TwoStateOutcome, IndependenceError> {
    let failure = match semantics {
        IndependenceSemantics::Point => point_violation(before, x, y)?
            .map(TwoStateFailure::BeforePoint)
            .or(point_violation(after, x, z)?.map(TwoStateFailure::AfterPoint)),
        IndependenceSemantics::Segment => segment_violation(before, x, y)?
            .map(TwoStateFailure::BeforeSegment)
            .or(segment_violation(after, x, z)?.map(TwoStateFailure::AfterSegment)),
    };
    Ok(match failure {
        Some(f) => TwoStateOutcome::Fails(f),
        None => TwoStateOutcome::Holds { cuts: None },
    })
}

/// Check the selected two-phase independence property. `hidden_bound` caps
/// the hidden cut search; it defaults to `horizon + lcm_periods`, which is
/// always decisive when every period has length one.
pub fn two_state(
    ts: &TraceSet,
    selector: &PropertySelector,
    hidden_bound: Option<usize>,
) -> Result<TwoStateOutcome, IndependenceError> {
    let (x, y, z) = (&selector.x, &selector.y, &selector.z);
    require_vars(ts, [x.as_str(), y.as_str(), z.as_str()])?;
    match selector.action {
        ActionDiscipline::Hidden => {
            if selector.a.is_some() {
                return Err(IndependenceError::HiddenActionVariable);
            }
            hidden_search(ts, selector.semantics, x, y, z, hidden_bound)
        }
        ActionDiscipline::Sync | ActionDiscipline::Async => {
            let a = selector
                .a
                .as_deref()
                .ok_or(IndependenceError::MissingActionVariable)?;
            require_vars(ts, [a])?;
            if selector.action == ActionDiscipline::Sync && !sync_action(ts, a)? {
                let first_positions = ts
                    .traces()
                    .iter()
                    .map(|t| (t.clone(), min_index(t, a)))
                    .collect();
                return Ok(TwoStateOutcome::Fails(TwoStateFailure::NotSynchronized {
                    first_positions,
                }));
            }
            let before = slice_before(ts, a)?;
            let after = slice_after(ts, a)?;
            violation_outcome(selector.semantics, &before, &after, x, y, z)
        }
    }
}

/// Per-trace value tables used by the hidden cut search. Times are absolute;
/// codes pack the two checked variables into two bits.
struct HiddenTables {
    xy: Vec<Vec<u8>>,
    xz: Vec<Vec<u8>>,
    defined: Vec<Vec<bool>>,
    /// Finite length per trace, `usize::MAX` for lassos.
    len: Vec<usize>,
    after_span: usize,
}

fn pair_closure_holds(codes: impl Iterator<Item = u8> + Clone) -> bool {
    let mut avail = 0u8;
    let mut firsts = 0u8;
    let mut seconds = 0u8;
    for code in codes {
        avail |= 1 << code;
        firsts |= 1 << (code >> 1);
        seconds |= 1 << (code & 1);
    }
    for f in 0..2u8 {
        for s in 0..2u8 {
            if firsts & (1 << f) != 0
                && seconds & (1 << s) != 0
                && avail & (1 << ((f << 1) | s)) == 0
            {
                return false;
            }
        }
    }
    true
}

impl HiddenTables {
    fn build(ts: &TraceSet, x: &str, y: &str, z: &str, search_hi: usize) -> HiddenTables {
        let after_span = ts.max_stem() + ts.lcm_periods();
        let table_len = search_hi + after_span + 1;
        let mut xy = Vec::new();
        let mut xz = Vec::new();
        let mut defined = Vec::new();
        let mut len = Vec::new();
        for t in ts.traces() {
            let mut txy = vec![0u8; table_len];
            let mut txz = vec![0u8; table_len];
            let mut tdef = vec![false; table_len];
            for i in 0..table_len {
                if let Some(letter) = t.index(i) {
                    tdef[i] = true;
                    let bit = |v: &str| u8::from(letter.get(v) == Some(true));
                    txy[i] = (bit(x) << 1) | bit(y);
                    txz[i] = (bit(x) << 1) | bit(z);
                }
            }
            xy.push(txy);
            xz.push(txz);
            defined.push(tdef);
            len.push(t.finite_len().unwrap_or(usize::MAX));
        }
        HiddenTables {
            xy,
            xz,
            defined,
            len,
            after_span,
        }
    }

    fn count(&self) -> usize {
        self.len.len()
    }

    fn point_ok(&self, cuts: &[usize]) -> bool {
        let max_cut = cuts.iter().copied().max().unwrap_or(0);
        for i in 0..max_cut {
            let members = (0..self.count())
                .filter(|&t| cuts[t] > i && self.defined[t][i])
                .map(|t| self.xy[t][i]);
            if !pair_closure_holds(members) {
                return false;
            }
        }
        for r in 0..self.after_span {
            let members = (0..self.count())
                .filter(|&t| self.defined[t][cuts[t] + r])
                .map(|t| self.xz[t][cuts[t] + r]);
            if !pair_closure_holds(members) {
                return false;
            }
        }
        true
    }

    fn segment_ok(&self, cuts: &[usize]) -> bool {
        let n = self.count();
        let before_len: Vec<usize> = (0..n).map(|t| cuts[t].min(self.len[t])).collect();
        for left in 0..n {
            for right in 0..n {
                let shared = before_len[left].min(before_len[right]);
                let witnessed = (0..n).any(|w| {
                    before_len[w] >= shared
                        && (0..shared).all(|i| {
                            self.xy[w][i] >> 1 == self.xy[left][i] >> 1
                                && self.xy[w][i] & 1 == self.xy[right][i] & 1
                        })
                });
                if !witnessed {
                    return false;
                }
            }
        }
        let after_len: Vec<usize> = (0..n)
            .map(|t| {
                if self.len[t] == usize::MAX {
                    usize::MAX
                } else {
                    self.len[t].saturating_sub(cuts[t])
                }
            })
            .collect();
        for left in 0..n {
            for right in 0..n {
                let shared = after_len[left].min(after_len[right]);
                let range = shared.min(self.after_span);
                let witnessed = (0..n).any(|w| {
                    after_len[w] >= shared
                        && (0..range).all(|r| {
                            let wv = self.xz[w][cuts[w] + r];
                            wv >> 1 == self.xz[left][cuts[left] + r] >> 1
                                && wv & 1 == self.xz[right][cuts[right] + r] & 1
                        })
                });
                if !witnessed {
                    return false;
                }
            }
        }
        true
    }
}

fn hidden_search(
    ts: &TraceSet,
    semantics: IndependenceSemantics,
    x: &str,
    y: &str,
    z: &str,
    requested_bound: Option<usize>,
) -> Result<TwoStateOutcome, IndependenceError> {
    let bound = requested_bound.unwrap_or(ts.horizon() + ts.lcm_periods());
    // with all periods of length one, any valid profile can be clamped to
    // max_stem + 1 without changing either slice check, so searching that far
    // decides the property
    let decisive_cap = (ts.lcm_periods() == 1).then(|| ts.max_stem() + 1);
    let search_hi = decisive_cap.map_or(bound, |cap| cap.min(bound));
    let count = ts.len();
    if count == 0 {
        return Ok(TwoStateOutcome::Holds {
            cuts: Some(CutProfile {
                cuts: Vec::new(),
                bound,
            }),
        });
    }
    let tables = HiddenTables::build(ts, x, y, z, search_hi);
    let mut cuts = vec![0usize; count];
    loop {
        let ok = match semantics {
            IndependenceSemantics::Point => tables.point_ok(&cuts),
            IndependenceSemantics::Segment => tables.segment_ok(&cuts),
        };
        if ok {
            return Ok(TwoStateOutcome::Holds {
                cuts: Some(CutProfile {
                    cuts: ts.traces().iter().cloned().zip(cuts).collect(),
                    bound,
                }),
            });
        }
        let mut pos = 0;
        while pos < count && cuts[pos] == search_hi {
            cuts[pos] = 0;
            pos += 1;
        }
        if pos == count {
            break;
        }
        cuts[pos] += 1;
    }
    Ok(if decisive_cap == Some(search_hi) {
        TwoStateOutcome::Fails(TwoStateFailure::NoCutProfile { bound })
    } else {
        TwoStateOutcome::Unknown { bound }
    })
}

fn hatom(var: &str, trace_var: &str) -> Ltl<HyperAtom> {
    Ltl::Atom(HyperAtom::new(var, trace_var))
}

/// The sentence asserting segment-style two-phase independence for trace
/// sets whose action rises synchronously: one witness matches x/y strictly
/// before the shared action position, another matches x/z from it on.
pub fn sync_segment_formula(x: &str, y: &str, z: &str, a: &str) -> HyperLtlFormula {
    let before = Ltl::conj([
        Ltl::not(hatom(a, "p")),
        Ltl::not(hatom(a, "q")),
        Ltl::iff(hatom(x, "p"), hatom(x, "w1")),
        Ltl::iff(hatom(y, "q"), hatom(y, "w1")),
    ]);
    let from_action = Ltl::conj([
        hatom(a, "p"),
        hatom(a, "q"),
        Ltl::globally(Ltl::conj([
            Ltl::iff(hatom(x, "p"), hatom(x, "w2")),
            Ltl::iff(hatom(z, "q"), hatom(z, "w2")),
        ])),
    ]);
    HyperLtlFormula {
        prefix: vec![
            (Quantifier::Forall, "p".to_owned()),
            (Quantifier::Forall, "q".to_owned()),
            (Quantifier::Exists, "w1".to_owned()),
            (Quantifier::Exists, "w2".to_owned()),
        ],
        body: Ltl::until(before, from_action),
    }
}

/// Evaluate [`sync_segment_formula`] over `ts` through the sentence
/// evaluator.
pub fn sync_segment_formula_check(
    ts: &TraceSet,
    x: &str,
    y: &str,
    z: &str,
    a: &str,
) -> Result<bool, IndependenceError> {
    require_vars(ts, [x, y, z, a])?;
    Ok(hyperltl_eval(&sync_segment_formula(x, y, z, a), ts)?.holds)
}

/// Point-style counterpart of [`sync_segment_formula_check`], evaluated
/// directly with bounded time quantifiers: some position `j` is the shared
/// first action position, the x/y closure holds pointwise before `j`, and
/// the x/z closure holds pointwise from `j` on.
pub fn sync_point_formula_check(
    ts: &TraceSet,
    x: &str,
    y: &str,
    z: &str,
    a: &str,
) -> Result<bool, IndependenceError> {
    require_vars(ts, [x, y, z, a])?;
    let traces = ts.traces();
    let max_stem = ts.max_stem();
    let lcm = ts.lcm_periods();
    'candidate: for j in 0..ts.horizon() {
        for p in traces {
            if !value(p, j, a) {
                continue 'candidate;
            }
        }
        for i in 0..j {
            for p in traces {
                if value(p, i, a) {
                    continue 'candidate;
                }
            }
            for p in traces {
                for q in traces {
                    let want_x = value(p, i, x);
                    let want_y = value(q, i, y);
                    let witnessed = traces
                        .iter()
                        .any(|w| value(w, i, x) == want_x && value(w, i, y) == want_y);
                    if !witnessed {
                        continue 'candidate;
                    }
                }
            }
        }
        for k in j..j.max(max_stem) + lcm {
            for p in traces {
                for q in traces {
                    let want_x = value(p, k, x);
                    let want_z = value(q, k, z);
                    let witnessed = traces
                        .iter()
                        .any(|w| value(w, k, x) == want_x && value(w, k, z) == want_z);
                    if !witnessed {
                        continue 'candidate;
                    }
                }
            }
        }
        return Ok(true);
    }
    Ok(false)
}
