//! LTL evaluation over single traces.
//!
//! Finite traces use truncated semantics: atoms are false past the end, `X`
//! is false at the last position, `U` and `F` need a witness inside the
//! trace, `G` holds vacuously beyond the end. Lassos are evaluated exactly
//! with per-subformula truth tables over stem plus one period.

use std::collections::HashMap;

use thiserror::Error;

use crate::syntax::Ltl;
use crate::traces::Trace;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LtlError {
    #[error("truth tables need a lasso trace")]
    FiniteTrace,
}

/// Truth values of every subformula at every position of stem plus one
/// period. Positions past the table wrap into the period.
#[derive(Clone, Debug)]
pub struct LassoTable {
    stem_len: usize,
    period_len: usize,
    rows: Vec<(Ltl<String>, Vec<bool>)>,
}

impl LassoTable {
    pub fn stem_len(&self) -> usize {
        self.stem_len
    }

    /// Number of tabulated positions: stem plus one period.
    pub fn positions(&self) -> usize {
        self.stem_len + self.period_len
    }

    fn normalize(&self, i: usize) -> usize {
        if i < self.positions() {
            i
        } else {
            self.stem_len + (i - self.stem_len) % self.period_len
        }
    }

    /// Truth of the whole formula at position `i`.
    pub fn value(&self, i: usize) -> bool {
        let row = &self.rows.last().expect("at least the root row").1;
        row[self.normalize(i)]
    }

    /// Truth of a subformula at position `i`, when it occurs in the formula.
    pub fn value_of(&self, phi: &Ltl<String>, i: usize) -> Option<bool> {
        let at = self.normalize(i);
        self.rows
            .iter()
            .find(|(sub, _)| sub == phi)
            .map(|(_, vals)| vals[at])
    }
}

struct TableBuilder<'a> {
    trace: &'a Trace,
    stem_len: usize,
    period_len: usize,
    seen: HashMap<Ltl<String>, usize>,
    rows: Vec<(Ltl<String>, Vec<bool>)>,
}

impl<'a> TableBuilder<'a> {
    fn positions(&self) -> usize {
        self.stem_len + self.period_len
    }

    fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem_len
        }
    }

    fn row(&mut self, phi: &Ltl<String>) -> usize {
        if let Some(&k) = self.seen.get(phi) {
            return k;
        }
        let n = self.positions();
        let vals = match phi {
            Ltl::True => vec![true; n],
            Ltl::False => vec![false; n],
            Ltl::Atom(var) => (0..n)
                .map(|i| self.trace.index(i).unwrap().get(var) == Some(true))
                .collect(),
            Ltl::Not(p) => {
                let p = self.row(p);
                self.rows[p].1.iter().map(|b| !b).collect()
            }
            Ltl::And(p, q) => self.zip(p, q, |a, b| a && b),
            Ltl::Or(p, q) => self.zip(p, q, |a, b| a || b),
            Ltl::Implies(p, q) => self.zip(p, q, |a, b| !a || b),
            Ltl::Iff(p, q) => self.zip(p, q, |a, b| a == b),
            Ltl::Next(p) => {
                let p = self.row(p);
                (0..n).map(|i| self.rows[p].1[self.next_pos(i)]).collect()
            }
            Ltl::Until(p, q) => {
                let (p, q) = (self.row(p), self.row(q));
                let (pv, qv) = (self.rows[p].1.clone(), self.rows[q].1.clone());
                self.backward(qv.clone(), |vals, i, next| {
                    qv[i] || (pv[i] && vals[next])
                })
            }
            Ltl::Globally(p) => {
                let p = self.row(p);
                let pv = self.rows[p].1.clone();
                self.backward(pv.clone(), |vals, i, next| pv[i] && vals[next])
            }
            Ltl::Finally(q) => {
                let q = self.row(q);
                let qv = self.rows[q].1.clone();
                self.backward(qv.clone(), |vals, i, next| qv[i] || vals[next])
            }
        };
        self.rows.push((phi.clone(), vals));
        self.seen.insert(phi.clone(), self.rows.len() - 1);
        self.rows.len() - 1
    }

    fn zip(&mut self, p: &Ltl<String>, q: &Ltl<String>, op: fn(bool, bool) -> bool) -> Vec<bool> {
        let (p, q) = (self.row(p), self.row(q));
        self.rows[p]
            .1
            .iter()
            .zip(&self.rows[q].1)
            .map(|(&a, &b)| op(a, b))
            .collect()
    }

    /// Solve a one-step recurrence: fixpoint iteration around the loop, then
    /// one backward pass through the stem.
    fn backward(
        &self,
        init: Vec<bool>,
        step: impl Fn(&[bool], usize, usize) -> bool,
    ) -> Vec<bool> {
        let mut vals = init;
        for _ in 0..self.period_len {
            let prev = vals.clone();
            for (i, val) in vals.iter_mut().enumerate().skip(self.stem_len) {
                *val = step(&prev, i, self.next_pos(i));
            }
        }
        for i in (0..self.stem_len).rev() {
            vals[i] = step(&vals, i, i + 1);
        }
        vals
    }
}

/// Tabulate every subformula of `phi` over the lasso `trace`.
pub fn ltl_eval_lasso_table(phi: &Ltl<String>, trace: &Trace) -> Result<LassoTable, LtlError> {
    let period_len = trace.period_len().ok_or(LtlError::FiniteTrace)?;
    let mut builder = TableBuilder {
        trace,
        stem_len: trace.stem_len(),
        period_len,
        seen: HashMap::new(),
        rows: Vec::new(),
    };
    builder.row(phi);
    Ok(LassoTable {
        stem_len: builder.stem_len,
        period_len: builder.period_len,
        rows: builder.rows,
    })
}

/// Per-subformula values over a finite trace, plus the constant value every
/// subformula takes at and past the end.
struct FiniteTable {
    len: usize,
    rows: Vec<(Vec<bool>, bool)>,
    root: usize,
}

impl FiniteTable {
    fn build(phi: &Ltl<String>, trace: &Trace) -> FiniteTable {
        let len = trace.finite_len().expect("finite trace");
        let mut seen: HashMap<&Ltl<String>, usize> = HashMap::new();
        let mut rows: Vec<(Vec<bool>, bool)> = Vec::new();
        let root = Self::row(phi, trace, len, &mut seen, &mut rows);
        FiniteTable { len, rows, root }
    }

    fn row<'a>(
        phi: &'a Ltl<String>,
        trace: &Trace,
        len: usize,
        seen: &mut HashMap<&'a Ltl<String>, usize>,
        rows: &mut Vec<(Vec<bool>, bool)>,
    ) -> usize {
        if let Some(&k) = seen.get(phi) {
            return k;
        }
        let mut sub = |p| Self::row(p, trace, len, seen, rows);
        let entry: (Vec<bool>, bool) = match phi {
            Ltl::True => (vec![true; len], true),
            Ltl::False => (vec![false; len], false),
            Ltl::Atom(var) => (
                (0..len)
                    .map(|i| trace.index(i).unwrap().get(var) == Some(true))
                    .collect(),
                false,
            ),
            Ltl::Not(p) => {
                let p = sub(p);
                let (vals, beyond) = &rows[p];
                (vals.iter().map(|b| !b).collect(), !beyond)
            }
            Ltl::And(p, q) => Self::zip(sub(p), sub(q), rows, |a, b| a && b),
            Ltl::Or(p, q) => Self::zip(sub(p), sub(q), rows, |a, b| a || b),
            Ltl::Implies(p, q) => Self::zip(sub(p), sub(q), rows, |a, b| !a || b),
            Ltl::Iff(p, q) => Self::zip(sub(p), sub(q), rows, |a, b| a == b),
            Ltl::Next(p) => {
                let p = sub(p);
                let vals = &rows[p].0;
                (
                    (0..len)
                        .map(|i| if i + 1 < len { vals[i + 1] } else { false })
                        .collect(),
                    false,
                )
            }
            Ltl::Until(p, q) => {
                let (p, q) = (sub(p), sub(q));
                let mut vals = vec![false; len];
                for i in (0..len).rev() {
                    let ahead = if i + 1 < len { vals[i + 1] } else { false };
                    vals[i] = rows[q].0[i] || (rows[p].0[i] && ahead);
                }
                (vals, false)
            }
            Ltl::Globally(p) => {
                let p = sub(p);
                let mut vals = vec![false; len];
                for i in (0..len).rev() {
                    let ahead = if i + 1 < len { vals[i + 1] } else { true };
                    vals[i] = rows[p].0[i] && ahead;
                }
                (vals, true)
            }
            Ltl::Finally(q) => {
                let q = sub(q);
                let mut vals = vec![false; len];
                for i in (0..len).rev() {
                    let ahead = if i + 1 < len { vals[i + 1] } else { false };
                    vals[i] = rows[q].0[i] || ahead;
                }
                (vals, false)
            }
        };
        rows.push(entry);
        seen.insert(phi, rows.len() - 1);
        rows.len() - 1
    }

    fn zip(
        p: usize,
        q: usize,
        rows: &[(Vec<bool>, bool)],
        op: fn(bool, bool) -> bool,
    ) -> (Vec<bool>, bool) {
        let vals = rows[p]
            .0
            .iter()
            .zip(&rows[q].0)
            .map(|(&a, &b)| op(a, b))
            .collect();
        (vals, op(rows[p].1, rows[q].1))
    }

    fn value(&self, i: usize) -> bool {
        let (vals, beyond) = &self.rows[self.root];
        if i < self.len {
            vals[i]
        } else {
            *beyond
        }
    }
}

/// Truth of `phi` on `trace` at position `i`.
pub fn ltl_eval(phi: &Ltl<String>, trace: &Trace, i: usize) -> bool {
    match trace {
        Trace::Finite(_) => FiniteTable::build(phi, trace).value(i),
        Trace::Lasso { .. } => ltl_eval_lasso_table(phi, trace)
            .expect("lasso trace")
            .value(i),
    }
}
