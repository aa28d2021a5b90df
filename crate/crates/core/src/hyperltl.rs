//! Evaluation of trace-quantified sentences over a trace set.
//!
//! Two deliberately independent routes compute the same truth value:
//! [`hyperltl_eval`] enumerates the quantifier prefix and hands the flattened
//! assignment to the single-trace evaluator, while [`eval_with_assignment`]
//! walks the satisfaction clauses directly, bounding time quantifiers by the
//! joint stem and period structure of the assigned traces.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ltl::ltl_eval;
use crate::syntax::{HyperAtom, HyperLtlFormula, Ltl, Quantifier};
use crate::traces::{Trace, TraceError, TraceSet, Valuation};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum HyperLtlError {
    #[error("atom variable `{0}` is not in the trace set alphabet")]
    AlphabetMismatch(String),
    #[error("trace variable `{0}` has no binding")]
    UnboundTraceVariable(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// A partial map from trace variables to traces.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TraceAssignment {
    map: BTreeMap<String, Trace>,
}

impl TraceAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Trace)>) -> Self {
        TraceAssignment {
            map: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// Bind `var`, returning the binding it replaced.
    pub fn bind(&mut self, var: impl Into<String>, trace: Trace) -> Option<Trace> {
        self.map.insert(var.into(), trace)
    }

    pub fn unbind(&mut self, var: &str) -> Option<Trace> {
        self.map.remove(var)
    }

    pub fn get(&self, var: &str) -> Option<&Trace> {
        self.map.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Trace)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Name of the flattened column holding `var` of the trace bound to
/// `trace_var`. `@` cannot occur in identifiers, so these never collide with
/// source-level variables.
pub fn flat_atom_name(var: &str, trace_var: &str) -> String {
    format!("{var}@{trace_var}")
}

/// Rewrite a quantifier-free body over the flattened column names.
pub fn flatten_formula(body: &Ltl<HyperAtom>) -> Ltl<String> {
    body.map_atoms(&mut |a| flat_atom_name(&a.var, &a.trace_var))
}

/// Combine all assigned traces into one trace over the flattened columns.
///
/// The empty assignment flattens to the lasso repeating the empty valuation.
/// All assigned traces must share a shape: lassos combine on the joint stem
/// and period lcm, finite traces must have equal length.
pub fn flatten(assignment: &TraceAssignment) -> Result<Trace, TraceError> {
    let mut renamed = assignment.iter().map(|(trace_var, trace)| {
        trace.map_letters(|letter| letter.rename(|var| flat_atom_name(var, trace_var)))
    });
    match renamed.next() {
        None => Trace::lasso(Vec::new(), vec![Valuation::new()]),
        Some(first) => renamed.try_fold(first, |acc, t| acc.compose(&t)),
    }
}

/// Outcome of evaluating a sentence, with bindings for the leading quantifier
/// block: witnesses for a true existential block, failing choices for a false
/// universal block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HyperVerdict {
    pub holds: bool,
    pub evidence: Vec<(String, Trace)>,
}

fn check_atoms(body: &Ltl<HyperAtom>, ts: &TraceSet) -> Result<(), HyperLtlError> {
    for atom in body.atoms() {
        if !ts.alphabet().contains(&atom.var) {
            return Err(HyperLtlError::AlphabetMismatch(atom.var.clone()));
        }
    }
    Ok(())
}

fn check_closed(formula: &HyperLtlFormula) -> Result<(), HyperLtlError> {
    let bound: Vec<&str> = formula.prefix.iter().map(|(_, v)| v.as_str()).collect();
    for atom in formula.body.atoms() {
        if !bound.contains(&atom.trace_var.as_str()) {
            return Err(HyperLtlError::UnboundTraceVariable(atom.trace_var.clone()));
        }
    }
    Ok(())
}

fn eval_prefix(
    prefix: &[(Quantifier, String)],
    flat_body: &Ltl<String>,
    ts: &TraceSet,
    assignment: &mut TraceAssignment,
) -> Result<bool, HyperLtlError> {
    match prefix.split_first() {
        None => {
            let flat = flatten(assignment)?;
            Ok(ltl_eval(flat_body, &flat, 0))
        }
        Some(((quant, var), rest)) => {
            for trace in ts.traces() {
                let saved = assignment.bind(var.clone(), trace.clone());
                let holds = eval_prefix(rest, flat_body, ts, assignment)?;
                match saved {
                    Some(old) => {
                        assignment.bind(var.clone(), old);
                    }
                    None => {
                        assignment.unbind(var);
                    }
                }
                match quant {
                    Quantifier::Exists if holds => return Ok(true),
                    Quantifier::Forall if !holds => return Ok(false),
                    _ => {}
                }
            }
            Ok(matches!(quant, Quantifier::Forall))
        }
    }
}

/// Evaluate a closed sentence over `ts` by prefix enumeration and flattening.
pub fn hyperltl_eval(
    formula: &HyperLtlFormula,
    ts: &TraceSet,
) -> Result<HyperVerdict, HyperLtlError> {
    check_closed(formula)?;
    check_atoms(&formula.body, ts)?;
    let flat_body = flatten_formula(&formula.body);
    let mut assignment = TraceAssignment::new();
    let holds = eval_prefix(&formula.prefix, &flat_body, ts, &mut assignment)?;

    // walk the leading quantifier block that drives the verdict, fixing one
    // binding at a time
    let block = if holds {
        Quantifier::Exists
    } else {
        Quantifier::Forall
    };
    let mut evidence = Vec::new();
    let mut fixed = TraceAssignment::new();
    let mut rest: &[(Quantifier, String)] = &formula.prefix;
    while let Some(((quant, var), tail)) = rest.split_first() {
        if *quant != block || ts.is_empty() {
            break;
        }
        let mut chosen = None;
        for trace in ts.traces() {
            let saved = fixed.bind(var.clone(), trace.clone());
            let sub = eval_prefix(tail, &flat_body, ts, &mut fixed)?;
            match saved {
                Some(old) => {
                    fixed.bind(var.clone(), old);
                }
                None => {
                    fixed.unbind(var);
                }
            }
            if sub == holds {
                chosen = Some(trace.clone());
                break;
            }
        }
        match chosen {
            Some(trace) => {
                evidence.push((var.clone(), trace.clone()));
                fixed.bind(var.clone(), trace);
                rest = tail;
            }
            None => break,
        }
    }
    Ok(HyperVerdict { holds, evidence })
}

/// Shape summary of all traces in play for the direct evaluator.
enum Shape {
    /// All lassos; scan limits come from the joint stem and period lcm.
    Lassos { max_stem: usize, lcm: usize },
    /// All finite of one length; truncated semantics applies.
    Finite { len: usize },
}

impl Shape {
    fn of(assignment: &TraceAssignment, ts: &TraceSet) -> Result<Shape, HyperLtlError> {
        let all: Vec<&Trace> = assignment
            .iter()
            .map(|(_, t)| t)
            .chain(ts.traces())
            .collect();
        if all.iter().all(|t| t.is_lasso()) {
            let max_stem = all.iter().map(|t| t.stem_len()).max().unwrap_or(0);
            let lcm = all
                .iter()
                .filter_map(|t| t.period_len())
                .fold(1usize, num_integer::lcm);
            Ok(Shape::Lassos { max_stem, lcm })
        } else if all.iter().all(|t| !t.is_lasso()) {
            let mut lens = all.iter().map(|t| t.finite_len().unwrap());
            let len = lens.next().unwrap_or(0);
            if lens.all(|l| l == len) {
                Ok(Shape::Finite { len })
            } else {
                Err(TraceError::ShapeMismatch.into())
            }
        } else {
            Err(TraceError::ShapeMismatch.into())
        }
    }

    /// Past this position nothing new can happen when scanning from `i`.
    fn scan_limit(&self, i: usize) -> usize {
        match *self {
            Shape::Lassos { max_stem, lcm } => i.max(max_stem) + lcm,
            Shape::Finite { len } => len.max(i),
        }
    }

    fn defined_at(&self, i: usize) -> bool {
        match *self {
            Shape::Lassos { .. } => true,
            Shape::Finite { len } => i < len,
        }
    }
}

fn eval_clauses(
    formula: &Ltl<HyperAtom>,
    assignment: &TraceAssignment,
    i: usize,
    shape: &Shape,
) -> Result<bool, HyperLtlError> {
    match formula {
        Ltl::True => Ok(true),
        Ltl::False => Ok(false),
        Ltl::Atom(atom) => {
            let trace = assignment
                .get(&atom.trace_var)
                .ok_or_else(|| HyperLtlError::UnboundTraceVariable(atom.trace_var.clone()))?;
            Ok(trace
                .index(i)
                .is_some_and(|letter| letter.get(&atom.var) == Some(true)))
        }
        Ltl::Not(p) => Ok(!eval_clauses(p, assignment, i, shape)?),
        Ltl::And(p, q) => Ok(eval_clauses(p, assignment, i, shape)?
            && eval_clauses(q, assignment, i, shape)?),
        Ltl::Or(p, q) => Ok(eval_clauses(p, assignment, i, shape)?
            || eval_clauses(q, assignment, i, shape)?),
        Ltl::Implies(p, q) => Ok(!eval_clauses(p, assignment, i, shape)?
            || eval_clauses(q, assignment, i, shape)?),
        Ltl::Iff(p, q) => Ok(eval_clauses(p, assignment, i, shape)?
            == eval_clauses(q, assignment, i, shape)?),
        Ltl::Next(p) => {
            if !shape.defined_at(i + 1) {
                return Ok(false);
            }
            eval_clauses(p, assignment, i + 1, shape)
        }
        Ltl::Until(p, q) => {
            for j in i..shape.scan_limit(i) {
                if eval_clauses(q, assignment, j, shape)? {
                    return Ok(true);
                }
                if !eval_clauses(p, assignment, j, shape)? {
                    return Ok(false);
                }
            }
            Ok(false)
        }
        Ltl::Globally(p) => {
            for j in i..shape.scan_limit(i) {
                if !eval_clauses(p, assignment, j, shape)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Ltl::Finally(q) => {
            for j in i..shape.scan_limit(i) {
                if eval_clauses(q, assignment, j, shape)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

fn eval_quantified(
    prefix: &[(Quantifier, String)],
    body: &Ltl<HyperAtom>,
    assignment: &mut TraceAssignment,
    ts: &TraceSet,
    i: usize,
    shape: &Shape,
) -> Result<bool, HyperLtlError> {
    match prefix.split_first() {
        None => eval_clauses(body, assignment, i, shape),
        Some(((quant, var), rest)) => {
            for trace in ts.traces() {
                let saved = assignment.bind(var.clone(), trace.clone());
                let holds = eval_quantified(rest, body, assignment, ts, i, shape)?;
                match saved {
                    Some(old) => {
                        assignment.bind(var.clone(), old);
                    }
                    None => {
                        assignment.unbind(var);
                    }
                }
                match quant {
                    Quantifier::Exists if holds => return Ok(true),
                    Quantifier::Forall if !holds => return Ok(false),
                    _ => {}
                }
            }
            Ok(matches!(quant, Quantifier::Forall))
        }
    }
}

/// Evaluate `formula` at position `i` under an existing assignment, directly
/// from the satisfaction clauses. Free trace variables of the body must be
/// bound by `assignment` or by the formula's own prefix (quantifiers range
/// over `ts`).
pub fn eval_with_assignment(
    formula: &HyperLtlFormula,
    assignment: &TraceAssignment,
    ts: &TraceSet,
    i: usize,
) -> Result<bool, HyperLtlError> {
    check_atoms(&formula.body, ts)?;
    let shape = Shape::of(assignment, ts)?;
    let mut assignment = assignment.clone();
    eval_quantified(&formula.prefix, &formula.body, &mut assignment, ts, i, &shape)
}
