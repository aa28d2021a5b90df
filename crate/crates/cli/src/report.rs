//! Rendering of check outcomes, as plain text or one JSON object.

use std::time::Duration;

use hytrace_core::equivalence::KPointOutcome;
use hytrace_core::independence::{PointViolation, SegmentViolation};
use hytrace_core::{KcOutcome, Trace, TwoStateFailure, TwoStateOutcome, WitnessBijection};
use serde_json::{json, Value};

use crate::format::{render_trace, NamedTraces};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Verdict {
        if holds {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::True => 0,
            Verdict::False => 1,
            Verdict::Unknown => 2,
        }
    }

    fn word(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        }
    }
}

/// What a check concluded and why, ready to print either way.
pub struct Report {
    pub check: &'static str,
    pub verdict: Verdict,
    pub detail: Option<String>,
    pub witness: Option<Value>,
    pub counterexample: Option<Value>,
}

impl Report {
    pub fn new(check: &'static str, verdict: Verdict) -> Report {
        Report {
            check,
            verdict,
            detail: None,
            witness: None,
            counterexample: None,
        }
    }

    /// Print to stdout and hand back the process exit code.
    pub fn print(&self, json: bool, elapsed: Duration) -> i32 {
        if json {
            let value = json!({
                "check": self.check,
                "result": self.verdict.word(),
                "witness": self.witness,
                "counterexample": self.counterexample,
                "detail": self.detail,
                "elapsed_ms": elapsed.as_millis() as u64,
            });
            println!("{value}");
        } else {
            println!("{}", self.verdict.word());
            if let Some(detail) = &self.detail {
                println!("{detail}");
            }
        }
        self.verdict.exit_code()
    }
}

/// Refers to traces by their file names, falling back to a `[...]` literal
/// for derived traces such as slices.
pub struct Namer<'a> {
    named: &'a NamedTraces,
}

impl<'a> Namer<'a> {
    pub fn new(named: &'a NamedTraces) -> Namer<'a> {
        Namer { named }
    }

    pub fn refer(&self, trace: &Trace) -> String {
        match self.named.name_of(trace) {
            Some(name) => name.to_owned(),
            None => format!("[{}]", render_trace(&self.named.alphabet, trace)),
        }
    }
}

fn assignment_text(pairs: &[(String, Trace)], namer: &Namer) -> String {
    pairs
        .iter()
        .map(|(var, trace)| format!("{var} = {}", namer.refer(trace)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn assignment_json(pairs: &[(String, Trace)], namer: &Namer) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|(var, trace)| json!({"trace_var": var, "trace": namer.refer(trace)}))
            .collect(),
    )
}

pub fn eval_report(holds: bool, evidence: &[(String, Trace)], namer: &Namer) -> Report {
    let mut report = Report::new("eval", Verdict::from_bool(holds));
    if !evidence.is_empty() {
        let text = assignment_text(evidence, namer);
        let value = assignment_json(evidence, namer);
        if holds {
            report.detail = Some(format!("witness: {text}"));
            report.witness = Some(value);
        } else {
            report.detail = Some(format!("counterexample: {text}"));
            report.counterexample = Some(value);
        }
    }
    report
}

fn point_failure(
    violation: &PointViolation,
    left_var: &str,
    right_var: &str,
    phase: Option<&str>,
    namer: &Namer,
) -> (String, Value) {
    let left = namer.refer(&violation.left);
    let right = namer.refer(&violation.right);
    let prefix = phase.map(|p| format!("{p} the action: ")).unwrap_or_default();
    let text = format!(
        "{prefix}at time {} no trace pairs {left_var} = {} (from {left}) with {right_var} = {} (from {right})",
        violation.time, violation.left_value as u8, violation.right_value as u8,
    );
    let value = json!({
        "kind": "point",
        "phase": phase,
        "time": violation.time,
        "left_var": left_var,
        "left_value": violation.left_value,
        "left_trace": left,
        "right_var": right_var,
        "right_value": violation.right_value,
        "right_trace": right,
    });
    (text, value)
}

fn segment_failure(
    violation: &SegmentViolation,
    left_var: &str,
    right_var: &str,
    phase: Option<&str>,
    namer: &Namer,
) -> (String, Value) {
    let left = namer.refer(&violation.left);
    let right = namer.refer(&violation.right);
    let prefix = phase.map(|p| format!("{p} the action: ")).unwrap_or_default();
    let text = format!(
        "{prefix}no single trace mirrors {left_var} of {left} and {right_var} of {right} over their shared times",
    );
    let value = json!({
        "kind": "segment",
        "phase": phase,
        "left_var": left_var,
        "left_trace": left,
        "right_var": right_var,
        "right_trace": right,
    });
    (text, value)
}

pub fn two_state_report(
    outcome: &TwoStateOutcome,
    x: &str,
    y: &str,
    z: &str,
    namer: &Namer,
) -> Report {
    match outcome {
        TwoStateOutcome::Holds { cuts } => {
            let mut report = Report::new("two-state", Verdict::True);
            if let Some(profile) = cuts {
                let listed = profile
                    .cuts
                    .iter()
                    .map(|(trace, cut)| format!("{} @ {cut}", namer.refer(trace)))
                    .collect::<Vec<_>>()
                    .join(", ");
                report.detail = Some(format!(
                    "cut profile within bound {}: {listed}",
                    profile.bound
                ));
                report.witness = Some(json!({
                    "bound": profile.bound,
                    "cuts": profile
                        .cuts
                        .iter()
                        .map(|(trace, cut)| json!({"trace": namer.refer(trace), "position": cut}))
                        .collect::<Vec<_>>(),
                }));
            }
            report
        }
        TwoStateOutcome::Fails(failure) => {
            let mut report = Report::new("two-state", Verdict::False);
            let (text, value) = match failure {
                TwoStateFailure::NotSynchronized { first_positions } => {
                    let listed = first_positions
                        .iter()
                        .map(|(trace, pos)| {
                            let pos = pos.map_or("never".to_owned(), |p| p.to_string());
                            format!("{} @ {pos}", namer.refer(trace))
                        })
                        .collect::<Vec<_>>()
                        .join(", ");
                    let value = json!({
                        "kind": "not-synchronized",
                        "first_positions": first_positions
                            .iter()
                            .map(|(trace, pos)| json!({"trace": namer.refer(trace), "position": pos}))
                            .collect::<Vec<_>>(),
                    });
                    (
                        format!("the action first rises at different positions: {listed}"),
                        value,
                    )
                }
                TwoStateFailure::BeforePoint(v) => point_failure(v, x, y, Some("before"), namer),
                TwoStateFailure::AfterPoint(v) => point_failure(v, x, z, Some("after"), namer),
                TwoStateFailure::BeforeSegment(v) => {
                    segment_failure(v, x, y, Some("before"), namer)
                }
                TwoStateFailure::AfterSegment(v) => segment_failure(v, x, z, Some("after"), namer),
                TwoStateFailure::NoCutProfile { bound } => (
                    format!("no cut profile exists within the decisive bound {bound}"),
                    json!({"kind": "no-cut-profile", "bound": bound}),
                ),
            };
            report.detail = Some(text);
            report.counterexample = Some(value);
            report
        }
        TwoStateOutcome::Unknown { bound } => {
            let mut report = Report::new("two-state", Verdict::Unknown);
            report.detail = Some(format!(
                "cut search exhausted at bound {bound}; raise --hidden-bound to decide"
            ));
            report
        }
    }
}

pub fn point_report(violation: Option<&PointViolation>, x: &str, y: &str, namer: &Namer) -> Report {
    let mut report = Report::new("independence", Verdict::from_bool(violation.is_none()));
    if let Some(violation) = violation {
        let (text, value) = point_failure(violation, x, y, None, namer);
        report.detail = Some(text);
        report.counterexample = Some(value);
    }
    report
}

pub fn segment_report(
    violation: Option<&SegmentViolation>,
    x: &str,
    y: &str,
    namer: &Namer,
) -> Report {
    let mut report = Report::new("independence", Verdict::from_bool(violation.is_none()));
    if let Some(violation) = violation {
        let (text, value) = segment_failure(violation, x, y, None, namer);
        report.detail = Some(text);
        report.counterexample = Some(value);
    }
    report
}

fn pairing_json(witness: &WitnessBijection, left: &Namer, right: &Namer) -> Value {
    Value::Array(
        witness
            .pairs()
            .iter()
            .map(|(l, r)| json!({"left": left.refer(l), "right": right.refer(r)}))
            .collect(),
    )
}

pub fn kc_report(outcome: &KcOutcome, left: &Namer, right: &Namer) -> Report {
    match outcome {
        KcOutcome::Equivalent { witness } => {
            let mut report = Report::new("equiv", Verdict::True);
            let listed = witness
                .pairs()
                .iter()
                .map(|(l, r)| format!("{} -> {}", left.refer(l), right.refer(r)))
                .collect::<Vec<_>>()
                .join(", ");
            report.detail = Some(format!("witness pairing: {listed}"));
            report.witness = Some(pairing_json(witness, left, right));
            report
        }
        KcOutcome::Distinguished {
            assignment,
            forward,
        } => {
            let mut report = Report::new("equiv", Verdict::False);
            let namer = if *forward { left } else { right };
            let side = if *forward { "first" } else { "second" };
            report.detail = Some(format!(
                "assignment {} from the {side} set flattens to a word its paired image does not match",
                assignment_text(assignment, namer),
            ));
            report.counterexample = Some(json!({
                "kind": "distinguished",
                "assignment": assignment_json(assignment, namer),
                "direction": if *forward { "forward" } else { "backward" },
            }));
            report
        }
        KcOutcome::SizeMismatch => {
            let mut report = Report::new("equiv", Verdict::False);
            report.detail = Some("the sets have different sizes".to_owned());
            report.counterexample = Some(json!({"kind": "size-mismatch"}));
            report
        }
        KcOutcome::NoWitnessFound => {
            let mut report = Report::new("equiv", Verdict::False);
            report.detail = Some("no pairing of the sets matches every assignment".to_owned());
            report.counterexample = Some(json!({"kind": "no-witness"}));
            report
        }
    }
}

pub fn kpoint_report(outcome: &KPointOutcome) -> Report {
    let mut report = Report::new("equiv", Verdict::from_bool(outcome.holds));
    if let Some(tuple) = &outcome.distinguishing_tuple {
        let listed = tuple
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        report.detail = Some(format!("value profiles differ at positions ({listed})"));
        report.counterexample = Some(json!({"kind": "positions", "positions": tuple}));
    }
    report
}
