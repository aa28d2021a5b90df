//! The acceptance battery: one test per claim the tool is expected to
//! reproduce, each printing a single PASS/FAIL line. Run with
//! `cargo test -p hytrace-cli --test acceptance -- --nocapture` to see them.

macro_rules! check {
    ($cond:expr, $($why:tt)+) => {
        if !$cond {
            return Err(format!($($why)+));
        }
    };
}

mod oracle;
mod support;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use hytrace_core::equivalence::n_redundant;
use hytrace_core::hyperltl::flat_atom_name;
use hytrace_core::independence::point_violation;
use hytrace_core::traces::{point_interpretation, trace_set_from_pointwise, ValuationSetWord};
use hytrace_core::{
    async_family, eval_with_assignment, flatten, hyperltl_eval, kc_equivalent, ltl_eval,
    point_family, state_change_example, sync_action, sync_point_formula_check,
    sync_segment_formula_check, two_state, ActionDiscipline, HyperLtlFormula,
    IndependenceSemantics, PropertySelector, Trace, TraceAssignment, TraceEquivalence,
    TraceSet, TwoStateFailure, TwoStateOutcome, Valuation, WitnessBijection,
};
use rand::Rng;

use support::{criterion, rng, CORPUS_VARS};

fn selector(
    semantics: IndependenceSemantics,
    action: ActionDiscipline,
    a: Option<&str>,
) -> PropertySelector {
    PropertySelector {
        semantics,
        action,
        x: "x".to_owned(),
        y: "y".to_owned(),
        z: "z".to_owned(),
        a: a.map(str::to_owned),
    }
}

fn assignment_over(ts: &TraceSet, tuple: &[usize]) -> TraceAssignment {
    TraceAssignment::from_pairs(
        tuple
            .iter()
            .enumerate()
            .map(|(slot, &index)| (format!("p{}", slot + 1), ts.traces()[index].clone())),
    )
}

#[test]
fn point_family_first_break() {
    criterion("point-family", Duration::from_secs(3), || {
        for n in 1..=3usize {
            let single = Instant::now();
            let fam = point_family(n).map_err(|e| e.to_string())?;
            let base = fam.base_set();
            let variant = fam.variant_set().ok_or("missing variant set")?;
            let clean = point_violation(&base, "x", "y").map_err(|e| e.to_string())?;
            check!(clean.is_none(), "n={n}: the base set should close pointwise");
            let broken = point_violation(&variant, "x", "y").map_err(|e| e.to_string())?;
            let hit = broken.ok_or(format!("n={n}: the variant set should not close"))?;
            check!(
                hit.time == n + 1,
                "n={n}: first failing time {} instead of {}",
                hit.time,
                n + 1
            );
            check!(
                single.elapsed() < Duration::from_secs(1),
                "n={n}: one instance took over a second"
            );
        }
        Ok(())
    });
}

#[test]
fn point_family_letterset_contexts() {
    criterion("point-family-kc", Duration::from_secs(5), || {
        for n in 1..=2usize {
            let fam = point_family(n).map_err(|e| e.to_string())?;
            let base = fam.base_set();
            let variant = fam.variant_set().ok_or("missing variant set")?;
            let witness = fam.witness_bijection().ok_or("missing witness")?;
            let outcome = kc_equivalent(
                &base,
                &variant,
                n,
                &TraceEquivalence::GloballyLetters,
                Some(&witness),
            )
            .map_err(|e| e.to_string())?;
            check!(outcome.holds(), "n={n}: {outcome:?}");
        }
        Ok(())
    });
}

#[test]
fn async_family_redundant_position() {
    criterion("async-redundancy", Duration::from_secs(10), || {
        for n in 0..=2usize {
            let base = async_family(n).base_set();
            let cut = 2 * n + 11;
            for k in 1..=3usize {
                for tuple in support::index_tuples(base.len(), k) {
                    let flat =
                        flatten(&assignment_over(&base, &tuple)).map_err(|e| e.to_string())?;
                    check!(
                        n_redundant(&flat, cut, n),
                        "n={n} k={k} tuple {tuple:?}: position {cut} not redundant"
                    );
                }
            }
        }
        Ok(())
    });
}

#[test]
fn async_family_two_state_split() {
    criterion("async-two-state", Duration::from_secs(60), || {
        let mut faults = Vec::new();
        for n in 0..=1usize {
            let fam = async_family(n);
            let base = fam.base_set();
            let variant = fam.variant_set().ok_or("missing variant set")?;
            let held = two_state(
                &base,
                &selector(IndependenceSemantics::Segment, ActionDiscipline::Async, Some("a")),
                None,
            )
            .map_err(|e| e.to_string())?;
            if held.as_bool() != Some(true) {
                let detail = match &held {
                    TwoStateOutcome::Fails(TwoStateFailure::AfterSegment(v)) => format!(
                        "after-slice pair without a shared witness: [{}] / [{}]",
                        support::render_word(base.alphabet(), &v.left),
                        support::render_word(base.alphabet(), &v.right),
                    ),
                    other => format!("{other:?}"),
                };
                faults.push(format!(
                    "n={n}: segment reading should hold on the base set, but {detail}"
                ));
            }
            let broken = two_state(
                &variant,
                &selector(IndependenceSemantics::Point, ActionDiscipline::Async, Some("a")),
                None,
            )
            .map_err(|e| e.to_string())?;
            if broken.as_bool() != Some(false) {
                faults.push(format!(
                    "n={n}: point reading should fail on the variant set, got {broken:?}"
                ));
            }
            let hidden_set = variant.restrict("a").map_err(|e| e.to_string())?;
            let hidden = two_state(
                &hidden_set,
                &selector(IndependenceSemantics::Point, ActionDiscipline::Hidden, None),
                Some(5 * n + 24),
            )
            .map_err(|e| e.to_string())?;
            if !matches!(
                hidden,
                TwoStateOutcome::Fails(TwoStateFailure::NoCutProfile { .. })
            ) {
                faults.push(format!(
                    "n={n}: the hidden search should rule every cut profile out, got {hidden:?}"
                ));
            }
        }
        check!(faults.is_empty(), "{}", faults.join("; "));
        Ok(())
    });
}

#[test]
fn async_family_stutter_contexts() {
    criterion("async-kc", Duration::from_secs(60), || {
        for n in 0..=1usize {
            let fam = async_family(n);
            let base = fam.base_set();
            let variant = fam.variant_set().ok_or("missing variant set")?;
            let witness = fam.witness_bijection().ok_or("missing witness")?;
            let drop_action = |t: &Trace| t.map_letters(|l| l.without("a"));
            let reduced_base = base.restrict("a").map_err(|e| e.to_string())?;
            let reduced_variant = variant.restrict("a").map_err(|e| e.to_string())?;
            let reduced_pairs = witness
                .pairs()
                .iter()
                .map(|(l, r)| (drop_action(l), drop_action(r)))
                .collect();
            let reduced_witness =
                WitnessBijection::new(&reduced_base, &reduced_variant, reduced_pairs)
                    .map_err(|e| e.to_string())?;
            for k in 1..=3usize {
                let relation = TraceEquivalence::NStutterOneStep(n);
                let full = kc_equivalent(&base, &variant, k, &relation, Some(&witness))
                    .map_err(|e| e.to_string())?;
                check!(full.holds(), "n={n} k={k}: {full:?}");
                let reduced = kc_equivalent(
                    &reduced_base,
                    &reduced_variant,
                    k,
                    &relation,
                    Some(&reduced_witness),
                )
                .map_err(|e| e.to_string())?;
                check!(reduced.holds(), "n={n} k={k} without the action: {reduced:?}");
            }
        }
        Ok(())
    });
}

fn formula_vs_search(
    name: &str,
    semantics: IndependenceSemantics,
    by_formula: impl Fn(&TraceSet) -> Result<bool, String>,
) -> Result<(), String> {
    for (index, ts) in support::sync_corpus().into_iter().enumerate() {
        let formula = by_formula(&ts)?;
        let search = two_state(
            &ts,
            &selector(semantics, ActionDiscipline::Sync, Some("a")),
            None,
        )
        .map_err(|e| e.to_string())?
        .as_bool()
        .ok_or(format!("set {index}: the synchronized check cannot be open"))?;
        check!(
            formula == search,
            "set {index}: {name} formula says {formula}, search says {search}"
        );
    }
    Ok(())
}

#[test]
fn sync_segment_formula_matches_search() {
    criterion("sync-segment-formula", Duration::from_secs(300), || {
        formula_vs_search("segment", IndependenceSemantics::Segment, |ts| {
            sync_segment_formula_check(ts, "x", "y", "z", "a").map_err(|e| e.to_string())
        })
    });
}

#[test]
fn sync_point_formula_matches_search() {
    criterion("sync-point-formula", Duration::from_secs(300), || {
        formula_vs_search("point", IndependenceSemantics::Point, |ts| {
            sync_point_formula_check(ts, "x", "y", "z", "a").map_err(|e| e.to_string())
        })
    });
}

fn agree_everywhere(
    label: &str,
    sentences: &[HyperLtlFormula],
    left: &TraceSet,
    right: &TraceSet,
) -> Result<(), String> {
    for (index, sentence) in sentences.iter().enumerate() {
        let on_left = hyperltl_eval(sentence, left).map_err(|e| e.to_string())?.holds;
        let on_right = hyperltl_eval(sentence, right).map_err(|e| e.to_string())?.holds;
        check!(
            on_left == on_right,
            "{label}, sentence {index}: verdicts split ({on_left} against {on_right})"
        );
    }
    Ok(())
}

#[test]
fn families_resist_random_sentences() {
    criterion("formula-battery", Duration::from_secs(600), || {
        for n in 1..=2usize {
            let mut rng = rng(0xBA77E21 + n as u64);
            let fam = point_family(n).map_err(|e| e.to_string())?;
            let base = fam.base_set();
            let variant = fam.variant_set().ok_or("missing variant set")?;
            let sentences: Vec<HyperLtlFormula> = (0..50)
                .map(|_| support::random_g_sentence(&mut rng, &["x", "y"], n))
                .collect();
            agree_everywhere(&format!("globally class, n={n}"), &sentences, &base, &variant)?;
        }
        let mut rng = rng(0xBA77E22);
        let fam = async_family(1);
        let base = fam.base_set();
        let variant = fam.variant_set().ok_or("missing variant set")?;
        let sentences: Vec<HyperLtlFormula> = (0..50)
            .map(|_| support::random_shallow_sentence(&mut rng, &CORPUS_VARS, 2))
            .collect();
        agree_everywhere("shallow class", &sentences, &base, &variant)?;
        let reduced_base = base.restrict("a").map_err(|e| e.to_string())?;
        let reduced_variant = variant.restrict("a").map_err(|e| e.to_string())?;
        let reduced_sentences: Vec<HyperLtlFormula> = (0..50)
            .map(|_| support::random_shallow_sentence(&mut rng, &["x", "y", "z"], 2))
            .collect();
        agree_everywhere(
            "shallow class without the action",
            &reduced_sentences,
            &reduced_base,
            &reduced_variant,
        )?;
        Ok(())
    });
}

#[test]
fn both_evaluation_paths_agree() {
    criterion("eval-paths", Duration::from_secs(60), || {
        let mut rng = rng(0x9EA7);
        let vars = ["x", "y"];
        for case in 0..1000 {
            let ts = if case % 2 == 0 {
                support::random_lasso_set(&mut rng, &vars, 3)
            } else {
                support::random_finite_set(&mut rng, &vars, 3)
            };
            let quantifiers = rng.gen_range(1..=2usize);
            let trace_vars: Vec<String> =
                (1..=quantifiers).map(|q| format!("p{q}")).collect();
            let body = support::random_temporal(&mut rng, &vars, &trace_vars, 3, 2);
            let tuple: Vec<usize> = (0..quantifiers)
                .map(|_| rng.gen_range(0..ts.len()))
                .collect();
            let assignment = assignment_over(&ts, &tuple);
            let i = rng.gen_range(0..=ts.horizon());
            let flat_trace = flatten(&assignment).map_err(|e| e.to_string())?;
            let flat_body =
                body.map_atoms(&mut |atom| flat_atom_name(&atom.var, &atom.trace_var));
            let by_flattening = ltl_eval(&flat_body, &flat_trace, i);
            let formula = HyperLtlFormula {
                prefix: vec![],
                body,
            };
            let direct = eval_with_assignment(&formula, &assignment, &ts, i)
                .map_err(|e| e.to_string())?;
            check!(
                by_flattening == direct,
                "case {case}: flattening says {by_flattening}, direct clauses say {direct}"
            );
        }
        Ok(())
    });
}

#[test]
fn bounded_oracle_agrees_when_decided() {
    criterion("ltl-oracle", Duration::from_secs(60), || {
        let mut rng = rng(0x10AC1E);
        let vars = ["x", "y"];
        let mut decided = 0usize;
        for case in 0..1000 {
            let trace = support::random_lasso(&mut rng, &vars, 3, 3);
            let trace_vars = vec!["p1".to_owned()];
            let phi = support::random_temporal(&mut rng, &vars, &trace_vars, 3, 2)
                .map_atoms(&mut |atom| atom.var.clone());
            let span = trace.stem_len() + trace.period_len().unwrap();
            let window =
                trace.stem_len() + trace.period_len().unwrap() * (phi.subformula_count() + 2);
            let prefix = trace.unroll(window);
            let i = rng.gen_range(0..span);
            if let Some(answer) = oracle::bounded_eval(&phi, &prefix, i).decided() {
                decided += 1;
                let exact = ltl_eval(&phi, &trace, i);
                check!(
                    answer == exact,
                    "case {case}: oracle decided {answer}, exact evaluation {exact}"
                );
            }
        }
        check!(
            decided >= 200,
            "only {decided} of 1000 bounded runs decided; the oracle has gone inert"
        );
        Ok(())
    });
}

#[test]
fn pointwise_view_round_trips() {
    criterion("pointwise-roundtrip", Duration::from_secs(60), || {
        let letter = |x: bool, y: bool| {
            Valuation::from_pairs([("x".to_owned(), x), ("y".to_owned(), y)])
        };
        let ts = TraceSet::new(
            vec!["x".to_owned(), "y".to_owned()],
            vec![
                Trace::lasso(vec![letter(false, false)], vec![letter(true, true)])
                    .map_err(|e| e.to_string())?,
                Trace::lasso(vec![letter(true, false)], vec![letter(false, false)])
                    .map_err(|e| e.to_string())?,
            ],
        )
        .map_err(|e| e.to_string())?;
        let word = point_interpretation(&ts).map_err(|e| e.to_string())?;
        let expected = ValuationSetWord::new(
            vec![BTreeSet::from([letter(false, false), letter(true, false)])],
            vec![BTreeSet::from([letter(true, true), letter(false, false)])],
        )
        .map_err(|e| e.to_string())?;
        check!(word == expected, "fixed instance: got {word:?}");

        let mut rng = rng(0x9017_0207);
        for case in 0..200 {
            let word = support::random_set_word(&mut rng);
            let through = point_interpretation(
                &trace_set_from_pointwise(&word).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            check!(
                through == word,
                "case {case}: round trip moved {word:?} to {through:?}"
            );
        }
        Ok(())
    });
}

#[test]
fn state_change_example_end_to_end() {
    criterion("table1-cli", Duration::from_secs(60), || {
        let fam = state_change_example();
        let ts = fam.base_set();
        let synced = sync_action(&ts, "state").map_err(|e| e.to_string())?;
        check!(!synced, "the state change should not be synchronized");
        let verdict = two_state(
            &ts,
            &PropertySelector {
                semantics: IndependenceSemantics::Segment,
                action: ActionDiscipline::Async,
                x: "x".to_owned(),
                y: "y".to_owned(),
                z: "z".to_owned(),
                a: Some("state".to_owned()),
            },
            None,
        )
        .map_err(|e| e.to_string())?;
        check!(
            verdict.as_bool() == Some(true),
            "the segment reading should hold, got {verdict:?}"
        );

        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let table = dir.path().join("table1.traces");
        let generated = Command::new(env!("CARGO_BIN_EXE_hytrace"))
            .args(["gen-family", "--family", "table1", "--out"])
            .arg(&table)
            .output()
            .map_err(|e| e.to_string())?;
        check!(generated.status.success(), "gen-family failed");
        let run = |args: &[&str], file: &std::path::Path| {
            Command::new(env!("CARGO_BIN_EXE_hytrace"))
                .args(args)
                .arg(file)
                .output()
                .map(|out| out.status.code())
                .map_err(|e| e.to_string())
        };
        let holds = run(
            &[
                "check", "two-state", "--semantics", "segment", "--action", "async", "--x", "x",
                "--y", "y", "--z", "z", "--a", "state",
            ],
            &table,
        )?;
        check!(holds == Some(0), "asynchronous segment run exited {holds:?}");
        let fails = run(
            &[
                "check", "two-state", "--semantics", "segment", "--action", "sync", "--x", "x",
                "--y", "y", "--z", "z", "--a", "state",
            ],
            &table,
        )?;
        check!(fails == Some(1), "synchronized run exited {fails:?}");
        let open = dir.path().join("open.traces");
        std::fs::write(
            &open,
            "vars: x y z\ntrace u1: ; 100\ntrace u2: ; 001 000\n",
        )
        .map_err(|e| e.to_string())?;
        let unknown = run(
            &[
                "check", "two-state", "--semantics", "point", "--action", "hidden", "--x", "x",
                "--y", "y", "--z", "z", "--hidden-bound", "0",
            ],
            &open,
        )?;
        check!(unknown == Some(2), "capped hidden run exited {unknown:?}");
        let usage = run(
            &[
                "check", "two-state", "--semantics", "segment", "--action", "sync", "--x", "x",
                "--y", "y", "--z", "z",
            ],
            &table,
        )?;
        check!(usage == Some(3), "missing action variable exited {usage:?}");
        Ok(())
    });
}
