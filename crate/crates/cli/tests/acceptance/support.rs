//! Seeded generators and the pass/fail harness for the acceptance battery.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hytrace_core::traces::ValuationSetWord;
use hytrace_core::{
    HyperAtom, HyperLtlFormula, Ltl, Quantifier, Trace, TraceSet, Valuation,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Run one named criterion, print its verdict line, and fail the test on a
/// broken check or a blown budget.
pub fn criterion(name: &str, budget: Duration, body: impl FnOnce() -> Result<(), String>) {
    let started = Instant::now();
    let outcome = body();
    let elapsed = started.elapsed();
    let over_budget = elapsed > budget;
    match (&outcome, over_budget) {
        (Ok(()), false) => println!("acceptance {name}: PASS ({:.2}s)", elapsed.as_secs_f64()),
        (Ok(()), true) => println!(
            "acceptance {name}: FAIL (budget {budget:?} exceeded at {elapsed:?})"
        ),
        (Err(why), _) => println!("acceptance {name}: FAIL ({why})"),
    }
    if let Err(why) = outcome {
        panic!("acceptance {name}: {why}");
    }
    assert!(
        !over_budget,
        "acceptance {name}: budget {budget:?} exceeded at {elapsed:?}"
    );
}

pub const CORPUS_VARS: [&str; 4] = ["a", "x", "y", "z"];

/// Compact bit rendering of a trace for failure messages: one group of bits
/// per position in alphabet order, the period (if any) in parentheses.
pub fn render_word(alphabet: &[String], trace: &Trace) -> String {
    let letter = |i: usize| -> String {
        let v = trace.index(i).expect("position inside the representation");
        alphabet
            .iter()
            .map(|var| if v.get(var) == Some(true) { '1' } else { '0' })
            .collect()
    };
    let stem: Vec<String> = (0..trace.stem_len()).map(letter).collect();
    match trace.period_len() {
        None => stem.join(" "),
        Some(p) => {
            let period: Vec<String> = (trace.stem_len()..trace.stem_len() + p)
                .map(letter)
                .collect();
            format!("{} ({})", stem.join(" "), period.join(" "))
        }
    }
}

pub fn random_letter(rng: &mut impl Rng, vars: &[&str]) -> Valuation {
    Valuation::from_pairs(vars.iter().map(|v| (v.to_string(), rng.gen_bool(0.5))))
}

pub fn random_lasso(rng: &mut impl Rng, vars: &[&str], max_stem: usize, max_period: usize) -> Trace {
    let stem = (0..rng.gen_range(0..=max_stem))
        .map(|_| random_letter(rng, vars))
        .collect();
    let period = (0..rng.gen_range(1..=max_period))
        .map(|_| random_letter(rng, vars))
        .collect();
    Trace::lasso(stem, period).unwrap()
}

pub fn random_lasso_set(rng: &mut impl Rng, vars: &[&str], max_size: usize) -> TraceSet {
    let traces = (0..rng.gen_range(1..=max_size))
        .map(|_| random_lasso(rng, vars, 3, 2))
        .collect();
    TraceSet::new(vars.iter().map(|v| v.to_string()).collect(), traces).unwrap()
}

/// Finite traces of one shared length, so the set flattens.
pub fn random_finite_set(rng: &mut impl Rng, vars: &[&str], max_size: usize) -> TraceSet {
    let len = rng.gen_range(1..=4);
    let traces = (0..rng.gen_range(1..=max_size))
        .map(|_| Trace::finite((0..len).map(|_| random_letter(rng, vars)).collect()))
        .collect();
    TraceSet::new(vars.iter().map(|v| v.to_string()).collect(), traces).unwrap()
}

fn random_position_set(rng: &mut impl Rng) -> BTreeSet<Valuation> {
    (0..rng.gen_range(1..=4))
        .map(|_| random_letter(rng, &["x", "y"]))
        .collect()
}

pub fn random_set_word(rng: &mut impl Rng) -> ValuationSetWord {
    let stem = (0..rng.gen_range(0..=2))
        .map(|_| random_position_set(rng))
        .collect();
    let period = (0..rng.gen_range(1..=2))
        .map(|_| random_position_set(rng))
        .collect();
    ValuationSetWord::new(stem, period).unwrap()
}

/// A set whose traces all see the action variable first at one shared
/// position, so the synchronized checks get past their gate.
pub fn sync_biased_set(rng: &mut impl Rng) -> TraceSet {
    let first = rng.gen_range(0..=2usize);
    let traces = (0..rng.gen_range(1..=4))
        .map(|_| {
            let stem_len = rng.gen_range(first + 1..=3.max(first + 1));
            let stem = (0..stem_len)
                .map(|j| {
                    let mut letter = random_letter(rng, &CORPUS_VARS);
                    if j <= first {
                        letter.set("a", j == first);
                    }
                    letter
                })
                .collect();
            let period = (0..rng.gen_range(1..=2))
                .map(|_| random_letter(rng, &CORPUS_VARS))
                .collect();
            Trace::lasso(stem, period).unwrap()
        })
        .collect();
    TraceSet::new(CORPUS_VARS.iter().map(|v| v.to_string()).collect(), traces).unwrap()
}

/// 250 unconstrained sets, 250 synchronized ones, and the empty set.
pub fn sync_corpus() -> Vec<TraceSet> {
    let mut rng = rng(0x5EED_0600);
    let mut sets: Vec<TraceSet> = (0..250)
        .map(|_| random_lasso_set(&mut rng, &CORPUS_VARS, 4))
        .collect();
    sets.extend((0..250).map(|_| sync_biased_set(&mut rng)));
    sets.push(TraceSet::new(CORPUS_VARS.iter().map(|v| v.to_string()).collect(), vec![]).unwrap());
    sets
}

fn random_atom(rng: &mut impl Rng, vars: &[&str], trace_vars: &[String]) -> Ltl<HyperAtom> {
    let var = vars[rng.gen_range(0..vars.len())];
    let tv = &trace_vars[rng.gen_range(0..trace_vars.len())];
    Ltl::Atom(HyperAtom::new(var, tv))
}

/// Propositional formulas only: connectives over atoms and constants.
pub fn random_prop(
    rng: &mut impl Rng,
    vars: &[&str],
    trace_vars: &[String],
    depth: usize,
) -> Ltl<HyperAtom> {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..8) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => random_atom(rng, vars, trace_vars),
        };
    }
    let sub = |rng: &mut _| random_prop(rng, vars, trace_vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => Ltl::not(sub(rng)),
        1 => Ltl::and(sub(rng), sub(rng)),
        2 => Ltl::or(sub(rng), sub(rng)),
        3 => Ltl::implies(sub(rng), sub(rng)),
        _ => Ltl::iff(sub(rng), sub(rng)),
    }
}

/// Temporal formulas whose nesting of the next operator stays within
/// `next_budget`.
pub fn random_temporal(
    rng: &mut impl Rng,
    vars: &[&str],
    trace_vars: &[String],
    depth: usize,
    next_budget: usize,
) -> Ltl<HyperAtom> {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..8) {
            0 => Ltl::True,
            1 => Ltl::False,
            _ => random_atom(rng, vars, trace_vars),
        };
    }
    let sub =
        |rng: &mut _, budget| random_temporal(rng, vars, trace_vars, depth - 1, budget);
    let choice = rng.gen_range(0..if next_budget > 0 { 9 } else { 8 });
    match choice {
        0 => Ltl::not(sub(rng, next_budget)),
        1 => Ltl::and(sub(rng, next_budget), sub(rng, next_budget)),
        2 => Ltl::or(sub(rng, next_budget), sub(rng, next_budget)),
        3 => Ltl::implies(sub(rng, next_budget), sub(rng, next_budget)),
        4 => Ltl::iff(sub(rng, next_budget), sub(rng, next_budget)),
        5 => Ltl::globally(sub(rng, next_budget)),
        6 => Ltl::finally(sub(rng, next_budget)),
        7 => Ltl::until(sub(rng, next_budget), sub(rng, next_budget)),
        _ => Ltl::next(sub(rng, next_budget - 1)),
    }
}

fn random_prefix(rng: &mut impl Rng, max_quants: usize) -> Vec<(Quantifier, String)> {
    (0..rng.gen_range(1..=max_quants))
        .map(|i| {
            let quant = if rng.gen_bool(0.5) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            (quant, format!("p{}", i + 1))
        })
        .collect()
}

/// A sentence whose body is one outer `G` over a propositional formula.
pub fn random_g_sentence(rng: &mut impl Rng, vars: &[&str], max_quants: usize) -> HyperLtlFormula {
    let prefix = random_prefix(rng, max_quants);
    let trace_vars: Vec<String> = prefix.iter().map(|(_, v)| v.clone()).collect();
    let body = Ltl::globally(random_prop(rng, vars, &trace_vars, 3));
    HyperLtlFormula { prefix, body }
}

/// A sentence with arbitrary temporal body but next nesting at most one.
pub fn random_shallow_sentence(
    rng: &mut impl Rng,
    vars: &[&str],
    max_quants: usize,
) -> HyperLtlFormula {
    let prefix = random_prefix(rng, max_quants);
    let trace_vars: Vec<String> = prefix.iter().map(|(_, v)| v.clone()).collect();
    let body = random_temporal(rng, vars, &trace_vars, 3, 1);
    HyperLtlFormula { prefix, body }
}

/// Every `k`-tuple over `0..count`, in odometer order.
pub fn index_tuples(count: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|tuple| {
                (0..count).map(move |i| {
                    let mut next = tuple.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out
}
