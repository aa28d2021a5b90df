//! Generated trace-set families with tunable size, used as worked examples
//! and as regression inputs for the independence and equivalence checks.

use thiserror::Error;

use crate::equivalence::WitnessBijection;
use crate::traces::{Trace, TraceSet, Valuation};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("the pointwise family needs n >= 1")]
    PointNeedsPositive,
}

/// A named base set, an optional named variant set, and an optional pairing
/// of base names to variant names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratedFamily {
    pub alphabet: Vec<String>,
    pub base: Vec<(String, Trace)>,
    pub variant: Option<Vec<(String, Trace)>>,
    pub witness: Option<Vec<(String, String)>>,
}

impl GeneratedFamily {
    pub fn base_set(&self) -> TraceSet {
        named_set(&self.alphabet, &self.base)
    }

    pub fn variant_set(&self) -> Option<TraceSet> {
        self.variant.as_ref().map(|v| named_set(&self.alphabet, v))
    }

    /// The witness pairing resolved to traces, when the family carries one.
    pub fn witness_bijection(&self) -> Option<WitnessBijection> {
        let witness = self.witness.as_ref()?;
        let variant = self.variant.as_ref()?;
        let pairs = witness
            .iter()
            .map(|(from, to)| {
                let left = lookup(&self.base, from);
                let right = lookup(variant, to);
                (left.clone(), right.clone())
            })
            .collect();
        Some(
            WitnessBijection::new(&self.base_set(), &self.variant_set().unwrap(), pairs)
                .expect("family witnesses pair the sets exactly"),
        )
    }
}

fn named_set(alphabet: &[String], named: &[(String, Trace)]) -> TraceSet {
    TraceSet::new(
        alphabet.to_vec(),
        named.iter().map(|(_, t)| t.clone()).collect(),
    )
    .expect("family traces share the family alphabet")
}

fn lookup<'a>(named: &'a [(String, Trace)], name: &str) -> &'a Trace {
    &named
        .iter()
        .find(|(n, _)| n == name)
        .expect("family witness names its own traces")
        .1
}

fn letter(vars: &[&str], pattern: &str) -> Valuation {
    Valuation::from_pairs(
        vars.iter()
            .zip(pattern.chars())
            .map(|(v, c)| (v.to_string(), c == '1')),
    )
}

fn block(vars: &[&str], pattern: &str, count: usize) -> Vec<Valuation> {
    vec![letter(vars, pattern); count]
}

fn strings(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|v| v.to_string()).collect()
}

const POINT_VARS: &[&str] = &["x", "y"];
const ASYNC_VARS: &[&str] = &["a", "x", "y", "z"];
const STATE_VARS: &[&str] = &["state", "x", "y", "z"];

/// Pointwise-independent base set against a variant that breaks the closure
/// at time `n + 1`: a shared core of one long spike and staggered single
/// observations, extended either with doubled observations at time `n` or
/// with single ones.
pub fn point_family(n: usize) -> Result<GeneratedFamily, FamilyError> {
    if n == 0 {
        return Err(FamilyError::PointNeedsPositive);
    }
    let v = POINT_VARS;
    let quiet = block(v, "00", 1);
    let tail = |stem: Vec<Valuation>| Trace::lasso(stem, quiet.clone()).unwrap();
    let mut shared = vec![(
        "spike".to_owned(),
        tail(block(v, "11", n + 2)),
    )];
    for j in 0..n {
        shared.push((
            format!("x_at{j}"),
            tail([block(v, "00", j), block(v, "10", 1)].concat()),
        ));
        shared.push((
            format!("y_at{j}"),
            tail([block(v, "00", j), block(v, "01", 1)].concat()),
        ));
    }
    let mut base = shared.clone();
    base.push((
        "x_twice".to_owned(),
        tail([block(v, "00", n), block(v, "10", 2)].concat()),
    ));
    base.push((
        "y_twice".to_owned(),
        tail([block(v, "00", n), block(v, "01", 2)].concat()),
    ));
    let mut variant = shared.clone();
    variant.push((
        "x_once".to_owned(),
        tail([block(v, "00", n), block(v, "10", 1)].concat()),
    ));
    variant.push((
        "y_once".to_owned(),
        tail([block(v, "00", n), block(v, "01", 1)].concat()),
    ));
    let mut witness: Vec<(String, String)> = shared
        .iter()
        .map(|(name, _)| (name.clone(), name.clone()))
        .collect();
    witness.push(("x_twice".to_owned(), "x_once".to_owned()));
    witness.push(("y_twice".to_owned(), "y_once".to_owned()));
    Ok(GeneratedFamily {
        alphabet: strings(v),
        base,
        variant: Some(variant),
        witness: Some(witness),
    })
}

/// Four-trace base set whose action positions stagger, against a variant
/// with one redundant position deleted from each trace. The deleted position
/// `2n + 11` sits inside a run of `n + 2` equal letters in every trace.
pub fn async_family(n: usize) -> GeneratedFamily {
    let v = ASYNC_VARS;
    let m = n + 4;
    let tau0 = [
        block(v, "1110", 1),
        block(v, "1000", m),
        block(v, "1001", m),
        block(v, "1111", 1),
        block(v, "1001", m),
        block(v, "1000", m),
    ]
    .concat();
    let tau1 = [
        block(v, "1111", 1),
        block(v, "1001", m),
        block(v, "1000", m),
        block(v, "1110", 1),
        block(v, "1000", m),
        block(v, "1001", m),
    ]
    .concat();
    let base = vec![
        (
            "t1".to_owned(),
            Trace::lasso([block(v, "0000", 1), tau1.clone()].concat(), block(v, "1001", 1))
                .unwrap(),
        ),
        (
            "t2".to_owned(),
            Trace::lasso(
                [block(v, "0010", 1), tau1, block(v, "1001", m)].concat(),
                block(v, "1111", 1),
            )
            .unwrap(),
        ),
        (
            "t3".to_owned(),
            Trace::lasso([block(v, "0000", m), tau0.clone()].concat(), block(v, "1001", 1))
                .unwrap(),
        ),
        (
            "t4".to_owned(),
            Trace::lasso([block(v, "0010", m), tau0].concat(), block(v, "1111", 1)).unwrap(),
        ),
    ];
    let variant = base
        .iter()
        .map(|(name, t)| {
            (
                name.clone(),
                t.with_position_deleted(2 * n + 11)
                    .expect("the deleted position is within every stem"),
            )
        })
        .collect();
    let witness = base.iter().map(|(n, _)| (n.clone(), n.clone())).collect();
    GeneratedFamily {
        alphabet: strings(v),
        base,
        variant: Some(variant),
        witness: Some(witness),
    }
}

/// Fixed four-trace example over a state-change variable: the state rises at
/// different times per trace, so only the asynchronous reading applies.
pub fn state_change_example() -> GeneratedFamily {
    let v = STATE_VARS;
    let base = vec![
        (
            "tau1".to_owned(),
            Trace::lasso(block(v, "0000", 1), block(v, "1110", 1)).unwrap(),
        ),
        (
            "tau2".to_owned(),
            Trace::lasso(block(v, "0101", 1), block(v, "1110", 1)).unwrap(),
        ),
        (
            "tau3".to_owned(),
            Trace::lasso(block(v, "0101", 2), block(v, "1000", 1)).unwrap(),
        ),
        (
            "tau4".to_owned(),
            Trace::lasso(
                [block(v, "0000", 1), block(v, "0101", 1), block(v, "0000", 1)].concat(),
                block(v, "1110", 1),
            )
            .unwrap(),
        ),
    ];
    GeneratedFamily {
        alphabet: strings(v),
        base,
        variant: None,
        witness: None,
    }
}
