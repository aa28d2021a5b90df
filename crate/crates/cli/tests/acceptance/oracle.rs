//! A deliberately naive reference evaluator: it reads only a finite prefix
//! of the word and answers with three values, staying undecided whenever the
//! prefix cannot settle the formula. Decided answers must match the exact
//! evaluator on the full periodic word.

use hytrace_core::{Ltl, Valuation};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kleene {
    True,
    False,
    Unknown,
}

impl Kleene {
    fn from_bool(value: bool) -> Kleene {
        if value {
            Kleene::True
        } else {
            Kleene::False
        }
    }

    pub fn decided(self) -> Option<bool> {
        match self {
            Kleene::True => Some(true),
            Kleene::False => Some(false),
            Kleene::Unknown => None,
        }
    }

    fn not(self) -> Kleene {
        match self {
            Kleene::True => Kleene::False,
            Kleene::False => Kleene::True,
            Kleene::Unknown => Kleene::Unknown,
        }
    }

    fn and(self, other: Kleene) -> Kleene {
        match (self, other) {
            (Kleene::False, _) | (_, Kleene::False) => Kleene::False,
            (Kleene::True, Kleene::True) => Kleene::True,
            _ => Kleene::Unknown,
        }
    }

    fn or(self, other: Kleene) -> Kleene {
        self.not().and(other.not()).not()
    }
}

/// Evaluate at position `i`, treating everything from `prefix.len()` on as
/// unseen.
pub fn bounded_eval(phi: &Ltl<String>, prefix: &[Valuation], i: usize) -> Kleene {
    let beyond = i >= prefix.len();
    match phi {
        Ltl::True => Kleene::True,
        Ltl::False => Kleene::False,
        Ltl::Atom(var) => {
            if beyond {
                Kleene::Unknown
            } else {
                Kleene::from_bool(prefix[i].get(var) == Some(true))
            }
        }
        Ltl::Not(p) => bounded_eval(p, prefix, i).not(),
        Ltl::And(p, q) => bounded_eval(p, prefix, i).and(bounded_eval(q, prefix, i)),
        Ltl::Or(p, q) => bounded_eval(p, prefix, i).or(bounded_eval(q, prefix, i)),
        Ltl::Implies(p, q) => bounded_eval(p, prefix, i)
            .not()
            .or(bounded_eval(q, prefix, i)),
        Ltl::Iff(p, q) => {
            let p = bounded_eval(p, prefix, i);
            let q = bounded_eval(q, prefix, i);
            p.and(q).or(p.not().and(q.not()))
        }
        Ltl::Next(p) => {
            if beyond {
                Kleene::Unknown
            } else {
                bounded_eval(p, prefix, i + 1)
            }
        }
        Ltl::Until(p, q) => {
            if beyond {
                Kleene::Unknown
            } else {
                bounded_eval(q, prefix, i).or(bounded_eval(p, prefix, i)
                    .and(bounded_eval(phi, prefix, i + 1)))
            }
        }
        Ltl::Globally(p) => {
            if beyond {
                Kleene::Unknown
            } else {
                bounded_eval(p, prefix, i).and(bounded_eval(phi, prefix, i + 1))
            }
        }
        Ltl::Finally(p) => {
            if beyond {
                Kleene::Unknown
            } else {
                bounded_eval(p, prefix, i).or(bounded_eval(phi, prefix, i + 1))
            }
        }
    }
}
