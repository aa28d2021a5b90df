//! Checks over sets of finite and ultimately periodic traces: linear-time
//! evaluation, trace-quantified sentences, pointwise and segment-wise
//! variable independence split at an action, set equivalences up to
//! stuttering, and generated example families exercising all of it.

pub mod equivalence;
pub mod families;
pub mod hyperltl;
pub mod independence;
pub mod ltl;
pub mod syntax;
pub mod traces;

pub use equivalence::{k_point_equivalent, kc_equivalent, KcOutcome, TraceEquivalence, WitnessBijection};
pub use families::{async_family, point_family, state_change_example, GeneratedFamily};
pub use hyperltl::{eval_with_assignment, flatten, hyperltl_eval, HyperVerdict, TraceAssignment};
pub use independence::{
    min_index, slice_after, slice_before, sync_action, sync_point_formula_check,
    sync_segment_formula_check, two_state, TwoStateFailure, TwoStateOutcome,
};
pub use ltl::ltl_eval;
pub use syntax::{
    parse_formula, print_formula, ActionDiscipline, HyperAtom, HyperLtlFormula,
    IndependenceSemantics, Ltl, PropertySelector, Quantifier,
};
pub use traces::{Trace, TraceSet, Valuation};
