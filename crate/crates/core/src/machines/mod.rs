//! Automata as monoid actions, and nondeterministic Turing machines with
//! closure semantics.

mod automaton;
mod tm;

pub use automaton::{
    automaton_to_mset, figure1, figure1_probe, joint_mset, truncated_free_action, Automaton, RawAutomaton,
};
pub use tm::{
    random_tm, tm_closure, tm_computed_relation, tm_internal_demo, tm_step, Closure, ConfigSet, Configuration,
    InternalMachine, InternalReport, Move, RawTm, StageClosure, TMSpec, Tape,
};
