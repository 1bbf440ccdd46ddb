//! The local language: parsing, typechecking and evaluation in `Sets^C`.

mod compile;
mod eval;
mod parser;
mod signature;
mod syntax;

pub use compile::{compile, typecheck, Mode, Node, NodeId, Op, Program};
pub use eval::{denote, holds, holds_with, Carrier, TruthValue, Universe, Value};
pub use parser::{parse_formula, parse_type};
pub use signature::{FunSym, Signature};
pub use syntax::{LType, Term, TermKind};
