//! First-order formulas: syntax, parsing, evaluation and a small catalog.

pub mod catalog;
pub mod eval;
pub mod formula;
pub mod parse;

pub use eval::{eval, eval_sentence, EvalError, Evaluator, Interpretation};
pub use formula::{Formula, Term, Var};
pub use parse::{parse, parse_unchecked, ParseError};
