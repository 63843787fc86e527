//! Linear dynamic logic over finite traces: syntax, parsing and semantics.
//!
//! The logic extends propositional logic with the path modalities
//! `<rho> phi` and `[rho] phi`, where `rho` is a regular expression over
//! propositional step constraints and formula tests. Formulas are evaluated
//! on finite traces of valuations; quantified formulas (`E phi`, `A phi`)
//! lift them to infinite plays by quantifying over finite prefixes.

mod ast;
mod nnf;
pub mod parser;
mod semantics;
mod trace;

pub use ast::{Formula, Goal, PathExpr, PropFormula, QFormula, Quantifier};
pub use nnf::{is_nnf, nnf};
pub use parser::{parse_formula, parse_goal, parse_prop, parse_qformula};
pub use semantics::{
    eval_goal, eval_lasso, eval_qpldl, eval_trace, eval_trace_at, path_relation, EvalError,
    EvalScratch, TraceEvaluator,
};
pub use trace::{
    format_trace, format_valuation, parse_lasso, parse_trace, valuation, Lasso, LassoError, Trace,
    Valuation, VarSet, VarSetError, MAX_VARS,
};

/// A parse error with a source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: String) -> ParseError {
        ParseError { line, col, message }
    }
}
