//! Negation normal form.
//!
//! Rewrites a formula so that negation applies only to atoms, using the
//! dualities `!<rho> phi == [rho] !phi` and `![rho] phi == <rho> !phi`.
//! Path expressions are never negated; only test payloads are rewritten
//! recursively. The result is logically equivalent on every trace, and is
//! the input form the automaton translation works on.

use super::ast::{Formula, PathExpr};

/// Rewrites `f` into negation normal form.
pub fn nnf(f: &Formula) -> Formula {
    positive(f)
}

fn positive(f: &Formula) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => negative(a),
        Formula::And(a, b) => Formula::and(positive(a), positive(b)),
        Formula::Or(a, b) => Formula::or(positive(a), positive(b)),
        Formula::Diamond(p, a) => Formula::diamond(nnf_path(p), positive(a)),
        Formula::Box(p, a) => Formula::boxed(nnf_path(p), positive(a)),
    }
}

/// The normal form of the negation of `f`.
fn negative(f: &Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(x) => Formula::not(Formula::Atom(x.clone())),
        Formula::Not(a) => positive(a),
        Formula::And(a, b) => Formula::or(negative(a), negative(b)),
        Formula::Or(a, b) => Formula::and(negative(a), negative(b)),
        Formula::Diamond(p, a) => Formula::boxed(nnf_path(p), negative(a)),
        Formula::Box(p, a) => Formula::diamond(nnf_path(p), negative(a)),
    }
}

fn nnf_path(p: &PathExpr) -> PathExpr {
    match p {
        PathExpr::Prop(_) => p.clone(),
        PathExpr::Test(f) => PathExpr::test(positive(f)),
        PathExpr::Choice(a, b) => PathExpr::choice(nnf_path(a), nnf_path(b)),
        PathExpr::Seq(a, b) => PathExpr::seq(nnf_path(a), nnf_path(b)),
        PathExpr::Star(a) => PathExpr::star(nnf_path(a)),
        PathExpr::Power(a, n) => PathExpr::power(nnf_path(a), *n),
    }
}

/// True if negation applies only to atoms, everywhere including tests.
pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::False | Formula::Atom(_) => true,
        Formula::Not(a) => matches!(**a, Formula::Atom(_)),
        Formula::And(a, b) | Formula::Or(a, b) => is_nnf(a) && is_nnf(b),
        Formula::Diamond(p, a) | Formula::Box(p, a) => path_is_nnf(p) && is_nnf(a),
    }
}

fn path_is_nnf(p: &PathExpr) -> bool {
    match p {
        PathExpr::Prop(_) => true,
        PathExpr::Test(f) => is_nnf(f),
        PathExpr::Choice(a, b) | PathExpr::Seq(a, b) => path_is_nnf(a) && path_is_nnf(b),
        PathExpr::Star(a) | PathExpr::Power(a, _) => path_is_nnf(a),
    }
}
