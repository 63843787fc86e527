//! Automata-theoretic machinery behind the decision procedures.
//!
//! A formula is translated in stages: to an alternating finite-word
//! automaton over its closure ([`Afw`]), then to a nondeterministic word
//! automaton over obligation sets ([`Nfw`]), then — by the subset
//! construction — to a deterministic one ([`Dfw`]). Finite-word automata
//! are lifted to acceptors of ultimately periodic infinite words
//! ([`InfiniteAcceptor`]), which close under intersection and support
//! emptiness checking with lasso witnesses. [`formula_product`] fuses the
//! word-automaton construction with a product against an acceptor,
//! avoiding the intermediate automaton.

mod acceptor;
mod afw;
mod dfw;
mod nfw;

pub use acceptor::{
    formula_acceptor, formula_product, goal_acceptor, product, product_many, qpldl_acceptor,
    InfiniteAcceptor,
};
pub use afw::Afw;
pub use dfw::Dfw;
pub use nfw::{Nfw, NFW_ACCEPT};

use crate::ldlf::VarSetError;

/// Error constructing or combining automata.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomataError {
    #[error(transparent)]
    Vars(#[from] VarSetError),
    #[error("alphabet mismatch: `{0}` vs `{1}`")]
    AlphabetMismatch(String, String),
}
