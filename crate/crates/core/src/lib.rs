//! Equilibrium analysis for multi-player games whose players pursue goals
//! in linear dynamic logic over finite traces.
//!
//! The crate provides four layers:
//!
//! * [`ldlf`] — formula syntax, parsing, and direct evaluation on finite
//!   traces and on ultimately periodic infinite words (lassos), including
//!   prefix-quantified formulas (`E phi` / `A phi`).
//! * [`automata`] — translation of formulas to alternating, nondeterministic
//!   and deterministic finite-word automata, and their lift to acceptors of
//!   lasso-representable infinite words.
//! * [`game`] and [`strategy`] — reactive-module games: players control
//!   disjoint blocks of boolean variables through guarded-command modules,
//!   and play finite-state machine strategies whose joint behaviour is an
//!   infinite play.
//! * [`equilibria`] — decision procedures: Nash equilibrium membership and
//!   existence (with witness extraction), strong equilibria, equilibria in
//!   memoryless or myopic strategies, and existence of equilibria
//!   satisfying or refuting an additional property.
//!
//! The command-line companion crate exposes the same procedures over a
//! small set of text formats for games, strategies, traces and formulas.

pub mod automata;
pub mod equilibria;
pub mod game;
pub mod ldlf;
pub mod strategy;
