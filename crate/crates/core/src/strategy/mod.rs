//! Finite-state strategies, profiles, and the plays they induce.
//!
//! Strategies are Moore machines over the game's joint valuations; a full
//! profile induces a single ultimately-periodic play, checked and extracted
//! by [`StrategyProfile::play_of`]. Each machine also lifts to an acceptor
//! of the words consistent with it, the building block for deviation
//! checks. Profiles are written in a small text format, see
//! [`parse_profile`].

mod machine;
mod parser;

pub use machine::{StrategyError, StrategyMachine, StrategyProfile};
pub use parser::parse_profile;
