//! Equilibrium analysis of multi-player games.
//!
//! A strategy profile is a Nash equilibrium when no single player can
//! switch to a strategy it strictly prefers — here, when no player whose
//! goal the play violates has a deviation that satisfies it.  Everything
//! in this module revolves around that notion:
//!
//! * [`ne_membership`] decides it for a concrete profile;
//! * [`ne_nonemptiness`] and [`sne_nonemptiness`] decide whether any
//!   equilibrium (plain or strong) exists, producing a [`NashWitness`]
//!   from which [`extract_profile`] rebuilds concrete strategies;
//! * [`e_nash`] and [`a_nash`] additionally constrain the equilibrium
//!   play by a formula — some equilibrium satisfies it, or all do;
//! * [`memoryless_ne`] and [`myopic_ne`] search the restricted profile
//!   classes of state-based and input-blind strategies;
//! * [`build_synthesis_game`] reduces reactive synthesis to equilibrium
//!   existence.
//!
//! The procedures share one machinery: each goal compiles to a
//! deterministic tracker ([`TrackedGoal`]) whose flag, monotone along
//! every play, tells whether the goal is met, and deviations are ruled
//! out by punishment regions ([`punishment_region`]) computed as a
//! two-level fixpoint over the arena and the deviators' trackers.

mod goals;
mod membership;
mod memoryless;
mod myopic;
mod punish;
mod solve;
mod synthesis;
mod witness;

pub use goals::{compile_goals, GoalKind, TrackedGoal};
pub use membership::{ne_membership, NeVerdict};
pub use memoryless::memoryless_ne;
pub use myopic::{myopic_ne, MyopicOutcome};
pub use punish::{punishment_region, PunishmentRegion};
pub use solve::{a_nash, e_nash, ne_nonemptiness, sne_nonemptiness, ANashOutcome};
pub use synthesis::{build_synthesis_game, SynthesisError};
pub use witness::{extract_profile, NashWitness, PunishmentEntry, PunishmentTable, WitnessError};
