//! Punishment regions.
//!
//! When a set of players deviates from an agreed play, the rest of the
//! players need a joint strategy that denies at least one deviator its
//! goal, whatever the deviators do from then on.  This module computes the
//! set of product states — an arena state plus one goal-tracker state per
//! deviator — from which such a strategy exists, together with a
//! positional move choice that realizes it.
//!
//! Denying a single deviator depends on its goal's demand (see
//! [`GoalKind`](super::GoalKind)): an `Eventually` goal is denied by
//! keeping its flag down forever, a `Never` goal by forcing its flag up
//! once.  With several deviators the objective is the disjunction "some
//! `Never` flag rises, or some `Eventually` flag stays down forever".
//! Because flags only rise, "some `Eventually` flag stays down forever" is
//! the same as "at every round, not every `Eventually` flag is up", which
//! turns the whole objective into reach-or-safe:
//!
//! ```text
//! win   = nu X. reach  union  (safe intersect cpre(X))
//! reach = mu Z. base   union  cpre(Z)
//! ```
//!
//! where `base` holds when some `Never` deviator's flag is up, `safe` when
//! not every `Eventually` deviator's flag is up, and `cpre(X)` when the
//! punishing players have a joint move after which every joint reply of
//! the deviators lands in `X`.  Both fixpoints run over the full product,
//! so membership can be queried for any deviation target, reachable or
//! not.

use std::collections::BTreeSet;

use crate::game::Arena;

use super::goals::{GoalKind, TrackedGoal};

/// The winning region of the punishing players against a fixed set of
/// deviators, with a positional move choice.
///
/// States are pairs of an arena state and one tracker state per deviator,
/// listed in ascending player order.
#[derive(Debug, Clone)]
pub struct PunishmentRegion {
    target: Vec<usize>,
    dims: Vec<usize>,
    arena_states: usize,
    /// Flattened product-state membership.
    win: Vec<bool>,
    /// For each winning state, the punishing players' joint move (a mask
    /// over their blocks only).
    choice: Vec<u32>,
}

impl PunishmentRegion {
    pub fn target(&self) -> &[usize] {
        &self.target
    }

    fn index(&self, arena_state: u32, trackers: &[u32]) -> usize {
        assert_eq!(trackers.len(), self.dims.len(), "one tracker state per deviator");
        let mut idx = 0usize;
        for (pos, &d) in trackers.iter().enumerate().rev() {
            debug_assert!((d as usize) < self.dims[pos]);
            idx = idx * self.dims[pos] + d as usize;
        }
        idx * self.arena_states + arena_state as usize
    }

    /// Whether the punishing players win from this product state.
    pub fn contains(&self, arena_state: u32, trackers: &[u32]) -> bool {
        self.win[self.index(arena_state, trackers)]
    }

    /// The joint punishing move at a winning state.
    pub fn choice(&self, arena_state: u32, trackers: &[u32]) -> Option<u32> {
        let idx = self.index(arena_state, trackers);
        self.win[idx].then(|| self.choice[idx])
    }

    /// All winning states with their move choices, in a fixed order:
    /// ascending arena state, then tracker states.
    pub fn entries(&self) -> Vec<(u32, Vec<u32>, u32)> {
        let mut out = Vec::new();
        for s in 0..self.arena_states as u32 {
            let mut trackers = vec![0u32; self.dims.len()];
            loop {
                let idx = self.index(s, &trackers);
                if self.win[idx] {
                    out.push((s, trackers.clone(), self.choice[idx]));
                }
                // Odometer over tracker states.
                let mut pos = 0;
                loop {
                    if pos == self.dims.len() {
                        break;
                    }
                    trackers[pos] += 1;
                    if (trackers[pos] as usize) < self.dims[pos] {
                        break;
                    }
                    trackers[pos] = 0;
                    pos += 1;
                }
                if pos == self.dims.len() {
                    break;
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.win.iter().filter(|&&w| w).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.win.iter().any(|&w| w)
    }
}

/// Computes the punishment region against the players in `target`.
///
/// `goals` holds one tracker per player of the game; `target` selects the
/// deviators (at least one, no duplicates).  All other players punish.
pub fn punishment_region(
    arena: &Arena,
    goals: &[TrackedGoal],
    target: &[usize],
) -> PunishmentRegion {
    assert_eq!(goals.len(), arena.player_count(), "one goal per player");
    assert!(!target.is_empty(), "the deviator set must be nonempty");
    let target: Vec<usize> = {
        let set: BTreeSet<usize> = target.iter().copied().collect();
        assert_eq!(set.len(), target.len(), "duplicate deviator");
        assert!(*set.iter().next_back().unwrap() < goals.len(), "deviator out of range");
        set.into_iter().collect()
    };
    let punishers: Vec<usize> =
        (0..goals.len()).filter(|p| !target.contains(p)).collect();

    let arena_states = arena.state_count();
    let dims: Vec<usize> = target.iter().map(|&c| goals[c].state_count()).collect();
    let total = dims.iter().fold(arena_states, |n, d| n * d);

    // Unflatten helper: product state -> (arena state, tracker states).
    let decode = |idx: usize| -> (u32, Vec<u32>) {
        let s = (idx % arena_states) as u32;
        let mut rest = idx / arena_states;
        let trackers = dims
            .iter()
            .map(|&d| {
                let t = (rest % d) as u32;
                rest /= d;
                t
            })
            .collect();
        (s, trackers)
    };

    // Per arena state: the punishing players' joint moves and the
    // deviators' joint replies, both in a fixed order.
    let our_moves: Vec<Vec<u32>> =
        (0..arena_states as u32).map(|s| arena.joint_moves(s, &punishers)).collect();
    let their_moves: Vec<Vec<u32>> =
        (0..arena_states as u32).map(|s| arena.joint_moves(s, &target)).collect();

    let step = |idx: usize, sym: u32| -> usize {
        let (s, trackers) = decode(idx);
        let s2 = arena
            .step(s, sym)
            .expect("combinations of enabled per-player moves are legal");
        let mut out = 0usize;
        for (pos, &d) in trackers.iter().enumerate().rev() {
            let c = target[pos];
            out = out * dims[pos] + goals[c].step(d, sym) as usize;
        }
        out * arena_states + s2 as usize
    };

    // `base`: some Never-goal deviator's flag is up.  `safe`: not every
    // Eventually-goal deviator's flag is up (vacuously false when there
    // are none, making the region a pure reachability target).
    let mut base = vec![false; total];
    let mut safe = vec![false; total];
    let has_eventually =
        target.iter().any(|&c| goals[c].kind() == GoalKind::Eventually);
    for idx in 0..total {
        let (_, trackers) = decode(idx);
        let mut some_never_up = false;
        let mut all_ever_up = true;
        for (pos, &d) in trackers.iter().enumerate() {
            let g = &goals[target[pos]];
            match g.kind() {
                GoalKind::Never if g.flagged(d) => some_never_up = true,
                GoalKind::Eventually if !g.flagged(d) => all_ever_up = false,
                _ => {}
            }
        }
        base[idx] = some_never_up;
        safe[idx] = has_eventually && !all_ever_up;
    }

    // `cpre`: a joint punishing move after which every deviator reply
    // stays inside `x`.  Returns the first such move.
    let cpre = |idx: usize, x: &[bool]| -> Option<u32> {
        let s = idx % arena_states;
        our_moves[s].iter().copied().find(|&ours| {
            their_moves[s].iter().all(|&theirs| x[step(idx, ours | theirs)])
        })
    };

    let mut choice = vec![0u32; total];

    // reach = mu Z. base ∪ cpre(Z), recording the move that makes
    // progress.  States already in `base` have met the objective; they
    // keep the first available move, which cannot leave the region
    // because Never flags are absorbing.
    let mut reach = base.clone();
    for idx in 0..total {
        if base[idx] {
            choice[idx] = our_moves[idx % arena_states][0];
        }
    }
    loop {
        let mut changed = false;
        for idx in 0..total {
            if !reach[idx] {
                if let Some(mv) = cpre(idx, &reach) {
                    reach[idx] = true;
                    choice[idx] = mv;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // win = nu X. reach ∪ (safe ∩ cpre(X)), shrinking from everything.
    let mut win = vec![true; total];
    loop {
        let mut changed = false;
        for idx in 0..total {
            if win[idx] && !reach[idx] && !(safe[idx] && cpre(idx, &win).is_some()) {
                win[idx] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Record staying moves for the safety part.
    for idx in 0..total {
        if win[idx] && !reach[idx] {
            choice[idx] = cpre(idx, &win)
                .expect("a winning safety state has a move that stays winning");
        }
    }

    PunishmentRegion { target, dims, arena_states, win, choice }
}
