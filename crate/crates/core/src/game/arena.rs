//! The explicit game graph a set of modules unfolds into.
//!
//! States are the reachable valuations plus a distinguished start state from
//! which the init round is played. Every edge corresponds to one joint move:
//! each player picks one of its enabled moves, and the next valuation is
//! their (disjoint) union. Because the blocks partition the variables, a
//! candidate step is legal exactly when its projection onto every block is a
//! move that player offers — so legality checks never enumerate joint moves.

use std::collections::HashMap;

use crate::automata::InfiniteAcceptor;
use crate::ldlf::{Lasso, Valuation, VarSet, VarSetError};

use super::module::Phase;
use super::Game;

/// The start state, before any move has been played.
pub const ARENA_START: u32 = 0;

/// The unfolded game graph. States are `u32` ids: [`ARENA_START`] first,
/// then the reachable valuations in discovery order.
#[derive(Debug, Clone)]
pub struct Arena {
    vars: VarSet,
    blocks: Vec<u32>,
    /// Valuation of each state; `None` for the start state.
    masks: Vec<Option<u32>>,
    index: HashMap<u32, u32>,
    /// `moves[state][player]`: the moves the player can take from `state`,
    /// as masks within its block, numerically sorted.
    moves: Vec<Vec<Vec<u32>>>,
    /// Successor state ids, sorted.
    succs: Vec<Vec<u32>>,
}

impl Arena {
    /// Unfolds the game from the start state, keeping reachable states only.
    pub fn build(game: &Game) -> Arena {
        let vars = game.vars().clone();
        let blocks: Vec<u32> = (0..game.player_count()).map(|i| game.block_mask(i)).collect();
        let mut arena = Arena {
            vars,
            blocks,
            masks: vec![None],
            index: HashMap::new(),
            moves: Vec::new(),
            succs: Vec::new(),
        };
        let mut next = 0u32;
        while (next as usize) < arena.masks.len() {
            let state = next;
            next += 1;
            let (phase, val) = match arena.masks[state as usize] {
                None => (Phase::Init, Valuation::new()),
                Some(mask) => (Phase::Update, arena.vars.valuation_of(mask)),
            };
            let per_player: Vec<Vec<u32>> = game
                .players()
                .iter()
                .map(|p| {
                    let mut ms: Vec<u32> = p
                        .module
                        .enabled_moves(phase, &val)
                        .iter()
                        .map(|mv| {
                            arena
                                .vars
                                .mask_of(mv)
                                .expect("moves range over declared variables")
                        })
                        .collect();
                    ms.sort_unstable();
                    ms
                })
                .collect();
            let mut succs = Vec::new();
            let mut joint = vec![0usize; per_player.len()];
            loop {
                let mask = per_player
                    .iter()
                    .zip(&joint)
                    .fold(0u32, |acc, (ms, &k)| acc | ms[k]);
                let id = match arena.index.get(&mask) {
                    Some(&id) => id,
                    None => {
                        let id = arena.masks.len() as u32;
                        arena.masks.push(Some(mask));
                        arena.index.insert(mask, id);
                        id
                    }
                };
                succs.push(id);
                // Advance the joint-move odometer.
                let mut k = per_player.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    joint[k] += 1;
                    if joint[k] < per_player[k].len() {
                        break;
                    }
                    joint[k] = 0;
                }
                if joint.iter().all(|&j| j == 0) {
                    break;
                }
            }
            succs.sort_unstable();
            succs.dedup();
            arena.moves.push(per_player);
            arena.succs.push(succs);
        }
        arena
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn player_count(&self) -> usize {
        self.blocks.len()
    }

    /// Bitmask of the variables a player controls.
    pub fn block_mask(&self, player: usize) -> u32 {
        self.blocks[player]
    }

    pub fn state_count(&self) -> usize {
        self.masks.len()
    }

    /// The valuation a state stands for; `None` for the start state.
    pub fn mask_of(&self, state: u32) -> Option<u32> {
        self.masks[state as usize]
    }

    /// The state holding the given valuation, if reachable.
    pub fn state_of(&self, mask: u32) -> Option<u32> {
        self.index.get(&mask).copied()
    }

    /// The moves a player can take from a state (masks within its block).
    pub fn moves(&self, state: u32, player: usize) -> &[u32] {
        &self.moves[state as usize][player]
    }

    /// Successor states, sorted by id.
    pub fn successors(&self, state: u32) -> &[u32] {
        &self.succs[state as usize]
    }

    /// Joint moves of a set of players at a state: every combination of
    /// their enabled per-block moves, in odometer order (first listed
    /// player most significant).  With no players the single empty move.
    pub fn joint_moves(&self, state: u32, players: &[usize]) -> Vec<u32> {
        let mut out = vec![0u32];
        for &p in players {
            let moves = self.moves(state, p);
            let mut next = Vec::with_capacity(out.len() * moves.len());
            for &prev in &out {
                for &m in moves {
                    next.push(prev | m);
                }
            }
            out = next;
        }
        out
    }

    /// Takes one joint step to the valuation `mask`: legal exactly when
    /// every player's projection of `mask` is one of its moves.
    pub fn step(&self, state: u32, mask: u32) -> Option<u32> {
        let legal = self
            .blocks
            .iter()
            .zip(&self.moves[state as usize])
            .all(|(&block, ms)| ms.binary_search(&(mask & block)).is_ok());
        if legal {
            Some(self.index[&mask])
        } else {
            None
        }
    }

    pub fn is_legal_step(&self, state: u32, mask: u32) -> bool {
        self.step(state, mask).is_some()
    }

    /// Whether the lasso is a play of the game: every step, including the
    /// loop back, must be a legal joint move.
    pub fn is_play(&self, lasso: &Lasso) -> Result<bool, VarSetError> {
        let prefix = self.vars.masks_of(lasso.prefix())?;
        let cycle = self.vars.masks_of(lasso.cycle())?;
        let mut state = ARENA_START;
        for &mask in prefix.iter().chain(cycle.iter()) {
            match self.step(state, mask) {
                Some(next) => state = next,
                None => return Ok(false),
            }
        }
        Ok(self.step(state, cycle[0]).is_some())
    }

    /// Human-readable state name for dumps and witnesses.
    pub fn state_label(&self, state: u32) -> String {
        match self.masks[state as usize] {
            None => "start".to_string(),
            Some(mask) => self.vars.format_mask(mask),
        }
    }

    /// The arena as an acceptor of infinite words: it accepts exactly the
    /// plays of the game.
    pub fn acceptor(&self) -> InfiniteAcceptor {
        let nsym = self.vars.symbol_count();
        let n = self.state_count();
        let trans: Vec<Vec<Vec<u32>>> = (0..n as u32)
            .map(|s| {
                (0..nsym as u32)
                    .map(|sym| self.step(s, sym).into_iter().collect())
                    .collect()
            })
            .collect();
        let labels = (0..n as u32).map(|s| self.state_label(s)).collect();
        InfiniteAcceptor::from_parts(
            self.vars.clone(),
            vec![ARENA_START],
            trans,
            vec![true; n],
            vec![false; n],
            labels,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;
    use crate::ldlf::parse_lasso;

    const TOGGLE: &str = r#"
        game "toggle"
        player 0 module "switch" controls p
          init   :: tt ~> p := tt
          update :: p  ~> p := ff
          update :: !p ~> p := tt
        player 1 module "env" controls q
          free
        goal 0 : <true*> (p && q)
        goal 1 : A [true*] !q
    "#;

    fn toggle_arena() -> Arena {
        Arena::build(&parse_game(TOGGLE).unwrap())
    }

    #[test]
    fn reachable_states_and_moves() {
        let a = toggle_arena();
        // start, {p}, {p,q}, {}, {q}: the switch fixes p's alternation but q
        // is free, so all four valuations appear.
        assert_eq!(a.state_count(), 5);
        assert_eq!(a.moves(ARENA_START, 0), &[0b01]);
        assert_eq!(a.moves(ARENA_START, 1), &[0b00, 0b10]);
        let s_p = a.state_of(0b01).unwrap();
        assert_eq!(a.moves(s_p, 0), &[0b00]);
        assert_eq!(a.successors(ARENA_START).len(), 2);
    }

    #[test]
    fn stepping_follows_the_modules() {
        let a = toggle_arena();
        let s_p = a.step(ARENA_START, 0b01).unwrap();
        assert_eq!(a.mask_of(s_p), Some(0b01));
        // p must flip to false next; keeping it is illegal.
        assert!(a.step(s_p, 0b01).is_none());
        assert!(a.step(s_p, 0b00).is_some());
        assert!(a.step(s_p, 0b10).is_some());
        // The init round cannot leave p false.
        assert!(a.step(ARENA_START, 0b00).is_none());
    }

    #[test]
    fn play_recognition() {
        let a = toggle_arena();
        let yes = parse_lasso("p | -; p").unwrap();
        assert!(a.is_play(&yes).unwrap());
        // Holding p for two rounds is not a play.
        let no = parse_lasso("p; p | -").unwrap();
        assert!(!a.is_play(&no).unwrap());
        // Wrap-around is checked: the loop re-enters at a valuation the
        // last loop state cannot reach.
        let wrap = parse_lasso(" | p,q; -; p").unwrap();
        assert!(!a.is_play(&wrap).unwrap());
    }

    #[test]
    fn acceptor_matches_play_recognition() {
        let a = toggle_arena();
        let acc = a.acceptor();
        for text in ["p | -; p", "p; -; p, q | -; p", "p | p", "p; p | -", " | q; p"] {
            let lasso = parse_lasso(text).unwrap();
            assert_eq!(
                acc.accepts_lasso(&lasso).unwrap(),
                a.is_play(&lasso).unwrap(),
                "disagreement on {text}"
            );
        }
        assert!(!acc.is_empty());
    }
}
