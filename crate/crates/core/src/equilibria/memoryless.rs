//! Memoryless equilibria.
//!
//! A memoryless strategy picks its move from the valuation just read —
//! equivalently, from the current arena state — with a fixed opening
//! move.  This module enumerates all joint memoryless profiles of a game
//! in a fixed order and returns the first that is a Nash equilibrium,
//! together with the profile itself.
//!
//! With the others memoryless, a deviator faces a plain graph problem:
//! the others' responses depend only on the arena state, so "can player j
//! profit" is reachability (for goals that need their flag up) or the
//! existence of a flag-free cycle (for goals that need it down forever)
//! over arena states paired with j's goal tracker.  That check is exact;
//! the enumeration is exhaustive, so the search decides the question —
//! at a cost exponential in the arena, which is fine at the intended
//! scale.

use crate::game::{Arena, Game, ARENA_START};
use crate::ldlf::Lasso;
use crate::strategy::{StrategyMachine, StrategyProfile};

use super::goals::{compile_goals, GoalKind, TrackedGoal};
use super::witness::NashWitness;

/// One player's memoryless choices: a move index for the opening round
/// and one per arena state.
struct Assignment {
    /// `slots[player][state]` indexes into `arena.moves(state, player)`.
    slots: Vec<Vec<usize>>,
}

impl Assignment {
    fn first(arena: &Arena) -> Assignment {
        Assignment {
            slots: (0..arena.player_count())
                .map(|_| vec![0; arena.state_count()])
                .collect(),
        }
    }

    /// Advances to the next assignment in odometer order (last state of
    /// the last player fastest); false when wrapped around.
    fn advance(&mut self, arena: &Arena) -> bool {
        for p in (0..self.slots.len()).rev() {
            for s in (0..self.slots[p].len()).rev() {
                self.slots[p][s] += 1;
                if self.slots[p][s] < arena.moves(s as u32, p).len() {
                    return true;
                }
                self.slots[p][s] = 0;
            }
        }
        false
    }

    fn move_of(&self, arena: &Arena, player: usize, state: u32) -> u32 {
        arena.moves(state, player)[self.slots[player][state as usize]]
    }

    /// The joint move everyone plays at `state`.
    fn joint(&self, arena: &Arena, state: u32) -> u32 {
        (0..self.slots.len()).fold(0, |sym, p| sym | self.move_of(arena, p, state))
    }

    fn machines(&self, game: &Game, arena: &Arena) -> StrategyProfile {
        let vars = game.vars();
        let nsym = vars.symbol_count();
        let machines = (0..self.slots.len())
            .map(|p| {
                let moves: Vec<u32> = (0..nsym as u32)
                    .map(|sym| match arena.state_of(sym) {
                        Some(s) => self.move_of(arena, p, s),
                        // Valuations outside the arena never occur in a
                        // play; any total response will do.
                        None => 0,
                    })
                    .collect();
                StrategyMachine::from_map(
                    format!("memoryless-p{p}"),
                    vars.clone(),
                    game.block_mask(p),
                    self.move_of(arena, p, ARENA_START),
                    &moves,
                )
            })
            .collect();
        StrategyProfile::new(machines)
    }
}

/// Whether loser `j` can profit by deviating against the fixed memoryless
/// others: a walk over (arena state, tracker state) with j's moves free
/// and the others' given by `asg`.
fn deviation_exists(
    arena: &Arena,
    asg: &Assignment,
    goals: &[TrackedGoal],
    j: usize,
) -> bool {
    let goal = &goals[j];
    let jb = arena.block_mask(j);
    let others = |s: u32| asg.joint(arena, s) & !jb;

    // Reachable (state, tracker) pairs.
    let start = (ARENA_START, goal.initial());
    let mut seen = std::collections::HashSet::from([start]);
    let mut stack = vec![start];
    let mut nodes = vec![start];
    while let Some((s, d)) = stack.pop() {
        for &m in arena.moves(s, j) {
            let sym = others(s) | m;
            let s2 = arena.step(s, sym).expect("every block plays an enabled move");
            let d2 = goal.step(d, sym);
            if seen.insert((s2, d2)) {
                stack.push((s2, d2));
                nodes.push((s2, d2));
            }
        }
    }
    match goal.kind() {
        // The flag must rise once; any reachable flagged pair will do
        // (every pair has successors, so the play can always continue).
        GoalKind::Eventually => nodes.iter().any(|&(_, d)| goal.flagged(d)),
        // The flag must stay down forever: some reachable pair must start
        // an infinite flag-free walk.  Trim pairs with no flag-free
        // successor until stable; anything left can walk forever.
        GoalKind::Never => {
            let mut alive: std::collections::HashSet<(u32, u32)> =
                nodes.iter().copied().filter(|&(_, d)| !goal.flagged(d)).collect();
            loop {
                let keep: std::collections::HashSet<(u32, u32)> = alive
                    .iter()
                    .copied()
                    .filter(|&(s, d)| {
                        arena.moves(s, j).iter().any(|&m| {
                            let sym = others(s) | m;
                            let s2 = arena.step(s, sym).unwrap();
                            alive.contains(&(s2, goal.step(d, sym)))
                        })
                    })
                    .collect();
                if keep.len() == alive.len() {
                    break;
                }
                alive = keep;
            }
            alive.contains(&start)
        }
    }
}

/// Searches for a Nash equilibrium in memoryless profiles.  Exhaustive:
/// `None` means no memoryless profile of the game is an equilibrium.
pub fn memoryless_ne(game: &Game) -> Option<(NashWitness, StrategyProfile)> {
    let arena = Arena::build(game);
    let goals = compile_goals(game).expect("goal atoms are checked at game construction");
    let vars = game.vars();
    let n = game.player_count();

    let mut asg = Assignment::first(&arena);
    loop {
        // The induced play: arena states repeat as soon as one is
        // revisited, since every move depends only on the state.
        let mut state = ARENA_START;
        let mut visited: Vec<u32> = vec![state];
        let mut syms: Vec<u32> = Vec::new();
        let (at, _) = loop {
            let sym = asg.joint(&arena, state);
            state = arena.step(state, sym).expect("all chosen moves are enabled");
            syms.push(sym);
            if let Some(at) = visited.iter().position(|&v| v == state) {
                break (at, state);
            }
            visited.push(state);
        };
        // Rounds 0..at-1 lead in; the rest repeats.  The first round
        // leaves the start state, which is never revisited, so `at >= 1`
        // and the cycle is the symbols from `at` on... with one care:
        // `visited[at]` was reached after round `at-1`, so the cycle
        // starts at symbol index `at`.
        let cycle: Vec<u32> = syms.split_off(at);
        let prefix = syms;

        let winners: Vec<usize> =
            (0..n).filter(|&i| goals[i].on_lasso(&prefix, &cycle)).collect();
        if (0..n)
            .filter(|i| !winners.contains(i))
            .all(|j| !deviation_exists(&arena, &asg, &goals, j))
        {
            let to_vals = |ms: &[u32]| ms.iter().map(|&m| vars.valuation_of(m)).collect();
            let lasso = Lasso::new(to_vals(&prefix), to_vals(&cycle))
                .expect("the play's cycle is nonempty");
            let witness = NashWitness::build(game, &arena, winners, &lasso, &[]);
            return Some((witness, asg.machines(game, &arena)));
        }
        if !asg.advance(&arena) {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::membership::ne_membership;
    use crate::game::parse_game;

    #[test]
    fn finds_a_memoryless_equilibrium_and_it_passes_membership() {
        let game = parse_game(
            r#"
            game "pq"
            player 0 module "first" controls p
              free
            player 1 module "second" controls q
              free
            goal 0 : q
            goal 1 : p
            "#,
        )
        .unwrap();
        let (witness, profile) = memoryless_ne(&game).expect("an equilibrium exists");
        // Enumeration starts with everyone playing their first move —
        // all-false — and every profile here is an equilibrium.
        assert_eq!(witness.winners, Vec::<usize>::new());
        for m in profile.machines() {
            assert!(m.is_memoryless());
        }
        assert!(ne_membership(&game, &profile).is_yes());
    }

    #[test]
    fn state_driven_patterns_are_found() {
        // p must flip between rounds 1 and 2.  The arena state (the last
        // valuation) distinguishes the two rounds, so a memoryless
        // strategy can produce the pattern.
        let game = parse_game(
            r#"
            game "alternation"
            player 0 module "only" controls p
              free
            goal 0 : E <true> (p && <true> !p)
            "#,
        )
        .unwrap();
        let (witness, profile) = memoryless_ne(&game).expect("alternation is state-driven");
        assert_eq!(witness.winners, vec![0]);
        assert!(ne_membership(&game, &profile).is_yes());
    }

    #[test]
    fn patterns_that_need_memory_make_the_search_fail() {
        // p must hold at rounds 1 and 2 and fail at round 3.  Rounds 2
        // and 3 are played from the same arena state ({p}), so no
        // memoryless strategy produces the pattern — and since the goal
        // is satisfiable, a losing profile is never an equilibrium
        // either: the player deviates and wins with memory.
        let game = parse_game(
            r#"
            game "two-then-drop"
            player 0 module "only" controls p
              free
            goal 0 : E <true> (p && <true> (p && <true> !p))
            "#,
        )
        .unwrap();
        assert!(memoryless_ne(&game).is_none());
    }
}
