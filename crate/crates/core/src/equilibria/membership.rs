//! Nash equilibrium membership.
//!
//! A strategy profile is a Nash equilibrium when no single player can
//! switch to a different strategy, against everyone else's fixed ones, and
//! thereby get its goal satisfied where it was not.  Players whose goals
//! already hold on the induced play have nothing to gain, so the check
//! reduces to a search per losing player: does the automaton recognizing
//! "plays consistent with the others' strategies, legal in the game, and
//! satisfying this player's goal" accept anything?

use crate::automata::product_many;
use crate::game::{Arena, Game};
use crate::ldlf::{eval_goal, Lasso};
use crate::strategy::{StrategyError, StrategyProfile};

/// Verdict of the membership check.
#[derive(Debug, Clone)]
pub enum NeVerdict {
    /// The profile is a Nash equilibrium.
    Yes {
        /// Players whose goals the induced play satisfies.
        winners: Vec<usize>,
        /// The induced play.
        play: Lasso,
    },
    /// Some losing player has a profitable deviation.
    No {
        winners: Vec<usize>,
        play: Lasso,
        /// The least player index with a profitable deviation.
        deviator: usize,
        /// A play, consistent with the others' strategies, on which the
        /// deviator's goal holds.
        deviation: Lasso,
    },
    /// The profile does not fit the game (wrong shape, or some strategy
    /// picks a move its module cannot make).
    Error(StrategyError),
}

impl NeVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, NeVerdict::Yes { .. })
    }
}

/// The players whose goals `play` satisfies.
pub(crate) fn winners_of(game: &Game, play: &Lasso) -> Vec<usize> {
    (0..game.player_count())
        .filter(|&i| eval_goal(game.goal(i), play))
        .collect()
}

/// Decides whether `profile` is a Nash equilibrium of `game`.
pub fn ne_membership(game: &Game, profile: &StrategyProfile) -> NeVerdict {
    let arena = Arena::build(game);
    let play = match profile.play_of(&arena) {
        Ok(play) => play,
        Err(e) => return NeVerdict::Error(e),
    };
    let winners = winners_of(game, &play);

    let arena_acceptor = arena.acceptor();
    for j in 0..game.player_count() {
        if winners.contains(&j) {
            continue;
        }
        // Everything player j could steer the play to: the others keep
        // following their strategies, the game rules keep applying, and we
        // ask for j's goal on top.
        let others: Vec<_> = (0..game.player_count())
            .filter(|&i| i != j)
            .map(|i| profile.machine(i).automaton())
            .collect();
        let goal = crate::automata::goal_acceptor(game.goal(j), game.vars())
            .expect("goal atoms are checked at game construction");
        let mut parts: Vec<&_> = others.iter().collect();
        parts.push(&arena_acceptor);
        parts.push(&goal);
        let deviations = product_many(&parts).expect("all parts share the game variables");
        if let Some(deviation) = deviations.find_witness() {
            return NeVerdict::No { winners, play, deviator: j, deviation };
        }
    }
    NeVerdict::Yes { winners, play }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;
    use crate::strategy::parse_profile;

    fn pq_game() -> Game {
        // Two players, each controlling one variable, each wanting the
        // other's variable true in the first round.
        parse_game(
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
        .unwrap()
    }

    fn constant_profile(game: &Game, p: bool, q: bool) -> StrategyProfile {
        let text = format!(
            r#"
            profile "const"
            player 0 strategy "p-const"
              states: s
              initial: s
              output s : {}
              default s -> s
            player 1 strategy "q-const"
              states: s
              initial: s
              output s : {}
              default s -> s
            "#,
            if p { "p" } else { "-" },
            if q { "q" } else { "-" },
        );
        parse_profile(&text, game).unwrap()
    }

    #[test]
    fn every_constant_profile_is_an_equilibrium() {
        // A plain propositional goal is read on the first round only, and
        // the deciding variable belongs to the *other* player, so no
        // unilateral deviation ever changes a verdict.
        let game = pq_game();
        for p in [false, true] {
            for q in [false, true] {
                let profile = constant_profile(&game, p, q);
                let verdict = ne_membership(&game, &profile);
                match verdict {
                    NeVerdict::Yes { winners, .. } => {
                        assert_eq!(winners.contains(&0), q);
                        assert_eq!(winners.contains(&1), p);
                    }
                    other => panic!("expected Yes, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn losing_by_own_choice_is_not_an_equilibrium() {
        // Goal 0 now depends on player 0's own variable: playing p false
        // loses, and deviating to p true wins.
        let game = parse_game(
            r#"
            game "own-goal"
            player 0 module "first" controls p
              free
            player 1 module "second" controls q
              free
            goal 0 : p
            goal 1 : tt
            "#,
        )
        .unwrap();
        let profile = constant_profile(&game, false, false);
        match ne_membership(&game, &profile) {
            NeVerdict::No { winners, deviator, deviation, .. } => {
                assert_eq!(winners, vec![1]);
                assert_eq!(deviator, 0);
                assert!(eval_goal(game.goal(0), &deviation));
                let arena = Arena::build(&game);
                assert_eq!(arena.is_play(&deviation), Ok(true));
                // The deviation keeps player 1 on script: q stays false.
                for v in deviation.prefix().iter().chain(deviation.cycle()) {
                    assert!(!v.contains("q"));
                }
            }
            other => panic!("expected No, got {other:?}"),
        }
    }

    #[test]
    fn incompatible_profiles_error_out() {
        // A module that can only raise p, played against a strategy that
        // insists on keeping it down.
        let game = parse_game(
            r#"
            game "forced"
            player 0 module "riser" controls p
              init :: true ~> p := true
              update :: true ~> p := true
            goal 0 : tt
            "#,
        )
        .unwrap();
        let profile = parse_profile(
            r#"
            profile "stubborn"
            player 0 strategy "down"
              states: s
              initial: s
              output s : -
              default s -> s
            "#,
            &game,
        )
        .unwrap();
        match ne_membership(&game, &profile) {
            NeVerdict::Error(StrategyError::Incompatible { player: 0, round: 0 }) => {}
            other => panic!("expected Error, got {other:?}"),
        }
    }
}
