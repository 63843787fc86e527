//! Deterministic goal trackers.
//!
//! A tracker watches a play unfold one round at a time and maintains a
//! single flag: whether the finite trace produced so far meets the goal's
//! underlying formula.  Because the flag is made absorbing, it can only
//! rise, never fall, which gives infinite plays a simple reading:
//!
//! * an `E phi` (or plain `phi`) goal holds iff the flag rises eventually,
//! * an `A psi` goal holds iff the flag of a `!psi` tracker never rises.
//!
//! Monotonicity also means the flag is constant around any cycle of a
//! product graph, so a lasso's verdict is decided by any single state on
//! its cycle.  The equilibrium search and the punishment fixpoints both
//! lean on that.

use crate::automata::Dfw;
use crate::game::Game;
use crate::ldlf::{Formula, Goal, Quantifier, VarSet, VarSetError};

/// What a goal demands of its tracker flag on an infinite play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoalKind {
    /// The flag must rise on some prefix (plain and `E`-quantified goals).
    Eventually,
    /// The flag must stay down forever (`A`-quantified goals, tracked
    /// through the negated body).
    Never,
}

/// A deterministic monitor for one player's goal.
///
/// The tracker is a total word automaton with absorbing accepting states;
/// state 0 is initial and corresponds to the empty trace.
#[derive(Debug, Clone)]
pub struct TrackedGoal {
    kind: GoalKind,
    dfw: Dfw,
}

impl TrackedGoal {
    /// Compiles a goal into a tracker over the given variables.
    pub fn compile(goal: &Goal, vars: &VarSet) -> Result<TrackedGoal, VarSetError> {
        let (kind, formula) = match goal {
            Goal::Plain(f) => (GoalKind::Eventually, f.clone()),
            Goal::Quantified(q) => match q.quantifier {
                Quantifier::Exists => (GoalKind::Eventually, q.body.clone()),
                Quantifier::Forall => (GoalKind::Never, Formula::not(q.body.clone())),
            },
        };
        let dfw = Dfw::compile(&formula, vars)?.with_absorbing_finals();
        Ok(TrackedGoal { kind, dfw })
    }

    pub fn kind(&self) -> GoalKind {
        self.kind
    }

    pub fn state_count(&self) -> usize {
        self.dfw.state_count()
    }

    /// The tracker state before any round has been played.
    pub fn initial(&self) -> u32 {
        0
    }

    pub fn step(&self, state: u32, sym: u32) -> u32 {
        self.dfw.step(state, sym)
    }

    /// Whether the flag is up in `state`.
    pub fn flagged(&self, state: u32) -> bool {
        self.dfw.is_final(state)
    }

    /// Whether a play whose cycle passes through tracker state `state`
    /// satisfies the goal.  Valid for cycle states only: the flag is
    /// absorbing, so it is constant along any cycle.
    pub fn satisfied_on_cycle(&self, state: u32) -> bool {
        match self.kind {
            GoalKind::Eventually => self.flagged(state),
            GoalKind::Never => !self.flagged(state),
        }
    }

    /// Evaluates the goal on an ultimately-periodic play given as masks:
    /// drive the tracker through the prefix, then around the loop until
    /// its state repeats there, and read the verdict off the cycle.
    /// Agrees with [`eval_goal`](crate::ldlf::eval_goal); cheaper when
    /// the same goal is checked against many plays.
    pub fn on_lasso(&self, prefix: &[u32], cycle: &[u32]) -> bool {
        let mut s = self.initial();
        for &m in prefix {
            s = self.step(s, m);
        }
        let mut seen = std::collections::HashSet::new();
        while seen.insert(s) {
            for &m in cycle {
                s = self.step(s, m);
            }
        }
        self.satisfied_on_cycle(s)
    }
}

/// Compiles every player's goal against the game's variable set.
pub fn compile_goals(game: &Game) -> Result<Vec<TrackedGoal>, VarSetError> {
    game.players()
        .iter()
        .map(|p| TrackedGoal::compile(&p.goal, game.vars()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlf::parser::{parse_formula, parse_goal};
    use crate::ldlf::{eval_goal, Lasso};

    fn vars_pq() -> VarSet {
        VarSet::new(["p", "q"]).unwrap()
    }

    fn lasso(input: &str) -> Lasso {
        crate::ldlf::parse_lasso(input).unwrap()
    }

    #[test]
    fn eventually_tracker_matches_prefix_satisfaction() {
        let vars = vars_pq();
        let goal = parse_goal("E <true*> p").unwrap();
        let t = TrackedGoal::compile(&goal, &vars).unwrap();
        assert_eq!(t.kind(), GoalKind::Eventually);

        // {} {q} {p q} ... : the flag rises once p shows up and then sticks.
        let mut s = t.initial();
        assert!(!t.flagged(s), "empty trace does not reach p");
        s = t.step(s, 0);
        assert!(!t.flagged(s));
        s = t.step(s, 0b10);
        assert!(!t.flagged(s));
        s = t.step(s, 0b11);
        assert!(t.flagged(s));
        s = t.step(s, 0);
        assert!(t.flagged(s), "the flag is absorbing");
    }

    #[test]
    fn never_tracker_negates_the_body() {
        let vars = vars_pq();
        let goal = parse_goal("A [true*] p").unwrap();
        let t = TrackedGoal::compile(&goal, &vars).unwrap();
        assert_eq!(t.kind(), GoalKind::Never);

        // Reading {p} forever never violates [true*] p.
        let mut s = t.initial();
        for _ in 0..4 {
            s = t.step(s, 0b01);
            assert!(!t.flagged(s));
        }
        // One p-free round makes a violating prefix, permanently.
        s = t.step(s, 0b10);
        assert!(t.flagged(s));
        assert!(!t.satisfied_on_cycle(s));
    }

    #[test]
    fn cycle_verdict_agrees_with_direct_evaluation() {
        let vars = vars_pq();
        let goals = [
            parse_goal("E <true*> (p && q)").unwrap(),
            parse_goal("A (!(<true> tt) || <true*> q)").unwrap(),
            Goal::Plain(parse_formula("[true*] (!p || <true> q)").unwrap()),
        ];
        let lassos = [
            lasso("- | p ; p,q"),
            lasso("| q"),
            lasso("p ; q | -"),
            lasso("| p,q"),
        ];
        for goal in &goals {
            for l in &lassos {
                let t = TrackedGoal::compile(goal, &vars).unwrap();
                let prefix = vars.masks_of(l.prefix()).unwrap();
                let cycle = vars.masks_of(l.cycle()).unwrap();
                assert_eq!(
                    t.on_lasso(&prefix, &cycle),
                    eval_goal(goal, l),
                    "tracker disagrees with eval_goal on {goal:?}"
                );
            }
        }
    }
}
