//! Myopic equilibria.
//!
//! A myopic strategy ignores its inputs: the move depends only on the
//! round number, so the strategy is just an ultimately periodic word of
//! moves.  This module enumerates joint profiles of such words — prefix
//! up to a given bound, loop between one and the bound — and returns the
//! first that is a Nash equilibrium.
//!
//! Every report of an equilibrium is exact: deviations are checked
//! against all strategies of the deviator, not just myopic ones.  The
//! converse is not decided — a game can have equilibria whose plays no
//! bounded word profile produces — so a fruitless search reports
//! [`MyopicOutcome::Unknown`] rather than a definitive no.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::game::{Arena, Game, ARENA_START};
use crate::ldlf::Lasso;
use crate::strategy::{StrategyMachine, StrategyProfile};

use super::goals::{compile_goals, GoalKind, TrackedGoal};
use super::witness::NashWitness;

/// Result of the myopic search.
#[derive(Debug, Clone)]
pub enum MyopicOutcome {
    /// A joint word profile that is a Nash equilibrium, with its witness.
    Found(NashWitness, StrategyProfile),
    /// No equilibrium among word profiles within the bound.  Larger
    /// bounds or reactive strategies may still yield one.
    Unknown,
}

impl MyopicOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, MyopicOutcome::Found(..))
    }
}

/// One player's script: the moves of the first rounds, then a loop.
type Word = (Vec<u32>, Vec<u32>);

/// All scripts over the given letters with prefix length up to `bound`
/// and loop length 1 to `bound`, shortest shapes first, letters in
/// odometer order.
fn words_over(letters: &[u32], bound: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for plen in 0..=bound {
        for llen in 1..=bound {
            let len = plen + llen;
            let mut idx = vec![0usize; len];
            loop {
                let seq: Vec<u32> = idx.iter().map(|&k| letters[k]).collect();
                out.push((seq[..plen].to_vec(), seq[plen..].to_vec()));
                let mut k = len;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < letters.len() {
                        break;
                    }
                    idx[k] = 0;
                }
                if idx.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The move `word` scripts for round `t`.
fn letter(word: &Word, t: usize) -> u32 {
    let (prefix, cycle) = word;
    if t < prefix.len() {
        prefix[t]
    } else {
        cycle[(t - prefix.len()) % cycle.len()]
    }
}

/// Aligns the given scripts into one joint lasso: prefix up to the
/// longest individual prefix, loop of the least common multiple of the
/// individual loops.
fn align(words: &[&Word]) -> (Vec<u32>, Vec<u32>) {
    let plen = words.iter().map(|w| w.0.len()).max().unwrap_or(0);
    let llen = words.iter().map(|w| w.1.len()).fold(1, lcm);
    let joint = |t: usize| words.iter().fold(0u32, |sym, w| sym | letter(w, t));
    let prefix = (0..plen).map(joint).collect();
    let cycle = (plen..plen + llen).map(joint).collect();
    (prefix, cycle)
}

/// Whether loser `j` can profit by some deviation while the others keep
/// to their scripts.  Nodes pair the script position with the arena and
/// tracker state; a node has no outgoing edges when the scripted moves
/// are not enabled there, so the check must mind dead ends: a profitable
/// deviation needs an infinite play, hence an "alive" node — one from
/// which the walk can continue forever.
fn deviation_exists(
    arena: &Arena,
    others: &[&Word],
    goal: &TrackedGoal,
    j: usize,
) -> bool {
    let (prefix, cycle) = align(others);
    let plen = prefix.len();
    let llen = cycle.len();
    let scripted = |pos: usize| {
        if pos < plen {
            prefix[pos]
        } else {
            cycle[pos - plen]
        }
    };
    let bump = |pos: usize| if pos + 1 == plen + llen { plen } else { pos + 1 };

    // Reachable nodes and their successors.
    let start = (0usize, ARENA_START, goal.initial());
    let mut succs: HashMap<(usize, u32, u32), Vec<(usize, u32, u32)>> = HashMap::new();
    let mut stack = vec![start];
    succs.insert(start, Vec::new());
    while let Some(node) = stack.pop() {
        let (pos, s, d) = node;
        let mut out = Vec::new();
        for &m in arena.moves(s, j) {
            let sym = scripted(pos) | m;
            // `step` fails exactly when another player's scripted move
            // is not enabled at `s`; the play cannot continue that way.
            let Some(s2) = arena.step(s, sym) else { continue };
            let next = (bump(pos), s2, goal.step(d, sym));
            if !succs.contains_key(&next) {
                succs.insert(next, Vec::new());
                stack.push(next);
            }
            out.push(next);
        }
        succs.insert(node, out);
    }

    // Nodes from which an infinite walk stays within `keep`.
    let alive = |keep: &dyn Fn(&(usize, u32, u32)) -> bool| {
        let mut live: HashSet<(usize, u32, u32)> =
            succs.keys().copied().filter(|n| keep(n)).collect();
        loop {
            let trimmed: HashSet<(usize, u32, u32)> = live
                .iter()
                .copied()
                .filter(|n| succs[n].iter().any(|n2| live.contains(n2)))
                .collect();
            if trimmed.len() == live.len() {
                return trimmed;
            }
            live = trimmed;
        }
    };
    match goal.kind() {
        // The flag must rise on some reachable node the play can then
        // leave running forever.
        GoalKind::Eventually => {
            let live = alive(&|_| true);
            succs.keys().any(|n| goal.flagged(n.2) && live.contains(n))
        }
        // The flag must never rise: an infinite walk through unflagged
        // nodes, starting at the start.
        GoalKind::Never => {
            let live = alive(&|&(_, _, d)| !goal.flagged(d));
            live.contains(&start)
        }
    }
}

/// Searches for a Nash equilibrium among myopic profiles with script
/// shapes within `bound`.
pub fn myopic_ne(game: &Game, bound: usize) -> MyopicOutcome {
    assert!(bound >= 1, "the script bound must be at least 1");
    let arena = Arena::build(game);
    let goals = compile_goals(game).expect("goal atoms are checked at game construction");
    let vars = game.vars();
    let n = game.player_count();

    let menus: Vec<Vec<Word>> = (0..n)
        .map(|i| {
            let block = game.block_mask(i);
            let letters: Vec<u32> = (0..vars.symbol_count() as u32)
                .filter(|m| m & !block == 0)
                .collect();
            words_over(&letters, bound)
        })
        .collect();

    let mut pick = vec![0usize; n];
    loop {
        let words: Vec<&Word> = (0..n).map(|i| &menus[i][pick[i]]).collect();
        let (prefix, cycle) = align(&words);
        let to_vals = |ms: &[u32]| ms.iter().map(|&m| vars.valuation_of(m)).collect();
        let lasso = Lasso::new(to_vals(&prefix), to_vals(&cycle))
            .expect("scripts have a nonempty loop");
        if arena.is_play(&lasso).expect("arena and goals share the variable set") {
            let winners: Vec<usize> =
                (0..n).filter(|&i| goals[i].on_lasso(&prefix, &cycle)).collect();
            let defensible = (0..n).filter(|i| !winners.contains(i)).all(|j| {
                let others: Vec<&Word> =
                    (0..n).filter(|&i| i != j).map(|i| words[i]).collect();
                !deviation_exists(&arena, &others, &goals[j], j)
            });
            if defensible {
                let witness = NashWitness::build(game, &arena, winners, &lasso, &[]);
                let machines = (0..n)
                    .map(|i| script_machine(game, i, words[i]))
                    .collect();
                return MyopicOutcome::Found(witness, StrategyProfile::new(machines));
            }
        }
        // Advance the profile odometer.
        let mut k = n;
        loop {
            if k == 0 {
                return MyopicOutcome::Unknown;
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < menus[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

/// A machine that plays the script regardless of what it reads: one
/// state per position, every input moving to the next position.
fn script_machine(game: &Game, player: usize, word: &Word) -> StrategyMachine {
    let (prefix, cycle) = word;
    let len = prefix.len() + cycle.len();
    let names = (0..len).map(|t| format!("r{t}")).collect();
    let outputs = (0..len).map(|t| letter(word, t)).collect();
    let edges = vec![BTreeMap::new(); len];
    let defaults = (0..len)
        .map(|t| if t + 1 == len { prefix.len() as u32 } else { t as u32 + 1 })
        .collect();
    StrategyMachine::new(
        format!("myopic-p{player}"),
        game.vars().clone(),
        game.block_mask(player),
        names,
        0,
        outputs,
        edges,
        defaults,
    )
    .expect("script moves stay within the player's block")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::membership::ne_membership;
    use crate::game::parse_game;

    #[test]
    fn blind_scripts_can_settle_mutual_indifference() {
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
        let MyopicOutcome::Found(witness, profile) = myopic_ne(&game, 1) else {
            panic!("the all-false scripts are an equilibrium");
        };
        // Neither player can make the other's variable true, so the very
        // first profile — everyone scripting the empty move — holds up.
        assert_eq!(witness.winners, Vec::<usize>::new());
        for m in profile.machines() {
            assert!(m.is_myopic());
        }
        assert!(ne_membership(&game, &profile).is_yes());
    }

    #[test]
    fn the_bound_limits_which_patterns_scripts_can_produce() {
        // p must hold at round 1 and fail at round 2: scripts with
        // prefix and loop of length one are eventually constant too soon
        // for that, and a losing script is no equilibrium because the
        // player deviates and wins.  Doubling the bound finds the
        // alternating loop.
        let game = parse_game(
            r#"
            game "alternation"
            player 0 module "only" controls p
              free
            goal 0 : E <true> (p && <true> !p)
            "#,
        )
        .unwrap();
        assert!(!myopic_ne(&game, 1).is_found());
        let MyopicOutcome::Found(witness, profile) = myopic_ne(&game, 2) else {
            panic!("an alternating script wins");
        };
        assert_eq!(witness.winners, vec![0]);
        assert!(profile.machines()[0].is_myopic());
        assert!(ne_membership(&game, &profile).is_yes());
    }
}
