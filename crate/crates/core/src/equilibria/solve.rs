//! Equilibrium existence.
//!
//! The search runs over hypotheses about who wins.  For each candidate
//! winner set `W`, largest first, it looks for an infinite play that
//! follows the game rules, satisfies exactly the goals of `W`, and is
//! *defensible*: whenever a losing player (for the strong variant: any
//! group of losing players) deviates from the play, the configuration
//! reached lies in the deviators' punishment region, so the remaining
//! players can deny the deviation its profit from there (see
//! [`punishment_region`]).  A defensible play is exactly the on-path part
//! of an equilibrium — follow the play, and hand the first deviator its
//! punishment — and conversely the play of any equilibrium profile is
//! defensible, because the others' strategies themselves deny every
//! deviation.
//!
//! Plays are searched as lassos in the product of the arena with every
//! player's goal tracker.  Tracker flags only rise, so they are constant
//! around any product cycle: a cycle state's flags decide the winner set
//! of the whole play.  The search therefore walks the defensible part of
//! the product breadth-first, and for each visited state whose flags
//! spell `W` it looks for a shortest defensible cycle back.  First find
//! wins, making witnesses deterministic: maximal winner sets first, then
//! lexicographic, then shortest prefix and cycle.

use std::collections::{HashMap, VecDeque};

use crate::game::{Arena, Game, ARENA_START};
use crate::ldlf::{Formula, Goal, Lasso, QFormula, VarSetError};

use super::goals::{compile_goals, TrackedGoal};
use super::punish::{punishment_region, PunishmentRegion};
use super::witness::NashWitness;

/// Searches for a Nash equilibrium of the game.
pub fn ne_nonemptiness(game: &Game) -> Option<NashWitness> {
    search(game, true, None)
}

/// Searches for a strong Nash equilibrium: additionally, no group of
/// losing players can deviate together and make all of its members win.
pub fn sne_nonemptiness(game: &Game) -> Option<NashWitness> {
    search(game, false, None)
}

/// Searches for a Nash equilibrium whose play satisfies `condition`.
/// Errors if the condition mentions variables outside the game.
pub fn e_nash(game: &Game, condition: &Goal) -> Result<Option<NashWitness>, VarSetError> {
    let extra = TrackedGoal::compile(condition, game.vars())?;
    Ok(search(game, true, Some(extra)))
}

/// Outcome of [`a_nash`].
#[derive(Debug, Clone)]
pub enum ANashOutcome {
    /// Every Nash equilibrium play satisfies the condition.
    Holds,
    /// A Nash equilibrium whose play does not.
    Counterexample(NashWitness),
}

impl ANashOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, ANashOutcome::Holds)
    }
}

/// Decides whether every Nash equilibrium play satisfies `condition`, by
/// searching for an equilibrium play satisfying its negation: not
/// "some prefix matches" is "every prefix matches the complement", and
/// vice versa.
pub fn a_nash(game: &Game, condition: &Goal) -> Result<ANashOutcome, VarSetError> {
    let dual = match condition {
        Goal::Plain(f) => Goal::Quantified(QFormula::forall(Formula::not(f.clone()))),
        Goal::Quantified(q) => {
            let body = Formula::not(q.body.clone());
            Goal::Quantified(match q.quantifier {
                crate::ldlf::Quantifier::Exists => QFormula::forall(body),
                crate::ldlf::Quantifier::Forall => QFormula::exists(body),
            })
        }
    };
    Ok(match e_nash(game, &dual)? {
        Some(w) => ANashOutcome::Counterexample(w),
        None => ANashOutcome::Holds,
    })
}

/// All `size`-element subsets of `0..n`, each ascending, in lexicographic
/// order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for next in start..n {
            cur.push(next);
            rec(n, size, next + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, size, 0, &mut Vec::new(), &mut out);
    out
}

fn search(game: &Game, single_deviators: bool, extra: Option<TrackedGoal>) -> Option<NashWitness> {
    let arena = Arena::build(game);
    let goals = compile_goals(game).expect("goal atoms are checked at game construction");
    let n = game.player_count();
    let mut regions: HashMap<Vec<usize>, PunishmentRegion> = HashMap::new();
    for size in (0..=n).rev() {
        for w in combinations(n, size) {
            if let Some(found) =
                search_winner_set(game, &arena, &goals, extra.as_ref(), single_deviators, &w, &mut regions)
            {
                return Some(found);
            }
        }
    }
    None
}

fn search_winner_set(
    game: &Game,
    arena: &Arena,
    goals: &[TrackedGoal],
    extra: Option<&TrackedGoal>,
    single_deviators: bool,
    w: &[usize],
    regions: &mut HashMap<Vec<usize>, PunishmentRegion>,
) -> Option<NashWitness> {
    let n = game.player_count();
    let losers: Vec<usize> = (0..n).filter(|i| !w.contains(i)).collect();

    // The deviations to defend against: each loser alone, or — for strong
    // equilibria — every nonempty group of losers.  Winners never deviate
    // profitably (their goals already hold), and a profitable group must
    // make all of its members strictly better off, so it consists of
    // losers only.
    let dev_sets: Vec<Vec<usize>> = if single_deviators {
        losers.iter().map(|&j| vec![j]).collect()
    } else {
        (1..1u32 << losers.len())
            .map(|bits| {
                losers
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| bits >> k & 1 == 1)
                    .map(|(_, &j)| j)
                    .collect()
            })
            .collect()
    };
    for ds in &dev_sets {
        if !regions.contains_key(ds) {
            regions.insert(ds.clone(), punishment_region(arena, goals, ds));
        }
    }
    let regions = &*regions;

    // Product configurations: arena state plus every tracker's state (the
    // side condition's tracker last, if present).
    type Node = (u32, Vec<u32>);
    let init: Node = (
        ARENA_START,
        goals.iter().chain(extra).map(|g| g.initial()).collect(),
    );
    let advance = |node: &Node, sym: u32| -> Node {
        let s2 = arena.step(node.0, sym).expect("search walks legal moves only");
        let d2 = goals
            .iter()
            .chain(extra)
            .zip(&node.1)
            .map(|(g, &d)| g.step(d, sym))
            .collect();
        (s2, d2)
    };
    let flags = |node: &Node| -> Vec<bool> {
        goals
            .iter()
            .chain(extra)
            .zip(&node.1)
            .map(|(g, &d)| g.flagged(d))
            .collect()
    };
    // The winner-set pattern, phrased on flags so it can be compared
    // directly: on a cycle, flags decide satisfaction.
    let matches_w = |node: &Node| -> bool {
        (0..n).all(|i| goals[i].satisfied_on_cycle(node.1[i]) == w.contains(&i))
            && extra.map_or(true, |g| g.satisfied_on_cycle(node.1[n]))
    };

    let all_players: Vec<usize> = (0..n).collect();
    let legal: Vec<Vec<u32>> = (0..arena.state_count() as u32)
        .map(|s| {
            let mut syms = arena.joint_moves(s, &all_players);
            syms.sort_unstable();
            syms
        })
        .collect();

    // An edge is defensible when every deviation lands in its region.
    // The deviators' joint alternatives include their on-path moves:
    // harmless, because from an equilibrium play even the configurations
    // straight ahead admit punishment (the others' own strategies provide
    // it), and it keeps the certificate honest for invisible deviations
    // that only branch off later.
    let secure = |node: &Node, sym: u32| -> bool {
        let (s, ref d) = *node;
        dev_sets.iter().all(|ds| {
            let region = &regions[ds];
            let mut alts = vec![sym];
            for &j in ds {
                let jb = game.block_mask(j);
                let mut next = Vec::with_capacity(alts.len() * arena.moves(s, j).len());
                for &base in &alts {
                    for &m in arena.moves(s, j) {
                        next.push((base & !jb) | m);
                    }
                }
                alts = next;
            }
            alts.iter().all(|&dev| {
                let s2 = arena.step(s, dev).expect("a per-block swap stays legal");
                let d2: Vec<u32> = ds.iter().map(|&j| goals[j].step(d[j], dev)).collect();
                region.contains(s2, &d2)
            })
        })
    };

    // Breadth-first over the defensible part of the product.
    let mut ids: HashMap<Node, u32> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut parent: Vec<Option<(u32, u32)>> = Vec::new();
    ids.insert(init.clone(), 0);
    nodes.push(init);
    parent.push(None);
    let mut head = 0;
    while head < nodes.len() {
        let u = nodes[head].clone();
        let uid = head as u32;
        head += 1;
        for &sym in &legal[u.0 as usize] {
            if !secure(&u, sym) {
                continue;
            }
            let v = advance(&u, sym);
            if !ids.contains_key(&v) {
                ids.insert(v.clone(), nodes.len() as u32);
                nodes.push(v);
                parent.push(Some((uid, sym)));
            }
        }
    }

    // For each candidate (in discovery order), a shortest defensible
    // cycle back to it.  Flags are monotone, so every state on such a
    // cycle carries the candidate's exact flags; restricting the inner
    // search to them is free pruning.
    for cand in 0..nodes.len() {
        if !matches_w(&nodes[cand]) {
            continue;
        }
        let want = flags(&nodes[cand]);
        let mut prev: HashMap<u32, (u32, u32)> = HashMap::new();
        let mut queue = VecDeque::new();
        queue.push_back(cand as u32);
        let mut closing = None;
        'bfs: while let Some(uid) = queue.pop_front() {
            let u = nodes[uid as usize].clone();
            for &sym in &legal[u.0 as usize] {
                if !secure(&u, sym) {
                    continue;
                }
                let v = advance(&u, sym);
                let vid = ids[&v];
                if vid == cand as u32 {
                    closing = Some((uid, sym));
                    break 'bfs;
                }
                if !prev.contains_key(&vid) && flags(&v) == want {
                    prev.insert(vid, (uid, sym));
                    queue.push_back(vid);
                }
            }
        }
        let Some((mut at, last)) = closing else { continue };

        // Reassemble: cycle symbols backwards from the closing edge, then
        // prefix symbols backwards from the candidate.
        let mut cycle_syms = vec![last];
        while at != cand as u32 {
            let (p, sym) = prev[&at];
            cycle_syms.push(sym);
            at = p;
        }
        cycle_syms.reverse();
        let mut prefix_syms = Vec::new();
        let mut cur = cand as u32;
        while let Some((p, sym)) = parent[cur as usize] {
            prefix_syms.push(sym);
            cur = p;
        }
        prefix_syms.reverse();

        let vars = game.vars();
        let to_vals = |syms: &[u32]| syms.iter().map(|&m| vars.valuation_of(m)).collect();
        let lasso = Lasso::new(to_vals(&prefix_syms), to_vals(&cycle_syms))
            .expect("the cycle has at least one edge");
        let tables: Vec<(usize, &PunishmentRegion)> =
            losers.iter().map(|&j| (j, &regions[&vec![j]])).collect();
        return Some(NashWitness::build(game, arena, w.to_vec(), &lasso, &tables));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::membership::ne_membership;
    use crate::equilibria::witness::extract_profile;
    use crate::game::parse_game;
    use crate::ldlf::{eval_goal, parse_goal};

    fn pq_game() -> Game {
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

    #[test]
    fn mutual_favors_peak_at_both_winning() {
        // Winner sets are tried largest first, so the witness has both
        // players winning: p and q true from the first round on.
        let game = pq_game();
        let w = ne_nonemptiness(&game).expect("equilibria exist");
        assert_eq!(w.winners, vec![0, 1]);
        let lasso = w.lasso().unwrap();
        assert!(eval_goal(&parse_goal("q").unwrap(), &lasso));
        assert!(eval_goal(&parse_goal("p").unwrap(), &lasso));
        // Defensibility was certified with punishment tables for nobody.
        assert!(w.punishments.is_empty());
    }

    #[test]
    fn extracted_profile_passes_membership() {
        let game = pq_game();
        let w = ne_nonemptiness(&game).expect("equilibria exist");
        let profile = extract_profile(&game, &w).unwrap();
        assert!(ne_membership(&game, &profile).is_yes());
    }

    #[test]
    fn conflicting_goals_leave_one_loser_with_punishment() {
        // Player 0 wants q eventually; player 1 wants q never (and player
        // 1 controls q).  Only player 1 can win, and it must be ready to
        // punish player 0's deviations — trivially, since player 0 cannot
        // affect q at all.
        let game = parse_game(
            r#"
            game "q-fight"
            player 0 module "beggar" controls p
              free
            player 1 module "keeper" controls q
              free
            goal 0 : E <true*> q
            goal 1 : A [true*] !q
            "#,
        )
        .unwrap();
        let w = ne_nonemptiness(&game).expect("an equilibrium exists");
        assert_eq!(w.winners, vec![1]);
        assert_eq!(w.punishments.len(), 1);
        assert_eq!(w.punishments[0].player, 0);
        let profile = extract_profile(&game, &w).unwrap();
        assert!(ne_membership(&game, &profile).is_yes());
    }

    #[test]
    fn exclusive_demands_are_met_in_sequence() {
        // Both players want exclusive truth: p without q, and q without
        // p, each eventually.  One play can serve both in turn, and the
        // solver prefers the largest winner set, so both win.
        let game = parse_game(
            r#"
            game "exclusive"
            player 0 module "first" controls p
              free
            player 1 module "second" controls q
              free
            goal 0 : E <true*> (p && !q)
            goal 1 : E <true*> (q && !p)
            "#,
        )
        .unwrap();
        let w = ne_nonemptiness(&game).expect("an equilibrium exists");
        assert_eq!(w.winners, vec![0, 1]);
        let lasso = w.lasso().unwrap();
        assert!(eval_goal(game.goal(0), &lasso));
        assert!(eval_goal(game.goal(1), &lasso));
    }

    #[test]
    fn e_nash_constrains_the_play_and_a_nash_dualizes() {
        let game = pq_game();
        // Some equilibrium keeps p false in the first round (player 1
        // then loses, but cannot help itself).  The condition is read on
        // prefixes like any goal, so it takes the universal quantifier to
        // pin the first round down: `E !p` would hold on every play via
        // the empty prefix.
        let cond = parse_goal("A !p").unwrap();
        let w = e_nash(&game, &cond).unwrap().expect("such an equilibrium exists");
        assert!(!w.winners.contains(&1));
        assert!(eval_goal(&cond, &w.lasso().unwrap()));
        // Hence "every equilibrium starts with p" fails...
        match a_nash(&game, &parse_goal("p").unwrap()).unwrap() {
            ANashOutcome::Counterexample(cx) => {
                assert!(!eval_goal(&parse_goal("p").unwrap(), &cx.lasso().unwrap()));
            }
            ANashOutcome::Holds => panic!("expected a counterexample"),
        }
        // ... while a tautological condition holds over all equilibria.
        assert!(a_nash(&game, &parse_goal("tt").unwrap()).unwrap().holds());
        // And an unsatisfiable condition finds nothing.
        assert!(e_nash(&game, &parse_goal("ff").unwrap()).unwrap().is_none());
        // Conditions must speak about game variables.
        assert!(e_nash(&game, &parse_goal("r").unwrap()).is_err());
    }

    #[test]
    fn strong_equilibria_exclude_coordinated_escapes() {
        // Every profile of the mutual-favor game is a Nash equilibrium,
        // but if both players lose they can deviate *together* to a play
        // where both win.  Strong equilibria therefore have winners only.
        let game = pq_game();
        let strong = sne_nonemptiness(&game).expect("a strong equilibrium exists");
        assert_eq!(strong.winners, vec![0, 1]);
        // First-round valuation sets both variables.
        let lasso = strong.lasso().unwrap();
        let first = lasso.at(0);
        assert!(first.contains("p") && first.contains("q"));

        // For contrast, plain Nash admits the both-lose outcome as well.
        let cond = parse_goal("A (!p && !q)").unwrap();
        assert!(e_nash(&game, &cond).unwrap().is_some());
    }
}
