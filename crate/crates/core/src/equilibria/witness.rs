//! Equilibrium witnesses and strategy extraction.
//!
//! A witness records the on-path part of an equilibrium: who wins, the
//! ultimately-periodic play, and — for witnesses produced by the
//! defensible-play search — the punishment move tables backing it.  The
//! document serializes to JSON with a fixed key order, so golden tests can
//! compare output verbatim.
//!
//! [`extract_profile`] turns a witness back into explicit strategy
//! machines: every player follows the play; the first time a losing
//! player deviates on its own, everyone else switches to the positional
//! punishment against that player, forever.  Plays that no single loser
//! can profitably leave are exactly what the search certifies, so the
//! extracted profile passes the membership check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{Arena, Game, ARENA_START};
use crate::ldlf::{valuation, Lasso, LassoError, Valuation, VarSetError};
use crate::strategy::{StrategyError, StrategyMachine, StrategyProfile};

use super::goals::compile_goals;
use super::membership::winners_of;
use super::punish::{punishment_region, PunishmentRegion};

/// One row of a punishment move table: in this arena state, with the
/// deviator's goal tracker in this state, the punishing players jointly
/// play this move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunishmentEntry {
    /// Arena state label (a valuation, or "start").
    pub state: String,
    /// The deviator's goal-tracker state.
    pub tracker: u32,
    /// Variables the punishing players set true (their other variables
    /// are set false; the deviator's are unconstrained).
    #[serde(rename = "move")]
    pub response: Vec<String>,
}

/// The positional punishment against one losing player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunishmentTable {
    pub player: usize,
    pub moves: Vec<PunishmentEntry>,
}

/// A certified equilibrium: winners, the play, and (when produced by the
/// defensible-play search) punishment tables for the losers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashWitness {
    /// Name of the game this witness belongs to.
    pub game: String,
    /// Players whose goals the play satisfies, ascending.
    pub winners: Vec<usize>,
    /// Per-player satisfaction bits (index = player).
    pub goals: Vec<bool>,
    /// The play: valuations of the transient part...
    pub prefix: Vec<Vec<String>>,
    /// ... and of the part repeated forever.
    #[serde(rename = "loop")]
    pub cycle: Vec<Vec<String>>,
    /// Punishment move tables, one per losing player (empty for witnesses
    /// found without punishment, e.g. memoryless or myopic searches).
    pub punishments: Vec<PunishmentTable>,
}

/// Failures when reading a witness back.
#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("witness JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed witness: {0}")]
    Malformed(String),
    #[error(transparent)]
    Vars(#[from] VarSetError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

impl From<LassoError> for WitnessError {
    fn from(_: LassoError) -> WitnessError {
        WitnessError::Malformed("the loop part of the play is empty".into())
    }
}

fn to_names(v: &Valuation) -> Vec<String> {
    v.iter().cloned().collect()
}

impl NashWitness {
    /// Assembles a witness from a play and the regions backing it.
    pub(crate) fn build(
        game: &Game,
        arena: &Arena,
        winners: Vec<usize>,
        lasso: &Lasso,
        tables: &[(usize, &PunishmentRegion)],
    ) -> NashWitness {
        let vars = game.vars();
        let goals = (0..game.player_count()).map(|i| winners.contains(&i)).collect();
        let punishments = tables
            .iter()
            .map(|&(player, region)| PunishmentTable {
                player,
                moves: region
                    .entries()
                    .into_iter()
                    .map(|(s, trackers, mv)| PunishmentEntry {
                        state: arena.state_label(s),
                        tracker: trackers[0],
                        response: to_names(&vars.valuation_of(mv)),
                    })
                    .collect(),
            })
            .collect();
        NashWitness {
            game: game.name().to_string(),
            winners,
            goals,
            prefix: lasso.prefix().iter().map(to_names).collect(),
            cycle: lasso.cycle().iter().map(to_names).collect(),
            punishments,
        }
    }

    /// The play as a lasso.
    pub fn lasso(&self) -> Result<Lasso, WitnessError> {
        let prefix = self.prefix.iter().map(|v| valuation(v.iter())).collect();
        let cycle = self.cycle.iter().map(|v| valuation(v.iter())).collect();
        Ok(Lasso::new(prefix, cycle)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<NashWitness, WitnessError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Builds an explicit strategy profile from an equilibrium witness.
///
/// Every machine follows the witness play; on the first unilateral
/// deviation by a losing player, the others switch permanently to the
/// positional punishment for that player.  Errors if the witness does not
/// describe a play of the game, its winner set is wrong, or a deviation
/// leads outside the deviator's punishment region (which cannot happen
/// for witnesses produced by the equilibrium search).
pub fn extract_profile(
    game: &Game,
    witness: &NashWitness,
) -> Result<StrategyProfile, WitnessError> {
    let arena = Arena::build(game);
    let vars = game.vars();
    let lasso = witness.lasso()?;
    if !arena.is_play(&lasso)? {
        return Err(WitnessError::Malformed("the play breaks the game rules".into()));
    }
    if winners_of(game, &lasso) != witness.winners {
        return Err(WitnessError::Malformed(
            "the winner set does not match the play".into(),
        ));
    }
    let n = game.player_count();
    let goals = compile_goals(game)?;
    let losers: Vec<usize> = (0..n).filter(|i| !witness.winners.contains(i)).collect();
    let regions: BTreeMap<usize, PunishmentRegion> = losers
        .iter()
        .map(|&j| (j, punishment_region(&arena, &goals, &[j])))
        .collect();

    // Unroll the play until the joint (position offset, arena state,
    // tracker states) configuration repeats: the follow part of every
    // machine walks this chain.  Offsets wrap into the loop; the arena
    // and tracker states need not be periodic right away, hence the
    // unrolling.
    let pl = lasso.prefix().len();
    let cl = lasso.cycle().len();
    let offset_after = |o: usize| if o + 1 < pl + cl { o + 1 } else { pl };
    let mask_at = |o: usize| -> u32 {
        vars.mask_of(lasso.at(o)).expect("play valuations were checked")
    };
    let mut configs: Vec<(usize, u32, Vec<u32>)> = Vec::new();
    let mut seen: std::collections::HashMap<(usize, u32, Vec<u32>), usize> =
        std::collections::HashMap::new();
    let mut here = (
        0usize,
        ARENA_START,
        goals.iter().map(|g| g.initial()).collect::<Vec<u32>>(),
    );
    let wrap_to = loop {
        if let Some(&at) = seen.get(&here) {
            break at;
        }
        seen.insert(here.clone(), configs.len());
        configs.push(here.clone());
        let (o, s, ref d) = here;
        let sym = mask_at(o);
        let s2 = arena.step(s, sym).expect("the play was validated above");
        let d2 = goals.iter().zip(d).map(|(g, &x)| g.step(x, sym)).collect();
        here = (offset_after(o), s2, d2);
    };
    let follow_len = configs.len();

    // Machine scaffolding under construction, shared with the interning
    // helper below.
    struct Build {
        names: Vec<String>,
        outputs: Vec<u32>,
        edges: Vec<BTreeMap<u32, u32>>,
        punish_ids: BTreeMap<(usize, u32, u32), u32>,
        pending: Vec<(usize, u32, u32)>,
    }

    // Returns the machine state that punishes player `j` from product
    // state `(s, d)`, creating it on first use.
    fn punish_state(
        b: &mut Build,
        arena: &Arena,
        regions: &BTreeMap<usize, PunishmentRegion>,
        block: u32,
        j: usize,
        s: u32,
        d: u32,
    ) -> u32 {
        if let Some(&id) = b.punish_ids.get(&(j, s, d)) {
            return id;
        }
        let id = b.names.len() as u32;
        b.names.push(format!("punish-{j}-{}-{d}", arena.state_label(s)));
        let choice = regions[&j].choice(s, &[d]).expect("punishment states lie in the region");
        b.outputs.push(choice & block);
        b.edges.push(BTreeMap::new());
        b.punish_ids.insert((j, s, d), id);
        b.pending.push((j, s, d));
        id
    }

    let mut machines = Vec::with_capacity(n);
    for i in 0..n {
        let block = game.block_mask(i);
        // State layout: the follow chain, then punishment states as they
        // become reachable, then a terminal "lost" state for situations
        // the profile never produces (several simultaneous deviations, or
        // an illegal move).
        let mut b = Build {
            names: (0..follow_len).map(|t| format!("follow-{t}")).collect(),
            outputs: configs.iter().map(|c| mask_at(c.0) & block).collect(),
            edges: vec![BTreeMap::new(); follow_len],
            punish_ids: BTreeMap::new(),
            pending: Vec::new(),
        };

        // Follow-chain transitions.
        for t in 0..follow_len {
            let (o, s, ref d) = configs[t];
            let conform = mask_at(o);
            let next = if t + 1 < follow_len { (t + 1) as u32 } else { wrap_to as u32 };
            b.edges[t].insert(conform, next);
            for &j in &losers {
                if j == i {
                    continue;
                }
                let jb = game.block_mask(j);
                for &m in arena.moves(s, j) {
                    let dev = (conform & !jb) | m;
                    if dev == conform {
                        continue;
                    }
                    let s2 = arena.step(s, dev).expect("a per-block swap stays legal");
                    let d2 = goals[j].step(d[j], dev);
                    if !regions[&j].contains(s2, &[d2]) {
                        return Err(WitnessError::Malformed(format!(
                            "player {j} escapes punishment by deviating at round {t}"
                        )));
                    }
                    let id = punish_state(&mut b, &arena, &regions, block, j, s2, d2);
                    b.edges[t].insert(dev, id);
                }
            }
        }

        // Punishment-mode transitions, discovered as they become
        // reachable.  The deviator moves freely (within its module);
        // everyone else holds the recorded choice, which keeps the
        // configuration inside the region.
        while let Some((j, s, d)) = b.pending.pop() {
            let id = b.punish_ids[&(j, s, d)] as usize;
            let choice = regions[&j].choice(s, &[d]).expect("state is in the region");
            let jb = game.block_mask(j);
            for &m in arena.moves(s, j) {
                let sym = (choice & !jb) | m;
                let s2 = arena.step(s, sym).expect("choice plus an enabled reply is legal");
                let d2 = goals[j].step(d, sym);
                debug_assert!(regions[&j].contains(s2, &[d2]));
                let to = punish_state(&mut b, &arena, &regions, block, j, s2, d2);
                b.edges[id].insert(sym, to);
            }
        }
        let Build { mut names, mut outputs, mut edges, .. } = b;

        // The terminal state: everything unanticipated stays here.
        let lost = names.len() as u32;
        names.push("lost".to_string());
        outputs.push(0);
        edges.push(BTreeMap::new());
        let defaults = vec![lost; names.len()];

        machines.push(StrategyMachine::new(
            format!("nash-p{i}"),
            vars.clone(),
            block,
            names,
            0,
            outputs,
            edges,
            defaults,
        )?);
    }
    Ok(StrategyProfile::new(machines))
}
