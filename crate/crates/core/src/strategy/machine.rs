//! Finite-state strategies and strategy profiles.
//!
//! A strategy is a Moore machine: each state outputs the move the player
//! takes this round, and the machine then reads the joint valuation the
//! round produced and moves to its next state. The initial state's output
//! is the init-round move. Transitions are total: explicit per-valuation
//! edges, with a per-state default for everything not listed.

use std::collections::{BTreeMap, HashMap};

use crate::automata::InfiniteAcceptor;
use crate::game::Arena;
use crate::ldlf::{Lasso, VarSet};

/// Error building or running strategies.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error(transparent)]
    Parse(#[from] crate::ldlf::ParseError),
    #[error(transparent)]
    Vars(#[from] crate::ldlf::VarSetError),
    #[error("strategy `{strategy}` outputs a move outside the player's block in state `{state}`")]
    OutputOutsideBlock { strategy: String, state: String },
    #[error("the profile has {got} strategies but the game has {want} players")]
    PlayerCount { got: usize, want: usize },
    #[error("profile and game disagree on the variable set")]
    VarsMismatch,
    #[error(
        "player {player}'s strategy plays a move its module does not offer \
         in round {round}"
    )]
    Incompatible { player: usize, round: usize },
}

/// A finite-state strategy for one player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyMachine {
    name: String,
    vars: VarSet,
    /// Bitmask of the variables the player controls.
    block: u32,
    state_names: Vec<String>,
    initial: u32,
    /// `outputs[q]`: the move (mask within `block`) played from state `q`.
    outputs: Vec<u32>,
    /// Explicit transitions per state, keyed by the valuation read.
    edges: Vec<BTreeMap<u32, u32>>,
    /// Fallback next state for valuations without an explicit edge.
    defaults: Vec<u32>,
}

impl StrategyMachine {
    /// Builds a machine, checking outputs stay within the player's block.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        vars: VarSet,
        block: u32,
        state_names: Vec<String>,
        initial: u32,
        outputs: Vec<u32>,
        edges: Vec<BTreeMap<u32, u32>>,
        defaults: Vec<u32>,
    ) -> Result<StrategyMachine, StrategyError> {
        let n = state_names.len();
        assert!(n > 0, "a strategy needs at least one state");
        assert_eq!(outputs.len(), n);
        assert_eq!(edges.len(), n);
        assert_eq!(defaults.len(), n);
        assert!((initial as usize) < n);
        assert!(defaults.iter().all(|&d| (d as usize) < n));
        let m = StrategyMachine {
            name: name.into(),
            vars,
            block,
            state_names,
            initial,
            outputs,
            edges,
            defaults,
        };
        for (q, &out) in m.outputs.iter().enumerate() {
            if out & !m.block != 0 {
                return Err(StrategyError::OutputOutsideBlock {
                    strategy: m.name.clone(),
                    state: m.state_names[q].clone(),
                });
            }
        }
        Ok(m)
    }

    /// A memoryless strategy from a move table: `init` is played in the
    /// first round, afterwards the move depends only on the valuation just
    /// read. The table must have one entry per valuation.
    pub fn from_map(
        name: impl Into<String>,
        vars: VarSet,
        block: u32,
        init: u32,
        moves: &[u32],
    ) -> StrategyMachine {
        let nsym = vars.symbol_count();
        assert_eq!(moves.len(), nsym);
        // State 0 reads nothing yet; state `1 + v` means "just read `v`".
        let state_names: Vec<String> = std::iter::once("start".to_string())
            .chain((0..nsym as u32).map(|v| vars.format_mask(v)))
            .collect();
        let outputs = std::iter::once(init).chain(moves.iter().copied()).collect();
        let edges: Vec<BTreeMap<u32, u32>> = (0..=nsym)
            .map(|_| (0..nsym as u32).map(|v| (v, v + 1)).collect())
            .collect();
        let defaults = vec![0; nsym + 1];
        StrategyMachine {
            name: name.into(),
            vars,
            block,
            state_names,
            initial: 0,
            outputs,
            edges,
            defaults,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn block(&self) -> u32 {
        self.block
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: u32) -> &str {
        &self.state_names[q as usize]
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    /// The move played from state `q`.
    pub fn output(&self, q: u32) -> u32 {
        self.outputs[q as usize]
    }

    /// The state entered after reading the joint valuation `sym` in `q`.
    pub fn next(&self, q: u32, sym: u32) -> u32 {
        self.edges[q as usize].get(&sym).copied().unwrap_or(self.defaults[q as usize])
    }

    /// Whether the strategy is memoryless: any two histories ending in the
    /// same valuation (over any inputs, not just plays) get the same move.
    pub fn is_memoryless(&self) -> bool {
        // Group reachable states by the valuation last read; within a group
        // outputs must agree. The initial state is its own group.
        let nsym = self.vars.symbol_count();
        let mut move_after: HashMap<u32, u32> = HashMap::new();
        let mut seen = vec![false; self.state_count()];
        let mut stack = vec![self.initial];
        seen[self.initial as usize] = true;
        while let Some(q) = stack.pop() {
            for sym in 0..nsym as u32 {
                let r = self.next(q, sym);
                match move_after.entry(sym) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        if *e.get() != self.output(r) {
                            return false;
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(self.output(r));
                    }
                }
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    stack.push(r);
                }
            }
        }
        true
    }

    /// Whether the strategy is blind to its inputs: the move depends only on
    /// the round number. Checked over the subsets of states reachable after
    /// each round.
    pub fn is_myopic(&self) -> bool {
        let nsym = self.vars.symbol_count();
        let mut seen = std::collections::BTreeSet::new();
        let mut frontier: Vec<u32> = vec![self.initial];
        while seen.insert(frontier.clone()) {
            let out = self.output(frontier[0]);
            if frontier.iter().any(|&q| self.output(q) != out) {
                return false;
            }
            let mut next: Vec<u32> = frontier
                .iter()
                .flat_map(|&q| (0..nsym as u32).map(move |sym| self.next(q, sym)))
                .collect();
            next.sort_unstable();
            next.dedup();
            frontier = next;
        }
        true
    }

    /// The acceptor of the infinite words consistent with this strategy:
    /// at every position, the projection onto the player's block must equal
    /// the machine's current output. Inconsistent words fall into a
    /// forbidden sink.
    pub fn automaton(&self) -> InfiniteAcceptor {
        let nsym = self.vars.symbol_count();
        let n = self.state_count();
        let sink = n as u32;
        let trans: Vec<Vec<Vec<u32>>> = (0..=n as u32)
            .map(|q| {
                (0..nsym as u32)
                    .map(|sym| {
                        if q == sink {
                            Vec::new()
                        } else if sym & self.block == self.output(q) {
                            vec![self.next(q, sym)]
                        } else {
                            vec![sink]
                        }
                    })
                    .collect()
            })
            .collect();
        let mut flagged = vec![true; n + 1];
        let mut forbidden = vec![false; n + 1];
        flagged[n] = false;
        forbidden[n] = true;
        let labels = (0..n as u32)
            .map(|q| self.state_name(q).to_string())
            .chain(std::iter::once("sink".to_string()))
            .collect();
        InfiniteAcceptor::from_parts(
            self.vars.clone(),
            vec![self.initial],
            trans,
            flagged,
            forbidden,
            labels,
        )
    }

    /// Whether the machine's output is an enabled move at every pair of
    /// machine state and arena state reachable when the other players act
    /// arbitrarily. Stronger than following one play: it guards the machine
    /// against every opponent behaviour, which matters when it is used to
    /// punish deviations.
    pub fn compatible_everywhere(&self, arena: &Arena, player: usize) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![(self.initial, crate::game::ARENA_START)];
        while let Some((q, s)) = stack.pop() {
            if !seen.insert((q, s)) {
                continue;
            }
            let mv = self.output(q);
            if arena.moves(s, player).binary_search(&mv).is_err() {
                return false;
            }
            for &succ in arena.successors(s) {
                let sym = arena.mask_of(succ).expect("successors are valuation states");
                if sym & self.block == mv {
                    stack.push((self.next(q, sym), succ));
                }
            }
        }
        true
    }
}

/// One strategy per player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyProfile {
    machines: Vec<StrategyMachine>,
}

impl StrategyProfile {
    pub fn new(machines: Vec<StrategyMachine>) -> StrategyProfile {
        assert!(!machines.is_empty());
        StrategyProfile { machines }
    }

    pub fn machines(&self) -> &[StrategyMachine] {
        &self.machines
    }

    pub fn machine(&self, player: usize) -> &StrategyMachine {
        &self.machines[player]
    }

    pub fn player_count(&self) -> usize {
        self.machines.len()
    }

    /// The unique play the profile induces on the arena, as a lasso, or an
    /// error naming the first player whose move is not enabled. Also checks
    /// the profile fits the arena (player count, variable set).
    pub fn play_of(&self, arena: &Arena) -> Result<Lasso, StrategyError> {
        if self.player_count() != arena.player_count() {
            return Err(StrategyError::PlayerCount {
                got: self.player_count(),
                want: arena.player_count(),
            });
        }
        if self.machines.iter().any(|m| m.vars() != arena.vars()) {
            return Err(StrategyError::VarsMismatch);
        }
        let mut qs: Vec<u32> = self.machines.iter().map(|m| m.initial()).collect();
        let mut state = crate::game::ARENA_START;
        let mut seen: HashMap<(Vec<u32>, u32), usize> = HashMap::new();
        let mut word: Vec<u32> = Vec::new();
        loop {
            if let Some(&start) = seen.get(&(qs.clone(), state)) {
                let cycle = word.split_off(start);
                let prefix = word.iter().map(|&v| arena.vars().valuation_of(v)).collect();
                let cycle = cycle.iter().map(|&v| arena.vars().valuation_of(v)).collect();
                return Ok(Lasso::new(prefix, cycle).expect("cycle is nonempty"));
            }
            seen.insert((qs.clone(), state), word.len());
            let mut sym = 0u32;
            for (i, m) in self.machines.iter().enumerate() {
                let mv = m.output(qs[i]);
                if arena.moves(state, i).binary_search(&mv).is_err() {
                    return Err(StrategyError::Incompatible { player: i, round: word.len() });
                }
                sym |= mv;
            }
            state = arena.step(state, sym).expect("enabled blocks give a legal step");
            word.push(sym);
            for (i, m) in self.machines.iter().enumerate() {
                qs[i] = m.next(qs[i], sym);
            }
        }
    }

    /// Whether every player's moves stay enabled along the induced play.
    pub fn is_compatible(&self, arena: &Arena) -> bool {
        self.play_of(arena).is_ok()
    }
}
