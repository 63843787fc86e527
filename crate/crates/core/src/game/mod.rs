//! Multi-player games played by guarded-command modules.
//!
//! A game is a set of players, each owning a [`Module`] over a private block
//! of boolean variables and a [`Goal`] over all of them. Play proceeds in
//! rounds: every player picks an enabled command of its module, the chosen
//! commands execute jointly, and the resulting valuation extends the trace.
//! The [`Arena`] unfolds this into an explicit graph whose runs are exactly
//! the traces the game can produce.
//!
//! Games are written in a small text format, see [`parse_game`].

mod arena;
mod module;
pub(crate) mod parser;

pub use arena::{Arena, ARENA_START};
pub use module::{
    exec_command, module_product, CommandError, ComposeError, GuardedCommand, Module, Phase,
};
pub use parser::parse_game;

use crate::ldlf::{Goal, ParseError, VarSet, VarSetError};

/// One player: its module and its goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Player {
    pub module: Module,
    pub goal: Goal,
}

/// Error building or parsing a game.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Vars(#[from] VarSetError),
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("players {0} and {1} both control variable `{2}`")]
    OverlappingControls(usize, usize, String),
    #[error("player {player}: {context} mentions undeclared variable `{var}`")]
    UnknownVariable { player: usize, var: String, context: String },
    #[error("player {player} assigns `{var}`, which it does not control")]
    AssignOutsideControls { player: usize, var: String },
    #[error("player {player} assigns `{var}` twice in one command")]
    DuplicateAssign { player: usize, var: String },
    #[error("goal for player {0} mentions undeclared variable `{1}`")]
    GoalVariable(usize, String),
}

/// A closed multi-player game: modules with pairwise disjoint controlled
/// blocks whose union is the variable set, plus one goal per player.
#[derive(Debug, Clone)]
pub struct Game {
    name: String,
    players: Vec<Player>,
    vars: VarSet,
    blocks: Vec<u32>,
}

impl Game {
    /// Builds a game from players, checking that controlled blocks are
    /// disjoint and that every formula mentions declared variables only.
    pub fn new(name: impl Into<String>, players: Vec<Player>) -> Result<Game, GameError> {
        if players.is_empty() {
            return Err(GameError::NoPlayers);
        }
        for (i, a) in players.iter().enumerate() {
            for (j, b) in players.iter().enumerate().skip(i + 1) {
                if let Some(x) = a.module.controls.intersection(&b.module.controls).next() {
                    return Err(GameError::OverlappingControls(i, j, x.clone()));
                }
            }
        }
        let names: Vec<String> = players
            .iter()
            .flat_map(|p| p.module.controls.iter().cloned())
            .collect();
        let vars = VarSet::new(names)?;
        let declared = |x: &str| vars.index_of(x).is_some();
        for (i, p) in players.iter().enumerate() {
            let check = |atoms: std::collections::BTreeSet<String>,
                             context: &str|
             -> Result<(), GameError> {
                for x in atoms {
                    if !declared(&x) {
                        return Err(GameError::UnknownVariable {
                            player: i,
                            var: x,
                            context: context.to_string(),
                        });
                    }
                }
                Ok(())
            };
            for cmd in p.module.init.iter().chain(p.module.update.iter()) {
                let mut atoms = std::collections::BTreeSet::new();
                cmd.guard.collect_atoms(&mut atoms);
                check(atoms, "a guard")?;
                let mut seen = std::collections::BTreeSet::new();
                for (x, e) in &cmd.assigns {
                    if !p.module.controls.contains(x) {
                        return Err(GameError::AssignOutsideControls {
                            player: i,
                            var: x.clone(),
                        });
                    }
                    if !seen.insert(x.clone()) {
                        return Err(GameError::DuplicateAssign { player: i, var: x.clone() });
                    }
                    let mut atoms = std::collections::BTreeSet::new();
                    e.collect_atoms(&mut atoms);
                    check(atoms, "an assignment")?;
                }
            }
            for x in p.goal.atoms() {
                if !declared(&x) {
                    return Err(GameError::GoalVariable(i, x));
                }
            }
        }
        let blocks = players
            .iter()
            .map(|p| vars.block_mask(&p.module.controls))
            .collect::<Result<Vec<u32>, VarSetError>>()?;
        Ok(Game { name: name.into(), players, vars, blocks })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn module(&self, player: usize) -> &Module {
        &self.players[player].module
    }

    pub fn goal(&self, player: usize) -> &Goal {
        &self.players[player].goal
    }

    /// All game variables, in index order.
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Bitmask of the variables player `player` controls.
    pub fn block_mask(&self, player: usize) -> u32 {
        self.blocks[player]
    }
}

impl std::fmt::Display for Game {
    /// Prints the game in the text format [`parse_game`] reads back.
    /// Modules that coincide with the free module over their block are
    /// written as `free` instead of an expanded command list.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "game \"{}\"", self.name)?;
        for (i, p) in self.players.iter().enumerate() {
            writeln!(f)?;
            let controls: Vec<String> = p.module.controls.iter().cloned().collect();
            writeln!(
                f,
                "player {i} module \"{}\" controls {}",
                p.module.name,
                controls.join(", ")
            )?;
            if p.module == Module::free(p.module.name.clone(), p.module.controls.clone()) {
                writeln!(f, "  free")?;
            } else {
                for c in &p.module.init {
                    writeln!(f, "  init :: {c}")?;
                }
                for c in &p.module.update {
                    writeln!(f, "  update :: {c}")?;
                }
            }
        }
        writeln!(f)?;
        for (i, p) in self.players.iter().enumerate() {
            writeln!(f, "goal {i} : {}", p.goal)?;
        }
        Ok(())
    }
}
