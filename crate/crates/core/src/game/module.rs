//! Guarded-command modules: how a player moves.
//!
//! A module controls a block of boolean variables and updates them through
//! two lists of guarded commands. *Init* commands run in the first round,
//! with guards read against the empty valuation; *update* commands run in
//! every later round against the full current valuation (guards may read
//! every game variable, not just the controlled ones). When several
//! commands are enabled the module chooses one nondeterministically; when
//! none is, the module *skips*: controlled variables keep their values (in
//! the first round, they become false).

use std::collections::BTreeSet;
use std::fmt;

use crate::ldlf::{PropFormula, Valuation};

/// A guarded command `guard ~> x1 := e1; ...; xk := ek`. Variables not
/// assigned keep their previous value (false in the first round).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedCommand {
    pub guard: PropFormula,
    pub assigns: Vec<(String, PropFormula)>,
}

impl GuardedCommand {
    /// The variables the command assigns.
    pub fn assigned(&self) -> BTreeSet<String> {
        self.assigns.iter().map(|(x, _)| x.clone()).collect()
    }
}

impl fmt::Display for GuardedCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~> ", self.guard)?;
        let parts: Vec<String> =
            self.assigns.iter().map(|(x, e)| format!("{x} := {e}")).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Executes a command against a valuation: the guard must hold; the result
/// maps exactly the assigned variables, true when their expression holds.
pub fn exec_command(cmd: &GuardedCommand, val: &Valuation) -> Result<Valuation, CommandError> {
    if !cmd.guard.holds(val) {
        return Err(CommandError::NotEnabled);
    }
    Ok(cmd
        .assigns
        .iter()
        .filter(|(_, e)| e.holds(val))
        .map(|(x, _)| x.clone())
        .collect())
}

/// Error executing a guarded command.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommandError {
    #[error("command guard does not hold in the given valuation")]
    NotEnabled,
}

/// Which round a move is taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Init,
    Update,
}

/// A player's module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub name: String,
    pub controls: BTreeSet<String>,
    pub init: Vec<GuardedCommand>,
    pub update: Vec<GuardedCommand>,
}

impl Module {
    /// A module that can set its variables to any combination, at any time:
    /// one command per subset of the controlled block, in subset-mask order.
    pub fn free(name: impl Into<String>, controls: BTreeSet<String>) -> Module {
        let ordered: Vec<&String> = controls.iter().collect();
        let mut commands = Vec::new();
        for mask in 0u64..(1u64 << ordered.len()) {
            let assigns = ordered
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let rhs = if mask & (1 << i) != 0 {
                        PropFormula::True
                    } else {
                        PropFormula::False
                    };
                    ((*x).clone(), rhs)
                })
                .collect();
            commands.push(GuardedCommand { guard: PropFormula::True, assigns });
        }
        Module { name: name.into(), controls, init: commands.clone(), update: commands }
    }

    fn commands(&self, phase: Phase) -> &[GuardedCommand] {
        match phase {
            Phase::Init => &self.init,
            Phase::Update => &self.update,
        }
    }

    /// The set of full moves (valuations of the controlled block) the
    /// module can take from `val` in the given phase, sorted and deduped.
    /// Init moves read guards against `val` too — callers pass the empty
    /// valuation — and unassigned variables come out false; update moves
    /// retain them from `val`. A module with no enabled command skips.
    pub fn enabled_moves(&self, phase: Phase, val: &Valuation) -> Vec<Valuation> {
        let mut moves: Vec<Valuation> = Vec::new();
        for cmd in self.commands(phase) {
            let Ok(assigned_true) = exec_command(cmd, val) else {
                continue;
            };
            let mut mv = assigned_true;
            if phase == Phase::Update {
                let assigned = cmd.assigned();
                for x in &self.controls {
                    if !assigned.contains(x) && val.contains(x) {
                        mv.insert(x.clone());
                    }
                }
            }
            if !moves.contains(&mv) {
                moves.push(mv);
            }
        }
        if moves.is_empty() {
            // Skip: variables keep their values (false in the first round).
            let mv: Valuation = match phase {
                Phase::Init => Valuation::new(),
                Phase::Update => {
                    self.controls.iter().filter(|x| val.contains(*x)).cloned().collect()
                }
            };
            moves.push(mv);
        }
        moves.sort();
        moves
    }

    /// Appends an explicit skip command covering the valuations where no
    /// command is enabled, making the command list total without changing
    /// behaviour. Used to align composition with the skip rule.
    fn completed(commands: &[GuardedCommand]) -> Vec<GuardedCommand> {
        let mut out = commands.to_vec();
        let none_enabled = commands
            .iter()
            .map(|c| c.guard.clone())
            .reduce(|a, b| PropFormula::or(a, b))
            .map(|any| PropFormula::not(any))
            .unwrap_or(PropFormula::True);
        out.push(GuardedCommand { guard: none_enabled, assigns: Vec::new() });
        out
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let controls: Vec<String> = self.controls.iter().cloned().collect();
        writeln!(f, "module \"{}\" controls {}", self.name, controls.join(", "))?;
        for c in &self.init {
            writeln!(f, "  init :: {c}")?;
        }
        for c in &self.update {
            writeln!(f, "  update :: {c}")?;
        }
        Ok(())
    }
}

/// Error composing modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComposeError {
    #[error("modules `{0}` and `{1}` both control variable `{2}`")]
    OverlappingControls(String, String, String),
}

/// The composition of two modules over disjoint controlled blocks: a module
/// whose behaviour is the joint behaviour of both. Command lists are first
/// completed with explicit skip commands, then joined pairwise (conjoined
/// guards, concatenated assignments), so each side's skip rule carries over.
pub fn module_product(a: &Module, b: &Module) -> Result<Module, ComposeError> {
    if let Some(x) = a.controls.intersection(&b.controls).next() {
        return Err(ComposeError::OverlappingControls(
            a.name.clone(),
            b.name.clone(),
            x.clone(),
        ));
    }
    let join = |xs: &[GuardedCommand], ys: &[GuardedCommand]| -> Vec<GuardedCommand> {
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for x in xs {
            for y in ys {
                out.push(GuardedCommand {
                    guard: PropFormula::and(x.guard.clone(), y.guard.clone()),
                    assigns: x.assigns.iter().chain(y.assigns.iter()).cloned().collect(),
                });
            }
        }
        out
    };
    Ok(Module {
        name: format!("{}*{}", a.name, b.name),
        controls: a.controls.union(&b.controls).cloned().collect(),
        init: join(&Module::completed(&a.init), &Module::completed(&b.init)),
        update: join(&Module::completed(&a.update), &Module::completed(&b.update)),
    })
}
