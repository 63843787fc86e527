//! Line-oriented parser for strategy-profile files.
//!
//! ```text
//! # one strategy per player, matched against a game when loading
//! profile "toggle"
//!
//! player 0 strategy "alternate"
//!   states: a, b
//!   initial: a
//!   output a : p
//!   output b : -
//!   on a reading p, q -> b
//!   default a -> b
//!   default b -> a
//!
//! player 1 strategy "quiet"
//!   states: s
//!   initial: s
//!   output s : -
//!   default s -> s
//! ```
//!
//! `output` lists the controlled variables the state sets true (`-` for
//! none): the move played while the machine sits in that state. After each
//! round the machine reads the full joint valuation: `on q reading vs -> r`
//! matches the valuation whose true variables are exactly `vs`, and
//! `default` catches everything unlisted. Every state needs an `output` and
//! a `default`; indices must cover the game's players.

use std::collections::BTreeMap;

use crate::game::parser::{strip_comment, Cur};
use crate::game::Game;
use crate::ldlf::{ParseError, Valuation};

use super::machine::{StrategyError, StrategyMachine, StrategyProfile};

struct Section {
    index: usize,
    line: usize,
    name: String,
    states: Vec<String>,
    initial: Option<(String, usize)>,
    outputs: Vec<(String, Valuation, usize)>,
    edges: Vec<(String, Valuation, String, usize)>,
    defaults: Vec<(String, String, usize)>,
}

/// Parses a variable list: `-` or nothing for the empty set, else
/// comma-separated names. Stops at `stop` if given (e.g. `->`).
fn var_list(cur: &mut Cur<'_>, stop: Option<&str>) -> Result<Valuation, ParseError> {
    let done = |c: &Cur<'_>| match stop {
        Some(s) => c.rest().starts_with(s),
        None => c.at_end(),
    };
    let mut vars = Valuation::new();
    if cur.eat_word("-") || done(cur) {
        return Ok(vars);
    }
    loop {
        let col = cur.col();
        let v = cur.ident()?;
        if !vars.insert(v.clone()) {
            return Err(ParseError::new(cur.line, col, format!("variable `{v}` listed twice")));
        }
        if done(cur) {
            return Ok(vars);
        }
        cur.expect_symbol(",")?;
    }
}

impl Section {
    fn build(self, game: &Game) -> Result<StrategyMachine, StrategyError> {
        let player = self.index;
        let vars = game.vars().clone();
        let block = game.block_mask(player);
        let controls = &game.module(player).controls;
        let n = self.states.len();
        if n == 0 {
            return Err(ParseError::new(self.line, 1, "a strategy needs at least one state".into()).into());
        }
        let state_ix = |name: &str, line: usize| -> Result<u32, StrategyError> {
            self.states
                .iter()
                .position(|s| s == name)
                .map(|i| i as u32)
                .ok_or_else(|| {
                    ParseError::new(line, 1, format!("unknown state `{name}`")).into()
                })
        };
        let Some((init_name, init_line)) = &self.initial else {
            return Err(ParseError::new(self.line, 1, "missing `initial:` line".into()).into());
        };
        let initial = state_ix(init_name, *init_line)?;

        let mut outputs: Vec<Option<u32>> = vec![None; n];
        for (state, mv, line) in &self.outputs {
            let q = state_ix(state, *line)? as usize;
            if outputs[q].is_some() {
                return Err(ParseError::new(*line, 1, format!("state `{state}` has two `output` lines")).into());
            }
            for v in mv {
                if !controls.contains(v) {
                    return Err(ParseError::new(
                        *line,
                        1,
                        format!("player {player} does not control `{v}`"),
                    )
                    .into());
                }
            }
            outputs[q] = Some(vars.mask_of(mv)?);
        }
        let outputs: Vec<u32> = outputs
            .into_iter()
            .enumerate()
            .map(|(q, o)| {
                o.ok_or_else(|| {
                    StrategyError::from(ParseError::new(
                        self.line,
                        1,
                        format!("state `{}` has no `output` line", self.states[q]),
                    ))
                })
            })
            .collect::<Result<_, _>>()?;

        let mut edges: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); n];
        for (from, read, to, line) in &self.edges {
            let q = state_ix(from, *line)? as usize;
            let r = state_ix(to, *line)?;
            let sym = vars.mask_of(read).map_err(|e| {
                StrategyError::from(ParseError::new(*line, 1, e.to_string()))
            })?;
            if edges[q].insert(sym, r).is_some() {
                return Err(ParseError::new(
                    *line,
                    1,
                    format!("state `{from}` already has an edge reading {}", vars.format_mask(sym)),
                )
                .into());
            }
        }

        let mut defaults: Vec<Option<u32>> = vec![None; n];
        for (from, to, line) in &self.defaults {
            let q = state_ix(from, *line)? as usize;
            if defaults[q].is_some() {
                return Err(ParseError::new(*line, 1, format!("state `{from}` has two `default` lines")).into());
            }
            defaults[q] = Some(state_ix(to, *line)?);
        }
        let defaults: Vec<u32> = defaults
            .into_iter()
            .enumerate()
            .map(|(q, d)| {
                d.ok_or_else(|| {
                    StrategyError::from(ParseError::new(
                        self.line,
                        1,
                        format!("state `{}` has no `default` line", self.states[q]),
                    ))
                })
            })
            .collect::<Result<_, _>>()?;

        StrategyMachine::new(self.name, vars, block, self.states, initial, outputs, edges, defaults)
    }
}

/// Parses a profile file against the game it is meant for. The game
/// supplies the variable set and the per-player blocks; the profile must
/// give exactly one strategy per player.
pub fn parse_profile(text: &str, game: &Game) -> Result<StrategyProfile, StrategyError> {
    let mut header = false;
    let mut sections: Vec<Section> = Vec::new();

    for (ix, raw) in text.lines().enumerate() {
        let line_no = ix + 1;
        let stripped = strip_comment(raw);
        let mut cur = Cur::new(stripped, line_no);
        if cur.at_end() {
            continue;
        }
        if cur.eat_word("profile") {
            if header {
                return Err(cur.err("duplicate `profile` header").into());
            }
            cur.quoted()?;
            header = true;
            continue;
        }
        if !header {
            return Err(cur.err("expected the `profile \"name\"` header first").into());
        }
        if cur.eat_word("player") {
            let index = cur.number()?;
            if !cur.eat_word("strategy") {
                return Err(cur.err("expected `strategy` after the player index").into());
            }
            let name = cur.quoted()?;
            if sections.iter().any(|s| s.index == index) {
                return Err(ParseError::new(line_no, 1, format!("player {index} declared twice")).into());
            }
            sections.push(Section {
                index,
                line: line_no,
                name,
                states: Vec::new(),
                initial: None,
                outputs: Vec::new(),
                edges: Vec::new(),
                defaults: Vec::new(),
            });
            continue;
        }
        let Some(section) = sections.last_mut() else {
            return Err(cur.err("expected a `player` line first").into());
        };
        if cur.eat_word("states") {
            cur.expect_symbol(":")?;
            loop {
                let col = cur.col();
                let s = cur.ident()?;
                if section.states.contains(&s) {
                    return Err(ParseError::new(line_no, col, format!("state `{s}` listed twice")).into());
                }
                section.states.push(s);
                if cur.at_end() {
                    break;
                }
                cur.expect_symbol(",")?;
            }
            continue;
        }
        if cur.eat_word("initial") {
            cur.expect_symbol(":")?;
            if section.initial.is_some() {
                return Err(cur.err("duplicate `initial:` line").into());
            }
            section.initial = Some((cur.ident()?, line_no));
            continue;
        }
        if cur.eat_word("output") {
            let state = cur.ident()?;
            cur.expect_symbol(":")?;
            let mv = var_list(&mut cur, None)?;
            section.outputs.push((state, mv, line_no));
            continue;
        }
        if cur.eat_word("on") {
            let from = cur.ident()?;
            if !cur.eat_word("reading") {
                return Err(cur.err("expected `reading` after the state name").into());
            }
            let read = var_list(&mut cur, Some("->"))?;
            cur.expect_symbol("->")?;
            let to = cur.ident()?;
            section.edges.push((from, read, to, line_no));
            continue;
        }
        if cur.eat_word("default") {
            let from = cur.ident()?;
            cur.expect_symbol("->")?;
            let to = cur.ident()?;
            section.defaults.push((from, to, line_no));
            continue;
        }
        return Err(cur
            .err("expected `states:`, `initial:`, `output`, `on`, `default`, or `player`")
            .into());
    }

    if !header {
        return Err(ParseError::new(1, 1, "expected the `profile \"name\"` header".into()).into());
    }
    sections.sort_by_key(|s| s.index);
    if sections.len() != game.player_count()
        || sections.iter().enumerate().any(|(i, s)| s.index != i)
    {
        return Err(StrategyError::PlayerCount {
            got: sections.len(),
            want: game.player_count(),
        });
    }
    let machines = sections
        .into_iter()
        .map(|s| s.build(game))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(StrategyProfile::new(machines))
}
