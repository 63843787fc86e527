//! Line-oriented parser for game files.
//!
//! ```text
//! # comments run to end of line (`//` works too)
//! game "toggle"
//!
//! player 0 module "switch" controls p
//!   init   :: tt ~> p := tt
//!   update :: p  ~> p := ff
//!   update :: !p ~> p := tt
//!
//! player 1 module "env" controls q
//!   free
//!
//! goal 0 : <true*> (p && q)
//! goal 1 : A [true*] !q
//! ```
//!
//! The `game` header comes first. Each `player` line opens a module section;
//! the following indented lines are its guarded commands (`guard ~>
//! assignments`, assignments `x := formula` separated by `;`, possibly
//! none), or the single keyword `free`, which stands for one command per
//! valuation of the controlled block — such a player can always set its
//! variables to anything. Player indices must be `0..n` and each player
//! needs exactly one `goal` line; goals may be plain formulas or carry an
//! `E`/`A` quantifier. Guards and goals may mention any game variable,
//! assignments only the player's own.

use crate::ldlf::parser::{parse_goal_at, parse_prop_at};
use crate::ldlf::{Goal, ParseError};

use super::module::{GuardedCommand, Module};
use super::{Game, GameError, Player};

/// Largest controlled block accepted for `free` players; beyond this the
/// expanded command list (one per subset) gets out of hand.
const MAX_FREE_VARS: usize = 16;

const RESERVED: &[&str] = &["tt", "ff", "true", "false", "E", "A"];

/// Cursor over one line of input, tracking the column for error messages.
/// Shared with the strategy-file parser.
pub(crate) struct Cur<'a> {
    pub(crate) s: &'a str,
    pub(crate) at: usize,
    pub(crate) line: usize,
}

impl<'a> Cur<'a> {
    pub(crate) fn new(s: &'a str, line: usize) -> Cur<'a> {
        let mut c = Cur { s, at: 0, line };
        c.skip_ws();
        c
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.s[self.at..].starts_with(|c: char| c.is_whitespace()) {
            self.at += 1;
        }
    }

    pub(crate) fn col(&self) -> usize {
        self.at + 1
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.s[self.at..]
    }

    pub(crate) fn at_end(&self) -> bool {
        self.rest().is_empty()
    }

    pub(crate) fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col(), message.into())
    }

    /// Consumes `kw` if it appears here as a whole word.
    pub(crate) fn eat_word(&mut self, kw: &str) -> bool {
        let rest = self.rest();
        if rest.starts_with(kw) {
            let next = rest[kw.len()..].chars().next();
            if !next.is_some_and(|c| c.is_alphanumeric() || c == '_') {
                self.at += kw.len();
                self.skip_ws();
                return true;
            }
        }
        false
    }

    /// Consumes `tok` literally (no word boundary), e.g. `::` or `:`.
    pub(crate) fn expect_symbol(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.rest().starts_with(tok) {
            self.at += tok.len();
            self.skip_ws();
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    pub(crate) fn number(&mut self) -> Result<usize, ParseError> {
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(self.err("expected a player index"));
        }
        let n = digits
            .parse::<usize>()
            .map_err(|_| self.err(format!("player index `{digits}` is out of range")))?;
        self.at += digits.len();
        self.skip_ws();
        Ok(n)
    }

    pub(crate) fn quoted(&mut self) -> Result<String, ParseError> {
        if !self.rest().starts_with('"') {
            return Err(self.err("expected a quoted name"));
        }
        let body = &self.rest()[1..];
        let Some(end) = body.find('"') else {
            return Err(self.err("unterminated quoted name"));
        };
        let name = body[..end].to_string();
        self.at += end + 2;
        self.skip_ws();
        Ok(name)
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        let rest = self.rest();
        let mut len = 0;
        for (i, c) in rest.char_indices() {
            let ok = if i == 0 { c.is_alphabetic() || c == '_' } else { c.is_alphanumeric() || c == '_' };
            if !ok {
                break;
            }
            len = i + c.len_utf8();
        }
        if len == 0 {
            return Err(self.err("expected a variable name"));
        }
        let name = rest[..len].to_string();
        if RESERVED.contains(&name.as_str()) {
            return Err(self.err(format!("`{name}` is reserved and cannot name a variable")));
        }
        self.at += len;
        self.skip_ws();
        Ok(name)
    }
}

/// One `player` section as collected from the file.
struct Section {
    index: usize,
    line: usize,
    module: Module,
    free: bool,
    has_commands: bool,
}

pub(crate) fn strip_comment(line: &str) -> &str {
    let cut = match (line.find('#'), line.find("//")) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    };
    match cut {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses a command body `guard ~> x := e; ...` starting at the cursor.
fn parse_command(cur: &Cur<'_>) -> Result<GuardedCommand, ParseError> {
    let line = cur.s;
    let base = cur.at;
    let Some(sep) = line[base..].find("~>") else {
        return Err(ParseError::new(cur.line, line.len() + 1, "expected `~>` after the guard".into()));
    };
    let guard = parse_prop_at(&line[base..base + sep], cur.line, base + 1)?;
    let mut assigns = Vec::new();
    let tail_start = base + sep + 2;
    if !line[tail_start..].trim().is_empty() {
        let mut piece_start = tail_start;
        loop {
            let piece_end = line[piece_start..]
                .find(';')
                .map(|r| piece_start + r)
                .unwrap_or(line.len());
            let piece = &line[piece_start..piece_end];
            if piece.trim().is_empty() {
                return Err(ParseError::new(cur.line, piece_start + 1, "empty assignment".into()));
            }
            // An identifier scan cannot run past the `;`, so the cursor may
            // safely range over the whole line.
            let mut pc = Cur { s: line, at: piece_start, line: cur.line };
            pc.skip_ws();
            let lhs = pc.ident()?;
            pc.expect_symbol(":=")?;
            let rhs = parse_prop_at(&line[pc.at..piece_end], cur.line, pc.at + 1)?;
            assigns.push((lhs, rhs));
            if piece_end == line.len() {
                break;
            }
            piece_start = piece_end + 1;
        }
    }
    Ok(GuardedCommand { guard, assigns })
}

/// Parses the game text format. See the module docs for the grammar.
pub fn parse_game(text: &str) -> Result<Game, GameError> {
    let mut name: Option<String> = None;
    let mut sections: Vec<Section> = Vec::new();
    let mut goals: Vec<(usize, Goal, usize)> = Vec::new();

    for (ix, raw) in text.lines().enumerate() {
        let line_no = ix + 1;
        let stripped = strip_comment(raw);
        let mut cur = Cur::new(stripped, line_no);
        if cur.at_end() {
            continue;
        }
        if cur.eat_word("game") {
            if name.is_some() {
                return Err(cur.err("duplicate `game` header").into());
            }
            let n = cur.quoted()?;
            if !cur.at_end() {
                return Err(cur.err("unexpected text after the game name").into());
            }
            name = Some(n);
            continue;
        }
        if name.is_none() {
            return Err(cur.err("expected the `game \"name\"` header first").into());
        }
        if cur.eat_word("player") {
            let index = cur.number()?;
            if !cur.eat_word("module") {
                return Err(cur.err("expected `module` after the player index").into());
            }
            let module_name = cur.quoted()?;
            if !cur.eat_word("controls") {
                return Err(cur.err("expected `controls` after the module name").into());
            }
            let mut controls = std::collections::BTreeSet::new();
            loop {
                let col = cur.col();
                let v = cur.ident()?;
                if !controls.insert(v.clone()) {
                    return Err(ParseError::new(line_no, col, format!("variable `{v}` listed twice")).into());
                }
                if cur.at_end() {
                    break;
                }
                cur.expect_symbol(",")?;
            }
            if sections.iter().any(|s| s.index == index) {
                return Err(ParseError::new(line_no, 1, format!("player {index} declared twice")).into());
            }
            sections.push(Section {
                index,
                line: line_no,
                module: Module { name: module_name, controls, init: Vec::new(), update: Vec::new() },
                free: false,
                has_commands: false,
            });
            continue;
        }
        if cur.eat_word("goal") {
            let index = cur.number()?;
            cur.expect_symbol(":")?;
            let goal = parse_goal_at(&stripped[cur.at..], line_no, cur.col())?;
            if goals.iter().any(|(i, _, _)| *i == index) {
                return Err(ParseError::new(line_no, 1, format!("goal for player {index} given twice")).into());
            }
            goals.push((index, goal, line_no));
            continue;
        }
        // Body lines: `free`, `init :: ...`, `update :: ...`.
        let Some(section) = sections.last_mut() else {
            return Err(cur.err("expected `player`, `goal`, or the `game` header").into());
        };
        if cur.eat_word("free") {
            if !cur.at_end() {
                return Err(cur.err("unexpected text after `free`").into());
            }
            if section.has_commands {
                return Err(cur.err("`free` cannot be mixed with explicit commands").into());
            }
            section.free = true;
            continue;
        }
        let is_init = cur.eat_word("init");
        let is_update = !is_init && cur.eat_word("update");
        if is_init || is_update {
            if section.free {
                return Err(cur.err("`free` cannot be mixed with explicit commands").into());
            }
            cur.expect_symbol("::")?;
            let command = parse_command(&cur)?;
            section.has_commands = true;
            if is_init {
                section.module.init.push(command);
            } else {
                section.module.update.push(command);
            }
            continue;
        }
        return Err(cur.err("expected `init ::`, `update ::`, `free`, `player`, or `goal`").into());
    }

    let Some(name) = name else {
        return Err(ParseError::new(1, 1, "expected the `game \"name\"` header".into()).into());
    };
    sections.sort_by_key(|s| s.index);
    let count = sections.len();
    for (want, s) in sections.iter().enumerate() {
        if s.index != want {
            return Err(ParseError::new(
                s.line,
                1,
                format!("player indices must be 0..{count}; player {want} is missing"),
            )
            .into());
        }
    }
    let mut players = Vec::with_capacity(count);
    for s in sections {
        let module = if s.free {
            if s.module.controls.len() > MAX_FREE_VARS {
                return Err(ParseError::new(
                    s.line,
                    1,
                    format!(
                        "`free` over {} variables expands to too many commands (limit {MAX_FREE_VARS})",
                        s.module.controls.len()
                    ),
                )
                .into());
            }
            Module::free(s.module.name, s.module.controls)
        } else {
            s.module
        };
        let Some(pos) = goals.iter().position(|(i, _, _)| *i == s.index) else {
            return Err(ParseError::new(
                s.line,
                1,
                format!("player {} has no goal", s.index),
            )
            .into());
        };
        let (_, goal, _) = goals.swap_remove(pos);
        players.push(Player { module, goal });
    }
    if let Some((i, _, line)) = goals.first() {
        return Err(ParseError::new(*line, 1, format!("goal for unknown player {i}")).into());
    }
    Game::new(name, players)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Phase;
    use crate::ldlf::{parse_formula, valuation, Quantifier, Valuation};

    const TOGGLE: &str = r#"
        # a switch that must alternate, against a free environment
        game "toggle"

        player 0 module "switch" controls p
          init   :: tt ~> p := tt
          update :: p  ~> p := ff
          update :: !p ~> p := tt

        player 1 module "env" controls q
          free

        goal 0 : <true*> (p && q)
        goal 1 : A [true*] !q
    "#;

    #[test]
    fn parses_the_toggle_game() {
        let g = parse_game(TOGGLE).unwrap();
        assert_eq!(g.name(), "toggle");
        assert_eq!(g.player_count(), 2);
        assert_eq!(g.vars().names(), ["p", "q"]);
        assert_eq!(g.block_mask(0), 0b01);
        assert_eq!(g.block_mask(1), 0b10);
        let m = g.module(0);
        assert_eq!(m.name, "switch");
        assert_eq!(m.enabled_moves(Phase::Init, &Valuation::new()), vec![valuation(["p"])]);
        match g.goal(0) {
            crate::ldlf::Goal::Plain(f) => {
                assert_eq!(*f, parse_formula("<true*>(p && q)").unwrap());
            }
            _ => panic!("expected a plain goal"),
        }
        match g.goal(1) {
            crate::ldlf::Goal::Quantified(q) => assert_eq!(q.quantifier, Quantifier::Forall),
            _ => panic!("expected a quantified goal"),
        }
    }

    #[test]
    fn command_lines_admit_multiple_assignments() {
        let src = r#"
            game "two"
            player 0 module "m" controls x, y
              init :: tt ~> x := tt; y := ff
              update :: x && !y ~> x := ff; y := x
            goal 0 : tt
        "#;
        let g = parse_game(src).unwrap();
        assert_eq!(g.module(0).init[0].assigns.len(), 2);
        assert_eq!(
            g.module(0).enabled_moves(Phase::Update, &valuation(["x"])),
            vec![valuation(["y"])]
        );
    }

    #[test]
    fn reports_positions() {
        let err = parse_game("game \"g\"\nplayer 0 module \"m\" controls p\n  init :: p &&\ngoal 0 : tt");
        match err {
            Err(GameError::Parse(e)) => {
                assert_eq!(e.line, 3);
                assert!(e.col > 10, "column {} should point into the guard", e.col);
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_structural_mistakes() {
        let no_goal = "game \"g\"\nplayer 0 module \"m\" controls p\n  free";
        assert!(matches!(parse_game(no_goal), Err(GameError::Parse(_))));

        let gap = "game \"g\"\nplayer 1 module \"m\" controls p\n  free\ngoal 1 : tt";
        assert!(matches!(parse_game(gap), Err(GameError::Parse(_))));

        let dup = "game \"g\"\nplayer 0 module \"m\" controls p\n free\nplayer 0 module \"n\" controls q\n free\ngoal 0 : tt";
        assert!(matches!(parse_game(dup), Err(GameError::Parse(_))));

        let mixed = "game \"g\"\nplayer 0 module \"m\" controls p\n  free\n  init :: tt ~> p := tt\ngoal 0 : tt";
        assert!(matches!(parse_game(mixed), Err(GameError::Parse(_))));
    }

    #[test]
    fn rejects_scope_violations() {
        // Assigning someone else's variable.
        let src = "game \"g\"\nplayer 0 module \"m\" controls p\n  init :: tt ~> q := tt\nplayer 1 module \"n\" controls q\n  free\ngoal 0 : tt\ngoal 1 : tt";
        assert!(matches!(
            parse_game(src),
            Err(GameError::AssignOutsideControls { player: 0, .. })
        ));
        // Guard over an undeclared variable.
        let src = "game \"g\"\nplayer 0 module \"m\" controls p\n  update :: z ~> p := tt\ngoal 0 : tt";
        assert!(matches!(parse_game(src), Err(GameError::UnknownVariable { .. })));
        // Goal over an undeclared variable.
        let src = "game \"g\"\nplayer 0 module \"m\" controls p\n  free\ngoal 0 : <true*> z";
        assert!(matches!(parse_game(src), Err(GameError::GoalVariable(0, _))));
    }

    #[test]
    fn guards_may_read_other_players_variables() {
        let src = "game \"g\"\nplayer 0 module \"m\" controls p\n  update :: q ~> p := q\nplayer 1 module \"n\" controls q\n  free\ngoal 0 : tt\ngoal 1 : tt";
        let g = parse_game(src).unwrap();
        assert_eq!(
            g.module(0).enabled_moves(Phase::Update, &valuation(["q"])),
            vec![valuation(["p"])]
        );
    }

    #[test]
    fn printed_games_parse_back() {
        let g = parse_game(TOGGLE).unwrap();
        let reparsed = parse_game(&g.to_string()).unwrap();
        assert_eq!(reparsed.name(), g.name());
        assert_eq!(reparsed.vars().names(), g.vars().names());
        for i in 0..g.player_count() {
            assert_eq!(reparsed.module(i), g.module(i));
            assert_eq!(reparsed.goal(i), g.goal(i));
        }
        // The environment's module is recognized as free and printed so.
        assert!(g.to_string().contains("  free\n"));
    }
}
