//! Hand-written lexer and recursive-descent parser for formulas.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! goal     := ("E" | "A") formula | formula
//! formula  := conj ("||" conj)*
//! conj     := unary ("&&" unary)*
//! unary    := "!" unary | "<" path ">" unary | "[" path "]" unary | atom
//! atom     := "tt" | "ff" | "true" | "false" | IDENT | "(" formula ")"
//! path     := seq ("+" seq)*
//! seq      := starred (";" starred)*
//! starred  := base ("*" | "^" NAT)*
//! base     := "{" formula "}" "?" | "(" path ")" | prop
//! prop     := pconj ("||" pconj)*
//! pconj    := punary ("&&" punary)*
//! punary   := "!" punary | "tt" | "ff" | "true" | "false" | IDENT
//!           | "(" prop ")"
//! ```
//!
//! In path position an opening parenthesis starts a path group. When the
//! group turns out to hold a plain propositional constraint, a following
//! `&&` or `||` continues it as one — `(p && q) || r` is a single step, not
//! a path choice — so parenthesised propositional formulas read naturally.
//! A leading `E` or `A` is read as a quantifier only when a formula follows;
//! on its own it is an ordinary atom.

use super::ast::{Formula, Goal, PathExpr, PropFormula, QFormula, Quantifier};
use super::ParseError;

/// Largest exponent accepted in a bounded repetition `rho^n`.
const MAX_POWER: u32 = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Nat(u32),
    Bang,
    AndAnd,
    OrOr,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Question,
    Plus,
    Semi,
    Star,
    Caret,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::True => "`tt`".to_string(),
            Tok::False => "`ff`".to_string(),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Bang => "`!`".to_string(),
            Tok::AndAnd => "`&&`".to_string(),
            Tok::OrOr => "`||`".to_string(),
            Tok::LAngle => "`<`".to_string(),
            Tok::RAngle => "`>`".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::Question => "`?`".to_string(),
            Tok::Plus => "`+`".to_string(),
            Tok::Semi => "`;`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Caret => "`^`".to_string(),
        }
    }
}

struct Lexer {
    pos: usize,
    line: usize,
    col: usize,
}

type Lexed = (Vec<(Tok, usize, usize)>, (usize, usize));

fn lex(src: &str, line0: usize, col0: usize) -> Result<Lexed, ParseError> {
    let mut lx = Lexer { pos: 0, line: line0, col: col0 };
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    while lx.pos < bytes.len() {
        let c = bytes[lx.pos] as char;
        let (line, col) = (lx.line, lx.col);
        match c {
            ' ' | '\t' | '\r' => {
                lx.pos += 1;
                lx.col += 1;
            }
            '\n' => {
                lx.pos += 1;
                lx.line += 1;
                lx.col = 1;
            }
            '!' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::Bang, line, col));
            }
            '&' | '|' => {
                if lx.pos + 1 < bytes.len() && bytes[lx.pos + 1] as char == c {
                    lx.pos += 2;
                    lx.col += 2;
                    toks.push((if c == '&' { Tok::AndAnd } else { Tok::OrOr }, line, col));
                } else {
                    return Err(ParseError::new(
                        line,
                        col,
                        format!("expected `{c}{c}`, found single `{c}`"),
                    ));
                }
            }
            '<' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::LAngle, line, col));
            }
            '>' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::RAngle, line, col));
            }
            '[' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::LBracket, line, col));
            }
            ']' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::RBracket, line, col));
            }
            '(' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::LParen, line, col));
            }
            ')' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::RParen, line, col));
            }
            '{' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::LBrace, line, col));
            }
            '}' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::RBrace, line, col));
            }
            '?' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::Question, line, col));
            }
            '+' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::Plus, line, col));
            }
            ';' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::Semi, line, col));
            }
            '*' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::Star, line, col));
            }
            '^' => {
                lx.pos += 1;
                lx.col += 1;
                toks.push((Tok::Caret, line, col));
            }
            c if c.is_ascii_digit() => {
                let start = lx.pos;
                while lx.pos < bytes.len() && (bytes[lx.pos] as char).is_ascii_digit() {
                    lx.pos += 1;
                    lx.col += 1;
                }
                let text = &src[start..lx.pos];
                let n: u32 = text.parse().map_err(|_| {
                    ParseError::new(line, col, format!("number `{text}` out of range"))
                })?;
                toks.push((Tok::Nat(n), line, col));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = lx.pos;
                while lx.pos < bytes.len()
                    && ((bytes[lx.pos] as char).is_ascii_alphanumeric()
                        || bytes[lx.pos] as char == '_')
                {
                    lx.pos += 1;
                    lx.col += 1;
                }
                let text = &src[start..lx.pos];
                let tok = match text {
                    "tt" | "true" => Tok::True,
                    "ff" | "false" => Tok::False,
                    _ => Tok::Ident(text.to_string()),
                };
                toks.push((tok, line, col));
            }
            other => {
                return Err(ParseError::new(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    Ok((toks, (lx.line, lx.col)))
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    ix: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.ix).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.ix).map(|&(_, l, c)| (l, c)).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.ix).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.ix += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, msg.into())
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.ix += 1;
                Ok(())
            }
            Some(t) => Err(self.err(format!("expected {}, found {}", want.describe(), t.describe()))),
            None => Err(self.err(format!("expected {}, found end of input", want.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.peek() == Some(&Tok::OrOr) {
            self.ix += 1;
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.peek() == Some(&Tok::AndAnd) {
            self.ix += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.ix += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LAngle) => {
                self.ix += 1;
                let p = self.path()?;
                self.expect(Tok::RAngle)?;
                Ok(Formula::diamond(p, self.unary()?))
            }
            Some(Tok::LBracket) => {
                self.ix += 1;
                let p = self.path()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::boxed(p, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Some(Tok::True) => Ok(Formula::True),
            Some(Tok::False) => Ok(Formula::False),
            Some(Tok::Ident(x)) => Ok(Formula::Atom(x)),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(t) => {
                self.ix -= 1;
                Err(self.err(format!("expected a formula, found {}", t.describe())))
            }
            None => Err(self.err("expected a formula, found end of input")),
        }
    }

    fn path(&mut self) -> Result<PathExpr, ParseError> {
        let mut p = self.path_seq()?;
        while self.peek() == Some(&Tok::Plus) {
            self.ix += 1;
            p = PathExpr::choice(p, self.path_seq()?);
        }
        Ok(p)
    }

    fn path_seq(&mut self) -> Result<PathExpr, ParseError> {
        let mut p = self.path_starred()?;
        while self.peek() == Some(&Tok::Semi) {
            self.ix += 1;
            p = PathExpr::seq(p, self.path_starred()?);
        }
        Ok(p)
    }

    fn path_starred(&mut self) -> Result<PathExpr, ParseError> {
        let mut p = self.path_base()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.ix += 1;
                    p = PathExpr::star(p);
                }
                Some(Tok::Caret) => {
                    self.ix += 1;
                    match self.bump() {
                        Some(Tok::Nat(n)) if n <= MAX_POWER => {
                            // `rho^0` matches only the empty step, which is
                            // exactly the always-true test.
                            p = if n == 0 {
                                PathExpr::test(Formula::True)
                            } else {
                                PathExpr::power(p, n)
                            };
                        }
                        Some(Tok::Nat(n)) => {
                            self.ix -= 1;
                            return Err(self.err(format!(
                                "repetition bound {n} exceeds the maximum of {MAX_POWER}"
                            )));
                        }
                        Some(t) => {
                            self.ix -= 1;
                            return Err(
                                self.err(format!("expected a number after `^`, found {}", t.describe()))
                            );
                        }
                        None => return Err(self.err("expected a number after `^`, found end of input")),
                    }
                }
                _ => return Ok(p),
            }
        }
    }

    fn path_base(&mut self) -> Result<PathExpr, ParseError> {
        match self.peek() {
            Some(Tok::LBrace) => {
                self.ix += 1;
                let f = self.formula()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::Question)?;
                Ok(PathExpr::test(f))
            }
            Some(Tok::LParen) => {
                self.ix += 1;
                let p = self.path()?;
                self.expect(Tok::RParen)?;
                // A group that wrapped a plain propositional constraint may
                // continue as one: `(p && q) || r` is a single step whose
                // source satisfies the disjunction, not a path choice.
                if let PathExpr::Prop(first) = p {
                    return Ok(PathExpr::Prop(self.prop_rest(first)?));
                }
                Ok(p)
            }
            _ => Ok(PathExpr::Prop(self.prop()?)),
        }
    }

    /// Continues a propositional expression whose first operand has already
    /// been read, honouring the precedence of `&&` over `||`.
    fn prop_rest(&mut self, first: PropFormula) -> Result<PropFormula, ParseError> {
        let mut f = first;
        while self.peek() == Some(&Tok::AndAnd) {
            self.ix += 1;
            f = PropFormula::and(f, self.prop_unary()?);
        }
        while self.peek() == Some(&Tok::OrOr) {
            self.ix += 1;
            f = PropFormula::or(f, self.prop_conj()?);
        }
        Ok(f)
    }

    fn prop(&mut self) -> Result<PropFormula, ParseError> {
        let mut f = self.prop_conj()?;
        while self.peek() == Some(&Tok::OrOr) {
            self.ix += 1;
            f = PropFormula::or(f, self.prop_conj()?);
        }
        Ok(f)
    }

    fn prop_conj(&mut self) -> Result<PropFormula, ParseError> {
        let mut f = self.prop_unary()?;
        while self.peek() == Some(&Tok::AndAnd) {
            self.ix += 1;
            f = PropFormula::and(f, self.prop_unary()?);
        }
        Ok(f)
    }

    fn prop_unary(&mut self) -> Result<PropFormula, ParseError> {
        match self.bump() {
            Some(Tok::Bang) => Ok(PropFormula::not(self.prop_unary()?)),
            Some(Tok::True) => Ok(PropFormula::True),
            Some(Tok::False) => Ok(PropFormula::False),
            Some(Tok::Ident(x)) => Ok(PropFormula::Atom(x)),
            Some(Tok::LParen) => {
                let f = self.prop()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(t) => {
                self.ix -= 1;
                Err(self.err(format!(
                    "expected a propositional formula, found {}",
                    t.describe()
                )))
            }
            None => Err(self.err("expected a propositional formula, found end of input")),
        }
    }

    fn finish<T>(mut self, value: T) -> Result<T, ParseError> {
        match self.bump() {
            None => Ok(value),
            Some(t) => {
                self.ix -= 1;
                Err(self.err(format!("unexpected {} after the formula", t.describe())))
            }
        }
    }
}

fn parser_for(src: &str, line0: usize, col0: usize) -> Result<Parser, ParseError> {
    let (toks, end) = lex(src, line0, col0)?;
    Ok(Parser { toks, ix: 0, end })
}

/// Parses a formula, reporting positions relative to `(line0, col0)`.
/// Used by the game and strategy parsers to embed formulas in larger files.
pub(crate) fn parse_formula_at(src: &str, line0: usize, col0: usize) -> Result<Formula, ParseError> {
    let mut p = parser_for(src, line0, col0)?;
    let f = p.formula()?;
    p.finish(f)
}

/// Parses a formula.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    parse_formula_at(src, 1, 1)
}

/// Parses a propositional formula, reporting positions relative to
/// `(line0, col0)`.
pub(crate) fn parse_prop_at(src: &str, line0: usize, col0: usize) -> Result<PropFormula, ParseError> {
    let mut p = parser_for(src, line0, col0)?;
    let f = p.prop()?;
    p.finish(f)
}

/// Parses a propositional formula.
pub fn parse_prop(src: &str) -> Result<PropFormula, ParseError> {
    parse_prop_at(src, 1, 1)
}

/// Parses a goal: an optional leading `E` or `A` quantifier followed by a
/// formula. A lone `E` or `A` with nothing after it is an ordinary atom.
pub(crate) fn parse_goal_at(src: &str, line0: usize, col0: usize) -> Result<Goal, ParseError> {
    let (toks, end) = lex(src, line0, col0)?;
    if toks.len() > 1 {
        if let Tok::Ident(head) = &toks[0].0 {
            if head == "E" || head == "A" {
                let quantifier =
                    if head == "E" { Quantifier::Exists } else { Quantifier::Forall };
                let mut p = Parser { toks: toks[1..].to_vec(), ix: 0, end };
                // Only commit to the quantifier reading if the rest parses;
                // otherwise fall back to a plain formula (e.g. `E && p`).
                if let Ok(body) = p.formula().and_then(|f| p.finish(f)) {
                    return Ok(Goal::Quantified(QFormula { quantifier, body }));
                }
            }
        }
    }
    let mut p = Parser { toks, ix: 0, end };
    let f = p.formula()?;
    p.finish(f).map(Goal::Plain)
}

/// Parses a goal (see [`parse_goal_at`]).
pub fn parse_goal(src: &str) -> Result<Goal, ParseError> {
    parse_goal_at(src, 1, 1)
}

/// Parses a quantified formula: `E phi` or `A phi`, quantifier required.
pub fn parse_qformula(src: &str) -> Result<QFormula, ParseError> {
    match parse_goal(src)? {
        Goal::Quantified(q) => Ok(q),
        Goal::Plain(_) => Err(ParseError::new(
            1,
            1,
            "expected a leading `E` or `A` quantifier".to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(src: &str) -> Formula {
        let f = parse_formula(src).unwrap();
        let printed = f.to_string();
        let again = parse_formula(&printed)
            .unwrap_or_else(|e| panic!("printed form `{printed}` failed to parse: {e}"));
        assert_eq!(f, again, "round trip changed `{src}` via `{printed}`");
        f
    }

    #[test]
    fn parses_basic_formulas() {
        assert_eq!(roundtrip("tt"), Formula::True);
        assert_eq!(roundtrip("false"), Formula::False);
        assert_eq!(
            roundtrip("p && q || !r"),
            Formula::or(
                Formula::and(Formula::atom("p"), Formula::atom("q")),
                Formula::not(Formula::atom("r"))
            )
        );
    }

    #[test]
    fn parses_modalities() {
        let f = roundtrip("<true*> p");
        assert_eq!(
            f,
            Formula::diamond(PathExpr::star(PathExpr::Prop(PropFormula::True)), Formula::atom("p"))
        );
        let g = roundtrip("[p ; q*] <{p && q}?> tt");
        assert_eq!(
            g,
            Formula::boxed(
                PathExpr::seq(
                    PathExpr::Prop(PropFormula::atom("p")),
                    PathExpr::star(PathExpr::Prop(PropFormula::atom("q")))
                ),
                Formula::diamond(
                    PathExpr::test(Formula::and(Formula::atom("p"), Formula::atom("q"))),
                    Formula::True
                )
            )
        );
    }

    #[test]
    fn path_grouping_and_power() {
        let f = roundtrip("<(p + q)^3 ; r> tt");
        assert_eq!(
            f,
            Formula::diamond(
                PathExpr::seq(
                    PathExpr::power(
                        PathExpr::choice(
                            PathExpr::Prop(PropFormula::atom("p")),
                            PathExpr::Prop(PropFormula::atom("q"))
                        ),
                        3
                    ),
                    PathExpr::Prop(PropFormula::atom("r"))
                ),
                Formula::True
            )
        );
        // rho^0 collapses to the always-true test.
        assert_eq!(
            parse_formula("<p^0> q").unwrap(),
            Formula::diamond(PathExpr::test(Formula::True), Formula::atom("q"))
        );
        // A parenthesised propositional constraint is one step, not a group
        // of steps, when it contains no path operators.
        assert_eq!(
            parse_formula("<(p || q)> r").unwrap(),
            Formula::diamond(
                PathExpr::Prop(PropFormula::or(PropFormula::atom("p"), PropFormula::atom("q"))),
                Formula::atom("r")
            )
        );
    }

    #[test]
    fn quantified_goals() {
        match parse_goal("E <true*> p").unwrap() {
            Goal::Quantified(q) => {
                assert_eq!(q.quantifier, Quantifier::Exists);
                assert_eq!(q.body, parse_formula("<true*> p").unwrap());
            }
            other => panic!("expected quantified goal, got {other:?}"),
        }
        match parse_goal("A !p").unwrap() {
            Goal::Quantified(q) => assert_eq!(q.quantifier, Quantifier::Forall),
            other => panic!("expected quantified goal, got {other:?}"),
        }
        // A lone `E` is an atom, and so is an `E` that cannot head a
        // quantified formula.
        assert_eq!(parse_goal("E").unwrap(), Goal::Plain(Formula::atom("E")));
        assert_eq!(
            parse_goal("E && p").unwrap(),
            Goal::Plain(Formula::and(Formula::atom("E"), Formula::atom("p")))
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_formula("p &&").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 5);
        let err = parse_formula("p &\nq").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 3);
        let err = parse_formula("<p q").unwrap_err();
        assert!(err.to_string().contains("expected `>`"), "{err}");
    }
}
