//! Abstract syntax for linear dynamic logic over finite traces.
//!
//! Formulas combine boolean connectives with the two path modalities
//! `<rho> phi` ("some match of `rho` ends where `phi` holds") and
//! `[rho] phi` ("every match of `rho` ends where `phi` holds"), where
//! `rho` is a regular path expression over propositional step constraints
//! and formula tests.

use std::fmt;

/// A purely propositional formula: the fragment allowed in path-expression
/// step constraints and in module guards and assignments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropFormula {
    True,
    False,
    Atom(String),
    Not(Box<PropFormula>),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        PropFormula::Atom(name.into())
    }

    pub fn not(p: PropFormula) -> Self {
        PropFormula::Not(Box::new(p))
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Box::new(a), Box::new(b))
    }

    /// Evaluates the formula against the set of variables that are true.
    pub fn holds(&self, val: &crate::ldlf::Valuation) -> bool {
        match self {
            PropFormula::True => true,
            PropFormula::False => false,
            PropFormula::Atom(x) => val.contains(x),
            PropFormula::Not(p) => !p.holds(val),
            PropFormula::And(a, b) => a.holds(val) && b.holds(val),
            PropFormula::Or(a, b) => a.holds(val) || b.holds(val),
        }
    }

    /// Collects every atom occurring in the formula.
    pub fn collect_atoms(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            PropFormula::True | PropFormula::False => {}
            PropFormula::Atom(x) => {
                out.insert(x.clone());
            }
            PropFormula::Not(p) => p.collect_atoms(out),
            PropFormula::And(a, b) | PropFormula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            PropFormula::True | PropFormula::False | PropFormula::Atom(_) => 1,
            PropFormula::Not(p) => 1 + p.size(),
            PropFormula::And(a, b) | PropFormula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// A regular path expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathExpr {
    /// A single step whose source valuation satisfies the propositional
    /// constraint: matches `(i, i+1)` whenever position `i` satisfies it.
    Prop(PropFormula),
    /// A test `{phi}?`: matches the empty step `(i, i)` at positions where
    /// the full formula `phi` holds.
    Test(Box<Formula>),
    /// Nondeterministic choice `rho1 + rho2`.
    Choice(Box<PathExpr>, Box<PathExpr>),
    /// Sequential composition `rho1 ; rho2`.
    Seq(Box<PathExpr>, Box<PathExpr>),
    /// Finite repetition `rho*` (zero or more copies).
    Star(Box<PathExpr>),
    /// Bounded repetition `rho^n` (exactly `n` copies; `rho^0` is `{tt}?`).
    Power(Box<PathExpr>, u32),
}

impl PathExpr {
    pub fn prop(p: PropFormula) -> Self {
        PathExpr::Prop(p)
    }

    pub fn test(f: Formula) -> Self {
        PathExpr::Test(Box::new(f))
    }

    pub fn choice(a: PathExpr, b: PathExpr) -> Self {
        PathExpr::Choice(Box::new(a), Box::new(b))
    }

    pub fn seq(a: PathExpr, b: PathExpr) -> Self {
        PathExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn star(a: PathExpr) -> Self {
        PathExpr::Star(Box::new(a))
    }

    /// `rho^0` matches only the empty step, so it normalizes to the
    /// always-true test — the same normalization the parser applies.
    pub fn power(a: PathExpr, n: u32) -> Self {
        if n == 0 {
            return PathExpr::test(Formula::True);
        }
        PathExpr::Power(Box::new(a), n)
    }

    pub fn collect_atoms(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            PathExpr::Prop(p) => p.collect_atoms(out),
            PathExpr::Test(f) => f.collect_atoms(out),
            PathExpr::Choice(a, b) | PathExpr::Seq(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            PathExpr::Star(a) | PathExpr::Power(a, _) => a.collect_atoms(out),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PathExpr::Prop(p) => p.size(),
            PathExpr::Test(f) => 1 + f.size(),
            PathExpr::Choice(a, b) | PathExpr::Seq(a, b) => 1 + a.size() + b.size(),
            PathExpr::Star(a) | PathExpr::Power(a, _) => 1 + a.size(),
        }
    }
}

/// A linear dynamic logic formula over finite traces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `<rho> phi`: some match of `rho` starting here ends, within the trace,
    /// at a position satisfying `phi`.
    Diamond(Box<PathExpr>, Box<Formula>),
    /// `[rho] phi`: every match of `rho` starting here that ends within the
    /// trace does so at a position satisfying `phi`.
    Box(Box<PathExpr>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn diamond(path: PathExpr, f: Formula) -> Self {
        Formula::Diamond(Box::new(path), Box::new(f))
    }

    pub fn boxed(path: PathExpr, f: Formula) -> Self {
        Formula::Box(Box::new(path), Box::new(f))
    }

    /// Conjunction of all formulas in the iterator (`tt` when empty).
    pub fn conj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    pub fn collect_atoms(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(x) => {
                out.insert(x.clone());
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Diamond(p, f) | Formula::Box(p, f) => {
                p.collect_atoms(out);
                f.collect_atoms(out);
            }
        }
    }

    /// All atoms of the formula, as a fresh set.
    pub fn atoms(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    /// Number of AST nodes, counting formula, path and propositional nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Diamond(p, f) | Formula::Box(p, f) => 1 + p.size() + f.size(),
        }
    }
}

/// The prefix quantifier of a quantified formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    /// `E phi`: some finite prefix of the infinite play satisfies `phi`.
    Exists,
    /// `A phi`: every finite prefix of the infinite play satisfies `phi`.
    Forall,
}

/// A formula with a single outermost prefix quantifier, interpreted over
/// infinite plays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QFormula {
    pub quantifier: Quantifier,
    pub body: Formula,
}

impl QFormula {
    pub fn exists(body: Formula) -> Self {
        QFormula { quantifier: Quantifier::Exists, body }
    }

    pub fn forall(body: Formula) -> Self {
        QFormula { quantifier: Quantifier::Forall, body }
    }

    /// The dual formula: `E phi` maps to `A !phi` and vice versa.
    pub fn dual(&self) -> QFormula {
        let body = Formula::not(self.body.clone());
        match self.quantifier {
            Quantifier::Exists => QFormula::forall(body),
            Quantifier::Forall => QFormula::exists(body),
        }
    }
}

/// A player goal: either a plain formula (interpreted existentially over
/// prefixes of the play) or an explicitly quantified one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Goal {
    Plain(Formula),
    Quantified(QFormula),
}

impl Goal {
    pub fn atoms(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        match self {
            Goal::Plain(f) => f.collect_atoms(&mut out),
            Goal::Quantified(q) => q.body.collect_atoms(&mut out),
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Pretty printing. The output round-trips through the parser.
// ---------------------------------------------------------------------------

fn fmt_prop(p: &PropFormula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        PropFormula::True => write!(f, "tt"),
        PropFormula::False => write!(f, "ff"),
        PropFormula::Atom(x) => write!(f, "{x}"),
        PropFormula::Not(a) => {
            write!(f, "!")?;
            fmt_prop(a, 2, f)
        }
        PropFormula::And(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            fmt_prop(a, 2, f)?;
            write!(f, " && ")?;
            fmt_prop(b, 2, f)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        PropFormula::Or(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            fmt_prop(a, 1, f)?;
            write!(f, " || ")?;
            fmt_prop(b, 1, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prop(self, 0, f)
    }
}

fn fmt_path(p: &PathExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        PathExpr::Prop(q) => {
            // A composite propositional constraint needs parentheses wherever
            // a tighter path operator (star, power, seq) would capture part
            // of it.
            let atomic = matches!(
                q,
                PropFormula::True | PropFormula::False | PropFormula::Atom(_) | PropFormula::Not(_)
            );
            if atomic || prec == 0 {
                fmt_prop(q, 0, f)
            } else {
                write!(f, "({q})")
            }
        }
        PathExpr::Test(t) => write!(f, "{{{t}}}?"),
        PathExpr::Choice(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            fmt_path(a, 1, f)?;
            write!(f, " + ")?;
            fmt_path(b, 1, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        PathExpr::Seq(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            fmt_path(a, 2, f)?;
            write!(f, " ; ")?;
            fmt_path(b, 2, f)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        PathExpr::Star(a) => {
            fmt_path(a, 3, f)?;
            write!(f, "*")
        }
        PathExpr::Power(a, n) => {
            fmt_path(a, 3, f)?;
            write!(f, "^{n}")
        }
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_path(self, 0, f)
    }
}

fn fmt_formula(p: &Formula, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match p {
        Formula::True => write!(f, "tt"),
        Formula::False => write!(f, "ff"),
        Formula::Atom(x) => write!(f, "{x}"),
        Formula::Not(a) => {
            write!(f, "!")?;
            fmt_formula(a, 2, f)
        }
        Formula::Diamond(path, a) => {
            write!(f, "<{path}> ")?;
            fmt_formula(a, 2, f)
        }
        Formula::Box(path, a) => {
            write!(f, "[{path}] ")?;
            fmt_formula(a, 2, f)
        }
        Formula::And(a, b) => {
            if prec > 1 {
                write!(f, "(")?;
            }
            fmt_formula(a, 2, f)?;
            write!(f, " && ")?;
            fmt_formula(b, 2, f)?;
            if prec > 1 {
                write!(f, ")")?;
            }
            Ok(())
        }
        Formula::Or(a, b) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            fmt_formula(a, 1, f)?;
            write!(f, " || ")?;
            fmt_formula(b, 1, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}

impl fmt::Display for QFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.quantifier {
            Quantifier::Exists => "E",
            Quantifier::Forall => "A",
        };
        write!(f, "{q} {}", self.body)
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Plain(x) => write!(f, "{x}"),
            Goal::Quantified(q) => write!(f, "{q}"),
        }
    }
}
