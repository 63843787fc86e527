//! Traces, lassos and variable sets.
//!
//! A trace is a finite word of valuations; a lasso is an ultimately periodic
//! infinite word given as a finite prefix followed by a repeated cycle.
//! Internally, automata and game code index valuations as bit masks over a
//! fixed, sorted [`VarSet`]; the public API speaks in terms of sets of
//! variable names.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::ParseError;

/// A valuation: the set of variables that are true.
pub type Valuation = BTreeSet<String>;

/// A finite trace.
pub type Trace = Vec<Valuation>;

/// Builds a valuation from string-like items.
pub fn valuation<I, S>(items: I) -> Valuation
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect()
}

/// An ultimately periodic infinite word: `prefix` followed by `cycle`
/// repeated forever. The cycle is always nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    prefix: Vec<Valuation>,
    cycle: Vec<Valuation>,
}

impl Lasso {
    /// Creates a lasso; the cycle must be nonempty.
    pub fn new(prefix: Vec<Valuation>, cycle: Vec<Valuation>) -> Result<Lasso, LassoError> {
        if cycle.is_empty() {
            return Err(LassoError::EmptyCycle);
        }
        Ok(Lasso { prefix, cycle })
    }

    pub fn prefix(&self) -> &[Valuation] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Valuation] {
        &self.cycle
    }

    /// The valuation at position `t` of the infinite word.
    pub fn at(&self, t: usize) -> &Valuation {
        if t < self.prefix.len() {
            &self.prefix[t]
        } else {
            &self.cycle[(t - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The finite prefix of length `n`.
    pub fn prefix_of(&self, n: usize) -> Trace {
        (0..n).map(|t| self.at(t).clone()).collect()
    }

    /// All variables mentioned anywhere in the word.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for v in self.prefix.iter().chain(self.cycle.iter()) {
            out.extend(v.iter().cloned());
        }
        out
    }
}

/// Error building a lasso.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LassoError {
    #[error("lasso cycle must be nonempty")]
    EmptyCycle,
}

impl fmt::Display for Lasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", format_trace(&self.prefix), format_trace(&self.cycle))
    }
}

/// Renders a trace in the literal syntax accepted by [`parse_trace`].
pub fn format_trace(trace: &[Valuation]) -> String {
    if trace.is_empty() {
        return String::new();
    }
    trace
        .iter()
        .map(format_valuation)
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Renders a valuation as a comma-separated variable list, `-` when empty.
pub fn format_valuation(val: &Valuation) -> String {
    if val.is_empty() {
        "-".to_string()
    } else {
        val.iter().cloned().collect::<Vec<_>>().join(",")
    }
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_valuation_at(part: &str, line: usize, col: usize) -> Result<Valuation, ParseError> {
    let trimmed = part.trim();
    if trimmed.is_empty() || trimmed == "-" {
        return Ok(Valuation::new());
    }
    let mut val = Valuation::new();
    for name in trimmed.split(',') {
        let name = name.trim();
        if !valid_ident(name) {
            return Err(ParseError::new(
                line,
                col,
                format!("invalid variable name `{name}` in valuation"),
            ));
        }
        val.insert(name.to_string());
    }
    Ok(val)
}

/// Parses a trace literal: valuations separated by `;`, each a
/// comma-separated list of variables (`-` for the empty valuation). The
/// empty string is the empty trace.
pub fn parse_trace(input: &str) -> Result<Trace, ParseError> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let mut trace = Vec::new();
    let mut col = 1;
    for part in trimmed.split(';') {
        trace.push(parse_valuation_at(part, 1, col)?);
        col += part.len() + 1;
    }
    Ok(trace)
}

/// Parses a lasso literal: `prefix | cycle`, both in trace syntax. The
/// prefix may be empty; the cycle must not be.
pub fn parse_lasso(input: &str) -> Result<Lasso, ParseError> {
    let Some(bar) = input.find('|') else {
        return Err(ParseError::new(
            1,
            1,
            "lasso literal must contain `|` separating prefix and cycle".to_string(),
        ));
    };
    if input[bar + 1..].contains('|') {
        return Err(ParseError::new(
            1,
            bar + 2,
            "lasso literal must contain exactly one `|`".to_string(),
        ));
    }
    let prefix = parse_trace(&input[..bar])?;
    let cycle = parse_trace(&input[bar + 1..])?;
    if cycle.is_empty() {
        return Err(ParseError::new(
            1,
            bar + 2,
            "lasso cycle must be nonempty".to_string(),
        ));
    }
    Ok(Lasso { prefix, cycle })
}

/// A fixed, sorted set of variable names over which valuations are encoded
/// as bit masks. Bit `i` of a mask corresponds to the `i`-th name in sorted
/// order. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSet {
    names: Arc<Vec<String>>,
}

/// Masks are `u32`, so a variable set is limited to 31 variables.
pub const MAX_VARS: usize = 31;

/// Error building or using a [`VarSet`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VarSetError {
    #[error("too many variables: {0} exceeds the supported maximum of {MAX_VARS}")]
    TooMany(usize),
    #[error("unknown variable `{0}`")]
    Unknown(String),
}

impl VarSet {
    /// Builds a variable set from the given names, sorting and deduplicating.
    pub fn new<I, S>(names: I) -> Result<VarSet, VarSetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if set.len() > MAX_VARS {
            return Err(VarSetError::TooMany(set.len()));
        }
        Ok(VarSet { names: Arc::new(set.into_iter().collect()) })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    /// The number of distinct valuations, `2^len`.
    pub fn symbol_count(&self) -> usize {
        1usize << self.names.len()
    }

    /// Encodes a valuation as a mask; every variable must be known.
    pub fn mask_of(&self, val: &Valuation) -> Result<u32, VarSetError> {
        let mut mask = 0u32;
        for name in val {
            match self.index_of(name) {
                Some(i) => mask |= 1 << i,
                None => return Err(VarSetError::Unknown(name.clone())),
            }
        }
        Ok(mask)
    }

    /// Decodes a mask back into a valuation.
    pub fn valuation_of(&self, mask: u32) -> Valuation {
        self.names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, n)| n.clone())
            .collect()
    }

    /// The union of two variable sets.
    pub fn union(&self, other: &VarSet) -> Result<VarSet, VarSetError> {
        VarSet::new(self.names.iter().chain(other.names.iter()).cloned())
    }

    /// The sub-mask selecting the named variables, e.g. a player's
    /// controlled block within the full alphabet.
    pub fn block_mask(&self, names: &BTreeSet<String>) -> Result<u32, VarSetError> {
        let mut mask = 0u32;
        for name in names {
            match self.index_of(name) {
                Some(i) => mask |= 1 << i,
                None => return Err(VarSetError::Unknown(name.clone())),
            }
        }
        Ok(mask)
    }

    /// Renders a mask in valuation-literal syntax (`-` when empty).
    pub fn format_mask(&self, mask: u32) -> String {
        format_valuation(&self.valuation_of(mask))
    }

    /// Encodes a whole trace as masks.
    pub fn masks_of(&self, trace: &[Valuation]) -> Result<Vec<u32>, VarSetError> {
        trace.iter().map(|v| self.mask_of(v)).collect()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_round_trip() {
        let vars = VarSet::new(["q", "p", "q"]).unwrap();
        assert_eq!(vars.names(), &["p".to_string(), "q".to_string()]);
        for mask in 0..vars.symbol_count() as u32 {
            assert_eq!(vars.mask_of(&vars.valuation_of(mask)).unwrap(), mask);
        }
    }

    #[test]
    fn trace_literals() {
        let t = parse_trace("p , q ; - ; q").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], valuation(["p", "q"]));
        assert_eq!(t[1], Valuation::new());
        assert_eq!(t[2], valuation(["q"]));
        assert_eq!(parse_trace("").unwrap(), Vec::<Valuation>::new());
        assert_eq!(format_trace(&t), "p,q ; - ; q");
        assert_eq!(parse_trace(&format_trace(&t)).unwrap(), t);
    }

    #[test]
    fn lasso_literals() {
        let l = parse_lasso("p | - ; p,q").unwrap();
        assert_eq!(l.prefix().len(), 1);
        assert_eq!(l.cycle().len(), 2);
        assert_eq!(l.at(0), &valuation(["p"]));
        assert_eq!(l.at(1), &Valuation::new());
        assert_eq!(l.at(2), &valuation(["p", "q"]));
        assert_eq!(l.at(3), &Valuation::new());
        let empty_prefix = parse_lasso(" | p").unwrap();
        assert_eq!(empty_prefix.prefix().len(), 0);
        assert!(parse_lasso("p | ").is_err());
        assert!(parse_lasso("p ; q").is_err());
    }
}
