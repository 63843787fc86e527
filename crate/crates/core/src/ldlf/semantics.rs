//! Direct evaluation of formulas on finite traces and on lassos.
//!
//! [`TraceEvaluator`] lowers a formula into flat arrays of formula and path
//! nodes (hash-consed, children before parents) and evaluates by dynamic
//! programming: for a trace of length `T` it fills, for every formula node,
//! a truth value at each position `0..=T`, and for every path node, the
//! relation of match pairs `(i, j)` with `0 <= i <= j <= T` as per-row bit
//! sets.
//!
//! Position `T` — one past the end — represents the empty remainder of the
//! trace: atoms are false there, every diamond is false and every box is
//! true. Running the same recurrences at position `T` produces exactly those
//! values, so the evaluator treats it as an ordinary position; only atoms
//! need a guard. On the empty trace (`T = 0`) position `0` is already the
//! past-the-end position, which yields the empty-trace semantics.
//!
//! Match pairs of a path are clipped to `j <= T`, but a diamond or box at
//! `i` only considers matches ending at `j <= T - 1`: a step taken by the
//! path must land on a real position of the trace. Tests `{phi}?` may hold
//! at `T` (with the empty-trace value of `phi`), which makes `rho*` and
//! `rho^0` behave uniformly there.

use std::collections::{BTreeSet, HashMap};

use super::ast::{Formula, Goal, PathExpr, PropFormula, QFormula, Quantifier};
use super::trace::{Lasso, Valuation, VarSet, VarSetError};

/// Error evaluating a formula at a trace position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("position {index} is out of range for a trace of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Lowered propositional node, indexing into [`TraceEvaluator::props`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PropNode {
    True,
    False,
    /// Bit position within the variable set.
    Atom(u8),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
}

/// Lowered formula node; operands index [`TraceEvaluator::fnodes`], paths
/// index [`TraceEvaluator::pnodes`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum FNode {
    True,
    False,
    Atom(u8),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Diamond(u32, u32),
    Box(u32, u32),
}

/// Lowered path node; operands index [`TraceEvaluator::pnodes`], tests and
/// prop constraints index the other arrays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PNode {
    Prop(u32),
    Test(u32),
    Choice(u32, u32),
    Seq(u32, u32),
    Star(u32),
    Power(u32, u32),
}

/// A formula lowered for repeated evaluation over traces that share a
/// variable set.
pub struct TraceEvaluator {
    vars: VarSet,
    props: Vec<PropNode>,
    fnodes: Vec<FNode>,
    pnodes: Vec<PNode>,
    root: u32,
}

/// Reusable buffers for [`TraceEvaluator::eval_with`]; create once and pass
/// to every call to avoid per-trace allocation.
#[derive(Default)]
pub struct EvalScratch {
    /// Formula truth values, `fvals[f * positions + i]`.
    fvals: Vec<bool>,
    /// Path relations, row-major bit rows: for path `p` and row `i`, words
    /// `prows[(p * positions + i) * row_words ..][..row_words]`.
    prows: Vec<u64>,
    /// Per-position propositional truth, `pvals[q * positions + i]`.
    pvals: Vec<bool>,
    /// Scratch row for closures and compositions.
    row: Vec<u64>,
}

struct Lowerer<'a> {
    vars: &'a VarSet,
    props: Vec<PropNode>,
    fnodes: Vec<FNode>,
    pnodes: Vec<PNode>,
    prop_map: HashMap<PropNode, u32>,
    fmap: HashMap<FNode, u32>,
    pmap: HashMap<PNode, u32>,
}

impl<'a> Lowerer<'a> {
    fn intern_prop(&mut self, node: PropNode) -> u32 {
        if let Some(&id) = self.prop_map.get(&node) {
            return id;
        }
        let id = self.props.len() as u32;
        self.props.push(node.clone());
        self.prop_map.insert(node, id);
        id
    }

    fn intern_f(&mut self, node: FNode) -> u32 {
        if let Some(&id) = self.fmap.get(&node) {
            return id;
        }
        let id = self.fnodes.len() as u32;
        self.fnodes.push(node.clone());
        self.fmap.insert(node, id);
        id
    }

    fn intern_p(&mut self, node: PNode) -> u32 {
        if let Some(&id) = self.pmap.get(&node) {
            return id;
        }
        let id = self.pnodes.len() as u32;
        self.pnodes.push(node.clone());
        self.pmap.insert(node, id);
        id
    }

    fn bit_of(&self, name: &str) -> Result<u8, VarSetError> {
        self.vars
            .index_of(name)
            .map(|i| i as u8)
            .ok_or_else(|| VarSetError::Unknown(name.to_string()))
    }

    fn lower_prop(&mut self, p: &PropFormula) -> Result<u32, VarSetError> {
        let node = match p {
            PropFormula::True => PropNode::True,
            PropFormula::False => PropNode::False,
            PropFormula::Atom(x) => PropNode::Atom(self.bit_of(x)?),
            PropFormula::Not(a) => PropNode::Not(self.lower_prop(a)?),
            PropFormula::And(a, b) => {
                let (a, b) = (self.lower_prop(a)?, self.lower_prop(b)?);
                PropNode::And(a, b)
            }
            PropFormula::Or(a, b) => {
                let (a, b) = (self.lower_prop(a)?, self.lower_prop(b)?);
                PropNode::Or(a, b)
            }
        };
        Ok(self.intern_prop(node))
    }

    fn lower_formula(&mut self, f: &Formula) -> Result<u32, VarSetError> {
        let node = match f {
            Formula::True => FNode::True,
            Formula::False => FNode::False,
            Formula::Atom(x) => FNode::Atom(self.bit_of(x)?),
            Formula::Not(a) => FNode::Not(self.lower_formula(a)?),
            Formula::And(a, b) => {
                let (a, b) = (self.lower_formula(a)?, self.lower_formula(b)?);
                FNode::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.lower_formula(a)?, self.lower_formula(b)?);
                FNode::Or(a, b)
            }
            Formula::Diamond(p, a) => {
                let (p, a) = (self.lower_path(p)?, self.lower_formula(a)?);
                FNode::Diamond(p, a)
            }
            Formula::Box(p, a) => {
                let (p, a) = (self.lower_path(p)?, self.lower_formula(a)?);
                FNode::Box(p, a)
            }
        };
        Ok(self.intern_f(node))
    }

    fn lower_path(&mut self, p: &PathExpr) -> Result<u32, VarSetError> {
        let node = match p {
            PathExpr::Prop(q) => PNode::Prop(self.lower_prop(q)?),
            PathExpr::Test(f) => PNode::Test(self.lower_formula(f)?),
            PathExpr::Choice(a, b) => {
                let (a, b) = (self.lower_path(a)?, self.lower_path(b)?);
                PNode::Choice(a, b)
            }
            PathExpr::Seq(a, b) => {
                let (a, b) = (self.lower_path(a)?, self.lower_path(b)?);
                PNode::Seq(a, b)
            }
            PathExpr::Star(a) => PNode::Star(self.lower_path(a)?),
            PathExpr::Power(a, n) => {
                let a = self.lower_path(a)?;
                if *n == 0 {
                    // Zero repetitions match only the empty step.
                    PNode::Test(self.intern_f(FNode::True))
                } else {
                    PNode::Power(a, *n)
                }
            }
        };
        Ok(self.intern_p(node))
    }
}

impl TraceEvaluator {
    /// Lowers `formula` against `vars`, which must contain every atom.
    pub fn new(formula: &Formula, vars: &VarSet) -> Result<TraceEvaluator, VarSetError> {
        let mut lw = Lowerer {
            vars,
            props: Vec::new(),
            fnodes: Vec::new(),
            pnodes: Vec::new(),
            prop_map: HashMap::new(),
            fmap: HashMap::new(),
            pmap: HashMap::new(),
        };
        let root = lw.lower_formula(formula)?;
        Ok(TraceEvaluator {
            vars: vars.clone(),
            props: lw.props,
            fnodes: lw.fnodes,
            pnodes: lw.pnodes,
            root,
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Evaluates at position 0 of a trace given as masks over `self.vars`.
    pub fn eval_masks(&self, scratch: &mut EvalScratch, trace: &[u32]) -> bool {
        self.run(scratch, trace);
        let positions = trace.len() + 1;
        scratch.fvals[self.root as usize * positions]
    }

    /// Evaluates at position `i`; for a nonempty trace `i` must be a real
    /// position, for the empty trace only `i = 0` is allowed.
    pub fn eval_masks_at(
        &self,
        scratch: &mut EvalScratch,
        trace: &[u32],
        i: usize,
    ) -> Result<bool, EvalError> {
        if i > 0 && i >= trace.len() {
            return Err(EvalError::IndexOutOfRange { index: i, len: trace.len() });
        }
        self.run(scratch, trace);
        let positions = trace.len() + 1;
        Ok(scratch.fvals[self.root as usize * positions + i])
    }

    /// Fills the dynamic-programming tables for `trace`.
    fn run(&self, scratch: &mut EvalScratch, trace: &[u32]) {
        let t_len = trace.len();
        let positions = t_len + 1; // 0..=T, with T past the end
        let row_words = positions.div_ceil(64);

        scratch.fvals.clear();
        scratch.fvals.resize(self.fnodes.len() * positions, false);
        scratch.pvals.clear();
        scratch.pvals.resize(self.props.len() * positions, false);
        scratch.prows.clear();
        scratch.prows.resize(self.pnodes.len() * positions * row_words, 0);

        // Propositional truth per real position; false at the past-the-end
        // position (its value is never read by the path rules below).
        for (q, node) in self.props.iter().enumerate() {
            let base = q * positions;
            match node {
                PropNode::True => {
                    for i in 0..t_len {
                        scratch.pvals[base + i] = true;
                    }
                }
                PropNode::False => {}
                PropNode::Atom(bit) => {
                    for (i, &mask) in trace.iter().enumerate() {
                        scratch.pvals[base + i] = mask & (1 << bit) != 0;
                    }
                }
                PropNode::Not(a) => {
                    let a = *a as usize * positions;
                    for i in 0..t_len {
                        scratch.pvals[base + i] = !scratch.pvals[a + i];
                    }
                }
                PropNode::And(a, b) => {
                    let a = *a as usize * positions;
                    let b = *b as usize * positions;
                    for i in 0..t_len {
                        scratch.pvals[base + i] = scratch.pvals[a + i] && scratch.pvals[b + i];
                    }
                }
                PropNode::Or(a, b) => {
                    let a = *a as usize * positions;
                    let b = *b as usize * positions;
                    for i in 0..t_len {
                        scratch.pvals[base + i] = scratch.pvals[a + i] || scratch.pvals[b + i];
                    }
                }
            }
        }

        // Formula and path nodes are interleaved in dependency order: both
        // arrays were built children-first, and cross-references (tests,
        // modal targets) always point at earlier-created nodes of the other
        // array. Process paths before formulas at each round: a path id
        // referenced by a formula node is always smaller than the number of
        // path nodes created when that formula node was created, so a single
        // pass over paths first, then formulas, respects every dependency
        // except formula-to-formula and path-to-formula references, which are
        // handled by index order. Concretely: evaluate nodes of both kinds in
        // the global creation order.
        //
        // Creation order is reconstructed by walking both arrays with two
        // cursors and always advancing the one whose next node only depends
        // on already-processed nodes. Since interning pushed children before
        // parents globally, advancing greedily never blocks.
        let mut next_f = 0usize;
        let mut next_p = 0usize;
        while next_f < self.fnodes.len() || next_p < self.pnodes.len() {
            let f_ready = next_f < self.fnodes.len()
                && match &self.fnodes[next_f] {
                    FNode::Diamond(p, _) | FNode::Box(p, _) => (*p as usize) < next_p,
                    _ => true,
                };
            if f_ready {
                self.eval_fnode(scratch, trace, next_f, positions, row_words);
                next_f += 1;
                continue;
            }
            let p_ready = next_p < self.pnodes.len()
                && match &self.pnodes[next_p] {
                    PNode::Test(f) => (*f as usize) < next_f,
                    _ => true,
                };
            if p_ready {
                self.eval_pnode(scratch, next_p, positions, row_words, t_len);
                next_p += 1;
                continue;
            }
            unreachable!("lowered node arrays are not in dependency order");
        }
    }

    fn eval_fnode(
        &self,
        scratch: &mut EvalScratch,
        trace: &[u32],
        f: usize,
        positions: usize,
        row_words: usize,
    ) {
        let t_len = trace.len();
        let base = f * positions;
        match &self.fnodes[f] {
            FNode::True => {
                for i in 0..positions {
                    scratch.fvals[base + i] = true;
                }
            }
            FNode::False => {}
            FNode::Atom(bit) => {
                // False at the past-the-end position.
                for (i, &mask) in trace.iter().enumerate() {
                    scratch.fvals[base + i] = mask & (1 << bit) != 0;
                }
            }
            FNode::Not(a) => {
                let a = *a as usize * positions;
                for i in 0..positions {
                    scratch.fvals[base + i] = !scratch.fvals[a + i];
                }
            }
            FNode::And(a, b) => {
                let a = *a as usize * positions;
                let b = *b as usize * positions;
                for i in 0..positions {
                    scratch.fvals[base + i] = scratch.fvals[a + i] && scratch.fvals[b + i];
                }
            }
            FNode::Or(a, b) => {
                let a = *a as usize * positions;
                let b = *b as usize * positions;
                for i in 0..positions {
                    scratch.fvals[base + i] = scratch.fvals[a + i] || scratch.fvals[b + i];
                }
            }
            FNode::Diamond(p, a) => {
                // Some match (i, j) with j a real position and `a` true at j.
                // At i = T the row has no such j, so the diamond is false
                // there, as the empty-trace semantics requires.
                let a = *a as usize * positions;
                for i in 0..positions {
                    let row = &scratch.prows
                        [((*p as usize) * positions + i) * row_words..][..row_words];
                    scratch.fvals[base + i] =
                        row_any(row, t_len, |j| scratch.fvals[a + j]);
                }
            }
            FNode::Box(p, a) => {
                let a = *a as usize * positions;
                for i in 0..positions {
                    let row = &scratch.prows
                        [((*p as usize) * positions + i) * row_words..][..row_words];
                    scratch.fvals[base + i] =
                        !row_any(row, t_len, |j| !scratch.fvals[a + j]);
                }
            }
        }
    }

    fn eval_pnode(
        &self,
        scratch: &mut EvalScratch,
        p: usize,
        positions: usize,
        row_words: usize,
        t_len: usize,
    ) {
        let base_words = p * positions * row_words;
        match &self.pnodes[p] {
            PNode::Prop(q) => {
                // (i, i+1) whenever position i (a real one) satisfies q.
                let qb = *q as usize * positions;
                for i in 0..t_len {
                    if scratch.pvals[qb + i] {
                        set_bit(
                            &mut scratch.prows[base_words + i * row_words..][..row_words],
                            i + 1,
                        );
                    }
                }
            }
            PNode::Test(f) => {
                // (i, i) wherever the test formula holds, including at T.
                let fb = *f as usize * positions;
                for i in 0..positions {
                    if scratch.fvals[fb + i] {
                        set_bit(
                            &mut scratch.prows[base_words + i * row_words..][..row_words],
                            i,
                        );
                    }
                }
            }
            PNode::Choice(a, b) => {
                let aw = *a as usize * positions * row_words;
                let bw = *b as usize * positions * row_words;
                for w in 0..positions * row_words {
                    scratch.prows[base_words + w] = scratch.prows[aw + w] | scratch.prows[bw + w];
                }
            }
            PNode::Seq(a, b) => {
                let aw = *a as usize * positions * row_words;
                let bw = *b as usize * positions * row_words;
                for i in 0..positions {
                    scratch.row.clear();
                    scratch.row.resize(row_words, 0);
                    let arow = &scratch.prows[aw + i * row_words..][..row_words];
                    // Union of b's rows over a's targets.
                    for j in iter_bits(arow, positions) {
                        let brow = &scratch.prows[bw + j * row_words..][..row_words];
                        for (w, &word) in brow.iter().enumerate() {
                            scratch.row[w] |= word;
                        }
                    }
                    scratch.prows[base_words + i * row_words..][..row_words]
                        .copy_from_slice(&scratch.row);
                }
            }
            PNode::Star(a) => {
                let aw = *a as usize * positions * row_words;
                // Reflexive-transitive closure of a's relation, computed by
                // bit-parallel Warshall over positions.
                let span = positions * row_words;
                scratch.prows.copy_within(aw..aw + span, base_words);
                for k in 0..positions {
                    let (kw, kb) = (k / 64, k % 64);
                    // Row k must be read while rows i are written; take a
                    // snapshot to satisfy the borrow checker cheaply.
                    scratch.row.clear();
                    scratch
                        .row
                        .extend_from_slice(&scratch.prows[base_words + k * row_words..][..row_words]);
                    for i in 0..positions {
                        let iw = base_words + i * row_words;
                        if scratch.prows[iw + kw] & (1 << kb) != 0 {
                            for (w, &word) in scratch.row.iter().enumerate() {
                                scratch.prows[iw + w] |= word;
                            }
                        }
                    }
                }
                for i in 0..positions {
                    set_bit(&mut scratch.prows[base_words + i * row_words..][..row_words], i);
                }
            }
            PNode::Power(a, n) => {
                let aw = *a as usize * positions * row_words;
                let span = positions * row_words;
                // result := a, composed with a another n-1 times.
                scratch.prows.copy_within(aw..aw + span, base_words);
                for _ in 1..*n {
                    for i in 0..positions {
                        scratch.row.clear();
                        scratch.row.resize(row_words, 0);
                        let cur = &scratch.prows[base_words + i * row_words..][..row_words];
                        for j in iter_bits(cur, positions) {
                            let arow = &scratch.prows[aw + j * row_words..][..row_words];
                            for (w, &word) in arow.iter().enumerate() {
                                scratch.row[w] |= word;
                            }
                        }
                        scratch.prows[base_words + i * row_words..][..row_words]
                            .copy_from_slice(&scratch.row);
                    }
                }
            }
        }
    }
}

fn set_bit(row: &mut [u64], j: usize) {
    row[j / 64] |= 1 << (j % 64);
}

/// Iterates the set bit positions `< limit` of a row, in ascending order.
fn iter_bits(row: &[u64], limit: usize) -> BitIter<'_> {
    BitIter { row, word_ix: 0, word: row.first().copied().unwrap_or(0), limit }
}

struct BitIter<'r> {
    row: &'r [u64],
    word_ix: usize,
    word: u64,
    limit: usize,
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word == 0 {
            self.word_ix += 1;
            if self.word_ix >= self.row.len() {
                return None;
            }
            self.word = self.row[self.word_ix];
        }
        let b = self.word.trailing_zeros() as usize;
        self.word &= self.word - 1;
        let j = self.word_ix * 64 + b;
        // Bits past the limit can only occur in the last word.
        if j < self.limit {
            Some(j)
        } else {
            None
        }
    }
}

/// True if any set bit `j < limit` of the row satisfies the predicate.
fn row_any(row: &[u64], limit: usize, mut pred: impl FnMut(usize) -> bool) -> bool {
    for (w, &word) in row.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let b = word.trailing_zeros() as usize;
            let j = w * 64 + b;
            if j < limit && pred(j) {
                return true;
            }
            word &= word - 1;
        }
    }
    false
}

fn vars_for(formula_atoms: BTreeSet<String>, trace_vars: impl IntoIterator<Item = String>) -> VarSet {
    let mut all = formula_atoms;
    all.extend(trace_vars);
    VarSet::new(all).expect("variable count exceeds the supported maximum")
}

fn trace_var_names(trace: &[Valuation]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for v in trace {
        out.extend(v.iter().cloned());
    }
    out
}

/// Evaluates `formula` on the whole trace (position 0).
pub fn eval_trace(formula: &Formula, trace: &[Valuation]) -> bool {
    let vars = vars_for(formula.atoms(), trace_var_names(trace));
    let ev = TraceEvaluator::new(formula, &vars).expect("atoms are covered by construction");
    let masks = vars.masks_of(trace).expect("trace vars are covered by construction");
    ev.eval_masks(&mut EvalScratch::default(), &masks)
}

/// Evaluates `formula` at position `i` of the trace.
pub fn eval_trace_at(formula: &Formula, trace: &[Valuation], i: usize) -> Result<bool, EvalError> {
    let vars = vars_for(formula.atoms(), trace_var_names(trace));
    let ev = TraceEvaluator::new(formula, &vars).expect("atoms are covered by construction");
    let masks = vars.masks_of(trace).expect("trace vars are covered by construction");
    ev.eval_masks_at(&mut EvalScratch::default(), &masks, i)
}

/// The set of match pairs `(i, j)`, `0 <= i <= j <= trace.len()`, of a path
/// expression on a trace.
pub fn path_relation(path: &PathExpr, trace: &[Valuation]) -> BTreeSet<(usize, usize)> {
    // Wrap the path in a diamond so the lowering machinery applies, then
    // read off the root path's relation.
    let mut atoms = BTreeSet::new();
    path.collect_atoms(&mut atoms);
    let vars = vars_for(atoms, trace_var_names(trace));
    let formula = Formula::diamond(path.clone(), Formula::True);
    let ev = TraceEvaluator::new(&formula, &vars).expect("atoms are covered by construction");
    let masks = vars.masks_of(trace).expect("trace vars are covered by construction");
    let mut scratch = EvalScratch::default();
    ev.run(&mut scratch, &masks);

    let root_path = match &ev.fnodes[ev.root as usize] {
        FNode::Diamond(p, _) => *p as usize,
        _ => unreachable!("root is a diamond by construction"),
    };
    let positions = trace.len() + 1;
    let row_words = positions.div_ceil(64);
    let mut out = BTreeSet::new();
    for i in 0..positions {
        let row = &scratch.prows[(root_path * positions + i) * row_words..][..row_words];
        for j in iter_bits(row, positions) {
            out.insert((i, j));
        }
    }
    out
}

/// True if some finite prefix of the lasso (possibly the empty one)
/// satisfies the formula.
pub fn eval_lasso(formula: &Formula, lasso: &Lasso) -> bool {
    let vars = vars_for(formula.atoms(), lasso.vars());
    let dfw = crate::automata::Dfw::compile(formula, &vars)
        .expect("atoms are covered by construction");
    dfw.first_accepting_prefix(lasso)
        .expect("lasso vars are covered by construction")
        .is_some()
}

/// Evaluates a quantified formula on a lasso: `E phi` asks for some
/// satisfying prefix, `A phi` for all prefixes.
pub fn eval_qpldl(q: &QFormula, lasso: &Lasso) -> bool {
    match q.quantifier {
        Quantifier::Exists => eval_lasso(&q.body, lasso),
        Quantifier::Forall => !eval_lasso(&Formula::not(q.body.clone()), lasso),
    }
}

/// Evaluates a goal on a lasso; a plain formula is read existentially.
pub fn eval_goal(goal: &Goal, lasso: &Lasso) -> bool {
    match goal {
        Goal::Plain(f) => eval_lasso(f, lasso),
        Goal::Quantified(q) => eval_qpldl(q, lasso),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlf::parser::parse_formula;
    use crate::ldlf::trace::{parse_trace, valuation};

    fn ev(f: &str, t: &str) -> bool {
        eval_trace(&parse_formula(f).unwrap(), &parse_trace(t).unwrap())
    }

    #[test]
    fn empty_trace_semantics() {
        assert!(ev("tt", ""));
        assert!(!ev("ff", ""));
        assert!(!ev("p", ""));
        assert!(!ev("<true> tt", ""));
        assert!(ev("[true] ff", ""));
        assert!(ev("!p", ""));
        assert!(ev("[p*] q || tt", ""));
        // A star always matches the empty expansion, so a diamond over it
        // can still check its target at the current (past-the-end) position.
        assert!(!ev("<true*> p", ""));
        assert!(ev("[true*] !p", ""));
    }

    #[test]
    fn single_step_modalities() {
        // A diamond step must land on a real position: from the last
        // position (and on the empty trace) it is false.
        assert!(!ev("<true> tt", "p"));
        assert!(!ev("<true> tt", ""));
        assert!(ev("<true> tt", "p ; q"));
        assert!(!ev("<true> <true> tt", "p ; q"));
        assert!(ev("<p> q", "p ; q"));
        assert!(!ev("<p> q", "q ; q"));
        assert!(!ev("<p> q", "p ; p"));
        // A box over a failing step constraint is vacuously true, and so is
        // a box whose step would leave the trace.
        assert!(ev("[q] ff", "p ; q"));
        assert!(ev("[true] ff", "p"));
        assert!(!ev("[true] ff", "p ; q"));
        assert!(ev("<true> !p", "q ; -"));
    }

    #[test]
    fn star_and_eventually() {
        assert!(ev("<true*> p", "q ; q ; p"));
        assert!(!ev("<true*> p", "q ; q"));
        assert!(ev("[true*] p", "p ; p ; p"));
        assert!(!ev("[true*] p", "p ; q"));
        // Last position: <true*> q holds only when q appears somewhere.
        assert!(ev("<true*> (p && [true] ff)", "q ; p"));
        assert!(!ev("<true*> (p && [true] ff)", "p ; q"));
    }

    #[test]
    fn tests_and_sequences() {
        assert!(ev("<{p}? ; true> q", "p ; q"));
        assert!(!ev("<{p}? ; true> q", "q ; q"));
        assert!(ev("<(p ; q)*> (r && [true] ff)", "p ; q ; p ; q ; r"));
        assert!(!ev("<(p ; q)*> (r && [true] ff)", "p ; p ; q ; r"));
        assert!(ev("<true^2> p", "q ; q ; p"));
        assert!(!ev("<true^2> p", "q ; p ; q"));
        assert!(ev("<true^0> q", "q"));
    }

    #[test]
    fn positions_and_errors() {
        let f = parse_formula("p").unwrap();
        let t = parse_trace("q ; p").unwrap();
        assert!(!eval_trace_at(&f, &t, 0).unwrap());
        assert!(eval_trace_at(&f, &t, 1).unwrap());
        assert!(eval_trace_at(&f, &t, 2).is_err());
        assert!(!eval_trace_at(&f, &[], 0).unwrap());
        assert!(eval_trace_at(&f, &[], 1).is_err());
    }

    #[test]
    fn star_relation_on_two_step_trace() {
        let path = PathExpr::star(PathExpr::Prop(PropFormula::True));
        let trace = vec![Valuation::new(), Valuation::new()];
        let rel = path_relation(&path, &trace);
        let expect: BTreeSet<(usize, usize)> =
            [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert_eq!(rel, expect);
    }

    #[test]
    fn test_relation_includes_past_the_end() {
        let path = PathExpr::test(Formula::not(Formula::atom("p")));
        let trace = vec![valuation(["p"])];
        let rel = path_relation(&path, &trace);
        // !p fails at position 0 but holds at the past-the-end position 1.
        let expect: BTreeSet<(usize, usize)> = [(1, 1)].into_iter().collect();
        assert_eq!(rel, expect);
    }
}
