//! Translation of formulas into alternating finite-word automata.
//!
//! States are the formulas of the closure of the (negation-normal-form)
//! input, hash-consed into flat arrays. The transition function maps a
//! state and an input symbol to a positive boolean combination of closure
//! formulas, kept in disjunctive normal form: each [`Term`] is a
//! conjunction of next-position obligations.
//!
//! A term additionally records whether it *requires* a next position
//! (`strong`). Diamond modalities step strongly — `<rho> phi` is false when
//! the path would move past the end of the trace — while box modalities
//! step weakly. The word-automaton construction uses this to decide
//! acceptance when input ends: a state can accept at the end of input
//! exactly if its transition on the final symbol contains an all-weak term.

use std::collections::HashMap;

use crate::ldlf::{eval_trace, nnf, Formula, PathExpr, PropFormula, VarSet, VarSetError};

/// Closure formula node. `Not` appears only as [`CF::NotAtom`]; bounded
/// repetitions are expanded into sequences before interning.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CF {
    True,
    False,
    Atom(u8),
    NotAtom(u8),
    And(u32, u32),
    Or(u32, u32),
    Diamond(u32, u32),
    Box(u32, u32),
}

/// Closure path node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum CP {
    Prop(u32),
    Test(u32),
    Choice(u32, u32),
    Seq(u32, u32),
    Star(u32),
}

/// One disjunct of a transition: a conjunction of next-position obligations
/// (closure formula ids, sorted). A `strong` term consumed a diamond step
/// and is unusable when the input ends at the current symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Term {
    pub atoms: Vec<u32>,
    pub strong: bool,
}

/// A transition value in disjunctive normal form. Empty means false; a term
/// with no atoms means true (weak) or "true but a next position must exist"
/// (strong — never produced, see [`Term`]).
pub(crate) type Dnf = Vec<Term>;

/// `t1` makes `t2` redundant: fewer obligations and no stronger a
/// requirement on input continuing.
fn covers(t1: &Term, t2: &Term) -> bool {
    if t1.strong && !t2.strong {
        return false;
    }
    if t1.atoms.len() > t2.atoms.len() {
        return false;
    }
    // Both sorted: subset test by merge.
    let mut it2 = t2.atoms.iter();
    'outer: for a in &t1.atoms {
        for b in it2.by_ref() {
            match b.cmp(a) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => continue 'outer,
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

fn push_term(dnf: &mut Dnf, term: Term) {
    for t in dnf.iter() {
        if covers(t, &term) {
            return;
        }
    }
    dnf.retain(|t| !covers(&term, t));
    dnf.push(term);
}

fn dnf_or(mut a: Dnf, b: Dnf) -> Dnf {
    for t in b {
        push_term(&mut a, t);
    }
    a
}

pub(crate) fn dnf_and(a: &Dnf, b: &Dnf) -> Dnf {
    let mut out = Dnf::new();
    for ta in a {
        for tb in b {
            let mut atoms = Vec::with_capacity(ta.atoms.len() + tb.atoms.len());
            let (mut i, mut j) = (0, 0);
            while i < ta.atoms.len() || j < tb.atoms.len() {
                let next = match (ta.atoms.get(i), tb.atoms.get(j)) {
                    (Some(&x), Some(&y)) if x == y => {
                        i += 1;
                        j += 1;
                        x
                    }
                    (Some(&x), Some(&y)) if x < y => {
                        i += 1;
                        x
                    }
                    (Some(_), Some(&y)) => {
                        j += 1;
                        y
                    }
                    (Some(&x), None) => {
                        i += 1;
                        x
                    }
                    (None, Some(&y)) => {
                        j += 1;
                        y
                    }
                    (None, None) => unreachable!(),
                };
                atoms.push(next);
            }
            push_term(&mut out, Term { atoms, strong: ta.strong || tb.strong });
        }
    }
    out
}

fn dnf_true() -> Dnf {
    vec![Term { atoms: Vec::new(), strong: false }]
}

/// An alternating finite-word automaton compiled from a formula.
pub struct Afw {
    vars: VarSet,
    fnodes: Vec<CF>,
    pnodes: Vec<CP>,
    props: Vec<PropFormula>,
    /// Closure ids that occur as automaton states (the initial formula
    /// first, then every obligation appearing in a transition), in
    /// discovery order.
    states: Vec<u32>,
    state_ix: HashMap<u32, u32>,
    /// Transition table, `delta[state index][symbol]`.
    delta: Vec<Vec<Dnf>>,
    /// Whether the empty trace satisfies the formula.
    empty_accepting: bool,
}

struct Builder {
    vars: VarSet,
    fnodes: Vec<CF>,
    pnodes: Vec<CP>,
    props: Vec<PropFormula>,
    prop_sat: Vec<Vec<bool>>,
    fmap: HashMap<CF, u32>,
    pmap: HashMap<CP, u32>,
    prop_map: HashMap<PropFormula, u32>,
    neg_memo: HashMap<u32, u32>,
}

impl Builder {
    fn intern_f(&mut self, node: CF) -> u32 {
        if let Some(&id) = self.fmap.get(&node) {
            return id;
        }
        let id = self.fnodes.len() as u32;
        self.fnodes.push(node.clone());
        self.fmap.insert(node, id);
        id
    }

    fn intern_p(&mut self, node: CP) -> u32 {
        if let Some(&id) = self.pmap.get(&node) {
            return id;
        }
        let id = self.pnodes.len() as u32;
        self.pnodes.push(node.clone());
        self.pmap.insert(node, id);
        id
    }

    fn intern_prop(&mut self, p: &PropFormula) -> u32 {
        if let Some(&id) = self.prop_map.get(p) {
            return id;
        }
        let id = self.props.len() as u32;
        self.props.push(p.clone());
        self.prop_map.insert(p.clone(), id);
        let table = (0..self.vars.symbol_count() as u32)
            .map(|sym| prop_holds_mask(p, sym, &self.vars))
            .collect();
        self.prop_sat.push(table);
        id
    }

    /// Interns a formula already in negation normal form.
    fn lower(&mut self, f: &Formula) -> Result<u32, VarSetError> {
        let node = match f {
            Formula::True => CF::True,
            Formula::False => CF::False,
            Formula::Atom(x) => CF::Atom(self.bit(x)?),
            Formula::Not(inner) => match &**inner {
                Formula::Atom(x) => CF::NotAtom(self.bit(x)?),
                _ => unreachable!("input is in negation normal form"),
            },
            Formula::And(a, b) => {
                let (a, b) = (self.lower(a)?, self.lower(b)?);
                CF::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.lower(a)?, self.lower(b)?);
                CF::Or(a, b)
            }
            Formula::Diamond(p, a) => {
                let (p, a) = (self.lower_path(p)?, self.lower(a)?);
                CF::Diamond(p, a)
            }
            Formula::Box(p, a) => {
                let (p, a) = (self.lower_path(p)?, self.lower(a)?);
                CF::Box(p, a)
            }
        };
        Ok(self.intern_f(node))
    }

    fn lower_path(&mut self, p: &PathExpr) -> Result<u32, VarSetError> {
        let node = match p {
            PathExpr::Prop(q) => CP::Prop(self.intern_prop(q)),
            PathExpr::Test(f) => CP::Test(self.lower(f)?),
            PathExpr::Choice(a, b) => {
                let (a, b) = (self.lower_path(a)?, self.lower_path(b)?);
                CP::Choice(a, b)
            }
            PathExpr::Seq(a, b) => {
                let (a, b) = (self.lower_path(a)?, self.lower_path(b)?);
                CP::Seq(a, b)
            }
            PathExpr::Star(a) => CP::Star(self.lower_path(a)?),
            PathExpr::Power(a, n) => {
                // rho^n as an n-fold sequence; rho^0 as the trivial test.
                if *n == 0 {
                    let t = self.intern_f(CF::True);
                    CP::Test(t)
                } else {
                    let a = self.lower_path(a)?;
                    let mut acc = a;
                    for _ in 1..*n {
                        acc = self.intern_p(CP::Seq(a, acc));
                    }
                    return Ok(acc);
                }
            }
        };
        Ok(self.intern_p(node))
    }

    fn bit(&self, name: &str) -> Result<u8, VarSetError> {
        self.vars
            .index_of(name)
            .map(|i| i as u8)
            .ok_or_else(|| VarSetError::Unknown(name.to_string()))
    }

    /// The closure id of the negation-normal-form negation of `f`.
    fn neg(&mut self, f: u32) -> u32 {
        if let Some(&n) = self.neg_memo.get(&f) {
            return n;
        }
        let node = match self.fnodes[f as usize].clone() {
            CF::True => CF::False,
            CF::False => CF::True,
            CF::Atom(b) => CF::NotAtom(b),
            CF::NotAtom(b) => CF::Atom(b),
            CF::And(a, b) => {
                let (a, b) = (self.neg(a), self.neg(b));
                CF::Or(a, b)
            }
            CF::Or(a, b) => {
                let (a, b) = (self.neg(a), self.neg(b));
                CF::And(a, b)
            }
            CF::Diamond(p, a) => {
                let a = self.neg(a);
                CF::Box(p, a)
            }
            CF::Box(p, a) => {
                let a = self.neg(a);
                CF::Diamond(p, a)
            }
        };
        let id = self.intern_f(node);
        self.neg_memo.insert(f, id);
        id
    }

    /// The transition function. `visiting` carries the stack of star
    /// modalities currently being unfolded: re-reaching one without
    /// consuming a symbol contributes nothing for a diamond (false) and
    /// demands nothing for a box (true), which cuts the unfolding cycle
    /// introduced by test-only star bodies.
    fn delta(&mut self, f: u32, sym: u32, visiting: &mut Vec<u32>) -> Dnf {
        match self.fnodes[f as usize].clone() {
            CF::True => dnf_true(),
            CF::False => Dnf::new(),
            CF::Atom(b) => {
                if sym & (1 << b) != 0 {
                    dnf_true()
                } else {
                    Dnf::new()
                }
            }
            CF::NotAtom(b) => {
                if sym & (1 << b) == 0 {
                    dnf_true()
                } else {
                    Dnf::new()
                }
            }
            CF::And(a, b) => {
                let da = self.delta(a, sym, visiting);
                if da.is_empty() {
                    return Dnf::new();
                }
                let db = self.delta(b, sym, visiting);
                dnf_and(&da, &db)
            }
            CF::Or(a, b) => {
                let da = self.delta(a, sym, visiting);
                let db = self.delta(b, sym, visiting);
                dnf_or(da, db)
            }
            CF::Diamond(p, a) => match self.pnodes[p as usize].clone() {
                CP::Prop(q) => {
                    if self.prop_sat[q as usize][sym as usize] {
                        vec![Term { atoms: vec![a], strong: true }]
                    } else {
                        Dnf::new()
                    }
                }
                CP::Test(t) => {
                    let dt = self.delta(t, sym, visiting);
                    if dt.is_empty() {
                        return Dnf::new();
                    }
                    let da = self.delta(a, sym, visiting);
                    dnf_and(&dt, &da)
                }
                CP::Choice(r1, r2) => {
                    let f1 = self.intern_f(CF::Diamond(r1, a));
                    let f2 = self.intern_f(CF::Diamond(r2, a));
                    let d1 = self.delta(f1, sym, visiting);
                    let d2 = self.delta(f2, sym, visiting);
                    dnf_or(d1, d2)
                }
                CP::Seq(r1, r2) => {
                    let inner = self.intern_f(CF::Diamond(r2, a));
                    let outer = self.intern_f(CF::Diamond(r1, inner));
                    self.delta(outer, sym, visiting)
                }
                CP::Star(r) => {
                    if visiting.contains(&f) {
                        return Dnf::new();
                    }
                    visiting.push(f);
                    let base = self.delta(a, sym, visiting);
                    let unfold = self.intern_f(CF::Diamond(r, f));
                    let step = self.delta(unfold, sym, visiting);
                    visiting.pop();
                    dnf_or(base, step)
                }
            },
            CF::Box(p, a) => match self.pnodes[p as usize].clone() {
                CP::Prop(q) => {
                    if self.prop_sat[q as usize][sym as usize] {
                        vec![Term { atoms: vec![a], strong: false }]
                    } else {
                        dnf_true()
                    }
                }
                CP::Test(t) => {
                    let nt = self.neg(t);
                    let dnt = self.delta(nt, sym, visiting);
                    let da = self.delta(a, sym, visiting);
                    dnf_or(dnt, da)
                }
                CP::Choice(r1, r2) => {
                    let f1 = self.intern_f(CF::Box(r1, a));
                    let f2 = self.intern_f(CF::Box(r2, a));
                    let d1 = self.delta(f1, sym, visiting);
                    if d1.is_empty() {
                        return Dnf::new();
                    }
                    let d2 = self.delta(f2, sym, visiting);
                    dnf_and(&d1, &d2)
                }
                CP::Seq(r1, r2) => {
                    let inner = self.intern_f(CF::Box(r2, a));
                    let outer = self.intern_f(CF::Box(r1, inner));
                    self.delta(outer, sym, visiting)
                }
                CP::Star(r) => {
                    if visiting.contains(&f) {
                        return dnf_true();
                    }
                    visiting.push(f);
                    let base = self.delta(a, sym, visiting);
                    let out = if base.is_empty() {
                        Dnf::new()
                    } else {
                        let unfold = self.intern_f(CF::Box(r, f));
                        let step = self.delta(unfold, sym, visiting);
                        dnf_and(&base, &step)
                    };
                    visiting.pop();
                    out
                }
            },
        }
    }

}

/// Reconstructs the formula a closure id stands for.
fn formula_of(fnodes: &[CF], pnodes: &[CP], props: &[PropFormula], vars: &VarSet, f: u32) -> Formula {
    match &fnodes[f as usize] {
        CF::True => Formula::True,
        CF::False => Formula::False,
        CF::Atom(b) => Formula::atom(vars.names()[*b as usize].clone()),
        CF::NotAtom(b) => Formula::not(Formula::atom(vars.names()[*b as usize].clone())),
        CF::And(a, b) => Formula::and(
            formula_of(fnodes, pnodes, props, vars, *a),
            formula_of(fnodes, pnodes, props, vars, *b),
        ),
        CF::Or(a, b) => Formula::or(
            formula_of(fnodes, pnodes, props, vars, *a),
            formula_of(fnodes, pnodes, props, vars, *b),
        ),
        CF::Diamond(p, a) => Formula::diamond(
            path_of(fnodes, pnodes, props, vars, *p),
            formula_of(fnodes, pnodes, props, vars, *a),
        ),
        CF::Box(p, a) => Formula::boxed(
            path_of(fnodes, pnodes, props, vars, *p),
            formula_of(fnodes, pnodes, props, vars, *a),
        ),
    }
}

fn path_of(fnodes: &[CF], pnodes: &[CP], props: &[PropFormula], vars: &VarSet, p: u32) -> PathExpr {
    match &pnodes[p as usize] {
        CP::Prop(q) => PathExpr::Prop(props[*q as usize].clone()),
        CP::Test(f) => PathExpr::test(formula_of(fnodes, pnodes, props, vars, *f)),
        CP::Choice(a, b) => PathExpr::choice(
            path_of(fnodes, pnodes, props, vars, *a),
            path_of(fnodes, pnodes, props, vars, *b),
        ),
        CP::Seq(a, b) => PathExpr::seq(
            path_of(fnodes, pnodes, props, vars, *a),
            path_of(fnodes, pnodes, props, vars, *b),
        ),
        CP::Star(a) => PathExpr::star(path_of(fnodes, pnodes, props, vars, *a)),
    }
}

fn prop_holds_mask(p: &PropFormula, sym: u32, vars: &VarSet) -> bool {
    match p {
        PropFormula::True => true,
        PropFormula::False => false,
        PropFormula::Atom(x) => match vars.index_of(x) {
            Some(i) => sym & (1 << i) != 0,
            // Unknown atoms are rejected when the formula is lowered; a
            // guard-only prop can still reach here through interning order.
            None => false,
        },
        PropFormula::Not(a) => !prop_holds_mask(a, sym, vars),
        PropFormula::And(a, b) => prop_holds_mask(a, sym, vars) && prop_holds_mask(b, sym, vars),
        PropFormula::Or(a, b) => prop_holds_mask(a, sym, vars) || prop_holds_mask(b, sym, vars),
    }
}

impl Afw {
    /// Compiles `formula` over the alphabet `vars`, which must contain
    /// every atom. The formula is brought into negation normal form first.
    pub fn compile(formula: &Formula, vars: &VarSet) -> Result<Afw, VarSetError> {
        // Reject propositional atoms outside the alphabet up front; path
        // constraints do not show up as closure formulas.
        for atom in formula.atoms() {
            if !vars.contains(&atom) {
                return Err(VarSetError::Unknown(atom));
            }
        }
        let normal = nnf(formula);
        let mut b = Builder {
            vars: vars.clone(),
            fnodes: Vec::new(),
            pnodes: Vec::new(),
            props: Vec::new(),
            prop_sat: Vec::new(),
            fmap: HashMap::new(),
            pmap: HashMap::new(),
            prop_map: HashMap::new(),
            neg_memo: HashMap::new(),
        };
        let init = b.lower(&normal)?;
        let nsym = vars.symbol_count();

        let mut states = vec![init];
        let mut state_ix: HashMap<u32, u32> = HashMap::from([(init, 0)]);
        let mut delta: Vec<Vec<Dnf>> = Vec::new();
        let mut visiting = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let s = states[i];
            let mut row = Vec::with_capacity(nsym);
            for sym in 0..nsym as u32 {
                let dnf = b.delta(s, sym, &mut visiting);
                debug_assert!(visiting.is_empty());
                for term in &dnf {
                    for &atom in &term.atoms {
                        if !state_ix.contains_key(&atom) {
                            state_ix.insert(atom, states.len() as u32);
                            states.push(atom);
                        }
                    }
                }
                row.push(dnf);
            }
            delta.push(row);
            i += 1;
        }

        let empty_accepting = eval_trace(formula, &[]);
        Ok(Afw {
            vars: vars.clone(),
            fnodes: b.fnodes,
            pnodes: b.pnodes,
            props: b.props,
            states,
            state_ix,
            delta,
            empty_accepting,
        })
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    /// Number of automaton states (closure formulas reachable as states).
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Total number of closure formulas interned, states or not.
    pub fn closure_size(&self) -> usize {
        self.fnodes.len()
    }

    /// The formula state `ix` stands for (state 0 is the initial state).
    pub fn state_formula(&self, ix: usize) -> Formula {
        formula_of(&self.fnodes, &self.pnodes, &self.props, &self.vars, self.states[ix])
    }

    /// Whether the empty word is accepted.
    pub fn empty_accepting(&self) -> bool {
        self.empty_accepting
    }

    pub(crate) fn state_index(&self, closure_id: u32) -> u32 {
        self.state_ix[&closure_id]
    }

    pub(crate) fn delta_dnf(&self, state_ix: u32, sym: u32) -> &Dnf {
        &self.delta[state_ix as usize][sym as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlf::parse_formula;

    fn afw(src: &str, vars: &[&str]) -> Afw {
        let f = parse_formula(src).unwrap();
        let vs = VarSet::new(vars.iter().copied()).unwrap();
        Afw::compile(&f, &vs).unwrap()
    }

    #[test]
    fn eventually_p_has_small_closure() {
        let a = afw("<true*> p", &["p"]);
        assert!(a.closure_size() <= 4, "closure has {} formulas", a.closure_size());
        assert_eq!(a.state_formula(0), parse_formula("<true*> p").unwrap());
        assert!(!a.empty_accepting());
    }

    #[test]
    fn transition_strength() {
        // <true> tt must demand a next position; [true] ff must not.
        let a = afw("<true> tt", &["p"]);
        let dnf = a.delta_dnf(0, 0);
        assert_eq!(dnf.len(), 1);
        assert!(dnf[0].strong);

        let b = afw("[true] ff", &["p"]);
        let dnf = b.delta_dnf(0, 0);
        assert_eq!(dnf.len(), 1);
        assert!(!dnf[0].strong);
        assert!(b.empty_accepting());
    }

    #[test]
    fn star_unfolds_without_looping() {
        // A star whose body is a pure test would unfold forever without the
        // cycle guard.
        let a = afw("<{p}?*> q", &["p", "q"]);
        for sym in 0..4 {
            let _ = a.delta_dnf(0, sym);
        }
        let b = afw("[{p}?*] q", &["p", "q"]);
        for sym in 0..4 {
            let _ = b.delta_dnf(0, sym);
        }
    }
}
