//! Acceptors for ultimately periodic infinite words.
//!
//! An [`InfiniteAcceptor`] is a nondeterministic graph over valuation
//! symbols with two state markings. A run is an infinite path from an
//! initial state; the acceptor accepts a word if some run over it never
//! visits a *forbidden* state and visits a *flagged* state at least once
//! (the initial state counts as visited).
//!
//! Every constructor in this crate keeps flags *absorbing*: along any run
//! that avoids forbidden states, once a flagged state is visited all later
//! states are flagged too. Under this invariant the intersection of
//! acceptors is exactly the product construction below — a product state is
//! flagged when all components are, forbidden when any is — which would not
//! hold for transient flags.
//!
//! Lifting finite-word automata:
//!
//! * "some prefix is accepted" (plain and existentially quantified goals)
//!   — make the deterministic automaton's final states absorbing and flag
//!   them, or flag the word automaton's accepting state and let it loop;
//! * "no prefix is accepted" (universally quantified goals, via the negated
//!   body) — forbid the final states and flag everything else.

use std::collections::HashMap;

use crate::ldlf::{Formula, Goal, Lasso, QFormula, Quantifier, VarSet};

use super::afw::{dnf_and, Afw, Term};
use super::dfw::Dfw;
use super::nfw::{Nfw, NFW_ACCEPT};
use super::AutomataError;

/// An acceptor of lasso-representable infinite words. See the module
/// documentation for the acceptance condition.
pub struct InfiniteAcceptor {
    vars: VarSet,
    initial: Vec<u32>,
    /// `trans[state][symbol]`, sorted successor lists. Forbidden states
    /// have no outgoing transitions.
    trans: Vec<Vec<Vec<u32>>>,
    flagged: Vec<bool>,
    forbidden: Vec<bool>,
    labels: Vec<String>,
}

impl InfiniteAcceptor {
    /// Builds an acceptor from raw parts, normalizing the invariants:
    /// forbidden states lose their outgoing transitions and their flag.
    pub(crate) fn from_parts(
        vars: VarSet,
        initial: Vec<u32>,
        mut trans: Vec<Vec<Vec<u32>>>,
        mut flagged: Vec<bool>,
        forbidden: Vec<bool>,
        labels: Vec<String>,
    ) -> InfiniteAcceptor {
        for (s, &bad) in forbidden.iter().enumerate() {
            if bad {
                flagged[s] = false;
                for row in trans[s].iter_mut() {
                    row.clear();
                }
            }
        }
        InfiniteAcceptor { vars, initial, trans, flagged, forbidden, labels }
    }

    /// Accepts the words some finite prefix of which the automaton accepts.
    pub fn eventually(dfw: &Dfw) -> InfiniteAcceptor {
        let absorbing = dfw.with_absorbing_finals();
        let nsym = absorbing.vars().symbol_count();
        let n = absorbing.state_count();
        let trans = (0..n as u32)
            .map(|s| (0..nsym as u32).map(|sym| vec![absorbing.step(s, sym)]).collect())
            .collect();
        let flagged = (0..n as u32).map(|s| absorbing.is_final(s)).collect();
        let labels = (0..n as u32).map(|s| absorbing.state_label(s).to_string()).collect();
        InfiniteAcceptor::from_parts(
            absorbing.vars().clone(),
            vec![0],
            trans,
            flagged,
            vec![false; n],
            labels,
        )
    }

    /// Accepts the words no finite prefix of which the automaton accepts.
    pub fn never(dfw: &Dfw) -> InfiniteAcceptor {
        let nsym = dfw.vars().symbol_count();
        let n = dfw.state_count();
        let trans = (0..n as u32)
            .map(|s| (0..nsym as u32).map(|sym| vec![dfw.step(s, sym)]).collect())
            .collect();
        let forbidden: Vec<bool> = (0..n as u32).map(|s| dfw.is_final(s)).collect();
        let flagged = forbidden.iter().map(|&b| !b).collect();
        let labels = (0..n as u32).map(|s| dfw.state_label(s).to_string()).collect();
        InfiniteAcceptor::from_parts(dfw.vars().clone(), vec![0], trans, flagged, forbidden, labels)
    }

    /// Like [`InfiniteAcceptor::eventually`], lifting the nondeterministic
    /// word automaton directly: its accepting state becomes flagged and
    /// loops on every symbol.
    pub fn eventually_nfw(nfw: &Nfw) -> InfiniteAcceptor {
        let nsym = nfw.vars().symbol_count();
        let n = nfw.state_count();
        let mut trans: Vec<Vec<Vec<u32>>> = (0..n as u32)
            .map(|s| (0..nsym as u32).map(|sym| nfw.successors(s, sym).to_vec()).collect())
            .collect();
        for row in trans[NFW_ACCEPT as usize].iter_mut() {
            *row = vec![NFW_ACCEPT];
        }
        let mut flagged = vec![false; n];
        flagged[NFW_ACCEPT as usize] = true;
        let labels = (0..n as u32).map(|s| nfw.state_label(s).to_string()).collect();
        InfiniteAcceptor::from_parts(
            nfw.vars().clone(),
            nfw.initial().to_vec(),
            trans,
            flagged,
            vec![false; n],
            labels,
        )
    }

    /// The acceptor of exactly one word, the given lasso.
    pub fn word(lasso: &Lasso, vars: &VarSet) -> Result<InfiniteAcceptor, AutomataError> {
        let prefix = vars.masks_of(lasso.prefix())?;
        let cycle = vars.masks_of(lasso.cycle())?;
        let nsym = vars.symbol_count();
        let n = prefix.len() + cycle.len();
        let mut trans: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); nsym]; n];
        let mut labels = Vec::with_capacity(n);
        for (i, &sym) in prefix.iter().chain(cycle.iter()).enumerate() {
            let next = if i + 1 < n { i as u32 + 1 } else { prefix.len() as u32 };
            trans[i][sym as usize] = vec![next];
            labels.push(format!("t{i}"));
        }
        Ok(InfiniteAcceptor::from_parts(
            vars.clone(),
            vec![0],
            trans,
            vec![true; n],
            vec![false; n],
            labels,
        ))
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn initial(&self) -> &[u32] {
        &self.initial
    }

    pub fn successors(&self, state: u32, sym: u32) -> &[u32] {
        &self.trans[state as usize][sym as usize]
    }

    pub fn is_flagged(&self, state: u32) -> bool {
        self.flagged[state as usize]
    }

    pub fn is_forbidden(&self, state: u32) -> bool {
        self.forbidden[state as usize]
    }

    pub fn state_label(&self, state: u32) -> &str {
        &self.labels[state as usize]
    }

    /// States that admit an infinite continuation: the largest set each of
    /// whose members has a successor inside the set.
    fn alive(&self) -> Vec<bool> {
        let n = self.trans.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                let has = self.trans[s]
                    .iter()
                    .any(|succs| succs.iter().any(|&t| alive[t as usize]));
                if !has {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        alive
    }

    /// A lasso the acceptor accepts, or `None` when its language is empty.
    /// Deterministic: breadth-first search to the nearest flagged state
    /// (symbols, then successors, in ascending order), then a first-choice
    /// walk until a state repeats.
    pub fn find_witness(&self) -> Option<Lasso> {
        let alive = self.alive();
        let n = self.trans.len();
        let nsym = self.vars.symbol_count();

        // BFS to a flagged state over live states.
        let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        let mut target: Option<u32> = None;
        for &s in &self.initial {
            if alive[s as usize] && !seen[s as usize] {
                seen[s as usize] = true;
                queue.push_back(s);
            }
        }
        'bfs: while let Some(s) = queue.pop_front() {
            if self.flagged[s as usize] {
                target = Some(s);
                break 'bfs;
            }
            for sym in 0..nsym as u32 {
                for &t in &self.trans[s as usize][sym as usize] {
                    if alive[t as usize] && !seen[t as usize] {
                        seen[t as usize] = true;
                        parent[t as usize] = Some((s, sym));
                        queue.push_back(t);
                    }
                }
            }
        }
        let target = target?;

        // Reconstruct the path to the flagged state.
        let mut prefix_syms = Vec::new();
        let mut cur = target;
        while let Some((p, sym)) = parent[cur as usize] {
            prefix_syms.push(sym);
            cur = p;
        }
        prefix_syms.reverse();

        // First-choice walk from the flagged state until a repeat closes
        // the cycle. Flags are absorbing, so every state of the walk keeps
        // the acceptance witness valid.
        let mut order: HashMap<u32, usize> = HashMap::new();
        let mut walk_syms = Vec::new();
        let mut s = target;
        loop {
            if let Some(&k) = order.get(&s) {
                let cycle_syms = walk_syms.split_off(k);
                prefix_syms.extend(walk_syms);
                let prefix =
                    prefix_syms.iter().map(|&sym| self.vars.valuation_of(sym)).collect();
                let cycle =
                    cycle_syms.iter().map(|&sym| self.vars.valuation_of(sym)).collect();
                return Some(Lasso::new(prefix, cycle).expect("walk cycles are nonempty"));
            }
            order.insert(s, walk_syms.len());
            let (sym, t) = (0..nsym as u32)
                .find_map(|sym| {
                    self.trans[s as usize][sym as usize]
                        .iter()
                        .find(|&&t| alive[t as usize])
                        .map(|&t| (sym, t))
                })
                .expect("live states have live successors");
            walk_syms.push(sym);
            s = t;
        }
    }

    /// Whether the accepted language is empty.
    pub fn is_empty(&self) -> bool {
        self.find_witness().is_none()
    }

    /// Whether the acceptor accepts the given lasso.
    pub fn accepts_lasso(&self, lasso: &Lasso) -> Result<bool, AutomataError> {
        let word = InfiniteAcceptor::word(lasso, &self.vars)?;
        Ok(product_many(&[self, &word])?.find_witness().is_some())
    }

    /// Renders the acceptor in the textual dump format.
    pub fn dump(&self) -> String {
        let mut out = format!("alphabet: {}\n", self.vars);
        for s in 0..self.trans.len() as u32 {
            let mut line = format!("state {s}");
            if self.initial.contains(&s) {
                line.push_str(" initial");
            }
            if self.flagged[s as usize] {
                line.push_str(" flag");
            }
            if self.forbidden[s as usize] {
                line.push_str(" forbidden");
            }
            line.push_str(&format!("  # {}", self.labels[s as usize]));
            out.push_str(&line);
            out.push('\n');
        }
        for (s, row) in self.trans.iter().enumerate() {
            for (sym, succs) in row.iter().enumerate() {
                for &t in succs {
                    out.push_str(&format!(
                        "trans {s} {} {t}\n",
                        self.vars.format_mask(sym as u32)
                    ));
                }
            }
        }
        out
    }
}

/// The intersection of several acceptors over the same alphabet, by the
/// reachable product: a product state is flagged when all components are
/// and forbidden when any component is.
pub fn product_many(parts: &[&InfiniteAcceptor]) -> Result<InfiniteAcceptor, AutomataError> {
    assert!(!parts.is_empty(), "product of zero acceptors");
    let vars = parts[0].vars.clone();
    for p in &parts[1..] {
        if p.vars != vars {
            return Err(AutomataError::AlphabetMismatch(
                vars.to_string(),
                p.vars.to_string(),
            ));
        }
    }
    let nsym = vars.symbol_count();

    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    let mut tuples: Vec<Vec<u32>> = Vec::new();
    let mut initial = Vec::new();
    for tuple in cartesian(parts.iter().map(|p| p.initial.as_slice())) {
        let id = intern_tuple(&mut ids, &mut tuples, tuple);
        if !initial.contains(&id) {
            initial.push(id);
        }
    }
    initial.sort_unstable();

    let mut trans: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut flagged = Vec::new();
    let mut forbidden = Vec::new();
    let mut labels = Vec::new();
    let mut done = 0usize;
    while done < tuples.len() {
        let tuple = tuples[done].clone();
        let bad = tuple.iter().zip(parts).any(|(&s, p)| p.forbidden[s as usize]);
        let flag = !bad && tuple.iter().zip(parts).all(|(&s, p)| p.flagged[s as usize]);
        forbidden.push(bad);
        flagged.push(flag);
        labels.push(format!(
            "({})",
            tuple.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        ));
        let mut row = vec![Vec::new(); nsym];
        if !bad {
            for (sym, out) in row.iter_mut().enumerate() {
                let lists: Vec<&[u32]> = tuple
                    .iter()
                    .zip(parts)
                    .map(|(&s, p)| p.trans[s as usize][sym].as_slice())
                    .collect();
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                for succ in cartesian(lists.iter().copied()) {
                    let id = intern_tuple(&mut ids, &mut tuples, succ);
                    if !out.contains(&id) {
                        out.push(id);
                    }
                }
                out.sort_unstable();
            }
        }
        trans.push(row);
        done += 1;
    }

    Ok(InfiniteAcceptor::from_parts(vars, initial, trans, flagged, forbidden, labels))
}

/// The intersection of two acceptors.
pub fn product(
    a: &InfiniteAcceptor,
    b: &InfiniteAcceptor,
) -> Result<InfiniteAcceptor, AutomataError> {
    product_many(&[a, b])
}

fn intern_tuple(
    ids: &mut HashMap<Vec<u32>, u32>,
    tuples: &mut Vec<Vec<u32>>,
    tuple: Vec<u32>,
) -> u32 {
    if let Some(&id) = ids.get(&tuple) {
        return id;
    }
    let id = tuples.len() as u32;
    ids.insert(tuple.clone(), id);
    tuples.push(tuple);
    id
}

/// Cartesian product of the given slices, first slice most significant,
/// elements in the given order.
fn cartesian<'a>(lists: impl Iterator<Item = &'a [u32]>) -> Vec<Vec<u32>> {
    let lists: Vec<&[u32]> = lists.collect();
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for &x in list {
                let mut tuple = prefix.clone();
                tuple.push(x);
                next.push(tuple);
            }
        }
        out = next;
    }
    out
}

/// The intersection of "some prefix satisfies `formula`" with an acceptor,
/// built on the fly: product states pair the formula's pending obligation
/// set (or its accepting state) with a state of the acceptor, and
/// transitions rewrite the obligations symbol by symbol. Equivalent to
/// building the formula's word automaton first and then taking the
/// product, without materializing the automaton.
pub fn formula_product(
    formula: &Formula,
    partner: &InfiniteAcceptor,
) -> Result<InfiniteAcceptor, AutomataError> {
    let afw = Afw::compile(formula, &partner.vars)?;
    let nsym = partner.vars.symbol_count();

    // A product state: the formula side is either the accepting state
    // (None) or a sorted obligation set of AFW state indices.
    type FSide = Option<Vec<u32>>;
    let mut ids: HashMap<(FSide, u32), u32> = HashMap::new();
    let mut states: Vec<(FSide, u32)> = Vec::new();
    let mut intern = |state: (FSide, u32), states: &mut Vec<(FSide, u32)>| -> u32 {
        if let Some(&id) = ids.get(&state) {
            return id;
        }
        let id = states.len() as u32;
        ids.insert(state.clone(), id);
        states.push(state);
        id
    };

    let mut initial = Vec::new();
    for &q in &partner.initial {
        let id = intern((Some(vec![0]), q), &mut states);
        if !initial.contains(&id) {
            initial.push(id);
        }
        if afw.empty_accepting() {
            let id = intern((None, q), &mut states);
            if !initial.contains(&id) {
                initial.push(id);
            }
        }
    }
    initial.sort_unstable();

    let mut trans: Vec<Vec<Vec<u32>>> = Vec::new();
    let mut flagged = Vec::new();
    let mut forbidden = Vec::new();
    let mut labels = Vec::new();
    let mut done = 0usize;
    while done < states.len() {
        let (fside, q) = states[done].clone();
        let bad = partner.forbidden[q as usize];
        forbidden.push(bad);
        flagged.push(!bad && fside.is_none() && partner.flagged[q as usize]);
        labels.push(match &fside {
            None => format!("(accept,{q})"),
            Some(obs) => format!(
                "({{{}}},{q})",
                obs.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",")
            ),
        });
        let mut row = vec![Vec::new(); nsym];
        if !bad {
            for (sym, out) in row.iter_mut().enumerate() {
                let partner_succs = &partner.trans[q as usize][sym];
                if partner_succs.is_empty() {
                    continue;
                }
                let fsides: Vec<FSide> = match &fside {
                    None => vec![None],
                    Some(obs) => {
                        let mut dnf = vec![Term { atoms: Vec::new(), strong: false }];
                        for &ob in obs {
                            dnf = dnf_and(&dnf, afw.delta_dnf(ob, sym as u32));
                            if dnf.is_empty() {
                                break;
                            }
                        }
                        let mut sides: Vec<FSide> = Vec::new();
                        let mut may_stop = false;
                        for term in &dnf {
                            may_stop |= !term.strong;
                            let mut next: Vec<u32> = term
                                .atoms
                                .iter()
                                .map(|&cl| afw.state_index(cl))
                                .collect();
                            next.sort_unstable();
                            next.dedup();
                            let side = Some(next);
                            if !sides.contains(&side) {
                                sides.push(side);
                            }
                        }
                        if may_stop {
                            sides.push(None);
                        }
                        sides
                    }
                };
                for side in &fsides {
                    for &qn in partner_succs {
                        let id = intern((side.clone(), qn), &mut states);
                        if !out.contains(&id) {
                            out.push(id);
                        }
                    }
                }
                out.sort_unstable();
            }
        }
        trans.push(row);
        done += 1;
    }

    Ok(InfiniteAcceptor::from_parts(
        partner.vars.clone(),
        initial,
        trans,
        flagged,
        forbidden,
        labels,
    ))
}

/// Accepts the infinite words some finite prefix of which satisfies the
/// formula — the reading of a plain goal over a play.
pub fn formula_acceptor(
    formula: &Formula,
    vars: &VarSet,
) -> Result<InfiniteAcceptor, AutomataError> {
    Ok(InfiniteAcceptor::eventually(&Dfw::compile(formula, vars)?))
}

/// The acceptor of a prefix-quantified formula over infinite words:
/// `E phi` accepts when some prefix satisfies `phi`, `A phi` when every
/// prefix does (no prefix satisfies `!phi`).
pub fn qpldl_acceptor(
    q: &QFormula,
    vars: &VarSet,
) -> Result<InfiniteAcceptor, AutomataError> {
    match q.quantifier {
        Quantifier::Exists => formula_acceptor(&q.body, vars),
        Quantifier::Forall => {
            let negated = Formula::not(q.body.clone());
            Ok(InfiniteAcceptor::never(&Dfw::compile(&negated, vars)?))
        }
    }
}

/// The acceptor of a goal over infinite words.
pub fn goal_acceptor(goal: &Goal, vars: &VarSet) -> Result<InfiniteAcceptor, AutomataError> {
    match goal {
        Goal::Plain(f) => formula_acceptor(f, vars),
        Goal::Quantified(q) => qpldl_acceptor(q, vars),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlf::{parse_formula, parse_lasso, parse_qformula};

    fn vars(names: &[&str]) -> VarSet {
        VarSet::new(names.iter().copied()).unwrap()
    }

    fn acc(src: &str, names: &[&str]) -> InfiniteAcceptor {
        formula_acceptor(&parse_formula(src).unwrap(), &vars(names)).unwrap()
    }

    #[test]
    fn eventually_acceptor_on_lassos() {
        let a = acc("<true*> p", &["p"]);
        assert!(a.accepts_lasso(&parse_lasso("- | p").unwrap()).unwrap());
        assert!(a.accepts_lasso(&parse_lasso("p | -").unwrap()).unwrap());
        assert!(!a.accepts_lasso(&parse_lasso("- | -").unwrap()).unwrap());
        let w = a.find_witness().unwrap();
        assert!(a.accepts_lasso(&w).unwrap());
    }

    #[test]
    fn never_acceptor_is_the_universal_dual() {
        let q = parse_qformula("A [true*] !p").unwrap();
        let a = qpldl_acceptor(&q, &vars(&["p"])).unwrap();
        assert!(a.accepts_lasso(&parse_lasso("| -").unwrap()).unwrap());
        assert!(!a.accepts_lasso(&parse_lasso("- | p").unwrap()).unwrap());
        let w = a.find_witness().unwrap();
        assert!(a.accepts_lasso(&w).unwrap());
    }

    #[test]
    fn product_intersects_languages() {
        let a = acc("<true*> p", &["p", "q"]);
        let b = acc("<true*> q", &["p", "q"]);
        let both = product(&a, &b).unwrap();
        assert!(both.accepts_lasso(&parse_lasso("p | q").unwrap()).unwrap());
        assert!(!both.accepts_lasso(&parse_lasso("p | p").unwrap()).unwrap());
        assert!(!both.accepts_lasso(&parse_lasso("- | -").unwrap()).unwrap());
        let w = both.find_witness().unwrap();
        assert!(a.accepts_lasso(&w).unwrap());
        assert!(b.accepts_lasso(&w).unwrap());
    }

    #[test]
    fn empty_intersection() {
        let a = acc("<true*> (p && [true] ff)", &["p"]);
        let q = parse_qformula("A [true*] !p").unwrap();
        let b = qpldl_acceptor(&q, &vars(&["p"])).unwrap();
        assert!(product(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn formula_product_agrees_with_composed_product() {
        let partner = acc("<true*> q", &["p", "q"]);
        let f = parse_formula("<true*> (p && q)").unwrap();
        let direct = formula_product(&f, &partner).unwrap();
        let composed = product(
            &formula_acceptor(&f, &vars(&["p", "q"])).unwrap(),
            &partner,
        )
        .unwrap();
        assert_eq!(direct.is_empty(), composed.is_empty());
        for l in ["- | p,q", "p | q", "q ; p,q | -", "- | q", "- | p"] {
            let lasso = parse_lasso(l).unwrap();
            assert_eq!(
                direct.accepts_lasso(&lasso).unwrap(),
                composed.accepts_lasso(&lasso).unwrap(),
                "disagreement on {l}"
            );
        }
    }

    #[test]
    fn nfw_lift_agrees_with_dfw_lift() {
        let f = parse_formula("<(p ; q)*> (r && [true] ff)").unwrap();
        let vs = vars(&["p", "q", "r"]);
        let via_nfw =
            InfiniteAcceptor::eventually_nfw(&Nfw::compile(&f, &vs).unwrap());
        let via_dfw = formula_acceptor(&f, &vs).unwrap();
        for l in ["p ; q | r", "| p", "p ; q ; r | -", "| r"] {
            let lasso = parse_lasso(l).unwrap();
            assert_eq!(
                via_nfw.accepts_lasso(&lasso).unwrap(),
                via_dfw.accepts_lasso(&lasso).unwrap(),
                "disagreement on {l}"
            );
        }
    }
}
