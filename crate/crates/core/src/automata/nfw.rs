//! Nondeterministic finite-word automata from alternating ones.
//!
//! States are sets of simultaneous obligations (closure formulas of the
//! alternating automaton); reading a symbol rewrites the conjunction of
//! all pending obligations into disjunctive normal form and branches to
//! one obligation set per disjunct. A single distinguished accepting state
//! — with no outgoing transitions — is entered exactly when a disjunct
//! makes no strong demand on the input continuing, i.e. when the word may
//! stop at the symbol just read. The empty word is handled by making the
//! accepting state initial when the formula holds on the empty trace.

use std::collections::HashMap;

use crate::ldlf::{Formula, Valuation, VarSet, VarSetError};

use super::afw::{dnf_and, Afw, Term};

/// Index of the accepting state in every [`Nfw`].
pub const NFW_ACCEPT: u32 = 0;

/// A nondeterministic finite-word automaton. State [`NFW_ACCEPT`] is the
/// only accepting state and has no outgoing transitions; a word is
/// accepted if some run ends there having consumed all input.
pub struct Nfw {
    vars: VarSet,
    /// `trans[state][symbol]` is the sorted list of successor states.
    trans: Vec<Vec<Vec<u32>>>,
    /// Sorted initial states.
    initial: Vec<u32>,
    /// Human-readable state labels for dumps.
    labels: Vec<String>,
}

impl Nfw {
    /// Builds the word automaton of an alternating automaton.
    pub fn from_afw(afw: &Afw) -> Nfw {
        let nsym = afw.vars().symbol_count();
        // Obligation sets are stored as sorted vectors of AFW state indices.
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut sets: Vec<Vec<u32>> = Vec::new();
        let mut trans: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); nsym]];
        let mut labels = vec!["accept".to_string()];

        let mut intern = |set: Vec<u32>,
                          sets: &mut Vec<Vec<u32>>,
                          trans: &mut Vec<Vec<Vec<u32>>>,
                          labels: &mut Vec<String>|
         -> u32 {
            if let Some(&id) = ids.get(&set) {
                return id;
            }
            let id = (sets.len() + 1) as u32;
            labels.push(label_of(&set, afw));
            sets.push(set.clone());
            ids.insert(set, id);
            trans.push(vec![Vec::new(); nsym]);
            id
        };

        let root = vec![0u32]; // AFW state index 0 is its initial formula
        let start = intern(root, &mut sets, &mut trans, &mut labels);
        let mut initial = vec![start];
        if afw.empty_accepting() {
            initial.push(NFW_ACCEPT);
        }
        initial.sort_unstable();

        let mut done = 1usize; // sets processed so far
        while done <= sets.len() {
            let state = done as u32;
            let obligations = sets[done - 1].clone();
            for sym in 0..nsym as u32 {
                // Conjunction of the transition values of all obligations.
                let mut dnf = vec![Term { atoms: Vec::new(), strong: false }];
                for &ob in &obligations {
                    let d = afw.delta_dnf(ob, sym);
                    dnf = dnf_and(&dnf, d);
                    if dnf.is_empty() {
                        break;
                    }
                }
                let mut succs = Vec::new();
                let mut may_stop = false;
                for term in &dnf {
                    may_stop |= !term.strong;
                    let next: Vec<u32> =
                        term.atoms.iter().map(|&cl| afw.state_index(cl)).collect();
                    let id = intern(sorted(next), &mut sets, &mut trans, &mut labels);
                    if !succs.contains(&id) {
                        succs.push(id);
                    }
                }
                if may_stop {
                    succs.push(NFW_ACCEPT);
                }
                succs.sort_unstable();
                trans[state as usize][sym as usize] = succs;
            }
            done += 1;
        }

        Nfw { vars: afw.vars().clone(), trans, initial, labels }
    }

    /// Compiles a formula via the alternating automaton.
    pub fn compile(formula: &Formula, vars: &VarSet) -> Result<Nfw, VarSetError> {
        Ok(Nfw::from_afw(&Afw::compile(formula, vars)?))
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

    pub fn is_accepting(&self, state: u32) -> bool {
        state == NFW_ACCEPT
    }

    pub fn successors(&self, state: u32, sym: u32) -> &[u32] {
        &self.trans[state as usize][sym as usize]
    }

    pub fn state_label(&self, state: u32) -> &str {
        &self.labels[state as usize]
    }

    /// Runs the automaton on a word of symbol masks.
    pub fn accepts_masks(&self, word: &[u32]) -> bool {
        let mut current = vec![false; self.trans.len()];
        for &s in &self.initial {
            current[s as usize] = true;
        }
        for &sym in word {
            let mut next = vec![false; self.trans.len()];
            for (s, &active) in current.iter().enumerate() {
                if active {
                    for &t in &self.trans[s][sym as usize] {
                        next[t as usize] = true;
                    }
                }
            }
            current = next;
        }
        current[NFW_ACCEPT as usize]
    }

    /// Runs the automaton on a trace of valuations.
    pub fn accepts(&self, trace: &[Valuation]) -> Result<bool, VarSetError> {
        Ok(self.accepts_masks(&self.vars.masks_of(trace)?))
    }

    /// Renders the automaton in the textual dump format.
    pub fn dump(&self) -> String {
        let mut out = format!("alphabet: {}\n", self.vars);
        for s in 0..self.trans.len() as u32 {
            let mut line = format!("state {s}");
            if self.initial.contains(&s) {
                line.push_str(" initial");
            }
            if s == NFW_ACCEPT {
                line.push_str(" final");
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

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

fn label_of(set: &[u32], afw: &Afw) -> String {
    if set.is_empty() {
        return "{}".to_string();
    }
    let parts: Vec<String> =
        set.iter().map(|&ix| afw.state_formula(ix as usize).to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlf::{parse_formula, parse_trace};

    fn nfw(src: &str, vars: &[&str]) -> Nfw {
        let f = parse_formula(src).unwrap();
        let vs = VarSet::new(vars.iter().copied()).unwrap();
        Nfw::compile(&f, &vs).unwrap()
    }

    fn run(a: &Nfw, trace: &str) -> bool {
        a.accepts(&parse_trace(trace).unwrap()).unwrap()
    }

    #[test]
    fn accepting_state_has_no_outgoing_transitions() {
        let a = nfw("<true*> p", &["p"]);
        for sym in 0..a.vars().symbol_count() as u32 {
            assert!(a.successors(NFW_ACCEPT, sym).is_empty());
        }
    }

    #[test]
    fn eventually_p() {
        let a = nfw("<true*> p", &["p"]);
        assert!(!run(&a, ""));
        assert!(!run(&a, "-"));
        assert!(run(&a, "p"));
        assert!(run(&a, "- ; - ; p"));
        assert!(run(&a, "p ; -"));
        assert!(!run(&a, "- ; -"));
    }

    #[test]
    fn always_p() {
        let a = nfw("[true*] p", &["p"]);
        assert!(run(&a, ""));
        assert!(run(&a, "p ; p"));
        assert!(!run(&a, "p ; -"));
        assert!(!run(&a, "- ; p"));
    }

    #[test]
    fn single_strong_step() {
        // <true> tt requires a step to a real position, so it needs at
        // least two of them; [true] ff says the current position is the
        // last one.
        let a = nfw("<true> tt", &["p"]);
        assert!(!run(&a, ""));
        assert!(!run(&a, "-"));
        assert!(run(&a, "- ; -"));
        assert!(run(&a, "p ; p ; p"));
        let b = nfw("[true] ff", &["p"]);
        assert!(run(&b, ""));
        assert!(run(&b, "-"));
        assert!(!run(&b, "- ; -"));
    }

    #[test]
    fn empty_word_initial_acceptance() {
        let a = nfw("!p", &["p"]);
        assert!(a.initial().contains(&NFW_ACCEPT));
        assert!(run(&a, ""));
        assert!(!run(&a, "p"));
        assert!(run(&a, "-"));
    }

    #[test]
    fn sequences_and_tests() {
        // Both steps of the sequence must land on real positions, so the
        // word needs a third position after them.
        let a = nfw("<p ; q> tt", &["p", "q"]);
        assert!(!run(&a, "p ; q"));
        assert!(run(&a, "p ; q ; -"));
        assert!(!run(&a, "p ; p ; -"));
        assert!(!run(&a, "p"));

        let b = nfw("<{p}? ; true> q", &["p", "q"]);
        assert!(run(&b, "p ; q"));
        assert!(!run(&b, "q ; q"));
    }
}
