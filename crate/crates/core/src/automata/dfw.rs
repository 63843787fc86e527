//! Deterministic finite-word automata via the subset construction.

use std::collections::HashMap;

use crate::ldlf::{Formula, Lasso, Valuation, VarSet, VarSetError};

use super::nfw::{Nfw, NFW_ACCEPT};

/// A deterministic, total finite-word automaton. State 0 is initial.
#[derive(Debug, Clone)]
pub struct Dfw {
    vars: VarSet,
    /// `trans[state][symbol]`, total.
    trans: Vec<Vec<u32>>,
    finals: Vec<bool>,
    /// Subset labels for dumps.
    labels: Vec<String>,
}

impl Dfw {
    /// Determinizes a word automaton by the subset construction, keeping
    /// only reachable subsets. The empty subset, when reachable, is the
    /// rejecting sink.
    pub fn determinize(nfw: &Nfw) -> Dfw {
        let nsym = nfw.vars().symbol_count();
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut subsets: Vec<Vec<u32>> = Vec::new();
        let mut trans: Vec<Vec<u32>> = Vec::new();

        let init: Vec<u32> = nfw.initial().to_vec();
        ids.insert(init.clone(), 0);
        subsets.push(init);

        let mut done = 0usize;
        while done < subsets.len() {
            let current = subsets[done].clone();
            let mut row = Vec::with_capacity(nsym);
            for sym in 0..nsym as u32 {
                let mut next: Vec<u32> = Vec::new();
                for &s in &current {
                    for &t in nfw.successors(s, sym) {
                        if !next.contains(&t) {
                            next.push(t);
                        }
                    }
                }
                next.sort_unstable();
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len() as u32;
                        ids.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                row.push(id);
            }
            trans.push(row);
            done += 1;
        }

        let finals: Vec<bool> =
            subsets.iter().map(|set| set.contains(&NFW_ACCEPT)).collect();
        let labels: Vec<String> = subsets
            .iter()
            .map(|set| {
                if set.is_empty() {
                    "{}".to_string()
                } else {
                    let parts: Vec<String> = set.iter().map(|s| s.to_string()).collect();
                    format!("{{{}}}", parts.join(","))
                }
            })
            .collect();
        Dfw { vars: nfw.vars().clone(), trans, finals, labels }
    }

    /// Compiles a formula down to a deterministic word automaton.
    pub fn compile(formula: &Formula, vars: &VarSet) -> Result<Dfw, VarSetError> {
        Ok(Dfw::determinize(&Nfw::compile(formula, vars)?))
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn is_final(&self, state: u32) -> bool {
        self.finals[state as usize]
    }

    pub fn step(&self, state: u32, sym: u32) -> u32 {
        self.trans[state as usize][sym as usize]
    }

    pub fn state_label(&self, state: u32) -> &str {
        &self.labels[state as usize]
    }

    /// Runs on a word of symbol masks and reports acceptance.
    pub fn accepts_masks(&self, word: &[u32]) -> bool {
        let mut s = 0u32;
        for &sym in word {
            s = self.step(s, sym);
        }
        self.is_final(s)
    }

    /// Runs on a trace of valuations and reports acceptance.
    pub fn accepts(&self, trace: &[Valuation]) -> Result<bool, VarSetError> {
        Ok(self.accepts_masks(&self.vars.masks_of(trace)?))
    }

    /// The length of the shortest prefix of the lasso the automaton
    /// accepts, if any — including the empty prefix. Termination: once a
    /// (cycle position, state) pair repeats, no new prefixes can be
    /// accepted.
    pub fn first_accepting_prefix(&self, lasso: &Lasso) -> Result<Option<usize>, VarSetError> {
        let prefix = self.vars.masks_of(lasso.prefix())?;
        let cycle = self.vars.masks_of(lasso.cycle())?;
        let mut s = 0u32;
        if self.is_final(s) {
            return Ok(Some(0));
        }
        for (n, &sym) in prefix.iter().enumerate() {
            s = self.step(s, sym);
            if self.is_final(s) {
                return Ok(Some(n + 1));
            }
        }
        let mut seen = vec![false; cycle.len() * self.trans.len()];
        let mut pos = 0usize;
        let mut n = prefix.len();
        loop {
            let key = pos * self.trans.len() + s as usize;
            if seen[key] {
                return Ok(None);
            }
            seen[key] = true;
            s = self.step(s, cycle[pos]);
            n += 1;
            if self.is_final(s) {
                return Ok(Some(n));
            }
            pos = (pos + 1) % cycle.len();
        }
    }

    /// A copy in which final states absorb: once a final state is reached,
    /// every extension of the word remains accepted. This turns the
    /// automaton into a detector of "some accepted prefix so far".
    pub fn with_absorbing_finals(&self) -> Dfw {
        let mut trans = self.trans.clone();
        for (s, row) in trans.iter_mut().enumerate() {
            if self.finals[s] {
                for target in row.iter_mut() {
                    *target = s as u32;
                }
            }
        }
        Dfw {
            vars: self.vars.clone(),
            trans,
            finals: self.finals.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Renders the automaton in the textual dump format.
    pub fn dump(&self) -> String {
        let mut out = format!("alphabet: {}\n", self.vars);
        for s in 0..self.trans.len() as u32 {
            let mut line = format!("state {s}");
            if s == 0 {
                line.push_str(" initial");
            }
            if self.finals[s as usize] {
                line.push_str(" final");
            }
            line.push_str(&format!("  # {}", self.labels[s as usize]));
            out.push_str(&line);
            out.push('\n');
        }
        for (s, row) in self.trans.iter().enumerate() {
            for (sym, &t) in row.iter().enumerate() {
                out.push_str(&format!(
                    "trans {s} {} {t}\n",
                    self.vars.format_mask(sym as u32)
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldlf::{parse_formula, parse_lasso, parse_trace};

    fn dfw(src: &str, vars: &[&str]) -> Dfw {
        let f = parse_formula(src).unwrap();
        let vs = VarSet::new(vars.iter().copied()).unwrap();
        Dfw::compile(&f, &vs).unwrap()
    }

    #[test]
    fn eventually_p_determinizes_to_two_states() {
        let a = dfw("<true*> p", &["p"]);
        assert_eq!(a.state_count(), 2);
        assert!(!a.accepts(&parse_trace("").unwrap()).unwrap());
        assert!(a.accepts(&parse_trace("- ; p").unwrap()).unwrap());
        assert!(!a.accepts(&parse_trace("- ; -").unwrap()).unwrap());
    }

    #[test]
    fn agreement_with_direct_evaluation() {
        use crate::ldlf::eval_trace;
        let formulas = [
            "<true*> p",
            "[true*] (p || q)",
            "<p ; q> tt",
            "<(p)*> (q && [true] ff)",
            "[{p}?] ff",
            "!(p && <true> q)",
            "<{<true> p}?> q",
        ];
        let vs = VarSet::new(["p", "q"]).unwrap();
        for src in formulas {
            let f = parse_formula(src).unwrap();
            let a = Dfw::compile(&f, &vs).unwrap();
            // All traces over {p, q} up to length 4.
            for len in 0..=4usize {
                let mut word = vec![0u32; len];
                loop {
                    let trace: Vec<_> =
                        word.iter().map(|&m| vs.valuation_of(m)).collect();
                    assert_eq!(
                        a.accepts_masks(&word),
                        eval_trace(&f, &trace),
                        "mismatch on {src} over {trace:?}"
                    );
                    // Next word in lexicographic order.
                    let mut i = 0;
                    loop {
                        if i == len {
                            break;
                        }
                        word[i] += 1;
                        if word[i] < 4 {
                            break;
                        }
                        word[i] = 0;
                        i += 1;
                    }
                    if i == len {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn first_accepting_prefix_on_lassos() {
        let a = dfw("<true*> p", &["p"]);
        let l = parse_lasso("- ; - | p").unwrap();
        assert_eq!(a.first_accepting_prefix(&l).unwrap(), Some(3));
        let never = parse_lasso("| -").unwrap();
        assert_eq!(a.first_accepting_prefix(&never).unwrap(), None);
        // The empty prefix counts.
        let b = dfw("[true*] p", &["p"]);
        let l2 = parse_lasso("| -").unwrap();
        assert_eq!(b.first_accepting_prefix(&l2).unwrap(), Some(0));
    }

    #[test]
    fn absorbing_finals_preserve_acceptance_onset() {
        let a = dfw("<p> q", &["p", "q"]).with_absorbing_finals();
        // Once a prefix is accepted, longer extensions stay accepted.
        assert!(a.accepts(&parse_trace("p ; q").unwrap()).unwrap());
        assert!(a.accepts(&parse_trace("p ; q ; - ; -").unwrap()).unwrap());
        assert!(!a.accepts(&parse_trace("p ; p").unwrap()).unwrap());
    }
}
