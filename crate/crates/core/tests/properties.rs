//! Randomized cross-checks between the direct formula semantics, the
//! compiled finite-word automata, and the infinite-word acceptors built
//! from them.  Each property pits two independent implementations of the
//! same question against each other on generated inputs.

use proptest::prelude::*;

use ldlf_games::automata::{formula_acceptor, qpldl_acceptor, Dfw, Nfw};
use ldlf_games::ldlf::{
    eval_goal, eval_qpldl, eval_trace, is_nnf, nnf, parse_formula, Formula, Goal, Lasso, PathExpr,
    PropFormula, QFormula, Valuation, VarSet,
};

fn vars_pq() -> VarSet {
    VarSet::new(["p", "q"]).unwrap()
}

fn arb_prop() -> BoxedStrategy<PropFormula> {
    let leaf = prop_oneof![
        Just(PropFormula::True),
        Just(PropFormula::False),
        Just(PropFormula::atom("p")),
        Just(PropFormula::atom("q")),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(PropFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PropFormula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| PropFormula::or(a, b)),
        ]
    })
    .boxed()
}

fn arb_formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
    ]
    .boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = arb_formula(depth - 1);
    let path = arb_path(depth - 1);
    prop_oneof![
        leaf,
        sub.clone().prop_map(Formula::not),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::and(a, b)),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::or(a, b)),
        (path.clone(), sub.clone()).prop_map(|(p, f)| Formula::diamond(p, f)),
        (path, sub).prop_map(|(p, f)| Formula::boxed(p, f)),
    ]
    .boxed()
}

fn arb_path(depth: u32) -> BoxedStrategy<PathExpr> {
    let leaf = arb_prop().prop_map(PathExpr::prop).boxed();
    if depth == 0 {
        return leaf;
    }
    let sub = arb_path(depth - 1);
    prop_oneof![
        leaf,
        arb_formula(depth - 1).prop_map(PathExpr::test),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| PathExpr::choice(a, b)),
        (sub.clone(), sub.clone()).prop_map(|(a, b)| PathExpr::seq(a, b)),
        sub.clone().prop_map(PathExpr::star),
        (sub, 0u32..3).prop_map(|(p, n)| PathExpr::power(p, n)),
    ]
    .boxed()
}

fn trace_of(masks: &[u32]) -> Vec<Valuation> {
    let vars = vars_pq();
    masks.iter().map(|&m| vars.valuation_of(m)).collect()
}

fn lasso_of(prefix: &[u32], cycle: &[u32]) -> Lasso {
    Lasso::new(trace_of(prefix), trace_of(cycle)).unwrap()
}

/// The first `k` letters of `prefix · cycle^ω`, as masks.
fn unroll(prefix: &[u32], cycle: &[u32], k: usize) -> Vec<u32> {
    (0..k)
        .map(|i| {
            if i < prefix.len() {
                prefix[i]
            } else {
                cycle[(i - prefix.len()) % cycle.len()]
            }
        })
        .collect()
}

proptest! {
    /// The nondeterministic and deterministic compilations accept exactly
    /// the traces the direct evaluator satisfies.
    #[test]
    fn automata_agree_with_direct_evaluation(
        f in arb_formula(3),
        masks in proptest::collection::vec(0u32..4, 0..6),
    ) {
        let vars = vars_pq();
        let direct = eval_trace(&f, &trace_of(&masks));
        let nfw = Nfw::compile(&f, &vars).unwrap();
        let dfw = Dfw::compile(&f, &vars).unwrap();
        prop_assert_eq!(nfw.accepts_masks(&masks), direct);
        prop_assert_eq!(dfw.accepts_masks(&masks), direct);
    }

    /// The infinite-word lift accepts a lasso exactly when some finite
    /// prefix is accepted, and such a prefix always exists within
    /// `|prefix| + |cycle| * |DFW|` letters: past that point the pair
    /// (position in the cycle, DFW state) must repeat.
    #[test]
    fn lift_matches_prefix_enumeration_within_its_bound(
        f in arb_formula(3),
        prefix in proptest::collection::vec(0u32..4, 0..4),
        cycle in proptest::collection::vec(0u32..4, 1..4),
    ) {
        let vars = vars_pq();
        let dfw = Dfw::compile(&f, &vars).unwrap();
        let bound = prefix.len() + cycle.len() * dfw.state_count();
        let accepted_k: Option<usize> = (0..=bound)
            .find(|&k| dfw.accepts_masks(&unroll(&prefix, &cycle, k)));
        let lift = formula_acceptor(&f, &vars).unwrap();
        let lasso = lasso_of(&prefix, &cycle);
        prop_assert_eq!(lift.accepts_lasso(&lasso).unwrap(), accepted_k.is_some());
        // Nothing new appears past the bound: a longer scan agrees.
        let longer: Option<usize> = (0..=2 * bound + 4)
            .find(|&k| dfw.accepts_masks(&unroll(&prefix, &cycle, k)));
        prop_assert_eq!(accepted_k.is_some(), longer.is_some());
    }

    /// `E phi` on a lasso means some finite prefix satisfies `phi`; the
    /// enumeration oracle scans prefixes up to the lift bound.
    #[test]
    fn exists_quantifier_matches_prefix_enumeration(
        f in arb_formula(3),
        prefix in proptest::collection::vec(0u32..4, 0..4),
        cycle in proptest::collection::vec(0u32..4, 1..4),
    ) {
        let vars = vars_pq();
        let bound = prefix.len() + cycle.len() * Dfw::compile(&f, &vars).unwrap().state_count();
        let oracle = (0..=bound)
            .any(|k| eval_trace(&f, &trace_of(&unroll(&prefix, &cycle, k))));
        let q = QFormula::exists(f);
        prop_assert_eq!(eval_qpldl(&q, &lasso_of(&prefix, &cycle)), oracle);
    }

    /// `A phi` holds exactly when no prefix satisfies `!phi`, i.e. every
    /// prefix satisfies `phi`; scanning up to the bound for `!phi` decides
    /// the infinite conjunction.
    #[test]
    fn forall_quantifier_matches_prefix_enumeration(
        f in arb_formula(3),
        prefix in proptest::collection::vec(0u32..4, 0..4),
        cycle in proptest::collection::vec(0u32..4, 1..4),
    ) {
        let vars = vars_pq();
        let negated = Formula::not(f.clone());
        let bound =
            prefix.len() + cycle.len() * Dfw::compile(&negated, &vars).unwrap().state_count();
        let oracle = (0..=bound)
            .all(|k| eval_trace(&f, &trace_of(&unroll(&prefix, &cycle, k))));
        let q = QFormula::forall(f);
        prop_assert_eq!(eval_qpldl(&q, &lasso_of(&prefix, &cycle)), oracle);
    }

    /// The quantified acceptors agree with the evaluator, and the two
    /// quantifiers are dual through negation.
    #[test]
    fn quantified_acceptors_agree_and_dualize(
        f in arb_formula(3),
        prefix in proptest::collection::vec(0u32..4, 0..4),
        cycle in proptest::collection::vec(0u32..4, 1..4),
    ) {
        let vars = vars_pq();
        let lasso = lasso_of(&prefix, &cycle);
        let all = QFormula::forall(f.clone());
        let none_of_negation = QFormula::exists(Formula::not(f.clone()));
        prop_assert_eq!(
            eval_qpldl(&all, &lasso),
            !eval_qpldl(&none_of_negation, &lasso)
        );
        for q in [QFormula::exists(f.clone()), all] {
            let acc = qpldl_acceptor(&q, &vars).unwrap();
            prop_assert_eq!(acc.accepts_lasso(&lasso).unwrap(), eval_qpldl(&q, &lasso));
        }
        // A plain goal is read existentially.
        prop_assert_eq!(
            eval_goal(&Goal::Plain(f.clone()), &lasso),
            eval_goal(&Goal::Quantified(QFormula::exists(f)), &lasso)
        );
    }

    /// Negation normal form preserves the trace semantics and lands in
    /// normal form.
    #[test]
    fn negation_normal_form_preserves_evaluation(
        f in arb_formula(3),
        masks in proptest::collection::vec(0u32..4, 0..6),
    ) {
        let g = nnf(&f);
        prop_assert!(is_nnf(&g));
        let trace = trace_of(&masks);
        prop_assert_eq!(eval_trace(&g, &trace), eval_trace(&f, &trace));
    }

    /// Printing any formula yields text the parser turns back into the
    /// same tree.
    #[test]
    fn printed_formulas_parse_back(f in arb_formula(3)) {
        let printed = f.to_string();
        let reparsed = parse_formula(&printed);
        prop_assert_eq!(reparsed.as_ref().ok(), Some(&f), "printed as {}", printed);
    }
}
