//! Reactive synthesis as an equilibrium question.
//!
//! Whether a controller of the output variables can always drive a play
//! to satisfy a spec, whatever the inputs do, reduces to Nash existence
//! in a four-player game:
//!
//! * an *agent* owning the outputs, whose goal is `E spec`;
//! * an *environment* owning the inputs, whose goal is `A !spec`;
//! * two *penny* players owning one fresh variable each, playing
//!   matching pennies softened by the spec: the first wants `spec` or the
//!   pennies to agree at the first round, the second wants `spec` or the
//!   pennies to disagree.
//!
//! On a play violating `E spec`, exactly one penny player loses and can
//! profit by flipping its opening move, so no such play is stable.  On a
//! play satisfying it only the environment loses, and its deviations are
//! fruitless exactly when the agent's strategy forces `E spec` against
//! every input behaviour.  The game therefore has an equilibrium if and
//! only if the spec is realizable for the outputs.

use std::collections::BTreeSet;

use crate::game::{Game, GameError, Module, Player};
use crate::ldlf::{Formula, Goal, PathExpr, PropFormula, QFormula};

/// The two penny variables the construction adds.
const PENNIES: [&str; 2] = ["p", "q"];

/// Error building a synthesis game.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("variable `{0}` is reserved for the construction's penny players")]
    ReservedVariable(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Builds the game whose Nash equilibria mark `spec` as realizable: the
/// outputs can be controlled to satisfy `E spec` against every input
/// behaviour exactly when the game has one.  The spec must not mention
/// the reserved penny variables, and neither may the variable lists; the
/// output list may be empty, in which case realizability degenerates to
/// the inputs being unable to avoid the spec on their own.
pub fn build_synthesis_game(
    spec: &Formula,
    outputs: &[String],
    inputs: &[String],
) -> Result<Game, SynthesisError> {
    for reserved in PENNIES {
        if outputs.iter().any(|x| x == reserved)
            || inputs.iter().any(|x| x == reserved)
            || spec.atoms().contains(reserved)
        {
            return Err(SynthesisError::ReservedVariable(reserved.to_string()));
        }
    }
    let free = |name: &str, vars: &[String]| {
        Module::free(name, vars.iter().cloned().collect::<BTreeSet<String>>())
    };
    let penny = |name: &str, var: &str| {
        Module::free(name, BTreeSet::from([var.to_string()]))
    };
    let p = || PropFormula::atom(PENNIES[0]);
    let q = || PropFormula::atom(PENNIES[1]);
    // "The pennies agree (disagree) at the first round", written as a
    // single modal step so it demands a first round: a bare propositional
    // formula would be vacuously satisfied on the empty prefix, where
    // both `!p` and `!q` hold, and the dichotomy between the two penny
    // players would collapse.
    let at_first_round =
        |c: PropFormula| Formula::diamond(PathExpr::prop(c), Formula::True);
    let agree = PropFormula::or(
        PropFormula::and(p(), q()),
        PropFormula::and(PropFormula::not(p()), PropFormula::not(q())),
    );
    let differ = PropFormula::not(agree.clone());
    let agree = at_first_round(agree);
    let differ = at_first_round(differ);
    let exists = |f: Formula| Goal::Quantified(QFormula::exists(f));
    let players = vec![
        Player {
            module: free("agent", outputs),
            goal: exists(spec.clone()),
        },
        Player {
            module: free("environment", inputs),
            goal: Goal::Quantified(QFormula::forall(Formula::not(spec.clone()))),
        },
        Player {
            module: penny("penny-p", PENNIES[0]),
            goal: exists(Formula::or(spec.clone(), agree)),
        },
        Player {
            module: penny("penny-q", PENNIES[1]),
            goal: exists(Formula::or(spec.clone(), differ)),
        },
    ];
    Ok(Game::new("synthesis", players)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::solve::ne_nonemptiness;
    use crate::ldlf::parse_formula;

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn the_construction_adds_the_penny_players() {
        let spec = parse_formula("<true*> x").unwrap();
        let game = build_synthesis_game(&spec, &names(&["x"]), &names(&["y"])).unwrap();
        assert_eq!(game.player_count(), 4);
        let all = game.vars().names();
        for v in ["x", "y", "p", "q"] {
            assert!(all.iter().any(|n| n == v), "missing variable {v}");
        }
        // The pennies are one-variable free modules.
        assert_eq!(game.module(2).controls, BTreeSet::from(["p".to_string()]));
        assert_eq!(game.module(3).controls, BTreeSet::from(["q".to_string()]));
    }

    #[test]
    fn penny_names_are_reserved() {
        let spec = parse_formula("x").unwrap();
        let clash = build_synthesis_game(&spec, &names(&["p"]), &names(&[]));
        assert!(matches!(clash, Err(SynthesisError::ReservedVariable(v)) if v == "p"));
        let spec = parse_formula("x && q").unwrap();
        let clash = build_synthesis_game(&spec, &names(&["x"]), &names(&[]));
        assert!(matches!(clash, Err(SynthesisError::ReservedVariable(v)) if v == "q"));
    }

    #[test]
    fn realizable_specs_make_the_game_solvable() {
        // The agent owns x and must eventually raise it: realizable, so
        // the game has an equilibrium.
        let spec = parse_formula("<true*> x").unwrap();
        let game = build_synthesis_game(&spec, &names(&["x"]), &names(&["y"])).unwrap();
        assert!(ne_nonemptiness(&game).is_some());
    }

    #[test]
    fn unrealizable_specs_make_the_game_empty() {
        // The environment owns y and simply keeps it down forever: with
        // no outputs at all, the spec cannot be forced.
        let spec = parse_formula("<true*> y").unwrap();
        let game = build_synthesis_game(&spec, &names(&[]), &names(&["y"])).unwrap();
        assert!(ne_nonemptiness(&game).is_none());
    }
}
