//! End-to-end tests of the command-line interface: the exit-code contract,
//! the output shapes, and the round trip from a solver witness back through
//! the profile checker, all driven over the shipped fixture files.

use std::path::PathBuf;
use std::process::{Command, Output};

use ldlf_games::equilibria::{extract_profile, ne_membership, NashWitness};
use ldlf_games::game::parse_game;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ldlf-games"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("the binary should run")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("the binary should exit, not die on a signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn game_arg(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn eval_reports_satisfaction_through_exit_codes() {
    // The empty-prefix reading: on a play whose first valuation is empty,
    // both a formula and its negation can hold, each on a different prefix.
    let yes = run(&["eval", "--formula", "<true*> p", "--lasso", "| ;p"]);
    assert_eq!(code(&yes), 0, "{}", stderr(&yes));
    assert_eq!(stdout(&yes).trim(), "satisfied");

    let also_yes = run(&["eval", "--formula", "!(<true*> p)", "--lasso", "| ;p"]);
    assert_eq!(code(&also_yes), 0);

    let no = run(&["eval", "--formula", "p", "--trace", ""]);
    assert_eq!(code(&no), 1);
    assert_eq!(stdout(&no).trim(), "not satisfied");

    let bad = run(&["eval", "--formula", "p &&", "--trace", "p"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("error:"), "{}", stderr(&bad));

    // --trace and --lasso are mutually exclusive and one is required.
    assert_eq!(code(&run(&["eval", "--formula", "p", "--trace", "p", "--lasso", "| p"])), 2);
    assert_eq!(code(&run(&["eval", "--formula", "p"])), 2);
}

#[test]
fn eval_emits_json_documents() {
    let out = run(&["--json", "eval", "--formula", "p", "--trace", "p"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON output");
    assert_eq!(doc, serde_json::json!({ "satisfied": true }));
}

#[test]
fn check_accepts_the_file_sharing_profiles() {
    for n in [1, 2] {
        let game = game_arg(&format!("file_sharing_n{n}.game"));
        let profile = game_arg(&format!("file_sharing_n{n}.strat"));
        let out = run(&["check", "--game", &game, "--profile", &profile]);
        assert_eq!(code(&out), 0, "n={n}: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains("yes"), "{text}");
        assert!(text.contains("winners: 0, 1, 2"), "{text}");
    }
}

#[test]
fn check_rejects_a_premature_mark_with_the_deviator() {
    let out = run(&[
        "check",
        "--game",
        &game_arg("file_sharing_n1.game"),
        "--profile",
        &game_arg("file_sharing_n1_premature.strat"),
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("player 0"), "{text}");
    assert!(text.contains("deviation:"), "{text}");
}

#[test]
fn check_distinguishes_parse_errors_from_incompatibility() {
    // A game file is not profile syntax: parse error, exit 2.
    let garbled = run(&[
        "check",
        "--game",
        &game_arg("toggle.game"),
        "--profile",
        &game_arg("toggle.game"),
    ]);
    assert_eq!(code(&garbled), 2);

    // A well-formed profile that fights the game's modules: exit 3.
    let stuck = run(&[
        "check",
        "--game",
        &game_arg("toggle.game"),
        "--profile",
        &game_arg("toggle_stuck.strat"),
    ]);
    assert_eq!(code(&stuck), 3);
    assert!(stderr(&stuck).contains("incompatible"), "{}", stderr(&stuck));
}

#[test]
fn solve_reports_equilibria_and_their_winners() {
    let pq = run(&["solve", "--game", &game_arg("pq.game")]);
    assert_eq!(code(&pq), 0, "{}", stderr(&pq));
    assert!(stdout(&pq).contains("winners: 0, 1"), "{}", stdout(&pq));

    let toggle = run(&["solve", "--game", &game_arg("toggle.game")]);
    assert_eq!(code(&toggle), 0);
    let text = stdout(&toggle);
    assert!(text.contains("winners: 1"), "{text}");
    assert!(text.contains("goals: 0:no 1:yes"), "{text}");
    assert!(text.contains("punishment against player 0:"), "{text}");

    let sharing = run(&["solve", "--game", &game_arg("file_sharing_n1.game")]);
    assert_eq!(code(&sharing), 0);
    assert!(stdout(&sharing).contains("winners: 0, 1, 2"), "{}", stdout(&sharing));

    assert_eq!(code(&run(&["solve", "--game", "no-such-file.game"])), 2);
}

#[test]
fn strong_equilibria_of_the_favor_game_start_with_both_favors() {
    let out = run(&["--json", "solve", "--game", &game_arg("pq.game"), "--strong"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let w = NashWitness::from_json(&stdout(&out)).expect("witness JSON");
    assert_eq!(w.winners, vec![0, 1]);
    let first = w.prefix.first().or_else(|| w.cycle.first()).expect("nonempty play");
    assert!(first.contains(&"p".to_string()) && first.contains(&"q".to_string()));
}

#[test]
fn restricted_solve_modes_and_their_flags() {
    let memoryless = run(&["solve", "--game", &game_arg("pq.game"), "--memoryless"]);
    assert_eq!(code(&memoryless), 0, "{}", stderr(&memoryless));

    let myopic = run(&["solve", "--game", &game_arg("pq.game"), "--myopic", "--bound", "2"]);
    assert_eq!(code(&myopic), 0, "{}", stderr(&myopic));

    // The first-round copy game has equilibria, but none that a blind
    // profile realizes, so the bounded myopic search comes back empty.
    let unknown = run(&[
        "solve",
        "--game",
        &game_arg("copy_first_input.game"),
        "--myopic",
        "--bound",
        "1",
    ]);
    assert_eq!(code(&unknown), 4);
    assert!(stdout(&unknown).contains("unknown"), "{}", stdout(&unknown));

    // Mode flags are mutually exclusive; --myopic needs --bound >= 1.
    let pq = game_arg("pq.game");
    assert_eq!(code(&run(&["solve", "--game", &pq, "--strong", "--myopic", "--bound", "1"])), 2);
    assert_eq!(code(&run(&["solve", "--game", &pq, "--myopic"])), 2);
    assert_eq!(code(&run(&["solve", "--game", &pq, "--myopic", "--bound", "0"])), 2);
    assert_eq!(code(&run(&["solve", "--game", &pq, "--bound", "3"])), 2);
}

#[test]
fn solver_witnesses_round_trip_through_the_checker() {
    for (name, strong) in [
        ("file_sharing_n1.game", false),
        ("toggle.game", false),
        ("pq.game", true),
    ] {
        let mut args = vec!["--json", "solve", "--game"];
        let path = game_arg(name);
        args.push(&path);
        if strong {
            args.push("--strong");
        }
        let out = run(&args);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        let witness = NashWitness::from_json(&stdout(&out)).expect("witness JSON");

        let text = std::fs::read_to_string(fixture(name)).expect("fixture exists");
        let game = parse_game(&text).expect("fixture parses");
        let profile = extract_profile(&game, &witness).expect("witness yields a profile");
        let verdict = ne_membership(&game, &profile);
        assert!(verdict.is_yes(), "{name}: extracted profile is not an equilibrium");
    }
}

#[test]
fn condition_search_and_its_universal_dual() {
    let pq = game_arg("pq.game");

    // Some equilibrium play keeps p off at the first round...
    let found = run(&["enash", "--game", &pq, "--formula", "A !p"]);
    assert_eq!(code(&found), 0, "{}", stderr(&found));

    // ...no play at all satisfies a first-round contradiction...
    let none = run(&["enash", "--game", &pq, "--formula", "A (p && !p)"]);
    assert_eq!(code(&none), 1);
    assert!(stdout(&none).contains("no equilibrium found"), "{}", stdout(&none));

    // ...and conditions must parse and speak the game's vocabulary.
    assert_eq!(code(&run(&["enash", "--game", &pq, "--formula", "p &&"])), 2);
    assert_eq!(code(&run(&["enash", "--game", &pq, "--formula", "z"])), 2);

    let holds = run(&["anash", "--game", &pq, "--formula", "E tt"]);
    assert_eq!(code(&holds), 0);
    assert!(stdout(&holds).contains("holds"), "{}", stdout(&holds));

    // Not every equilibrium play opens with p; the counterexample witness
    // embedded in the JSON document is itself a full equilibrium witness.
    let fails = run(&["--json", "anash", "--game", &pq, "--formula", "p"]);
    assert_eq!(code(&fails), 1);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&fails)).expect("JSON output");
    assert_eq!(doc["holds"], serde_json::json!(false));
    let witness = NashWitness::from_json(&doc["counterexample"].to_string())
        .expect("embedded witness parses");
    assert_eq!(witness.game, "mutual-favors");
}

#[test]
fn synthesized_games_parse_back_and_decide_realizability() {
    let out = run(&[
        "synth-game",
        "--formula",
        "(<y> x) || (<!y> !x)",
        "--outputs",
        "x",
        "--inputs",
        "y",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let game = parse_game(&stdout(&out)).expect("printed game parses");
    assert_eq!(game.player_count(), 4);
    let vars = game.vars();
    assert!(vars.names().iter().any(|v| v == "x"));
    assert!(vars.names().iter().any(|v| v == "y"));

    // An unsatisfiable specification is unrealizable, and its game has no
    // equilibrium at all: solve is the realizability check.
    let empty = run(&["synth-game", "--formula", "x && !x", "--outputs", "x", "--inputs", "y"]);
    assert_eq!(code(&empty), 0);
    let path = std::env::temp_dir().join(format!("unrealizable-{}.game", std::process::id()));
    std::fs::write(&path, stdout(&empty)).expect("temp game written");
    let solved = run(&["solve", "--game", &path.display().to_string()]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(code(&solved), 1);
    assert!(stdout(&solved).contains("no equilibrium found"), "{}", stdout(&solved));

    assert_eq!(code(&run(&["synth-game", "--formula", "<y x", "--outputs", "x", "--inputs", "y"])), 2);
    assert_eq!(code(&run(&["synth-game", "--formula", "x", "--outputs", "x"])), 2);
}
