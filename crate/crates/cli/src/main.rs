//! Command-line front end for the equilibrium toolkit: formula evaluation,
//! profile checking, and the equilibrium searches, wired to text files and
//! exit codes so scripts and CI can drive them.
//!
//! Exit codes, uniform across commands:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | satisfied / equilibrium found / condition holds     |
//! | 1    | not satisfied / none exists / counterexample found  |
//! | 2    | usage, I/O, or parse error                          |
//! | 3    | profile does not fit the game                       |
//! | 4    | bounded myopic search exhausted without a verdict   |

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use ldlf_games::equilibria::{
    a_nash, build_synthesis_game, e_nash, memoryless_ne, myopic_ne, ne_membership,
    ne_nonemptiness, sne_nonemptiness, ANashOutcome, MyopicOutcome, NashWitness, NeVerdict,
};
use ldlf_games::game::{parse_game, Game};
use ldlf_games::ldlf::{
    eval_goal, eval_trace, parse_formula, parse_goal, parse_lasso, parse_trace,
};
use ldlf_games::strategy::{parse_profile, StrategyError};

#[derive(Parser)]
#[command(
    name = "ldlf-games",
    version,
    about = "Equilibrium analysis for multi-player games with LDL goals over finite traces"
)]
struct Cli {
    /// Print results as JSON documents instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula on a finite trace or on a lasso play.
    Eval(EvalArgs),
    /// Check whether a strategy profile is a Nash equilibrium of a game.
    Check(CheckArgs),
    /// Search a game for an equilibrium and print its witness.
    Solve(SolveArgs),
    /// Search for a Nash equilibrium whose play satisfies a condition.
    Enash(CondArgs),
    /// Check that a condition holds on every Nash equilibrium play.
    Anash(CondArgs),
    /// Print the four-player game whose Nash equilibria decide whether a
    /// specification is realizable for its output variables.
    SynthGame(SynthArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["trace", "lasso"])))]
struct EvalArgs {
    /// The formula; with --lasso it may carry an `E`/`A` prefix quantifier.
    #[arg(long)]
    formula: String,
    /// Finite trace literal: valuations separated by `;`, each a
    /// comma-separated variable list (`-` or blank for the empty one).
    #[arg(long)]
    trace: Option<String>,
    /// Lasso literal `prefix | cycle`, both sides in trace syntax.
    #[arg(long)]
    lasso: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Strategy profile file.
    #[arg(long)]
    profile: PathBuf,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").args(["strong", "memoryless", "myopic"])))]
struct SolveArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Look for a strong equilibrium: no coalition of losers can deviate
    /// together and win throughout.
    #[arg(long)]
    strong: bool,
    /// Restrict the search to memoryless profiles (moves depend on the
    /// current valuation only).
    #[arg(long)]
    memoryless: bool,
    /// Restrict the search to myopic profiles (each player follows a fixed
    /// word, blind to the others); requires --bound.
    #[arg(long, requires = "bound")]
    myopic: bool,
    /// Longest prefix and loop length tried by the myopic search.
    #[arg(long, requires = "myopic", value_parser = clap::value_parser!(u64).range(1..))]
    bound: Option<u64>,
}

#[derive(Args)]
struct CondArgs {
    /// Game file.
    #[arg(long)]
    game: PathBuf,
    /// Condition on the play, in goal syntax (optional `E`/`A` prefix;
    /// plain formulas are read existentially, like plain goals).
    #[arg(long)]
    formula: String,
}

#[derive(Args)]
struct SynthArgs {
    /// The specification the outputs must enforce.
    #[arg(long)]
    formula: String,
    /// Output variables, controlled by the agent (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    outputs: Vec<String>,
    /// Input variables, controlled by the environment (comma-separated).
    #[arg(long, value_delimiter = ',', required = true)]
    inputs: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval(args) => cmd_eval(&args, cli.json),
        Command::Check(args) => cmd_check(&args, cli.json),
        Command::Solve(args) => cmd_solve(&args, cli.json),
        Command::Enash(args) => cmd_enash(&args, cli.json),
        Command::Anash(args) => cmd_anash(&args, cli.json),
        Command::SynthGame(args) => cmd_synth_game(&args),
    }
}

/// Prints a diagnostic and returns the usage/parse exit code.
fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load_game(path: &PathBuf) -> Result<Game, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(format_args!("{}: {e}", path.display())))?;
    parse_game(&text).map_err(|e| fail(format_args!("{}: {e}", path.display())))
}

fn cmd_eval(args: &EvalArgs, json: bool) -> ExitCode {
    let satisfied = if let Some(text) = &args.trace {
        let formula = match parse_formula(&args.formula) {
            Ok(f) => f,
            Err(e) => return fail(format_args!("formula: {e}")),
        };
        let trace = match parse_trace(text) {
            Ok(t) => t,
            Err(e) => return fail(format_args!("trace: {e}")),
        };
        eval_trace(&formula, &trace)
    } else {
        let goal = match parse_goal(&args.formula) {
            Ok(g) => g,
            Err(e) => return fail(format_args!("formula: {e}")),
        };
        let lasso = match parse_lasso(args.lasso.as_deref().unwrap_or_default()) {
            Ok(l) => l,
            Err(e) => return fail(format_args!("lasso: {e}")),
        };
        eval_goal(&goal, &lasso)
    };
    if json {
        println!("{}", serde_json::json!({ "satisfied": satisfied }));
    } else {
        println!("{}", if satisfied { "satisfied" } else { "not satisfied" });
    }
    ExitCode::from(if satisfied { 0 } else { 1 })
}

fn cmd_check(args: &CheckArgs, json: bool) -> ExitCode {
    let game = match load_game(&args.game) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(&args.profile) {
        Ok(t) => t,
        Err(e) => return fail(format_args!("{}: {e}", args.profile.display())),
    };
    let profile = match parse_profile(&text, &game) {
        Ok(p) => p,
        // Malformed text is a parse error; a well-formed profile that does
        // not fit this game is an incompatibility.
        Err(e @ StrategyError::Parse(_)) => {
            return fail(format_args!("{}: {e}", args.profile.display()))
        }
        Err(e) => return incompatible(e, json),
    };
    match ne_membership(&game, &profile) {
        NeVerdict::Yes { winners, play } => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "verdict": "yes",
                        "winners": winners,
                        "play": play.to_string(),
                    })
                );
            } else {
                println!("yes: the profile is a Nash equilibrium");
                println!("winners: {}", list(&winners));
                println!("play: {play}");
            }
            ExitCode::from(0)
        }
        NeVerdict::No { winners, play, deviator, deviation } => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "verdict": "no",
                        "winners": winners,
                        "play": play.to_string(),
                        "deviator": deviator,
                        "deviation": deviation.to_string(),
                    })
                );
            } else {
                println!("no: player {deviator} has a profitable deviation");
                println!("winners: {}", list(&winners));
                println!("play: {play}");
                println!("deviation: {deviation}");
            }
            ExitCode::from(1)
        }
        NeVerdict::Error(e) => incompatible(e, json),
    }
}

/// Reports a profile/game mismatch and returns its dedicated exit code.
fn incompatible(e: StrategyError, json: bool) -> ExitCode {
    if json {
        println!(
            "{}",
            serde_json::json!({ "verdict": "error", "error": e.to_string() })
        );
    } else {
        eprintln!("incompatible profile: {e}");
    }
    ExitCode::from(3)
}

fn cmd_solve(args: &SolveArgs, json: bool) -> ExitCode {
    let game = match load_game(&args.game) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let witness = if args.strong {
        sne_nonemptiness(&game)
    } else if args.memoryless {
        memoryless_ne(&game).map(|(w, _)| w)
    } else if args.myopic {
        let bound = args.bound.expect("clap enforces --bound with --myopic") as usize;
        match myopic_ne(&game, bound) {
            MyopicOutcome::Found(w, _) => Some(w),
            MyopicOutcome::Unknown => {
                if json {
                    println!("\"unknown\"");
                } else {
                    println!(
                        "unknown: no myopic equilibrium with prefix and loop up to \
                         {bound}; a larger bound may still find one"
                    );
                }
                return ExitCode::from(4);
            }
        }
    } else {
        ne_nonemptiness(&game)
    };
    report_witness(witness, json)
}

fn cmd_enash(args: &CondArgs, json: bool) -> ExitCode {
    let game = match load_game(&args.game) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let condition = match parse_goal(&args.formula) {
        Ok(g) => g,
        Err(e) => return fail(format_args!("condition: {e}")),
    };
    match e_nash(&game, &condition) {
        Ok(witness) => report_witness(witness, json),
        Err(e) => fail(format_args!("condition: {e}")),
    }
}

fn cmd_anash(args: &CondArgs, json: bool) -> ExitCode {
    let game = match load_game(&args.game) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let condition = match parse_goal(&args.formula) {
        Ok(g) => g,
        Err(e) => return fail(format_args!("condition: {e}")),
    };
    match a_nash(&game, &condition) {
        Ok(ANashOutcome::Holds) => {
            if json {
                println!("{}", serde_json::json!({ "holds": true }));
            } else {
                println!("holds on every equilibrium play");
            }
            ExitCode::from(0)
        }
        Ok(ANashOutcome::Counterexample(w)) => {
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "holds": false,
                        "counterexample": serde_json::to_value(&w)
                            .expect("witness serialization cannot fail"),
                    })
                );
            } else {
                println!("fails on some equilibrium play; counterexample:");
                print!("{}", render_witness(&w));
            }
            ExitCode::from(1)
        }
        Err(e) => fail(format_args!("condition: {e}")),
    }
}

fn cmd_synth_game(args: &SynthArgs) -> ExitCode {
    let spec = match parse_formula(&args.formula) {
        Ok(f) => f,
        Err(e) => return fail(format_args!("formula: {e}")),
    };
    match build_synthesis_game(&spec, &args.outputs, &args.inputs) {
        Ok(game) => {
            print!("{game}");
            ExitCode::from(0)
        }
        Err(e) => fail(e),
    }
}

/// Prints a found/none search outcome: the witness document and exit 0, or
/// `null` (JSON) / a note (human) and exit 1.
fn report_witness(witness: Option<NashWitness>, json: bool) -> ExitCode {
    match witness {
        Some(w) => {
            if json {
                println!("{}", w.to_json());
            } else {
                print!("{}", render_witness(&w));
            }
            ExitCode::from(0)
        }
        None => {
            if json {
                println!("null");
            } else {
                println!("no equilibrium found");
            }
            ExitCode::from(1)
        }
    }
}

fn render_witness(w: &NashWitness) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "game: {}", w.game);
    let _ = writeln!(out, "winners: {}", list(&w.winners));
    let goals: Vec<String> = w
        .goals
        .iter()
        .enumerate()
        .map(|(i, sat)| format!("{i}:{}", if *sat { "yes" } else { "no" }))
        .collect();
    let _ = writeln!(out, "goals: {}", goals.join(" "));
    let _ = writeln!(out, "play: {}", play_string(&w.prefix, &w.cycle));
    for table in &w.punishments {
        let _ = writeln!(out, "punishment against player {}:", table.player);
        for entry in &table.moves {
            let response: Vec<&str> = entry.response.iter().map(String::as_str).collect();
            let _ = writeln!(
                out,
                "  at {}, tracker {} -> {}",
                entry.state,
                entry.tracker,
                if response.is_empty() { "-".to_string() } else { response.join(",") }
            );
        }
    }
    out
}

/// `prefix | cycle` in the syntax [`parse_lasso`] reads, built from the
/// witness's valuation lists.
fn play_string(prefix: &[Vec<String>], cycle: &[Vec<String>]) -> String {
    let side = |vals: &[Vec<String>]| {
        vals.iter()
            .map(|v| {
                if v.is_empty() {
                    "-".to_string()
                } else {
                    v.join(",")
                }
            })
            .collect::<Vec<String>>()
            .join(" ; ")
    };
    format!("{} | {}", side(prefix), side(cycle))
}

fn list(xs: &[usize]) -> String {
    if xs.is_empty() {
        return "none".to_string();
    }
    xs.iter().map(|x| x.to_string()).collect::<Vec<String>>().join(", ")
}
