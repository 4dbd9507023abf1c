/*!
The `rbisim` command line.

Commands: `check` (decide interchangeability, optionally emitting and
re-verifying a certificate), `eqlev` (equivalence level under a cap),
`refute-sim` (bounded search for a separating context), `verify`
(re-check a certificate file), `basis` (bounded minimal generating
pairs) and `parse` (syntax-check a net file).

Exit codes are a stable contract: 0 for a positive result, 1 for a
negative one, 2 for unusable input, 3 for an exhausted search budget.
Resources are positional arguments in the multiset text syntax, e.g.
`"10cent:1"` or `"X1:1,Z:2"`; quote them when they contain `,` or a
shell would split them.  `--format machine` replaces the human report
with one JSON object per line whose resource strings parse back through
the same syntax.
*/

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::basis::{enumerate_basis, BasisQuery, Relation};
use crate::multiset::Multiset;
use crate::net::LabeledPetriNet;
use crate::strata::{refute_similarity, StrataChecker};
use crate::tableau::{verify_certificate, Certificate, DecisionEngine, Outcome};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Parser)]
#[command(
    name = "rbisim",
    version,
    about = "Decide whether two resources of a labeled Petri net are interchangeable"
)]
struct Cli {
    /// Report style: human text or one JSON object per result.
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    /// Worker cap for commands that can test candidates in parallel.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether resource R can replace resource S everywhere.
    Check {
        net: PathBuf,
        r: String,
        s: String,
        /// Node cap for the proof search; absent means unbounded.
        #[arg(long)]
        budget: Option<u64>,
        /// Write the proof certificate here on a YES verdict.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Re-verify the emitted certificate before exiting.
        #[arg(long, requires = "cert")]
        verify: bool,
    },
    /// Largest level at which the two resources stay equivalent.
    Eqlev {
        net: PathBuf,
        r: String,
        s: String,
        /// Highest level probed; equivalence everywhere below it is
        /// reported as `>=CAP`.
        #[arg(long, default_value_t = 8)]
        cap: u32,
    },
    /// Search for a context separating R from S in the plain marking
    /// game.
    RefuteSim {
        net: PathBuf,
        r: String,
        s: String,
        /// Largest context cardinality tried.
        #[arg(long, default_value_t = 3)]
        context: u64,
        /// Deepest game level tried per context.
        #[arg(long, default_value_t = 6)]
        level: u32,
    },
    /// Re-check a certificate file against a net.
    Verify { net: PathBuf, cert: PathBuf },
    /// Minimal equivalent pairs with distinct sides, up to a bound.
    #[command(group(ArgGroup::new("relation").required(true).args(["k", "bisim"])))]
    Basis {
        net: PathBuf,
        /// Use the level-K approximation as the relation.
        #[arg(long)]
        k: Option<u32>,
        /// Use the full decided equivalence as the relation.
        #[arg(long)]
        bisim: bool,
        /// Bound on the cardinality of each pair component.
        #[arg(long, default_value_t = 2)]
        max_card: u64,
        /// Keep both orientations of every pair.
        #[arg(long)]
        symmetric: bool,
    },
    /// Syntax-check a net file and print a summary.
    Parse { net: PathBuf },
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_POSITIVE,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let format = cli.format;
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::Check {
            net,
            r,
            s,
            budget,
            cert,
            verify,
        } => cmd_check(&net, &r, &s, budget, cert.as_deref(), verify, format),
        Command::Eqlev { net, r, s, cap } => cmd_eqlev(&net, &r, &s, cap.max(1), format),
        Command::RefuteSim {
            net,
            r,
            s,
            context,
            level,
        } => cmd_refute_sim(&net, &r, &s, context, level, format),
        Command::Verify { net, cert } => cmd_verify(&net, &cert, format),
        Command::Basis {
            net,
            k,
            bisim,
            max_card,
            symmetric,
        } => {
            let relation = if bisim {
                Relation::ResourceBisim
            } else {
                Relation::Stratum(k.expect("clap enforces the relation group"))
            };
            cmd_basis(&net, relation, max_card, symmetric, jobs, format)
        }
        Command::Parse { net } => cmd_parse(&net, format),
    }
}

fn fail_usage(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn load_net(path: &Path) -> Result<LabeledPetriNet, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    LabeledPetriNet::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn parse_resource(net: &LabeledPetriNet, text: &str) -> Result<Multiset, String> {
    net.places()
        .parse_resource(text)
        .map_err(|e| format!("resource {text:?}: {e}"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    net_path: &Path,
    r_text: &str,
    s_text: &str,
    budget: Option<u64>,
    cert_path: Option<&Path>,
    verify: bool,
    format: Format,
) -> i32 {
    let net = match load_net(net_path) {
        Ok(net) => net,
        Err(e) => return fail_usage(&e),
    };
    let (r, s) = match (parse_resource(&net, r_text), parse_resource(&net, s_text)) {
        (Ok(r), Ok(s)) => (r, s),
        (Err(e), _) | (_, Err(e)) => return fail_usage(&e),
    };
    let mut engine = DecisionEngine::new(&net);
    let verdict = engine.decide(&r, &s, budget);
    let stats = verdict.stats;
    match verdict.outcome {
        Outcome::Yes(certificate) => {
            if let Some(path) = cert_path {
                if let Err(e) = fs::write(path, certificate.to_json_pretty(&net)) {
                    return fail_usage(&format!("cannot write {}: {e}", path.display()));
                }
            }
            if verify {
                if let Err(e) = verify_certificate(&net, &certificate) {
                    eprintln!("error: emitted certificate failed re-verification: {e}");
                    return EXIT_NEGATIVE;
                }
            }
            match format {
                Format::Human => {
                    println!("YES: {r} and {s} are interchangeable ({stats})");
                    if let Some(path) = cert_path {
                        println!("certificate written to {}", path.display());
                    }
                }
                Format::Machine => {
                    let record = json!({
                        "command": "check",
                        "verdict": "yes",
                        "r": r.to_string(),
                        "s": s.to_string(),
                        "nodes": stats.nodes_created,
                        "expand": stats.expand_count,
                        "reduce": stats.reduce_count,
                        "backtracks": stats.backtracks,
                        "certificate": cert_path.map(|p| p.display().to_string()),
                        "verified": verify,
                    });
                    println!("{record}");
                }
            }
            EXIT_POSITIVE
        }
        Outcome::No(witness) => {
            match format {
                Format::Human => {
                    println!("NO: {r} and {s} are separable ({stats})");
                    println!("{}", witness.describe(&net));
                }
                Format::Machine => {
                    let record = json!({
                        "command": "check",
                        "verdict": "no",
                        "r": r.to_string(),
                        "s": s.to_string(),
                        "nodes": stats.nodes_created,
                        "witness": {
                            "left": witness.leaf.0.to_string(),
                            "right": witness.leaf.1.to_string(),
                            "transition": net.transition(witness.transition).name,
                            "direction": witness.direction.as_str(),
                        },
                    });
                    println!("{record}");
                }
            }
            EXIT_NEGATIVE
        }
        Outcome::BudgetExceeded { nodes_explored } => {
            match format {
                Format::Human => {
                    println!("BUDGET-EXCEEDED after {nodes_explored} nodes");
                }
                Format::Machine => {
                    let record = json!({
                        "command": "check",
                        "verdict": "budget-exceeded",
                        "nodes": nodes_explored,
                    });
                    println!("{record}");
                }
            }
            EXIT_BUDGET
        }
    }
}

fn cmd_eqlev(net_path: &Path, r_text: &str, s_text: &str, cap: u32, format: Format) -> i32 {
    let net = match load_net(net_path) {
        Ok(net) => net,
        Err(e) => return fail_usage(&e),
    };
    let (r, s) = match (parse_resource(&net, r_text), parse_resource(&net, s_text)) {
        (Ok(r), Ok(s)) => (r, s),
        (Err(e), _) | (_, Err(e)) => return fail_usage(&e),
    };
    let level = StrataChecker::new(&net).eq_level(&r, &s, cap);
    match format {
        Format::Human => println!("{level}"),
        Format::Machine => {
            let record = match level {
                crate::strata::EqLevel::Finite(k) => json!({
                    "command": "eqlev", "cap": cap, "finite": k,
                }),
                crate::strata::EqLevel::AtLeast(c) => json!({
                    "command": "eqlev", "cap": cap, "at_least": c,
                }),
            };
            println!("{record}");
        }
    }
    EXIT_POSITIVE
}

fn cmd_refute_sim(
    net_path: &Path,
    r_text: &str,
    s_text: &str,
    max_context: u64,
    max_level: u32,
    format: Format,
) -> i32 {
    let net = match load_net(net_path) {
        Ok(net) => net,
        Err(e) => return fail_usage(&e),
    };
    let (r, s) = match (parse_resource(&net, r_text), parse_resource(&net, s_text)) {
        (Ok(r), Ok(s)) => (r, s),
        (Err(e), _) | (_, Err(e)) => return fail_usage(&e),
    };
    match refute_similarity(&net, &r, &s, max_context, max_level) {
        Some(w) => {
            match format {
                Format::Human => {
                    println!(
                        "witness: context {} separates at level {} ({} side moves first)",
                        w.context, w.level, w.side
                    );
                    println!("unanswered: {}", w.firing.describe(&net));
                }
                Format::Machine => {
                    let record = json!({
                        "command": "refute-sim",
                        "witness": {
                            "context": w.context.to_string(),
                            "level": w.level,
                            "side": w.side.to_string(),
                            "transition": net.transition(w.firing.transition).name,
                            "source": w.firing.source.to_string(),
                            "target": w.firing.target.to_string(),
                        },
                    });
                    println!("{record}");
                }
            }
            EXIT_POSITIVE
        }
        None => {
            match format {
                Format::Human => println!(
                    "no refutation found within bounds (context <= {max_context}, level <= {max_level})"
                ),
                Format::Machine => {
                    let record = json!({
                        "command": "refute-sim",
                        "witness": null,
                        "max_context": max_context,
                        "max_level": max_level,
                    });
                    println!("{record}");
                }
            }
            EXIT_NEGATIVE
        }
    }
}

fn cmd_verify(net_path: &Path, cert_path: &Path, format: Format) -> i32 {
    let net = match load_net(net_path) {
        Ok(net) => net,
        Err(e) => return fail_usage(&e),
    };
    let text = match fs::read_to_string(cert_path) {
        Ok(text) => text,
        Err(e) => return fail_usage(&format!("cannot read {}: {e}", cert_path.display())),
    };
    let certificate = match Certificate::from_json(&net, &text) {
        Ok(cert) => cert,
        Err(e) => return fail_usage(&format!("{}: {e}", cert_path.display())),
    };
    match verify_certificate(&net, &certificate) {
        Ok(()) => {
            match format {
                Format::Human => println!(
                    "certificate verifies: ({}, {})",
                    certificate.query.0, certificate.query.1
                ),
                Format::Machine => {
                    let record = json!({
                        "command": "verify",
                        "ok": true,
                        "r": certificate.query.0.to_string(),
                        "s": certificate.query.1.to_string(),
                    });
                    println!("{record}");
                }
            }
            EXIT_POSITIVE
        }
        Err(e) if e.is_structural() => fail_usage(&format!("{}: {e}", cert_path.display())),
        Err(e) => {
            match format {
                Format::Human => println!("invalid certificate: {e}"),
                Format::Machine => {
                    let record = json!({
                        "command": "verify",
                        "ok": false,
                        "reason": e.to_string(),
                    });
                    println!("{record}");
                }
            }
            EXIT_NEGATIVE
        }
    }
}

fn cmd_basis(
    net_path: &Path,
    relation: Relation,
    max_card: u64,
    symmetric: bool,
    jobs: usize,
    format: Format,
) -> i32 {
    let net = match load_net(net_path) {
        Ok(net) => net,
        Err(e) => return fail_usage(&e),
    };
    let query = BasisQuery {
        relation,
        max_card,
        include_symmetric: symmetric,
    };
    let basis = enumerate_basis(&net, &query, jobs);
    match format {
        Format::Human => {
            for (r, s) in &basis {
                println!("({r}, {s})");
            }
            println!(
                "{} minimal pair(s); candidates bounded at cardinality {max_card}, \
                 pairs beyond the bound may be missing",
                basis.len()
            );
        }
        Format::Machine => {
            let relation = match relation {
                Relation::Stratum(k) => format!("stratum:{k}"),
                Relation::ResourceBisim => "bisim".to_string(),
            };
            let record = json!({
                "command": "basis",
                "relation": relation,
                "max_card": max_card,
                "symmetric": symmetric,
                "pairs": basis
                    .iter()
                    .map(|(r, s)| vec![r.to_string(), s.to_string()])
                    .collect::<Vec<_>>(),
            });
            println!("{record}");
        }
    }
    EXIT_POSITIVE
}

fn cmd_parse(net_path: &Path, format: Format) -> i32 {
    let net = match load_net(net_path) {
        Ok(net) => net,
        Err(e) => return fail_usage(&e),
    };
    match format {
        Format::Human => {
            println!(
                "{}: {} place(s), {} transition(s)",
                net.name().unwrap_or("unnamed net"),
                net.places().len(),
                net.transitions().len()
            );
            print!("{}", net.canonical_text());
        }
        Format::Machine => {
            let record = json!({
                "command": "parse",
                "name": net.name(),
                "places": net.places().names().collect::<Vec<_>>(),
                "transitions": net.transitions().len(),
                "fingerprint": net.fingerprint(),
            });
            println!("{record}");
        }
    }
    EXIT_POSITIVE
}
