//! Decide whether two resources are interchangeable.
//!
//! The buying net sells one item for twenty cents: either two dimes, or
//! one dime and two nickels, or four nickels.  A dime therefore buys
//! exactly what two nickels buy, in every context, and the engine
//! proves it.  One dime versus two dimes fails: the run shows the
//! unanswerable move.

use rbisim::net::LabeledPetriNet;
use rbisim::tableau::{DecisionEngine, Outcome};

fn main() {
    let net = LabeledPetriNet::parse(include_str!("../fixtures/buying.net")).unwrap();
    let mut engine = DecisionEngine::new(&net);

    for (left, right) in [("10cent:1", "5cent:2"), ("10cent:1", "10cent:2")] {
        let r = net.places().parse_resource(left).unwrap();
        let s = net.places().parse_resource(right).unwrap();
        let verdict = engine.decide(&r, &s, None);
        println!("{r} vs {s}:");
        match verdict.outcome {
            Outcome::Yes(cert) => {
                println!("  YES, interchangeable in every marking");
                println!("  proof tree: {} node(s); search: {}", cert.node_count(), verdict.stats);
            }
            Outcome::No(witness) => {
                println!("  NO, separable");
                println!("  {}", witness.describe(&net));
                println!("  path to the failing pair:");
                for (pair, rule) in &witness.trace {
                    println!("    ({}, {})  [{rule}]", pair.0, pair.1);
                }
            }
            Outcome::BudgetExceeded { nodes_explored } => {
                println!("  gave up after {nodes_explored} nodes");
            }
        }
        println!();
    }
}
