//! Hunt for a context that breaks an apparent equivalence.
//!
//! Two resources can be indistinguishable on their own yet behave
//! differently once something is added next to them.  `refute_similarity`
//! enumerates contexts in ascending size and plays the plain marking
//! game after each addition, so the witness it returns is minimal.

use rbisim::net::LabeledPetriNet;
use rbisim::strata::{refute_similarity, StrataChecker};

fn main() {
    // One X can be spent alone (label a), and two Xs together can also
    // be spent as a pair (label b).  A single Y only offers the a-move.
    let net =
        LabeledPetriNet::parse(include_str!("../fixtures/bisimilar-not-similar.net")).unwrap();
    let x = net.places().parse_resource("X:1").unwrap();
    let y = net.places().parse_resource("Y:1").unwrap();

    let mut checker = StrataChecker::new(&net);
    let alone = (1..=8).all(|k| checker.marking_eq(&x, &y, k));
    println!("markings {x} and {y} match in the plain game at levels 1..=8: {alone}");

    match refute_similarity(&net, &x, &y, 3, 6) {
        Some(w) => {
            println!("but they are not interchangeable:");
            println!(
                "  adding {} separates them at level {} ({} side moves first)",
                w.context, w.level, w.side
            );
            println!("  unanswered move: {}", w.firing.describe(&net));
        }
        None => println!("no separating context found within the bounds"),
    }

    // The same search exhausting its bounds proves nothing by itself,
    // but pairs well with the full decision procedure: here the two
    // component starters really are mutually similar, so nothing small
    // separates them in the plain game.
    let net =
        LabeledPetriNet::parse(include_str!("../fixtures/similar-not-bisimilar.net")).unwrap();
    let x1 = net.places().parse_resource("X1:1").unwrap();
    let y1 = net.places().parse_resource("Y1:1").unwrap();
    println!();
    match refute_similarity(&net, &x1, &y1, 3, 6) {
        Some(w) => println!("unexpected witness: {}", w.context),
        None => println!(
            "{x1} vs {y1}: no context up to 3 tokens separates them within 6 rounds"
        ),
    }
}
