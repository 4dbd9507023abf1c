//! Measure how deep two resources stay equivalent.
//!
//! The equivalence is the limit of a chain of level-indexed games: at
//! level k+1 every completed move must be answered by a move whose
//! result still matches at level k.  `eq_level` reports the largest
//! level that holds, so a finite answer pinpoints how many rounds
//! separate two resources.

use rbisim::net::LabeledPetriNet;
use rbisim::strata::StrataChecker;

fn main() {
    let net =
        LabeledPetriNet::parse(include_str!("../fixtures/similar-not-bisimilar.net")).unwrap();
    let mut checker = StrataChecker::new(&net);
    let ms = |text: &str| net.places().parse_resource(text).unwrap();

    println!("net: two components that simulate each other");
    for (a, b) in [
        ("X1:1", "Y1:1"),
        ("X2:1", "Y2:1"),
        ("X3:1", "∅"),
        ("X3:1,Z:1", "Y2:1"),
        ("X1:1", "X1:1"),
    ] {
        let (r, s) = (ms(a), ms(b));
        let level = checker.eq_level(&r, &s, 8);
        println!("  eq_level({r}, {s}) = {level}");
    }

    // X1 vs Y1 stops at level 1: X1 can announce an `a` that banks on a
    // borrowed Z (the X3 branch), and Y1's answers commit one round too
    // early.  The probe below replays the two failing rounds by hand.
    let (x1, y1) = (ms("X1:1"), ms("Y1:1"));
    println!();
    println!("replaying the level-2 failure of ({x1}, {y1}):");
    let t4 = net
        .transitions()
        .iter()
        .position(|t| t.name == "t4")
        .unwrap();
    let step = net.t_children(&x1, &y1, t4);
    println!("  left completes t4: {x1} -> {}", step.left_result);
    for (u, answer) in &step.candidates {
        let mut sub = StrataChecker::new(&net);
        let still = sub.resource_eq(&step.left_result, answer, 1);
        println!(
            "  answer {} -> {answer}: level-1 match afterwards: {still}",
            net.transition(*u).name
        );
    }
    println!("  every answer fails one level later, so the pair stops at level 1");
}
