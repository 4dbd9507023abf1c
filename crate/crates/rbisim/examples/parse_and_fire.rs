//! The net text format, plain firing, and completed firing.
//!
//! A net file is line oriented: a `net` name line, one `place` line per
//! place (declaration order fixes the place order everywhere), and one
//! `trans` line per transition with `label`, `pre` and `post` weight
//! lists.  `-` denotes the empty multiset.

use rbisim::net::LabeledPetriNet;

const TEXT: &str = "\
net workshop
place Plank
place Nail
place Chair
trans build label assemble pre Plank:2,Nail:4 post Chair:1
trans recycle label scrap pre Chair:1 post Plank:1
";

fn main() {
    let net = LabeledPetriNet::parse(TEXT).unwrap();
    println!(
        "parsed `{}`: {} places, {} transitions, fingerprint {}",
        net.name().unwrap_or("unnamed"),
        net.places().len(),
        net.transitions().len(),
        net.fingerprint()
    );
    print!("{}", net.canonical_text());
    println!();

    let m = net.places().parse_resource("Plank:2,Nail:4").unwrap();
    println!("marking {m}:");
    for t in net.enabled(&m) {
        let fired = net.fire(&m, t).unwrap();
        println!("  {} fires plainly: {m} -> {fired}", net.transition(t).name);
    }

    // Short of nails, `build` cannot fire on its own.  As a resource
    // inside a larger marking it still acts: the missing preset is
    // borrowed from the surroundings, and the same loan is granted to
    // any resource that wants to imitate the move.
    let short = net.places().parse_resource("Plank:2,Nail:1").unwrap();
    let build = 0;
    println!();
    println!("resource {short}:");
    println!("  plain firing of build: {:?}", net.fire(&short, build));
    let borrowed = net.resource_complete(&short, build);
    println!("  borrowing completes it to {borrowed}");
    let step = net.t_children(&short, &net.places().empty(), build);
    println!("  completed build: {short} -> {}", step.left_result);

    // The imitating side receives the same loan and must still answer
    // from its own stock.  An empty bystander cannot; one holding the
    // extra nail can.  Pairs are separated exactly by such gaps.
    for other in ["∅", "Plank:2,Nail:2"] {
        let other = net.places().parse_resource(other).unwrap();
        let step = net.t_children(&short, &other, build);
        let answers: Vec<String> = step
            .candidates
            .iter()
            .map(|(u, answer)| format!("{} -> {answer}", net.transition(*u).name))
            .collect();
        println!("  bystander {other} answers with: {answers:?}");
    }
}
