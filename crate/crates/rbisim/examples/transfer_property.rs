//! Check a hand-built relation for the transfer property.
//!
//! A relation proves mutual similarity when every plain firing on one
//! side has an equally labeled answer landing back in the relation.
//! The stronger completed-firing version borrows the missing preset
//! first and lends the same tokens to the answering side.  The gap
//! between the two is exactly what separates "similar" from
//! "interchangeable", and `check_transfer_step` exposes it.

use rbisim::multiset::Multiset;
use rbisim::net::LabeledPetriNet;
use rbisim::strata::check_transfer_step;

fn main() {
    // Component one: X1 -a-> {∅ | X2 | X3}, X2 -b-> ∅, and X3 needs a
    // Z to do its b.  Component two: Y1 -a-> {∅ | Y2}, Y2 -b-> ∅.
    let net =
        LabeledPetriNet::parse(include_str!("../fixtures/similar-not-bisimilar.net")).unwrap();
    let u = net.places();
    let idx = |name: &str| u.index_of(name).unwrap();
    let (ix1, ix2, ix3, iz, iy1, iy2) = (
        idx("X1"),
        idx("X2"),
        idx("X3"),
        idx("Z"),
        idx("Y1"),
        idx("Y2"),
    );

    // How many b-moves a side still owes: each X2 or Y2 owes one, and
    // an X3 owes one only while a Z accompanies it.
    let pending = |m: &Multiset| {
        let c = m.counts();
        c[ix2] + c[ix3].min(c[iz]) + c[iy2]
    };
    // Related: either the left has one extra X1 against one extra Y1,
    // or the sides agree on X1 and Y1 and owe equally many b-moves.
    let member = |a: &Multiset, b: &Multiset| {
        let (ca, cb) = (a.counts(), b.counts());
        let swap = ca[ix1] == cb[ix1] + 1
            && cb[iy1] == ca[iy1] + 1
            && [ix2, ix3, iz, iy2].iter().all(|&i| ca[i] == cb[i]);
        let balanced =
            ca[ix1] == cb[ix1] && ca[iy1] == cb[iy1] && pending(a) == pending(b);
        swap || balanced
    };

    let ms = |text: &str| u.parse_resource(text).unwrap();
    let pairs = [
        (ms("X1:1"), ms("Y1:1")),
        (ms("X3:1"), ms("∅")),
        (ms("X2:1"), ms("Y2:1")),
        (ms("X1:1,Z:1"), ms("Y1:1,Z:1")),
    ];
    for (a, b) in &pairs {
        println!("related: ({a}, {b})");
    }
    println!();

    match check_transfer_step(&net, &pairs, member, false) {
        None => println!("plain transfer: closed; the relation certifies mutual similarity"),
        Some(v) => println!("plain transfer violated: {}", v.firing.describe(&net)),
    }

    match check_transfer_step(&net, &pairs, member, true) {
        None => println!("completed transfer: closed"),
        Some(v) => {
            println!(
                "completed transfer violated at pair ({}, {}), {} side:",
                v.pair.0, v.pair.1, v.side
            );
            println!("  {}", v.firing.describe(&net));
            println!("  the loan lets a lone X3 act, and the empty side has no b;");
            println!("  that is why X1 and Y1 are similar yet not interchangeable");
        }
    }
}
