//! Emit, ship and independently re-check a proof certificate.
//!
//! A YES verdict comes with the full proof tree.  The certificate is
//! plain JSON bound to the net by a fingerprint; `verify_certificate`
//! re-derives every firing and every rewrite from the net alone, so a
//! consumer needs to trust nothing about the search that produced it.

use rbisim::net::LabeledPetriNet;
use rbisim::tableau::{verify_certificate, Certificate, DecisionEngine, Outcome};

fn main() {
    let net = LabeledPetriNet::parse(include_str!("../fixtures/buying.net")).unwrap();
    let r = net.places().parse_resource("10cent:1").unwrap();
    let s = net.places().parse_resource("5cent:2").unwrap();

    let verdict = DecisionEngine::new(&net).decide(&r, &s, None);
    let cert = match verdict.outcome {
        Outcome::Yes(cert) => cert,
        _ => unreachable!("the dime really is worth two nickels"),
    };

    let json = cert.to_json_pretty(&net);
    println!("certificate for ({r}, {s}), {} node(s):", cert.node_count());
    println!("{json}");

    // Round-trip through text and re-check against the net.
    let reloaded = Certificate::from_json(&net, &json).unwrap();
    match verify_certificate(&net, &reloaded) {
        Ok(()) => println!("re-checked from JSON: valid"),
        Err(e) => println!("re-check failed: {e}"),
    }

    // Any tampering breaks a recomputed condition somewhere.
    let forged = json.replace("\"Bought:1\"", "\"Bought:2\"");
    let forged = Certificate::from_json(&net, &forged).unwrap();
    match verify_certificate(&net, &forged) {
        Ok(()) => println!("forged certificate slipped through!"),
        Err(e) => println!("forged copy rejected: {e}"),
    }

    // A certificate is bound to its net: the same tree proves nothing
    // about a net with different transitions.
    let other =
        LabeledPetriNet::parse(include_str!("../fixtures/communication-free.net")).unwrap();
    match verify_certificate(&other, &reloaded) {
        Ok(()) => println!("certificate crossed nets!"),
        Err(e) => println!("against another net: {e}"),
    }
}
