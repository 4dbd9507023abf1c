//! Cross-check the proof search against the level-game oracle.
//!
//! The decision procedure and the stratified games are implemented
//! independently: the tableau search proves YES with a certificate and
//! NO with a failing pair, while the games simply recurse on levels.
//! On any net they must agree, so random nets make a cheap and harsh
//! referee.  The same cross-check runs at scale in the test suite.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rbisim::strata::StrataChecker;
use rbisim::tableau::{verify_certificate, DecisionEngine, Outcome};
use rbisim::testkit::{random_net, random_resource, NetSpec};

fn main() {
    let spec = NetSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut yes, mut no, mut disagreements) = (0usize, 0usize, 0usize);

    for _ in 0..60 {
        let net = random_net(&mut rng, &spec);
        let mut engine = DecisionEngine::new(&net);
        let mut oracle = StrataChecker::new(&net);
        for _ in 0..5 {
            let r = random_resource(&mut rng, &net, 3);
            let s = random_resource(&mut rng, &net, 3);
            let verdict = engine.decide(&r, &s, None);
            let strata_hold = (1..=6).all(|k| oracle.resource_eq(&r, &s, k));
            match verdict.outcome {
                Outcome::Yes(cert) => {
                    yes += 1;
                    verify_certificate(&net, &cert).expect("every YES ships a valid proof");
                    if !strata_hold {
                        disagreements += 1;
                        println!("DISAGREE on ({r}, {s}):");
                        print!("{}", net.canonical_text());
                    }
                }
                Outcome::No(witness) => {
                    no += 1;
                    // A NO may need levels deeper than probed here, so
                    // only a YES against a failing level is damning;
                    // the witness at least must replay.
                    let (from, other) = match witness.direction {
                        rbisim::tableau::Direction::LeftToRight => {
                            (&witness.leaf.0, &witness.leaf.1)
                        }
                        rbisim::tableau::Direction::RightToLeft => {
                            (&witness.leaf.1, &witness.leaf.0)
                        }
                    };
                    let step = net.t_children(from, other, witness.transition);
                    assert!(step.candidates.is_empty(), "NO witness must replay");
                }
                Outcome::BudgetExceeded { .. } => unreachable!("unbounded run"),
            }
        }
    }

    println!("300 random queries: {yes} YES, {no} NO, {disagreements} disagreement(s)");
    println!("every YES certificate verified, every NO witness replayed");
}
