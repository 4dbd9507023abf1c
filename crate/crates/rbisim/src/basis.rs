/*!
Bounded enumeration of congruence bases: the minimal non-identity pairs
of a chosen congruence under the componentwise pair order, restricted to
a cardinality bound.

Every congruence on multisets is generated by its set of minimal
non-identity pairs, and that set is finite.  This module enumerates the
part of it that fits under a bound on both components.  The bound makes
the search finite but also makes the answer relative: the full generator
set may contain pairs beyond the bound, so callers should present the
output as "basis candidates up to the bound".
*/

use rayon::prelude::*;

use crate::multiset::{pair_leq, Multiset};
use crate::net::LabeledPetriNet;
use crate::strata::StrataChecker;
use crate::tableau::DecisionEngine;

/// Which congruence the basis is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// The level-`k` approximation of the completed-firing game.
    Stratum(u32),
    /// The full equivalence decided by the tableau search.
    ResourceBisim,
}

/// A bounded basis request.
#[derive(Debug, Clone)]
pub struct BasisQuery {
    pub relation: Relation,
    /// Bound on the cardinality of each component.  `0` admits only the
    /// empty multiset and therefore yields an empty basis.
    pub max_card: u64,
    /// When false, only the representative with the cardlex-smaller
    /// left component is kept from each mirrored pair.
    pub include_symmetric: bool,
}

/// Inserts `candidate` into a pair-order antichain.
///
/// The candidate enters iff no current element is componentwise below
/// it; current elements componentwise above it are evicted.  Returns
/// whether the candidate was inserted.
pub fn antichain_insert(
    current: &mut Vec<(Multiset, Multiset)>,
    candidate: (Multiset, Multiset),
) -> bool {
    if current
        .iter()
        .any(|m| pair_leq((&m.0, &m.1), (&candidate.0, &candidate.1)))
    {
        return false;
    }
    current.retain(|m| !pair_leq((&candidate.0, &candidate.1), (&m.0, &m.1)));
    current.push(candidate);
    true
}

// One membership oracle per worker; the stratum checker and the tableau
// engine both memoize internally.
enum Tester<'n> {
    Stratum(StrataChecker<'n>, u32),
    Bisim(DecisionEngine<'n>),
}

impl<'n> Tester<'n> {
    fn new(net: &'n LabeledPetriNet, relation: Relation) -> Self {
        match relation {
            Relation::Stratum(k) => Tester::Stratum(StrataChecker::new(net), k),
            Relation::ResourceBisim => Tester::Bisim(DecisionEngine::new(net)),
        }
    }

    fn member(&mut self, r: &Multiset, s: &Multiset) -> bool {
        match self {
            Tester::Stratum(chk, k) => chk.resource_eq(r, s, *k),
            Tester::Bisim(engine) => engine.decide(r, s, None).is_yes(),
        }
    }
}

// Membership tests within one chunk run in parallel; folding into the
// antichain stays serial so the output is deterministic.
const CHUNK: usize = 32;

/// Enumerates the minimal in-relation pairs with distinct components
/// and both cardinalities at most `q.max_card`.
///
/// Candidates are generated in ascending cardlex order of the component
/// sum, which guarantees that a dominating pair is considered before
/// anything it dominates; the output is an antichain in that same
/// order, and every in-relation non-identity pair inside the bound lies
/// componentwise above some output element.  `jobs` caps the number of
/// parallel membership workers; values below 2 run serially.
pub fn enumerate_basis(
    net: &LabeledPetriNet,
    q: &BasisQuery,
    jobs: usize,
) -> Vec<(Multiset, Multiset)> {
    let sets = net.places().multisets_upto(q.max_card);
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for i in 0..sets.len() {
        for j in 0..sets.len() {
            if i != j {
                candidates.push((i, j));
            }
        }
    }
    // `sets` is cardlex-ascending, so index order breaks sum ties
    // deterministically.
    let sums: Vec<Multiset> = candidates
        .iter()
        .map(|&(i, j)| sets[i].sum(&sets[j]))
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        sums[a]
            .cardlex(&sums[b])
            .then_with(|| candidates[a].cmp(&candidates[b]))
    });
    let candidates: Vec<(usize, usize)> = order.into_iter().map(|k| candidates[k]).collect();

    let mut basis: Vec<(Multiset, Multiset)> = Vec::new();
    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool");
        for chunk in candidates.chunks(CHUNK) {
            // Cheap pre-filter against the antichain so far; the serial
            // fold below re-checks against in-chunk insertions.
            let survivors: Vec<(usize, usize)> = chunk
                .iter()
                .copied()
                .filter(|&(i, j)| {
                    !basis
                        .iter()
                        .any(|m| pair_leq((&m.0, &m.1), (&sets[i], &sets[j])))
                })
                .collect();
            let verdicts: Vec<bool> = pool.install(|| {
                survivors
                    .par_iter()
                    .map_init(
                        || Tester::new(net, q.relation),
                        |tester, &(i, j)| tester.member(&sets[i], &sets[j]),
                    )
                    .collect()
            });
            for (&(i, j), is_member) in survivors.iter().zip(verdicts) {
                if is_member {
                    antichain_insert(&mut basis, (sets[i].clone(), sets[j].clone()));
                }
            }
        }
    } else {
        let mut tester = Tester::new(net, q.relation);
        for &(i, j) in &candidates {
            let pair = (&sets[i], &sets[j]);
            if basis.iter().any(|m| pair_leq((&m.0, &m.1), pair)) {
                continue;
            }
            if tester.member(pair.0, pair.1) {
                antichain_insert(&mut basis, (sets[i].clone(), sets[j].clone()));
            }
        }
    }

    if !q.include_symmetric {
        // Symmetric relations give mirror-closed antichains; keep the
        // orientation with the cardlex-smaller left component.
        basis.retain(|(r, s)| r.cardlex(s) == std::cmp::Ordering::Less);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiset::Universe;

    fn identity_free() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/communication-free.net")).unwrap()
    }

    fn ms(net: &LabeledPetriNet, text: &str) -> Multiset {
        net.places().parse_resource(text).unwrap()
    }

    #[test]
    fn antichain_insert_on_empty_gives_a_singleton() {
        let u = Universe::new(["X"]).unwrap();
        let mut chain = Vec::new();
        let pair = (u.empty(), u.parse_resource("X:1").unwrap());
        assert!(antichain_insert(&mut chain, pair.clone()));
        assert_eq!(chain, vec![pair]);
    }

    #[test]
    fn antichain_insert_drops_a_dominated_candidate() {
        let u = Universe::new(["X"]).unwrap();
        let mut chain = vec![(u.empty(), u.parse_resource("X:1").unwrap())];
        let before = chain.clone();
        assert!(!antichain_insert(
            &mut chain,
            (u.parse_resource("X:1").unwrap(), u.parse_resource("X:2").unwrap()),
        ));
        assert_eq!(chain, before);
    }

    #[test]
    fn antichain_insert_evicts_dominated_members() {
        let u = Universe::new(["X"]).unwrap();
        let mut chain = vec![(
            u.parse_resource("X:1").unwrap(),
            u.parse_resource("X:2").unwrap(),
        )];
        let small = (u.empty(), u.parse_resource("X:1").unwrap());
        assert!(antichain_insert(&mut chain, small.clone()));
        assert_eq!(chain, vec![small]);
    }

    #[test]
    fn level_zero_basis_pairs_the_empty_resource_with_each_token() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::Stratum(0),
            max_card: 1,
            include_symmetric: false,
        };
        let basis = enumerate_basis(&net, &q, 1);
        let empty = net.places().empty();
        assert_eq!(
            basis,
            vec![
                (empty.clone(), ms(&net, "Z:1")),
                (empty.clone(), ms(&net, "Y:1")),
                (empty, ms(&net, "X:1")),
            ]
        );
    }

    #[test]
    fn keeping_symmetric_pairs_doubles_the_level_zero_basis() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::Stratum(0),
            max_card: 1,
            include_symmetric: true,
        };
        let basis = enumerate_basis(&net, &q, 1);
        assert_eq!(basis.len(), 6);
        for (r, s) in &basis {
            assert!(basis.contains(&(s.clone(), r.clone())));
        }
    }

    #[test]
    fn level_one_basis_swaps_one_choice_token_for_its_pieces() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::Stratum(1),
            max_card: 2,
            include_symmetric: false,
        };
        let basis = enumerate_basis(&net, &q, 1);
        // One round cannot tell a Z token from anything offering both
        // an a-step and a b-step.
        for expected in [
            (ms(&net, "Z:1"), ms(&net, "Z:2")),
            (ms(&net, "Z:1"), ms(&net, "Y:1,Z:1")),
            (ms(&net, "Z:1"), ms(&net, "X:1,Z:1")),
            (ms(&net, "Z:1"), ms(&net, "X:1,Y:1")),
        ] {
            assert!(basis.contains(&expected), "missing {expected:?}");
        }
    }

    #[test]
    fn the_decided_congruence_has_an_empty_bounded_basis_here() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::ResourceBisim,
            max_card: 2,
            include_symmetric: false,
        };
        assert!(enumerate_basis(&net, &q, 1).is_empty());
    }

    #[test]
    fn bound_zero_gives_an_empty_basis() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::Stratum(0),
            max_card: 0,
            include_symmetric: true,
        };
        assert!(enumerate_basis(&net, &q, 1).is_empty());
    }

    #[test]
    fn output_is_an_antichain_and_covers_the_enumerated_region() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::Stratum(1),
            max_card: 2,
            include_symmetric: true,
        };
        let basis = enumerate_basis(&net, &q, 1);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                if i != j {
                    assert!(!pair_leq((&a.0, &a.1), (&b.0, &b.1)), "{a:?} <= {b:?}");
                }
            }
        }
        // Every in-relation non-identity pair inside the bound sits
        // above some member.
        let mut chk = StrataChecker::new(&net);
        let sets = net.places().multisets_upto(2);
        for r in &sets {
            for s in &sets {
                if r != s && chk.resource_eq(r, s, 1) {
                    assert!(
                        basis.iter().any(|m| pair_leq((&m.0, &m.1), (r, s))),
                        "uncovered pair ({r}, {s})"
                    );
                }
            }
        }
    }

    #[test]
    fn members_really_are_in_the_relation() {
        let net = identity_free();
        let q = BasisQuery {
            relation: Relation::Stratum(1),
            max_card: 2,
            include_symmetric: false,
        };
        let mut chk = StrataChecker::new(&net);
        for (r, s) in enumerate_basis(&net, &q, 1) {
            assert!(chk.resource_eq(&r, &s, 1));
        }
    }

    #[test]
    fn parallel_and_serial_enumeration_agree() {
        let net = identity_free();
        for relation in [Relation::Stratum(1), Relation::ResourceBisim] {
            let q = BasisQuery {
                relation,
                max_card: 2,
                include_symmetric: false,
            };
            assert_eq!(enumerate_basis(&net, &q, 1), enumerate_basis(&net, &q, 2));
        }
    }
}
