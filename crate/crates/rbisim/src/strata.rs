//! Level-indexed approximations of behavioural equivalence.
//!
//! Two games are played here.  The marking game fires only enabled
//! transitions and approximates classic bisimilarity of markings.  The
//! resource game additionally lets the moving side borrow the missing
//! part of a precondition, handing the same borrowed context to the
//! imitating side; its levels approximate the congruence decided by the
//! tableau.  Level 0 relates everything, level k+1 demands one round of
//! matching that lands in level k.
//!
//! Both games recurse on the level only, so termination is structural
//! even though borrowed contexts grow the multisets.

use std::collections::HashMap;
use std::fmt;

use crate::multiset::Multiset;
use crate::net::{Firing, LabeledPetriNet};

/// Which side of a pair moved first in a counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Result of an equivalence-level query under a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqLevel {
    /// The games match up to exactly this level and fail one above it.
    Finite(u32),
    /// The games match at every level up to the cap.
    AtLeast(u32),
}

impl fmt::Display for EqLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EqLevel::Finite(k) => write!(f, "{k}"),
            EqLevel::AtLeast(cap) => write!(f, ">={cap}"),
        }
    }
}

type PairKey = (Vec<u64>, Vec<u64>, u32);

/// Memoized evaluator for both stratified games over one net.
pub struct StrataChecker<'n> {
    net: &'n LabeledPetriNet,
    memo_marking: HashMap<PairKey, bool>,
    memo_resource: HashMap<PairKey, bool>,
}

impl<'n> StrataChecker<'n> {
    pub fn new(net: &'n LabeledPetriNet) -> Self {
        StrataChecker {
            net,
            memo_marking: HashMap::new(),
            memo_resource: HashMap::new(),
        }
    }

    pub fn net(&self) -> &'n LabeledPetriNet {
        self.net
    }

    // Both games are symmetric, so keys store the pair (min, max).
    fn key(a: &Multiset, b: &Multiset, k: u32) -> PairKey {
        if a.cardlex(b) == std::cmp::Ordering::Greater {
            (b.counts().to_vec(), a.counts().to_vec(), k)
        } else {
            (a.counts().to_vec(), b.counts().to_vec(), k)
        }
    }

    /// Level-`k` marking game: only enabled transitions fire.
    pub fn marking_eq(&mut self, m1: &Multiset, m2: &Multiset, k: u32) -> bool {
        if k == 0 || m1 == m2 {
            return true;
        }
        let key = Self::key(m1, m2, k);
        if let Some(&hit) = self.memo_marking.get(&key) {
            return hit;
        }
        let holds = self.marking_moves_covered(m1, m2, k)
            && self.marking_moves_covered(m2, m1, k);
        self.memo_marking.insert(key, holds);
        holds
    }

    fn marking_moves_covered(&mut self, from: &Multiset, other: &Multiset, k: u32) -> bool {
        for t in self.net.enabled(from) {
            let target = self.net.fire(from, t).expect("enabled");
            let label = &self.net.transition(t).label;
            let mut matched = false;
            for u in self.net.enabled(other) {
                if &self.net.transition(u).label != label {
                    continue;
                }
                let answer = self.net.fire(other, u).expect("enabled");
                if self.marking_eq(&target, &answer, k - 1) {
                    matched = true;
                    break;
                }
            }
            if !matched {
                return false;
            }
        }
        true
    }

    /// Level-`k` resource game: every transition fires after borrowing
    /// its missing precondition, and the borrowed context is added to
    /// the imitating side as well.
    pub fn resource_eq(&mut self, r: &Multiset, s: &Multiset, k: u32) -> bool {
        if k == 0 || r == s {
            return true;
        }
        let key = Self::key(r, s, k);
        if let Some(&hit) = self.memo_resource.get(&key) {
            return hit;
        }
        let holds = self.resource_moves_covered(r, s, k)
            && self.resource_moves_covered(s, r, k);
        self.memo_resource.insert(key, holds);
        holds
    }

    fn resource_moves_covered(&mut self, from: &Multiset, other: &Multiset, k: u32) -> bool {
        for t in 0..self.net.transitions().len() {
            let step = self.net.t_children(from, other, t);
            let covered = step
                .candidates
                .iter()
                .any(|(_, answer)| self.resource_eq(&step.left_result, answer, k - 1));
            if !covered {
                return false;
            }
        }
        true
    }

    /// Largest level at which the resource game still matches, capped.
    ///
    /// `Finite(k)` means level `k` holds and level `k+1` fails;
    /// `AtLeast(cap)` means every level up to `cap` holds.
    pub fn eq_level(&mut self, r: &Multiset, s: &Multiset, cap: u32) -> EqLevel {
        assert!(cap >= 1, "eq_level needs a cap of at least 1");
        for k in 1..=cap {
            if !self.resource_eq(r, s, k) {
                return EqLevel::Finite(k - 1);
            }
        }
        EqLevel::AtLeast(cap)
    }

    /// Walks a level-`k` resource game failure down to a pair that
    /// already fails one round, following moves whose every answer
    /// keeps failing.  Returns `None` when the pair survives every
    /// level up to `max_level`.
    pub fn one_round_failure(
        &mut self,
        r: &Multiset,
        s: &Multiset,
        max_level: u32,
    ) -> Option<OneRoundFailure> {
        let mut k = (1..=max_level).find(|&k| !self.resource_eq(r, s, k))?;
        let mut pair = (r.clone(), s.clone());
        loop {
            // A transition nobody answers closes the walk regardless of
            // the remaining level budget.
            let mut unanswered = None;
            'scan: for t in 0..self.net.transitions().len() {
                for (side, from, other) in
                    [(Side::Left, &pair.0, &pair.1), (Side::Right, &pair.1, &pair.0)]
                {
                    if self.net.t_children(from, other, t).candidates.is_empty() {
                        unanswered = Some((t, side));
                        break 'scan;
                    }
                }
            }
            if let Some((transition, side)) = unanswered {
                return Some(OneRoundFailure {
                    pair,
                    transition,
                    side,
                });
            }
            // Otherwise some completed move defeats all answers one
            // level lower; descend into its first child.
            let mut descended = false;
            'moves: for t in 0..self.net.transitions().len() {
                for side in [Side::Left, Side::Right] {
                    let (from, other) = match side {
                        Side::Left => (&pair.0, &pair.1),
                        Side::Right => (&pair.1, &pair.0),
                    };
                    let step = self.net.t_children(from, other, t);
                    let all_fail = step
                        .candidates
                        .iter()
                        .all(|(_, answer)| !self.resource_eq(&step.left_result, answer, k - 1));
                    if all_fail {
                        let (_, answer) = &step.candidates[0];
                        pair = match side {
                            Side::Left => (step.left_result.clone(), answer.clone()),
                            Side::Right => (answer.clone(), step.left_result.clone()),
                        };
                        k -= 1;
                        descended = true;
                        break 'moves;
                    }
                }
            }
            assert!(descended, "a failing level admits a defeating move");
        }
    }

    // At a failing level, some first move lacks any surviving answer.
    fn distinguishing_move(
        &mut self,
        m1: &Multiset,
        m2: &Multiset,
        k: u32,
    ) -> Option<(Side, Firing)> {
        for (side, from, other) in [(Side::Left, m1, m2), (Side::Right, m2, m1)] {
            for t in self.net.enabled(from) {
                let target = self.net.fire(from, t).expect("enabled");
                let label = self.net.transition(t).label.clone();
                let matched = self
                    .net
                    .enabled(other)
                    .into_iter()
                    .filter(|&u| self.net.transition(u).label == label)
                    .any(|u| {
                        let answer = self.net.fire(other, u).expect("enabled");
                        self.marking_eq(&target, &answer, k - 1)
                    });
                if !matched {
                    return Some((
                        side,
                        Firing {
                            source: from.clone(),
                            transition: t,
                            target,
                        },
                    ));
                }
            }
        }
        None
    }
}

/// A pair reached through completed moves that fails one game round:
/// completing `transition` for the `side` component leaves the other
/// component without a same-label answer.
#[derive(Debug, Clone)]
pub struct OneRoundFailure {
    pub pair: (Multiset, Multiset),
    pub transition: usize,
    pub side: Side,
}

/// A context that separates `r+w` from `s+w` in the marking game.
#[derive(Debug, Clone)]
pub struct RefutationWitness {
    /// The separating context `w`, minimal in cardlex order.
    pub context: Multiset,
    /// Least level at which the marking game fails under `w`.
    pub level: u32,
    /// Side whose move cannot be answered.
    pub side: Side,
    /// The unanswerable firing.
    pub firing: Firing,
}

/// Searches for a context `w` with `|w| ≤ max_context` whose addition
/// to both sides breaks the marking game within `max_level` rounds.
///
/// Contexts are tried in ascending cardlex order, so a returned witness
/// is minimal.  None-found only exhausts the given bounds; it proves
/// nothing beyond them.
pub fn refute_similarity(
    net: &LabeledPetriNet,
    r: &Multiset,
    s: &Multiset,
    max_context: u64,
    max_level: u32,
) -> Option<RefutationWitness> {
    let mut checker = StrataChecker::new(net);
    for w in net.places().multisets_upto(max_context) {
        let a = r.sum(&w);
        let b = s.sum(&w);
        for k in 1..=max_level {
            if !checker.marking_eq(&a, &b, k) {
                let (side, firing) = checker
                    .distinguishing_move(&a, &b, k)
                    .expect("a failing level has an unanswered move");
                return Some(RefutationWitness {
                    context: w,
                    level: k,
                    side,
                    firing,
                });
            }
        }
    }
    None
}

/// A pair whose move cannot be answered inside `member`.
#[derive(Debug, Clone)]
pub struct TransferViolation {
    /// Index into the checked pair list.
    pub pair_index: usize,
    /// The offending pair as listed.
    pub pair: (Multiset, Multiset),
    /// Side that made the unanswerable move.
    pub side: Side,
    /// The move itself; in resource mode its source is the completed
    /// multiset.
    pub firing: Firing,
}

/// Checks one transfer round for every listed pair: each firing from
/// either side (completed when `resource_mode`) must have an equally
/// labeled answer landing in `member`.
///
/// `member` is always called with the left descendant first, i.e. with
/// the orientation of the listed pair; checking the right side's moves
/// this way covers the inverse relation.  Returns the first violation
/// in pair order, then transition order, left side before right.
pub fn check_transfer_step<F>(
    net: &LabeledPetriNet,
    pairs: &[(Multiset, Multiset)],
    member: F,
    resource_mode: bool,
) -> Option<TransferViolation>
where
    F: Fn(&Multiset, &Multiset) -> bool,
{
    for (pair_index, (m1, m2)) in pairs.iter().enumerate() {
        for t in 0..net.transitions().len() {
            for side in [Side::Left, Side::Right] {
                let (from, other) = match side {
                    Side::Left => (m1, m2),
                    Side::Right => (m2, m1),
                };
                let violation = if resource_mode {
                    let step = net.t_children(from, other, t);
                    let covered = step.candidates.iter().any(|(_, answer)| match side {
                        Side::Left => member(&step.left_result, answer),
                        Side::Right => member(answer, &step.left_result),
                    });
                    if covered {
                        None
                    } else {
                        Some(Firing {
                            source: net.resource_complete(from, t),
                            transition: t,
                            target: step.left_result,
                        })
                    }
                } else {
                    match net.fire(from, t) {
                        None => None,
                        Some(target) => {
                            let label = &net.transition(t).label;
                            let covered = net
                                .enabled(other)
                                .into_iter()
                                .filter(|&u| &net.transition(u).label == label)
                                .any(|u| {
                                    let answer = net.fire(other, u).expect("enabled");
                                    match side {
                                        Side::Left => member(&target, &answer),
                                        Side::Right => member(&answer, &target),
                                    }
                                });
                            if covered {
                                None
                            } else {
                                Some(Firing {
                                    source: from.clone(),
                                    transition: t,
                                    target,
                                })
                            }
                        }
                    }
                };
                if let Some(firing) = violation {
                    return Some(TransferViolation {
                        pair_index,
                        pair: (m1.clone(), m2.clone()),
                        side,
                        firing,
                    });
                }
            }
        }
    }
    None
}
