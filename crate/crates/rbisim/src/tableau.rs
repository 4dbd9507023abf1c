//! Terminating proof search for the transfer-closed congruence.
//!
//! A query pair is the root of a proof tree.  Leaves with equal sides
//! close immediately.  Any other leaf is first tried against its own
//! root path: if some ancestor pair is componentwise below it, the leaf
//! is rewritten (REDUCE) into a strictly smaller problem, replacing the
//! dominated part of one side by the matching part of the ancestor.
//! Otherwise every transition is completed in both directions (EXPAND)
//! and one imitating answer per direction is committed; committed
//! answers are search choices and are backtracked on failure.
//!
//! REDUCE keeps the combined cardlex measure strictly descending and
//! any expansion only bounces between finitely many answer choices, so
//! the search terminates: a well order on multisets leaves no infinite
//! descending interleaving.  A fully closed tree is exported as a
//! certificate that [`verify_certificate`] re-checks against the net
//! alone, without trusting the search.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multiset::{pair_leq, Multiset};
use crate::net::LabeledPetriNet;
use crate::strata::{Side, StrataChecker};

/// Direction of a committed expansion edge: which pair component moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// The left component fired; the right component imitates.
    LeftToRight,
    /// The right component fired; the left component imitates.
    RightToLeft,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::LeftToRight => "lr",
            Direction::RightToLeft => "rl",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// One node of a closed proof tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauNode {
    pub pair: (Multiset, Multiset),
    pub rule: Rule,
}

/// How a node is discharged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    /// Equal sides; successful leaf.
    Identity,
    /// Rewritten against the ancestor `levels_up` steps above.  With
    /// `mirrored` the ancestor is cited sides-swapped, which the
    /// symmetry of the relation permits.
    Reduce {
        levels_up: usize,
        mirrored: bool,
        child: Box<TableauNode>,
    },
    /// One committed answer per transition and direction.
    Expand { edges: Vec<ExpandEdge> },
}

/// A committed expansion child: transition `t` moved in `direction`,
/// transition `u` (same label) answered, `node` continues from the
/// resulting pair.  For `rl` edges the pair is oriented mover-first,
/// i.e. the right component's descendant is the pair's left entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandEdge {
    pub transition: usize,
    pub imitator: usize,
    pub direction: Direction,
    pub node: TableauNode,
}

impl TableauNode {
    pub fn node_count(&self) -> u64 {
        1 + match &self.rule {
            Rule::Identity => 0,
            Rule::Reduce { child, .. } => child.node_count(),
            Rule::Expand { edges } => edges.iter().map(|e| e.node.node_count()).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match &self.rule {
            Rule::Identity => 0,
            Rule::Reduce { child, .. } => 1 + child.depth(),
            Rule::Expand { edges } => {
                1 + edges.iter().map(|e| e.node.depth()).max().unwrap_or(0)
            }
        }
    }
}

/// Deepest ancestor on the root path whose pair sits componentwise
/// below `pair`, cited either as stored or sides-swapped; the flag in
/// the result is true for the swapped citation.  Swapped citations are
/// as good as plain ones because the relation being proved is
/// symmetric.  The ancestor's pair may equal `pair`; only the node
/// itself is excluded, which the path already guarantees.  A plain
/// citation wins over a swapped one at the same depth.
pub fn reduce_applicable(
    path: &[(Multiset, Multiset)],
    pair: &(Multiset, Multiset),
) -> Option<(usize, bool)> {
    path.iter().enumerate().rev().find_map(|(idx, anc)| {
        if pair_leq((&anc.0, &anc.1), (&pair.0, &pair.1)) {
            Some((idx, false))
        } else if pair_leq((&anc.1, &anc.0), (&pair.0, &pair.1)) {
            Some((idx, true))
        } else {
            None
        }
    })
}

/// Outcome of a REDUCE rewrite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReduceOutcome {
    pub pair: (Multiset, Multiset),
    /// Which side of the leaf was rewritten.
    pub rewritten: Side,
}

/// Rewrites `pair` against a dominated ancestor.
///
/// The cardlex-smaller ancestor side wins: its counterpart replaces the
/// dominated portion on the opposite side of the leaf.  The combined
/// measure of the result is strictly below the leaf's, which is what
/// makes reduction well founded.
pub fn apply_reduce(
    pair: &(Multiset, Multiset),
    ancestor: &(Multiset, Multiset),
) -> ReduceOutcome {
    let (r, s) = pair;
    let (ar, asid) = ancestor;
    assert!(
        pair_leq((ar, asid), (r, s)),
        "reduce ancestor must be componentwise below the leaf"
    );
    assert_ne!(ar, asid, "reduce ancestor must have distinct sides");
    let outcome = if ar.cardlex(asid) == std::cmp::Ordering::Less {
        // Ancestor knows s' can stand in for r'; rewrite the right side.
        ReduceOutcome {
            pair: (r.clone(), s.subtract(asid).sum(ar)),
            rewritten: Side::Right,
        }
    } else {
        ReduceOutcome {
            pair: (r.subtract(ar).sum(asid), s.clone()),
            rewritten: Side::Left,
        }
    };
    assert_eq!(
        outcome.pair.0.sum(&outcome.pair.1).cardlex(&r.sum(s)),
        std::cmp::Ordering::Less,
        "reduce must strictly shrink the combined measure"
    );
    outcome
}

/// Candidate answers for one `(transition, direction)` slot, ascending
/// in the cardlex order of the combined child pair.
#[derive(Debug, Clone)]
pub struct ExpandSlot {
    pub transition: usize,
    pub direction: Direction,
    /// `(imitator, child pair)` alternatives; never empty.
    pub candidates: Vec<(usize, (Multiset, Multiset))>,
}

/// Expansion of a pair: either a transition nobody can imitate in some
/// direction (the pair fails already at game level one), or the full
/// slot table.
#[derive(Debug)]
pub enum Expansion {
    Fail {
        transition: usize,
        direction: Direction,
    },
    Slots(Vec<ExpandSlot>),
}

/// Builds the slot table for `pair`: for every transition, the
/// completed move of the left side with all right answers, then the
/// mirrored direction.
pub fn expand_slots(net: &LabeledPetriNet, pair: &(Multiset, Multiset)) -> Expansion {
    let (r, s) = pair;
    let mut slots = Vec::with_capacity(2 * net.transitions().len());
    for t in 0..net.transitions().len() {
        for direction in [Direction::LeftToRight, Direction::RightToLeft] {
            let (from, other) = match direction {
                Direction::LeftToRight => (r, s),
                Direction::RightToLeft => (s, r),
            };
            let step = net.t_children(from, other, t);
            if step.candidates.is_empty() {
                return Expansion::Fail {
                    transition: t,
                    direction,
                };
            }
            let mut candidates: Vec<(usize, (Multiset, Multiset))> = step
                .candidates
                .iter()
                .map(|(u, answer)| (*u, (step.left_result.clone(), answer.clone())))
                .collect();
            candidates.sort_by(|(_, a), (_, b)| a.0.sum(&a.1).cardlex(&b.0.sum(&b.1)));
            slots.push(ExpandSlot {
                transition: t,
                direction,
                candidates,
            });
        }
    }
    Expansion::Slots(slots)
}

/// One choice per slot, as yielded by [`expand_selections`].
#[derive(Debug, Clone)]
pub struct SelectedChild {
    pub transition: usize,
    pub imitator: usize,
    pub direction: Direction,
    pub pair: (Multiset, Multiset),
}

/// Lazy Cartesian product over the per-slot candidate lists.
pub struct SelectionIter {
    slots: Vec<ExpandSlot>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for SelectionIter {
    type Item = Vec<SelectedChild>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let selection = self
            .slots
            .iter()
            .zip(&self.odometer)
            .map(|(slot, &i)| {
                let (imitator, pair) = &slot.candidates[i];
                SelectedChild {
                    transition: slot.transition,
                    imitator: *imitator,
                    direction: slot.direction,
                    pair: pair.clone(),
                }
            })
            .collect();
        // Advance like an odometer, least significant slot last.
        self.done = true;
        for i in (0..self.slots.len()).rev() {
            if self.odometer[i] + 1 < self.slots[i].candidates.len() {
                self.odometer[i] += 1;
                self.odometer[i + 1..].iter_mut().for_each(|d| *d = 0);
                self.done = false;
                break;
            }
        }
        Some(selection)
    }
}

/// All ways to commit one answer per slot, or the failing slot.
pub fn expand_selections(
    net: &LabeledPetriNet,
    pair: &(Multiset, Multiset),
) -> Result<SelectionIter, (usize, Direction)> {
    match expand_slots(net, pair) {
        Expansion::Fail {
            transition,
            direction,
        } => Err((transition, direction)),
        Expansion::Slots(slots) => {
            let odometer = vec![0; slots.len()];
            Ok(SelectionIter {
                slots,
                odometer,
                done: false,
            })
        }
    }
}

/// Search effort counters for one `decide` call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_created: u64,
    pub expand_count: u64,
    pub reduce_count: u64,
    pub backtracks: u64,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes {}, expand {}, reduce {}, backtracks {}",
            self.nodes_created, self.expand_count, self.reduce_count, self.backtracks
        )
    }
}

/// Evidence for a NO verdict: a reached pair that already fails the
/// one-round game, plus the branch that led to it.  The verdict itself
/// additionally rests on all answer choices having been exhausted.
#[derive(Debug, Clone)]
pub struct NoWitness {
    pub leaf: (Multiset, Multiset),
    pub transition: usize,
    pub direction: Direction,
    /// Root-to-leaf pairs of the last failing branch with the rule
    /// applied at each inner node; the final entry is the failing leaf.
    pub trace: Vec<((Multiset, Multiset), &'static str)>,
}

impl NoWitness {
    pub fn describe(&self, net: &LabeledPetriNet) -> String {
        let t = net.transition(self.transition);
        let (mover, imitator) = match self.direction {
            Direction::LeftToRight => (&self.leaf.0, &self.leaf.1),
            Direction::RightToLeft => (&self.leaf.1, &self.leaf.0),
        };
        format!(
            "pair ({}, {}) fails one round: completing {} ({}) for {} leaves {} without an answer",
            self.leaf.0, self.leaf.1, t.name, t.label, mover, imitator
        )
    }
}

/// Verdict of a `decide` call.
#[derive(Debug, Clone)]
pub enum Outcome {
    Yes(Certificate),
    No(NoWitness),
    BudgetExceeded { nodes_explored: u64 },
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self.outcome, Outcome::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self.outcome, Outcome::No(_))
    }
}

type PairKey = (Vec<u64>, Vec<u64>);

fn key_of(pair: &(Multiset, Multiset)) -> PairKey {
    (pair.0.counts().to_vec(), pair.1.counts().to_vec())
}

// Shallowest absolute path index a derivation cites through REDUCE;
// `NO_DEPENDENCY` marks a derivation that stands on its own.
const NO_DEPENDENCY: usize = usize::MAX;

enum SearchFail {
    Exhausted { dependency: usize },
    Budget,
}

/// A globally valid refutation fact: the recorded pair fails already
/// at one game round on the recorded slot.
#[derive(Clone)]
struct CachedFailure {
    leaf: (Multiset, Multiset),
    transition: usize,
    direction: Direction,
}

// A cached proof tree mirrors by swapping the root pair and flipping
// each root edge's direction.  Edge children are stored mover-first,
// so the same completed move reads back unchanged under the flipped
// direction and every subtree stays as it is; only reduce nodes whose
// citation resolves to the swapped root must flip their orientation
// flag to keep citing the pair they originally cited.  Cached trees
// are rooted at identity or expand nodes and never cite above their
// own root, which makes this mapping total and an involution.
fn mirror_node(node: &TableauNode) -> TableauNode {
    let pair = (node.pair.1.clone(), node.pair.0.clone());
    let rule = match &node.rule {
        Rule::Identity => Rule::Identity,
        Rule::Expand { edges } => Rule::Expand {
            edges: edges
                .iter()
                .map(|e| ExpandEdge {
                    transition: e.transition,
                    imitator: e.imitator,
                    direction: e.direction.flip(),
                    node: flip_root_citations(&e.node, 1),
                })
                .collect(),
        },
        Rule::Reduce { .. } => unreachable!("cached trees never start with a rewrite"),
    };
    TableauNode { pair, rule }
}

// `node` sits `to_root` levels below a root whose sides were swapped;
// a citation reaching exactly that far now resolves to the swapped
// pair, so its orientation flag flips.  Everything nearer is untouched
// by the swap, and nothing cites farther.
fn flip_root_citations(node: &TableauNode, to_root: usize) -> TableauNode {
    let rule = match &node.rule {
        Rule::Identity => Rule::Identity,
        Rule::Reduce {
            levels_up,
            mirrored,
            child,
        } => {
            debug_assert!(*levels_up <= to_root, "citation escapes the mirrored tree");
            Rule::Reduce {
                levels_up: *levels_up,
                mirrored: if *levels_up == to_root {
                    !*mirrored
                } else {
                    *mirrored
                },
                child: Box::new(flip_root_citations(child, to_root + 1)),
            }
        }
        Rule::Expand { edges } => Rule::Expand {
            edges: edges
                .iter()
                .map(|e| ExpandEdge {
                    transition: e.transition,
                    imitator: e.imitator,
                    direction: e.direction,
                    node: flip_root_citations(&e.node, to_root + 1),
                })
                .collect(),
        },
    };
    TableauNode {
        pair: node.pair.clone(),
        rule,
    }
}

// Root path of the branch under construction, with the rule kind that
// discharged each inner node.
struct Path {
    pairs: Vec<(Multiset, Multiset)>,
    kinds: Vec<&'static str>,
}

impl Path {
    fn push(&mut self, pair: (Multiset, Multiset), kind: &'static str) {
        self.pairs.push(pair);
        self.kinds.push(kind);
    }

    fn pop(&mut self) {
        self.pairs.pop();
        self.kinds.pop();
    }
}

// First-round cap on proof search nodes; it doubles every round.
const BASE_ROUND_BUDGET: u64 = 512;

// Candidates failing the stratified game this early are dismissed
// without any recursion, whatever the current round level is.
const SCREEN_LEVEL: u32 = 2;

/// Reusable decision procedure over one net.
///
/// Two complete half-procedures run in escalating rounds.  The
/// stratified games refute: a pair that is not interchangeable fails
/// the game at some finite level, and round `k` checks level `k`.
/// The proof search certifies: a completed tree exists exactly for
/// interchangeable pairs, and round `k` searches under a node budget
/// that doubles each round, pruning any subgoal the level-`k` game
/// already refutes.  Pruning only ever removes non-equivalent
/// subgoals, so it never blocks a valid tree, and a slot whose
/// candidates are all pruned or refuted is a sound failure; whichever
/// half halts first settles the query.
///
/// Only path-independent facts are memoized across rounds and
/// branches.  Every recursive result carries the shallowest path
/// ancestor its derivation cites through REDUCE; a result citing
/// nothing above its own node is a fact about the pair alone and
/// enters a global cache, in both orientations.  A cached YES tree is
/// grafted in as a subtree, which stays sound because its ancestor
/// references never point above its own root; a cached NO is a
/// refutation whose sub-arguments either stand alone or cite the
/// refuted pair itself, which a cut on the pair's truth discharges.
/// Results whose derivation leans on a strictly higher ancestor stay
/// confined to their branch.
pub struct DecisionEngine<'n> {
    net: &'n LabeledPetriNet,
    oracle: StrataChecker<'n>,
    no_cache: HashMap<PairKey, CachedFailure>,
    yes_cache: HashMap<PairKey, TableauNode>,
}

impl<'n> DecisionEngine<'n> {
    pub fn new(net: &'n LabeledPetriNet) -> Self {
        DecisionEngine {
            net,
            oracle: StrataChecker::new(net),
            no_cache: HashMap::new(),
            yes_cache: HashMap::new(),
        }
    }

    pub fn net(&self) -> &'n LabeledPetriNet {
        self.net
    }

    /// Decides whether the two resources are interchangeable under
    /// every context.  `budget` caps created search nodes across all
    /// escalation rounds.
    pub fn decide(
        &mut self,
        r0: &Multiset,
        s0: &Multiset,
        budget: Option<u64>,
    ) -> Verdict {
        let mut stats = SearchStats::default();
        let mut last_failure = None;
        let pair = (r0.clone(), s0.clone());
        let mut round_budget = BASE_ROUND_BUDGET;
        let mut level: u32 = 1;
        loop {
            // Refuting half: the level-`level` game decides NO
            // completely once the level reaches the distinguishing
            // depth.
            if let Some(found) = self.oracle.one_round_failure(r0, s0, level) {
                let failure = CachedFailure {
                    leaf: found.pair,
                    transition: found.transition,
                    direction: match found.side {
                        Side::Left => Direction::LeftToRight,
                        Side::Right => Direction::RightToLeft,
                    },
                };
                self.cache_no(&pair, &failure);
                let empty = Path {
                    pairs: Vec::new(),
                    kinds: Vec::new(),
                };
                self.record_failure(&mut last_failure, &empty, &pair, &failure);
                return Verdict {
                    outcome: Outcome::No(last_failure.expect("failure just recorded")),
                    stats,
                };
            }
            // Proving half under this round's node cap.
            let cap = match budget {
                Some(total) => {
                    if stats.nodes_created >= total {
                        return Verdict {
                            outcome: Outcome::BudgetExceeded {
                                nodes_explored: stats.nodes_created,
                            },
                            stats,
                        };
                    }
                    (stats.nodes_created + round_budget).min(total)
                }
                None => stats.nodes_created + round_budget,
            };
            let mut path = Path {
                pairs: Vec::new(),
                kinds: Vec::new(),
            };
            match self.solve(
                pair.clone(),
                &mut path,
                &mut stats,
                Some(cap),
                level,
                &mut last_failure,
            ) {
                Ok((root, _)) => {
                    self.cache_yes(&pair, &root);
                    let certificate = Certificate {
                        net_hash: self.net.fingerprint(),
                        query: pair,
                        root,
                    };
                    return Verdict {
                        outcome: Outcome::Yes(certificate),
                        stats,
                    };
                }
                Err(SearchFail::Exhausted { .. }) => {
                    return Verdict {
                        outcome: Outcome::No(
                            last_failure
                                .expect("an exhausted search saw at least one failing leaf"),
                        ),
                        stats,
                    };
                }
                Err(SearchFail::Budget) => {
                    if budget.is_some_and(|total| stats.nodes_created >= total) {
                        return Verdict {
                            outcome: Outcome::BudgetExceeded {
                                nodes_explored: stats.nodes_created,
                            },
                            stats,
                        };
                    }
                    round_budget = round_budget.saturating_mul(2);
                    level += 1;
                }
            }
        }
    }

    fn cache_no(&mut self, pair: &(Multiset, Multiset), failure: &CachedFailure) {
        let mirrored = CachedFailure {
            leaf: (failure.leaf.1.clone(), failure.leaf.0.clone()),
            transition: failure.transition,
            direction: failure.direction.flip(),
        };
        self.no_cache
            .insert(key_of(&(pair.1.clone(), pair.0.clone())), mirrored);
        self.no_cache.insert(key_of(pair), failure.clone());
    }

    fn cache_yes(&mut self, pair: &(Multiset, Multiset), node: &TableauNode) {
        self.yes_cache
            .insert(key_of(&(pair.1.clone(), pair.0.clone())), mirror_node(node));
        self.yes_cache.insert(key_of(pair), node.clone());
    }

    fn solve(
        &mut self,
        pair: (Multiset, Multiset),
        path: &mut Path,
        stats: &mut SearchStats,
        budget: Option<u64>,
        level: u32,
        last_failure: &mut Option<NoWitness>,
    ) -> Result<(TableauNode, usize), SearchFail> {
        stats.nodes_created += 1;
        if budget.is_some_and(|b| stats.nodes_created > b) {
            return Err(SearchFail::Budget);
        }
        if pair.0 == pair.1 {
            return Ok((
                TableauNode {
                    pair,
                    rule: Rule::Identity,
                },
                NO_DEPENDENCY,
            ));
        }
        if let Some(tree) = self.yes_cache.get(&key_of(&pair)) {
            return Ok((tree.clone(), NO_DEPENDENCY));
        }

        let depth = path.pairs.len();

        // REDUCE takes precedence and is deterministic, so a failing
        // reduced child fails this node outright.  Either way the
        // result leans on the cited ancestor, which sits strictly
        // above this node, so it never enters the global caches here.
        if let Some((idx, mirrored)) = reduce_applicable(&path.pairs, &pair) {
            let anc = &path.pairs[idx];
            let cited = if mirrored {
                (anc.1.clone(), anc.0.clone())
            } else {
                anc.clone()
            };
            let outcome = apply_reduce(&pair, &cited);
            let levels_up = depth - idx;
            stats.reduce_count += 1;
            path.push(pair.clone(), "reduce");
            let child = self.solve(outcome.pair, path, stats, budget, level, last_failure);
            path.pop();
            return match child {
                Ok((child, dependency)) => Ok((
                    TableauNode {
                        pair,
                        rule: Rule::Reduce {
                            levels_up,
                            mirrored,
                            child: Box::new(child),
                        },
                    },
                    dependency.min(idx),
                )),
                Err(SearchFail::Exhausted { dependency }) => Err(SearchFail::Exhausted {
                    dependency: dependency.min(idx),
                }),
                Err(SearchFail::Budget) => Err(SearchFail::Budget),
            };
        }

        if let Some(failure) = self.no_cache.get(&key_of(&pair)) {
            let failure = failure.clone();
            self.record_failure(last_failure, path, &pair, &failure);
            return Err(SearchFail::Exhausted {
                dependency: NO_DEPENDENCY,
            });
        }
        if let Some(found) = self.oracle.one_round_failure(&pair.0, &pair.1, level) {
            let failure = CachedFailure {
                leaf: found.pair,
                transition: found.transition,
                direction: match found.side {
                    Side::Left => Direction::LeftToRight,
                    Side::Right => Direction::RightToLeft,
                },
            };
            self.cache_no(&pair, &failure);
            self.record_failure(last_failure, path, &pair, &failure);
            return Err(SearchFail::Exhausted {
                dependency: NO_DEPENDENCY,
            });
        }
        let slots = match expand_slots(self.net, &pair) {
            Expansion::Fail {
                transition,
                direction,
            } => {
                let failure = CachedFailure {
                    leaf: pair.clone(),
                    transition,
                    direction,
                };
                self.cache_no(&pair, &failure);
                self.record_failure(last_failure, path, &pair, &failure);
                return Err(SearchFail::Exhausted {
                    dependency: NO_DEPENDENCY,
                });
            }
            Expansion::Slots(slots) => slots,
        };

        // Triage every slot on cheap evidence before any recursion:
        // identical sides and cached trees commit a slot outright,
        // cached refutations and fixed-level game failures dismiss a
        // candidate outright.  A slot whose candidates are all
        // dismissed refutes the whole pair on absolute grounds, so no
        // other slot is worth searching.
        path.push(pair.clone(), "expand");
        let mut triaged = Vec::with_capacity(slots.len());
        let mut dead_slot: Option<CachedFailure> = None;
        for slot in &slots {
            let mut committed = None;
            let mut loss: Option<CachedFailure> = None;
            // Candidates a path ancestor dominates rewrite toward that
            // ancestor and usually close on the spot, so they go ahead
            // of the plain ones when the slot needs real search.
            let mut reducible = Vec::new();
            let mut plain = Vec::new();
            for (imitator, child_pair) in &slot.candidates {
                if child_pair.0 == child_pair.1 {
                    committed = Some(ExpandEdge {
                        transition: slot.transition,
                        imitator: *imitator,
                        direction: slot.direction,
                        node: TableauNode {
                            pair: child_pair.clone(),
                            rule: Rule::Identity,
                        },
                    });
                    stats.nodes_created += 1;
                    break;
                }
                if let Some(tree) = self.yes_cache.get(&key_of(child_pair)) {
                    committed = Some(ExpandEdge {
                        transition: slot.transition,
                        imitator: *imitator,
                        direction: slot.direction,
                        node: tree.clone(),
                    });
                    stats.nodes_created += 1;
                    break;
                }
                if let Some(failure) = self.no_cache.get(&key_of(child_pair)) {
                    loss = Some(failure.clone());
                    stats.backtracks += 1;
                    continue;
                }
                let screened =
                    self.oracle
                        .one_round_failure(&child_pair.0, &child_pair.1, SCREEN_LEVEL);
                if let Some(found) = screened {
                    let failure = CachedFailure {
                        leaf: found.pair,
                        transition: found.transition,
                        direction: match found.side {
                            Side::Left => Direction::LeftToRight,
                            Side::Right => Direction::RightToLeft,
                        },
                    };
                    self.cache_no(child_pair, &failure);
                    loss = Some(failure);
                    stats.backtracks += 1;
                    continue;
                }
                if reduce_applicable(&path.pairs, child_pair).is_some() {
                    reducible.push((*imitator, child_pair.clone()));
                } else {
                    plain.push((*imitator, child_pair.clone()));
                }
            }
            if committed.is_none() && reducible.is_empty() && plain.is_empty() {
                dead_slot = Some(loss.expect("a dismissed slot saw at least one candidate"));
                break;
            }
            triaged.push((committed, reducible, plain));
        }
        if let Some(failure) = dead_slot {
            path.pop();
            self.record_failure(last_failure, path, &pair, &failure);
            // The dismissals rest on global caches and fixed-level
            // games only, so this refutation holds anywhere.
            self.cache_no(&pair, &failure);
            return Err(SearchFail::Exhausted {
                dependency: NO_DEPENDENCY,
            });
        }

        // Child problems depend only on their pair and this root path,
        // not on sibling choices, so each slot is settled on its own
        // and identical child pairs are solved once and shared.
        let mut settled: HashMap<PairKey, Result<(TableauNode, usize), usize>> = HashMap::new();
        let mut edges = Vec::with_capacity(slots.len());
        let mut subtree_dependency = NO_DEPENDENCY;
        for (slot, (mut committed, reducible, plain)) in slots.iter().zip(triaged) {
            // A slot exhausts only if every candidate fails; the
            // refutation then rests on those failures' combined
            // dependencies.
            let mut slot_dependency = NO_DEPENDENCY;
            if committed.is_none() {
                for (imitator, child_pair) in reducible.into_iter().chain(plain) {
                    let key = key_of(&child_pair);
                    let outcome = match settled.get(&key) {
                        Some(hit) => hit.clone(),
                        None => {
                            match self.solve(
                                child_pair.clone(),
                                path,
                                stats,
                                budget,
                                level,
                                last_failure,
                            ) {
                                Ok(done) => {
                                    settled.insert(key, Ok(done.clone()));
                                    Ok(done)
                                }
                                Err(SearchFail::Budget) => {
                                    path.pop();
                                    return Err(SearchFail::Budget);
                                }
                                Err(SearchFail::Exhausted { dependency }) => {
                                    settled.insert(key, Err(dependency));
                                    Err(dependency)
                                }
                            }
                        }
                    };
                    match outcome {
                        Ok((node, dependency)) => {
                            subtree_dependency = subtree_dependency.min(dependency);
                            committed = Some(ExpandEdge {
                                transition: slot.transition,
                                imitator,
                                direction: slot.direction,
                                node,
                            });
                            break;
                        }
                        Err(dependency) => {
                            slot_dependency = slot_dependency.min(dependency);
                            stats.backtracks += 1;
                        }
                    }
                }
            }
            match committed {
                Some(edge) => edges.push(edge),
                None => {
                    // No answer for this slot survives; the pair fails.
                    path.pop();
                    // A refutation citing only this pair's own frame is
                    // a fact about the pair and is kept.
                    if slot_dependency >= depth {
                        if let Some(w) = last_failure.as_ref() {
                            let failure = CachedFailure {
                                leaf: w.leaf.clone(),
                                transition: w.transition,
                                direction: w.direction,
                            };
                            self.cache_no(&pair, &failure);
                        }
                        return Err(SearchFail::Exhausted {
                            dependency: NO_DEPENDENCY,
                        });
                    }
                    return Err(SearchFail::Exhausted {
                        dependency: slot_dependency,
                    });
                }
            }
        }
        path.pop();
        stats.expand_count += 1;
        let node = TableauNode {
            pair: pair.clone(),
            rule: Rule::Expand { edges },
        };
        if subtree_dependency >= depth {
            self.cache_yes(&pair, &node);
            return Ok((node, NO_DEPENDENCY));
        }
        Ok((node, subtree_dependency))
    }

    fn record_failure(
        &self,
        last_failure: &mut Option<NoWitness>,
        path: &Path,
        pair: &(Multiset, Multiset),
        failure: &CachedFailure,
    ) {
        let mut trace: Vec<((Multiset, Multiset), &'static str)> = path
            .pairs
            .iter()
            .cloned()
            .zip(path.kinds.iter().copied())
            .collect();
        trace.push((pair.clone(), "fail"));
        *last_failure = Some(NoWitness {
            leaf: failure.leaf.clone(),
            transition: failure.transition,
            direction: failure.direction,
            trace,
        });
    }
}

/// A closed proof tree bound to a net fingerprint and a query.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub net_hash: String,
    pub query: (Multiset, Multiset),
    pub root: TableauNode,
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("unreadable certificate: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed certificate at {at}: {reason}")]
    Malformed { at: String, reason: String },
    #[error("certificate does not apply: {reason}")]
    WrongNet { reason: String },
    #[error("invalid certificate at {at}: {reason}")]
    Invalid { at: String, reason: String },
}

impl CertificateError {
    /// Structural problems mean the file could not even be decoded
    /// against the net; they map to the usage exit code, not the
    /// invalid-certificate one.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            CertificateError::Json(_) | CertificateError::Malformed { .. }
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CertDoc {
    net_hash: String,
    query: [String; 2],
    #[serde(flatten)]
    root: NodeDoc,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    pair: [String; 2],
    rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ancestor_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mirrored: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    child: Option<Box<NodeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    children: Option<Vec<EdgeDoc>>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    t: String,
    u: String,
    direction: String,
    node: NodeDoc,
}

impl Certificate {
    pub fn node_count(&self) -> u64 {
        self.root.node_count()
    }

    /// One-line JSON with transition names resolved against `net`.
    pub fn to_json(&self, net: &LabeledPetriNet) -> String {
        serde_json::to_string(&self.to_doc(net)).expect("certificate serialization")
    }

    /// Indented JSON with transition names resolved against `net`.
    pub fn to_json_pretty(&self, net: &LabeledPetriNet) -> String {
        serde_json::to_string_pretty(&self.to_doc(net)).expect("certificate serialization")
    }

    fn to_doc(&self, net: &LabeledPetriNet) -> CertDoc {
        let mut root = node_to_doc(&self.root);
        patch_names(net, &self.root, &mut root);
        CertDoc {
            net_hash: self.net_hash.clone(),
            query: [self.query.0.to_string(), self.query.1.to_string()],
            root,
        }
    }

    /// Parses a certificate against `net`'s universe and transition
    /// names.  Only structure is checked here; run
    /// [`verify_certificate`] for the semantic conditions.
    pub fn from_json(net: &LabeledPetriNet, text: &str) -> Result<Self, CertificateError> {
        let doc: CertDoc = serde_json::from_str(text)?;
        let parse_ms = |at: &str, text: &str| {
            net.places()
                .parse_resource(text)
                .map_err(|e| CertificateError::Malformed {
                    at: at.to_string(),
                    reason: e.to_string(),
                })
        };
        let query = (
            parse_ms("query[0]", &doc.query[0])?,
            parse_ms("query[1]", &doc.query[1])?,
        );
        let root = node_from_doc(net, &doc.root, "root")?;
        Ok(Certificate {
            net_hash: doc.net_hash,
            query,
            root,
        })
    }
}

fn node_to_doc(node: &TableauNode) -> NodeDoc {
    let mut doc = NodeDoc {
        pair: [node.pair.0.to_string(), node.pair.1.to_string()],
        rule: String::new(),
        ancestor_depth: None,
        mirrored: None,
        child: None,
        children: None,
    };
    match &node.rule {
        Rule::Identity => doc.rule = "identity".into(),
        Rule::Reduce {
            levels_up,
            mirrored,
            child,
        } => {
            doc.rule = "reduce".into();
            doc.ancestor_depth = Some(*levels_up);
            doc.mirrored = mirrored.then_some(true);
            doc.child = Some(Box::new(node_to_doc(child)));
        }
        Rule::Expand { edges } => {
            doc.rule = "expand".into();
            doc.children = Some(edges.iter().map(edge_to_doc).collect());
        }
    }
    doc
}

fn edge_to_doc(edge: &ExpandEdge) -> EdgeDoc {
    EdgeDoc {
        t: String::new(),
        u: String::new(),
        direction: edge.direction.as_str().to_string(),
        node: node_to_doc(&edge.node),
    }
}

fn node_from_doc(
    net: &LabeledPetriNet,
    doc: &NodeDoc,
    at: &str,
) -> Result<TableauNode, CertificateError> {
    let malformed = |reason: String| CertificateError::Malformed {
        at: at.to_string(),
        reason,
    };
    let parse_ms = |text: &str| {
        net.places()
            .parse_resource(text)
            .map_err(|e| malformed(e.to_string()))
    };
    let pair = (parse_ms(&doc.pair[0])?, parse_ms(&doc.pair[1])?);
    let rule = match doc.rule.as_str() {
        "identity" => {
            if doc.ancestor_depth.is_some()
                || doc.mirrored.is_some()
                || doc.child.is_some()
                || doc.children.is_some()
            {
                return Err(malformed("identity nodes carry no extra fields".into()));
            }
            Rule::Identity
        }
        "reduce" => {
            if doc.children.is_some() {
                return Err(malformed("reduce nodes have a single `child`".into()));
            }
            let levels_up = doc
                .ancestor_depth
                .ok_or_else(|| malformed("reduce node without ancestor_depth".into()))?;
            let child_doc = doc
                .child
                .as_ref()
                .ok_or_else(|| malformed("reduce node without child".into()))?;
            let child = node_from_doc(net, child_doc, &format!("{at}.child"))?;
            Rule::Reduce {
                levels_up,
                mirrored: doc.mirrored.unwrap_or(false),
                child: Box::new(child),
            }
        }
        "expand" => {
            if doc.ancestor_depth.is_some() || doc.mirrored.is_some() || doc.child.is_some() {
                return Err(malformed("expand nodes carry only `children`".into()));
            }
            let edge_docs = doc
                .children
                .as_ref()
                .ok_or_else(|| malformed("expand node without children".into()))?;
            let mut edges = Vec::with_capacity(edge_docs.len());
            for (i, e) in edge_docs.iter().enumerate() {
                let eat = format!("{at}.children[{i}]");
                let lookup = |name: &str| {
                    net.transition_by_name(name).ok_or_else(|| {
                        CertificateError::Malformed {
                            at: eat.clone(),
                            reason: format!("unknown transition `{name}`"),
                        }
                    })
                };
                let direction = match e.direction.as_str() {
                    "lr" => Direction::LeftToRight,
                    "rl" => Direction::RightToLeft,
                    other => {
                        return Err(CertificateError::Malformed {
                            at: eat,
                            reason: format!("unknown direction `{other}`"),
                        })
                    }
                };
                edges.push(ExpandEdge {
                    transition: lookup(&e.t)?,
                    imitator: lookup(&e.u)?,
                    direction,
                    node: node_from_doc(net, &e.node, &format!("{eat}.node"))?,
                });
            }
            Rule::Expand { edges }
        }
        other => return Err(malformed(format!("unknown rule `{other}`"))),
    };
    Ok(TableauNode { pair, rule })
}

// Edge documents carry transition names, which live in the net; fill
// them in during a post-pass over the freshly built document tree.
fn patch_names(net: &LabeledPetriNet, node: &TableauNode, doc: &mut NodeDoc) {
    match (&node.rule, doc) {
        (Rule::Reduce { child, .. }, NodeDoc { child: Some(cd), .. }) => {
            patch_names(net, child, cd)
        }
        (Rule::Expand { edges }, NodeDoc {
            children: Some(eds),
            ..
        }) => {
            for (edge, ed) in edges.iter().zip(eds.iter_mut()) {
                ed.t = net.transition(edge.transition).name.clone();
                ed.u = net.transition(edge.imitator).name.clone();
                patch_names(net, &edge.node, &mut ed.node);
            }
        }
        _ => {}
    }
}

/// Re-checks a certificate against the net alone.
///
/// Conditions: the fingerprint matches the net, the root carries the
/// query, identity leaves have equal sides, reduce nodes cite the
/// nearest dominated ancestor on their own root path and rewrite
/// exactly as [`apply_reduce`] does, and expand nodes cover every
/// transition in both directions with genuine completed answers.
/// Nothing from the search is trusted; every firing is recomputed.
pub fn verify_certificate(
    net: &LabeledPetriNet,
    cert: &Certificate,
) -> Result<(), CertificateError> {
    let expected = net.fingerprint();
    if cert.net_hash != expected {
        return Err(CertificateError::WrongNet {
            reason: format!(
                "fingerprint {} does not match the net's {}",
                cert.net_hash, expected
            ),
        });
    }
    if cert.root.pair != cert.query {
        return Err(CertificateError::Invalid {
            at: "root".into(),
            reason: "root pair differs from the query".into(),
        });
    }
    let mut path = Vec::new();
    verify_node(net, &cert.root, &mut path, "root")
}

fn verify_node(
    net: &LabeledPetriNet,
    node: &TableauNode,
    path: &mut Vec<(Multiset, Multiset)>,
    at: &str,
) -> Result<(), CertificateError> {
    let invalid = |reason: String| CertificateError::Invalid {
        at: at.to_string(),
        reason,
    };
    let (r, s) = &node.pair;
    match &node.rule {
        Rule::Identity => {
            if r != s {
                return Err(invalid("identity leaf with distinct sides".into()));
            }
            Ok(())
        }
        Rule::Reduce {
            levels_up,
            mirrored,
            child,
        } => {
            if r == s {
                return Err(invalid("reduce applied to an identity pair".into()));
            }
            if *levels_up == 0 || *levels_up > path.len() {
                return Err(invalid(format!(
                    "ancestor_depth {} outside the root path (depth {})",
                    levels_up,
                    path.len()
                )));
            }
            let stored = &path[path.len() - levels_up];
            let ancestor = if *mirrored {
                (stored.1.clone(), stored.0.clone())
            } else {
                stored.clone()
            };
            if !pair_leq((&ancestor.0, &ancestor.1), (r, s)) {
                return Err(invalid(
                    "cited ancestor is not componentwise below the node".into(),
                ));
            }
            // Pin the citation to the nearest qualifying ancestor.
            // Domination alone would let a certificate cite any of
            // several ancestors with identical pairs; the search always
            // commits the nearest, so anything else is tampering.
            let canonical = reduce_applicable(path, &node.pair)
                .expect("the cited ancestor qualifies")
                .0;
            if canonical != path.len() - levels_up {
                return Err(invalid(format!(
                    "ancestor_depth {} skips a nearer dominated ancestor",
                    levels_up
                )));
            }
            let expected = apply_reduce(&node.pair, &ancestor);
            if child.pair != expected.pair {
                return Err(invalid(format!(
                    "reduce child is ({}, {}), expected ({}, {})",
                    child.pair.0, child.pair.1, expected.pair.0, expected.pair.1
                )));
            }
            path.push(node.pair.clone());
            let res = verify_node(net, child, path, &format!("{at}.child"));
            path.pop();
            res
        }
        Rule::Expand { edges } => {
            if r == s {
                return Err(invalid("expand applied to an identity pair".into()));
            }
            // Exactly one committed answer per transition and direction.
            let mut seen = vec![[false; 2]; net.transitions().len()];
            for edge in edges {
                if edge.transition >= net.transitions().len() {
                    return Err(invalid("edge transition out of range".into()));
                }
                let d = match edge.direction {
                    Direction::LeftToRight => 0,
                    Direction::RightToLeft => 1,
                };
                if seen[edge.transition][d] {
                    return Err(invalid(format!(
                        "duplicate edge for {} {}",
                        net.transition(edge.transition).name,
                        edge.direction
                    )));
                }
                seen[edge.transition][d] = true;
            }
            if let Some(t) = seen.iter().position(|ds| !ds[0] || !ds[1]) {
                return Err(invalid(format!(
                    "missing edge for transition {}",
                    net.transition(t).name
                )));
            }
            path.push(node.pair.clone());
            for (i, edge) in edges.iter().enumerate() {
                let eat = format!("{at}.children[{i}]");
                let einvalid = |reason: String| CertificateError::Invalid {
                    at: eat.clone(),
                    reason,
                };
                let t = net.transition(edge.transition);
                let u = net.transition(edge.imitator);
                if t.label != u.label {
                    path.pop();
                    return Err(einvalid(format!(
                        "answer {} has label {}, mover {} has label {}",
                        u.name, u.label, t.name, t.label
                    )));
                }
                let (from, other) = match edge.direction {
                    Direction::LeftToRight => (r, s),
                    Direction::RightToLeft => (s, r),
                };
                let step = net.t_children(from, other, edge.transition);
                let genuine = edge.node.pair.0 == step.left_result
                    && step
                        .candidates
                        .iter()
                        .any(|(u, answer)| *u == edge.imitator && *answer == edge.node.pair.1);
                if !genuine {
                    path.pop();
                    return Err(einvalid(format!(
                        "({}, {}) is not the completed {}-move answered by {}",
                        edge.node.pair.0, edge.node.pair.1, t.name, u.name
                    )));
                }
                if let Err(e) = verify_node(net, &edge.node, path, &format!("{eat}.node")) {
                    path.pop();
                    return Err(e);
                }
            }
            path.pop();
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::StrataChecker;

    fn buying() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/buying.net")).unwrap()
    }

    fn two_kinds() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/bisimilar-not-similar.net")).unwrap()
    }

    fn two_components() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/similar-not-bisimilar.net")).unwrap()
    }

    fn communication_free() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/communication-free.net")).unwrap()
    }

    fn ms(net: &LabeledPetriNet, text: &str) -> Multiset {
        net.places().parse_resource(text).unwrap()
    }

    #[test]
    fn reduce_applicability_scans_for_the_deepest_dominated_ancestor() {
        let net = buying();
        let root = (ms(&net, "10cent:1"), ms(&net, "5cent:2"));
        let leaf = (ms(&net, "10cent:1,Bought:1"), ms(&net, "5cent:2,Bought:1"));
        assert_eq!(reduce_applicable(&[], &leaf), None);
        assert_eq!(reduce_applicable(&[root.clone()], &leaf), Some((0, false)));
        // A second qualifying ancestor closer to the leaf wins.
        let mid = (ms(&net, "10cent:1,Bought:1"), ms(&net, "5cent:2"));
        let deep = (
            ms(&net, "10cent:1,Bought:2"),
            ms(&net, "5cent:2,Bought:1"),
        );
        assert_eq!(
            reduce_applicable(&[root.clone(), mid], &deep),
            Some((1, false))
        );
        // Swapped orientation still dominates, flagged as mirrored.
        let swapped = (ms(&net, "5cent:2,Bought:1"), ms(&net, "10cent:1,Bought:1"));
        assert_eq!(reduce_applicable(&[root], &swapped), Some((0, true)));
    }

    #[test]
    fn apply_reduce_rewrites_toward_the_smaller_ancestor_side() {
        let net = buying();
        // Ancestor's left side is cardlex-smaller: right side rewritten.
        let leaf = (ms(&net, "10cent:1,Bought:1"), ms(&net, "5cent:2,Bought:1"));
        let anc = (ms(&net, "10cent:1"), ms(&net, "5cent:2"));
        let out = apply_reduce(&leaf, &anc);
        assert_eq!(out.rewritten, Side::Right);
        assert_eq!(out.pair.0, ms(&net, "10cent:1,Bought:1"));
        assert_eq!(out.pair.1, ms(&net, "10cent:1,Bought:1"));
        // Mirrored orientation rewrites the left side instead.
        let leaf = (ms(&net, "5cent:2,Bought:2"), ms(&net, "10cent:1,Bought:2"));
        let anc = (ms(&net, "5cent:2,Bought:1"), ms(&net, "10cent:1,Bought:1"));
        let out = apply_reduce(&leaf, &anc);
        assert_eq!(out.rewritten, Side::Left);
        assert_eq!(out.pair.0, ms(&net, "10cent:1,Bought:2"));
        assert_eq!(out.pair.1, ms(&net, "10cent:1,Bought:2"));
    }

    #[test]
    fn repeated_pair_on_the_path_reduces_to_identity() {
        let net = buying();
        let pair = (ms(&net, "10cent:1"), ms(&net, "5cent:2"));
        assert_eq!(reduce_applicable(&[pair.clone()], &pair), Some((0, false)));
        let out = apply_reduce(&pair, &pair);
        assert_eq!(out.pair.0, out.pair.1);
        // A sides-swapped repeat closes the same way through the
        // mirrored citation.
        let flipped = (pair.1.clone(), pair.0.clone());
        assert_eq!(reduce_applicable(&[pair.clone()], &flipped), Some((0, true)));
        let out = apply_reduce(&flipped, &flipped);
        assert_eq!(out.pair.0, out.pair.1);
    }

    #[test]
    #[should_panic(expected = "componentwise below")]
    fn apply_reduce_rejects_non_dominating_ancestors() {
        let net = buying();
        let leaf = (ms(&net, "10cent:1"), ms(&net, "5cent:2"));
        let anc = (ms(&net, "Shop:1"), ms(&net, "5cent:1"));
        let _ = apply_reduce(&leaf, &anc);
    }

    #[test]
    fn expansion_fails_where_no_answer_exists() {
        let net = two_components();
        let pair = (ms(&net, "X3:1"), net.places().empty());
        match expand_slots(&net, &pair) {
            Expansion::Fail {
                transition,
                direction,
            } => {
                assert_eq!(net.transition(transition).name, "t5");
                assert_eq!(direction, Direction::LeftToRight);
            }
            Expansion::Slots(_) => panic!("expected a failing slot"),
        }
    }

    #[test]
    fn expansion_slots_cover_all_transitions_both_ways() {
        let net = buying();
        let pair = (ms(&net, "10cent:1"), ms(&net, "5cent:2"));
        let slots = match expand_slots(&net, &pair) {
            Expansion::Slots(slots) => slots,
            Expansion::Fail { .. } => panic!("no slot should fail here"),
        };
        assert_eq!(slots.len(), 6);
        // The two-dime purchase completed on the left is answered by the
        // mixed-coin purchase from the padded right side.
        let slot = &slots[0];
        assert_eq!(net.transition(slot.transition).name, "t1");
        assert_eq!(slot.direction, Direction::LeftToRight);
        assert_eq!(slot.candidates.len(), 1);
        let (u, child) = &slot.candidates[0];
        assert_eq!(net.transition(*u).name, "t2");
        assert_eq!(child.0, ms(&net, "Bought:1"));
        assert_eq!(child.1, ms(&net, "Bought:1"));
    }

    #[test]
    fn selection_iterator_walks_the_product() {
        let net = buying();
        let pair = (ms(&net, "10cent:1"), ms(&net, "5cent:2"));
        let selections: Vec<_> = expand_selections(&net, &pair)
            .expect("expandable")
            .collect();
        // Every slot has exactly one candidate here.
        assert_eq!(selections.len(), 1);
        assert_eq!(selections[0].len(), 6);
        let fail = expand_selections(&net, &(ms(&net, "10cent:1"), ms(&net, "10cent:2")));
        assert!(fail.is_err());
    }

    #[test]
    fn decide_accepts_the_buying_pair_with_a_verifiable_certificate() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let r = ms(&net, "10cent:1");
        let s = ms(&net, "5cent:2");
        let verdict = engine.decide(&r, &s, None);
        let cert = match verdict.outcome {
            Outcome::Yes(cert) => cert,
            other => panic!("expected YES, got {other:?}"),
        };
        assert!(verdict.stats.expand_count >= 1);
        assert!(verdict.stats.reduce_count >= 1);
        assert_eq!(cert.query, (r.clone(), s.clone()));
        verify_certificate(&net, &cert).expect("certificate must verify");
        // Round-trip through JSON preserves verifiability.
        let json = cert.to_json_pretty(&net);
        let parsed = Certificate::from_json(&net, &json).unwrap();
        verify_certificate(&net, &parsed).expect("parsed certificate must verify");
        assert_eq!(parsed.node_count(), cert.node_count());
        for key in ["net_hash", "query", "pair", "rule", "children", "direction"] {
            assert!(json.contains(key), "serialized certificate lacks {key}");
        }
    }

    #[test]
    fn certificates_served_from_the_swapped_cache_verify() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let r = ms(&net, "10cent:1");
        let s = ms(&net, "5cent:2");
        assert!(engine.decide(&r, &s, None).is_yes());
        // The swapped query is answered from the cache; the mirrored
        // tree must still be a valid proof in its own right.
        let verdict = engine.decide(&s, &r, None);
        let cert = match verdict.outcome {
            Outcome::Yes(cert) => cert,
            other => panic!("expected YES, got {other:?}"),
        };
        assert_eq!(cert.query, (s, r));
        verify_certificate(&net, &cert).expect("mirrored certificate must verify");
    }

    #[test]
    fn decide_closes_equal_sides_immediately() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let m = ms(&net, "10cent:2,Bought:1");
        let verdict = engine.decide(&m, &m, None);
        assert!(verdict.is_yes());
        assert_eq!(verdict.stats.nodes_created, 1);
        if let Outcome::Yes(cert) = verdict.outcome {
            assert_eq!(cert.root.rule, Rule::Identity);
        }
    }

    #[test]
    fn decide_rejects_the_two_kind_pair_at_the_root() {
        let net = two_kinds();
        let mut engine = DecisionEngine::new(&net);
        let verdict = engine.decide(&ms(&net, "X:1"), &ms(&net, "Y:1"), None);
        let witness = match verdict.outcome {
            Outcome::No(w) => w,
            other => panic!("expected NO, got {other:?}"),
        };
        assert_eq!(witness.leaf, (ms(&net, "X:1"), ms(&net, "Y:1")));
        assert_eq!(net.transition(witness.transition).name, "t2");
        assert_eq!(witness.direction, Direction::LeftToRight);
        assert_eq!(witness.trace.len(), 1);
        // The witness replays against the one-round game.
        let mut chk = StrataChecker::new(&net);
        assert!(!chk.resource_eq(&witness.leaf.0, &witness.leaf.1, 1));
    }

    #[test]
    fn decide_rejects_the_two_component_pair_below_the_root() {
        let net = two_components();
        let mut engine = DecisionEngine::new(&net);
        let root = (ms(&net, "X1:1"), ms(&net, "Y1:1"));
        let verdict = engine.decide(&root.0, &root.1, None);
        let witness = match verdict.outcome {
            Outcome::No(w) => w,
            other => panic!("expected NO, got {other:?}"),
        };
        // Both sides answer every completed move of the other, so the
        // failing leaf only shows up beneath the root.
        assert_ne!(witness.leaf, root);
        assert_eq!(witness.trace.last().unwrap().1, "fail");
        let mut chk = StrataChecker::new(&net);
        assert!(chk.resource_eq(&root.0, &root.1, 1));
        assert!(!chk.resource_eq(&witness.leaf.0, &witness.leaf.1, 1));
        // The witness replays: the named completed move really has no
        // answer from the other side.
        let (from, other) = match witness.direction {
            Direction::LeftToRight => (&witness.leaf.0, &witness.leaf.1),
            Direction::RightToLeft => (&witness.leaf.1, &witness.leaf.0),
        };
        let step = net.t_children(from, other, witness.transition);
        assert!(step.candidates.is_empty());
    }

    #[test]
    fn decide_matches_identity_on_the_communication_free_net() {
        let net = communication_free();
        let mut engine = DecisionEngine::new(&net);
        for a in net.places().multisets_upto(2) {
            for b in net.places().multisets_upto(2) {
                let verdict = engine.decide(&a, &b, None);
                assert_eq!(verdict.is_yes(), a == b, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn completed_yes_verdicts_are_reused() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let r = ms(&net, "10cent:1");
        let s = ms(&net, "5cent:2");
        let first = engine.decide(&r, &s, None);
        assert!(first.is_yes());
        assert!(first.stats.nodes_created > 1);
        let second = engine.decide(&r, &s, None);
        assert!(second.is_yes());
        assert_eq!(second.stats.nodes_created, 1);
        // The grafted tree still verifies.
        if let Outcome::Yes(cert) = second.outcome {
            verify_certificate(&net, &cert).unwrap();
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let verdict = engine.decide(&ms(&net, "10cent:1"), &ms(&net, "5cent:2"), Some(1));
        match verdict.outcome {
            Outcome::BudgetExceeded { nodes_explored } => assert!(nodes_explored >= 1),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn verdicts_survive_added_context() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let r = ms(&net, "10cent:1");
        let s = ms(&net, "5cent:2");
        for w in ["Bought:2", "10cent:1,5cent:1", "Shop:1"] {
            let w = ms(&net, w);
            assert!(engine.decide(&r.sum(&w), &s.sum(&w), None).is_yes());
        }
    }

    #[test]
    fn decide_agrees_with_the_level_games_on_fixtures() {
        for text in [
            include_str!("../fixtures/buying.net"),
            include_str!("../fixtures/bisimilar-not-similar.net"),
            include_str!("../fixtures/similar-not-bisimilar.net"),
            include_str!("../fixtures/communication-free.net"),
        ] {
            let net = LabeledPetriNet::parse(text).unwrap();
            let mut engine = DecisionEngine::new(&net);
            let mut chk = StrataChecker::new(&net);
            let sample = net.places().multisets_upto(2);
            for a in &sample {
                for b in &sample {
                    let yes = engine.decide(a, b, None).is_yes();
                    if yes {
                        for k in 1..=4 {
                            assert!(chk.resource_eq(a, b, k), "{a} vs {b} at level {k}");
                        }
                    } else {
                        assert!(
                            (1..=12).any(|k| !chk.resource_eq(a, b, k)),
                            "{a} vs {b}: NO but no failing level found up to 12"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn verify_rejects_a_wrong_net() {
        let net = buying();
        let other = two_kinds();
        let mut engine = DecisionEngine::new(&net);
        let verdict = engine.decide(&ms(&net, "10cent:1"), &ms(&net, "5cent:2"), None);
        if let Outcome::Yes(cert) = verdict.outcome {
            let err = verify_certificate(&other, &cert).unwrap_err();
            assert!(matches!(err, CertificateError::WrongNet { .. }));
            assert!(!err.is_structural());
        } else {
            panic!("expected YES");
        }
    }

    #[test]
    fn verify_rejects_a_tampered_query() {
        let net = buying();
        let mut engine = DecisionEngine::new(&net);
        let verdict = engine.decide(&ms(&net, "10cent:1"), &ms(&net, "5cent:2"), None);
        if let Outcome::Yes(mut cert) = verdict.outcome {
            cert.query.0 = ms(&net, "10cent:2");
            let err = verify_certificate(&net, &cert).unwrap_err();
            assert!(matches!(err, CertificateError::Invalid { .. }));
        } else {
            panic!("expected YES");
        }
    }

    #[test]
    fn malformed_certificates_are_structural_errors() {
        let net = buying();
        assert!(Certificate::from_json(&net, "{not json").unwrap_err().is_structural());
        let bogus = r#"{"net_hash":"x","query":["∅","∅"],"pair":["∅","∅"],"rule":"reduce"}"#;
        let err = Certificate::from_json(&net, bogus).unwrap_err();
        assert!(err.is_structural());
        let bad_place = r#"{"net_hash":"x","query":["Gold:1","∅"],"pair":["∅","∅"],"rule":"identity"}"#;
        assert!(Certificate::from_json(&net, bad_place).unwrap_err().is_structural());
    }
}
