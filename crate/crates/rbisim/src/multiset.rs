//! Multisets over a fixed, ordered universe of place names.
//!
//! Resources and markings are both finite multisets of places.  The
//! universe fixes the set of admissible places and their declaration
//! order; that order is what makes the lexicographic tie-break of
//! [`Multiset::cardlex`] well defined.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An ordered set of place names.  Index 0 is the first declared place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Error)]
pub enum ResourceParseError {
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
    #[error("bad count in `{token}`: {reason}")]
    BadCount { token: String, reason: String },
    #[error("malformed entry `{0}`, expected `place:count`")]
    Malformed(String),
    #[error("duplicate place name `{0}`")]
    DuplicatePlace(String),
    #[error("a universe needs at least one place")]
    EmptyUniverse,
}

impl Universe {
    /// Builds a universe from place names in declaration order.
    pub fn new<I, S>(names: I) -> Result<Arc<Self>, ResourceParseError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ResourceParseError::EmptyUniverse);
        }
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(ResourceParseError::DuplicatePlace(n.clone()));
            }
        }
        Ok(Arc::new(Universe { names, index }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// The empty multiset over this universe.
    pub fn empty(self: &Arc<Self>) -> Multiset {
        Multiset {
            universe: Arc::clone(self),
            counts: vec![0; self.len()],
        }
    }

    /// Builds a multiset from a full count vector in universe order.
    pub fn from_counts(self: &Arc<Self>, counts: Vec<u64>) -> Multiset {
        assert_eq!(
            counts.len(),
            self.len(),
            "count vector length {} does not match universe size {}",
            counts.len(),
            self.len()
        );
        Multiset {
            universe: Arc::clone(self),
            counts,
        }
    }

    /// Builds a multiset from `(place, count)` entries; repeats sum.
    pub fn from_pairs(
        self: &Arc<Self>,
        pairs: &[(&str, u64)],
    ) -> Result<Multiset, ResourceParseError> {
        let mut m = self.empty();
        for &(name, count) in pairs {
            let i = self
                .index_of(name)
                .ok_or_else(|| ResourceParseError::UnknownPlace(name.to_string()))?;
            m.counts[i] = add_count(m.counts[i], count);
        }
        Ok(m)
    }

    /// All multisets of cardinality at most `max_card`, ascending in
    /// the [`Multiset::cardlex`] order.
    pub fn multisets_upto(self: &Arc<Self>, max_card: u64) -> Vec<Multiset> {
        let mut out = Vec::new();
        let mut prefix = vec![0u64; self.len()];
        for card in 0..=max_card {
            fill_exact(self, 0, card, &mut prefix, &mut out);
        }
        out
    }

    /// Parses the textual resource syntax, e.g. `10cent:2,Shop:1`.
    ///
    /// Whitespace around entries, names and counts is ignored.  A bare
    /// name counts as one token of that place.  Repeated names sum.
    /// `-`, `∅` and a blank string all denote the empty multiset.
    pub fn parse_resource(self: &Arc<Self>, text: &str) -> Result<Multiset, ResourceParseError> {
        let trimmed = text.trim();
        let mut m = self.empty();
        if trimmed.is_empty() || trimmed == "-" || trimmed == "∅" {
            return Ok(m);
        }
        for entry in trimmed.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                return Err(ResourceParseError::Malformed(text.trim().to_string()));
            }
            let (name, count) = match entry.split_once(':') {
                Some((name, count_str)) => {
                    let count_str = count_str.trim();
                    let count: u64 = count_str.parse().map_err(|e| {
                        ResourceParseError::BadCount {
                            token: entry.to_string(),
                            reason: format!("{e}"),
                        }
                    })?;
                    (name.trim(), count)
                }
                None => (entry, 1),
            };
            let i = self
                .index_of(name)
                .ok_or_else(|| ResourceParseError::UnknownPlace(name.to_string()))?;
            m.counts[i] = add_count(m.counts[i], count);
        }
        Ok(m)
    }
}

fn add_count(a: u64, b: u64) -> u64 {
    a.checked_add(b).expect("multiset count overflow")
}

// Emits every count vector of the given total, lexicographically
// ascending, which within one cardinality equals cardlex order.
fn fill_exact(
    u: &Arc<Universe>,
    pos: usize,
    remaining: u64,
    prefix: &mut Vec<u64>,
    out: &mut Vec<Multiset>,
) {
    if pos + 1 == prefix.len() {
        prefix[pos] = remaining;
        out.push(u.from_counts(prefix.clone()));
        return;
    }
    for c in 0..=remaining {
        prefix[pos] = c;
        fill_exact(u, pos + 1, remaining - c, prefix, out);
    }
    prefix[pos] = 0;
}

/// A finite multiset of places.  Values are immutable once built and
/// cheap to clone; the universe is shared behind an `Arc`.
#[derive(Debug, Clone)]
pub struct Multiset {
    universe: Arc<Universe>,
    counts: Vec<u64>,
}

impl Multiset {
    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn count(&self, place: usize) -> u64 {
        self.counts[place]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of tokens.
    pub fn card(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    fn assert_same_universe(&self, other: &Multiset) {
        assert!(
            Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe,
            "universe mismatch: {:?} vs {:?}",
            self.universe.names,
            other.universe.names
        );
    }

    /// Pointwise sum.
    pub fn sum(&self, other: &Multiset) -> Multiset {
        self.assert_same_universe(other);
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| add_count(a, b))
            .collect();
        Multiset {
            universe: Arc::clone(&self.universe),
            counts,
        }
    }

    /// Pointwise difference, truncated at zero.
    pub fn subtract(&self, other: &Multiset) -> Multiset {
        self.assert_same_universe(other);
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| a.saturating_sub(b))
            .collect();
        Multiset {
            universe: Arc::clone(&self.universe),
            counts,
        }
    }

    /// Pointwise maximum.  Satisfies `a.union(b) == a.sum(&b.subtract(a))`.
    pub fn union(&self, other: &Multiset) -> Multiset {
        self.assert_same_universe(other);
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(&a, &b)| a.max(b))
            .collect();
        Multiset {
            universe: Arc::clone(&self.universe),
            counts,
        }
    }

    /// Componentwise order: every count of `self` is at most the
    /// matching count of `other`.
    pub fn leq(&self, other: &Multiset) -> bool {
        self.assert_same_universe(other);
        self.counts.iter().zip(&other.counts).all(|(&a, &b)| a <= b)
    }

    /// Total order: smaller cardinality first, ties broken
    /// lexicographically by count vector in universe order.
    pub fn cardlex(&self, other: &Multiset) -> Ordering {
        self.assert_same_universe(other);
        self.card()
            .cmp(&other.card())
            .then_with(|| self.counts.cmp(&other.counts))
    }
}

/// Componentwise order on pairs: both left components and both right
/// components must be ordered.
pub fn pair_leq(a: (&Multiset, &Multiset), b: (&Multiset, &Multiset)) -> bool {
    a.0.leq(b.0) && a.1.leq(b.1)
}

impl PartialEq for Multiset {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.universe, &other.universe) || self.universe == other.universe)
            && self.counts == other.counts
    }
}

impl Eq for Multiset {}

impl std::hash::Hash for Multiset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        // Universes are not hashed; maps never mix universes in practice.
        self.counts.hash(state);
    }
}

impl fmt::Display for Multiset {
    /// Canonical text: `place:count` entries in universe order, zero
    /// counts omitted, `∅` for the empty multiset.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let mut first = true;
        for (i, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", self.universe.name(i), c)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shop() -> Arc<Universe> {
        Universe::new(["10cent", "Shop", "5cent", "Bought"]).unwrap()
    }

    fn ms(u: &Arc<Universe>, counts: &[u64]) -> Multiset {
        u.from_counts(counts.to_vec())
    }

    #[test]
    fn sum_is_pointwise() {
        let u = shop();
        let a = ms(&u, &[1, 0, 0, 0]);
        let b = ms(&u, &[1, 1, 0, 0]);
        assert_eq!(a.sum(&b), ms(&u, &[2, 1, 0, 0]));
    }

    #[test]
    fn subtract_truncates_at_zero() {
        let u = shop();
        let a = ms(&u, &[0, 0, 2, 1]);
        let b = ms(&u, &[0, 0, 2, 0]);
        assert_eq!(a.subtract(&b), ms(&u, &[0, 0, 0, 1]));
        // Over-subtraction clamps instead of going negative.
        let c = ms(&u, &[1, 0, 0, 0]);
        let d = ms(&u, &[3, 0, 1, 0]);
        assert_eq!(c.subtract(&d), u.empty());
    }

    #[test]
    fn union_is_pointwise_max() {
        let u = shop();
        let pre = ms(&u, &[2, 1, 0, 0]);
        let r = ms(&u, &[1, 0, 0, 0]);
        assert_eq!(r.union(&pre), ms(&u, &[2, 1, 0, 0]));
        let s = ms(&u, &[0, 0, 2, 0]);
        assert_eq!(r.union(&s), ms(&u, &[1, 0, 2, 0]));
    }

    #[test]
    fn leq_is_componentwise() {
        let u = shop();
        let small = ms(&u, &[1, 0, 0, 0]);
        let big = ms(&u, &[1, 0, 0, 1]);
        assert!(small.leq(&big));
        assert!(!big.leq(&small));
        let other = ms(&u, &[0, 0, 2, 0]);
        assert!(!small.leq(&other));
        assert!(!other.leq(&small));
    }

    #[test]
    fn cardlex_orders_by_cardinality_then_lex() {
        let u = shop();
        let one = ms(&u, &[1, 0, 0, 0]);
        let two = ms(&u, &[0, 0, 2, 0]);
        assert_eq!(one.cardlex(&two), Ordering::Less);
        // Equal cardinality: first differing index decides.
        let a = ms(&u, &[0, 0, 2, 0]);
        let b = ms(&u, &[1, 0, 0, 1]);
        assert_eq!(a.cardlex(&b), Ordering::Less);
        assert_eq!(b.cardlex(&a), Ordering::Greater);
        assert_eq!(a.cardlex(&a.clone()), Ordering::Equal);
    }

    #[test]
    fn pair_leq_examples() {
        let u = shop();
        let anc = (ms(&u, &[1, 0, 0, 0]), ms(&u, &[0, 0, 2, 0]));
        let leaf = (ms(&u, &[1, 0, 0, 1]), ms(&u, &[0, 0, 2, 1]));
        assert!(pair_leq((&anc.0, &anc.1), (&leaf.0, &leaf.1)));
        assert!(!pair_leq((&leaf.0, &leaf.1), (&anc.0, &anc.1)));
        let swapped = (ms(&u, &[0, 0, 2, 1]), ms(&u, &[1, 0, 0, 1]));
        assert!(!pair_leq((&anc.0, &anc.1), (&swapped.0, &swapped.1)));
    }

    #[test]
    fn multisets_upto_is_cardlex_ascending() {
        let u = Universe::new(["X", "Y"]).unwrap();
        let all = u.multisets_upto(2);
        let counts: Vec<&[u64]> = all.iter().map(|m| m.counts()).collect();
        assert_eq!(
            counts,
            vec![
                &[0, 0][..],
                &[0, 1],
                &[1, 0],
                &[0, 2],
                &[1, 1],
                &[2, 0]
            ]
        );
        for pair in all.windows(2) {
            assert_eq!(pair[0].cardlex(&pair[1]), Ordering::Less);
        }
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let u = shop();
        let m = u.parse_resource("10cent:2, Shop:1").unwrap();
        assert_eq!(m, ms(&u, &[2, 1, 0, 0]));
        assert_eq!(m.to_string(), "10cent:2,Shop:1");
        assert_eq!(u.parse_resource(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn parse_sums_repeated_names() {
        let u = shop();
        let m = u.parse_resource("5cent:1,5cent:2").unwrap();
        assert_eq!(m, ms(&u, &[0, 0, 3, 0]));
    }

    #[test]
    fn parse_accepts_bare_names_and_empty_forms() {
        let u = shop();
        assert_eq!(u.parse_resource("Shop").unwrap(), ms(&u, &[0, 1, 0, 0]));
        assert_eq!(u.parse_resource("-").unwrap(), u.empty());
        assert_eq!(u.parse_resource("∅").unwrap(), u.empty());
        assert_eq!(u.parse_resource("  ").unwrap(), u.empty());
        assert_eq!(u.empty().to_string(), "∅");
    }

    #[test]
    fn parse_rejects_unknown_place_and_bad_count() {
        let u = shop();
        assert!(matches!(
            u.parse_resource("Gold:1"),
            Err(ResourceParseError::UnknownPlace(p)) if p == "Gold"
        ));
        assert!(matches!(
            u.parse_resource("Shop:x"),
            Err(ResourceParseError::BadCount { .. })
        ));
        assert!(matches!(
            u.parse_resource("Shop:-1"),
            Err(ResourceParseError::BadCount { .. })
        ));
        assert!(matches!(
            u.parse_resource("Shop:1,,Bought:1"),
            Err(ResourceParseError::Malformed(_))
        ));
    }

    #[test]
    fn universe_rejects_duplicates_and_empty() {
        assert!(matches!(
            Universe::new(["X", "X"]),
            Err(ResourceParseError::DuplicatePlace(_))
        ));
        assert!(matches!(
            Universe::new(Vec::<String>::new()),
            Err(ResourceParseError::EmptyUniverse)
        ));
    }

    #[test]
    #[should_panic(expected = "universe mismatch")]
    fn mixing_universes_panics() {
        let u = shop();
        let v = Universe::new(["X", "Y"]).unwrap();
        let _ = ms(&u, &[1, 0, 0, 0]).sum(&v.empty());
    }

    #[test]
    #[should_panic(expected = "multiset count overflow")]
    fn sum_overflow_is_detected() {
        let u = shop();
        let a = ms(&u, &[u64::MAX, 0, 0, 0]);
        let b = ms(&u, &[1, 0, 0, 0]);
        let _ = a.sum(&b);
    }

    fn count_vec() -> impl Strategy<Value = Vec<u64>> {
        proptest::collection::vec(0u64..6, 4)
    }

    proptest! {
        #[test]
        fn sum_commutes(a in count_vec(), b in count_vec()) {
            let u = shop();
            let (a, b) = (ms(&u, &a), ms(&u, &b));
            prop_assert_eq!(a.sum(&b), b.sum(&a));
        }

        #[test]
        fn sum_associates(a in count_vec(), b in count_vec(), c in count_vec()) {
            let u = shop();
            let (a, b, c) = (ms(&u, &a), ms(&u, &b), ms(&u, &c));
            prop_assert_eq!(a.sum(&b).sum(&c), a.sum(&b.sum(&c)));
        }

        #[test]
        fn empty_is_neutral(a in count_vec()) {
            let u = shop();
            let a = ms(&u, &a);
            prop_assert_eq!(a.sum(&u.empty()), a);
        }

        #[test]
        fn union_is_sum_of_deficit(a in count_vec(), b in count_vec()) {
            // a ∪ b = a + (b − a), the completion identity.
            let u = shop();
            let (a, b) = (ms(&u, &a), ms(&u, &b));
            prop_assert_eq!(a.union(&b), a.sum(&b.subtract(&a)));
        }

        #[test]
        fn subtract_matches_pointwise_oracle(a in count_vec(), b in count_vec()) {
            let u = shop();
            let m = ms(&u, &a).subtract(&ms(&u, &b));
            for i in 0..4 {
                prop_assert_eq!(m.count(i), a[i].saturating_sub(b[i]));
            }
        }

        #[test]
        fn subtract_then_add_restores_union(a in count_vec(), b in count_vec()) {
            let u = shop();
            let (a, b) = (ms(&u, &a), ms(&u, &b));
            prop_assert_eq!(a.subtract(&b).sum(&b), a.union(&b));
        }

        #[test]
        fn leq_iff_union_absorbs(a in count_vec(), b in count_vec()) {
            let u = shop();
            let (a, b) = (ms(&u, &a), ms(&u, &b));
            prop_assert_eq!(a.leq(&b), a.union(&b) == b);
        }

        #[test]
        fn leq_refines_to_strict_cardlex(a in count_vec(), b in count_vec()) {
            let u = shop();
            let (a, b) = (ms(&u, &a), ms(&u, &b));
            if a.leq(&b) && a != b {
                prop_assert_eq!(a.cardlex(&b), Ordering::Less);
            }
        }

        #[test]
        fn cardlex_is_total_and_consistent(a in count_vec(), b in count_vec(), c in count_vec()) {
            let u = shop();
            let (a, b, c) = (ms(&u, &a), ms(&u, &b), ms(&u, &c));
            // Antisymmetry with equality.
            prop_assert_eq!(a.cardlex(&b) == Ordering::Equal, a == b);
            prop_assert_eq!(a.cardlex(&b), b.cardlex(&a).reverse());
            // Transitivity.
            if a.cardlex(&b) != Ordering::Greater && b.cardlex(&c) != Ordering::Greater {
                prop_assert_ne!(a.cardlex(&c), Ordering::Greater);
            }
            // Cardinality dominates.
            if a.card() < b.card() {
                prop_assert_eq!(a.cardlex(&b), Ordering::Less);
            }
        }

        #[test]
        fn sum_is_monotone_in_both_orders(a in count_vec(), b in count_vec(), w in count_vec()) {
            let u = shop();
            let (a, b, w) = (ms(&u, &a), ms(&u, &b), ms(&u, &w));
            if a.leq(&b) {
                prop_assert!(a.sum(&w).leq(&b.sum(&w)));
            }
            if a.cardlex(&b) != Ordering::Greater {
                prop_assert_ne!(a.sum(&w).cardlex(&b.sum(&w)), Ordering::Greater);
            }
        }

        #[test]
        fn display_roundtrips(a in count_vec()) {
            let u = shop();
            let m = ms(&u, &a);
            prop_assert_eq!(u.parse_resource(&m.to_string()).unwrap(), m);
        }
    }
}
