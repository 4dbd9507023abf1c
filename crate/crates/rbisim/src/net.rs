//! Labeled Petri nets and the completed-firing step relation.
//!
//! A net fixes places, transitions with `pre`/`post` multisets and an
//! action label per transition.  Besides plain enabled firing this
//! module implements resource completion: any transition can fire from
//! any resource once the missing part of its precondition is borrowed
//! from the environment, and the imitating side receives the same
//! borrowed context.

use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::multiset::{Multiset, ResourceParseError, Universe};

/// A net transition: consumes `pre`, produces `post`, observed as `label`.
#[derive(Debug, Clone)]
pub struct Transition {
    pub name: String,
    pub label: String,
    pub pre: Multiset,
    pub post: Multiset,
}

/// A labeled Petri net with at least one place and one transition.
#[derive(Debug, Clone)]
pub struct LabeledPetriNet {
    name: Option<String>,
    places: Arc<Universe>,
    transitions: Vec<Transition>,
}

#[derive(Debug, Error)]
pub enum NetParseError {
    #[error("line {line}: {source}")]
    Resource {
        line: usize,
        source: ResourceParseError,
    },
    #[error("line {line}: duplicate net declaration")]
    DuplicateNet { line: usize },
    #[error("line {line}: duplicate place `{name}`")]
    DuplicatePlace { line: usize, name: String },
    #[error("line {line}: duplicate transition `{name}`")]
    DuplicateTransition { line: usize, name: String },
    #[error("line {line}: `{name}` is a reserved word")]
    ReservedName { line: usize, name: String },
    #[error("line {line}: expected `{expected}`")]
    Expected { line: usize, expected: String },
    #[error("line {line}: unknown directive `{directive}`")]
    UnknownDirective { line: usize, directive: String },
    #[error("line {line}: place `{name}` used before declaration")]
    UndeclaredPlace { line: usize, name: String },
    #[error("no places declared")]
    NoPlaces,
    #[error("no transitions declared")]
    NoTransitions,
}

const RESERVED: [&str; 6] = ["net", "place", "trans", "label", "pre", "post"];

impl LabeledPetriNet {
    pub fn new(
        name: Option<String>,
        places: Arc<Universe>,
        transitions: Vec<Transition>,
    ) -> Self {
        assert!(!transitions.is_empty(), "a net needs at least one transition");
        for t in &transitions {
            assert_eq!(t.pre.universe(), &places, "pre multiset over foreign universe");
            assert_eq!(t.post.universe(), &places, "post multiset over foreign universe");
        }
        LabeledPetriNet {
            name,
            places,
            transitions,
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn places(&self) -> &Arc<Universe> {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, idx: usize) -> &Transition {
        &self.transitions[idx]
    }

    pub fn transition_by_name(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    /// Parses the line-oriented net format.
    ///
    /// ```text
    /// # comment
    /// net buying
    /// place 10cent
    /// trans t1 label b pre 10cent:2,Shop:1 post Bought:1
    /// ```
    ///
    /// Place declarations fix the universe order.  `-` stands for the
    /// empty multiset in `pre`/`post` position.
    pub fn parse(input: &str) -> Result<Self, NetParseError> {
        let mut name = None;
        let mut place_names: Vec<String> = Vec::new();
        // Transition lines are parsed in a second pass so that places
        // declared later in the file are still an error, not a fallthrough.
        let mut trans_lines: Vec<(usize, Vec<String>)> = Vec::new();

        for (lineno, raw) in input.lines().enumerate() {
            let line = lineno + 1;
            let text = match raw.split_once('#') {
                Some((head, _)) => head,
                None => raw,
            };
            let tokens: Vec<String> = text.split_whitespace().map(String::from).collect();
            if tokens.is_empty() {
                continue;
            }
            match tokens[0].as_str() {
                "net" => {
                    if name.is_some() {
                        return Err(NetParseError::DuplicateNet { line });
                    }
                    let n = tokens.get(1).ok_or_else(|| NetParseError::Expected {
                        line,
                        expected: "net <name>".into(),
                    })?;
                    name = Some(n.clone());
                }
                "place" => {
                    let n = tokens.get(1).ok_or_else(|| NetParseError::Expected {
                        line,
                        expected: "place <name>".into(),
                    })?;
                    if RESERVED.contains(&n.as_str()) {
                        return Err(NetParseError::ReservedName {
                            line,
                            name: n.clone(),
                        });
                    }
                    if place_names.iter().any(|p| p == n) {
                        return Err(NetParseError::DuplicatePlace {
                            line,
                            name: n.clone(),
                        });
                    }
                    place_names.push(n.clone());
                }
                "trans" => trans_lines.push((line, tokens)),
                other => {
                    return Err(NetParseError::UnknownDirective {
                        line,
                        directive: other.to_string(),
                    })
                }
            }
        }

        if place_names.is_empty() {
            return Err(NetParseError::NoPlaces);
        }
        let places = Universe::new(place_names).expect("place names pre-validated");

        let mut transitions: Vec<Transition> = Vec::new();
        for (line, tokens) in trans_lines {
            let t = parse_transition(&places, line, &tokens)?;
            if transitions.iter().any(|x| x.name == t.name) {
                return Err(NetParseError::DuplicateTransition { line, name: t.name });
            }
            transitions.push(t);
        }
        if transitions.is_empty() {
            return Err(NetParseError::NoTransitions);
        }

        Ok(LabeledPetriNet {
            name,
            places,
            transitions,
        })
    }

    /// Regenerates the net in parseable form with canonical multiset
    /// rendering.  Two structurally equal nets print identically.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            out.push_str(&format!("net {n}\n"));
        }
        for p in self.places.names() {
            out.push_str(&format!("place {p}\n"));
        }
        for t in &self.transitions {
            out.push_str(&format!(
                "trans {} label {} pre {} post {}\n",
                t.name,
                t.label,
                render_for_file(&t.pre),
                render_for_file(&t.post)
            ));
        }
        out
    }

    /// SHA-256 of the canonical text; certificates pin the net by this.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    }

    /// Indices of transitions enabled in `m`, in declaration order.
    pub fn enabled(&self, m: &Multiset) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&i| self.transitions[i].pre.leq(m))
            .collect()
    }

    /// Fires transition `t` from `m`; `None` if `t` is not enabled.
    pub fn fire(&self, m: &Multiset, t: usize) -> Option<Multiset> {
        let tr = &self.transitions[t];
        if !tr.pre.leq(m) {
            return None;
        }
        Some(m.subtract(&tr.pre).sum(&tr.post))
    }

    /// Completes `r` so that `t` is enabled: `r ∪ pre(t)`.
    pub fn resource_complete(&self, r: &Multiset, t: usize) -> Multiset {
        r.union(&self.transitions[t].pre)
    }

    /// The completed-firing candidates for `t` from the ordered pair
    /// `(r, s)`.
    ///
    /// The left side borrows `context = pre(t) − r`, fires `t` from
    /// `r ∪ pre(t)` and lands in `left_result`.  The right side receives
    /// the same borrowed context and may answer with any equally labeled
    /// `u` enabled in `s + context`; one candidate `(u, s')` is listed
    /// per such answer.  No candidates means `t` from `(r, s)` cannot be
    /// imitated at all.
    pub fn t_children(&self, r: &Multiset, s: &Multiset, t: usize) -> CompletedStep {
        let tr = &self.transitions[t];
        let context = tr.pre.subtract(r);
        let completed = r.sum(&context);
        let left_result = self
            .fire(&completed, t)
            .expect("completion enables the completed transition");
        let right_base = s.sum(&context);
        let candidates = (0..self.transitions.len())
            .filter(|&u| self.transitions[u].label == tr.label)
            .filter_map(|u| self.fire(&right_base, u).map(|s2| (u, s2)))
            .collect();
        CompletedStep {
            transition: t,
            context,
            left_result,
            candidates,
        }
    }
}

/// Result of completing one transition against an ordered pair.
#[derive(Debug, Clone)]
pub struct CompletedStep {
    /// The completed transition.
    pub transition: usize,
    /// Borrowed tokens `pre(t) − r`, added to both sides.
    pub context: Multiset,
    /// Unique result of firing `t` from the completed left side.
    pub left_result: Multiset,
    /// Imitating answers `(u, s')` with `label(u) = label(t)`.
    pub candidates: Vec<(usize, Multiset)>,
}

impl CompletedStep {
    /// Child pairs `(r', s')` in candidate order.
    pub fn pairs(&self) -> impl Iterator<Item = (Multiset, Multiset, usize)> + '_ {
        self.candidates
            .iter()
            .map(|(u, s2)| (self.left_result.clone(), s2.clone(), *u))
    }
}

/// One observed firing, kept for counterexample reporting.
#[derive(Debug, Clone)]
pub struct Firing {
    pub source: Multiset,
    pub transition: usize,
    pub target: Multiset,
}

impl Firing {
    pub fn describe(&self, net: &LabeledPetriNet) -> String {
        let t = net.transition(self.transition);
        format!(
            "{} -{}({})-> {}",
            self.source, t.name, t.label, self.target
        )
    }
}

fn render_for_file(m: &Multiset) -> String {
    if m.is_empty() {
        "-".to_string()
    } else {
        m.to_string()
    }
}

fn parse_transition(
    places: &Arc<Universe>,
    line: usize,
    tokens: &[String],
) -> Result<Transition, NetParseError> {
    // Layout: trans NAME label ACTION pre RES... post RES...
    let name = tokens
        .get(1)
        .filter(|n| !RESERVED.contains(&n.as_str()))
        .ok_or_else(|| NetParseError::Expected {
            line,
            expected: "trans <name>".into(),
        })?;
    if tokens.get(2).map(String::as_str) != Some("label") {
        return Err(NetParseError::Expected {
            line,
            expected: "label <action>".into(),
        });
    }
    let label = tokens
        .get(3)
        .filter(|l| !RESERVED.contains(&l.as_str()))
        .ok_or_else(|| NetParseError::Expected {
            line,
            expected: "label <action>".into(),
        })?;
    if tokens.get(4).map(String::as_str) != Some("pre") {
        return Err(NetParseError::Expected {
            line,
            expected: "pre <resource>".into(),
        });
    }
    let post_at = tokens
        .iter()
        .position(|t| t == "post")
        .ok_or_else(|| NetParseError::Expected {
            line,
            expected: "post <resource>".into(),
        })?;
    if post_at <= 5 || post_at + 1 >= tokens.len() {
        return Err(NetParseError::Expected {
            line,
            expected: "pre <resource> post <resource>".into(),
        });
    }
    // Resources may contain spaces after commas; rejoining the tokens
    // restores the whitespace-insensitive resource syntax.
    let pre_text = tokens[5..post_at].join("");
    let post_text = tokens[post_at + 1..].join("");
    let parse_res = |text: &str| {
        places.parse_resource(text).map_err(|source| {
            if let ResourceParseError::UnknownPlace(name) = source {
                NetParseError::UndeclaredPlace { line, name }
            } else {
                NetParseError::Resource { line, source }
            }
        })
    };
    Ok(Transition {
        name: name.clone(),
        label: label.clone(),
        pre: parse_res(&pre_text)?,
        post: parse_res(&post_text)?,
    })
}

impl fmt::Display for LabeledPetriNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn buying() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/buying.net")).unwrap()
    }

    fn two_kinds() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/bisimilar-not-similar.net")).unwrap()
    }

    fn two_components() -> LabeledPetriNet {
        LabeledPetriNet::parse(include_str!("../fixtures/similar-not-bisimilar.net")).unwrap()
    }

    fn ms(net: &LabeledPetriNet, text: &str) -> Multiset {
        net.places().parse_resource(text).unwrap()
    }

    #[test]
    fn parses_the_buying_net() {
        let net = buying();
        assert_eq!(net.name(), Some("buying"));
        assert_eq!(net.places().len(), 4);
        assert_eq!(net.places().name(0), "10cent");
        assert_eq!(net.places().name(3), "Bought");
        assert_eq!(net.transitions().len(), 3);
        assert!(net.transitions().iter().all(|t| t.label == "b"));
        let t2 = net.transition(net.transition_by_name("t2").unwrap());
        assert_eq!(t2.pre, ms(&net, "10cent:1,Shop:1,5cent:2"));
        assert_eq!(t2.post, ms(&net, "Bought:1"));
    }

    #[test]
    fn canonical_text_is_stable_under_reparse() {
        let net = buying();
        let text = net.canonical_text();
        let reparsed = LabeledPetriNet::parse(&text).unwrap();
        assert_eq!(reparsed.canonical_text(), text);
        assert_eq!(reparsed.fingerprint(), net.fingerprint());
    }

    #[test]
    fn fingerprint_tracks_structure() {
        let net = buying();
        let tweaked = LabeledPetriNet::parse(
            &net.canonical_text().replace("10cent:2", "10cent:3"),
        )
        .unwrap();
        assert_ne!(net.fingerprint(), tweaked.fingerprint());
    }

    #[test]
    fn parse_error_lines_are_reported() {
        let err = LabeledPetriNet::parse("place X\ntrans t label a pre Q:1 post -\n")
            .unwrap_err();
        assert!(matches!(
            err,
            NetParseError::UndeclaredPlace { line: 2, ref name } if name == "Q"
        ));
        assert!(matches!(
            LabeledPetriNet::parse(""),
            Err(NetParseError::NoPlaces)
        ));
        assert!(matches!(
            LabeledPetriNet::parse("place X\n"),
            Err(NetParseError::NoTransitions)
        ));
        assert!(matches!(
            LabeledPetriNet::parse("place X\nplace X\n"),
            Err(NetParseError::DuplicatePlace { line: 2, .. })
        ));
        assert!(matches!(
            LabeledPetriNet::parse("place X\ntrans t pre X:1 post -\n"),
            Err(NetParseError::Expected { line: 2, .. })
        ));
        assert!(matches!(
            LabeledPetriNet::parse("net a\nnet b\nplace X\n"),
            Err(NetParseError::DuplicateNet { line: 2 })
        ));
        assert!(matches!(
            LabeledPetriNet::parse("widget X\n"),
            Err(NetParseError::UnknownDirective { line: 1, .. })
        ));
    }

    #[test]
    fn trans_resources_may_contain_spaces() {
        let net = LabeledPetriNet::parse(
            "place A\nplace B\ntrans t label a pre A:1, B:2 post -\n",
        )
        .unwrap();
        assert_eq!(net.transition(0).pre, ms(&net, "A:1,B:2"));
    }

    #[test]
    fn enabled_lists_declaration_order() {
        let net = buying();
        // Two dimes and the shop enable only the two-dime purchase.
        assert_eq!(net.enabled(&ms(&net, "10cent:2,Shop:1")), vec![0]);
        assert_eq!(net.enabled(&ms(&net, "10cent:1")), Vec::<usize>::new());

        let net2 = two_kinds();
        // X:2 enables both the a-step and the two-token b-step.
        assert_eq!(net2.enabled(&ms(&net2, "X:2")), vec![0, 1]);
    }

    #[test]
    fn fire_consumes_pre_and_produces_post() {
        let net = buying();
        let m = ms(&net, "10cent:2,Shop:1");
        assert_eq!(net.fire(&m, 0).unwrap(), ms(&net, "Bought:1"));
        let m = ms(&net, "10cent:1,Shop:1,5cent:2");
        assert_eq!(net.fire(&m, 1).unwrap(), ms(&net, "Bought:1"));
        // Not enabled: nothing fires.
        assert!(net.fire(&ms(&net, "10cent:1"), 0).is_none());
    }

    #[test]
    fn fire_keeps_surplus_tokens() {
        let net = buying();
        let m = ms(&net, "10cent:3,Shop:1,Bought:1");
        assert_eq!(net.fire(&m, 0).unwrap(), ms(&net, "10cent:1,Bought:2"));
    }

    #[test]
    fn resource_complete_borrows_only_the_deficit() {
        let net = buying();
        let r = ms(&net, "10cent:1");
        assert_eq!(net.resource_complete(&r, 0), ms(&net, "10cent:2,Shop:1"));
        // Nothing missing: completion is the identity.
        let full = ms(&net, "10cent:2,Shop:1,Bought:4");
        assert_eq!(net.resource_complete(&full, 0), full);
    }

    #[test]
    fn t_children_on_the_two_component_net() {
        let net = two_components();
        let t4 = net.transition_by_name("t4").unwrap();
        let step = net.t_children(&ms(&net, "X1:1"), &ms(&net, "Y1:1"), t4);
        assert_eq!(step.context, net.places().empty());
        assert_eq!(step.left_result, ms(&net, "X3:1"));
        // The right side answers with u1 (dropping the token) or u2.
        let names: Vec<&str> = step
            .candidates
            .iter()
            .map(|(u, _)| net.transition(*u).name.as_str())
            .collect();
        assert_eq!(names, vec!["u1", "u2"]);
        assert_eq!(step.candidates[0].1, net.places().empty());
        assert_eq!(step.candidates[1].1, ms(&net, "Y2:1"));
    }

    #[test]
    fn t_children_may_be_empty() {
        let net = two_components();
        let u3 = net.transition_by_name("u3").unwrap();
        // Y2:1 fires u3 on its own; X3:1 has no b-answer without Z.
        let step = net.t_children(&ms(&net, "Y2:1"), &ms(&net, "X3:1"), u3);
        assert_eq!(step.context, net.places().empty());
        assert_eq!(step.left_result, net.places().empty());
        assert!(step.candidates.is_empty());
    }

    #[test]
    fn t_children_borrowed_context_feeds_both_sides() {
        let net = buying();
        let r = ms(&net, "10cent:1");
        let s = ms(&net, "5cent:2");
        let step = net.t_children(&r, &s, 0);
        assert_eq!(step.context, ms(&net, "10cent:1,Shop:1"));
        assert_eq!(step.left_result, ms(&net, "Bought:1"));
        // s + context = 10cent:1,Shop:1,5cent:2 answers with t2.
        assert_eq!(step.candidates.len(), 1);
        assert_eq!(net.transition(step.candidates[0].0).name, "t2");
        assert_eq!(step.candidates[0].1, ms(&net, "Bought:1"));
    }

    #[test]
    fn identical_sides_always_self_imitate() {
        let net = buying();
        let r = ms(&net, "10cent:1,5cent:1");
        for t in 0..net.transitions().len() {
            let step = net.t_children(&r, &r, t);
            assert!(step
                .pairs()
                .any(|(left, right, u)| u == t && left == right));
        }
    }
}
