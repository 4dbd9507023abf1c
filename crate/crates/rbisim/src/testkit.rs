/*!
Seeded random nets, random resources and certificate tampering.

Everything here is harness support for cross-checking the deciders
against each other; nothing in this module affects decision semantics.
All generators take the RNG by argument so callers control seeding and
reproduce runs exactly.
*/

use rand::Rng;

use crate::multiset::Multiset;
use crate::net::LabeledPetriNet;
use crate::tableau::{Certificate, Rule, TableauNode};

/// Size limits for [`random_net`].
#[derive(Debug, Clone)]
pub struct NetSpec {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_weight: u64,
    /// Labels are drawn from a fixed alphabet prefix of this length.
    pub max_labels: usize,
}

impl Default for NetSpec {
    fn default() -> Self {
        NetSpec {
            max_places: 3,
            max_transitions: 3,
            max_weight: 2,
            max_labels: 3,
        }
    }
}

const LABELS: [&str; 3] = ["a", "b", "c"];

/// Generates a small random net within `spec`'s limits.
///
/// Transitions that would neither consume nor produce anything are
/// re-rolled; such a step has no observable effect anywhere and only
/// pads the net.  The net is produced through the text format, so the
/// generator doubles as a parser exercise.
pub fn random_net<R: Rng>(rng: &mut R, spec: &NetSpec) -> LabeledPetriNet {
    let n_places = rng.random_range(1..=spec.max_places);
    let n_trans = rng.random_range(1..=spec.max_transitions);
    let n_labels = spec.max_labels.clamp(1, LABELS.len());
    let mut text = String::from("net generated\n");
    for p in 1..=n_places {
        text.push_str(&format!("place P{p}\n"));
    }
    for t in 1..=n_trans {
        let label = LABELS[rng.random_range(0..n_labels)];
        let (pre, post) = loop {
            let pre = random_weights(rng, n_places, spec.max_weight);
            let post = random_weights(rng, n_places, spec.max_weight);
            if pre.iter().chain(&post).any(|&w| w > 0) {
                break (pre, post);
            }
        };
        text.push_str(&format!(
            "trans t{t} label {label} pre {} post {}\n",
            render_weights(&pre),
            render_weights(&post)
        ));
    }
    LabeledPetriNet::parse(&text).expect("generated net parses")
}

fn random_weights<R: Rng>(rng: &mut R, n_places: usize, max_weight: u64) -> Vec<u64> {
    (0..n_places)
        .map(|_| rng.random_range(0..=max_weight))
        .collect()
}

fn render_weights(weights: &[u64]) -> String {
    let entries: Vec<String> = weights
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w > 0)
        .map(|(i, w)| format!("P{}:{w}", i + 1))
        .collect();
    if entries.is_empty() {
        "-".into()
    } else {
        entries.join(",")
    }
}

/// A random resource over `net`'s places with cardinality at most
/// `max_card`; the cardinality itself is uniform in `0..=max_card`.
pub fn random_resource<R: Rng>(
    rng: &mut R,
    net: &LabeledPetriNet,
    max_card: u64,
) -> Multiset {
    let places = net.places();
    let mut counts = vec![0u64; places.len()];
    for _ in 0..rng.random_range(0..=max_card) {
        counts[rng.random_range(0..places.len())] += 1;
    }
    places.from_counts(counts)
}

/// Every single-node corruption of a certificate: each component of
/// each pair bumped by one token, each rule flipped to a different
/// kind, and each ancestor citation shifted one level.  Descriptions
/// use the same node addresses the verifier reports.
pub fn certificate_mutations(cert: &Certificate) -> Vec<(String, Certificate)> {
    let mut sites = Vec::new();
    collect_sites(&cert.root, &mut Vec::new(), "root", &mut sites);
    let mut out = Vec::new();
    for (path, label) in &sites {
        for (side, desc) in [(0, "left"), (1, "right")] {
            let mut mutated = cert.clone();
            let node = node_at_mut(&mut mutated.root, path);
            if side == 0 {
                node.pair.0 = bump(&node.pair.0);
            } else {
                node.pair.1 = bump(&node.pair.1);
            }
            out.push((format!("{label}: {desc} component gains a token"), mutated));
        }

        let mut mutated = cert.clone();
        let node = node_at_mut(&mut mutated.root, path);
        let desc = match &node.rule {
            Rule::Identity => {
                node.rule = Rule::Expand { edges: Vec::new() };
                "identity leaf turned into a childless expansion"
            }
            Rule::Reduce { .. } => {
                node.rule = Rule::Identity;
                "rewrite collapsed into an identity leaf"
            }
            Rule::Expand { .. } => {
                node.rule = Rule::Identity;
                "expansion collapsed into an identity leaf"
            }
        };
        out.push((format!("{label}: {desc}"), mutated));

        let mut mutated = cert.clone();
        let node = node_at_mut(&mut mutated.root, path);
        if let Rule::Reduce { levels_up, .. } = &mut node.rule {
            *levels_up += 1;
            out.push((format!("{label}: ancestor citation shifted up"), mutated));
        }
    }
    out
}

fn bump(m: &Multiset) -> Multiset {
    let mut counts = m.counts().to_vec();
    counts[0] += 1;
    m.universe().from_counts(counts)
}

fn collect_sites(
    node: &TableauNode,
    path: &mut Vec<usize>,
    label: &str,
    out: &mut Vec<(Vec<usize>, String)>,
) {
    out.push((path.clone(), label.to_string()));
    match &node.rule {
        Rule::Identity => {}
        Rule::Reduce { child, .. } => {
            path.push(0);
            collect_sites(child, path, &format!("{label}.child"), out);
            path.pop();
        }
        Rule::Expand { edges } => {
            for (i, edge) in edges.iter().enumerate() {
                path.push(i);
                collect_sites(&edge.node, path, &format!("{label}.children[{i}].node"), out);
                path.pop();
            }
        }
    }
}

fn node_at_mut<'a>(root: &'a mut TableauNode, path: &[usize]) -> &'a mut TableauNode {
    let mut cur = root;
    for &i in path {
        cur = match &mut cur.rule {
            Rule::Reduce { child, .. } => child,
            Rule::Expand { edges } => &mut edges[i].node,
            Rule::Identity => unreachable!("site paths stop at leaves"),
        };
    }
    cur
}
