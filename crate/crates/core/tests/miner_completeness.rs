use std::collections::BTreeSet;

use gedmine::matcher::compute_mni;
use gedmine::miner::{mine_frequent_patterns, pattern_reduces, reduce_patterns};
use gedmine::model::{GraphBuilder, GraphPattern, Label, PropertyGraph};
use gedmine::oracle;
use proptest::prelude::*;

const NODE_LABELS: [&str; 3] = ["a", "b", "c"];
const EDGE_LABELS: [&str; 2] = ["e", "f"];

type Form = (Vec<String>, Vec<(usize, String, usize)>);

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest relabeling over every variable permutation.
fn normal_form(labels: &[String], edges: &[(usize, String, usize)]) -> Form {
    permutations(labels.len())
        .into_iter()
        .map(|perm| {
            let mut ls = vec![String::new(); labels.len()];
            for (old, &new) in perm.iter().enumerate() {
                ls[new] = labels[old].clone();
            }
            let mut es: Vec<_> = edges.iter().map(|(s, l, d)| (perm[*s], l.clone(), perm[*d])).collect();
            es.sort();
            es.dedup();
            (ls, es)
        })
        .min()
        .expect("at least one permutation")
}

fn form_of(p: &GraphPattern) -> Form {
    let labels: Vec<String> = p.vars().iter().map(|(_, l)| l.as_str().to_string()).collect();
    let edges: Vec<_> = p.edges().iter().map(|e| (e.src, e.label.as_str().to_string(), e.dst)).collect();
    normal_form(&labels, &edges)
}

fn connected(k: usize, edges: &[(usize, String, usize)]) -> bool {
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for (s, _, d) in edges {
            if seen[*s] != seen[*d] {
                seen[*s] = true;
                seen[*d] = true;
                changed = true;
            }
        }
    }
    seen.iter().all(|&b| b)
}

fn to_pattern(form: &Form) -> GraphPattern {
    let vars = form.0.iter().enumerate().map(|(i, l)| (format!("u{i}"), Label::new(l.as_str()).unwrap())).collect();
    let edges = form
        .1
        .iter()
        .map(|(s, l, d)| (format!("u{s}"), Label::new(l.as_str()).unwrap(), format!("u{d}")))
        .collect();
    GraphPattern::new("b", vars, edges).unwrap()
}

/// Every connected pattern with 1..=`max_edges` edges over the given labels.
fn all_patterns(node_labels: &[String], edge_labels: &[String], max_edges: usize) -> BTreeSet<Form> {
    let mut out = BTreeSet::new();
    for k in 1..=max_edges + 1 {
        let slots: Vec<(usize, usize)> = (0..k).flat_map(|s| (0..k).map(move |d| (s, d))).collect();
        let candidates: Vec<(usize, String, usize)> = slots
            .iter()
            .flat_map(|&(s, d)| edge_labels.iter().map(move |l| (s, l.clone(), d)))
            .collect();
        let mut labelings = vec![vec![]];
        for _ in 0..k {
            labelings = labelings
                .into_iter()
                .flat_map(|ls: Vec<String>| {
                    node_labels.iter().map(move |l| {
                        let mut v = ls.clone();
                        v.push(l.clone());
                        v
                    })
                })
                .collect();
        }
        let mut edge_sets: Vec<Vec<(usize, String, usize)>> = vec![vec![]];
        for _ in 0..max_edges {
            let mut next = Vec::new();
            for set in &edge_sets {
                let start = set.last().map_or(0, |e| candidates.iter().position(|c| c == e).unwrap() + 1);
                for c in &candidates[start..] {
                    let mut s = set.clone();
                    s.push(c.clone());
                    next.push(s);
                }
            }
            edge_sets.extend(next);
            edge_sets.sort();
            edge_sets.dedup();
        }
        for edges in edge_sets.iter().filter(|e| !e.is_empty() && e.len() <= max_edges) {
            if !connected(k, edges) {
                continue;
            }
            for labels in &labelings {
                out.insert(normal_form(labels, edges));
            }
        }
    }
    out
}

fn graph_strategy(max_nodes: usize, max_edges: usize) -> impl Strategy<Value = PropertyGraph> {
    (1..=max_nodes).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..NODE_LABELS.len(), n),
            prop::collection::vec((0..n, 0..EDGE_LABELS.len(), 0..n), 0..=max_edges),
        )
            .prop_map(|(labels, edges)| {
                let mut b = GraphBuilder::new();
                let none: [(&str, &str); 0] = [];
                for (i, l) in labels.iter().enumerate() {
                    b.add_node(i as u64, NODE_LABELS[*l], none).unwrap();
                }
                for (s, l, d) in edges {
                    b.add_edge(s as u64, EDGE_LABELS[l], d as u64).unwrap();
                }
                b.build()
            })
    })
}

fn labels_in(g: &PropertyGraph) -> (Vec<String>, Vec<String>) {
    let nodes: BTreeSet<String> = g.nodes().map(|n| n.label).collect();
    let edges: BTreeSet<String> = g.edges().map(|(_, l, _)| l.to_string()).collect();
    (nodes.into_iter().collect(), edges.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mined_set_equals_exhaustive_enumeration(g in graph_strategy(10, 18), tau in 1usize..4) {
        let mined = mine_frequent_patterns(&g, tau, 2);
        let got: BTreeSet<Form> = mined.patterns.iter().map(|m| form_of(&m.pattern)).collect();
        prop_assert_eq!(got.len(), mined.len(), "mined patterns are pairwise non-isomorphic");
        for m in &mined.patterns {
            prop_assert_eq!(&m.support, &compute_mni(&m.pattern, &g));
        }
        let (nl, el) = labels_in(&g);
        let expected: BTreeSet<Form> = all_patterns(&nl, &el, 2)
            .into_iter()
            .filter(|f| oracle::brute_force_mni(&to_pattern(f), &g).unwrap().mni >= tau)
            .collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn reduction_leaves_an_irreducible_set(g in graph_strategy(10, 18), tau in 1usize..3) {
        let mined = mine_frequent_patterns(&g, tau, 2);
        let before: Vec<GraphPattern> = mined.patterns.iter().map(|m| m.pattern.clone()).collect();
        let kept = reduce_patterns(mined);
        for a in &kept.patterns {
            for b in &kept.patterns {
                prop_assert!(!pattern_reduces(&a.pattern, &b.pattern));
            }
        }
        for p in &before {
            let survives = kept.patterns.iter().any(|k| form_of(&k.pattern) == form_of(p));
            let reduced = before.iter().any(|q| pattern_reduces(q, p));
            prop_assert_eq!(survives, !reduced);
        }
    }
}
