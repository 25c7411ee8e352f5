//! Frequent pattern discovery by level-wise edge extension under MNI, and
//! elimination of patterns that a less restrictive pattern reduces.

use std::collections::{BTreeSet, HashSet};

use log::debug;
use rayon::prelude::*;

use crate::matcher::{compute_mni, mni_at_least, MniReport};
use crate::model::{GraphPattern, Label, PatternEdge, PropertyGraph, WILDCARD};

pub const DEFAULT_MAX_EDGES: usize = 3;

/// Isomorphism-invariant form of a pattern: variable labels in canonical
/// position order plus the sorted edge list over positions. The minimum over
/// all label-preserving variable orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, String, usize)>,
}

impl CanonicalCode {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The pattern this code describes, with variables named `v0, v1, ...`.
    pub fn to_pattern(&self, name: impl Into<String>) -> GraphPattern {
        let vars = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (format!("v{i}"), Label::new(l.as_str()).expect("labels are non-empty")))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(s, l, d)| PatternEdge {
                src: *s,
                label: Label::new(l.as_str()).expect("labels are non-empty"),
                dst: *d,
            })
            .collect();
        GraphPattern::from_parts(name, vars, edges).expect("codes describe connected patterns")
    }

    fn connected(&self) -> bool {
        let n = self.labels.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (s, _, d) in &self.edges {
                for (a, b) in [(*s, *d), (*d, *s)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

fn canonicalize(labels: &[String], edges: &[(usize, String, usize)]) -> CanonicalCode {
    let n = labels.len();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
    let target: Vec<&String> = sorted.iter().map(|&v| &labels[v]).collect();

    let mut best: Option<CanonicalCode> = None;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn recurse(
        labels: &[String],
        edges: &[(usize, String, usize)],
        target: &[&String],
        order: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<CanonicalCode>,
    ) {
        let n = labels.len();
        if order.len() == n {
            let mut pos = vec![0; n];
            for (p, &v) in order.iter().enumerate() {
                pos[v] = p;
            }
            let mut mapped: Vec<(usize, String, usize)> = edges
                .iter()
                .map(|(s, l, d)| (pos[*s], l.clone(), pos[*d]))
                .collect();
            mapped.sort();
            if best.as_ref().is_none_or(|b| mapped < b.edges) {
                *best = Some(CanonicalCode {
                    labels: target.iter().map(|s| (*s).clone()).collect(),
                    edges: mapped,
                });
            }
            return;
        }
        let want = target[order.len()];
        for v in 0..n {
            if !used[v] && &labels[v] == want {
                used[v] = true;
                order.push(v);
                recurse(labels, edges, target, order, used, best);
                order.pop();
                used[v] = false;
            }
        }
    }

    recurse(labels, edges, &target, &mut order, &mut used, &mut best);
    best.expect("at least one ordering exists")
}

pub fn canonical_code(pattern: &GraphPattern) -> CanonicalCode {
    let labels: Vec<String> = pattern.vars().iter().map(|(_, l)| l.to_string()).collect();
    let edges: Vec<(usize, String, usize)> = pattern
        .edges()
        .iter()
        .map(|e| (e.src, e.label.to_string(), e.dst))
        .collect();
    canonicalize(&labels, &edges)
}

#[derive(Debug, Clone)]
pub struct MinedPattern {
    pub pattern: GraphPattern,
    pub support: MniReport,
}

#[derive(Debug, Clone, Default)]
pub struct PatternSet {
    pub patterns: Vec<MinedPattern>,
}

impl PatternSet {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn codes(&self) -> BTreeSet<CanonicalCode> {
        self.patterns.iter().map(|m| canonical_code(&m.pattern)).collect()
    }
}

/// Removing any single edge (and a variable it leaves isolated) must give a
/// pattern from the previous frequent level, unless the removal disconnects it.
fn subpatterns_frequent(code: &CanonicalCode, previous: &HashSet<CanonicalCode>) -> bool {
    for skip in 0..code.edges.len() {
        let edges: Vec<(usize, String, usize)> = code
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, e)| e.clone())
            .collect();
        let n = code.labels.len();
        let mut used = vec![false; n];
        for (s, _, d) in &edges {
            used[*s] = true;
            used[*d] = true;
        }
        let mut remap = vec![usize::MAX; n];
        let mut labels = Vec::new();
        for v in 0..n {
            if used[v] {
                remap[v] = labels.len();
                labels.push(code.labels[v].clone());
            }
        }
        let edges: Vec<_> = edges
            .into_iter()
            .map(|(s, l, d)| (remap[s], l, remap[d]))
            .collect();
        let sub = CanonicalCode { labels, edges };
        if !sub.connected() {
            continue;
        }
        if !previous.contains(&canonicalize(&sub.labels, &sub.edges)) {
            return false;
        }
    }
    true
}

struct LabelTriples {
    /// `(source label, edge label, target label)` over distinct endpoints.
    links: BTreeSet<(String, String, String)>,
    /// `(node label, edge label)` of self-loops.
    loops: BTreeSet<(String, String)>,
}

fn label_triples(graph: &PropertyGraph) -> LabelTriples {
    let mut links = BTreeSet::new();
    let mut loops = BTreeSet::new();
    for src in 0..graph.node_count() as u32 {
        for &(l, dst) in graph.out_edges(src) {
            let (ls, le) = (graph.label(src).to_string(), graph.resolve(l).to_string());
            if src == dst {
                loops.insert((ls, le));
            } else {
                links.insert((ls, le, graph.label(dst).to_string()));
            }
        }
    }
    LabelTriples { links, loops }
}

fn extensions(code: &CanonicalCode, triples: &LabelTriples, max_vars: usize) -> Vec<CanonicalCode> {
    let n = code.labels.len();
    let mut out = Vec::new();
    let mut push = |labels: Vec<String>, edge: (usize, String, usize)| {
        if code.edges.contains(&edge) {
            return;
        }
        let mut edges = code.edges.clone();
        edges.push(edge);
        out.push(canonicalize(&labels, &edges));
    };
    for v in 0..n {
        let lv = &code.labels[v];
        for (_, le) in triples.loops.iter().filter(|(l, _)| l == lv) {
            push(code.labels.clone(), (v, le.clone(), v));
        }
        for w in 0..n {
            if v == w {
                continue;
            }
            for (_, le, _) in triples
                .links
                .iter()
                .filter(|(s, _, d)| s == lv && d == &code.labels[w])
            {
                push(code.labels.clone(), (v, le.clone(), w));
            }
        }
        if n < max_vars {
            for (s, le, d) in &triples.links {
                if s == lv {
                    let mut labels = code.labels.clone();
                    labels.push(d.clone());
                    push(labels, (v, le.clone(), n));
                }
                if d == lv {
                    let mut labels = code.labels.clone();
                    labels.push(s.clone());
                    push(labels, (n, le.clone(), v));
                }
            }
        }
    }
    out
}

fn evaluate(
    candidates: BTreeSet<CanonicalCode>,
    graph: &PropertyGraph,
    tau: usize,
) -> Vec<(CanonicalCode, MniReport)> {
    candidates
        .into_par_iter()
        .filter_map(|code| {
            let pattern = code.to_pattern("candidate");
            if !mni_at_least(&pattern, graph, tau) {
                return None;
            }
            let report = compute_mni(&pattern, graph);
            Some((code, report))
        })
        .collect()
}

/// Every connected pattern over concrete graph labels with `1..=max_edges`
/// edges whose MNI reaches `tau`.
pub fn mine_frequent_patterns(graph: &PropertyGraph, tau: usize, max_edges: usize) -> PatternSet {
    assert!(tau >= 1 && max_edges >= 1, "tau and max_edges must be positive");
    let triples = label_triples(graph);
    let mut level: BTreeSet<CanonicalCode> = triples
        .links
        .iter()
        .map(|(s, e, d)| canonicalize(&[s.clone(), d.clone()], &[(0, e.clone(), 1)]))
        .chain(
            triples
                .loops
                .iter()
                .map(|(s, e)| canonicalize(std::slice::from_ref(s), &[(0, e.clone(), 0)])),
        )
        .collect();

    let mut found: Vec<(CanonicalCode, MniReport)> = Vec::new();
    for k in 1..=max_edges {
        let frequent = evaluate(level, graph, tau);
        debug!("level {k}: {} frequent patterns", frequent.len());
        if frequent.is_empty() || k == max_edges {
            found.extend(frequent);
            break;
        }
        let previous: HashSet<CanonicalCode> = frequent.iter().map(|(c, _)| c.clone()).collect();
        level = frequent
            .iter()
            .flat_map(|(c, _)| extensions(c, &triples, k + 2))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .filter(|c| subpatterns_frequent(c, &previous))
            .collect();
        found.extend(frequent);
    }

    found.sort_by(|a, b| (a.0.edge_count(), &a.0).cmp(&(b.0.edge_count(), &b.0)));
    PatternSet {
        patterns: found
            .into_iter()
            .enumerate()
            .map(|(i, (code, support))| MinedPattern {
                pattern: code.to_pattern(format!("p{}", i + 1)),
                support,
            })
            .collect(),
    }
}

fn label_generalizes(general: &Label, specific: &Label) -> bool {
    general == specific || general.as_str() == WILDCARD
}

/// `general` reduces `specific` when it embeds injectively into it with each
/// label kept or relaxed to the wildcard, and the two are not isomorphic.
pub fn pattern_reduces(general: &GraphPattern, specific: &GraphPattern) -> bool {
    if general.var_count() > specific.var_count() {
        return false;
    }
    if canonical_code(general) == canonical_code(specific) {
        return false;
    }
    !reduction_mappings(general, specific, true).is_empty()
}

/// Injective variable maps under which `general`'s labels and edges are
/// covered by `specific`. Stops after the first map when `first_only`.
pub(crate) fn reduction_mappings(
    general: &GraphPattern,
    specific: &GraphPattern,
    first_only: bool,
) -> Vec<Vec<usize>> {
    let mut maps = Vec::new();
    let mut map = Vec::with_capacity(general.var_count());
    let mut used = vec![false; specific.var_count()];

    fn extend(
        g: &GraphPattern,
        s: &GraphPattern,
        map: &mut Vec<usize>,
        used: &mut [bool],
        maps: &mut Vec<Vec<usize>>,
        first_only: bool,
    ) -> bool {
        let i = map.len();
        if i == g.var_count() {
            maps.push(map.clone());
            return first_only;
        }
        for j in 0..s.var_count() {
            if used[j] || !label_generalizes(g.var_label(i), s.var_label(j)) {
                continue;
            }
            map.push(j);
            let edges_ok = g.edges().iter().all(|e| {
                if e.src > i || e.dst > i {
                    return true;
                }
                let (a, b) = (map[e.src], map[e.dst]);
                s.edges()
                    .iter()
                    .any(|f| f.src == a && f.dst == b && label_generalizes(&e.label, &f.label))
            });
            if edges_ok {
                used[j] = true;
                let done = extend(g, s, map, used, maps, first_only);
                used[j] = false;
                if done {
                    map.pop();
                    return true;
                }
            }
            map.pop();
        }
        false
    }

    extend(general, specific, &mut map, &mut used, &mut maps, first_only);
    maps
}

/// Keeps the patterns no other member reduces; isomorphic duplicates collapse
/// to the one with the smallest serialization.
pub fn reduce_patterns(set: PatternSet) -> PatternSet {
    let mut by_code: Vec<(CanonicalCode, MinedPattern)> = set
        .patterns
        .into_iter()
        .map(|m| (canonical_code(&m.pattern), m))
        .collect();
    by_code.sort_by(|a, b| {
        (&a.0, a.1.pattern.serialize()).cmp(&(&b.0, b.1.pattern.serialize()))
    });
    by_code.dedup_by(|later, earlier| later.0 == earlier.0);
    let unique: Vec<MinedPattern> = by_code.into_iter().map(|(_, m)| m).collect();
    let keep: Vec<bool> = unique
        .iter()
        .map(|m| {
            !unique
                .iter()
                .any(|other| pattern_reduces(&other.pattern, &m.pattern))
        })
        .collect();
    let mut patterns: Vec<MinedPattern> = unique
        .into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect();
    patterns.sort_by(|a, b| {
        (a.pattern.edges().len(), canonical_code(&a.pattern))
            .cmp(&(b.pattern.edges().len(), canonical_code(&b.pattern)))
    });
    PatternSet { patterns }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn pat(vars: &[(&str, &str)], edges: &[(&str, &str, &str)]) -> GraphPattern {
        GraphPattern::new(
            "t",
            vars.iter().map(|(v, lab)| (v.to_string(), l(lab))).collect(),
            edges
                .iter()
                .map(|(s, lab, d)| (s.to_string(), l(lab), d.to_string()))
                .collect(),
        )
        .unwrap()
    }

    fn q2() -> GraphPattern {
        pat(&[("x", "company"), ("y", "product")], &[("x", "create", "y")])
    }

    fn q3() -> GraphPattern {
        pat(
            &[("x", "company"), ("y", "product"), ("y'", "product")],
            &[("x", "create", "y"), ("x", "create", "y'")],
        )
    }

    #[test]
    fn canonical_code_ignores_variable_names_and_order() {
        let a = pat(&[("a", "p"), ("b", "c")], &[("b", "create", "a")]);
        let b = q2();
        let a = a.with_name("x");
        assert_eq!(canonical_code(&a).labels, vec!["c", "p"]);
        assert_eq!(canonical_code(&a), canonical_code(&pat(&[("m", "c"), ("n", "p")], &[("m", "create", "n")])));
        assert_ne!(canonical_code(&a), canonical_code(&b));
        assert_eq!(canonical_code(&b).to_pattern("z").serialize(), "v0:company,v1:product|v0-[create]->v1");
    }

    #[test]
    fn reduction_examples() {
        assert!(pattern_reduces(&q2(), &q3()));
        assert!(!pattern_reduces(&q3(), &q2()));
        assert!(!pattern_reduces(&q3(), &q3()));
        let q1 = pat(&[("x", "*"), ("y", "*")], &[("x", "is_a", "y")]);
        let concrete = pat(&[("x", "company"), ("y", "company")], &[("x", "is_a", "y")]);
        assert!(pattern_reduces(&q1, &concrete));
        assert!(!pattern_reduces(&concrete, &q1));
    }

    #[test]
    fn reduce_keeps_minimal_patterns() {
        let wrap = |p: GraphPattern| MinedPattern {
            pattern: p,
            support: MniReport { domains: vec![], mni: 2 },
        };
        let set = PatternSet { patterns: vec![wrap(q3()), wrap(q2())] };
        let reduced = reduce_patterns(set);
        assert_eq!(reduced.len(), 1);
        assert_eq!(reduced.patterns[0].pattern, q2());

        let single = reduce_patterns(PatternSet { patterns: vec![wrap(q3())] });
        assert_eq!(single.len(), 1);

        let other = pat(&[("x", "person"), ("y", "product")], &[("x", "buys", "y")]);
        let unrelated = reduce_patterns(PatternSet { patterns: vec![wrap(q2()), wrap(other)] });
        assert_eq!(unrelated.len(), 2);
    }

    #[test]
    fn isomorphic_duplicates_collapse() {
        let wrap = |p: GraphPattern| MinedPattern {
            pattern: p,
            support: MniReport { domains: vec![], mni: 2 },
        };
        let renamed = pat(&[("b", "product"), ("a", "company")], &[("a", "create", "b")]);
        let reduced = reduce_patterns(PatternSet { patterns: vec![wrap(q2()), wrap(renamed)] });
        assert_eq!(reduced.len(), 1);
        assert_eq!(reduced.patterns[0].pattern.serialize(), "b:product,a:company|a-[create]->b");
    }
}
