//! Naive reference implementations. Each one re-derives its result from
//! first principles, sharing no search code with the production path.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::bits::BitSet;
use crate::deps::{BinaryRelation, ErrorReport, Item, Threshold};
use crate::matcher::MniReport;
use crate::model::{labels_match, GraphPattern, NodeIx, PropertyGraph};

pub const MAX_PATTERN_VARS: usize = 4;
pub const MAX_GRAPH_NODES: usize = 40;
pub const MAX_MATCHES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("pattern has {0} variables; the oracle handles at most {MAX_PATTERN_VARS}")]
    PatternTooLarge(usize),
    #[error("graph has {0} nodes; the oracle handles at most {MAX_GRAPH_NODES}")]
    GraphTooLarge(usize),
    #[error("{0} matches; the oracle handles at most {MAX_MATCHES}")]
    TooManyMatches(usize),
}

fn row_violates(row: &BitSet, lhs: &BitSet, rhs: usize) -> bool {
    lhs.iter().all(|i| row.contains(i)) && !row.contains(rhs)
}

/// Error of `lhs -> rhs` by a row scan.
pub fn naive_e3(lhs: &BitSet, rhs: usize, relation: &BinaryRelation) -> ErrorReport {
    let violations = relation
        .rows()
        .iter()
        .filter(|row| row_violates(row, lhs, rhs))
        .count() as u64;
    let adom = lhs
        .iter()
        .map(|i| match relation.universe().item(i) {
            Item::Constant { .. } => 1,
            _ => 2,
        })
        .max()
        .unwrap_or(0);
    ErrorReport::new(violations, relation.match_count() as u64, adom)
}

fn subsets_of_size(pool: &[usize], size: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    for k in start..pool.len() {
        current.push(pool[k]);
        subsets_of_size(pool, size, k + 1, current, out);
        current.pop();
    }
}

/// Every LHS over the other items (up to `max_size`) whose error is within
/// `epsilon`, before minimization. Sorted by size, then content.
pub fn satisfying_lhs(rhs: usize, relation: &BinaryRelation, epsilon: Threshold, max_size: usize) -> Vec<BitSet> {
    let width = relation.item_count();
    let pool: Vec<usize> = (0..width).filter(|&i| i != rhs).collect();
    let mut out = Vec::new();
    for size in 0..=max_size.min(pool.len()) {
        let mut combos = Vec::new();
        subsets_of_size(&pool, size, 0, &mut Vec::new(), &mut combos);
        for combo in combos {
            let lhs = BitSet::from_indices(width, combo);
            if epsilon.admits(&naive_e3(&lhs, rhs, relation)) {
                out.push(lhs);
            }
        }
    }
    out
}

/// The subset-minimal LHSs among [`satisfying_lhs`].
pub fn brute_force_minimal_lhs(
    rhs: usize,
    relation: &BinaryRelation,
    epsilon: Threshold,
    max_size: usize,
) -> Vec<BitSet> {
    let mut kept: Vec<BitSet> = Vec::new();
    for lhs in satisfying_lhs(rhs, relation, epsilon, max_size) {
        if !kept.iter().any(|k| k.is_subset(&lhs)) {
            kept.push(lhs);
        }
    }
    kept
}

/// Largest subset of matches with no violation of `lhs -> rhs`, by trying
/// all subsets.
pub fn brute_force_max_satisfying_subset(
    lhs: &BitSet,
    rhs: usize,
    relation: &BinaryRelation,
) -> Result<usize, OracleError> {
    let n = relation.match_count();
    if n > MAX_MATCHES {
        return Err(OracleError::TooManyMatches(n));
    }
    let bad: Vec<bool> = relation.rows().iter().map(|r| row_violates(r, lhs, rhs)).collect();
    Ok((0u32..1 << n)
        .filter(|mask| (0..n).all(|h| mask & (1 << h) == 0 || !bad[h]))
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

/// MNI by enumerating every injective assignment of pattern variables to
/// graph nodes.
pub fn brute_force_mni(pattern: &GraphPattern, graph: &PropertyGraph) -> Result<MniReport, OracleError> {
    let k = pattern.var_count();
    let n = graph.node_count();
    if k > MAX_PATTERN_VARS {
        return Err(OracleError::PatternTooLarge(k));
    }
    if n > MAX_GRAPH_NODES {
        return Err(OracleError::GraphTooLarge(n));
    }
    let nodes: Vec<(u64, String)> = (0..n as NodeIx)
        .map(|ix| {
            let r = graph.node(ix);
            (r.id, r.label)
        })
        .collect();
    let edges: HashSet<(u64, String, u64)> = graph
        .edges()
        .map(|(s, l, d)| (s, l.to_string(), d))
        .collect();
    let mut domains: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); k];
    let mut assignment = vec![0usize; k];
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        for slot in assignment.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let distinct: HashSet<usize> = assignment.iter().copied().collect();
        if distinct.len() != k {
            continue;
        }
        let labels_ok = (0..k).all(|v| labels_match(pattern.var_label(v).as_str(), &nodes[assignment[v]].1));
        let edges_ok = pattern.edges().iter().all(|e| {
            let (s, d) = (nodes[assignment[e.src]].0, nodes[assignment[e.dst]].0);
            if e.label.is_wildcard() {
                edges.iter().any(|(a, _, b)| *a == s && *b == d)
            } else {
                edges.contains(&(s, e.label.as_str().to_string(), d))
            }
        });
        if labels_ok && edges_ok {
            for v in 0..k {
                domains[v].insert(nodes[assignment[v]].0);
            }
        }
    }
    let domains: Vec<Vec<u64>> = domains.into_iter().map(|d| d.into_iter().collect()).collect();
    let mni = if n == 0 { 0 } else { domains.iter().map(Vec::len).min().unwrap_or(0) };
    Ok(MniReport { domains, mni })
}

/// Whether `item` holds on a match, read straight from node attributes.
pub fn literal_holds(item: &Item, pattern: &GraphPattern, m: &[NodeIx], graph: &PropertyGraph) -> bool {
    let node = |v: &str| m[pattern.var_index(v).expect("item variable belongs to the pattern")];
    match item {
        Item::Constant { var, attr, value } => graph.attr(node(var), attr) == Some(value.as_str()),
        Item::Variable { left, right } => match (graph.attr(node(&left.0), &left.1), graph.attr(node(&right.0), &right.1)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        },
        Item::Id { left, right } => graph.node_id(node(left)) == graph.node_id(node(right)),
    }
}
