//! Depth-first enumeration of minimal covers of a necessary-set family.
//!
//! A node carries the path itemset, the family members it leaves uncovered,
//! and its constituent items: items of uncovered members that rank after the
//! incoming item in the parent's ordering. Orderings put the items hitting
//! the most uncovered members first, ties by display name.

use std::cmp::Reverse;

use crate::bits::BitSet;

use super::measure::{adom, ErrorReport, Threshold};
use super::relation::BinaryRelation;
use super::trivial::is_trivial;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApproxMode {
    /// Test the error only on paths that can no longer be extended.
    #[default]
    Leaf,
    /// Test the error at every node and stop descending on a pass.
    Eager,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    pub epsilon: Threshold,
    pub mode: ApproxMode,
    /// Paths reaching this size are not extended further.
    pub max_lhs_size: Option<usize>,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            epsilon: Threshold::ZERO,
            mode: ApproxMode::Leaf,
            max_lhs_size: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafKind {
    /// Everything covered and every path item is needed.
    Valid,
    /// Everything covered, but some path item covers nothing on its own.
    NonMinimal,
    /// Uncovered members remain and the path cannot grow.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// An internal node and the order in which its children are visited.
    Node { path: Vec<usize>, order: Vec<usize> },
    Leaf {
        path: Vec<usize>,
        kind: LeafKind,
        error: ErrorReport,
        emitted: bool,
    },
    /// Eager mode: an internal node passed the error test.
    Cut { path: Vec<usize>, error: ErrorReport },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub lhs: BitSet,
    pub error: ErrorReport,
}

struct Search<'a> {
    relation: &'a BinaryRelation,
    params: &'a SearchParams,
    /// Per item: the family members containing it.
    incidence: Vec<BitSet>,
    path: Vec<usize>,
    found: Vec<Cover>,
    trace: Option<Vec<TraceEvent>>,
}

impl Search<'_> {
    fn report(&self, violating: &BitSet) -> ErrorReport {
        let universe = self.relation.universe();
        ErrorReport::new(
            violating.count() as u64,
            self.relation.match_count() as u64,
            adom(self.path.iter().map(|&i| universe.item(i))),
        )
    }

    fn emit(&mut self, error: ErrorReport) {
        let lhs = BitSet::from_indices(self.relation.item_count(), self.path.iter().copied());
        self.found.push(Cover { lhs, error });
    }

    fn record(&mut self, event: TraceEvent) {
        if let Some(t) = &mut self.trace {
            t.push(event);
        }
    }

    fn is_minimal(&self) -> bool {
        self.path.iter().all(|&p| {
            let mut private = self.incidence[p].clone();
            for &q in &self.path {
                if q != p {
                    private.difference_with(&self.incidence[q]);
                }
            }
            !private.is_empty()
        })
    }

    fn leaf(&mut self, kind: LeafKind, error: ErrorReport) {
        let emitted = match kind {
            LeafKind::Valid => true,
            LeafKind::NonMinimal => false,
            LeafKind::Invalid => self.params.epsilon.admits(&error),
        };
        if emitted {
            self.emit(error);
        }
        self.record(TraceEvent::Leaf {
            path: self.path.clone(),
            kind,
            error,
            emitted,
        });
    }

    fn visit(&mut self, remaining: &BitSet, allowed: &BitSet, violating: &BitSet) {
        let error = self.report(violating);
        if remaining.is_empty() {
            let kind = if self.is_minimal() {
                LeafKind::Valid
            } else {
                LeafKind::NonMinimal
            };
            return self.leaf(kind, error);
        }
        if self.params.mode == ApproxMode::Eager && self.params.epsilon.admits(&error) {
            self.emit(error);
            self.record(TraceEvent::Cut {
                path: self.path.clone(),
                error,
            });
            return;
        }
        let universe = self.relation.universe();
        let mut order: Vec<(usize, usize)> = allowed
            .iter()
            .map(|i| (i, self.incidence[i].intersection_count(remaining)))
            .filter(|&(_, c)| c > 0)
            .collect();
        order.sort_by(|&(a, ca), &(b, cb)| {
            (Reverse(ca), universe.display(a)).cmp(&(Reverse(cb), universe.display(b)))
        });
        let at_limit = self.params.max_lhs_size.is_some_and(|m| self.path.len() >= m);
        if order.is_empty() || at_limit {
            return self.leaf(LeafKind::Invalid, error);
        }
        self.record(TraceEvent::Node {
            path: self.path.clone(),
            order: order.iter().map(|&(i, _)| i).collect(),
        });
        let width = self.relation.item_count();
        for (k, &(item, _)) in order.iter().enumerate() {
            let child_allowed = BitSet::from_indices(width, order[k + 1..].iter().map(|&(i, _)| i));
            let mut child_remaining = remaining.clone();
            child_remaining.difference_with(&self.incidence[item]);
            let mut child_violating = violating.clone();
            child_violating.intersect_with(self.relation.column(item));
            self.path.push(item);
            self.visit(&child_remaining, &child_allowed, &child_violating);
            self.path.pop();
        }
    }
}

/// Minimal LHSs for `rhs` found by the cover search over `necessary`, after
/// dropping trivial rules and any LHS that contains another.
///
/// In leaf mode `necessary` is normally the minimized family; in eager mode
/// passing the full family makes the result the minimal ε-satisfying LHSs.
pub fn search_covers(
    rhs: usize,
    necessary: &[BitSet],
    relation: &BinaryRelation,
    params: &SearchParams,
) -> Vec<Cover> {
    run(rhs, necessary, relation, params, false).0
}

/// Same as [`search_covers`], also returning every node and leaf visited.
pub fn search_covers_traced(
    rhs: usize,
    necessary: &[BitSet],
    relation: &BinaryRelation,
    params: &SearchParams,
) -> (Vec<Cover>, Vec<TraceEvent>) {
    let (covers, trace) = run(rhs, necessary, relation, params, true);
    (covers, trace.unwrap_or_default())
}

fn run(
    rhs: usize,
    necessary: &[BitSet],
    relation: &BinaryRelation,
    params: &SearchParams,
    traced: bool,
) -> (Vec<Cover>, Option<Vec<TraceEvent>>) {
    let width = relation.item_count();
    assert!(rhs < width);
    assert!(
        necessary.iter().all(|s| s.len() == width && !s.contains(rhs)),
        "necessary sets must exclude the rhs"
    );
    let m = necessary.len();
    let mut incidence = vec![BitSet::new(m); width];
    for (j, set) in necessary.iter().enumerate() {
        for item in set.iter() {
            incidence[item].insert(j);
        }
    }
    let mut search = Search {
        relation,
        params,
        incidence,
        path: Vec::new(),
        found: Vec::new(),
        trace: traced.then(Vec::new),
    };
    let mut allowed = BitSet::full(width);
    allowed.remove(rhs);
    let mut violating = relation.column(rhs).clone();
    violating.complement();
    search.visit(&BitSet::full(m), &allowed, &violating);

    let universe = relation.universe();
    let rhs_item = universe.item(rhs);
    let mut found = search.found;
    found.retain(|c| !is_trivial(c.lhs.iter().map(|i| universe.item(i)), rhs_item));
    found.sort_by(|a, b| a.lhs.count().cmp(&b.lhs.count()).then_with(|| a.lhs.cmp(&b.lhs)));
    let mut kept: Vec<Cover> = Vec::new();
    for c in found {
        if !kept.iter().any(|k| k.lhs.is_subset(&c.lhs)) {
            kept.push(c);
        }
    }
    (kept, search.trace)
}
