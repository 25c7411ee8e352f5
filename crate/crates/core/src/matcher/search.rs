//! Backtracking core shared by homomorphism enumeration and MNI.
//!
//! A pattern is compiled against a graph (labels resolved to symbols), then a
//! [`Plan`] fixes the variable order: each step after the first is anchored on
//! an edge to an already-assigned variable, so candidates come from one
//! adjacency list and the remaining incident edges are checked directly.

use std::ops::ControlFlow;

use crate::model::{GraphPattern, NodeIx, PropertyGraph, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LabelSel {
    Any,
    Is(Sym),
    /// Concrete label that never occurs in the graph.
    Absent,
}

impl LabelSel {
    fn resolve(graph: &PropertyGraph, label: &crate::model::Label) -> Self {
        if label.is_wildcard() {
            LabelSel::Any
        } else {
            graph
                .symbol(label.as_str())
                .map_or(LabelSel::Absent, LabelSel::Is)
        }
    }

    #[inline]
    fn accepts(self, sym: Sym) -> bool {
        match self {
            LabelSel::Any => true,
            LabelSel::Is(s) => s == sym,
            LabelSel::Absent => false,
        }
    }

    fn edge_label(self) -> Option<Sym> {
        match self {
            LabelSel::Is(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub var_labels: Vec<LabelSel>,
    pub edges: Vec<(usize, LabelSel, usize)>,
    pub impossible: bool,
}

impl Compiled {
    pub fn new(pattern: &GraphPattern, graph: &PropertyGraph) -> Self {
        let var_labels: Vec<LabelSel> = pattern
            .vars()
            .iter()
            .map(|(_, l)| LabelSel::resolve(graph, l))
            .collect();
        let edges: Vec<(usize, LabelSel, usize)> = pattern
            .edges()
            .iter()
            .map(|e| (e.src, LabelSel::resolve(graph, &e.label), e.dst))
            .collect();
        let impossible = var_labels.contains(&LabelSel::Absent)
            || edges.iter().any(|&(_, l, _)| l == LabelSel::Absent);
        Self {
            var_labels,
            edges,
            impossible,
        }
    }

    pub fn var_count(&self) -> usize {
        self.var_labels.len()
    }

    fn label_frequency(&self, graph: &PropertyGraph, var: usize) -> usize {
        match self.var_labels[var] {
            LabelSel::Any => graph.node_count(),
            LabelSel::Is(s) => graph.nodes_with_label(s).len(),
            LabelSel::Absent => 0,
        }
    }

    /// Label-matching nodes for `var`, ascending.
    pub fn label_candidates<'g>(&self, graph: &'g PropertyGraph, var: usize) -> Candidates<'g> {
        match self.var_labels[var] {
            LabelSel::Any => Candidates::Range(0..graph.node_count() as NodeIx),
            LabelSel::Is(s) => Candidates::Slice(graph.nodes_with_label(s).iter()),
            LabelSel::Absent => Candidates::Slice([].iter()),
        }
    }
}

pub(crate) enum Candidates<'g> {
    Range(std::ops::Range<NodeIx>),
    Slice(std::slice::Iter<'g, NodeIx>),
}

impl Iterator for Candidates<'_> {
    type Item = NodeIx;

    fn next(&mut self) -> Option<NodeIx> {
        match self {
            Candidates::Range(r) => r.next(),
            Candidates::Slice(s) => s.next().copied(),
        }
    }
}

#[derive(Debug, Clone)]
struct Anchor {
    other: usize,
    label: LabelSel,
    /// Pattern edge runs `other -> var`, so candidates are out-neighbours.
    outgoing: bool,
}

#[derive(Debug, Clone)]
struct Check {
    src: usize,
    label: LabelSel,
    dst: usize,
}

#[derive(Debug, Clone)]
struct Step {
    var: usize,
    anchor: Option<Anchor>,
    checks: Vec<Check>,
    /// `(other, true)` requires `h(other) < h(var)`; `false` requires `>`.
    order: Vec<(usize, bool)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Plan {
    steps: Vec<Step>,
}

impl Plan {
    /// Orders variables by connectivity to the assigned prefix, then label
    /// selectivity, then pattern degree. `root` forces the first variable.
    pub fn new(
        compiled: &Compiled,
        graph: &PropertyGraph,
        root: Option<usize>,
        symmetry: &[Vec<usize>],
    ) -> Self {
        let n = compiled.var_count();
        let degree = |v: usize| {
            compiled
                .edges
                .iter()
                .filter(|&&(s, _, d)| s == v || d == v)
                .count()
        };
        let freq: Vec<usize> = (0..n).map(|v| compiled.label_frequency(graph, v)).collect();
        let mut chosen: Vec<usize> = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        let first = root.unwrap_or_else(|| {
            (0..n)
                .min_by_key(|&v| (freq[v], std::cmp::Reverse(degree(v)), v))
                .expect("patterns have at least one variable")
        });
        chosen.push(first);
        placed[first] = true;
        while chosen.len() < n {
            let next = (0..n)
                .filter(|&v| !placed[v])
                .map(|v| {
                    let links = compiled
                        .edges
                        .iter()
                        .filter(|&&(s, _, d)| (s == v && placed[d]) || (d == v && placed[s]))
                        .count();
                    (v, links)
                })
                .filter(|&(_, links)| links > 0)
                .min_by_key(|&(v, links)| (std::cmp::Reverse(links), freq[v], std::cmp::Reverse(degree(v)), v))
                .map(|(v, _)| v)
                .expect("connected pattern always has a linked unplaced variable");
            chosen.push(next);
            placed[next] = true;
        }

        let class_of: Vec<Option<usize>> = (0..n)
            .map(|v| symmetry.iter().position(|c| c.contains(&v)))
            .collect();
        let mut before = vec![false; n];
        let steps = chosen
            .iter()
            .map(|&var| {
                let mut anchor = None;
                let mut checks = Vec::new();
                for &(s, label, d) in &compiled.edges {
                    let other = if s == var {
                        d
                    } else if d == var {
                        s
                    } else {
                        continue;
                    };
                    if other != var && !before[other] {
                        continue;
                    }
                    if anchor.is_none() && other != var {
                        anchor = Some(Anchor {
                            other,
                            label,
                            outgoing: d == var,
                        });
                    } else {
                        checks.push(Check { src: s, label, dst: d });
                    }
                }
                let order = (0..n)
                    .filter(|&u| before[u] && class_of[u].is_some() && class_of[u] == class_of[var])
                    .map(|u| (u, u < var))
                    .collect();
                before[var] = true;
                Step {
                    var,
                    anchor,
                    checks,
                    order,
                }
            })
            .collect();
        Plan { steps }
    }
}

/// Groups of variables that are pairwise interchangeable: swapping any two of
/// them (same label) maps the pattern's edge set onto itself.
pub(crate) fn symmetry_classes(pattern: &GraphPattern) -> Vec<Vec<usize>> {
    let n = pattern.var_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    let mut edges: Vec<_> = pattern.edges().to_vec();
    edges.sort();
    for i in 0..n {
        for j in i + 1..n {
            if pattern.var_label(i) != pattern.var_label(j) {
                continue;
            }
            let swap = |v: usize| if v == i { j } else if v == j { i } else { v };
            let mut swapped: Vec<_> = edges
                .iter()
                .map(|e| crate::model::PatternEdge {
                    src: swap(e.src),
                    label: e.label.clone(),
                    dst: swap(e.dst),
                })
                .collect();
            swapped.sort();
            if swapped == edges {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        if let Some(c) = classes.iter_mut().find(|c| c[0] == root) {
            c.push(v);
        } else {
            classes.push(vec![v]);
        }
    }
    classes.retain(|c| c.len() > 1);
    classes
}

const UNSET: NodeIx = NodeIx::MAX;

/// Depth-first enumeration driver. `visit` sees complete assignments indexed
/// by pattern variable and may stop the search early.
pub(crate) struct Enumerator<'a> {
    graph: &'a PropertyGraph,
    compiled: &'a Compiled,
    plan: &'a Plan,
    injective: bool,
    assignment: Vec<NodeIx>,
    buffers: Vec<Vec<NodeIx>>,
}

impl<'a> Enumerator<'a> {
    pub fn new(graph: &'a PropertyGraph, compiled: &'a Compiled, plan: &'a Plan, injective: bool) -> Self {
        let n = compiled.var_count();
        Self {
            graph,
            compiled,
            plan,
            injective,
            assignment: vec![UNSET; n],
            buffers: vec![Vec::new(); n],
        }
    }

    /// Runs the search. With `pinned`, the plan's first variable is fixed to
    /// that node (its label is still checked).
    pub fn run<F>(&mut self, pinned: Option<NodeIx>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[NodeIx]) -> ControlFlow<()>,
    {
        if self.compiled.impossible {
            return ControlFlow::Continue(());
        }
        self.assignment.fill(UNSET);
        self.descend(0, pinned, visit)
    }

    fn descend<F>(&mut self, depth: usize, pinned: Option<NodeIx>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[NodeIx]) -> ControlFlow<()>,
    {
        if depth == self.plan.steps.len() {
            return visit(&self.assignment);
        }
        let step = &self.plan.steps[depth];
        let mut candidates = std::mem::take(&mut self.buffers[depth]);
        candidates.clear();
        match (&step.anchor, pinned) {
            (_, Some(node)) if depth == 0 => candidates.push(node),
            (None, _) => candidates.extend(self.compiled.label_candidates(self.graph, step.var)),
            (Some(anchor), _) => {
                let from = self.assignment[anchor.other];
                let list = if anchor.outgoing {
                    self.graph.out_edges(from)
                } else {
                    self.graph.in_edges(from)
                };
                match anchor.label {
                    LabelSel::Is(l) => {
                        let lo = list.partition_point(|&(x, _)| x < l);
                        let hi = list.partition_point(|&(x, _)| x <= l);
                        candidates.extend(list[lo..hi].iter().map(|&(_, n)| n));
                    }
                    _ => {
                        candidates.extend(list.iter().map(|&(_, n)| n));
                        candidates.sort_unstable();
                        candidates.dedup();
                    }
                }
            }
        }

        let var_label = self.compiled.var_labels[step.var];
        let mut flow = ControlFlow::Continue(());
        for &node in &candidates {
            if !var_label.accepts(self.graph.label_sym(node)) {
                continue;
            }
            if self.injective && self.assignment.contains(&node) {
                continue;
            }
            if !step.order.iter().all(|&(u, less)| {
                let other = self.assignment[u];
                if less {
                    other < node
                } else {
                    other > node
                }
            }) {
                continue;
            }
            self.assignment[step.var] = node;
            let edges_ok = step.checks.iter().all(|c| {
                self.graph.has_edge(
                    self.assignment[c.src],
                    c.label.edge_label(),
                    self.assignment[c.dst],
                )
            });
            if edges_ok {
                flow = self.descend(depth + 1, None, visit);
            }
            self.assignment[step.var] = UNSET;
            if flow.is_break() {
                break;
            }
        }
        self.buffers[depth] = candidates;
        flow
    }
}
