use std::ops::ControlFlow;

use crate::bits::BitSet;
use crate::model::{GraphPattern, NodeIx, PropertyGraph};

use super::search::{Compiled, Enumerator, Plan};

/// Minimum-image support: per variable, the distinct nodes it takes over all
/// injective embeddings, and the smallest of those domain sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MniReport {
    /// Node ids per variable (declaration order), ascending.
    pub domains: Vec<Vec<u64>>,
    pub mni: usize,
}

impl MniReport {
    pub fn domain<'a>(&'a self, pattern: &GraphPattern, var: &str) -> Option<&'a [u64]> {
        pattern.var_index(var).map(|i| self.domains[i].as_slice())
    }
}

/// Fills the domains variable by variable. A candidate already in a domain is
/// skipped; otherwise one embedding through it is searched for, and every
/// image of that embedding is recorded. With `threshold`, the scan stops as
/// soon as the outcome of `mni >= threshold` is decided.
fn scan_domains(
    pattern: &GraphPattern,
    graph: &PropertyGraph,
    threshold: Option<usize>,
) -> (Vec<BitSet>, bool) {
    let n = graph.node_count();
    let compiled = Compiled::new(pattern, graph);
    let k = compiled.var_count();
    let mut domains = vec![BitSet::new(n); k];
    if compiled.impossible {
        return (domains, false);
    }
    for var in 0..k {
        let plan = Plan::new(&compiled, graph, Some(var), &[]);
        let mut enumerator = Enumerator::new(graph, &compiled, &plan, true);
        let candidates: Vec<NodeIx> = compiled.label_candidates(graph, var).collect();
        let total = candidates.len();
        for (seen, node) in candidates.into_iter().enumerate() {
            if let Some(t) = threshold {
                let have = domains[var].count();
                if have >= t {
                    break;
                }
                if have + (total - seen) < t {
                    return (domains, false);
                }
            }
            if domains[var].contains(node as usize) {
                continue;
            }
            let _ = enumerator.run(Some(node), &mut |m: &[NodeIx]| {
                for (v, &img) in m.iter().enumerate() {
                    domains[v].insert(img as usize);
                }
                ControlFlow::Break(())
            });
        }
        if let Some(t) = threshold {
            if domains[var].count() < t {
                return (domains, false);
            }
        }
    }
    let ok = threshold.is_none_or(|t| domains.iter().all(|d| d.count() >= t));
    (domains, ok)
}

pub fn compute_mni(pattern: &GraphPattern, graph: &PropertyGraph) -> MniReport {
    let (domains, _) = scan_domains(pattern, graph, None);
    let domains: Vec<Vec<u64>> = domains
        .iter()
        .map(|d| d.iter().map(|ix| graph.node_id(ix as NodeIx)).collect())
        .collect();
    let mni = domains.iter().map(Vec::len).min().unwrap_or(0);
    MniReport { domains, mni }
}

/// Decides `mni >= tau` without necessarily computing full domains.
pub fn mni_at_least(pattern: &GraphPattern, graph: &PropertyGraph, tau: usize) -> bool {
    if tau == 0 {
        return true;
    }
    scan_domains(pattern, graph, Some(tau)).1
}

pub fn is_persistent(pattern: &GraphPattern, graph: &PropertyGraph, tau: usize) -> bool {
    mni_at_least(pattern, graph, tau)
}
