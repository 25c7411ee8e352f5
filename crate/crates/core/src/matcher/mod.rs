//! Pattern matching: homomorphic matches for dependency mining and
//! injective embeddings for MNI support.

mod mni;
pub(crate) mod search;

use std::ops::ControlFlow;

use thiserror::Error;

use crate::model::{GraphPattern, NodeIx, PropertyGraph};
use search::{symmetry_classes, Compiled, Enumerator, Plan};

pub use mni::{compute_mni, is_persistent, mni_at_least, MniReport};

pub const DEFAULT_MATCH_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("pattern `{pattern}` exceeded the match cap of {cap}")]
    CapExceeded { pattern: String, cap: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct MatchOptions {
    /// Keep one representative per orbit of interchangeable variables: their
    /// images must be strictly ascending in declaration order.
    pub symmetry_breaking: bool,
    pub cap: usize,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            symmetry_breaking: true,
            cap: DEFAULT_MATCH_CAP,
        }
    }
}

/// The matches of one pattern, stored as node-index tuples in variable
/// declaration order and sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchSet {
    pattern: GraphPattern,
    data: Vec<NodeIx>,
}

impl MatchSet {
    pub fn pattern(&self) -> &GraphPattern {
        &self.pattern
    }

    pub fn arity(&self) -> usize {
        self.pattern.var_count()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.arity()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[NodeIx] {
        let k = self.arity();
        &self.data[i * k..(i + 1) * k]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[NodeIx]> {
        self.data.chunks_exact(self.arity())
    }

    /// Matches as node-id tuples.
    pub fn id_tuples(&self, graph: &PropertyGraph) -> Vec<Vec<u64>> {
        self.iter()
            .map(|m| m.iter().map(|&ix| graph.node_id(ix)).collect())
            .collect()
    }

    /// Builds a match set from explicit tuples (sorted and deduplicated here).
    pub fn from_tuples(pattern: GraphPattern, mut tuples: Vec<Vec<NodeIx>>) -> Self {
        assert!(tuples.iter().all(|t| t.len() == pattern.var_count()));
        tuples.sort_unstable();
        tuples.dedup();
        Self {
            pattern,
            data: tuples.concat(),
        }
    }
}

/// All homomorphic matches of `pattern` in `graph`.
pub fn find_homomorphisms(
    pattern: &GraphPattern,
    graph: &PropertyGraph,
    options: MatchOptions,
) -> Result<MatchSet, MatchError> {
    find_matches(pattern, graph, options, false)
}

pub(crate) fn find_matches(
    pattern: &GraphPattern,
    graph: &PropertyGraph,
    options: MatchOptions,
    injective: bool,
) -> Result<MatchSet, MatchError> {
    let compiled = Compiled::new(pattern, graph);
    let symmetry = if options.symmetry_breaking {
        symmetry_classes(pattern)
    } else {
        Vec::new()
    };
    let plan = Plan::new(&compiled, graph, None, &symmetry);
    let mut tuples: Vec<Vec<NodeIx>> = Vec::new();
    let mut over_cap = false;
    let _ = Enumerator::new(graph, &compiled, &plan, injective).run(None, &mut |m: &[NodeIx]| {
        if tuples.len() >= options.cap {
            over_cap = true;
            return ControlFlow::Break(());
        }
        tuples.push(m.to_vec());
        ControlFlow::Continue(())
    });
    if over_cap {
        return Err(MatchError::CapExceeded {
            pattern: pattern.name().to_string(),
            cap: options.cap,
        });
    }
    Ok(MatchSet::from_tuples(pattern.clone(), tuples))
}
