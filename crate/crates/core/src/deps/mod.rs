//! Dependency discovery over the matches of one pattern.
//!
//! Matches and literals are encoded as a binary relation; the LHS candidates
//! for a fixed RHS item are the minimal covers of its necessary sets.

mod item;
mod measure;
mod relation;
mod search;
mod trivial;

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::matcher::MatchSet;
use crate::miner::{canonical_code, pattern_reduces, reduction_mappings};
use crate::model::{GraphPattern, PropertyGraph};

pub use item::{build_items, Item, ItemConfig, ItemUniverse};
pub use measure::{adom, compute_e3, format_decimal, ErrorReport, Threshold, ThresholdError};
pub use relation::{
    build_binary_relation, compute_disagree_and_necessary, minimize_necessary_set, BinaryRelation,
    DisagreeSets,
};
pub use search::{
    search_covers, search_covers_traced, ApproxMode, Cover, LeafKind, SearchParams, TraceEvent,
};
pub use trivial::is_trivial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DepError {
    #[error("pattern `{0}` has no matches")]
    EmptyMatchSet(String),
}

#[derive(Debug, Clone, Default)]
pub struct DepConfig {
    pub items: ItemConfig,
    pub search: SearchParams,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveredRule {
    pub pattern: Arc<GraphPattern>,
    /// Sorted canonically.
    pub lhs: Vec<Item>,
    pub rhs: Item,
    pub error: ErrorReport,
    pub exact: bool,
    /// MNI of the pattern; 0 until the caller fills it in.
    pub support: usize,
}

impl DiscoveredRule {
    pub fn lhs_display(&self) -> Vec<String> {
        self.lhs.iter().map(ToString::to_string).collect()
    }

    fn sort_key(&self) -> (&str, &Item, usize, &[Item]) {
        (self.pattern.name(), &self.rhs, self.lhs.len(), &self.lhs)
    }
}

/// Orders rules by pattern name, RHS, LHS size, then LHS items.
pub fn sort_rules(rules: &mut [DiscoveredRule]) {
    rules.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

/// Every minimal rule over one pattern's matches, one search per RHS item.
pub fn mine_dependencies(
    pattern: &GraphPattern,
    matches: &MatchSet,
    graph: &PropertyGraph,
    config: &DepConfig,
) -> Result<Vec<DiscoveredRule>, DepError> {
    let universe = build_items(pattern, matches, graph, &config.items)?;
    let relation = build_binary_relation(universe, matches, graph);
    let disagree = compute_disagree_and_necessary(&relation);
    log::debug!(
        "{}: {} matches, {} items, {} distinct disagree sets",
        pattern.name(),
        relation.match_count(),
        relation.item_count(),
        disagree.distinct().len()
    );
    let shared = Arc::new(pattern.clone());
    let universe = relation.universe();
    let rhs_items: Vec<usize> = universe.rhs_candidates().iter().collect();
    let mut rules: Vec<DiscoveredRule> = rhs_items
        .par_iter()
        .flat_map_iter(|&rhs| {
            let nec = disagree.necessary(rhs);
            let family = match config.search.mode {
                ApproxMode::Leaf => minimize_necessary_set(&nec),
                ApproxMode::Eager => nec,
            };
            search_covers(rhs, &family, &relation, &config.search)
                .into_iter()
                .map(|cover| DiscoveredRule {
                    pattern: Arc::clone(&shared),
                    lhs: cover.lhs.iter().map(|i| universe.item(i).clone()).collect(),
                    rhs: universe.item(rhs).clone(),
                    exact: cover.error.is_exact(),
                    error: cover.error,
                    support: 0,
                })
                .collect::<Vec<_>>()
        })
        .collect();
    sort_rules(&mut rules);
    Ok(rules)
}

/// Variable maps under which rules transfer, and whether a transferred rule
/// must be exact to reduce.
type Transfer = (Vec<Vec<usize>>, bool);

/// [`Transfer`] from `general` into `specific`, if any.
fn rule_mappings(general: &GraphPattern, specific: &GraphPattern) -> Option<Transfer> {
    if general.serialize() == specific.serialize() {
        return Some((vec![(0..general.var_count()).collect()], false));
    }
    if general.var_count() == specific.var_count() && canonical_code(general) == canonical_code(specific) {
        return Some((reduction_mappings(general, specific, false), false));
    }
    if pattern_reduces(general, specific) {
        return Some((reduction_mappings(general, specific, false), true));
    }
    None
}

fn reduces(by: &DiscoveredRule, rule: &DiscoveredRule, maps: &[Vec<usize>]) -> bool {
    let (from, to) = (&*by.pattern, &*rule.pattern);
    maps.iter().any(|map| {
        let rename = |v: &str| {
            from.var_index(v)
                .map(|i| (map[i], to.var_name(map[i]).to_string()))
        };
        by.rhs.map_vars(&rename).as_ref() == Some(&rule.rhs)
            && by.lhs.iter().all(|item| {
                item.map_vars(&rename)
                    .is_some_and(|mapped| rule.lhs.contains(&mapped))
            })
    })
}

/// Drops every rule implied by a kept rule on the same, an isomorphic, or a
/// more general pattern with an LHS that maps into its own and the same RHS.
/// Reduction from a strictly more general pattern needs an exact rule.
pub fn reduce_rules(mut rules: Vec<DiscoveredRule>) -> Vec<DiscoveredRule> {
    rules.sort_by(|a, b| {
        (a.pattern.var_count(), a.pattern.edges().len())
            .cmp(&(b.pattern.var_count(), b.pattern.edges().len()))
            .then_with(|| a.sort_key().cmp(&b.sort_key()))
    });
    let mut patterns: Vec<Arc<GraphPattern>> = rules.iter().map(|r| Arc::clone(&r.pattern)).collect();
    patterns.sort_by(|a, b| a.name().cmp(b.name()).then_with(|| a.serialize().cmp(&b.serialize())));
    patterns.dedup_by(|a, b| Arc::ptr_eq(a, b) || **a == **b);
    let relation: Vec<Vec<Option<Transfer>>> = patterns
        .iter()
        .map(|g| patterns.iter().map(|s| rule_mappings(g, s)).collect())
        .collect();
    let slot = |p: &GraphPattern| patterns.iter().position(|q| **q == *p).expect("collected above");

    let mut kept: Vec<DiscoveredRule> = Vec::new();
    for rule in rules {
        let to = slot(&rule.pattern);
        let dominated = kept.iter().any(|by| {
            match &relation[slot(&by.pattern)][to] {
                Some((maps, needs_exact)) => (!needs_exact || by.exact) && reduces(by, &rule, maps),
                None => false,
            }
        });
        if !dominated {
            kept.push(rule);
        }
    }
    sort_rules(&mut kept);
    kept
}
