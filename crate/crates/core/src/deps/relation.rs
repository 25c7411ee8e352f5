use std::collections::HashMap;

use crate::bits::BitSet;
use crate::matcher::MatchSet;
use crate::model::{NodeIx, PropertyGraph, Sym};

use super::item::{Item, ItemUniverse};

/// Match-by-item satisfaction table, kept both row- and column-major.
#[derive(Debug, Clone)]
pub struct BinaryRelation {
    universe: ItemUniverse,
    rows: Vec<BitSet>,
    columns: Vec<BitSet>,
}

impl BinaryRelation {
    /// Builds from explicit rows (bit set = item satisfied).
    pub fn from_rows(universe: ItemUniverse, rows: Vec<BitSet>) -> Self {
        let n = universe.len();
        assert!(rows.iter().all(|r| r.len() == n), "row width must match the universe");
        let mut columns = vec![BitSet::new(rows.len()); n];
        for (h, row) in rows.iter().enumerate() {
            for item in row.iter() {
                columns[item].insert(h);
            }
        }
        Self {
            universe,
            rows,
            columns,
        }
    }

    pub fn universe(&self) -> &ItemUniverse {
        &self.universe
    }

    pub fn match_count(&self) -> usize {
        self.rows.len()
    }

    pub fn item_count(&self) -> usize {
        self.universe.len()
    }

    pub fn row(&self, h: usize) -> &BitSet {
        &self.rows[h]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    /// Matches satisfying `item`.
    pub fn column(&self, item: usize) -> &BitSet {
        &self.columns[item]
    }

    pub fn bit(&self, h: usize, item: usize) -> bool {
        self.rows[h].contains(item)
    }
}

enum Compiled {
    Constant { var: usize, attr: Sym, value: Sym },
    Variable { x: usize, a1: Sym, y: usize, a2: Sym },
    Id { x: usize, y: usize },
    Never,
}

fn compile(item: &Item, var_index: &dyn Fn(&str) -> usize, graph: &PropertyGraph) -> Compiled {
    match item {
        Item::Constant { var, attr, value } => match (graph.symbol(attr), graph.symbol(value)) {
            (Some(attr), Some(value)) => Compiled::Constant {
                var: var_index(var),
                attr,
                value,
            },
            _ => Compiled::Never,
        },
        Item::Variable { left, right } => match (graph.symbol(&left.1), graph.symbol(&right.1)) {
            (Some(a1), Some(a2)) => Compiled::Variable {
                x: var_index(&left.0),
                a1,
                y: var_index(&right.0),
                a2,
            },
            _ => Compiled::Never,
        },
        Item::Id { left, right } => Compiled::Id {
            x: var_index(left),
            y: var_index(right),
        },
    }
}

impl Compiled {
    fn holds(&self, m: &[NodeIx], graph: &PropertyGraph) -> bool {
        match *self {
            Compiled::Constant { var, attr, value } => graph.attr_value(m[var], attr) == Some(value),
            Compiled::Variable { x, a1, y, a2 } => match graph.attr_value(m[x], a1) {
                Some(v) => graph.attr_value(m[y], a2) == Some(v),
                None => false,
            },
            Compiled::Id { x, y } => m[x] == m[y],
            Compiled::Never => false,
        }
    }
}

/// Evaluates every item on every match; a missing attribute yields 0.
pub fn build_binary_relation(
    universe: ItemUniverse,
    matches: &MatchSet,
    graph: &PropertyGraph,
) -> BinaryRelation {
    let pattern = matches.pattern();
    let var_index = |name: &str| {
        pattern
            .var_index(name)
            .unwrap_or_else(|| panic!("item variable `{name}` is not in pattern `{}`", pattern.name()))
    };
    let compiled: Vec<Compiled> = universe
        .items()
        .iter()
        .map(|item| compile(item, &var_index, graph))
        .collect();
    let rows = matches
        .iter()
        .map(|m| {
            BitSet::from_indices(
                compiled.len(),
                compiled
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.holds(m, graph))
                    .map(|(i, _)| i),
            )
        })
        .collect();
    BinaryRelation::from_rows(universe, rows)
}

/// Distinct disagree sets `D(h)` (items a match fails) and, per match, the
/// index of its set.
#[derive(Debug, Clone)]
pub struct DisagreeSets {
    distinct: Vec<BitSet>,
    per_match: Vec<usize>,
    width: usize,
}

impl DisagreeSets {
    pub fn distinct(&self) -> &[BitSet] {
        &self.distinct
    }

    pub fn of_match(&self, h: usize) -> &BitSet {
        &self.distinct[self.per_match[h]]
    }

    pub fn match_count(&self) -> usize {
        self.per_match.len()
    }

    /// `nec(item)`: every `D(h) \ {item}` with `item` in `D(h)`, deduplicated
    /// and sorted.
    pub fn necessary(&self, item: usize) -> Vec<BitSet> {
        assert!(item < self.width);
        let mut out: Vec<BitSet> = self
            .distinct
            .iter()
            .filter(|d| d.contains(item))
            .map(|d| {
                let mut s = d.clone();
                s.remove(item);
                s
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `nec` for every item, indexed by item.
    pub fn necessary_map(&self) -> Vec<Vec<BitSet>> {
        (0..self.width).map(|i| self.necessary(i)).collect()
    }
}

pub fn compute_disagree_and_necessary(relation: &BinaryRelation) -> DisagreeSets {
    let width = relation.item_count();
    let mut index: HashMap<BitSet, usize> = HashMap::new();
    let mut distinct = Vec::new();
    let per_match = relation
        .rows()
        .iter()
        .map(|row| {
            let mut d = row.clone();
            d.complement();
            *index.entry(d).or_insert_with_key(|d| {
                distinct.push(d.clone());
                distinct.len() - 1
            })
        })
        .collect();
    DisagreeSets {
        distinct,
        per_match,
        width,
    }
}

/// Keeps the subset-minimal members, collapsing duplicates. Output is sorted
/// by size, then by content.
pub fn minimize_necessary_set(sets: &[BitSet]) -> Vec<BitSet> {
    let mut sorted: Vec<&BitSet> = sets.iter().collect();
    sorted.sort_unstable_by(|a, b| a.count().cmp(&b.count()).then_with(|| a.cmp(b)));
    sorted.dedup();
    let mut kept: Vec<BitSet> = Vec::new();
    for s in sorted {
        if !kept.iter().any(|k| k.is_subset(s)) {
            kept.push(s.clone());
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(width: usize, bits: &[usize]) -> BitSet {
        BitSet::from_indices(width, bits.iter().copied())
    }

    #[test]
    fn minimization_examples() {
        let a = set(3, &[0]);
        let ab = set(3, &[0, 1]);
        assert_eq!(minimize_necessary_set(&[ab.clone(), a.clone()]), vec![a.clone()]);
        let empty = set(3, &[]);
        assert_eq!(minimize_necessary_set(&[a.clone(), empty.clone()]), vec![empty]);
        let c = set(3, &[1, 2]);
        assert_eq!(minimize_necessary_set(&[c.clone(), a.clone(), c.clone()]), vec![a, c]);
    }

    #[test]
    fn disagree_sets_from_rows() {
        let u = ItemUniverse::new(vec![
            Item::constant("x", "a", "1"),
            Item::constant("x", "b", "1"),
        ]);
        let r = BinaryRelation::from_rows(u, vec![set(2, &[0, 1]), set(2, &[0]), set(2, &[0])]);
        let d = compute_disagree_and_necessary(&r);
        assert_eq!(d.distinct().len(), 2);
        assert!(d.of_match(0).is_empty());
        assert_eq!(d.of_match(2), &set(2, &[1]));
        assert!(d.necessary(0).is_empty());
        assert_eq!(d.necessary(1), vec![set(2, &[])]);
        assert_eq!(r.column(1), &set(3, &[0]));
    }
}
