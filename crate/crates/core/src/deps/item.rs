use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::bits::BitSet;
use crate::matcher::MatchSet;
use crate::model::{GraphPattern, PropertyGraph, Sym};

use super::DepError;

/// The item encoding of one literal over pattern variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    /// `x.A = c`
    Constant {
        var: String,
        attr: String,
        value: String,
    },
    /// `x.A1 = y.A2` with `x` declared before `y`.
    Variable {
        left: (String, String),
        right: (String, String),
    },
    /// `x.id = y.id` with `x` declared before `y`.
    Id { left: String, right: String },
}

impl Item {
    pub fn constant(var: &str, attr: &str, value: &str) -> Self {
        Item::Constant {
            var: var.into(),
            attr: attr.into(),
            value: value.into(),
        }
    }

    pub fn variable(x: &str, a1: &str, y: &str, a2: &str) -> Self {
        Item::Variable {
            left: (x.into(), a1.into()),
            right: (y.into(), a2.into()),
        }
    }

    pub fn id(x: &str, y: &str) -> Self {
        Item::Id {
            left: x.into(),
            right: y.into(),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Item::Constant { .. } => 0,
            Item::Variable { .. } => 1,
            Item::Id { .. } => 2,
        }
    }

    pub fn vars(&self) -> Vec<&str> {
        match self {
            Item::Constant { var, .. } => vec![var],
            Item::Variable { left, right } => vec![&left.0, &right.0],
            Item::Id { left, right } => vec![left, right],
        }
    }

    pub fn attrs(&self) -> Vec<&str> {
        match self {
            Item::Constant { attr, .. } => vec![attr],
            Item::Variable { left, right } => vec![&left.1, &right.1],
            Item::Id { .. } => vec![],
        }
    }

    /// Active-domain size of the literal: 1 for constants, 2 otherwise.
    pub fn adom(&self) -> u64 {
        match self {
            Item::Constant { .. } => 1,
            _ => 2,
        }
    }

    fn sort_key(&self) -> (u8, Vec<&str>, Vec<&str>, Option<&str>) {
        let constant = match self {
            Item::Constant { value, .. } => Some(value.as_str()),
            _ => None,
        };
        (self.kind_rank(), self.vars(), self.attrs(), constant)
    }

    /// Renames variables through `map` (old name to target position and
    /// name), putting two-variable items back in declaration order.
    pub fn map_vars(&self, map: &dyn Fn(&str) -> Option<(usize, String)>) -> Option<Item> {
        Some(match self {
            Item::Constant { var, attr, value } => Item::Constant {
                var: map(var)?.1,
                attr: attr.clone(),
                value: value.clone(),
            },
            Item::Variable { left, right } => {
                let (a, b) = (map(&left.0)?, map(&right.0)?);
                let l = (a.1, left.1.clone());
                let r = (b.1, right.1.clone());
                let (left, right) = if b.0 < a.0 { (r, l) } else { (l, r) };
                Item::Variable { left, right }
            }
            Item::Id { left, right } => {
                let (a, b) = (map(left)?, map(right)?);
                let (left, right) = if b.0 < a.0 { (b.1, a.1) } else { (a.1, b.1) };
                Item::Id { left, right }
            }
        })
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Constant { var, attr, value } => write!(f, "{var}.{attr}={value}"),
            Item::Variable { left, right } => {
                write!(f, "{}.{}={}.{}", left.0, left.1, right.0, right.1)
            }
            Item::Id { left, right } => write!(f, "{left}.id={right}.id"),
        }
    }
}

/// The items of one pattern, in canonical order, with unique display names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemUniverse {
    items: Vec<Item>,
    display: Vec<String>,
    rhs_candidates: BitSet,
}

impl ItemUniverse {
    /// Sorts and deduplicates; every item is an RHS candidate.
    pub fn new(mut items: Vec<Item>) -> Self {
        items.sort();
        items.dedup();
        let display: Vec<String> = items.iter().map(ToString::to_string).collect();
        let rhs_candidates = BitSet::full(items.len());
        Self {
            items,
            display,
            rhs_candidates,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, i: usize) -> &Item {
        &self.items[i]
    }

    pub fn display(&self, i: usize) -> &str {
        &self.display[i]
    }

    pub fn index_of(&self, item: &Item) -> Option<usize> {
        self.items.binary_search(item).ok()
    }

    pub fn index_of_display(&self, name: &str) -> Option<usize> {
        self.display.iter().position(|d| d == name)
    }

    pub fn rhs_candidates(&self) -> &BitSet {
        &self.rhs_candidates
    }

    pub fn set_rhs_candidates(&mut self, candidates: BitSet) {
        assert_eq!(candidates.len(), self.len());
        self.rhs_candidates = candidates;
    }

    /// Item set from display names; panics on an unknown name.
    pub fn set_of(&self, names: &[&str]) -> BitSet {
        BitSet::from_indices(
            self.len(),
            names.iter().map(|n| {
                self.index_of_display(n)
                    .unwrap_or_else(|| panic!("unknown item `{n}`"))
            }),
        )
    }

    pub fn names_of(&self, set: &BitSet) -> Vec<&str> {
        set.iter().map(|i| self.display(i)).collect()
    }

    /// Sub-universe holding only the named items.
    pub fn restrict(&self, names: &[&str]) -> ItemUniverse {
        ItemUniverse::new(
            names
                .iter()
                .map(|n| {
                    self.items[self.index_of_display(n)
                        .unwrap_or_else(|| panic!("unknown item `{n}`"))]
                    .clone()
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct ItemConfig {
    /// Minimum number of matches a constant must occur in.
    pub min_const_support: usize,
    /// Also pair variables with different labels.
    pub cross_kind: bool,
    /// When set, only these attribute names produce items.
    pub attributes: Option<BTreeSet<String>>,
}

impl Default for ItemConfig {
    fn default() -> Self {
        Self {
            min_const_support: 2,
            cross_kind: false,
            attributes: None,
        }
    }
}

/// Constant items for frequent values, variable items for attribute pairs
/// that agree on some match, and id items for every eligible variable pair.
pub fn build_items(
    pattern: &GraphPattern,
    matches: &MatchSet,
    graph: &PropertyGraph,
    config: &ItemConfig,
) -> Result<ItemUniverse, DepError> {
    if matches.is_empty() {
        return Err(DepError::EmptyMatchSet(pattern.name().to_string()));
    }
    let allowed = |attr: Sym| {
        config
            .attributes
            .as_ref()
            .is_none_or(|set| set.contains(graph.resolve(attr)))
    };
    let k = pattern.var_count();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .filter(|&(i, j)| config.cross_kind || pattern.var_label(i) == pattern.var_label(j))
        .collect();

    let mut constants: Vec<HashMap<(Sym, Sym), usize>> = vec![HashMap::new(); k];
    let mut agreeing: Vec<BTreeSet<(Sym, Sym)>> = vec![BTreeSet::new(); pairs.len()];
    for m in matches.iter() {
        for (var, &node) in m.iter().enumerate() {
            for &(a, v) in graph.attr_syms(node) {
                if allowed(a) {
                    *constants[var].entry((a, v)).or_default() += 1;
                }
            }
        }
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for &(a1, v1) in graph.attr_syms(m[i]) {
                if !allowed(a1) {
                    continue;
                }
                for &(a2, v2) in graph.attr_syms(m[j]) {
                    if v1 == v2 && allowed(a2) {
                        agreeing[p].insert((a1, a2));
                    }
                }
            }
        }
    }

    let threshold = config.min_const_support.max(1);
    let mut items = Vec::new();
    for (var, counts) in constants.iter().enumerate() {
        for (&(a, v), &count) in counts {
            if count >= threshold {
                items.push(Item::constant(
                    pattern.var_name(var),
                    graph.resolve(a),
                    graph.resolve(v),
                ));
            }
        }
    }
    for (p, &(i, j)) in pairs.iter().enumerate() {
        for &(a1, a2) in &agreeing[p] {
            items.push(Item::variable(
                pattern.var_name(i),
                graph.resolve(a1),
                pattern.var_name(j),
                graph.resolve(a2),
            ));
        }
        items.push(Item::id(pattern.var_name(i), pattern.var_name(j)));
    }
    Ok(ItemUniverse::new(items))
}
