use std::collections::HashMap;

use super::item::Item;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Term<'a> {
    Attr(&'a str, &'a str),
    Const(&'a str),
    Id(&'a str),
}

#[derive(Default)]
struct Closure<'a> {
    index: HashMap<Term<'a>, usize>,
    parent: Vec<usize>,
}

impl<'a> Closure<'a> {
    fn node(&mut self, t: Term<'a>) -> usize {
        let next = self.parent.len();
        let ix = *self.index.entry(t).or_insert(next);
        if ix == next {
            self.parent.push(next);
        }
        ix
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.parent[a.max(b)] = a.min(b);
    }

    fn sides(item: &'a Item) -> (Term<'a>, Term<'a>) {
        match item {
            Item::Constant { var, attr, value } => (Term::Attr(var, attr), Term::Const(value)),
            Item::Variable { left, right } => (Term::Attr(&left.0, &left.1), Term::Attr(&right.0, &right.1)),
            Item::Id { left, right } => (Term::Id(left), Term::Id(right)),
        }
    }

    fn add(&mut self, item: &'a Item) {
        let (a, b) = Self::sides(item);
        let (a, b) = (self.node(a), self.node(b));
        self.union(a, b);
    }

    fn equal(&mut self, item: &'a Item) -> bool {
        let (a, b) = Self::sides(item);
        if a == b {
            return true;
        }
        match (self.index.get(&a).copied(), self.index.get(&b).copied()) {
            (Some(a), Some(b)) => self.find(a) == self.find(b),
            _ => false,
        }
    }

    /// Some class holds two distinct constants.
    fn contradictory(&mut self) -> bool {
        let constants: Vec<usize> = self
            .index
            .iter()
            .filter(|(t, _)| matches!(t, Term::Const(_)))
            .map(|(_, &ix)| ix)
            .collect();
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for c in constants {
            let root = self.find(c);
            if seen.insert(root, c).is_some() {
                return true;
            }
        }
        false
    }
}

/// The rule `lhs -> rhs` is trivial when `lhs` cannot be satisfied (equality
/// forces two distinct constants together) or `rhs` follows from `lhs` by
/// equality closure. Id items equate node identities only.
pub fn is_trivial<'a>(lhs: impl IntoIterator<Item = &'a Item>, rhs: &Item) -> bool {
    let mut closure = Closure::default();
    for item in lhs {
        closure.add(item);
    }
    closure.contradictory() || closure.equal(rhs)
}
