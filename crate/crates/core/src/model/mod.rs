//! Property graphs, graph patterns and their labels.

mod graph;
pub mod io;
mod pattern;

use std::fmt;

pub use graph::{GraphBuilder, GraphError, NodeIx, NodeRecord, PropertyGraph, Sym};
pub use pattern::{GraphPattern, PatternEdge, PatternError};

/// The label that matches every other label.
pub const WILDCARD: &str = "*";

/// A node or edge label. `*` is the wildcard and only appears in patterns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Option<Self> {
        let text = text.into();
        (!text.is_empty()).then_some(Self(text))
    }

    pub fn wildcard() -> Self {
        Self(WILDCARD.to_string())
    }

    pub fn is_wildcard(&self) -> bool {
        self.0 == WILDCARD
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Two labels match when they are equal or either one is the wildcard.
pub fn labels_match(a: &str, b: &str) -> bool {
    a == b || a == WILDCARD || b == WILDCARD
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn label_matching() {
        assert!(labels_match("company", "company"));
        assert!(labels_match("*", "product"));
        assert!(!labels_match("company", "product"));
    }

    #[test]
    fn empty_label_rejected() {
        assert!(Label::new("").is_none());
        assert!(Label::wildcard().is_wildcard());
        assert!(!Label::new("**").unwrap().is_wildcard());
    }

    proptest! {
        #[test]
        fn matching_is_symmetric_and_reflexive(a in "[a-c*]{1,2}", b in "[a-c*]{1,2}") {
            prop_assert_eq!(labels_match(&a, &b), labels_match(&b, &a));
            prop_assert!(labels_match(&a, &a));
            prop_assert!(labels_match(&a, WILDCARD));
        }
    }
}
