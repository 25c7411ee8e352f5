use std::fmt;

use thiserror::Error;

use super::Label;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern declares no variables")]
    NoVariables,
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("edge endpoint `{0}` is not a declared variable")]
    DanglingEndpoint(String),
    #[error("pattern is not connected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternEdge {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
}

/// A small connected directed pattern `Q[ū]`. Variables keep their
/// declaration order; edges refer to variables by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphPattern {
    name: String,
    vars: Vec<(String, Label)>,
    edges: Vec<PatternEdge>,
}

fn valid_var_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ':' | ',' | '|' | '.' | '='))
}

impl GraphPattern {
    /// Builds a pattern from named edges. Identical edges are collapsed.
    pub fn new(
        name: impl Into<String>,
        vars: Vec<(String, Label)>,
        edges: Vec<(String, Label, String)>,
    ) -> Result<Self, PatternError> {
        let position = |v: &str| {
            vars.iter()
                .position(|(n, _)| n == v)
                .ok_or_else(|| PatternError::DanglingEndpoint(v.to_string()))
        };
        let edges = edges
            .into_iter()
            .map(|(s, label, d)| {
                Ok(PatternEdge {
                    src: position(&s)?,
                    label,
                    dst: position(&d)?,
                })
            })
            .collect::<Result<Vec<_>, PatternError>>()?;
        Self::from_parts(name, vars, edges)
    }

    pub fn from_parts(
        name: impl Into<String>,
        vars: Vec<(String, Label)>,
        mut edges: Vec<PatternEdge>,
    ) -> Result<Self, PatternError> {
        if vars.is_empty() {
            return Err(PatternError::NoVariables);
        }
        for (i, (v, _)) in vars.iter().enumerate() {
            if !valid_var_name(v) {
                return Err(PatternError::InvalidVariable(v.clone()));
            }
            if vars[..i].iter().any(|(w, _)| w == v) {
                return Err(PatternError::DuplicateVariable(v.clone()));
            }
        }
        for e in &edges {
            for end in [e.src, e.dst] {
                if end >= vars.len() {
                    return Err(PatternError::DanglingEndpoint(format!("#{end}")));
                }
            }
        }
        let mut seen = Vec::with_capacity(edges.len());
        edges.retain(|e| {
            if seen.contains(e) {
                false
            } else {
                seen.push(e.clone());
                true
            }
        });
        let pattern = Self {
            name: name.into(),
            vars,
            edges,
        };
        if !pattern.is_connected() {
            return Err(PatternError::Disconnected);
        }
        Ok(pattern)
    }

    fn is_connected(&self) -> bool {
        let n = self.vars.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[(String, Label)] {
        &self.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.vars[i].0
    }

    pub fn var_label(&self, i: usize) -> &Label {
        &self.vars[i].1
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|(n, _)| n == name)
    }

    pub fn edges(&self) -> &[PatternEdge] {
        &self.edges
    }

    /// Number of edge endpoints at variable `i` (self-loops count twice).
    pub fn degree(&self, i: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.src == i) + usize::from(e.dst == i))
            .sum()
    }

    /// One-line form used in rule output: `x:company,y:product|x-[create]->y`.
    pub fn serialize(&self) -> String {
        let vars: Vec<String> = self.vars.iter().map(|(v, l)| format!("{v}:{l}")).collect();
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{}-[{}]->{}", self.vars[e.src].0, e.label, self.vars[e.dst].0))
            .collect();
        format!("{}|{}", vars.join(","), edges.join(","))
    }
}

/// Pattern-file form: optional `name:` line, a `vars:` header, one edge per line.
impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        let vars: Vec<String> = self.vars.iter().map(|(v, l)| format!("{v}:{l}")).collect();
        writeln!(f, "vars: {}", vars.join(", "))?;
        for e in &self.edges {
            writeln!(f, "{} {} {}", self.vars[e.src].0, e.label, self.vars[e.dst].0)?;
        }
        Ok(())
    }
}
