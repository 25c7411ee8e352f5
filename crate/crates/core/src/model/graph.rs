use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use super::WILDCARD;

/// Dense node index. Indices follow ascending node-id order, so comparing
/// indices is the same as comparing ids.
pub type NodeIx = u32;

/// Interned string (labels, attribute names and attribute values share
/// one table per graph).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id {0}")]
    DuplicateNode(u64),
    #[error("edge references unknown node id {0}")]
    UnknownNode(u64),
    #[error("attribute `{attr}` repeated on node {node}")]
    DuplicateAttribute { node: u64, attr: String },
    #[error("node {0} carries the wildcard label")]
    WildcardNodeLabel(u64),
    #[error("empty label")]
    EmptyLabel,
    #[error("empty attribute name on node {0}")]
    EmptyAttributeName(u64),
}

/// An owned view of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: u64,
    pub label: String,
    pub attrs: BTreeMap<String, String>,
}

#[derive(Debug, Default, Clone)]
struct Symbols {
    names: Vec<String>,
    index: HashMap<String, Sym>,
}

impl Symbols {
    fn intern(&mut self, s: &str) -> Sym {
        if let Some(&sym) = self.index.get(s) {
            return sym;
        }
        let sym = Sym(self.names.len() as u32);
        self.names.push(s.to_string());
        self.index.insert(s.to_string(), sym);
        sym
    }
}

/// Directed, labeled multigraph with per-node attribute lists. Immutable once
/// built; construct with [`GraphBuilder`] or [`super::io::load_graph`].
#[derive(Debug, Clone)]
pub struct PropertyGraph {
    symbols: Symbols,
    ids: Vec<u64>,
    labels: Vec<Sym>,
    attrs: Vec<Vec<(Sym, Sym)>>,
    out: Vec<Vec<(Sym, NodeIx)>>,
    inc: Vec<Vec<(Sym, NodeIx)>>,
    by_label: HashMap<Sym, Vec<NodeIx>>,
    edge_count: usize,
}

impl PropertyGraph {
    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_id(&self, ix: NodeIx) -> u64 {
        self.ids[ix as usize]
    }

    pub fn index_of(&self, id: u64) -> Option<NodeIx> {
        self.ids.binary_search(&id).ok().map(|i| i as NodeIx)
    }

    pub fn symbol(&self, s: &str) -> Option<Sym> {
        self.symbols.index.get(s).copied()
    }

    pub fn resolve(&self, sym: Sym) -> &str {
        &self.symbols.names[sym.0 as usize]
    }

    pub fn label_sym(&self, ix: NodeIx) -> Sym {
        self.labels[ix as usize]
    }

    pub fn label(&self, ix: NodeIx) -> &str {
        self.resolve(self.labels[ix as usize])
    }

    /// Attribute list of a node as `(name, value)` symbols, sorted by name symbol.
    pub fn attr_syms(&self, ix: NodeIx) -> &[(Sym, Sym)] {
        &self.attrs[ix as usize]
    }

    pub fn attr_value(&self, ix: NodeIx, attr: Sym) -> Option<Sym> {
        let list = &self.attrs[ix as usize];
        list.binary_search_by_key(&attr, |&(a, _)| a)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn attr(&self, ix: NodeIx, name: &str) -> Option<&str> {
        let attr = self.symbol(name)?;
        self.attr_value(ix, attr).map(|v| self.resolve(v))
    }

    /// Outgoing `(edge label, target)` pairs, sorted.
    pub fn out_edges(&self, ix: NodeIx) -> &[(Sym, NodeIx)] {
        &self.out[ix as usize]
    }

    /// Incoming `(edge label, source)` pairs, sorted.
    pub fn in_edges(&self, ix: NodeIx) -> &[(Sym, NodeIx)] {
        &self.inc[ix as usize]
    }

    pub fn nodes_with_label(&self, label: Sym) -> &[NodeIx] {
        self.by_label.get(&label).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Edge existence; `None` stands for a wildcard edge label.
    pub fn has_edge(&self, src: NodeIx, label: Option<Sym>, dst: NodeIx) -> bool {
        let out = &self.out[src as usize];
        match label {
            Some(l) => out.binary_search(&(l, dst)).is_ok(),
            None => out.iter().any(|&(_, d)| d == dst),
        }
    }

    pub fn node(&self, ix: NodeIx) -> NodeRecord {
        NodeRecord {
            id: self.node_id(ix),
            label: self.label(ix).to_string(),
            attrs: self.attr_syms(ix)
                .iter()
                .map(|&(a, v)| (self.resolve(a).to_string(), self.resolve(v).to_string()))
                .collect(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeRecord> + '_ {
        (0..self.node_count() as NodeIx).map(|ix| self.node(ix))
    }

    /// All edges as `(src id, label, dst id)`, ordered by source then label then target.
    pub fn edges(&self) -> impl Iterator<Item = (u64, &str, u64)> + '_ {
        self.out.iter().enumerate().flat_map(move |(src, list)| {
            list.iter()
                .map(move |&(l, dst)| (self.ids[src], self.resolve(l), self.ids[dst as usize]))
        })
    }

    /// Distinct node labels in first-seen symbol order.
    pub fn node_labels(&self) -> Vec<Sym> {
        let mut labels: Vec<Sym> = self.by_label.keys().copied().collect();
        labels.sort();
        labels
    }
}

/// Label and attribute pairs of a node not yet built.
type PendingNode = (Sym, Vec<(Sym, Sym)>);

/// Collects nodes and edges, then freezes them into a [`PropertyGraph`].
/// Nodes must be added before the edges that reference them.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    symbols: Symbols,
    nodes: HashMap<u64, PendingNode>,
    edges: Vec<(u64, Sym, u64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node<K, V>(
        &mut self,
        id: u64,
        label: &str,
        attrs: impl IntoIterator<Item = (K, V)>,
    ) -> Result<(), GraphError>
    where
        K: AsRef<str>,
        V: AsRef<str>,
    {
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        if label == WILDCARD {
            return Err(GraphError::WildcardNodeLabel(id));
        }
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        let mut list = Vec::new();
        for (name, value) in attrs {
            let name = name.as_ref();
            if name.is_empty() {
                return Err(GraphError::EmptyAttributeName(id));
            }
            let a = self.symbols.intern(name);
            if list.iter().any(|&(b, _)| b == a) {
                return Err(GraphError::DuplicateAttribute {
                    node: id,
                    attr: name.to_string(),
                });
            }
            list.push((a, self.symbols.intern(value.as_ref())));
        }
        list.sort();
        let label = self.symbols.intern(label);
        self.nodes.insert(id, (label, list));
        Ok(())
    }

    pub fn add_edge(&mut self, src: u64, label: &str, dst: u64) -> Result<(), GraphError> {
        if label.is_empty() {
            return Err(GraphError::EmptyLabel);
        }
        for id in [src, dst] {
            if !self.nodes.contains_key(&id) {
                return Err(GraphError::UnknownNode(id));
            }
        }
        let label = self.symbols.intern(label);
        self.edges.push((src, label, dst));
        Ok(())
    }

    pub fn build(self) -> PropertyGraph {
        let mut nodes: Vec<(u64, PendingNode)> = self.nodes.into_iter().collect();
        nodes.sort_unstable_by_key(|(id, _)| *id);
        let ids: Vec<u64> = nodes.iter().map(|(id, _)| *id).collect();
        let n = ids.len();
        let mut labels = Vec::with_capacity(n);
        let mut attrs = Vec::with_capacity(n);
        let mut by_label: HashMap<Sym, Vec<NodeIx>> = HashMap::new();
        for (ix, (_, (label, list))) in nodes.into_iter().enumerate() {
            by_label.entry(label).or_default().push(ix as NodeIx);
            labels.push(label);
            attrs.push(list);
        }
        let index = |id: u64| ids.binary_search(&id).expect("edge endpoints validated") as NodeIx;
        let mut out: Vec<Vec<(Sym, NodeIx)>> = vec![Vec::new(); n];
        let mut inc: Vec<Vec<(Sym, NodeIx)>> = vec![Vec::new(); n];
        for (src, label, dst) in self.edges {
            let (s, d) = (index(src), index(dst));
            out[s as usize].push((label, d));
            inc[d as usize].push((label, s));
        }
        let mut edge_count = 0;
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        for list in &out {
            edge_count += list.len();
        }
        PropertyGraph {
            symbols: self.symbols,
            ids,
            labels,
            attrs,
            out,
            inc,
            by_label,
            edge_count,
        }
    }
}
