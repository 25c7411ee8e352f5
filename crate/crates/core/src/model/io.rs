//! TSV graph files and pattern files.
//!
//! Nodes: `<id>\t<label>\t<attrs>` with `attrs` empty or `name=value` pairs
//! joined by `;`. Edges: `<src>\t<label>\t<dst>`. Patterns: a
//! `vars: x:label, y:label` header followed by `src label dst` lines; an
//! optional `name:` line may precede the header. A file may hold several
//! patterns. Blank lines and lines starting with `#` are skipped everywhere.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use thiserror::Error;

use super::{GraphBuilder, GraphError, GraphPattern, Label, PatternError, PropertyGraph};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}:{line}: {source}", path.display())]
    Graph {
        path: PathBuf,
        line: usize,
        source: GraphError,
    },
    #[error("{}:{line}: {source}", path.display())]
    Pattern {
        path: PathBuf,
        line: usize,
        source: PatternError,
    },
}

impl LoadError {
    pub fn line(&self) -> Option<usize> {
        match self {
            LoadError::Io { .. } => None,
            LoadError::Syntax { line, .. }
            | LoadError::Graph { line, .. }
            | LoadError::Pattern { line, .. } => Some(*line),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, LoadError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Yields `(line number, text)` for every non-blank, non-comment line.
fn content_lines<'a>(
    path: &'a Path,
    reader: impl BufRead + 'a,
) -> impl Iterator<Item = Result<(usize, String), LoadError>> + 'a {
    reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Err(source) => Some(Err(LoadError::Io {
                path: path.to_path_buf(),
                source,
            })),
            Ok(text) => {
                let text = text.strip_suffix('\r').map(str::to_string).unwrap_or(text);
                if text.trim().is_empty() || text.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, text)))
                }
            }
        })
}

fn parse_attrs(text: &str) -> Result<Vec<(&str, &str)>, String> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|pair| {
            pair.split_once('=')
                .filter(|(name, value)| !name.is_empty() && !value.contains('='))
                .ok_or_else(|| format!("malformed attribute `{pair}`"))
        })
        .collect()
}

pub fn load_graph(nodes_path: &Path, edges_path: &Path) -> Result<PropertyGraph, LoadError> {
    let mut builder = GraphBuilder::new();
    let syntax = |path: &Path, line, message: String| LoadError::Syntax {
        path: path.to_path_buf(),
        line,
        message,
    };

    for entry in content_lines(nodes_path, open(nodes_path)?) {
        let (line, text) = entry?;
        let fields: Vec<&str> = text.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(syntax(nodes_path, line, format!("expected 2 or 3 tab-separated fields, found {}", fields.len())));
        }
        let id: u64 = fields[0]
            .parse()
            .map_err(|_| syntax(nodes_path, line, format!("invalid node id `{}`", fields[0])))?;
        let attrs = parse_attrs(fields.get(2).copied().unwrap_or(""))
            .map_err(|m| syntax(nodes_path, line, m))?;
        builder
            .add_node(id, fields[1], attrs)
            .map_err(|source| LoadError::Graph {
                path: nodes_path.to_path_buf(),
                line,
                source,
            })?;
    }

    for entry in content_lines(edges_path, open(edges_path)?) {
        let (line, text) = entry?;
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(syntax(edges_path, line, format!("expected 3 tab-separated fields, found {}", fields.len())));
        }
        let parse_id = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| syntax(edges_path, line, format!("invalid node id `{s}`")))
        };
        let (src, dst) = (parse_id(fields[0])?, parse_id(fields[2])?);
        builder
            .add_edge(src, fields[1], dst)
            .map_err(|source| LoadError::Graph {
                path: edges_path.to_path_buf(),
                line,
                source,
            })?;
    }

    let graph = builder.build();
    info!(
        "loaded graph: {} nodes, {} edges",
        graph.node_count(),
        graph.edge_count()
    );
    Ok(graph)
}

/// Writes the graph back out in the TSV format read by [`load_graph`].
pub fn write_graph(graph: &PropertyGraph, nodes_path: &Path, edges_path: &Path) -> io::Result<()> {
    let mut nodes = BufWriter::new(File::create(nodes_path)?);
    for node in graph.nodes() {
        let attrs: Vec<String> = node.attrs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(nodes, "{}\t{}\t{}", node.id, node.label, attrs.join(";"))?;
    }
    nodes.flush()?;
    let mut edges = BufWriter::new(File::create(edges_path)?);
    for (src, label, dst) in graph.edges() {
        writeln!(edges, "{src}\t{label}\t{dst}")?;
    }
    edges.flush()
}

struct PendingPattern {
    line: usize,
    name: Option<String>,
    vars: Vec<(String, Label)>,
    edges: Vec<(String, Label, String)>,
}

/// Parses every pattern in `text`. Unnamed patterns are called `default_name`,
/// suffixed with their position when the file holds more than one.
pub fn parse_patterns(
    path: &Path,
    text: &str,
    default_name: &str,
) -> Result<Vec<GraphPattern>, LoadError> {
    let syntax = |line, message: String| LoadError::Syntax {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut pending: Vec<PendingPattern> = Vec::new();
    let mut next_name: Option<String> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        if let Some(rest) = raw.strip_prefix("name:") {
            let name = rest.trim();
            if name.is_empty() {
                return Err(syntax(line, "empty pattern name".into()));
            }
            next_name = Some(name.to_string());
        } else if let Some(rest) = raw.strip_prefix("vars:") {
            let mut vars = Vec::new();
            for decl in rest.split(',') {
                let (v, l) = decl
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| syntax(line, format!("expected `name:label`, found `{}`", decl.trim())))?;
                let label = Label::new(l.trim())
                    .ok_or_else(|| syntax(line, format!("empty label for variable `{}`", v.trim())))?;
                vars.push((v.trim().to_string(), label));
            }
            pending.push(PendingPattern {
                line,
                name: next_name.take(),
                vars,
                edges: Vec::new(),
            });
        } else {
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let [src, label, dst] = fields[..] else {
                return Err(syntax(line, format!("expected `src label dst`, found `{raw}`")));
            };
            let current = pending
                .last_mut()
                .ok_or_else(|| syntax(line, "edge before `vars:` header".into()))?;
            let label = Label::new(label).expect("split_whitespace yields non-empty tokens");
            current.edges.push((src.to_string(), label, dst.to_string()));
        }
    }

    let many = pending.len() > 1;
    pending
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let name = p.name.unwrap_or_else(|| {
                if many {
                    format!("{default_name}{}", i + 1)
                } else {
                    default_name.to_string()
                }
            });
            GraphPattern::new(name, p.vars, p.edges).map_err(|source| LoadError::Pattern {
                path: path.to_path_buf(),
                line: p.line,
                source,
            })
        })
        .collect()
}

pub fn load_patterns(path: &Path) -> Result<Vec<GraphPattern>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("pattern");
    parse_patterns(path, &text, stem)
}

/// Loads a file that must contain exactly one pattern.
pub fn load_pattern(path: &Path) -> Result<GraphPattern, LoadError> {
    let mut patterns = load_patterns(path)?;
    if patterns.len() != 1 {
        return Err(LoadError::Syntax {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected exactly one pattern, found {}", patterns.len()),
        });
    }
    Ok(patterns.remove(0))
}
