//! CSV readers and writers for edge lists and attribute assignments.
//!
//! Files are comma separated without quoting. A first row whose leading
//! field is not an unsigned integer is treated as a header and skipped.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::di::VertexName;
use crate::error::{Error, Result};
use crate::prop_graph::{PropGraph, Scalar};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub src: Vec<VertexName>,
    pub dst: Vec<VertexName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    VertexLabel,
    EdgeRel,
    VertexProp,
    EdgeProp,
}

impl AttrKind {
    pub fn arity(self) -> usize {
        match self {
            AttrKind::VertexLabel => 2,
            AttrKind::EdgeRel | AttrKind::VertexProp => 3,
            AttrKind::EdgeProp => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AttrKind::VertexLabel => "vertex-label",
            AttrKind::EdgeRel => "edge-rel",
            AttrKind::VertexProp => "vertex-prop",
            AttrKind::EdgeProp => "edge-prop",
        }
    }
}

/// Parsed attribute file, shaped for the matching [`PropGraph`] loader.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrRows {
    VertexLabels {
        nodes: Vec<VertexName>,
        labels: Vec<String>,
    },
    EdgeRels {
        src: Vec<VertexName>,
        dst: Vec<VertexName>,
        rels: Vec<String>,
    },
    VertexProps {
        nodes: Vec<VertexName>,
        keys: Vec<String>,
        values: Vec<Scalar>,
    },
    EdgeProps {
        src: Vec<VertexName>,
        dst: Vec<VertexName>,
        keys: Vec<String>,
        values: Vec<Scalar>,
    },
}

impl AttrRows {
    pub fn len(&self) -> usize {
        match self {
            AttrRows::VertexLabels { nodes, .. } | AttrRows::VertexProps { nodes, .. } => nodes.len(),
            AttrRows::EdgeRels { src, .. } | AttrRows::EdgeProps { src, .. } => src.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads the rows into `graph` through the matching attribute function.
    /// Property rows are grouped by key, keeping file order within a key.
    pub fn apply_to(&self, graph: &mut PropGraph) -> Result<()> {
        match self {
            AttrRows::VertexLabels { nodes, labels } => graph.add_node_labels(nodes, labels),
            AttrRows::EdgeRels { src, dst, rels } => graph.add_edge_relationships(src, dst, rels),
            AttrRows::VertexProps { nodes, keys, values } => {
                for (key, rows) in group_by_key(keys) {
                    let pick = |v: &[u64]| rows.iter().map(|&i| v[i]).collect::<Vec<_>>();
                    let vals: Vec<Scalar> = rows.iter().map(|&i| values[i].clone()).collect();
                    graph.add_node_properties(&pick(nodes), key, &vals)?;
                }
                Ok(())
            }
            AttrRows::EdgeProps { src, dst, keys, values } => {
                for (key, rows) in group_by_key(keys) {
                    let pick = |v: &[u64]| rows.iter().map(|&i| v[i]).collect::<Vec<_>>();
                    let vals: Vec<Scalar> = rows.iter().map(|&i| values[i].clone()).collect();
                    graph.add_edge_properties(&pick(src), &pick(dst), key, &vals)?;
                }
                Ok(())
            }
        }
    }
}

fn group_by_key(keys: &[String]) -> Vec<(&str, Vec<usize>)> {
    let mut groups: Vec<(&str, Vec<usize>)> = Vec::new();
    for (i, k) in keys.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, rows)) => rows.push(i),
            None => groups.push((k, vec![i])),
        }
    }
    groups
}

/// Data rows of a file as (line number, fields).
fn read_rows(path: &Path) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .quoting(false)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_owned(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let fields: Vec<String> = record.iter().map(str::to_owned).collect();
        if i == 0 && fields.first().is_some_and(|f| f.parse::<u64>().is_err()) {
            continue;
        }
        rows.push((line, fields));
    }
    Ok(rows)
}

fn parse_name(path: &Path, line: u64, field: &str) -> Result<VertexName> {
    field.parse().map_err(|_| Error::Parse {
        path: path.to_owned(),
        line,
        message: format!("`{field}` is not an unsigned vertex name"),
    })
}

fn check_arity(path: &Path, line: u64, fields: &[String], expected: usize) -> Result<()> {
    if fields.len() == expected {
        Ok(())
    } else {
        Err(Error::Parse {
            path: path.to_owned(),
            line,
            message: format!("expected {expected} fields, found {}", fields.len()),
        })
    }
}

pub fn load_edge_csv(path: impl AsRef<Path>) -> Result<EdgeList> {
    let path = path.as_ref();
    let mut edges = EdgeList::default();
    for (line, fields) in read_rows(path)? {
        check_arity(path, line, &fields, 2)?;
        edges.src.push(parse_name(path, line, &fields[0])?);
        edges.dst.push(parse_name(path, line, &fields[1])?);
    }
    Ok(edges)
}

pub fn load_attr_csv(path: impl AsRef<Path>, kind: AttrKind) -> Result<AttrRows> {
    let path = path.as_ref();
    let rows = read_rows(path)?;
    if let Some((_, first)) = rows.first() {
        if first.len() != kind.arity() {
            return Err(Error::KindArityMismatch {
                path: path.to_owned(),
                kind: kind.name(),
                expected: kind.arity(),
                found: first.len(),
            });
        }
    }
    let mut names: [Vec<VertexName>; 2] = Default::default();
    let mut strings = Vec::with_capacity(rows.len());
    let mut values = Vec::new();
    let endpoints = match kind {
        AttrKind::VertexLabel | AttrKind::VertexProp => 1,
        AttrKind::EdgeRel | AttrKind::EdgeProp => 2,
    };
    for (line, mut fields) in rows {
        check_arity(path, line, &fields, kind.arity())?;
        for (slot, field) in names.iter_mut().zip(&fields[..endpoints]) {
            slot.push(parse_name(path, line, field)?);
        }
        if matches!(kind, AttrKind::VertexProp | AttrKind::EdgeProp) {
            values.push(Scalar::parse(&fields[endpoints + 1]));
        }
        strings.push(std::mem::take(&mut fields[endpoints]));
    }
    let [first, second] = names;
    Ok(match kind {
        AttrKind::VertexLabel => AttrRows::VertexLabels {
            nodes: first,
            labels: strings,
        },
        AttrKind::EdgeRel => AttrRows::EdgeRels {
            src: first,
            dst: second,
            rels: strings,
        },
        AttrKind::VertexProp => AttrRows::VertexProps {
            nodes: first,
            keys: strings,
            values,
        },
        AttrKind::EdgeProp => AttrRows::EdgeProps {
            src: first,
            dst: second,
            keys: strings,
            values,
        },
    })
}

pub fn write_edge_csv(path: impl AsRef<Path>, src: &[VertexName], dst: &[VertexName]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "src,dst")?;
    for (s, d) in src.iter().zip(dst) {
        writeln!(out, "{s},{d}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_vertex_label_csv<S: AsRef<str>>(
    path: impl AsRef<Path>,
    nodes: &[VertexName],
    labels: &[S],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "vertex,label")?;
    for (v, l) in nodes.iter().zip(labels) {
        writeln!(out, "{v},{}", l.as_ref())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_edge_rel_csv<S: AsRef<str>>(
    path: impl AsRef<Path>,
    src: &[VertexName],
    dst: &[VertexName],
    rels: &[S],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "src,dst,rel")?;
    for ((s, d), r) in src.iter().zip(dst).zip(rels) {
        writeln!(out, "{s},{d},{}", r.as_ref())?;
    }
    out.flush()?;
    Ok(())
}
