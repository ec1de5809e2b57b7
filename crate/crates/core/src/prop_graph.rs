//! User-level property graph: one Double-Index structure plus label and
//! relationship stores and property columns.

use std::collections::BTreeMap;

use crate::attr::{AnyStore, AttrId, AttributeStore, Backend, EntityKind, EntityMask};
use crate::di::{DiGraphIndex, VertexIndex, VertexName};
use crate::dictionary::SymbolTable;
use crate::error::{Error, Result};
use crate::par::Sharding;

/// A single property value.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Int(i64),
    Real(f64),
    Str(String),
}

impl Scalar {
    fn type_name(&self) -> &'static str {
        match self {
            Scalar::Int(_) => "integer",
            Scalar::Real(_) => "real",
            Scalar::Str(_) => "string",
        }
    }

    /// Reads an integer, then a real, falling back to a string.
    pub fn parse(text: &str) -> Self {
        if let Ok(i) = text.parse() {
            Scalar::Int(i)
        } else if let Ok(r) = text.parse() {
            Scalar::Real(r)
        } else {
            Scalar::Str(text.to_owned())
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Real(v) => write!(f, "{v}"),
            Scalar::Str(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Int(Vec<Option<i64>>),
    Real(Vec<Option<f64>>),
    Str(Vec<Option<String>>),
}

impl ColumnValues {
    fn empty_like(sample: &Scalar, len: usize) -> Self {
        match sample {
            Scalar::Int(_) => ColumnValues::Int(vec![None; len]),
            Scalar::Real(_) => ColumnValues::Real(vec![None; len]),
            Scalar::Str(_) => ColumnValues::Str(vec![None; len]),
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            ColumnValues::Int(_) => "integer",
            ColumnValues::Real(_) => "real",
            ColumnValues::Str(_) => "string",
        }
    }

    fn len(&self) -> usize {
        match self {
            ColumnValues::Int(v) => v.len(),
            ColumnValues::Real(v) => v.len(),
            ColumnValues::Str(v) => v.len(),
        }
    }

    fn gather(&self, rows: &[usize]) -> Self {
        match self {
            ColumnValues::Int(v) => ColumnValues::Int(rows.iter().map(|&r| v[r]).collect()),
            ColumnValues::Real(v) => ColumnValues::Real(rows.iter().map(|&r| v[r]).collect()),
            ColumnValues::Str(v) => ColumnValues::Str(rows.iter().map(|&r| v[r].clone()).collect()),
        }
    }
}

/// Dense optional values for one property key over all vertices or edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyColumn {
    key: String,
    kind: EntityKind,
    values: ColumnValues,
}

impl PropertyColumn {
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &ColumnValues {
        &self.values
    }

    /// `None` when the entity has no value for this key.
    pub fn get(&self, entity: usize) -> Option<Scalar> {
        match &self.values {
            ColumnValues::Int(v) => v.get(entity).copied().flatten().map(Scalar::Int),
            ColumnValues::Real(v) => v.get(entity).copied().flatten().map(Scalar::Real),
            ColumnValues::Str(v) => v.get(entity).cloned().flatten().map(Scalar::Str),
        }
    }

    fn write(&mut self, rows: &[usize], values: &[Scalar]) -> Result<()> {
        let mismatch = |found: &Scalar| Error::TypeMismatch {
            key: self.key.clone(),
            expected: self.values.type_name(),
            found: found.type_name(),
        };
        if let Some(bad) = values.iter().find(|v| v.type_name() != self.values.type_name()) {
            return Err(mismatch(bad));
        }
        for (&row, value) in rows.iter().zip(values) {
            match (&mut self.values, value) {
                (ColumnValues::Int(col), Scalar::Int(v)) => col[row] = Some(*v),
                (ColumnValues::Real(col), Scalar::Real(v)) => col[row] = Some(*v),
                (ColumnValues::Str(col), Scalar::Str(v)) => col[row] = Some(v.clone()),
                _ => unreachable!("types checked above"),
            }
        }
        Ok(())
    }
}

/// Index maps from a subgraph back to the graph it was cut from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphOrigin {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PropGraphConfig {
    pub backend: Backend,
    pub sharding: Sharding,
    pub dedup: bool,
}

impl PropGraphConfig {
    pub fn new(backend: Backend, shards: usize) -> Self {
        Self {
            backend,
            sharding: Sharding::parallel(shards),
            dedup: true,
        }
    }

    pub fn with_dedup(mut self, dedup: bool) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn with_sharding(mut self, sharding: Sharding) -> Self {
        self.sharding = sharding;
        self
    }
}

#[derive(Debug)]
struct Built {
    graph: DiGraphIndex,
    labels: AnyStore,
    rels: AnyStore,
}

#[derive(Debug)]
pub struct PropGraph {
    config: PropGraphConfig,
    built: Option<Built>,
    label_table: SymbolTable,
    rel_table: SymbolTable,
    vertex_props: BTreeMap<String, PropertyColumn>,
    edge_props: BTreeMap<String, PropertyColumn>,
    origin: Option<SubgraphOrigin>,
}

impl PropGraph {
    pub fn new(config: PropGraphConfig) -> Self {
        Self {
            config,
            built: None,
            label_table: SymbolTable::new(),
            rel_table: SymbolTable::new(),
            vertex_props: BTreeMap::new(),
            edge_props: BTreeMap::new(),
            origin: None,
        }
    }

    fn built(&self) -> Result<&Built> {
        self.built.as_ref().ok_or(Error::NotBuilt)
    }

    fn built_mut(&mut self) -> Result<&mut Built> {
        self.built.as_mut().ok_or(Error::NotBuilt)
    }

    pub fn config(&self) -> &PropGraphConfig {
        &self.config
    }

    pub fn backend(&self) -> Backend {
        self.config.backend
    }

    pub fn is_built(&self) -> bool {
        self.built.is_some()
    }

    pub fn graph(&self) -> Result<&DiGraphIndex> {
        Ok(&self.built()?.graph)
    }

    pub fn label_store(&self) -> Result<&AnyStore> {
        Ok(&self.built()?.labels)
    }

    pub fn rel_store(&self) -> Result<&AnyStore> {
        Ok(&self.built()?.rels)
    }

    pub fn label_table(&self) -> &SymbolTable {
        &self.label_table
    }

    pub fn rel_table(&self) -> &SymbolTable {
        &self.rel_table
    }

    pub fn vertex_property(&self, key: &str) -> Option<&PropertyColumn> {
        self.vertex_props.get(key)
    }

    pub fn edge_property(&self, key: &str) -> Option<&PropertyColumn> {
        self.edge_props.get(key)
    }

    pub fn vertex_properties(&self) -> impl Iterator<Item = &PropertyColumn> {
        self.vertex_props.values()
    }

    pub fn edge_properties(&self) -> impl Iterator<Item = &PropertyColumn> {
        self.edge_props.values()
    }

    /// Present only on graphs produced by [`PropGraph::subgraph`].
    pub fn origin(&self) -> Option<&SubgraphOrigin> {
        self.origin.as_ref()
    }

    /// Builds the edge structure. Allowed once per graph.
    pub fn add_edges_from(&mut self, src: &[VertexName], dst: &[VertexName]) -> Result<()> {
        if self.built.is_some() {
            return Err(Error::AlreadyBuilt);
        }
        let graph = DiGraphIndex::build_from_edges(src, dst, self.config.dedup, &self.config.sharding)?;
        self.install(graph);
        Ok(())
    }

    fn install(&mut self, graph: DiGraphIndex) {
        let new_store = |n, k, kind| AnyStore::new(self.config.backend, n, k, kind, self.config.sharding.clone());
        let labels = new_store(graph.vertex_count(), self.label_table.len(), EntityKind::Vertex);
        let rels = new_store(graph.edge_count(), self.rel_table.len(), EntityKind::Edge);
        self.built = Some(Built { graph, labels, rels });
    }

    fn vertex_rows(&self, nodes: &[VertexName]) -> Result<Vec<usize>> {
        let graph = &self.built()?.graph;
        let rows = self.config.sharding.map_slice(nodes, |&name| graph.internal_index_of(name));
        rows.into_iter()
            .enumerate()
            .map(|(position, row)| {
                row.map(|r| r as usize).ok_or(Error::VertexNotFound {
                    name: nodes[position],
                    position,
                })
            })
            .collect()
    }

    fn edge_rows(&self, src: &[VertexName], dst: &[VertexName]) -> Result<Vec<usize>> {
        check_len("source names", src.len(), "destination names", dst.len())?;
        let graph = &self.built()?.graph;
        let rows = self
            .config
            .sharding
            .map(src.len(), |i| graph.find_edge_by_name(src[i], dst[i]));
        rows.into_iter()
            .enumerate()
            .map(|(position, row)| {
                row.ok_or(Error::EdgeNotFound {
                    src: src[position],
                    dst: dst[position],
                    position,
                })
            })
            .collect()
    }

    pub fn add_node_labels<S: AsRef<str>>(&mut self, nodes: &[VertexName], labels: &[S]) -> Result<()> {
        check_len("nodes", nodes.len(), "labels", labels.len())?;
        let rows = self.vertex_rows(nodes)?;
        let ids = self.label_table.intern_bulk(labels);
        let k = self.label_table.len();
        let store = &mut self.built_mut()?.labels;
        store.grow_attr_capacity(k);
        store.insert_bulk(&rows, &ids)
    }

    pub fn add_edge_relationships<S: AsRef<str>>(
        &mut self,
        src: &[VertexName],
        dst: &[VertexName],
        rels: &[S],
    ) -> Result<()> {
        check_len("edges", src.len(), "relationships", rels.len())?;
        let rows = self.edge_rows(src, dst)?;
        let ids = self.rel_table.intern_bulk(rels);
        let k = self.rel_table.len();
        let store = &mut self.built_mut()?.rels;
        store.grow_attr_capacity(k);
        store.insert_bulk(&rows, &ids)
    }

    pub fn add_node_properties(&mut self, nodes: &[VertexName], key: &str, values: &[Scalar]) -> Result<()> {
        check_len("nodes", nodes.len(), "values", values.len())?;
        let rows = self.vertex_rows(nodes)?;
        let n = self.built()?.graph.vertex_count();
        write_column(&mut self.vertex_props, EntityKind::Vertex, n, key, &rows, values)
    }

    pub fn add_edge_properties(
        &mut self,
        src: &[VertexName],
        dst: &[VertexName],
        key: &str,
        values: &[Scalar],
    ) -> Result<()> {
        check_len("edges", src.len(), "values", values.len())?;
        let rows = self.edge_rows(src, dst)?;
        let m = self.built()?.graph.edge_count();
        write_column(&mut self.edge_props, EntityKind::Edge, m, key, &rows, values)
    }

    /// Vertices carrying any of `labels`. Labels never loaded match nothing.
    pub fn query_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<EntityMask> {
        let ids = known_ids(&self.label_table, labels);
        self.built()?.labels.query_any(&ids)
    }

    /// Edges carrying any of `rels`. Relationships never loaded match nothing.
    pub fn query_relationships<S: AsRef<str>>(&self, rels: &[S]) -> Result<EntityMask> {
        let ids = known_ids(&self.rel_table, rels);
        self.built()?.rels.query_any(&ids)
    }

    pub fn labels_of(&self, vertex: VertexIndex) -> Result<Vec<&str>> {
        let ids = self.built()?.labels.attributes_of(vertex as usize)?;
        ids.into_iter().map(|id| self.label_table.resolve(id)).collect()
    }

    pub fn relationships_of(&self, edge: usize) -> Result<Vec<&str>> {
        let ids = self.built()?.rels.attributes_of(edge)?;
        ids.into_iter().map(|id| self.rel_table.resolve(id)).collect()
    }

    /// Cuts out the edges selected by `emask` whose endpoints are both
    /// selected by `vmask`, together with those endpoints. Attributes and
    /// properties follow their entities; [`PropGraph::origin`] on the result
    /// maps new indices back to this graph.
    pub fn subgraph(&self, vmask: &EntityMask, emask: &EntityMask) -> Result<PropGraph> {
        let built = self.built()?;
        let g = &built.graph;
        check_len("vertex mask", vmask.len(), "vertex count", g.vertex_count())?;
        check_len("edge mask", emask.len(), "edge count", g.edge_count())?;

        let (src, dst) = (g.src(), g.dst());
        let edges: Vec<usize> = emask
            .iter_ones()
            .filter(|&e| vmask.get(src[e] as usize) && vmask.get(dst[e] as usize))
            .collect();

        let mut keep = vec![false; g.vertex_count()];
        for &e in &edges {
            keep[src[e] as usize] = true;
            keep[dst[e] as usize] = true;
        }
        let vertices: Vec<usize> = (0..keep.len()).filter(|&u| keep[u]).collect();
        let mut remap = vec![VertexIndex::MAX; g.vertex_count()];
        for (new, &old) in vertices.iter().enumerate() {
            remap[old] = new as VertexIndex;
        }

        // Old indices are in name order and old edges in (src, dst) order, so
        // the filtered arrays already satisfy the layout invariants.
        let graph = DiGraphIndex::from_sorted_parts(
            edges.iter().map(|&e| remap[src[e] as usize]).collect(),
            edges.iter().map(|&e| remap[dst[e] as usize]).collect(),
            vertices.iter().map(|&u| g.names()[u]).collect(),
        );

        let mut sub = PropGraph::new(self.config.clone());
        sub.label_table = self.label_table.clone();
        sub.rel_table = self.rel_table.clone();
        sub.install(graph);
        let parts = sub.built.as_mut().expect("just installed");
        copy_attributes(&built.labels, &mut parts.labels, &vertices)?;
        copy_attributes(&built.rels, &mut parts.rels, &edges)?;
        sub.vertex_props = gather_columns(&self.vertex_props, &vertices);
        sub.edge_props = gather_columns(&self.edge_props, &edges);

        sub.origin = Some(match &self.origin {
            Some(o) => SubgraphOrigin {
                vertices: vertices.iter().map(|&u| o.vertices[u]).collect(),
                edges: edges.iter().map(|&e| o.edges[e]).collect(),
            },
            None => SubgraphOrigin { vertices, edges },
        });
        Ok(sub)
    }
}

fn check_len(a: &str, alen: usize, b: &str, blen: usize) -> Result<()> {
    if alen == blen {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{alen} {a} vs {blen} {b}")))
    }
}

fn known_ids<S: AsRef<str>>(table: &SymbolTable, values: &[S]) -> Vec<AttrId> {
    values.iter().filter_map(|v| table.get(v.as_ref())).collect()
}

fn write_column(
    columns: &mut BTreeMap<String, PropertyColumn>,
    kind: EntityKind,
    len: usize,
    key: &str,
    rows: &[usize],
    values: &[Scalar],
) -> Result<()> {
    let Some(first) = values.first() else {
        return Ok(());
    };
    let column = columns.entry(key.to_owned()).or_insert_with(|| PropertyColumn {
        key: key.to_owned(),
        kind,
        values: ColumnValues::empty_like(first, len),
    });
    column.write(rows, values)
}

fn copy_attributes(from: &AnyStore, to: &mut AnyStore, rows: &[usize]) -> Result<()> {
    let mut entities = Vec::new();
    let mut attrs = Vec::new();
    for (new, &old) in rows.iter().enumerate() {
        for a in from.attributes_of(old)? {
            entities.push(new);
            attrs.push(a);
        }
    }
    to.insert_bulk(&entities, &attrs)
}

fn gather_columns(columns: &BTreeMap<String, PropertyColumn>, rows: &[usize]) -> BTreeMap<String, PropertyColumn> {
    columns
        .iter()
        .map(|(k, c)| {
            (
                k.clone(),
                PropertyColumn {
                    key: c.key.clone(),
                    kind: c.kind,
                    values: c.values.gather(rows),
                },
            )
        })
        .collect()
}
