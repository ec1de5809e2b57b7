//! Naive reference implementations used as ground truth in tests.
//!
//! Everything here works on original vertex names with ordered maps and
//! linear scans. Nothing is optimized.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleGraph {
    /// Sorted out-neighbor names per source name. Multiedges repeat unless
    /// built with dedup.
    pub adjacency: BTreeMap<u64, Vec<u64>>,
    pub vertex_attrs: BTreeMap<u64, BTreeSet<String>>,
    pub edge_attrs: BTreeMap<(u64, u64), BTreeSet<String>>,
}

pub fn oracle_build(src: &[u64], dst: &[u64], dedup: bool) -> Result<OracleGraph> {
    if src.len() != dst.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", src.len(), dst.len())));
    }
    let mut g = OracleGraph::default();
    let mut seen = BTreeSet::new();
    for (&u, &v) in src.iter().zip(dst) {
        if dedup && !seen.insert((u, v)) {
            continue;
        }
        g.adjacency.entry(u).or_default().push(v);
    }
    for list in g.adjacency.values_mut() {
        list.sort_unstable();
    }
    Ok(g)
}

impl OracleGraph {
    /// Every vertex name appearing as an endpoint, ascending.
    pub fn vertices(&self) -> BTreeSet<u64> {
        self.adjacency
            .iter()
            .flat_map(|(&u, vs)| std::iter::once(u).chain(vs.iter().copied()))
            .collect()
    }

    pub fn neighbors(&self, u: u64) -> &[u64] {
        self.adjacency.get(&u).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn add_vertex_attr(&mut self, v: u64, attr: &str) {
        self.vertex_attrs.entry(v).or_default().insert(attr.to_owned());
    }

    pub fn add_edge_attr(&mut self, u: u64, v: u64, attr: &str) {
        self.edge_attrs.entry((u, v)).or_default().insert(attr.to_owned());
    }
}

/// `bits[e]` is set when entity `e`'s string set meets `query`.
pub fn oracle_query<S: AsRef<str>>(attrs_by_entity: &[BTreeSet<String>], query: &[S]) -> Vec<bool> {
    attrs_by_entity
        .iter()
        .map(|set| query.iter().any(|q| set.contains(q.as_ref())))
        .collect()
}

/// Edges `(src[e], dst[e])` with `emask[e]`, `vmask[src[e]]` and `vmask[dst[e]]` all set.
pub fn oracle_subgraph(src: &[u32], dst: &[u32], vmask: &[bool], emask: &[bool]) -> Result<Vec<(u32, u32)>> {
    if src.len() != dst.len() || emask.len() != src.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} sources, {} destinations, {} edge bits",
            src.len(),
            dst.len(),
            emask.len()
        )));
    }
    let mut out = Vec::new();
    for e in 0..src.len() {
        let (u, v) = (src[e] as usize, dst[e] as usize);
        if u >= vmask.len() || v >= vmask.len() {
            return Err(Error::ShapeMismatch(format!("vertex mask of {} bits", vmask.len())));
        }
        if emask[e] && vmask[u] && vmask[v] {
            out.push((src[e], dst[e]));
        }
    }
    Ok(out)
}
