//! Double-Index graph layout: edges sorted by (source, destination) in two
//! parallel arrays, plus a vertex offset array delimiting each adjacency run.

use crate::error::{Error, Result};
use crate::par::Sharding;

/// Original vertex name as it appears in input data.
pub type VertexName = u64;
/// Dense internal vertex index in `0..n`.
pub type VertexIndex = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraphIndex {
    src: Vec<VertexIndex>,
    dst: Vec<VertexIndex>,
    seg: Vec<usize>,
    /// Internal index to original name. Sorted ascending, so it doubles as
    /// the lookup table for the reverse direction.
    names: Vec<VertexName>,
}

/// An average degree kept as the exact ratio `edges / vertices`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AvgDegree {
    pub edges: usize,
    pub vertices: usize,
}

impl AvgDegree {
    pub fn floor(&self) -> usize {
        self.edges / self.vertices
    }

    pub fn value(&self) -> f64 {
        self.edges as f64 / self.vertices as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeStats {
    pub min_in: usize,
    pub max_in: usize,
    pub avg_in: AvgDegree,
    pub min_out: usize,
    pub max_out: usize,
    pub avg_out: AvgDegree,
}

impl DiGraphIndex {
    /// Builds the index from parallel arrays of endpoint names.
    ///
    /// Names are normalized to `0..n` in ascending name order. With `dedup`
    /// set, repeated `(u, v)` pairs collapse into one structural edge.
    pub fn build_from_edges(
        src_names: &[VertexName],
        dst_names: &[VertexName],
        dedup: bool,
        sharding: &Sharding,
    ) -> Result<Self> {
        if src_names.len() != dst_names.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} source names vs {} destination names",
                src_names.len(),
                dst_names.len()
            )));
        }

        let mut names = Vec::with_capacity(src_names.len() * 2);
        names.extend_from_slice(src_names);
        names.extend_from_slice(dst_names);
        sharding.sort_unstable(&mut names);
        names.dedup();
        names.shrink_to_fit();
        if names.len() > VertexIndex::MAX as usize {
            return Err(Error::ShapeMismatch(format!(
                "{} distinct vertices exceed the index width",
                names.len()
            )));
        }

        let index_of = |name: &VertexName| names.binary_search(name).expect("name was collected") as u64;
        let src_idx = sharding.map_slice(src_names, index_of);
        let mut keys = sharding.map_slice(dst_names, index_of);
        for (k, s) in keys.iter_mut().zip(src_idx) {
            *k |= s << 32;
        }
        sharding.sort_unstable(&mut keys);
        if dedup {
            keys.dedup();
        }

        let src: Vec<VertexIndex> = keys.iter().map(|k| (k >> 32) as VertexIndex).collect();
        let dst: Vec<VertexIndex> = keys.iter().map(|k| *k as VertexIndex).collect();
        drop(keys);
        let seg = offsets_from_sorted(&src, names.len());
        Ok(Self { src, dst, seg, names })
    }

    /// Assembles an index from arrays already satisfying the layout invariants.
    pub(crate) fn from_sorted_parts(
        src: Vec<VertexIndex>,
        dst: Vec<VertexIndex>,
        names: Vec<VertexName>,
    ) -> Self {
        debug_assert!(src.windows(2).all(|w| w[0] <= w[1]));
        let seg = offsets_from_sorted(&src, names.len());
        Self { src, dst, seg, names }
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self) -> &[VertexIndex] {
        &self.src
    }

    pub fn dst(&self) -> &[VertexIndex] {
        &self.dst
    }

    pub fn seg(&self) -> &[usize] {
        &self.seg
    }

    pub fn names(&self) -> &[VertexName] {
        &self.names
    }

    pub fn name_of(&self, u: VertexIndex) -> Result<VertexName> {
        self.names
            .get(u as usize)
            .copied()
            .ok_or(Error::VertexIndexOutOfRange(u as usize))
    }

    fn check_vertex(&self, u: VertexIndex) -> Result<usize> {
        let u = u as usize;
        if u < self.names.len() {
            Ok(u)
        } else {
            Err(Error::VertexIndexOutOfRange(u))
        }
    }

    /// Out-neighbors of `u`, borrowed directly from the destination array.
    pub fn neighbors(&self, u: VertexIndex) -> Result<&[VertexIndex]> {
        let u = self.check_vertex(u)?;
        Ok(&self.dst[self.seg[u]..self.seg[u + 1]])
    }

    pub fn out_degree(&self, u: VertexIndex) -> Result<usize> {
        let u = self.check_vertex(u)?;
        Ok(self.seg[u + 1] - self.seg[u])
    }

    /// First edge index carrying `(u, v)`, found by binary search inside the
    /// adjacency run of `u`.
    pub fn find_edge(&self, u: VertexIndex, v: VertexIndex) -> Option<usize> {
        let u = u as usize;
        if u >= self.names.len() {
            return None;
        }
        let (lo, hi) = (self.seg[u], self.seg[u + 1]);
        let run = &self.dst[lo..hi];
        let pos = run.partition_point(|&x| x < v);
        (pos < run.len() && run[pos] == v).then_some(lo + pos)
    }

    pub fn internal_index_of(&self, name: VertexName) -> Option<VertexIndex> {
        self.names.binary_search(&name).ok().map(|i| i as VertexIndex)
    }

    /// Edge lookup by original endpoint names.
    pub fn find_edge_by_name(&self, src: VertexName, dst: VertexName) -> Option<usize> {
        self.find_edge(self.internal_index_of(src)?, self.internal_index_of(dst)?)
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.names.len()];
        for &v in &self.dst {
            deg[v as usize] += 1;
        }
        deg
    }

    pub fn degree_stats(&self) -> Result<DegreeStats> {
        let n = self.names.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let ins = self.in_degrees();
        let outs = self.seg.windows(2).map(|w| w[1] - w[0]);
        let avg = AvgDegree {
            edges: self.edge_count(),
            vertices: n,
        };
        Ok(DegreeStats {
            min_in: *ins.iter().min().unwrap(),
            max_in: *ins.iter().max().unwrap(),
            avg_in: avg,
            min_out: outs.clone().min().unwrap(),
            max_out: outs.max().unwrap(),
            avg_out: avg,
        })
    }

    /// Logical size of the index arrays in bytes.
    pub fn logical_bytes(&self) -> usize {
        use std::mem::size_of;
        (self.src.len() + self.dst.len()) * size_of::<VertexIndex>()
            + self.seg.len() * size_of::<usize>()
            + self.names.len() * size_of::<VertexName>()
    }
}

fn offsets_from_sorted(src: &[VertexIndex], n: usize) -> Vec<usize> {
    let mut seg = vec![0usize; n + 1];
    for &u in src {
        seg[u as usize + 1] += 1;
    }
    for i in 1..=n {
        seg[i] += seg[i - 1];
    }
    seg
}
