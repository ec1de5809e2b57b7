//! Seeded uniform random graphs and attribute assignments.
//!
//! Draws come from ChaCha8 streams keyed by (purpose, block), so output is
//! identical across platforms and independent of how blocks are scheduled.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::di::VertexName;

const BLOCK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub m: usize,
    pub seed: u64,
    pub pool_size: usize,
    pub dedup: bool,
}

impl GenConfig {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            m,
            seed,
            pool_size: 50,
            dedup: true,
        }
    }

    pub fn with_pool_size(mut self, pool_size: usize) -> Self {
        assert!(pool_size >= 1, "attribute pool must not be empty");
        self.pool_size = pool_size;
        self
    }
}

/// Independent draw sequences derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Sources,
    Destinations,
    LabelEntities,
    LabelValues,
    RelEntities,
    RelValues,
    Query,
}

impl Stream {
    fn id(self) -> u64 {
        self as u64
    }
}

fn rng(seed: u64, stream: Stream, block: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream((stream.id() << 40) | block as u64);
    r
}

/// `len` uniform draws from `0..range`.
pub fn uniform_draws(seed: u64, stream: Stream, len: usize, range: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    if range == 0 {
        return out;
    }
    for block in 0..len.div_ceil(BLOCK) {
        let mut r = rng(seed, stream, block);
        let take = BLOCK.min(len - block * BLOCK);
        out.extend((0..take).map(|_| r.gen_range(0..range)));
    }
    out
}

/// `m` edges whose endpoints are uniform over `0..m`.
pub fn generate_random_graph(cfg: &GenConfig) -> (Vec<VertexName>, Vec<VertexName>) {
    let m = cfg.m as u64;
    (
        uniform_draws(cfg.seed, Stream::Sources, cfg.m, m),
        uniform_draws(cfg.seed, Stream::Destinations, cfg.m, m),
    )
}

pub fn attribute_pool(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("attr_{i}")).collect()
}

/// Which attribute family a draw is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrFamily {
    Labels,
    Relationships,
}

/// Entity picks paired with indices into the attribute pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeAssignment {
    pub entities: Vec<usize>,
    pub attrs: Vec<u32>,
    pub pool: Vec<String>,
}

impl AttributeAssignment {
    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn strings(&self) -> Vec<&str> {
        self.attrs.iter().map(|&a| self.pool[a as usize].as_str()).collect()
    }
}

/// `entity_count` picks of an entity index (with replacement), each with one
/// attribute drawn uniformly from the pool.
pub fn assign_random_attributes(entity_count: usize, cfg: &GenConfig, family: AttrFamily) -> AttributeAssignment {
    let (ents, vals) = match family {
        AttrFamily::Labels => (Stream::LabelEntities, Stream::LabelValues),
        AttrFamily::Relationships => (Stream::RelEntities, Stream::RelValues),
    };
    let entities = uniform_draws(cfg.seed, ents, entity_count, entity_count as u64)
        .into_iter()
        .map(|e| e as usize)
        .collect();
    let attrs = uniform_draws(cfg.seed, vals, entity_count, cfg.pool_size as u64)
        .into_iter()
        .map(|a| a as u32)
        .collect();
    AttributeAssignment {
        entities,
        attrs,
        pool: attribute_pool(cfg.pool_size),
    }
}

/// `arity` distinct pool entries chosen by seed, for query workloads.
pub fn query_subset(candidates: &[String], arity: usize, seed: u64, family: AttrFamily) -> Vec<String> {
    let mut r = rng(seed, Stream::Query, family as usize);
    let arity = arity.min(candidates.len());
    let mut picked: Vec<usize> = sample(&mut r, candidates.len(), arity).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| candidates[i].clone()).collect()
}
