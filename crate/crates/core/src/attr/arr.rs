use std::collections::BTreeSet;
use std::ops::Range;

use super::{check_attr, check_entity, check_insert, AttrId, AttributeStore, EntityKind, EntityMask};
use crate::error::Result;
use crate::par::Sharding;

/// One shard's column block of the presence matrix: `capacity` rows of
/// `words_per_row` packed words each, row-major.
#[derive(Debug, Clone)]
struct Block {
    columns: Range<usize>,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Block {
    fn row(&self, attr: AttrId) -> &[u64] {
        let start = attr as usize * self.words_per_row;
        &self.bits[start..start + self.words_per_row]
    }
}

/// Attributes × entities presence matrix, split into per-shard column blocks.
#[derive(Debug, Clone)]
pub struct DipArr {
    blocks: Vec<Block>,
    entity_count: usize,
    capacity: usize,
    kind: EntityKind,
    sharding: Sharding,
}

impl DipArr {
    pub fn new(entity_count: usize, attr_capacity: usize, kind: EntityKind, sharding: Sharding) -> Self {
        let blocks = sharding
            .ranges(entity_count)
            .into_iter()
            .map(|columns| {
                let words_per_row = columns.len().div_ceil(64);
                Block {
                    bits: vec![0; words_per_row * attr_capacity],
                    columns,
                    words_per_row,
                }
            })
            .collect();
        Self {
            blocks,
            entity_count,
            capacity: attr_capacity,
            kind,
            sharding,
        }
    }
}

impl AttributeStore for DipArr {
    fn entity_count(&self) -> usize {
        self.entity_count
    }

    fn attr_capacity(&self) -> usize {
        self.capacity
    }

    fn kind(&self) -> EntityKind {
        self.kind
    }

    fn grow_attr_capacity(&mut self, capacity: usize) {
        if capacity > self.capacity {
            for b in &mut self.blocks {
                b.bits.resize(b.words_per_row * capacity, 0);
            }
            self.capacity = capacity;
        }
    }

    fn insert_bulk(&mut self, entities: &[usize], attrs: &[AttrId]) -> Result<()> {
        check_insert(entities, attrs, self.entity_count, self.capacity)?;
        let buckets = self.sharding.bucket_pairs(self.entity_count, entities, attrs);
        let work: Vec<_> = self.blocks.iter_mut().zip(buckets).collect();
        self.sharding.for_each(work, |_, (block, bucket)| {
            for (e, a) in bucket {
                let col = e - block.columns.start;
                block.bits[a as usize * block.words_per_row + col / 64] |= 1 << (col % 64);
            }
        });
        Ok(())
    }

    fn query_any(&self, attrs: &[AttrId]) -> Result<EntityMask> {
        for &a in attrs {
            check_attr(a, self.capacity)?;
        }
        let mut mask = EntityMask::new(self.entity_count, self.kind);
        if attrs.is_empty() {
            return Ok(mask);
        }
        let word_ranges: Vec<_> = self
            .blocks
            .iter()
            .map(|b| b.columns.start / 64..b.columns.end.div_ceil(64))
            .collect();
        let parts = Sharding::split_mut(&word_ranges, mask.words_mut());
        let work: Vec<_> = parts.into_iter().zip(&self.blocks).collect();
        self.sharding.for_each(work, |_, (out, block)| {
            for &a in attrs {
                for (o, w) in out.iter_mut().zip(block.row(a)) {
                    *o |= w;
                }
            }
        });
        Ok(mask)
    }

    fn attributes_of(&self, entity: usize) -> Result<BTreeSet<AttrId>> {
        check_entity(entity, self.entity_count)?;
        let block = &self.blocks[self.sharding.owner(self.entity_count, entity)];
        let col = entity - block.columns.start;
        Ok((0..self.capacity as AttrId)
            .filter(|&a| block.row(a)[col / 64] >> (col % 64) & 1 == 1)
            .collect())
    }

    fn count_entities(&self, attr: AttrId) -> Result<usize> {
        check_attr(attr, self.capacity)?;
        let counts = self.sharding.map(self.blocks.len(), |s| {
            self.blocks[s]
                .row(attr)
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum::<usize>()
        });
        Ok(counts.into_iter().sum())
    }

    fn logical_bytes(&self) -> usize {
        self.blocks.iter().map(|b| b.bits.len() * 8).sum()
    }
}
