use std::collections::BTreeSet;
use std::mem::size_of;

use super::{check_attr, check_entity, check_insert, AttrId, AttributeStore, EntityKind, EntityMask};
use crate::error::Result;
use crate::par::Sharding;

const EMPTY: AttrId = AttrId::MAX;

/// Sorted attribute-id set: the two smallest ids inline, the rest spilled.
/// Unused inline slots hold `EMPTY`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct AttrSet {
    head: [AttrId; 2],
    tail: Option<Box<[AttrId]>>,
}

impl Default for AttrSet {
    fn default() -> Self {
        Self {
            head: [EMPTY; 2],
            tail: None,
        }
    }
}

impl AttrSet {
    fn iter(&self) -> impl Iterator<Item = AttrId> + '_ {
        self.head
            .iter()
            .copied()
            .filter(|&a| a != EMPTY)
            .chain(self.tail.iter().flat_map(|t| t.iter().copied()))
    }

    fn contains(&self, attr: AttrId) -> bool {
        self.head[0] == attr || self.head[1] == attr || self.tail.as_ref().is_some_and(|t| t.contains(&attr))
    }

    fn insert(&mut self, attr: AttrId) {
        if self.contains(attr) {
            return;
        }
        if self.head[1] == EMPTY {
            self.head[1] = attr;
            if self.head[1] < self.head[0] {
                self.head.swap(0, 1);
            }
            return;
        }
        let mut all: Vec<AttrId> = self.iter().collect();
        let pos = all.partition_point(|&a| a < attr);
        all.insert(pos, attr);
        self.head = [all[0], all[1]];
        self.tail = Some(all[2..].into());
    }

    /// Whether any member is set in `wanted`. `wanted` must end with a zero
    /// word that absorbs `EMPTY` and out-of-range ids.
    #[inline]
    fn meets(&self, wanted: &[u64]) -> bool {
        let last = wanted.len() - 1;
        let test = |a: AttrId| wanted[(a as usize / 64).min(last)] >> (a % 64) & 1;
        let inline = test(self.head[0]) | test(self.head[1]);
        inline == 1 || self.tail.as_ref().is_some_and(|t| t.iter().any(|&a| test(a) == 1))
    }

    fn heap_bytes(&self) -> usize {
        self.tail.as_ref().map_or(0, |t| t.len() * size_of::<AttrId>())
    }
}

/// One sorted attribute-id set per entity.
#[derive(Debug, Clone)]
pub struct DipList {
    per_entity: Vec<AttrSet>,
    capacity: usize,
    kind: EntityKind,
    sharding: Sharding,
}

impl DipList {
    pub fn new(entity_count: usize, attr_capacity: usize, kind: EntityKind, sharding: Sharding) -> Self {
        Self {
            per_entity: vec![AttrSet::default(); entity_count],
            capacity: attr_capacity,
            kind,
            sharding,
        }
    }
}

impl AttributeStore for DipList {
    fn entity_count(&self) -> usize {
        self.per_entity.len()
    }

    fn attr_capacity(&self) -> usize {
        self.capacity
    }

    fn kind(&self) -> EntityKind {
        self.kind
    }

    fn grow_attr_capacity(&mut self, capacity: usize) {
        self.capacity = self.capacity.max(capacity);
    }

    fn insert_bulk(&mut self, entities: &[usize], attrs: &[AttrId]) -> Result<()> {
        let n = self.per_entity.len();
        check_insert(entities, attrs, n, self.capacity)?;
        let buckets = self.sharding.bucket_pairs(n, entities, attrs);
        let ranges = self.sharding.ranges(n);
        let parts = Sharding::split_mut(&ranges, &mut self.per_entity);
        let work: Vec<_> = parts.into_iter().zip(buckets).zip(&ranges).collect();
        self.sharding.for_each(work, |_, ((part, bucket), range)| {
            for (e, a) in bucket {
                part[e - range.start].insert(a);
            }
        });
        Ok(())
    }

    fn query_any(&self, attrs: &[AttrId]) -> Result<EntityMask> {
        let mut wanted = vec![0u64; self.capacity.div_ceil(64) + 1];
        for &a in attrs {
            check_attr(a, self.capacity)?;
            wanted[a as usize / 64] |= 1 << (a % 64);
        }
        let n = self.per_entity.len();
        let mut mask = EntityMask::new(n, self.kind);
        if attrs.is_empty() {
            return Ok(mask);
        }
        let ranges = self.sharding.ranges(n);
        let word_ranges: Vec<_> = ranges.iter().map(|r| r.start / 64..r.end.div_ceil(64)).collect();
        let parts = Sharding::split_mut(&word_ranges, mask.words_mut());
        let work: Vec<_> = parts.into_iter().zip(&ranges).collect();
        let wanted = &wanted;
        self.sharding.for_each(work, |_, (words, range)| {
            // shard ranges start on word boundaries
            for (w, chunk) in words.iter_mut().zip(self.per_entity[range.clone()].chunks(64)) {
                let mut bits = 0u64;
                for (i, set) in chunk.iter().enumerate() {
                    bits |= (set.meets(wanted) as u64) << i;
                }
                *w = bits;
            }
        });
        Ok(mask)
    }

    fn attributes_of(&self, entity: usize) -> Result<BTreeSet<AttrId>> {
        check_entity(entity, self.per_entity.len())?;
        Ok(self.per_entity[entity].iter().collect())
    }

    fn count_entities(&self, attr: AttrId) -> Result<usize> {
        check_attr(attr, self.capacity)?;
        let ranges = self.sharding.ranges(self.per_entity.len());
        let counts = self.sharding.map(ranges.len(), |s| {
            self.per_entity[ranges[s].clone()]
                .iter()
                .filter(|set| set.contains(attr))
                .count()
        });
        Ok(counts.into_iter().sum())
    }

    fn logical_bytes(&self) -> usize {
        let heap: usize = self.per_entity.iter().map(AttrSet::heap_bytes).sum();
        self.per_entity.len() * size_of::<AttrSet>() + heap
    }
}
