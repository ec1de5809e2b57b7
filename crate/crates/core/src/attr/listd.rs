//! Doubly linked attribute records.
//!
//! Every (entity, attribute) pair is an [`AttrRecord`] stored in the arena of
//! the shard that owns the entity. Records of one attribute are threaded into
//! a chain through `prev`/`next` handles that may point into other shards, and
//! the tracker keeps the most recently linked record of each chain. Queries
//! walk chains backwards from the tracker, touching only matching records.

use std::collections::BTreeSet;
use std::mem::size_of;
use std::sync::atomic::{AtomicU64, Ordering::Relaxed};
use std::sync::Mutex;

use smallvec::SmallVec;

use super::{check_attr, check_entity, check_insert, AttrId, AttributeStore, EntityKind, EntityMask};
use crate::error::Result;
use crate::par::Sharding;

const SLOT_BITS: u32 = 40;
const NIL: u64 = u64::MAX;

/// Location of a record: owning shard and slot in that shard's arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RecordHandle(u64);

impl RecordHandle {
    fn new(shard: usize, slot: usize) -> Self {
        debug_assert!(slot < 1 << SLOT_BITS);
        Self(((shard as u64) << SLOT_BITS) | slot as u64)
    }

    fn from_raw(raw: u64) -> Option<Self> {
        (raw != NIL).then_some(Self(raw))
    }

    pub fn shard(self) -> usize {
        (self.0 >> SLOT_BITS) as usize
    }

    pub fn slot(self) -> usize {
        (self.0 & ((1 << SLOT_BITS) - 1)) as usize
    }
}

#[derive(Debug)]
struct AttrRecord {
    attr: AttrId,
    entity: usize,
    prev: AtomicU64,
    next: AtomicU64,
}

#[derive(Debug, Default)]
struct ShardArena {
    records: Vec<AttrRecord>,
    /// Arena slots of each owned entity's records, indexed by local entity.
    per_entity: Vec<SmallVec<[u32; 2]>>,
}

/// Result of walking one attribute chain from its tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChainWalk {
    pub records: usize,
    /// Steps whose predecessor lives in a different shard.
    pub shard_hops: usize,
}

#[derive(Debug)]
pub struct DipListD {
    arenas: Vec<ShardArena>,
    /// Tail of each attribute chain; the lock is held while a record is linked.
    last_entity_tracker: Vec<Mutex<u64>>,
    entity_count: usize,
    kind: EntityKind,
    sharding: Sharding,
}

impl DipListD {
    pub fn new(entity_count: usize, attr_capacity: usize, kind: EntityKind, sharding: Sharding) -> Self {
        let arenas = sharding
            .ranges(entity_count)
            .into_iter()
            .map(|r| ShardArena {
                records: Vec::new(),
                per_entity: vec![SmallVec::new(); r.len()],
            })
            .collect();
        Self {
            arenas,
            last_entity_tracker: (0..attr_capacity).map(|_| Mutex::new(NIL)).collect(),
            entity_count,
            kind,
            sharding,
        }
    }

    fn record(&self, h: RecordHandle) -> &AttrRecord {
        &self.arenas[h.shard()].records[h.slot()]
    }

    fn tail(&self, attr: AttrId) -> Option<RecordHandle> {
        let raw = *self.last_entity_tracker[attr as usize]
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        RecordHandle::from_raw(raw)
    }

    /// Follows `prev` links from the tracked tail of `attr`, calling `visit`
    /// with each record's entity.
    fn walk(&self, attr: AttrId, mut visit: impl FnMut(usize)) -> ChainWalk {
        let mut walk = ChainWalk::default();
        let mut cur = self.tail(attr);
        while let Some(h) = cur {
            let rec = self.record(h);
            visit(rec.entity);
            walk.records += 1;
            cur = RecordHandle::from_raw(rec.prev.load(Relaxed));
            if cur.is_some_and(|p| p.shard() != h.shard()) {
                walk.shard_hops += 1;
            }
        }
        walk
    }

    pub fn chain_walk(&self, attr: AttrId) -> Result<ChainWalk> {
        check_attr(attr, self.last_entity_tracker.len())?;
        Ok(self.walk(attr, |_| {}))
    }

    /// Checks the chain of `attr`: the tail has no successor, links are
    /// symmetric, every record carries `attr`, and the chain covers exactly
    /// the records of `attr` held across all arenas.
    pub fn verify_chain(&self, attr: AttrId) -> Result<ChainWalk, String> {
        check_attr(attr, self.last_entity_tracker.len()).map_err(|e| e.to_string())?;
        let expected: usize = self
            .arenas
            .iter()
            .map(|a| a.records.iter().filter(|r| r.attr == attr).count())
            .sum();
        let mut walk = ChainWalk::default();
        let mut cur = self.tail(attr);
        if let Some(t) = cur {
            if self.record(t).next.load(Relaxed) != NIL {
                return Err(format!("tail of attribute {attr} has a successor"));
            }
        }
        while let Some(h) = cur {
            let rec = self.record(h);
            if rec.attr != attr {
                return Err(format!("record {h:?} in chain {attr} carries attribute {}", rec.attr));
            }
            walk.records += 1;
            if walk.records > expected {
                return Err(format!("chain {attr} is longer than its {expected} records"));
            }
            cur = RecordHandle::from_raw(rec.prev.load(Relaxed));
            if let Some(p) = cur {
                if self.record(p).next.load(Relaxed) != h.0 {
                    return Err(format!("asymmetric link between {p:?} and {h:?}"));
                }
                if p.shard() != h.shard() {
                    walk.shard_hops += 1;
                }
            }
        }
        if walk.records != expected {
            return Err(format!("chain {attr} visits {} of {expected} records", walk.records));
        }
        Ok(walk)
    }

    pub fn record_count(&self) -> usize {
        self.arenas.iter().map(|a| a.records.len()).sum()
    }
}

impl AttributeStore for DipListD {
    fn entity_count(&self) -> usize {
        self.entity_count
    }

    fn attr_capacity(&self) -> usize {
        self.last_entity_tracker.len()
    }

    fn kind(&self) -> EntityKind {
        self.kind
    }

    fn grow_attr_capacity(&mut self, capacity: usize) {
        if capacity > self.last_entity_tracker.len() {
            self.last_entity_tracker.resize_with(capacity, || Mutex::new(NIL));
        }
    }

    fn insert_bulk(&mut self, entities: &[usize], attrs: &[AttrId]) -> Result<()> {
        check_insert(entities, attrs, self.entity_count, self.last_entity_tracker.len())?;
        let buckets = self.sharding.bucket_pairs(self.entity_count, entities, attrs);
        let ranges = self.sharding.ranges(self.entity_count);

        // Allocate unlinked records in the owning arenas. Arenas only grow
        // here, so the linking pass below never sees a reallocation.
        let work: Vec<_> = self.arenas.iter_mut().zip(buckets).zip(&ranges).collect();
        let fresh: Vec<Vec<usize>> = self.sharding.map_items(work, |_, ((arena, bucket), range)| {
            let mut fresh = Vec::new();
            for (e, a) in bucket {
                let local = e - range.start;
                let present = arena.per_entity[local]
                    .iter()
                    .any(|&slot| arena.records[slot as usize].attr == a);
                if present {
                    continue;
                }
                let slot = arena.records.len();
                arena.records.push(AttrRecord {
                    attr: a,
                    entity: e,
                    prev: AtomicU64::new(NIL),
                    next: AtomicU64::new(NIL),
                });
                arena.per_entity[local].push(u32::try_from(slot).expect("shard arena overflow"));
                fresh.push(slot);
            }
            fresh
        });

        // Link each new record behind the current tail of its chain. The
        // predecessor may sit in another shard's arena.
        let this = &*self;
        this.sharding.for_each(fresh, |shard, slots| {
            for slot in slots {
                let rec = &this.arenas[shard].records[slot];
                let handle = RecordHandle::new(shard, slot);
                let mut tail = this.last_entity_tracker[rec.attr as usize]
                    .lock()
                    .unwrap_or_else(|e| e.into_inner());
                if let Some(prev) = RecordHandle::from_raw(*tail) {
                    rec.prev.store(prev.0, Relaxed);
                    this.record(prev).next.store(handle.0, Relaxed);
                }
                *tail = handle.0;
            }
        });
        Ok(())
    }

    fn query_any(&self, attrs: &[AttrId]) -> Result<EntityMask> {
        for &a in attrs {
            check_attr(a, self.last_entity_tracker.len())?;
        }
        let mut wanted = attrs.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        let words: Vec<AtomicU64> = (0..self.entity_count.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        self.sharding.for_each(wanted, |_, a| {
            self.walk(a, |e| {
                words[e / 64].fetch_or(1 << (e % 64), Relaxed);
            });
        });
        let words = words.into_iter().map(AtomicU64::into_inner).collect();
        Ok(EntityMask::from_words(words, self.entity_count, self.kind))
    }

    fn attributes_of(&self, entity: usize) -> Result<BTreeSet<AttrId>> {
        check_entity(entity, self.entity_count)?;
        let shard = self.sharding.owner(self.entity_count, entity);
        let local = entity - self.sharding.ranges(self.entity_count)[shard].start;
        let arena = &self.arenas[shard];
        Ok(arena.per_entity[local]
            .iter()
            .map(|&slot| arena.records[slot as usize].attr)
            .collect())
    }

    fn count_entities(&self, attr: AttrId) -> Result<usize> {
        Ok(self.chain_walk(attr)?.records)
    }

    fn logical_bytes(&self) -> usize {
        let arenas: usize = self
            .arenas
            .iter()
            .map(|a| {
                let spilled: usize = a
                    .per_entity
                    .iter()
                    .filter(|s| s.spilled())
                    .map(|s| s.capacity() * size_of::<u32>())
                    .sum();
                a.records.capacity() * size_of::<AttrRecord>()
                    + a.per_entity.len() * size_of::<SmallVec<[u32; 2]>>()
                    + spilled
            })
            .sum();
        arenas + self.last_entity_tracker.len() * size_of::<Mutex<u64>>()
    }
}
