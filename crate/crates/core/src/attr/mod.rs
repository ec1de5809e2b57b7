//! Attribute presence stores: which labels a vertex carries, or which
//! relationships an edge carries.
//!
//! Three layouts answer the same contract:
//! - [`DipList`]: a small sorted id set per entity.
//! - [`DipListD`]: per-entity records threaded into one doubly linked chain
//!   per attribute, with a tracker holding each chain's tail.
//! - [`DipArr`]: a packed attributes × entities bit matrix, block-partitioned
//!   by entity range.
//!
//! Queries are disjunctive: an entity matches if it carries any requested
//! attribute, and the answer is an [`EntityMask`] over all entities.

mod arr;
mod list;
mod listd;
mod mask;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use arr::DipArr;
pub use list::DipList;
pub use listd::{ChainWalk, DipListD, RecordHandle};
pub use mask::{EntityKind, EntityMask};

use crate::dictionary::SymbolId;
use crate::error::{Error, Result};
use crate::par::Sharding;

pub type AttrId = SymbolId;

pub trait AttributeStore: Send + Sync {
    /// Number of entities (vertices or edges) the store covers.
    fn entity_count(&self) -> usize;
    /// Number of attribute ids accepted, `0..attr_capacity()`.
    fn attr_capacity(&self) -> usize;
    fn kind(&self) -> EntityKind;
    /// Raises the accepted attribute range. Never shrinks.
    fn grow_attr_capacity(&mut self, capacity: usize);
    /// Records `attrs[i]` on `entities[i]` for every `i`. Pairs already
    /// present are absorbed.
    fn insert_bulk(&mut self, entities: &[usize], attrs: &[AttrId]) -> Result<()>;
    fn query_any(&self, attrs: &[AttrId]) -> Result<EntityMask>;
    fn attributes_of(&self, entity: usize) -> Result<BTreeSet<AttrId>>;
    fn count_entities(&self, attr: AttrId) -> Result<usize>;
    /// Structure-aware estimate of the bytes held by the store.
    fn logical_bytes(&self) -> usize;
}

fn check_attr(attr: AttrId, capacity: usize) -> Result<()> {
    if (attr as usize) < capacity {
        Ok(())
    } else {
        Err(Error::AttributeOutOfRange { attr, capacity })
    }
}

fn check_entity(entity: usize, count: usize) -> Result<()> {
    if entity < count {
        Ok(())
    } else {
        Err(Error::EntityOutOfRange { entity, count })
    }
}

fn check_insert(entities: &[usize], attrs: &[AttrId], count: usize, capacity: usize) -> Result<()> {
    if entities.len() != attrs.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} entities vs {} attributes",
            entities.len(),
            attrs.len()
        )));
    }
    for &e in entities {
        check_entity(e, count)?;
    }
    for &a in attrs {
        check_attr(a, capacity)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    List,
    ListD,
    Arr,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::List, Backend::ListD, Backend::Arr];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::List => "list",
            Backend::ListD => "listd",
            Backend::Arr => "arr",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "list" | "dip-list" => Ok(Backend::List),
            "listd" | "dip-listd" => Ok(Backend::ListD),
            "arr" | "dip-arr" => Ok(Backend::Arr),
            other => Err(format!("unknown backend `{other}` (expected list, listd or arr)")),
        }
    }
}

/// A store of any backend, chosen at runtime.
#[derive(Debug)]
pub enum AnyStore {
    List(DipList),
    ListD(DipListD),
    Arr(DipArr),
}

impl AnyStore {
    pub fn new(
        backend: Backend,
        entity_count: usize,
        attr_capacity: usize,
        kind: EntityKind,
        sharding: Sharding,
    ) -> Self {
        match backend {
            Backend::List => AnyStore::List(DipList::new(entity_count, attr_capacity, kind, sharding)),
            Backend::ListD => AnyStore::ListD(DipListD::new(entity_count, attr_capacity, kind, sharding)),
            Backend::Arr => AnyStore::Arr(DipArr::new(entity_count, attr_capacity, kind, sharding)),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            AnyStore::List(_) => Backend::List,
            AnyStore::ListD(_) => Backend::ListD,
            AnyStore::Arr(_) => Backend::Arr,
        }
    }

    fn inner(&self) -> &dyn AttributeStore {
        match self {
            AnyStore::List(s) => s,
            AnyStore::ListD(s) => s,
            AnyStore::Arr(s) => s,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn AttributeStore {
        match self {
            AnyStore::List(s) => s,
            AnyStore::ListD(s) => s,
            AnyStore::Arr(s) => s,
        }
    }
}

impl AttributeStore for AnyStore {
    fn entity_count(&self) -> usize {
        self.inner().entity_count()
    }

    fn attr_capacity(&self) -> usize {
        self.inner().attr_capacity()
    }

    fn kind(&self) -> EntityKind {
        self.inner().kind()
    }

    fn grow_attr_capacity(&mut self, capacity: usize) {
        self.inner_mut().grow_attr_capacity(capacity)
    }

    fn insert_bulk(&mut self, entities: &[usize], attrs: &[AttrId]) -> Result<()> {
        self.inner_mut().insert_bulk(entities, attrs)
    }

    fn query_any(&self, attrs: &[AttrId]) -> Result<EntityMask> {
        self.inner().query_any(attrs)
    }

    fn attributes_of(&self, entity: usize) -> Result<BTreeSet<AttrId>> {
        self.inner().attributes_of(entity)
    }

    fn count_entities(&self, attr: AttrId) -> Result<usize> {
        self.inner().count_entities(attr)
    }

    fn logical_bytes(&self) -> usize {
        self.inner().logical_bytes()
    }
}
