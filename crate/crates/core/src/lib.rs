//! Property graph storage on the Double-Index layout.
//!
//! The [`di`] module holds the sorted edge arrays and vertex offsets;
//! [`attr`] provides three interchangeable attribute presence stores; and
//! [`prop_graph`] ties them together with symbol tables and property columns.
//! Bulk work is split across entity-range shards ([`par`]) that run on a
//! rayon pool when the `parallel` feature is enabled.

pub mod attr;
pub mod bench;
pub mod di;
pub mod dictionary;
pub mod error;
pub mod gen;
pub mod ingest;
pub mod oracle;
pub mod par;
pub mod prop_graph;

pub use attr::{AnyStore, AttrId, AttributeStore, Backend, DipArr, DipList, DipListD, EntityKind, EntityMask};
pub use di::{DegreeStats, DiGraphIndex, VertexIndex, VertexName};
pub use dictionary::{SymbolId, SymbolTable};
pub use error::{Error, Result};
pub use par::Sharding;
pub use prop_graph::{PropGraph, PropGraphConfig, PropertyColumn, Scalar};
