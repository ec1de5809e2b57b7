//! Bidirectional string interning for attribute values.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type SymbolId = u32;

/// Maps strings to dense ids in first-seen order and back.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    forward: HashMap<String, SymbolId>,
    reverse: Vec<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    pub fn intern(&mut self, value: &str) -> SymbolId {
        if let Some(&id) = self.forward.get(value) {
            return id;
        }
        let id = SymbolId::try_from(self.reverse.len()).expect("symbol table overflow");
        self.forward.insert(value.to_owned(), id);
        self.reverse.push(value.to_owned());
        id
    }

    /// Interns every value in order. Ids are assigned sequentially so the
    /// result does not depend on thread scheduling.
    pub fn intern_bulk<S: AsRef<str>>(&mut self, values: &[S]) -> Vec<SymbolId> {
        values.iter().map(|v| self.intern(v.as_ref())).collect()
    }

    /// Looks up an id without interning.
    pub fn get(&self, value: &str) -> Option<SymbolId> {
        self.forward.get(value).copied()
    }

    pub fn resolve(&self, id: SymbolId) -> Result<&str> {
        self.reverse
            .get(id as usize)
            .map(String::as_str)
            .ok_or(Error::IdNotFound(id))
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &str)> {
        self.reverse
            .iter()
            .enumerate()
            .map(|(i, s)| (i as SymbolId, s.as_str()))
    }
}
