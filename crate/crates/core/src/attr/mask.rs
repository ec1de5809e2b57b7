use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Vertex,
    Edge,
}

/// Fixed-length boolean answer over entity indices, packed 64 per word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityMask {
    words: Vec<u64>,
    len: usize,
    kind: EntityKind,
}

impl EntityMask {
    pub fn new(len: usize, kind: EntityKind) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
            kind,
        }
    }

    pub fn full(len: usize, kind: EntityKind) -> Self {
        let mut m = Self {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
            kind,
        };
        m.clear_tail();
        m
    }

    pub fn from_bools(bits: &[bool], kind: EntityKind) -> Self {
        let mut m = Self::new(bits.len(), kind);
        for (i, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            m.set(i);
        }
        m
    }

    pub(crate) fn from_words(mut words: Vec<u64>, len: usize, kind: EntityKind) -> Self {
        words.resize(len.div_ceil(64), 0);
        let mut m = Self { words, len, kind };
        m.clear_tail();
        m
    }

    fn clear_tail(&mut self) {
        if self.len % 64 != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn kind(&self) -> EntityKind {
        self.kind
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "mask index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "mask index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Bitwise OR. Panics on length mismatch.
    pub fn or(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    /// Bitwise AND. Panics on length mismatch.
    pub fn and(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "mask length mismatch");
        Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| f(*a, *b)).collect(),
            len: self.len,
            kind: self.kind,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_round_trip() {
        let bools: Vec<bool> = (0..130).map(|i| i % 3 == 0 || i == 129).collect();
        let m = EntityMask::from_bools(&bools, EntityKind::Edge);
        assert_eq!(m.to_bools(), bools);
        assert_eq!(m.count_ones(), bools.iter().filter(|b| **b).count());
        let ones: Vec<usize> = m.iter_ones().collect();
        assert_eq!(ones, (0..130).filter(|&i| bools[i]).collect::<Vec<_>>());
    }

    #[test]
    fn full_mask_has_no_stray_bits() {
        let m = EntityMask::full(70, EntityKind::Vertex);
        assert_eq!(m.count_ones(), 70);
        assert_eq!(EntityMask::full(0, EntityKind::Vertex).count_ones(), 0);
    }

    #[test]
    fn or_and() {
        let a = EntityMask::from_bools(&[true, false, true], EntityKind::Vertex);
        let b = EntityMask::from_bools(&[false, false, true], EntityKind::Vertex);
        assert_eq!(a.or(&b).to_bools(), vec![true, false, true]);
        assert_eq!(a.and(&b).to_bools(), vec![false, false, true]);
    }
}
