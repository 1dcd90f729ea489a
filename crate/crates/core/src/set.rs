//! Dense bitmap over the vertices of one cube.

use std::fmt;

use serde::ser::SerializeSeq;
use serde::Serialize;

use crate::cube::{Automorphism, CubeShape, Pattern, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    shape: CubeShape,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(shape: CubeShape) -> Self {
        VertexSet {
            shape,
            words: vec![0; shape.len().div_ceil(64)],
        }
    }

    pub fn full(shape: CubeShape) -> Self {
        let mut s = Self::empty(shape);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        s
    }

    pub fn from_vertices<I: IntoIterator<Item = VertexId>>(
        shape: CubeShape,
        vertices: I,
    ) -> Result<Self> {
        let mut s = Self::empty(shape);
        for v in vertices {
            if v.index() >= shape.len() {
                return Err(Error::VertexOutOfRange {
                    code: v.0 as u64,
                    len: shape.len(),
                });
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub fn from_pattern(p: &Pattern) -> Self {
        let mut s = Self::empty(p.shape());
        for v in p.members() {
            s.insert(v);
        }
        s
    }

    /// Parses digit strings in the shape's vertex format.
    pub fn parse<'a, I: IntoIterator<Item = &'a str>>(shape: CubeShape, words: I) -> Result<Self> {
        let mut s = Self::empty(shape);
        for w in words {
            s.insert(shape.parse_vertex(w)?);
        }
        Ok(s)
    }

    /// Builds a set from a `u64` mask over codes `0..64`.
    pub fn from_mask(shape: CubeShape, mask: u64) -> Self {
        debug_assert!(shape.len() <= 64);
        let mut s = Self::empty(shape);
        s.words[0] = mask;
        s.clear_tail();
        s
    }

    #[inline]
    pub fn shape(&self) -> CubeShape {
        self.shape
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        let i = v.index();
        i < self.shape.len() && self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Returns true if `v` was not present.
    #[inline]
    pub fn insert(&mut self, v: VertexId) -> bool {
        let i = v.index();
        let bit = 1u64 << (i & 63);
        let was = self.words[i >> 6] & bit != 0;
        self.words[i >> 6] |= bit;
        !was
    }

    #[inline]
    pub fn remove(&mut self, v: VertexId) -> bool {
        let i = v.index();
        let bit = 1u64 << (i & 63);
        let was = self.words[i >> 6] & bit != 0;
        self.words[i >> 6] &= !bit;
        was
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.shape.len()
    }

    /// Ascending vertex codes.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some(VertexId((wi as u32) * 64 + b))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        debug_assert_eq!(self.shape, other.shape);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        VertexSet {
            shape: self.shape,
            words,
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        debug_assert_eq!(self.shape, other.shape);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & !b)
            .collect();
        VertexSet {
            shape: self.shape,
            words,
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Image under a cube automorphism.
    pub fn map(&self, a: &Automorphism) -> VertexSet {
        let mut out = VertexSet::empty(self.shape);
        for v in self.iter() {
            out.insert(a.apply(v));
        }
        out
    }

    /// Digit strings in ascending code order.
    pub fn words(&self) -> Vec<String> {
        self.iter().map(|v| self.shape.format_vertex(v)).collect()
    }

    fn clear_tail(&mut self) {
        let len = self.shape.len();
        if !len.is_multiple_of(64) {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.words()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for v in self.iter() {
            seq.serialize_element(&self.shape.format_vertex(v))?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_tail_bits() {
        let s = CubeShape::new(4, 3).unwrap();
        let f = VertexSet::full(s);
        assert_eq!(f.len(), 81);
        assert!(f.is_full());
        assert_eq!(f.iter().count(), 81);
        assert_eq!(f.iter().last(), Some(VertexId(80)));
    }

    #[test]
    fn set_algebra() {
        let s = CubeShape::new(2, 3).unwrap();
        let a = VertexSet::parse(s, ["00", "01"]).unwrap();
        let b = VertexSet::parse(s, ["01", "22"]).unwrap();
        assert_eq!(a.union(&b).words(), ["00", "01", "22"]);
        assert_eq!(a.intersection(&b).words(), ["01"]);
        assert_eq!(a.difference(&b).words(), ["00"]);
        assert!(!a.is_disjoint(&b));
        assert!(a.intersection(&b).is_subset(&a));
        assert!(VertexSet::from_vertices(s, [VertexId(9)]).is_err());
    }

    #[test]
    fn serializes_as_words() {
        let s = CubeShape::new(2, 3).unwrap();
        let a = VertexSet::parse(s, ["11", "00"]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"["00","11"]"#);
    }
}
