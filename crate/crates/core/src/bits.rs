//! Fixed-capacity bitsets over poset element ids.

use std::fmt;

const WORDS: usize = 4;

/// Largest number of elements a [`Bits`] can index.
pub const MAX_ELEMENTS: usize = WORDS * 64;

/// A set of element ids below [`MAX_ELEMENTS`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits([u64; WORDS]);

impl Bits {
    pub const fn empty() -> Self {
        Bits([0; WORDS])
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS, "bitset capacity exceeded: {n}");
        let mut b = Bits::empty();
        for w in 0..WORDS {
            let lo = w * 64;
            if n >= lo + 64 {
                b.0[w] = u64::MAX;
            } else if n > lo {
                b.0[w] = (1u64 << (n - lo)) - 1;
            }
        }
        b
    }

    pub fn singleton(i: usize) -> Self {
        let mut b = Bits::empty();
        b.insert(i);
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0[i >> 6] &= !(1u64 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < MAX_ELEMENTS && self.0[i >> 6] & (1u64 << (i & 63)) != 0
    }

    #[inline]
    pub fn union(&self, other: &Bits) -> Bits {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] |= other.0[w];
        }
        out
    }

    #[inline]
    pub fn inter(&self, other: &Bits) -> Bits {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] &= other.0[w];
        }
        out
    }

    #[inline]
    pub fn diff(&self, other: &Bits) -> Bits {
        let mut out = *self;
        for w in 0..WORDS {
            out.0[w] &= !other.0[w];
        }
        out
    }

    #[inline]
    pub fn intersects(&self, other: &Bits) -> bool {
        (0..WORDS).any(|w| self.0[w] & other.0[w] != 0)
    }

    #[inline]
    pub fn is_subset(&self, other: &Bits) -> bool {
        (0..WORDS).all(|w| self.0[w] & !other.0[w] == 0)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> BitsIter {
        BitsIter {
            words: self.0,
            word: 0,
        }
    }
}

impl FromIterator<usize> for Bits {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut b = Bits::empty();
        for i in iter {
            b.insert(i);
        }
        b
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl serde::Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

pub struct BitsIter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for BitsIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let tz = w.trailing_zeros() as usize;
                self.words[self.word] &= w - 1;
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn full_spans_word_boundaries() {
        assert_eq!(Bits::full(0).len(), 0);
        assert_eq!(Bits::full(64).len(), 64);
        assert_eq!(Bits::full(65).len(), 65);
        assert_eq!(Bits::full(MAX_ELEMENTS).len(), MAX_ELEMENTS);
        assert!(Bits::full(130).contains(129));
        assert!(!Bits::full(130).contains(130));
    }

    proptest! {
        #[test]
        fn iter_roundtrips(xs in proptest::collection::btree_set(0usize..MAX_ELEMENTS, 0..40)) {
            let b: Bits = xs.iter().copied().collect();
            prop_assert_eq!(b.iter().collect::<Vec<_>>(), xs.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(b.len(), xs.len());
            prop_assert_eq!(b.first(), xs.iter().next().copied());
        }

        #[test]
        fn set_algebra_agrees_with_btreeset(
            xs in proptest::collection::btree_set(0usize..MAX_ELEMENTS, 0..30),
            ys in proptest::collection::btree_set(0usize..MAX_ELEMENTS, 0..30),
        ) {
            let a: Bits = xs.iter().copied().collect();
            let b: Bits = ys.iter().copied().collect();
            prop_assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), xs.union(&ys).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.inter(&b).iter().collect::<Vec<_>>(), xs.intersection(&ys).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.diff(&b).iter().collect::<Vec<_>>(), xs.difference(&ys).copied().collect::<Vec<_>>());
            prop_assert_eq!(a.is_subset(&b), xs.is_subset(&ys));
            prop_assert_eq!(a.intersects(&b), !xs.is_disjoint(&ys));
        }
    }
}
