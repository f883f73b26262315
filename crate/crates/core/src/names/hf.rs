//! Hereditarily finite pure sets in canonical sorted form.

use std::fmt;
use std::sync::Arc;

/// A hereditarily finite set. Elements are kept sorted and deduplicated, so
/// structural equality is extensional equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HfSet(Arc<[HfSet]>);

impl HfSet {
    pub fn empty() -> HfSet {
        HfSet(Arc::from(Vec::new()))
    }

    pub fn from_elems(mut elems: Vec<HfSet>) -> HfSet {
        elems.sort();
        elems.dedup();
        HfSet(Arc::from(elems))
    }

    pub fn elems(&self) -> &[HfSet] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.0.iter().all(|x| other.contains(x))
    }

    /// The von Neumann numeral `n = {0, .., n-1}`.
    pub fn numeral(n: usize) -> HfSet {
        let mut acc: Vec<HfSet> = Vec::with_capacity(n);
        for _ in 0..n {
            let next = HfSet::from_elems(acc.clone());
            acc.push(next);
        }
        HfSet::from_elems(acc)
    }

    /// The `n` with `self == numeral(n)`, if any.
    pub fn as_numeral(&self) -> Option<usize> {
        let n = self.len();
        if *self == HfSet::numeral(n) {
            Some(n)
        } else {
            None
        }
    }

    /// Kuratowski pair `{{a}, {a, b}}`.
    pub fn pair(a: &HfSet, b: &HfSet) -> HfSet {
        HfSet::from_elems(vec![
            HfSet::from_elems(vec![a.clone()]),
            HfSet::from_elems(vec![a.clone(), b.clone()]),
        ])
    }

    /// Components of a Kuratowski pair.
    pub fn as_pair(&self) -> Option<(HfSet, HfSet)> {
        match self.elems() {
            [single] if single.len() == 1 => {
                let a = single.elems()[0].clone();
                Some((a.clone(), a))
            }
            [x, y] => {
                let (small, big) = if x.len() <= y.len() { (x, y) } else { (y, x) };
                if small.len() != 1 || big.len() != 2 || !big.contains(&small.elems()[0]) {
                    return None;
                }
                let a = small.elems()[0].clone();
                let b = big.elems().iter().find(|e| **e != a)?.clone();
                Some((a, b))
            }
            _ => None,
        }
    }

    /// `0` for the empty set, else one more than the largest element rank.
    pub fn rank(&self) -> usize {
        self.0.iter().map(|x| x.rank() + 1).max().unwrap_or(0)
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        let mut v = self.0.to_vec();
        v.extend(other.0.iter().cloned());
        HfSet::from_elems(v)
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `V_k`: every hereditarily finite set of rank below `k`, sorted.
///
/// Sizes run 0, 1, 2, 4, 16, 65536; `k` above 5 panics.
pub fn hf_universe(k: usize) -> Vec<HfSet> {
    assert!(k <= 5, "V_{k} is too large to list");
    let mut level: Vec<HfSet> = Vec::new();
    for _ in 0..k {
        let n = level.len();
        let mut next = Vec::with_capacity(1 << n);
        for mask in 0u64..(1u64 << n) {
            let elems = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| level[i].clone())
                .collect();
            next.push(HfSet::from_elems(elems));
        }
        next.sort();
        level = next;
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals_roundtrip() {
        for n in 0..6 {
            let x = HfSet::numeral(n);
            assert_eq!(x.len(), n);
            assert_eq!(x.rank(), n);
            assert_eq!(x.as_numeral(), Some(n));
        }
        let odd = HfSet::from_elems(vec![HfSet::numeral(1)]);
        assert_eq!(odd.as_numeral(), None);
    }

    #[test]
    fn extensional_equality() {
        let a = HfSet::from_elems(vec![HfSet::numeral(1), HfSet::empty(), HfSet::empty()]);
        let b = HfSet::from_elems(vec![HfSet::empty(), HfSet::numeral(1)]);
        assert_eq!(a, b);
        assert_eq!(a, HfSet::numeral(2));
        assert_eq!(a.to_string(), "{{},{{}}}");
    }

    #[test]
    fn pairs_decode() {
        let (a, b) = (HfSet::numeral(1), HfSet::numeral(3));
        assert_eq!(HfSet::pair(&a, &b).as_pair(), Some((a.clone(), b)));
        assert_eq!(HfSet::pair(&a, &a).as_pair(), Some((a.clone(), a)));
        assert_eq!(HfSet::numeral(3).as_pair(), None);
    }

    #[test]
    fn universe_sizes() {
        let sizes: Vec<usize> = (0..5).map(|k| hf_universe(k).len()).collect();
        assert_eq!(sizes, vec![0, 1, 2, 4, 16]);
        assert!(hf_universe(4).iter().all(|x| x.rank() < 4));
    }
}
