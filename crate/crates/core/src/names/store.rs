//! Interned Boolean-valued names over one algebra.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::bits::Bits;
use crate::boolalg::BoolAlgebra;

use super::{HfSet, NameError};

/// Index of a name inside its [`NameStore`].
pub type NameId = u32;

/// The empty name; every store interns it first.
pub const EMPTY_NAME: NameId = 0;

/// Hash-consed names over one algebra.
///
/// A name is a set of `(sub-name, algebra element)` entries. Entries with
/// value zero are dropped and repeated sub-names are merged by joining their
/// values, so every name has one canonical entry list, sorted by sub-name id.
#[derive(Debug, Clone)]
pub struct NameStore {
    algebra_id: u64,
    algebra_len: usize,
    entries: Vec<Box<[(NameId, u32)]>>,
    rank: Vec<u32>,
    index: HashMap<Box<[(NameId, u32)]>, NameId>,
}

impl NameStore {
    pub fn new(algebra: &BoolAlgebra) -> NameStore {
        let mut s = NameStore {
            algebra_id: algebra.base().id(),
            algebra_len: algebra.len(),
            entries: Vec::new(),
            rank: Vec::new(),
            index: HashMap::new(),
        };
        let empty = s.intern(std::iter::empty()).expect("empty name");
        debug_assert_eq!(empty, EMPTY_NAME);
        s
    }

    /// Id of the base poset of the algebra the values come from.
    pub fn algebra_id(&self) -> u64 {
        self.algebra_id
    }

    pub fn check_algebra(&self, algebra: &BoolAlgebra) -> Result<(), NameError> {
        if algebra.base().id() == self.algebra_id {
            Ok(())
        } else {
            Err(NameError::MixedAlgebra)
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Canonicalizes and interns a name from arbitrary entries.
    pub fn intern(
        &mut self,
        entries: impl IntoIterator<Item = (NameId, usize)>,
    ) -> Result<NameId, NameError> {
        let mut merged: Vec<(NameId, u32)> = Vec::new();
        for (t, c) in entries {
            if c >= self.algebra_len {
                return Err(NameError::CutOutOfRange {
                    index: c,
                    len: self.algebra_len,
                });
            }
            if t as usize >= self.entries.len() {
                return Err(NameError::UnknownName(t));
            }
            if c != 0 {
                merged.push((t, c as u32));
            }
        }
        merged.sort_unstable();
        let mut canon: Vec<(NameId, u32)> = Vec::with_capacity(merged.len());
        for (t, c) in merged {
            match canon.last_mut() {
                Some(last) if last.0 == t => last.1 |= c,
                _ => canon.push((t, c)),
            }
        }
        let key: Box<[(NameId, u32)]> = canon.into_boxed_slice();
        if let Some(&id) = self.index.get(&key) {
            return Ok(id);
        }
        let id = self.entries.len() as NameId;
        let rank = key
            .iter()
            .map(|&(t, _)| self.rank[t as usize] + 1)
            .max()
            .unwrap_or(0);
        self.entries.push(key.clone());
        self.rank.push(rank);
        self.index.insert(key, id);
        Ok(id)
    }

    /// Looks a canonical entry list up without interning.
    pub fn find(&self, entries: &[(NameId, u32)]) -> Option<NameId> {
        self.index.get(entries).copied()
    }

    pub fn entries(&self, x: NameId) -> &[(NameId, u32)] {
        &self.entries[x as usize]
    }

    pub fn rank(&self, x: NameId) -> usize {
        self.rank[x as usize] as usize
    }

    /// The value `y(t)`: zero when `t` is not in the domain of `y`.
    pub fn value_at(&self, y: NameId, t: NameId) -> usize {
        let e = self.entries(y);
        match e.binary_search_by_key(&t, |&(s, _)| s) {
            Ok(i) => e[i].1 as usize,
            Err(_) => 0,
        }
    }

    /// The canonical name `x̌ = { (y̌, 1) : y in x }`.
    pub fn check_name(&mut self, x: &HfSet) -> NameId {
        let one = self.algebra_len - 1;
        let subs: Vec<NameId> = x.elems().iter().map(|y| self.check_name(y)).collect();
        self.intern(subs.into_iter().map(|t| (t, one)))
            .expect("check names use valid entries")
    }

    /// Every name reachable from `roots` through entries, roots included,
    /// sub-names before the names that contain them.
    pub fn closure(&self, roots: &[NameId]) -> Vec<NameId> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        fn go(s: &NameStore, x: NameId, seen: &mut [bool], out: &mut Vec<NameId>) {
            if seen[x as usize] {
                return;
            }
            seen[x as usize] = true;
            for &(t, _) in s.entries(x) {
                go(s, t, seen, out);
            }
            out.push(x);
        }
        for &r in roots {
            go(self, r, &mut seen, &mut out);
        }
        out
    }

    /// Literal form `{(sub, cut), ...}` with cuts as algebra indices.
    pub fn literal(&self, x: NameId) -> String {
        let mut s = String::new();
        self.write_literal(x, &mut s);
        s
    }

    fn write_literal(&self, x: NameId, out: &mut String) {
        out.push('{');
        for (i, &(t, c)) in self.entries(x).iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push('(');
            self.write_literal(t, out);
            let _ = write!(out, ", {c})");
        }
        out.push('}');
    }

    /// Parses the literal form produced by [`NameStore::literal`].
    pub fn parse_literal(&mut self, text: &str) -> Result<NameId, NameError> {
        let bytes = text.as_bytes();
        let mut pos = 0;
        let id = self.parse_at(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(literal_error(pos, "trailing input"));
        }
        Ok(id)
    }

    fn parse_at(&mut self, b: &[u8], pos: &mut usize) -> Result<NameId, NameError> {
        expect(b, pos, b'{')?;
        let mut entries = Vec::new();
        skip_ws(b, pos);
        if b.get(*pos) == Some(&b'}') {
            *pos += 1;
            return self.intern(entries);
        }
        loop {
            expect(b, pos, b'(')?;
            let t = self.parse_at(b, pos)?;
            expect(b, pos, b',')?;
            skip_ws(b, pos);
            let start = *pos;
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let c: usize = std::str::from_utf8(&b[start..*pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| literal_error(start, "expected a cut index"))?;
            expect(b, pos, b')')?;
            entries.push((t, c));
            skip_ws(b, pos);
            match b.get(*pos) {
                Some(b',') => *pos += 1,
                Some(b'}') => {
                    *pos += 1;
                    return self.intern(entries);
                }
                _ => return Err(literal_error(*pos, "expected `,` or `}`")),
            }
        }
    }
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn expect(b: &[u8], pos: &mut usize, c: u8) -> Result<(), NameError> {
    skip_ws(b, pos);
    if b.get(*pos) == Some(&c) {
        *pos += 1;
        Ok(())
    } else {
        Err(literal_error(*pos, &format!("expected `{}`", c as char)))
    }
}

fn literal_error(offset: usize, message: &str) -> NameError {
    NameError::Literal(format!("offset {offset}: {message}"))
}

/// Evaluates names under a filter: `i_G(y) = { i_G(x) : y(x) meets G }`.
pub struct Evaluator<'a> {
    algebra: &'a BoolAlgebra,
    store: &'a NameStore,
    filter: Bits,
    meets: HashMap<u32, bool>,
    memo: HashMap<NameId, HfSet>,
}

impl<'a> Evaluator<'a> {
    /// `filter` is a set of elements of the algebra's base poset.
    pub fn new(algebra: &'a BoolAlgebra, store: &'a NameStore, filter: Bits) -> Evaluator<'a> {
        Evaluator {
            algebra,
            store,
            filter,
            meets: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    /// True when the cut of algebra element `c` meets the filter.
    pub fn meets(&mut self, c: u32) -> bool {
        let (alg, filter) = (self.algebra, self.filter);
        *self
            .meets
            .entry(c)
            .or_insert_with(|| alg.cut_members(c as usize).intersects(&filter))
    }

    pub fn eval(&mut self, y: NameId) -> HfSet {
        if let Some(v) = self.memo.get(&y) {
            return v.clone();
        }
        let store = self.store;
        let mut elems = Vec::new();
        for &(x, c) in store.entries(y) {
            if self.meets(c) {
                elems.push(self.eval(x));
            }
        }
        let v = HfSet::from_elems(elems);
        self.memo.insert(y, v.clone());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolalg::{ro_algebra, AlgebraLimits};
    use crate::poset::Poset;

    fn setup() -> (BoolAlgebra, NameStore) {
        let alg = ro_algebra(&Poset::antichain(2), AlgebraLimits::default()).unwrap();
        let store = NameStore::new(&alg);
        (alg, store)
    }

    #[test]
    fn canonicalization_drops_zero_and_merges() {
        let (_, mut s) = setup();
        let a = s.intern([(EMPTY_NAME, 0)]).unwrap();
        assert_eq!(a, EMPTY_NAME);
        let b = s.intern([(EMPTY_NAME, 1), (EMPTY_NAME, 2)]).unwrap();
        let c = s.intern([(EMPTY_NAME, 3)]).unwrap();
        assert_eq!(b, c);
        assert_eq!(s.rank(c), 1);
        assert!(s.intern([(EMPTY_NAME, 4)]).is_err());
    }

    #[test]
    fn check_names() {
        let (_, mut s) = setup();
        assert_eq!(s.check_name(&HfSet::empty()), EMPTY_NAME);
        let one = s.check_name(&HfSet::numeral(1));
        assert_eq!(s.entries(one), &[(EMPTY_NAME, 3)]);
        let two = s.check_name(&HfSet::numeral(2));
        assert_eq!(s.rank(two), 2);
    }

    #[test]
    fn literal_roundtrip() {
        let (_, mut s) = setup();
        let y = s.intern([(EMPTY_NAME, 1)]).unwrap();
        let z = s.intern([(EMPTY_NAME, 2), (y, 3)]).unwrap();
        let text = s.literal(z);
        assert_eq!(text, "{({}, 2), ({({}, 1)}, 3)}");
        assert_eq!(s.parse_literal(&text).unwrap(), z);
        assert!(matches!(
            s.parse_literal("{({}, )}"),
            Err(NameError::Literal(_))
        ));
    }

    #[test]
    fn evaluation_under_atom_filters() {
        let (alg, mut s) = setup();
        let p = alg.base();
        // y = {(empty, U_a)}
        let y = s.intern([(EMPTY_NAME, alg.principal(0))]).unwrap();
        let ga = *p.up(0);
        let gb = *p.up(1);
        assert_eq!(Evaluator::new(&alg, &s, ga).eval(y), HfSet::numeral(1));
        assert_eq!(Evaluator::new(&alg, &s, gb).eval(y), HfSet::empty());
        assert_eq!(
            Evaluator::new(&alg, &s, gb).eval(EMPTY_NAME),
            HfSet::empty()
        );
        let x = HfSet::numeral(3);
        let xc = s.check_name(&x);
        for g in [ga, gb] {
            assert_eq!(Evaluator::new(&alg, &s, g).eval(xc), x);
        }
    }
}
