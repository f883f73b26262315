//! Finite partial orders with a maximal element.
//!
//! Elements are dense ids `0..len()`. The order, the strict down/up sets and
//! the compatibility relation are materialized as bitsets when the poset is
//! built, so every query afterwards is a handful of word operations.
//! Cuts and regular cuts are bitsets tagged with the id of the poset that
//! owns them.

mod enumerate;

pub use enumerate::{
    automorphisms, canonical_form, find_isomorphism, posets_with_top, separative_posets,
    CanonicalForm,
};

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::bits::{Bits, MAX_ELEMENTS};

static NEXT_POSET_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("a poset needs at least one element")]
    Empty,
    #[error("order relation has a cycle through `{0}` and `{1}`")]
    Cycle(String, String),
    #[error("order relation is not transitive at `{0}` <= `{1}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("order relation is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("top `{top}` does not dominate `{elem}`")]
    TopNotMaximal { top: String, elem: String },
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("{0} elements exceed the capacity of {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("element id {0} is out of range")]
    OutOfRange(usize),
    #[error("set is not downward closed")]
    NotDownwardClosed,
    #[error("cut is not regular")]
    NotRegular,
    #[error("cut belongs to a different poset")]
    ForeignCut,
}

/// A finite partial order with a maximal element.
#[derive(Debug, Clone)]
pub struct Poset {
    id: u64,
    labels: Vec<String>,
    top: usize,
    down: Vec<Bits>,
    up: Vec<Bits>,
    compat: Vec<Bits>,
}

impl PartialEq for Poset {
    /// Equal as labelled structures; the owner id is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.top == other.top && self.down == other.down
    }
}

impl Eq for Poset {}

/// Builds a poset from named elements and strict order pairs `(lower, upper)`.
///
/// The relation is closed reflexively and transitively before checking that
/// it is antisymmetric and that `top` dominates every element.
pub fn validate_poset<S: AsRef<str>>(
    elements: &[S],
    leq_pairs: &[(S, S)],
    top: &str,
) -> Result<Poset, PosetError> {
    let mut index = HashMap::new();
    let mut labels = Vec::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        let e = e.as_ref().to_string();
        if index.insert(e.clone(), i).is_some() {
            return Err(PosetError::DuplicateElement(e));
        }
        labels.push(e);
    }
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(s.to_string()))
    };
    let top = lookup(top)?;
    let pairs = leq_pairs
        .iter()
        .map(|(a, b)| Ok((lookup(a.as_ref())?, lookup(b.as_ref())?)))
        .collect::<Result<Vec<_>, PosetError>>()?;
    Poset::from_relation(labels, &pairs, top)
}

impl Poset {
    /// Reflexive-transitive closure of `pairs` (each `(a, b)` meaning `a <= b`).
    pub fn from_relation(
        labels: Vec<String>,
        pairs: &[(usize, usize)],
        top: usize,
    ) -> Result<Poset, PosetError> {
        let n = labels.len();
        check_size(n)?;
        let mut down: Vec<Bits> = (0..n).map(Bits::singleton).collect();
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(PosetError::OutOfRange(a.max(b)));
            }
            down[b].insert(a);
        }
        for k in 0..n {
            let dk = down[k];
            for d in down.iter_mut() {
                if d.contains(k) {
                    *d = d.union(&dk);
                }
            }
        }
        Poset::from_down_sets(labels, down, top)
    }

    /// Builds a poset from `down[p] = { q : q <= p }`, checking every axiom.
    pub fn from_down_sets(
        labels: Vec<String>,
        down: Vec<Bits>,
        top: usize,
    ) -> Result<Poset, PosetError> {
        let n = labels.len();
        check_size(n)?;
        if down.len() != n {
            return Err(PosetError::OutOfRange(down.len()));
        }
        if top >= n {
            return Err(PosetError::OutOfRange(top));
        }
        let all = Bits::full(n);
        for p in 0..n {
            if !down[p].contains(p) {
                return Err(PosetError::NotReflexive(labels[p].clone()));
            }
            if !down[p].is_subset(&all) {
                return Err(PosetError::OutOfRange(n));
            }
            for q in down[p].iter() {
                if q != p && down[q].contains(p) {
                    return Err(PosetError::Cycle(labels[q].clone(), labels[p].clone()));
                }
                if !down[q].is_subset(&down[p]) {
                    let r = down[q].diff(&down[p]).first().unwrap_or(q);
                    return Err(PosetError::NotTransitive(
                        labels[r].clone(),
                        labels[q].clone(),
                        labels[p].clone(),
                    ));
                }
            }
        }
        if down[top] != all {
            let elem = all.diff(&down[top]).first().unwrap_or(0);
            return Err(PosetError::TopNotMaximal {
                top: labels[top].clone(),
                elem: labels[elem].clone(),
            });
        }
        let mut up = vec![Bits::empty(); n];
        for p in 0..n {
            for q in down[p].iter() {
                up[q].insert(p);
            }
        }
        let compat = (0..n)
            .map(|p| (0..n).filter(|&q| down[p].intersects(&down[q])).collect())
            .collect();
        Ok(Poset {
            id: NEXT_POSET_ID.fetch_add(1, Ordering::Relaxed),
            labels,
            top,
            down,
            up,
            compat,
        })
    }

    /// Quotient of a preorder by `x ~ y iff x <= y and y <= x`.
    ///
    /// Returns the poset of classes and the class of every input element.
    /// Classes are numbered by first occurrence and labelled by their first
    /// member.
    pub fn quotient_of_preorder(
        labels: &[String],
        leq: impl Fn(usize, usize) -> bool,
        top: usize,
    ) -> Result<(Poset, Vec<usize>), PosetError> {
        let n = labels.len();
        if n == 0 {
            return Err(PosetError::Empty);
        }
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = i == j || leq(i, j);
            }
        }
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for i in 0..n {
            if class[i] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(i);
            for j in i..n {
                if rel[i][j] && rel[j][i] {
                    class[j] = c;
                }
            }
        }
        check_size(reps.len())?;
        let mut down = vec![Bits::empty(); reps.len()];
        for (ci, &i) in reps.iter().enumerate() {
            for (cj, &j) in reps.iter().enumerate() {
                if rel[j][i] {
                    down[ci].insert(cj);
                }
            }
        }
        let class_labels = reps.iter().map(|&i| labels[i].clone()).collect();
        let poset = Poset::from_down_sets(class_labels, down, class[top])?;
        Ok((poset, class))
    }

    /// The one-element poset.
    pub fn point() -> Poset {
        Poset::from_down_sets(vec!["1".into()], vec![Bits::singleton(0)], 0)
            .expect("one-point poset")
    }

    /// `k` pairwise incompatible atoms below a top element (ids `0..k`, top `k`).
    pub fn antichain(k: usize) -> Poset {
        let mut labels: Vec<String> = (0..k).map(|i| format!("a{i}")).collect();
        labels.push("1".into());
        let pairs: Vec<_> = (0..k).map(|i| (i, k)).collect();
        Poset::from_relation(labels, &pairs, k).expect("antichain poset")
    }

    /// Componentwise product; returns the coordinate tuple of every element.
    pub fn product(factors: &[&Poset]) -> Result<(Poset, Vec<Vec<usize>>), PosetError> {
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for f in factors {
            let mut next = Vec::with_capacity(tuples.len() * f.len());
            for t in &tuples {
                for e in 0..f.len() {
                    let mut t = t.clone();
                    t.push(e);
                    next.push(t);
                }
            }
            tuples = next;
        }
        check_size(tuples.len())?;
        let index: HashMap<&[usize], usize> = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_slice(), i))
            .collect();
        let tops: Vec<usize> = factors.iter().map(|f| f.top()).collect();
        let top = index[tops.as_slice()];
        let down = tuples
            .iter()
            .map(|t| {
                (0..tuples.len())
                    .filter(|&j| {
                        tuples[j]
                            .iter()
                            .zip(t)
                            .zip(factors)
                            .all(|((&a, &b), f)| f.leq(a, b))
                    })
                    .collect()
            })
            .collect();
        let labels = tuples
            .iter()
            .map(|t| {
                let parts: Vec<_> = t
                    .iter()
                    .zip(factors)
                    .map(|(&e, f)| f.label(e).to_string())
                    .collect();
                format!("<{}>", parts.join(","))
            })
            .collect();
        drop(index);
        Ok((Poset::from_down_sets(labels, down, top)?, tuples))
    }

    /// Process-unique identity, used to reject cuts from a different poset.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn all(&self) -> Bits {
        Bits::full(self.len())
    }

    #[inline]
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.down[q].contains(p)
    }

    /// `{ q : q <= p }`
    #[inline]
    pub fn down(&self, p: usize) -> &Bits {
        &self.down[p]
    }

    /// `{ q : p <= q }`
    #[inline]
    pub fn up(&self, p: usize) -> &Bits {
        &self.up[p]
    }

    /// `{ q : q and p have a common lower bound }`
    #[inline]
    pub fn compat(&self, p: usize) -> &Bits {
        &self.compat[p]
    }

    #[inline]
    pub fn compatible(&self, p: usize, q: usize) -> bool {
        self.compat[p].contains(q)
    }

    /// The minimal elements (atoms).
    pub fn minimal_elements(&self) -> Bits {
        (0..self.len())
            .filter(|&p| self.down[p].len() == 1)
            .collect()
    }

    pub fn atoms_below(&self, p: usize) -> Bits {
        self.down[p].inter(&self.minimal_elements())
    }

    /// Downward closure of an arbitrary set.
    pub fn down_closure(&self, s: &Bits) -> Bits {
        s.iter()
            .fold(Bits::empty(), |acc, p| acc.union(&self.down[p]))
    }

    pub fn up_closure(&self, s: &Bits) -> Bits {
        s.iter()
            .fold(Bits::empty(), |acc, p| acc.union(&self.up[p]))
    }

    pub fn is_downward_closed(&self, s: &Bits) -> bool {
        s.iter().all(|p| self.down[p].is_subset(s))
    }

    pub fn is_upward_closed(&self, s: &Bits) -> bool {
        s.iter().all(|p| self.up[p].is_subset(s))
    }

    /// A pair `(p, q)` with `p` not below `q` although every extension of `p`
    /// is compatible with `q`; `None` exactly when the poset is separative.
    pub fn separativity_violation(&self) -> Option<(usize, usize)> {
        (0..self.len())
            .flat_map(|p| (0..self.len()).map(move |q| (p, q)))
            .find(|&(p, q)| !self.leq(p, q) && self.down[p].is_subset(&self.compat[q]))
    }

    pub fn is_separative(&self) -> bool {
        self.separativity_violation().is_none()
    }

    /// Quotient by `x ~ y iff x and y are compatible with the same elements`,
    /// ordered by "every extension of x is compatible with y".
    pub fn separative_quotient(&self) -> (Poset, Vec<usize>) {
        Poset::quotient_of_preorder(
            &self.labels,
            |x, y| self.down[x].is_subset(&self.compat[y]),
            self.top,
        )
        .expect("separative quotient of a valid poset is a poset")
    }

    /// True iff every `q <= p` has an extension `r <= q` in `s`.
    pub fn is_dense_below(&self, s: &Bits, p: usize) -> Result<bool, PosetError> {
        if p >= self.len() {
            return Err(PosetError::OutOfRange(p));
        }
        Ok(self.down[p].iter().all(|q| self.down[q].intersects(s)))
    }

    pub fn is_dense(&self, s: &Bits) -> bool {
        (0..self.len()).all(|q| self.down[q].intersects(s))
    }

    /// `-s = { p : p is incompatible with every member of s }`.
    pub fn complement_set(&self, s: &Bits) -> Bits {
        (0..self.len())
            .filter(|&p| !self.compat[p].intersects(s))
            .collect()
    }

    /// `-(-s)`: the smallest regular cut containing `s`.
    pub fn regularize_set(&self, s: &Bits) -> Bits {
        self.complement_set(&self.complement_set(s))
    }

    pub fn is_regular_set(&self, s: &Bits) -> bool {
        self.is_downward_closed(s) && self.regularize_set(s) == *s
    }

    pub fn cut(&self, members: Bits) -> Result<Cut, PosetError> {
        if !members.is_subset(&self.all()) {
            return Err(PosetError::OutOfRange(members.iter().last().unwrap_or(0)));
        }
        if !self.is_downward_closed(&members) {
            return Err(PosetError::NotDownwardClosed);
        }
        Ok(Cut {
            owner: self.id,
            members,
        })
    }

    pub fn regular_cut(&self, members: Bits) -> Result<RegularCut, PosetError> {
        let cut = self.cut(members)?;
        if self.regularize_set(&cut.members) != cut.members {
            return Err(PosetError::NotRegular);
        }
        Ok(RegularCut {
            owner: self.id,
            members,
        })
    }

    /// `U_p = { q : q <= p }`
    pub fn principal_cut(&self, p: usize) -> Cut {
        Cut {
            owner: self.id,
            members: self.down[p],
        }
    }

    pub fn complement_cut(&self, u: &Cut) -> Result<RegularCut, PosetError> {
        self.owns(u.owner)?;
        Ok(RegularCut {
            owner: self.id,
            members: self.complement_set(&u.members),
        })
    }

    pub fn regularize(&self, u: &Cut) -> Result<RegularCut, PosetError> {
        self.owns(u.owner)?;
        Ok(RegularCut {
            owner: self.id,
            members: self.regularize_set(&u.members),
        })
    }

    fn owns(&self, owner: u64) -> Result<(), PosetError> {
        if owner == self.id {
            Ok(())
        } else {
            Err(PosetError::ForeignCut)
        }
    }
}

fn check_size(n: usize) -> Result<(), PosetError> {
    if n == 0 {
        Err(PosetError::Empty)
    } else if n > MAX_ELEMENTS {
        Err(PosetError::TooLarge(n))
    } else {
        Ok(())
    }
}

/// A downward-closed subset of a poset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cut {
    owner: u64,
    members: Bits,
}

impl Cut {
    pub fn members(&self) -> &Bits {
        &self.members
    }

    pub fn owner(&self) -> u64 {
        self.owner
    }
}

/// A cut fixed by double complementation; an element of the regular-open algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegularCut {
    owner: u64,
    members: Bits,
}

impl RegularCut {
    pub(crate) fn new_unchecked(owner: u64, members: Bits) -> Self {
        RegularCut { owner, members }
    }

    pub fn members(&self) -> &Bits {
        &self.members
    }

    pub fn owner(&self) -> u64 {
        self.owner
    }

    pub fn as_cut(&self) -> Cut {
        Cut {
            owner: self.owner,
            members: self.members,
        }
    }
}
