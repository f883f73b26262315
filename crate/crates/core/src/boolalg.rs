//! The regular-open algebra of a finite poset.
//!
//! In a finite separative poset every regular cut is determined by the
//! minimal elements it contains, so the algebra is the powerset of the
//! atoms. An element of the algebra is addressed by its atom mask: bit `i`
//! stands for the `i`-th minimal element in increasing id order. Meet, join
//! and complement are then `&`, `|` and `!`. The definitional versions
//! (intersection, regularized union, incompatibility complement) are kept
//! alongside and cross-checked by [`BoolAlgebra::law_report`].

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bits::Bits;
use crate::poset::{Poset, PosetError, RegularCut};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("poset has {size} elements, above the enumeration bound {limit}")]
    PosetTooLarge { size: usize, limit: usize },
    #[error("poset has {atoms} atoms, above the bound {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("operands come from different algebras")]
    MixedAlgebra,
    #[error("cut is not regular in this algebra's poset")]
    NotAnElement,
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Enumeration bounds for [`ro_algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraLimits {
    pub max_poset: usize,
    pub max_atoms: usize,
}

impl Default for AlgebraLimits {
    fn default() -> Self {
        AlgebraLimits {
            max_poset: 12,
            max_atoms: 16,
        }
    }
}

impl AlgebraLimits {
    /// Bounds that admit every poset a [`Bits`] can hold.
    pub fn unbounded() -> Self {
        AlgebraLimits {
            max_poset: crate::bits::MAX_ELEMENTS,
            max_atoms: 20,
        }
    }
}

/// `r.o.(P)` materialized as a complete finite Boolean algebra.
#[derive(Debug, Clone)]
pub struct BoolAlgebra {
    source: u64,
    base: Arc<Poset>,
    to_base: Vec<usize>,
    was_quotiented: bool,
    atoms: Vec<usize>,
    element_mask: Vec<u32>,
}

/// Builds the regular-open algebra of `p`, quotienting first when `p` is
/// not separative.
pub fn ro_algebra(p: &Poset, limits: AlgebraLimits) -> Result<BoolAlgebra, AlgebraError> {
    if p.len() > limits.max_poset {
        return Err(AlgebraError::PosetTooLarge {
            size: p.len(),
            limit: limits.max_poset,
        });
    }
    let (base, to_base, was_quotiented) = if p.is_separative() {
        (p.clone(), (0..p.len()).collect(), false)
    } else {
        let (q, map) = p.separative_quotient();
        (q, map, true)
    };
    let atoms: Vec<usize> = base.minimal_elements().iter().collect();
    if atoms.len() > limits.max_atoms {
        return Err(AlgebraError::TooManyAtoms {
            atoms: atoms.len(),
            limit: limits.max_atoms,
        });
    }
    let element_mask = (0..base.len())
        .map(|e| {
            atoms
                .iter()
                .enumerate()
                .filter(|(_, &a)| base.leq(a, e))
                .fold(0u32, |m, (i, _)| m | 1 << i)
        })
        .collect();
    Ok(BoolAlgebra {
        source: p.id(),
        base: Arc::new(base),
        to_base,
        was_quotiented,
        atoms,
        element_mask,
    })
}

impl BoolAlgebra {
    /// Number of elements, `2^atoms`.
    pub fn len(&self) -> usize {
        1usize << self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Id of the poset the algebra was requested for.
    pub fn source_id(&self) -> u64 {
        self.source
    }

    /// The separative poset whose regular cuts are the elements.
    pub fn base(&self) -> &Poset {
        &self.base
    }

    pub fn base_arc(&self) -> Arc<Poset> {
        Arc::clone(&self.base)
    }

    /// True when the requested poset was not separative and was quotiented.
    pub fn was_quotiented(&self) -> bool {
        self.was_quotiented
    }

    /// Map from the requested poset's elements to base elements.
    pub fn to_base(&self) -> &[usize] {
        &self.to_base
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn one(&self) -> usize {
        self.len() - 1
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        a & b
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        a | b
    }

    #[inline]
    pub fn complement(&self, a: usize) -> usize {
        !a & self.one()
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        a & !b == 0
    }

    pub fn meet_all(&self, family: impl IntoIterator<Item = usize>) -> usize {
        family.into_iter().fold(self.one(), |acc, x| acc & x)
    }

    pub fn join_all(&self, family: impl IntoIterator<Item = usize>) -> usize {
        family.into_iter().fold(0, |acc, x| acc | x)
    }

    /// `U_p` for a base element `p`.
    pub fn principal_base(&self, p: usize) -> usize {
        self.element_mask[p] as usize
    }

    /// `U_p` for an element of the poset the algebra was requested for.
    pub fn principal(&self, p: usize) -> usize {
        self.principal_base(self.to_base[p])
    }

    /// The atom mask of an arbitrary base set: the atoms it contains.
    pub fn mask_of_set(&self, s: &Bits) -> usize {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, &a)| s.contains(a))
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// The cut `{ p : every atom below p is in the mask }`.
    pub fn cut_members(&self, a: usize) -> Bits {
        (0..self.base.len())
            .filter(|&p| self.element_mask[p] as usize & !a == 0)
            .collect()
    }

    pub fn cut(&self, a: usize) -> RegularCut {
        RegularCut::new_unchecked(self.base.id(), self.cut_members(a))
    }

    /// The algebra element a regular cut of the base poset denotes.
    pub fn index_of(&self, u: &RegularCut) -> Result<usize, AlgebraError> {
        if u.owner() != self.base.id() {
            return Err(AlgebraError::MixedAlgebra);
        }
        let a = self.mask_of_set(u.members());
        if self.cut_members(a) != *u.members() {
            return Err(AlgebraError::NotAnElement);
        }
        Ok(a)
    }

    /// Intersection of a family of regular cuts; the empty family gives one.
    pub fn product(&self, family: &[RegularCut]) -> Result<RegularCut, AlgebraError> {
        let idx = family
            .iter()
            .map(|u| self.index_of(u))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.cut(self.meet_all(idx)))
    }

    /// Regularized union of a family of regular cuts; the empty family gives zero.
    pub fn sum(&self, family: &[RegularCut]) -> Result<RegularCut, AlgebraError> {
        let idx = family
            .iter()
            .map(|u| self.index_of(u))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.cut(self.join_all(idx)))
    }

    /// Atoms (as base elements) whose upward closures meet the element.
    pub fn atoms_in(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.atoms
            .iter()
            .enumerate()
            .filter(move |(i, _)| a >> i & 1 == 1)
            .map(|(_, &x)| x)
    }

    /// Index of the atom `x` (a base element) in the mask order.
    pub fn atom_index(&self, x: usize) -> Option<usize> {
        self.atoms.iter().position(|&a| a == x)
    }

    /// Checks the Boolean laws on the index operations over all pairs and
    /// triples, that the definitional operations on cuts agree with them,
    /// that every cut is regular, and that `p -> U_p` is dense.
    pub fn law_report(&self) -> LawReport {
        let n = self.len();
        let mut report = LawReport::default();
        let p = &*self.base;
        let fail = |report: &mut LawReport, law: &str, args: &[usize]| {
            report.violations.push(format!("{law} {args:?}"));
        };
        for a in 0..n {
            report.checked += 1;
            let cut = self.cut_members(a);
            if !p.is_regular_set(&cut) {
                fail(&mut report, "regular", &[a]);
            }
            if self.mask_of_set(&cut) != a {
                fail(&mut report, "mask-roundtrip", &[a]);
            }
            if p.complement_set(&cut) != self.cut_members(self.complement(a)) {
                fail(&mut report, "complement-definition", &[a]);
            }
            if self.complement(self.complement(a)) != a {
                fail(&mut report, "double-complement", &[a]);
            }
            if self.meet(a, self.complement(a)) != 0
                || self.join(a, self.complement(a)) != self.one()
            {
                fail(&mut report, "complementation", &[a]);
            }
            if a != 0
                && !(0..p.len()).any(|e| {
                    let u = self.principal_base(e);
                    u != 0 && self.leq(u, a)
                })
            {
                fail(&mut report, "dense-embedding", &[a]);
            }
        }
        for a in 0..n {
            for b in 0..n {
                report.checked += 1;
                let (ca, cb) = (self.cut_members(a), self.cut_members(b));
                if ca.inter(&cb) != self.cut_members(self.meet(a, b)) {
                    fail(&mut report, "meet-definition", &[a, b]);
                }
                if p.regularize_set(&ca.union(&cb)) != self.cut_members(self.join(a, b)) {
                    fail(&mut report, "join-definition", &[a, b]);
                }
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    fail(&mut report, "commutativity", &[a, b]);
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    fail(&mut report, "absorption", &[a, b]);
                }
                let dm1 = self.complement(self.meet(a, b))
                    == self.join(self.complement(a), self.complement(b));
                let dm2 = self.complement(self.join(a, b))
                    == self.meet(self.complement(a), self.complement(b));
                if !(dm1 && dm2) {
                    fail(&mut report, "de-morgan", &[a, b]);
                }
                if self.leq(a, b) != ca.is_subset(&cb) {
                    fail(&mut report, "order-definition", &[a, b]);
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    report.checked += 1;
                    if self.meet(a, self.meet(b, c)) != self.meet(self.meet(a, b), c)
                        || self.join(a, self.join(b, c)) != self.join(self.join(a, b), c)
                    {
                        fail(&mut report, "associativity", &[a, b, c]);
                    }
                    if self.meet(a, self.join(b, c)) != self.join(self.meet(a, b), self.meet(a, c))
                        || self.join(a, self.meet(b, c))
                            != self.meet(self.join(a, b), self.join(a, c))
                    {
                        fail(&mut report, "distributivity", &[a, b, c]);
                    }
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub checked: u64,
    pub violations: Vec<String>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomLaw {
    ZeroOne,
    Complement,
    Product,
    Sum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomCounterexample {
    pub law: HomLaw,
    pub family: Vec<usize>,
    pub expected: usize,
    pub got: usize,
}

/// How many subfamilies [`check_complete_hom`] enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomCoverage {
    /// Every subfamily of the domain.
    AllFamilies,
    /// Empty family, full family and every pair. In a finite lattice these
    /// generate every product and sum by induction on family size.
    PairsAndExtremes,
    /// Every element checked against the sum of the images of its atoms,
    /// plus pairwise disjointness of atom images and their sum being one.
    /// In a finite atomic algebra this holds iff all sums and products are
    /// preserved.
    AtomDecomposition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub preserves_zero_one: bool,
    pub preserves_complement: bool,
    pub preserves_all_products: bool,
    pub preserves_all_sums: bool,
    pub coverage: HomCoverage,
    pub families_checked: u64,
    pub counterexamples: Vec<HomCounterexample>,
}

impl HomReport {
    pub fn passed(&self) -> bool {
        self.preserves_zero_one
            && self.preserves_complement
            && self.preserves_all_products
            && self.preserves_all_sums
    }
}

/// Domains up to this many elements get every subfamily enumerated.
pub const EXHAUSTIVE_FAMILY_LIMIT: usize = 16;

/// Domains up to this many elements get every pair checked; larger ones
/// are certified through their atoms.
pub const PAIRWISE_FAMILY_LIMIT: usize = 1024;

const COUNTEREXAMPLE_CAP: usize = 32;

/// Tests whether the table `h: A -> B` preserves zero, one, complements and
/// the products and sums of all subfamilies.
pub fn check_complete_hom(h: &[usize], a: &BoolAlgebra, b: &BoolAlgebra) -> HomReport {
    assert_eq!(
        h.len(),
        a.len(),
        "homomorphism table must be total on the domain"
    );
    let mut cx: Vec<HomCounterexample> = Vec::new();
    let push = |cx: &mut Vec<HomCounterexample>, c: HomCounterexample| {
        if cx.len() < COUNTEREXAMPLE_CAP {
            cx.push(c);
        }
    };
    let mut zero_one = true;
    for (x, want) in [(a.zero(), b.zero()), (a.one(), b.one())] {
        if h[x] != want {
            zero_one = false;
            push(
                &mut cx,
                HomCounterexample {
                    law: HomLaw::ZeroOne,
                    family: vec![x],
                    expected: want,
                    got: h[x],
                },
            );
        }
    }
    let mut complement = true;
    for x in 0..a.len() {
        let want = b.complement(h[x]);
        let got = h[a.complement(x)];
        if want != got {
            complement = false;
            push(
                &mut cx,
                HomCounterexample {
                    law: HomLaw::Complement,
                    family: vec![x],
                    expected: want,
                    got,
                },
            );
        }
    }
    let mut products = true;
    let mut sums = true;
    let mut checked = 0u64;
    let coverage = if a.len() <= EXHAUSTIVE_FAMILY_LIMIT {
        // Subsets of the domain as bitmasks, folded incrementally.
        let n = a.len();
        let count = 1usize << n;
        let mut dom_meet = vec![a.one(); count];
        let mut dom_join = vec![a.zero(); count];
        let mut img_meet = vec![b.one(); count];
        let mut img_join = vec![b.zero(); count];
        for f in 1..count {
            let low = f.trailing_zeros() as usize;
            let rest = f & (f - 1);
            dom_meet[f] = a.meet(dom_meet[rest], low);
            dom_join[f] = a.join(dom_join[rest], low);
            img_meet[f] = b.meet(img_meet[rest], h[low]);
            img_join[f] = b.join(img_join[rest], h[low]);
        }
        for f in 0..count {
            checked += 1;
            let family = || (0..n).filter(|i| f >> i & 1 == 1).collect::<Vec<_>>();
            if h[dom_meet[f]] != img_meet[f] {
                products = false;
                push(
                    &mut cx,
                    HomCounterexample {
                        law: HomLaw::Product,
                        family: family(),
                        expected: img_meet[f],
                        got: h[dom_meet[f]],
                    },
                );
            }
            if h[dom_join[f]] != img_join[f] {
                sums = false;
                push(
                    &mut cx,
                    HomCounterexample {
                        law: HomLaw::Sum,
                        family: family(),
                        expected: img_join[f],
                        got: h[dom_join[f]],
                    },
                );
            }
        }
        HomCoverage::AllFamilies
    } else if a.len() > PAIRWISE_FAMILY_LIMIT {
        let atoms = a.atom_count();
        let mut img_join = vec![b.zero(); a.len()];
        for x in 0..a.len() {
            checked += 1;
            if x > 0 {
                let low = x & x.wrapping_neg();
                img_join[x] = b.join(img_join[x & (x - 1)], h[low]);
            }
            if h[x] != img_join[x] {
                sums = false;
                push(
                    &mut cx,
                    HomCounterexample {
                        law: HomLaw::Sum,
                        family: (0..atoms)
                            .filter(|i| x >> i & 1 == 1)
                            .map(|i| 1 << i)
                            .collect(),
                        expected: img_join[x],
                        got: h[x],
                    },
                );
            }
        }
        for i in 0..atoms {
            for j in i + 1..atoms {
                checked += 1;
                let got = b.meet(h[1 << i], h[1 << j]);
                if got != b.zero() {
                    products = false;
                    push(
                        &mut cx,
                        HomCounterexample {
                            law: HomLaw::Product,
                            family: vec![1 << i, 1 << j],
                            expected: h[a.zero()],
                            got,
                        },
                    );
                }
            }
        }
        HomCoverage::AtomDecomposition
    } else {
        let mut check_family = |family: &[usize], cx: &mut Vec<HomCounterexample>| {
            let want = b.meet_all(family.iter().map(|&x| h[x]));
            let got = h[a.meet_all(family.iter().copied())];
            if want != got {
                products = false;
                push(
                    cx,
                    HomCounterexample {
                        law: HomLaw::Product,
                        family: family.to_vec(),
                        expected: want,
                        got,
                    },
                );
            }
            let want = b.join_all(family.iter().map(|&x| h[x]));
            let got = h[a.join_all(family.iter().copied())];
            if want != got {
                sums = false;
                push(
                    cx,
                    HomCounterexample {
                        law: HomLaw::Sum,
                        family: family.to_vec(),
                        expected: want,
                        got,
                    },
                );
            }
        };
        let all: Vec<usize> = (0..a.len()).collect();
        check_family(&[], &mut cx);
        check_family(&all, &mut cx);
        checked += 2;
        for x in 0..a.len() {
            for y in x..a.len() {
                check_family(&[x, y], &mut cx);
                checked += 1;
            }
        }
        HomCoverage::PairsAndExtremes
    };
    HomReport {
        preserves_zero_one: zero_one,
        preserves_complement: complement,
        preserves_all_products: products,
        preserves_all_sums: sums,
        coverage,
        families_checked: checked,
        counterexamples: cx,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::validate_poset;

    fn a2() -> (Poset, BoolAlgebra) {
        let p = Poset::antichain(2);
        let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
        (p, alg)
    }

    #[test]
    fn antichain_algebras_have_two_to_the_k_elements() {
        for k in 1..=4 {
            let alg = ro_algebra(&Poset::antichain(k), AlgebraLimits::default()).unwrap();
            assert_eq!(alg.len(), 1 << k);
            assert!(alg.law_report().passed());
        }
        let point = ro_algebra(&Poset::point(), AlgebraLimits::default()).unwrap();
        assert_eq!(point.len(), 2);
    }

    #[test]
    fn four_element_algebra_cuts() {
        let (p, alg) = a2();
        let members: Vec<Bits> = (0..4).map(|i| alg.cut_members(i)).collect();
        assert_eq!(members[0], Bits::empty());
        assert_eq!(members[1], Bits::singleton(0));
        assert_eq!(members[2], Bits::singleton(1));
        assert_eq!(members[3], p.all());
    }

    #[test]
    fn products_and_sums() {
        let (p, alg) = a2();
        let ua = p.regular_cut(Bits::singleton(0)).unwrap();
        let ub = p.regular_cut(Bits::singleton(1)).unwrap();
        let zero = p.regular_cut(Bits::empty()).unwrap();
        assert_eq!(alg.product(&[ua, ua]).unwrap(), ua);
        assert_eq!(alg.product(&[zero, ub]).unwrap(), zero);
        assert_eq!(alg.product(&[ua, ub]).unwrap(), zero);
        assert_eq!(*alg.product(&[]).unwrap().members(), p.all());
        assert_eq!(*alg.sum(&[ua, ub]).unwrap().members(), p.all());
        assert_eq!(alg.sum(&[ua]).unwrap(), ua);
        assert_eq!(alg.sum(&[zero]).unwrap(), zero);
        assert_eq!(alg.sum(&[]).unwrap(), zero);
    }

    #[test]
    fn mixed_operands_are_rejected() {
        let (_, alg) = a2();
        let other = Poset::antichain(2);
        let u = other.regular_cut(Bits::singleton(0)).unwrap();
        assert_eq!(alg.product(&[u]), Err(AlgebraError::MixedAlgebra));
    }

    #[test]
    fn non_separative_input_is_quotiented() {
        let p = validate_poset(&["1", "a"], &[("a", "1")], "1").unwrap();
        let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
        assert!(alg.was_quotiented());
        assert_eq!(alg.len(), 2);
        assert_eq!(alg.principal(1), alg.one());
    }

    #[test]
    fn size_bound_is_enforced() {
        let p = Poset::antichain(12);
        let err = ro_algebra(&p, AlgebraLimits::default()).unwrap_err();
        assert_eq!(
            err,
            AlgebraError::PosetTooLarge {
                size: 13,
                limit: 12
            }
        );
    }

    #[test]
    fn identity_is_a_complete_hom() {
        let (_, alg) = a2();
        let id: Vec<usize> = (0..alg.len()).collect();
        let r = check_complete_hom(&id, &alg, &alg);
        assert!(r.passed());
        assert_eq!(r.coverage, HomCoverage::AllFamilies);
        assert_eq!(r.families_checked, 16);
    }

    #[test]
    fn constant_one_fails_complement_at_zero() {
        let (_, alg) = a2();
        let h = vec![alg.one(); alg.len()];
        let r = check_complete_hom(&h, &alg, &alg);
        assert!(!r.preserves_complement);
        assert!(!r.preserves_zero_one);
        let c = r
            .counterexamples
            .iter()
            .find(|c| c.law == HomLaw::Complement)
            .unwrap();
        assert_eq!(c.family, vec![alg.zero()]);
        assert_eq!(c.expected, alg.zero());
        assert_eq!(c.got, alg.one());
    }

    #[test]
    fn pairwise_coverage_on_large_domains() {
        let alg = ro_algebra(&Poset::antichain(5), AlgebraLimits::default()).unwrap();
        let id: Vec<usize> = (0..alg.len()).collect();
        let r = check_complete_hom(&id, &alg, &alg);
        assert!(r.passed());
        assert_eq!(r.coverage, HomCoverage::PairsAndExtremes);
        // A map that breaks only a three-way join is still caught through a pair.
        let mut h = id.clone();
        h[0b111] = 0b011;
        let r = check_complete_hom(&h, &alg, &alg);
        assert!(!r.passed());
    }

    #[test]
    fn atom_certificate_on_very_large_domains() {
        let alg = ro_algebra(&Poset::antichain(11), AlgebraLimits::default()).unwrap();
        let id: Vec<usize> = (0..alg.len()).collect();
        let r = check_complete_hom(&id, &alg, &alg);
        assert!(r.passed());
        assert_eq!(r.coverage, HomCoverage::AtomDecomposition);
        // Merging two atoms keeps sums of atoms but breaks disjointness.
        let mut h = id.clone();
        for (x, v) in h.iter_mut().enumerate() {
            if x & 1 == 1 {
                *v |= 2;
            }
        }
        let r = check_complete_hom(&h, &alg, &alg);
        assert!(!r.preserves_all_products);
        let mut h = id;
        h[0b1011] = 0b0011;
        let r = check_complete_hom(&h, &alg, &alg);
        assert!(!r.preserves_all_sums);
    }
}
