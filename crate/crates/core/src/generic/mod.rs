//! Filters, dense sets, generic filters and the forcing relation.

mod truth;

pub use truth::{check_truth_lemma, TruthLemmaError, TruthLemmaReport};

use serde::Serialize;
use thiserror::Error;

use crate::bits::Bits;
use crate::boolalg::BoolAlgebra;
use crate::formula::Formula;
use crate::names::{NameError, NameUniverse};
use crate::poset::Poset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenericError {
    #[error("set is not upward closed")]
    NotUpwardClosed,
    #[error("members {0} and {1} have no common lower bound in the set")]
    NotDirected(usize, usize),
    #[error("filter does not contain the top element")]
    MissingTop,
    #[error("filter belongs to a different poset")]
    ForeignFilter,
    #[error("filter misses the dense set {0:?}")]
    NotGeneric(Bits),
    #[error("dense-set and minimal-element characterizations disagree")]
    CharacterizationMismatch,
}

/// Posets up to this size get generics certified against every dense set.
pub const EXHAUSTIVE_GENERIC_LIMIT: usize = 12;

/// An upward-closed, downward-directed set containing the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Filter {
    owner: u64,
    members: Bits,
}

impl Filter {
    pub fn new(p: &Poset, members: Bits) -> Result<Filter, GenericError> {
        if !members.contains(p.top()) {
            return Err(GenericError::MissingTop);
        }
        if !p.is_upward_closed(&members) {
            return Err(GenericError::NotUpwardClosed);
        }
        for a in members.iter() {
            for b in members.iter().filter(|&b| b > a) {
                if !p.down(a).inter(p.down(b)).intersects(&members) {
                    return Err(GenericError::NotDirected(a, b));
                }
            }
        }
        Ok(Filter {
            owner: p.id(),
            members,
        })
    }

    /// `{ q : x <= q }`
    pub fn principal(p: &Poset, x: usize) -> Filter {
        Filter {
            owner: p.id(),
            members: *p.up(x),
        }
    }

    pub fn members(&self) -> &Bits {
        &self.members
    }

    pub fn owner(&self) -> u64 {
        self.owner
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }
}

/// Why a filter is generic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Every dense subset paired with a member of the filter lying in it.
    DenseWitnesses(Vec<(Bits, usize)>),
    /// The filter contains this minimal element, and every dense set
    /// contains every minimal element, so the filter meets every dense set.
    MinimalElement(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericSet {
    filter: Filter,
    atom: usize,
    certificate: Certificate,
}

impl GenericSet {
    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn members(&self) -> &Bits {
        self.filter.members()
    }

    /// The minimal element generating the filter.
    pub fn atom(&self) -> usize {
        self.atom
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// Certifies an arbitrary filter as generic.
    pub fn certify(p: &Poset, filter: Filter) -> Result<GenericSet, GenericError> {
        if filter.owner != p.id() {
            return Err(GenericError::ForeignFilter);
        }
        let atoms = p.minimal_elements().inter(filter.members());
        if p.len() <= EXHAUSTIVE_GENERIC_LIMIT {
            let mut witnesses = Vec::new();
            for d in dense_subsets(p) {
                match d.inter(filter.members()).first() {
                    Some(w) => witnesses.push((d, w)),
                    None => return Err(GenericError::NotGeneric(d)),
                }
            }
            let atom = atoms
                .first()
                .ok_or(GenericError::CharacterizationMismatch)?;
            return Ok(GenericSet {
                filter,
                atom,
                certificate: Certificate::DenseWitnesses(witnesses),
            });
        }
        match atoms.first() {
            Some(atom) => Ok(GenericSet {
                filter,
                atom,
                certificate: Certificate::MinimalElement(atom),
            }),
            None => Err(GenericError::NotGeneric(p.minimal_elements())),
        }
    }
}

/// Every subset meeting every lower cone, streamed in increasing mask order.
///
/// Only posets of at most 63 elements can be streamed.
pub fn dense_subsets(p: &Poset) -> impl Iterator<Item = Bits> + '_ {
    let n = p.len();
    assert!(n < 64, "dense-set enumeration needs fewer than 64 elements");
    (0u64..(1u64 << n))
        .map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Bits>())
        .filter(move |s| p.is_dense(s))
}

/// True when the set meets every dense subset of `p`.
pub fn meets_every_dense_set(p: &Poset, s: &Bits) -> bool {
    if p.len() <= EXHAUSTIVE_GENERIC_LIMIT {
        dense_subsets(p).all(|d| d.intersects(s))
    } else {
        // The set of minimal elements is the least dense set.
        p.minimal_elements().intersects(s)
    }
}

/// All generic filters, one per minimal element, in atom order.
///
/// For small posets the filters meeting every dense set are also found by
/// brute force over all subsets and the two answers compared.
pub fn enumerate_generics(p: &Poset) -> Result<Vec<GenericSet>, GenericError> {
    let by_atoms: Vec<Filter> = p
        .minimal_elements()
        .iter()
        .map(|a| Filter::principal(p, a))
        .collect();
    if p.len() <= EXHAUSTIVE_GENERIC_LIMIT {
        let dense: Vec<Bits> = dense_subsets(p).collect();
        let mut brute: Vec<Bits> = (0u64..(1u64 << p.len()))
            .map(|mask| {
                (0..p.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .collect::<Bits>()
            })
            .filter(|s| Filter::new(p, *s).is_ok())
            .filter(|s| dense.iter().all(|d| d.intersects(s)))
            .collect();
        let mut atoms: Vec<Bits> = by_atoms.iter().map(|f| f.members).collect();
        brute.sort();
        atoms.sort();
        if brute != atoms {
            return Err(GenericError::CharacterizationMismatch);
        }
    }
    by_atoms
        .into_iter()
        .map(|f| GenericSet::certify(p, f))
        .collect()
}

/// `p ⊩ f` iff `U_p` lies below `||f||`. `p` is an element of the poset the
/// universe's algebra was built from.
pub fn forces(p: usize, f: &Formula, universe: &NameUniverse) -> Result<bool, NameError> {
    let alg = universe.algebra();
    let v = universe.truth_value(f)?;
    Ok(alg.leq(alg.principal(p), v))
}

/// For every algebra element `u`, exactly one of `u` and `-u` meets the
/// filter (given on the poset the algebra was requested for). Returns the
/// first element where this fails.
pub fn ultrafilter_violation(alg: &BoolAlgebra, filter: &Bits) -> Option<usize> {
    let base: Bits = filter.iter().map(|x| alg.to_base()[x]).collect();
    (0..alg.len()).find(|&u| {
        let a = alg.cut_members(u).intersects(&base);
        let b = alg.cut_members(alg.complement(u)).intersects(&base);
        a == b
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolalg::{ro_algebra, AlgebraLimits};
    use crate::formula::parse_formula;
    use crate::names::{Coverage, NameStore, EMPTY_NAME};
    use crate::poset::{posets_with_top, validate_poset};
    use std::sync::Arc;

    #[test]
    fn generics_of_antichains_and_point() {
        let g = enumerate_generics(&Poset::antichain(2)).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(*g[0].members(), [0usize, 2].into_iter().collect());
        assert_eq!(enumerate_generics(&Poset::point()).unwrap().len(), 1);
        assert_eq!(enumerate_generics(&Poset::antichain(3)).unwrap().len(), 3);
    }

    #[test]
    fn dense_subset_examples() {
        let p = Poset::antichain(2);
        let dense: Vec<Bits> = dense_subsets(&p).collect();
        assert!(dense.contains(&p.all()));
        assert!(dense.contains(&[0usize, 1].into_iter().collect()));
        assert!(!dense.contains(&Bits::singleton(0)));
        let point: Vec<Bits> = dense_subsets(&Poset::point()).collect();
        assert_eq!(point, vec![Bits::singleton(0)]);
    }

    #[test]
    fn filter_validation() {
        let p = Poset::antichain(2);
        assert_eq!(
            Filter::new(&p, Bits::singleton(0)),
            Err(GenericError::MissingTop)
        );
        let both: Bits = [0usize, 1, 2].into_iter().collect();
        assert_eq!(Filter::new(&p, both), Err(GenericError::NotDirected(0, 1)));
        let top = Filter::new(&p, Bits::singleton(2)).unwrap();
        assert!(matches!(
            GenericSet::certify(&p, top),
            Err(GenericError::NotGeneric(_))
        ));
    }

    #[test]
    fn characterizations_agree_on_small_posets() {
        for p in posets_with_top(6) {
            let gens = enumerate_generics(&p).unwrap();
            assert_eq!(gens.len(), p.minimal_elements().len());
        }
    }

    #[test]
    fn forcing_examples() {
        let p = Poset::antichain(2);
        let alg = Arc::new(ro_algebra(&p, AlgebraLimits::default()).unwrap());
        let mut store = NameStore::new(&alg);
        let y = store.intern([(EMPTY_NAME, alg.principal(0))]).unwrap();
        let u = NameUniverse::from_list(alg.clone(), store, &[EMPTY_NAME, y], Coverage::Supplied)
            .unwrap();
        let member = parse_formula("$0 in $1").unwrap();
        assert!(forces(0, &member, &u).unwrap());
        assert!(!forces(1, &member, &u).unwrap());
        assert!(!forces(2, &member, &u).unwrap());
        let refl = parse_formula("$1 = $1").unwrap();
        assert!(forces(2, &refl, &u).unwrap());
    }

    #[test]
    fn generics_are_ultrafilters_on_the_completion() {
        let diamond = validate_poset(
            &["1", "a", "b", "c", "d"],
            &[("c", "a"), ("d", "b"), ("a", "1"), ("b", "1")],
            "1",
        )
        .unwrap();
        for p in [diamond, Poset::antichain(3)] {
            let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
            for g in enumerate_generics(&p).unwrap() {
                assert_eq!(ultrafilter_violation(&alg, g.members()), None);
            }
        }
    }
}
