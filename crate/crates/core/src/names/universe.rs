//! Finite universes of names: the ranges of bounded quantifiers.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolalg::BoolAlgebra;
use crate::formula::Formula;

use super::{NameError, NameId, NameStore, TruthSession, EMPTY_NAME};

/// How a universe relates to the set of all names of its rank bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Coverage {
    /// Every canonical name of rank at most the bound.
    Exhaustive,
    /// Every name of lower rank plus a seeded sample at the bound.
    Sampled { drawn: usize, seed: u64 },
    /// An explicitly supplied list.
    Supplied,
}

/// A list of names over one algebra, closed under sub-names.
#[derive(Debug, Clone)]
pub struct NameUniverse {
    algebra: Arc<BoolAlgebra>,
    store: NameStore,
    list: Vec<NameId>,
    rank_bound: usize,
    coverage: Coverage,
}

/// `s_0 = 1`, `s_(k+1) = |A|^(s_k)`; `None` on overflow.
pub fn universe_size(algebra_len: usize, rank: usize) -> Option<u128> {
    let mut s: u128 = 1;
    for _ in 0..rank {
        let exp = u32::try_from(s).ok()?;
        s = (algebra_len as u128).checked_pow(exp)?;
    }
    Some(s)
}

/// Every canonical name of rank at most `rank`, lower ranks first.
///
/// A canonical name of rank at most `k+1` is exactly a function from the
/// names of rank at most `k` to the algebra, so the count is a tower of
/// exponentials in `|A|`.
pub fn name_universe(
    algebra: Arc<BoolAlgebra>,
    rank: usize,
    cap: usize,
) -> Result<NameUniverse, NameError> {
    let size = universe_size(algebra.len(), rank);
    if size.is_none_or(|s| s > cap as u128) {
        return Err(NameError::UniverseTooLarge {
            rank,
            size: size
                .map(|s| s.to_string())
                .unwrap_or_else(|| "overflow".into()),
            cap,
        });
    }
    let mut store = NameStore::new(&algebra);
    let list = enumerate_ranks(&algebra, &mut store, rank)?;
    Ok(NameUniverse {
        algebra,
        store,
        list,
        rank_bound: rank,
        coverage: Coverage::Exhaustive,
    })
}

fn enumerate_ranks(
    algebra: &BoolAlgebra,
    store: &mut NameStore,
    rank: usize,
) -> Result<Vec<NameId>, NameError> {
    let mut list = vec![EMPTY_NAME];
    for _ in 0..rank {
        let prev = list.clone();
        let mut seen: HashSet<NameId> = list.iter().copied().collect();
        let base = algebra.len();
        let mut digits = vec![0usize; prev.len()];
        loop {
            let id = store.intern(prev.iter().copied().zip(digits.iter().copied()))?;
            if seen.insert(id) {
                list.push(id);
            }
            // Mixed-radix increment, least significant digit first.
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < base {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    Ok(list)
}

/// All names of rank below `rank` plus `draws` random names of rank at most
/// `rank`, for algebras where the full universe is out of reach.
pub fn sampled_universe(
    algebra: Arc<BoolAlgebra>,
    rank: usize,
    draws: usize,
    seed: u64,
    cap: usize,
) -> Result<NameUniverse, NameError> {
    if rank == 0 {
        return name_universe(algebra, 0, cap);
    }
    let lower = universe_size(algebra.len(), rank - 1);
    if lower.is_none_or(|s| s > cap as u128) {
        return Err(NameError::UniverseTooLarge {
            rank: rank - 1,
            size: lower
                .map(|s| s.to_string())
                .unwrap_or_else(|| "overflow".into()),
            cap,
        });
    }
    let mut store = NameStore::new(&algebra);
    let mut list = enumerate_ranks(&algebra, &mut store, rank - 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw_level(&algebra, &mut store, &mut list, draws, &mut rng)?;
    Ok(NameUniverse {
        algebra,
        store,
        list,
        rank_bound: rank,
        coverage: Coverage::Sampled { drawn: draws, seed },
    })
}

/// Exhaustive when the full universe fits under `cap`; otherwise the
/// highest rank that fits is enumerated and every rank above it gets
/// `draws` random names built from the names already present.
pub fn bounded_universe(
    algebra: Arc<BoolAlgebra>,
    rank: usize,
    cap: usize,
    draws: usize,
    seed: u64,
) -> Result<NameUniverse, NameError> {
    let fits = |r: usize| universe_size(algebra.len(), r).is_some_and(|s| s <= cap as u128);
    if fits(rank) {
        return name_universe(algebra, rank, cap);
    }
    let full = (0..rank).rev().find(|&r| fits(r)).unwrap_or(0);
    let mut store = NameStore::new(&algebra);
    let mut list = enumerate_ranks(&algebra, &mut store, full)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in full..rank {
        draw_level(&algebra, &mut store, &mut list, draws, &mut rng)?;
    }
    Ok(NameUniverse {
        algebra,
        store,
        list,
        rank_bound: rank,
        coverage: Coverage::Sampled { drawn: draws, seed },
    })
}

/// Appends `draws` random names whose entries come from the current list.
///
/// Each draw picks a number of entries uniformly, then that many distinct
/// sub-names with uniformly random nonzero values, so sparse and dense
/// names are both represented.
fn draw_level(
    algebra: &BoolAlgebra,
    store: &mut NameStore,
    list: &mut Vec<NameId>,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), NameError> {
    let prev = list.clone();
    let mut seen: HashSet<NameId> = list.iter().copied().collect();
    for _ in 0..draws {
        let k = rng.gen_range(0..=prev.len());
        let mut pool = prev.clone();
        let mut entries = Vec::with_capacity(k);
        for _ in 0..k {
            let t = pool.swap_remove(rng.gen_range(0..pool.len()));
            let c = rng.gen_range(1..algebra.len().max(2));
            entries.push((t, c.min(algebra.len() - 1)));
        }
        let id = store.intern(entries)?;
        if seen.insert(id) {
            list.push(id);
        }
    }
    Ok(())
}

impl NameUniverse {
    /// Wraps an explicit list; it is extended to be closed under sub-names.
    pub fn from_list(
        algebra: Arc<BoolAlgebra>,
        store: NameStore,
        list: &[NameId],
        coverage: Coverage,
    ) -> Result<NameUniverse, NameError> {
        store.check_algebra(&algebra)?;
        let mut full: Vec<NameId> = Vec::with_capacity(list.len());
        let mut seen = HashSet::new();
        for &x in list {
            if seen.insert(x) {
                full.push(x);
            }
        }
        for x in store.closure(list) {
            if seen.insert(x) {
                full.push(x);
            }
        }
        let rank_bound = full.iter().map(|&x| store.rank(x)).max().unwrap_or(0);
        Ok(NameUniverse {
            algebra,
            store,
            list: full,
            rank_bound,
            coverage,
        })
    }

    pub fn algebra(&self) -> &Arc<BoolAlgebra> {
        &self.algebra
    }

    pub fn store(&self) -> &NameStore {
        &self.store
    }

    pub fn list(&self) -> &[NameId] {
        &self.list
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn rank_bound(&self) -> usize {
        self.rank_bound
    }

    pub fn coverage(&self) -> &Coverage {
        &self.coverage
    }

    pub fn session(&self) -> TruthSession<'_> {
        TruthSession::new(&self.algebra, &self.store).expect("universe store matches its algebra")
    }

    /// `||f||` with constants and quantifiers read in this universe.
    pub fn truth_value(&self, f: &Formula) -> Result<usize, NameError> {
        self.session().value(f, &self.list, &self.list)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolalg::{ro_algebra, AlgebraLimits};
    use crate::poset::Poset;

    fn alg(k: usize) -> Arc<BoolAlgebra> {
        let p = if k == 0 {
            Poset::point()
        } else {
            Poset::antichain(k)
        };
        Arc::new(ro_algebra(&p, AlgebraLimits::default()).unwrap())
    }

    #[test]
    fn sizes_match_the_tower() {
        assert_eq!(name_universe(alg(2), 0, 10).unwrap().len(), 1);
        assert_eq!(name_universe(alg(0), 1, 10).unwrap().len(), 2);
        assert_eq!(name_universe(alg(2), 1, 10).unwrap().len(), 4);
        assert_eq!(name_universe(alg(0), 2, 10).unwrap().len(), 4);
        assert_eq!(name_universe(alg(2), 2, 1000).unwrap().len(), 256);
        assert_eq!(universe_size(8, 2), Some(16_777_216));
        assert_eq!(universe_size(16, 3), None);
    }

    #[test]
    fn cap_is_enforced() {
        let err = name_universe(alg(3), 2, 1000).unwrap_err();
        assert!(matches!(err, NameError::UniverseTooLarge { rank: 2, .. }));
    }

    #[test]
    fn universes_are_closed_under_subnames() {
        let u = name_universe(alg(2), 2, 1000).unwrap();
        let set: HashSet<_> = u.list().iter().copied().collect();
        for &x in u.list() {
            for &(t, _) in u.store().entries(x) {
                assert!(set.contains(&t));
            }
        }
        assert_eq!(*u.coverage(), Coverage::Exhaustive);
    }

    #[test]
    fn bounded_universes_fall_back_to_sampling() {
        let u = bounded_universe(alg(2), 2, 1000, 10, 1).unwrap();
        assert_eq!(*u.coverage(), Coverage::Exhaustive);
        let big = alg(4);
        let u = bounded_universe(big.clone(), 2, 1000, 30, 1).unwrap();
        assert!(matches!(u.coverage(), Coverage::Sampled { .. }));
        assert!(u.len() > 17 && u.len() <= 1 + 16 + 30);
        let v = bounded_universe(big, 2, 4, 30, 1).unwrap();
        assert!(v.len() <= 1 + 30 + 30);
    }

    #[test]
    fn sampling_is_seeded() {
        let a = sampled_universe(alg(3), 2, 50, 7, 1000).unwrap();
        let b = sampled_universe(alg(3), 2, 50, 7, 1000).unwrap();
        assert_eq!(a.list(), b.list());
        assert!(a.len() > 8);
        let lits = |u: &NameUniverse| -> Vec<String> {
            u.list().iter().map(|&x| u.store().literal(x)).collect()
        };
        assert_eq!(lits(&a), lits(&b));
        let c = sampled_universe(alg(3), 2, 50, 8, 1000).unwrap();
        assert_ne!(lits(&a), lits(&c));
    }
}
