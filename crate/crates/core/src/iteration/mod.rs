//! Finite definable iterations.
//!
//! Stage `0` is the one-point forcing. A condition at stage `n+1` is a pair
//! `(p, tail)` with `p` a stage-`n` condition. The tail is either the symbol
//! `1` or a function sending every minimal element `g` below `p` to an
//! element of the step poset `Q_n` chosen under the generic generated by
//! `g`. Such functions are exactly the classes of names forced into `Q_n`
//! below `p` modulo being forced equal, so this representation is the
//! quotient by mutual extension. A function that is the top everywhere is
//! stored as `1`.

mod build;
mod canonical;
mod cifs;
mod collapse;
mod provider;

pub use build::{build_iteration, IterationCaps};
pub use canonical::{canonicalize_condition, CanonicalCondition, RawCoord};
pub use cifs::{cifs_toy_iteration, CifsComponent, CifsProvider, CifsStep};
pub use collapse::{collapse_count, collapse_poset, CollapseParams, CollapsePoset};
pub use provider::{StepProvider, StepRule, NO_STEP};

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::bits::Bits;
use crate::boolalg::{ro_algebra, AlgebraError, AlgebraLimits, BoolAlgebra};
use crate::names::{HfSet, NameError, NameId, NameStore};
use crate::poset::{Poset, PosetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IterationError {
    #[error("{stages} stages exceed the cap {cap}")]
    TooManyStages { stages: usize, cap: usize },
    #[error("stage {stage} would exceed {cap} conditions")]
    StageTooLarge { stage: usize, cap: usize },
    #[error("step poset at stage {stage} under generic path {path:?} is not separative")]
    NonSeparativeStep { stage: usize, path: Vec<usize> },
    #[error("condition has {len} coordinates but the iteration has {stages} stages")]
    ConditionTooLong { len: usize, stages: usize },
    #[error("coordinate {coord}: {reason}")]
    BadCoordinate { coord: usize, reason: String },
    #[error("stage {stage} has no condition {id}")]
    NoSuchCondition { stage: usize, id: usize },
    #[error("{0} is not below the restriction of the condition")]
    PrefixNotBelow(usize),
    #[error("collapse bound m must be at least 1")]
    InvalidCollapse,
    #[error("formula `{0}` must have exactly one free variable")]
    FormulaArity(String),
    #[error("ladder cardinals must increase strictly")]
    LadderNotIncreasing,
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Name(#[from] NameError),
}

/// The tail coordinate of a successor-stage condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tail {
    One,
    /// Step-poset element ids, one per minimal element below the prefix,
    /// in increasing id order.
    Fun(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cond {
    pub prev: usize,
    pub tail: Tail,
}

/// One stage `P_n` of a built iteration.
#[derive(Debug)]
pub struct Stage {
    index: usize,
    poset: Arc<Poset>,
    conds: Vec<Cond>,
    lookup: HashMap<Cond, usize>,
    atoms: Vec<usize>,
    atom_pos: Vec<usize>,
    paths: Vec<Vec<usize>>,
    steps: Vec<Option<Arc<Poset>>>,
    /// Per condition, the tail value under each previous-stage atom (in
    /// atom order), or `NO_STEP` where the atom is not below the prefix or
    /// the step is undefined. Empty at stage 0.
    tails: Vec<Vec<usize>>,
    algebra: OnceLock<Arc<BoolAlgebra>>,
}

impl Stage {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    /// The `(prefix, tail)` pair of a condition; empty at stage 0.
    pub fn cond(&self, id: usize) -> Option<&Cond> {
        self.conds.get(id)
    }

    pub fn conds(&self) -> &[Cond] {
        &self.conds
    }

    pub fn find(&self, c: &Cond) -> Option<usize> {
        self.lookup.get(c).copied()
    }

    /// Minimal elements in increasing id order.
    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    /// Position of a minimal element in [`Stage::atoms`].
    pub fn atom_index(&self, atom: usize) -> Option<usize> {
        self.atom_pos
            .get(atom)
            .copied()
            .filter(|&i| i != usize::MAX)
    }

    /// The step choices made by the generic generated by `atom`.
    pub fn path(&self, atom: usize) -> Option<&[usize]> {
        self.atom_index(atom).map(|i| self.paths[i].as_slice())
    }

    /// `Q_n` under the generic generated by `atom`, if defined.
    pub fn step(&self, atom: usize) -> Option<&Arc<Poset>> {
        self.atom_index(atom).and_then(|i| self.steps[i].as_ref())
    }

    /// Minimal elements below `p`, in increasing id order.
    pub fn atoms_below(&self, p: usize) -> Vec<usize> {
        let below = self.poset.down(p);
        self.atoms
            .iter()
            .copied()
            .filter(|&a| below.contains(a))
            .collect()
    }

    /// The regular-open algebra of the stage poset, built on first use.
    pub fn algebra(&self) -> Arc<BoolAlgebra> {
        self.algebra
            .get_or_init(|| {
                Arc::new(
                    ro_algebra(&self.poset, AlgebraLimits::unbounded())
                        .expect("stage posets fit the algebra bounds"),
                )
            })
            .clone()
    }
}

/// A built iteration: stages `P_0 .. P_N`.
#[derive(Debug)]
pub struct Iteration {
    provider: StepProvider,
    stages: Vec<Stage>,
    tail_names: Vec<OnceLock<TailNames>>,
}

/// The literal names of the tail coordinates of stage `n+1`, interned over
/// the algebra of stage `n`.
#[derive(Debug)]
pub struct TailNames {
    pub store: NameStore,
    /// Indexed by stage-`n+1` condition; `None` for tail `1`.
    pub names: Vec<Option<NameId>>,
}

impl Iteration {
    pub fn provider(&self) -> &StepProvider {
        &self.provider
    }

    /// Number of steps `N`; stages run `0..=N`.
    pub fn steps(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, n: usize) -> &Stage {
        &self.stages[n]
    }

    pub fn final_stage(&self) -> &Stage {
        self.stages.last().expect("stage 0 always exists")
    }

    /// `c` restricted to its first `m` coordinates.
    pub fn restrict(&self, n: usize, mut c: usize, m: usize) -> usize {
        assert!(m <= n, "cannot restrict stage {n} to stage {m}");
        for k in (m + 1..=n).rev() {
            c = self.stages[k].conds[c].prev;
        }
        c
    }

    /// The element of `Q_n(g)` named by the tail of the stage-`n+1`
    /// condition `c` under the generic generated by the stage-`n` atom `g`.
    /// `None` when `g` is not below the prefix or `Q_n(g)` is undefined.
    pub fn tail_value(&self, n1: usize, c: usize, g: usize) -> Option<usize> {
        let i = self.stages[n1 - 1].atom_index(g)?;
        let v = self.stages[n1].tails[c][i];
        (v != NO_STEP).then_some(v)
    }

    /// The stage-`n` condition with its first `m` coordinates replaced by the
    /// stronger stage-`m` condition `r`, tails restricted to the generics
    /// below `r`.
    pub fn with_prefix(
        &self,
        n: usize,
        c: usize,
        m: usize,
        r: usize,
    ) -> Result<usize, IterationError> {
        if !self.stages[m].poset.leq(r, self.restrict(n, c, m)) {
            return Err(IterationError::PrefixNotBelow(r));
        }
        if n == m {
            return Ok(r);
        }
        let cond = &self.stages[n].conds[c];
        let p = self.with_prefix(n - 1, cond.prev, m, r)?;
        let prev = &self.stages[n - 1];
        let tail = match &cond.tail {
            Tail::One => Tail::One,
            Tail::Fun(_) => {
                let vals: Vec<usize> = prev
                    .atoms_below(p)
                    .iter()
                    .map(|&g| self.tail_value(n, c, g).expect("tail defined below prefix"))
                    .collect();
                normalize_tail(prev, &prev.atoms_below(p), vals)
            }
        };
        self.stages[n]
            .find(&Cond { prev: p, tail })
            .ok_or(IterationError::NoSuchCondition { stage: n, id: c })
    }

    /// The names `{ (ǰ, b_j) : j < |Q| }` of the tail coordinates of stage
    /// `n1`, where `b_j` collects the generics below the prefix whose chosen
    /// element has index above `j`. Under the generic of `g` such a name
    /// evaluates to the von Neumann numeral of the element index.
    pub fn tail_names(&self, n1: usize) -> &TailNames {
        assert!(n1 >= 1, "stage 0 has no tails");
        self.tail_names[n1 - 1].get_or_init(|| {
            let prev = &self.stages[n1 - 1];
            let alg = prev.algebra();
            let mut store = NameStore::new(&alg);
            let max_q = prev
                .steps
                .iter()
                .flatten()
                .map(|q| q.len())
                .max()
                .unwrap_or(0);
            let numerals: Vec<NameId> = (0..max_q)
                .map(|j| store.check_name(&HfSet::numeral(j)))
                .collect();
            let names = self.stages[n1]
                .conds
                .iter()
                .enumerate()
                .map(|(c, cond)| match cond.tail {
                    Tail::One => None,
                    Tail::Fun(_) => {
                        let atoms = prev.atoms_below(cond.prev);
                        let entries: Vec<(NameId, usize)> = numerals
                            .iter()
                            .enumerate()
                            .map(|(j, &num)| {
                                let gens: Bits = atoms
                                    .iter()
                                    .copied()
                                    .filter(|&g| self.tail_value(n1, c, g).unwrap() > j)
                                    .collect();
                                (num, alg.mask_of_set(&gens))
                            })
                            .collect();
                        Some(store.intern(entries).expect("tail name entries are valid"))
                    }
                })
                .collect();
            TailNames { store, names }
        })
    }
}

/// Stores a tail function as `1` when it picks the top everywhere.
pub(crate) fn normalize_tail(prev: &Stage, atoms: &[usize], vals: Vec<usize>) -> Tail {
    let all_top = atoms
        .iter()
        .zip(&vals)
        .all(|(&g, &v)| prev.step(g).is_some_and(|q| q.top() == v));
    if all_top {
        Tail::One
    } else {
        Tail::Fun(vals)
    }
}

/// Per-stage separativity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageSeparativity {
    pub stage: usize,
    pub size: usize,
    pub separative: bool,
    /// `(p, q)` with `p` not below `q` yet every extension of `p` compatible with `q`.
    pub witness: Option<(usize, usize)>,
}

pub fn check_lemma1(iteration: &Iteration) -> Vec<StageSeparativity> {
    let posets: Vec<&Poset> = iteration.stages().iter().map(|s| &**s.poset()).collect();
    check_separativity(&posets)
}

/// The separativity check on arbitrary posets, so that a corrupted stage
/// can be fed through the same code path.
pub fn check_separativity(posets: &[&Poset]) -> Vec<StageSeparativity> {
    posets
        .iter()
        .enumerate()
        .map(|(stage, p)| {
            let witness = p.separativity_violation();
            StageSeparativity {
                stage,
                size: p.len(),
                separative: witness.is_none(),
                witness,
            }
        })
        .collect()
}
