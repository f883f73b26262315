//! A toy collapse iteration driven by a finite list of formulas.
//!
//! Stage `k` forces with a product of collapses. Component 0 collapses
//! `V_rank` (the hereditarily finite sets of rank below `rank_k`) onto
//! `m_k`. Component `i` collapses the unique `X` in `V_rank` satisfying
//! formula `i` in `(V_rank, in)`, or is trivial when no unique witness
//! exists. A formula may mention `$j` for `j < k`: it denotes the range of
//! the stage-`j` component-0 generic injection, so witnesses can depend on
//! the generic chosen earlier.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::formula::Formula;
use crate::names::{hf_universe, HfSet};
use crate::poset::Poset;

use super::{
    collapse_count, collapse_poset, CollapseParams, CollapsePoset, IterationError, StepProvider,
    NO_STEP,
};

/// Largest supported rank; `V_4` has 16 elements.
const MAX_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentKind {
    /// The collapse of the whole rank-initial segment.
    Universe,
    /// The collapse of the unique witness of a formula.
    Witness(HfSet),
    /// No unique witness, or a parameter not yet defined.
    Trivial,
}

#[derive(Debug, Clone)]
pub struct CifsComponent {
    pub kind: ComponentKind,
    pub m: usize,
    /// `None` for a trivial component (a one-point poset).
    pub collapse: Option<Arc<CollapsePoset>>,
}

/// The step forced at one stage under one generic.
#[derive(Debug)]
pub struct CifsStep {
    pub stage: usize,
    pub components: Vec<CifsComponent>,
    pub poset: Arc<Poset>,
    /// Component coordinates of every element of `poset`.
    pub tuples: Vec<Vec<usize>>,
}

struct Inner {
    formulas: Vec<(Formula, String)>,
    ladder: Vec<(usize, usize)>,
    cache: Mutex<HashMap<(usize, Vec<usize>), Arc<CifsStep>>>,
}

#[derive(Clone)]
pub struct CifsProvider {
    inner: Arc<Inner>,
    provider: StepProvider,
}

impl std::fmt::Debug for CifsProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CifsProvider")
            .field("provider", &self.provider)
            .finish()
    }
}

/// Validates the formulas and ladder and returns the provider.
pub fn cifs_toy_iteration(
    formulas: &[Formula],
    ladder: &[(usize, usize)],
) -> Result<CifsProvider, IterationError> {
    let mut checked = Vec::with_capacity(formulas.len());
    for f in formulas {
        let free = f.free_vars();
        if free.len() != 1 {
            return Err(IterationError::FormulaArity(f.to_string()));
        }
        checked.push((f.clone(), free.into_iter().next().unwrap()));
    }
    if ladder.windows(2).any(|w| w[0].1 >= w[1].1) || ladder.iter().any(|&(_, m)| m == 0) {
        return Err(IterationError::LadderNotIncreasing);
    }
    for (k, &(rank, m)) in ladder.iter().enumerate() {
        let too_large = IterationError::StageTooLarge {
            stage: k,
            cap: crate::bits::MAX_ELEMENTS,
        };
        if rank > MAX_RANK {
            return Err(too_large);
        }
        let v = hf_universe(rank).len();
        let below = if rank == 0 {
            0
        } else {
            hf_universe(rank - 1).len()
        };
        let worst = (0..formulas.len()).try_fold(collapse_count(v, m), |acc, _| {
            acc.checked_mul(collapse_count(below, m))
        });
        if worst.is_none_or(|w| w > crate::bits::MAX_ELEMENTS as u128) {
            return Err(too_large);
        }
    }
    let inner = Arc::new(Inner {
        formulas: checked,
        ladder: ladder.to_vec(),
        cache: Mutex::new(HashMap::new()),
    });
    let rule_inner = inner.clone();
    let description = format!(
        "cifs[{}; {:?}]",
        formulas
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(" | "),
        ladder
    );
    let provider = StepProvider::new(ladder.len(), description, move |k, path| {
        Some(rule_inner.step(k, path).poset.clone())
    });
    Ok(CifsProvider { inner, provider })
}

impl CifsProvider {
    pub fn provider(&self) -> &StepProvider {
        &self.provider
    }

    pub fn ladder(&self) -> &[(usize, usize)] {
        &self.inner.ladder
    }

    /// The components forced at `stage` under the generic with this path.
    pub fn step_info(&self, stage: usize, path: &[usize]) -> Arc<CifsStep> {
        self.inner.step(stage, path)
    }

    /// Where this model departs from the full construction.
    pub fn notes(&self) -> Vec<String> {
        vec![
            "witnesses are sought in (V_rank, in) rather than a constructible hull".into(),
            "the regularity side condition on the collapse target is treated as true".into(),
            "stage 0 collapses onto m_0 like every later stage".into(),
        ]
    }
}

impl Inner {
    fn step(&self, stage: usize, path: &[usize]) -> Arc<CifsStep> {
        let key = (stage, path[..stage.min(path.len())].to_vec());
        if let Some(s) = self.cache.lock().unwrap().get(&key) {
            return s.clone();
        }
        let built = Arc::new(self.compute(stage, &key.1));
        self.cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(built)
            .clone()
    }

    /// The range of the stage-`j` universe collapse under the generic.
    fn range(&self, j: usize, path: &[usize]) -> Option<HfSet> {
        let atom = *path.get(j)?;
        if atom == NO_STEP {
            return None;
        }
        let info = self.step(j, &path[..j]);
        let comp = info.components[0].collapse.as_ref()?;
        let e = info.tuples[atom][0];
        Some(HfSet::from_elems(
            comp.maps[e]
                .iter()
                .map(|&(_, v)| HfSet::numeral(v))
                .collect(),
        ))
    }

    fn compute(&self, stage: usize, path: &[usize]) -> CifsStep {
        let (rank, m) = self.ladder[stage];
        let domain = hf_universe(rank);
        let collapse = |x: Vec<HfSet>| {
            Arc::new(collapse_poset(&CollapseParams { x, m }).expect("sizes checked up front"))
        };
        let mut components = vec![CifsComponent {
            kind: ComponentKind::Universe,
            m,
            collapse: Some(collapse(domain.clone())),
        }];
        for (f, var) in &self.formulas {
            let needed = f.max_constant().map_or(0, |c| c + 1);
            let constants: Option<Vec<HfSet>> = (0..needed)
                .map(|j| (j < stage).then(|| self.range(j, path)).flatten())
                .collect();
            let witnesses: Vec<&HfSet> = match &constants {
                Some(cs) => domain
                    .iter()
                    .filter(|x| {
                        let mut env = vec![(var.clone(), (*x).clone())];
                        f.holds_in(&domain, cs, &mut env).unwrap_or(false)
                    })
                    .collect(),
                None => Vec::new(),
            };
            components.push(match witnesses.as_slice() {
                [x] => CifsComponent {
                    kind: ComponentKind::Witness((*x).clone()),
                    m,
                    collapse: Some(collapse(x.elems().to_vec())),
                },
                _ => CifsComponent {
                    kind: ComponentKind::Trivial,
                    m,
                    collapse: None,
                },
            });
        }
        let point = Poset::point();
        let factors: Vec<&Poset> = components
            .iter()
            .map(|c| c.collapse.as_ref().map_or(&point, |col| &col.poset))
            .collect();
        let (poset, tuples) = Poset::product(&factors).expect("sizes checked up front");
        CifsStep {
            stage,
            components,
            poset: Arc::new(poset),
            tuples,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::iteration::{build_iteration, IterationCaps};

    #[test]
    fn demo_sizes() {
        let f = parse_formula("x = x").unwrap();
        let c = cifs_toy_iteration(&[f], &[(1, 2), (2, 3)]).unwrap();
        let it = build_iteration(c.provider().clone(), IterationCaps::default()).unwrap();
        assert_eq!(it.stage(1).len(), 3);
        assert_eq!(it.stage(2).len(), 195);
        assert_eq!(it.stage(2).atoms().len(), 12);
        // Two sets at rank 2, so "x = x" has no unique witness there.
        assert_eq!(
            c.step_info(1, &[0]).components[1].kind,
            ComponentKind::Trivial
        );
    }

    #[test]
    fn empty_set_is_the_unique_witness() {
        let f = parse_formula("forall z (!(z in x))").unwrap();
        let c = cifs_toy_iteration(&[f], &[(2, 2), (2, 3)]).unwrap();
        for k in 0..2 {
            let s = c.step_info(k, &[0, 0][..k]);
            assert_eq!(s.components[1].kind, ComponentKind::Witness(HfSet::empty()));
            assert_eq!(s.components[1].collapse.as_ref().unwrap().poset.len(), 1);
        }
    }

    #[test]
    fn witnesses_can_depend_on_the_generic() {
        // x is the range of the first collapse, read as a set of numerals.
        let f = parse_formula("x = $0").unwrap();
        let c = cifs_toy_iteration(&[f], &[(2, 2), (2, 3)]).unwrap();
        let q0 = c.step_info(0, &[]);
        let atoms: Vec<usize> = q0.poset.minimal_elements().iter().collect();
        let kinds: Vec<ComponentKind> = atoms
            .iter()
            .map(|&a| c.step_info(1, &[a]).components[1].kind.clone())
            .collect();
        // Ranges {0} and {1}; only {0} lies in V_2.
        assert!(kinds.contains(&ComponentKind::Witness(HfSet::numeral(1))));
        assert!(kinds.contains(&ComponentKind::Trivial));
        assert_eq!(
            c.step_info(0, &[]).components[1].kind,
            ComponentKind::Trivial
        );
    }

    #[test]
    fn bad_inputs() {
        let two = parse_formula("x in y").unwrap();
        assert!(matches!(
            cifs_toy_iteration(&[two], &[(1, 2)]),
            Err(IterationError::FormulaArity(_))
        ));
        let f = parse_formula("x = x").unwrap();
        assert_eq!(
            cifs_toy_iteration(&[f], &[(1, 3), (2, 3)]).unwrap_err(),
            IterationError::LadderNotIncreasing
        );
    }
}
