use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::bits::MAX_ELEMENTS;
use crate::poset::Poset;

use super::{Cond, Iteration, IterationError, Stage, StepProvider, Tail, NO_STEP};

/// Hard limits on iteration construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationCaps {
    pub max_stages: usize,
    pub max_stage_size: usize,
}

impl Default for IterationCaps {
    fn default() -> Self {
        IterationCaps {
            max_stages: 4,
            max_stage_size: MAX_ELEMENTS,
        }
    }
}

/// Builds every stage of the iteration the provider describes.
pub fn build_iteration(
    provider: StepProvider,
    caps: IterationCaps,
) -> Result<Iteration, IterationError> {
    let n_steps = provider.stages();
    if n_steps > caps.max_stages {
        return Err(IterationError::TooManyStages {
            stages: n_steps,
            cap: caps.max_stages,
        });
    }
    let cap = caps.max_stage_size.min(MAX_ELEMENTS);
    let mut stages = vec![initial_stage(&provider)?];
    for n in 0..n_steps {
        let next = successor_stage(&provider, &stages[n], cap)?;
        stages.push(next);
    }
    Ok(Iteration {
        provider,
        tail_names: (0..n_steps).map(|_| OnceLock::new()).collect(),
        stages,
    })
}

fn checked_step(
    provider: &StepProvider,
    stage: usize,
    path: &[usize],
) -> Result<Option<Arc<Poset>>, IterationError> {
    let q = provider.step(stage, path);
    if let Some(q) = &q {
        if !q.is_separative() {
            return Err(IterationError::NonSeparativeStep {
                stage,
                path: path.to_vec(),
            });
        }
    }
    Ok(q)
}

fn initial_stage(provider: &StepProvider) -> Result<Stage, IterationError> {
    Ok(Stage {
        index: 0,
        poset: Arc::new(Poset::point()),
        conds: Vec::new(),
        lookup: HashMap::new(),
        atoms: vec![0],
        atom_pos: vec![0],
        paths: vec![Vec::new()],
        steps: vec![checked_step(provider, 0, &[])?],
        tails: Vec::new(),
        algebra: OnceLock::new(),
    })
}

fn successor_stage(
    provider: &StepProvider,
    prev: &Stage,
    cap: usize,
) -> Result<Stage, IterationError> {
    let index = prev.index + 1;
    let too_large = IterationError::StageTooLarge { stage: index, cap };
    let n_atoms = prev.atoms.len();
    let mut conds: Vec<Cond> = Vec::new();
    let mut tails: Vec<Vec<usize>> = Vec::new();
    for p in 0..prev.len() {
        let below = prev.atoms_below(p);
        let qs: Option<Vec<&Arc<Poset>>> = below.iter().map(|&g| prev.step(g)).collect();
        let mut one = vec![NO_STEP; n_atoms];
        for &g in &below {
            if let Some(q) = prev.step(g) {
                one[prev.atom_index(g).unwrap()] = q.top();
            }
        }
        conds.push(Cond {
            prev: p,
            tail: Tail::One,
        });
        tails.push(one);
        let Some(qs) = qs else { continue };
        let count = qs
            .iter()
            .try_fold(1usize, |acc, q| acc.checked_mul(q.len()))
            .ok_or(too_large.clone())?;
        if conds.len() + count - 1 > cap {
            return Err(too_large);
        }
        let tops: Vec<usize> = qs.iter().map(|q| q.top()).collect();
        let mut digits = vec![0usize; qs.len()];
        loop {
            if digits != tops {
                let mut row = vec![NO_STEP; n_atoms];
                for (&g, &v) in below.iter().zip(&digits) {
                    row[prev.atom_index(g).unwrap()] = v;
                }
                conds.push(Cond {
                    prev: p,
                    tail: Tail::Fun(digits.clone()),
                });
                tails.push(row);
            }
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] < qs[i].len() {
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
    if conds.len() > cap {
        return Err(too_large);
    }

    let leq = |i: usize, j: usize| -> bool {
        let (ci, cj) = (&conds[i], &conds[j]);
        if !prev.poset.leq(ci.prev, cj.prev) {
            return false;
        }
        if cj.tail == Tail::One {
            return true;
        }
        prev.atoms_below(ci.prev).into_iter().all(|g| {
            let k = prev.atom_index(g).unwrap();
            let q = prev.step(g).expect("step defined below a function tail");
            q.leq(tails[i][k], tails[j][k])
        })
    };
    let labels: Vec<String> = conds
        .iter()
        .map(|c| {
            let tail = match &c.tail {
                Tail::One => "1".to_string(),
                Tail::Fun(v) => {
                    let below = prev.atoms_below(c.prev);
                    let parts: Vec<&str> = below
                        .iter()
                        .zip(v)
                        .map(|(&g, &e)| prev.step(g).unwrap().label(e))
                        .collect();
                    if parts.len() == 1 {
                        parts[0].to_string()
                    } else {
                        format!("({})", parts.join(","))
                    }
                }
            };
            format!("{}|{}", prev.poset.label(c.prev), tail)
        })
        .collect();
    let top = conds
        .iter()
        .position(|c| c.prev == prev.poset.top() && c.tail == Tail::One)
        .expect("top condition present");
    let (poset, class) = Poset::quotient_of_preorder(&labels, leq, top)?;
    assert!(
        class.iter().enumerate().all(|(i, &c)| i == c),
        "function representation must already be antisymmetric"
    );

    let atoms: Vec<usize> = poset.minimal_elements().iter().collect();
    let mut atom_pos = vec![usize::MAX; poset.len()];
    let mut paths = Vec::with_capacity(atoms.len());
    let mut steps = Vec::with_capacity(atoms.len());
    for (i, &a) in atoms.iter().enumerate() {
        atom_pos[a] = i;
        let g = conds[a].prev;
        let k = prev
            .atom_index(g)
            .expect("minimal conditions extend minimal conditions");
        let mut path = prev.paths[k].clone();
        path.push(tails[a][k]);
        steps.push(checked_step(provider, index, &path)?);
        paths.push(path);
    }
    let lookup = conds
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    Ok(Stage {
        index,
        poset: Arc::new(poset),
        conds,
        lookup,
        atoms,
        atom_pos,
        paths,
        steps,
        tails,
        algebra: OnceLock::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::check_lemma1;

    fn a2() -> Option<Poset> {
        Some(Poset::antichain(2))
    }

    #[test]
    fn point_step_gives_point() {
        let it = build_iteration(
            StepProvider::constant(vec![Some(Poset::point())]),
            IterationCaps::default(),
        )
        .unwrap();
        assert_eq!(it.final_stage().len(), 1);
    }

    #[test]
    fn antichain_stage_sizes() {
        let it = build_iteration(
            StepProvider::constant(vec![a2(), a2()]),
            IterationCaps::default(),
        )
        .unwrap();
        assert_eq!(it.stage(1).len(), 3);
        assert_eq!(it.stage(2).len(), 15);
        assert_eq!(it.stage(2).atoms().len(), 4);
        let it = build_iteration(
            StepProvider::constant(vec![a2(), a2(), a2()]),
            IterationCaps::default(),
        )
        .unwrap();
        assert_eq!(it.stage(3).len(), 255);
        assert!(check_lemma1(&it).iter().all(|s| s.separative));
    }

    #[test]
    fn undefined_step_is_identically_one() {
        let it = build_iteration(
            StepProvider::constant(vec![a2(), None]),
            IterationCaps::default(),
        )
        .unwrap();
        assert_eq!(it.stage(2).len(), 3);
        assert!(it.stage(2).conds().iter().all(|c| c.tail == Tail::One));
        let a = it.stage(2).atoms()[0];
        assert!(it.stage(2).path(a).unwrap().ends_with(&[NO_STEP]));
    }

    #[test]
    fn caps_are_enforced() {
        let err = build_iteration(
            StepProvider::constant(vec![a2(), a2(), a2()]),
            IterationCaps {
                max_stages: 4,
                max_stage_size: 64,
            },
        )
        .unwrap_err();
        assert_eq!(err, IterationError::StageTooLarge { stage: 3, cap: 64 });
        let err = build_iteration(
            StepProvider::constant(vec![a2(); 5]),
            IterationCaps::default(),
        )
        .unwrap_err();
        assert!(matches!(err, IterationError::TooManyStages { .. }));
    }

    #[test]
    fn non_separative_steps_are_rejected() {
        let chain = Poset::from_relation(vec!["0".into(), "1".into()], &[(0, 1)], 1).unwrap();
        let err = build_iteration(
            StepProvider::constant(vec![Some(chain)]),
            IterationCaps::default(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            IterationError::NonSeparativeStep { stage: 0, .. }
        ));
    }

    #[test]
    fn prefix_monotonicity() {
        let it = build_iteration(
            StepProvider::constant(vec![a2(), a2()]),
            IterationCaps::default(),
        )
        .unwrap();
        let s = it.stage(2).poset();
        for c in 0..s.len() {
            for d in 0..s.len() {
                if s.leq(c, d) {
                    assert!(it
                        .stage(1)
                        .poset()
                        .leq(it.restrict(2, c, 1), it.restrict(2, d, 1)));
                }
            }
        }
    }
}
