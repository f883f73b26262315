//! Iteration stages against a literal construction: every pair of a
//! condition and a total choice function on all minimal elements, ordered by
//! forcing and quotiented by mutual extension.

use std::sync::Arc;

use forcinglab_core::iteration::{Tail, NO_STEP};
use forcinglab_core::names::evaluate;
use forcinglab_core::poset::find_isomorphism;
use forcinglab_core::{build_iteration, Bits, HfSet, IterationCaps, Poset, StepProvider};
use proptest::prelude::*;

struct OracleStage {
    poset: Poset,
    paths: Vec<Vec<usize>>,
}

fn oracle_stages(provider: &StepProvider) -> Vec<OracleStage> {
    let mut stages = vec![OracleStage {
        poset: Poset::point(),
        paths: vec![Vec::new()],
    }];
    for n in 0..provider.stages() {
        let prev = &stages[n];
        let atoms: Vec<usize> = prev.poset.minimal_elements().iter().collect();
        let steps: Vec<Option<Arc<Poset>>> = prev
            .paths
            .iter()
            .map(|path| provider.step(n, path))
            .collect();
        // Tail `None` is the symbol 1. A choice function is only a condition
        // when the step is defined under every generic below `p`.
        let mut raw: Vec<(usize, Option<Vec<usize>>)> = Vec::new();
        for p in 0..prev.poset.len() {
            raw.push((p, None));
            let defined = atoms
                .iter()
                .zip(&steps)
                .all(|(&a, q)| !prev.poset.leq(a, p) || q.is_some());
            if !defined {
                continue;
            }
            let mut f = vec![0; atoms.len()];
            loop {
                raw.push((p, Some(f.clone())));
                let mut i = 0;
                while i < f.len() {
                    f[i] += 1;
                    if f[i] < steps[i].as_ref().map_or(1, |q| q.len()) {
                        break;
                    }
                    f[i] = 0;
                    i += 1;
                }
                if i == f.len() {
                    break;
                }
            }
        }
        let value = |f: &Option<Vec<usize>>, k: usize| match f {
            Some(f) => f[k],
            None => steps[k].as_ref().map_or(0, |q| q.top()),
        };
        let leq = |i: usize, j: usize| {
            let ((p, f), (q, g)) = (&raw[i], &raw[j]);
            prev.poset.leq(*p, *q)
                && atoms.iter().enumerate().all(|(k, &a)| {
                    !prev.poset.leq(a, *p)
                        || steps[k]
                            .as_ref()
                            .is_none_or(|s| s.leq(value(f, k), value(g, k)))
                })
        };
        let labels: Vec<String> = (0..raw.len()).map(|i| i.to_string()).collect();
        let top = raw
            .iter()
            .position(|(p, f)| *p == prev.poset.top() && f.is_none())
            .unwrap();
        let (poset, class) = Poset::quotient_of_preorder(&labels, leq, top).unwrap();
        let mut paths = Vec::new();
        for atom in poset.minimal_elements().iter() {
            let i = class.iter().position(|&c| c == atom).unwrap();
            let (p, f) = &raw[i];
            let k = atoms.iter().position(|a| a == p).unwrap();
            let mut path = prev.paths[k].clone();
            path.push(if steps[k].is_some() {
                value(f, k)
            } else {
                NO_STEP
            });
            paths.push(path);
        }
        stages.push(OracleStage { poset, paths });
    }
    stages
}

/// A provider choosing undefined, a point, or the two-atom antichain by
/// hashing the stage and path with the seed.
fn hashed_provider(seed: u64, stages: usize) -> StepProvider {
    StepProvider::new(stages, format!("hashed[{seed}]"), move |k, path| {
        let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
        for &x in std::iter::once(&k).chain(path) {
            h = (h ^ x as u64).wrapping_mul(0x100_0000_01b3);
        }
        match (h >> 17) % 3 {
            0 => None,
            1 => Some(Arc::new(Poset::point())),
            _ => Some(Arc::new(Poset::antichain(2))),
        }
    })
}

fn compare(provider: StepProvider) {
    let oracle = oracle_stages(&provider);
    let it = build_iteration(provider, IterationCaps::default()).unwrap();
    for (n, o) in oracle.iter().enumerate() {
        let s = it.stage(n);
        assert!(
            find_isomorphism(&o.poset, s.poset()).is_some(),
            "stage {n}: oracle {} vs built {}",
            o.poset.len(),
            s.len()
        );
        let mut ours: Vec<Vec<usize>> = s
            .atoms()
            .iter()
            .map(|&a| s.path(a).unwrap().to_vec())
            .collect();
        let mut theirs = o.paths.clone();
        ours.sort();
        theirs.sort();
        assert_eq!(ours, theirs, "stage {n} generic paths");
    }
}

#[test]
fn constant_antichain_steps() {
    let a2 = Some(Poset::antichain(2));
    compare(StepProvider::constant(vec![a2.clone(), a2.clone(), a2]));
}

#[test]
fn mixed_constant_steps() {
    let a2 = Some(Poset::antichain(2));
    compare(StepProvider::constant(vec![a2.clone(), None, a2]));
    compare(StepProvider::constant(vec![
        Some(Poset::point()),
        Some(Poset::antichain(2)),
    ]));
}

#[test]
fn tail_names_evaluate_to_tail_values() {
    let a2 = Some(Poset::antichain(2));
    let it = build_iteration(
        StepProvider::constant(vec![a2.clone(), a2.clone(), a2]),
        IterationCaps::default(),
    )
    .unwrap();
    for n1 in 1..=it.steps() {
        let prev = it.stage(n1 - 1);
        let alg = prev.algebra();
        let names = it.tail_names(n1);
        for (c, cond) in it.stage(n1).conds().iter().enumerate() {
            let Tail::Fun(_) = cond.tail else {
                assert!(names.names[c].is_none());
                continue;
            };
            let y = names.names[c].unwrap();
            for g in prev.atoms_below(cond.prev) {
                let filter: Bits = prev.poset().up(g).iter().collect();
                let v = evaluate(&alg, &names.store, y, filter);
                let want = it.tail_value(n1, c, g).unwrap();
                assert_eq!(v, HfSet::numeral(want));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generic_dependent_providers_match_the_oracle(seed in any::<u64>(), stages in 1usize..=3) {
        compare(hashed_provider(seed, stages));
    }
}
