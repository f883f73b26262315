use std::sync::Arc;

use crate::bits::Bits;
use crate::generic::{Filter, GenericSet};
use crate::iteration::{CifsProvider, Iteration};

use super::{make_context, CheckRecord, Counterexample, ProjectionError, QuotTail, SuiteReport};

const SUITE: &str = "cifs";

/// For every stage `k` and every collapse component of `Q_k` under the
/// generic, reads the component's generic filter off the final generic and
/// takes the union of its maps. When `|X| < m` the union must be a total
/// injection `X -> m`; components with `|X| >= m` fall outside the claim
/// and are checked to leave the union partial.
pub fn verify_lemma20_analogue(
    cifs: &CifsProvider,
    iteration: &Arc<Iteration>,
    g_full: &GenericSet,
) -> Result<SuiteReport, ProjectionError> {
    let n = iteration.steps();
    let last = iteration.final_stage();
    if g_full.filter().owner() != last.poset().id() {
        return Err(ProjectionError::ForeignGeneric(n));
    }
    let instance = format!(
        "{}|Gfull={}",
        iteration.provider().description(),
        last.poset().label(g_full.atom())
    );
    let mut report = SuiteReport::new(SUITE);
    let mut total = CheckRecord::new(&instance, SUITE, "lemma20-total-injection", "exhaustive");
    let mut boundary =
        CheckRecord::new(&instance, SUITE, "lemma20-boundary-excluded", "exhaustive");
    for k in 0..n {
        let stage = iteration.stage(k);
        let atom = iteration.restrict(n, g_full.atom(), k);
        let gk = GenericSet::certify(stage.poset(), Filter::principal(stage.poset(), atom))
            .map_err(|_| ProjectionError::ForeignGeneric(k))?;
        let ctx = make_context(iteration.clone(), k, &gk)?;
        let level = ctx.level(k + 1)?;
        let info = cifs.step_info(k, stage.path(atom).expect("minimal element"));
        let q_top = info.poset.top();
        // The stage-k filter on Q_k: projections of the final generic.
        let h: Bits = g_full
            .members()
            .iter()
            .filter_map(|c| ctx.pi(k + 1, iteration.restrict(n, c, k + 1)))
            .map(|x| match level.elems()[x].tail {
                QuotTail::Value(v) => v,
                _ => q_top,
            })
            .collect();
        for (i, comp) in info.components.iter().enumerate() {
            let Some(col) = &comp.collapse else { continue };
            let union = col.union_of(h.iter().map(|v| info.tuples[v][i]));
            let size = col.x.len();
            let injective_total = union.as_ref().is_some_and(|u| {
                let mut vals: Vec<usize> = u.iter().map(|&(_, v)| v).collect();
                vals.sort();
                vals.dedup();
                u.len() == size && vals.len() == size && vals.iter().all(|&v| v < comp.m)
            });
            let inputs = || format!("stage {k}, component {i}, |X| = {size}, m = {}", comp.m);
            if size < comp.m {
                total.case(injective_total, || {
                    Counterexample::new(inputs(), "total injection", format!("{union:?}"))
                });
            } else {
                boundary.case(!injective_total, || {
                    Counterexample::new(inputs(), "partial union", format!("{union:?}"))
                });
            }
        }
    }
    report.records.push(total);
    report.records.push(boundary);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::generic::enumerate_generics;
    use crate::iteration::{build_iteration, cifs_toy_iteration, IterationCaps};

    fn run(formula: &str, ladder: &[(usize, usize)]) -> Vec<SuiteReport> {
        let c = cifs_toy_iteration(&[parse_formula(formula).unwrap()], ladder).unwrap();
        let it = Arc::new(build_iteration(c.provider().clone(), IterationCaps::default()).unwrap());
        enumerate_generics(it.final_stage().poset())
            .unwrap()
            .iter()
            .map(|g| verify_lemma20_analogue(&c, &it, g).unwrap())
            .collect()
    }

    #[test]
    fn demo_unions_are_total() {
        let reports = run("x = x", &[(1, 2), (2, 3)]);
        assert_eq!(reports.len(), 12);
        for r in &reports {
            assert!(r.passed(), "{r:#?}");
            assert!(r.record("lemma20-total-injection").unwrap().cases >= 2);
        }
    }

    #[test]
    fn boundary_components_stay_partial() {
        // |V_2| = 2 = m at stage 0.
        let reports = run("forall z (!(z in x))", &[(2, 2)]);
        for r in &reports {
            assert!(r.passed());
            assert_eq!(r.record("lemma20-boundary-excluded").unwrap().cases, 1);
        }
    }
}
