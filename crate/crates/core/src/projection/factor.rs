use std::sync::Arc;

use crate::bits::Bits;
use crate::boolalg::BoolAlgebra;
use crate::generic::{meets_every_dense_set, Filter, GenericSet};
use crate::iteration::Iteration;
use crate::names::{evaluate, hf_universe, NameStore};

use super::theorem2::coverage_label;
use super::{
    make_context, CheckRecord, Counterexample, ProjectionError, SuiteReport, UniverseOptions,
};

const SUITE: &str = "theorem16";

/// A generic on the final stage split into its restriction to `P_alpha` and
/// its image in the final quotient.
#[derive(Debug)]
pub struct Factorization {
    pub g: GenericSet,
    /// `None` when `alpha` is the final stage.
    pub h: Option<Filter>,
    pub report: SuiteReport,
}

fn base_filter(alg: &BoolAlgebra, members: &Bits) -> Bits {
    members.iter().map(|p| alg.to_base()[p]).collect()
}

/// Restricts `g_full` to `P_alpha`, projects it to `P_(alpha N)`, and
/// checks the restriction is generic, the projection is a filter meeting
/// every dense set, and evaluation factors through `pi''` for every name in
/// the universe and every check name of rank below 2.
pub fn factor_generic(
    iteration: Arc<Iteration>,
    alpha: usize,
    g_full: &GenericSet,
    opts: &UniverseOptions,
) -> Result<Factorization, ProjectionError> {
    let n = iteration.steps();
    let last = iteration.final_stage();
    if g_full.filter().owner() != last.poset().id() {
        return Err(ProjectionError::ForeignGeneric(n));
    }
    if alpha > n {
        return Err(ProjectionError::AlphaOutOfRange { alpha, last: n });
    }
    let pa = iteration.stage(alpha).poset().clone();
    let restricted: Bits = g_full
        .members()
        .iter()
        .map(|c| iteration.restrict(n, c, alpha))
        .collect();
    let instance = format!(
        "{}|alpha={alpha}|Gfull={}",
        iteration.provider().description(),
        last.poset().label(g_full.atom())
    );
    let mut report = SuiteReport::new(SUITE);
    let mut rec = CheckRecord::new(&instance, SUITE, "item1-restriction-generic", "certified");
    rec.cases = 1;
    let g = match Filter::new(&pa, restricted).and_then(|f| GenericSet::certify(&pa, f)) {
        Ok(g) => g,
        Err(e) => {
            rec.fail(Counterexample::new(
                format!("{restricted:?}"),
                "generic filter",
                e.to_string(),
            ));
            report.records.push(rec);
            return Err(ProjectionError::ForeignGeneric(alpha));
        }
    };
    report.records.push(rec);

    let src = last.algebra();
    let universe = opts.build(src.clone())?;
    let g_base = base_filter(&src, g_full.members());

    let mut check_store = NameStore::new(&src);
    let sets = hf_universe(2);
    let checks: Vec<_> = sets.iter().map(|x| check_store.check_name(x)).collect();

    if alpha == n {
        let mut rec = CheckRecord::new(&instance, SUITE, "item3-evaluation", "identity");
        for &x in universe.list() {
            let v = evaluate(&src, universe.store(), x, g_base);
            rec.case(v == evaluate(&src, universe.store(), x, g_base), || {
                Counterexample::new(universe.store().literal(x), v.to_string(), "differs")
            });
        }
        report
            .records
            .push(rec.with_note("final stage: the quotient is trivial"));
        return Ok(Factorization { g, h: None, report });
    }

    let ctx = make_context(iteration.clone(), alpha, &g)?;
    let level = ctx.level(n)?;
    let q = level.poset();
    let h_members: Bits = g_full
        .members()
        .iter()
        .filter_map(|c| ctx.pi(n, c))
        .collect();
    let mut rec = CheckRecord::new(&instance, SUITE, "item2-image-generic", "exhaustive");
    rec.cases = 1;
    let h = match Filter::new(q, h_members) {
        Ok(h) => {
            if !meets_every_dense_set(q, h.members()) {
                rec.fail(Counterexample::new(
                    format!("{h_members:?}"),
                    "meets every dense set",
                    "misses one",
                ));
            }
            Some(h)
        }
        Err(e) => {
            rec.fail(Counterexample::new(
                format!("{h_members:?}"),
                "filter",
                e.to_string(),
            ));
            None
        }
    };
    report.records.push(rec);

    let dst = level.algebra();
    let h_base = base_filter(&dst, &h_members);
    let mut rec = CheckRecord::new(
        &instance,
        SUITE,
        "item3-evaluation",
        &coverage_label(&universe),
    );
    let mut tr = ctx.transport(n, universe.store(), None)?;
    for &x in universe.list() {
        let y = tr.map(x);
        let lhs = evaluate(&src, universe.store(), x, g_base);
        let rhs = evaluate(&dst, tr.store(), y, h_base);
        rec.case(lhs == rhs, || {
            Counterexample::new(
                universe.store().literal(x),
                lhs.to_string(),
                rhs.to_string(),
            )
        });
    }
    report.records.push(rec);

    let mut rec = CheckRecord::new(&instance, SUITE, "item3-check-names", "rank<2");
    let mut tr = ctx.transport(n, &check_store, None)?;
    for (x, &c) in sets.iter().zip(&checks) {
        let y = tr.map(c);
        let lhs = evaluate(&src, &check_store, c, g_base);
        let rhs = evaluate(&dst, tr.store(), y, h_base);
        rec.case(lhs == *x && rhs == *x, || {
            Counterexample::new(x.to_string(), x.to_string(), format!("{lhs} / {rhs}"))
        });
    }
    report.records.push(rec);
    Ok(Factorization { g, h, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::enumerate_generics;
    use crate::iteration::{build_iteration, IterationCaps, StepProvider};
    use crate::poset::Poset;

    fn it() -> Arc<Iteration> {
        let a2 = Some(Poset::antichain(2));
        Arc::new(
            build_iteration(
                StepProvider::constant(vec![a2.clone(), a2]),
                IterationCaps::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn every_generic_factors() {
        let it = it();
        let opts = UniverseOptions::default();
        for gf in enumerate_generics(it.final_stage().poset()).unwrap() {
            for alpha in 0..=2 {
                let f = factor_generic(it.clone(), alpha, &gf, &opts).unwrap();
                assert!(f.report.passed(), "{:#?}", f.report);
                assert_eq!(f.h.is_none(), alpha == 2);
                assert!(f.g.members().contains(it.restrict(2, gf.atom(), alpha)));
            }
        }
    }

    #[test]
    fn foreign_generic_is_rejected() {
        let it = it();
        let g1 = &enumerate_generics(it.stage(1).poset()).unwrap()[0];
        assert!(matches!(
            factor_generic(it, 1, g1, &UniverseOptions::default()),
            Err(ProjectionError::ForeignGeneric(2))
        ));
    }
}
