use crate::iteration::{build_iteration, IterationCaps};
use crate::poset::find_isomorphism;

use super::{CheckRecord, Counterexample, ProjectionContext, ProjectionError, SuiteReport};

const SUITE: &str = "corollary15";

/// Rebuilds the iteration the provider defines from the generic's point of
/// view (the provider with the generic's choices fixed) and compares each
/// of its stages with the corresponding quotient.
pub fn verify_corollary15(ctx: &ProjectionContext) -> Result<SuiteReport, ProjectionError> {
    let it = ctx.iteration();
    let alpha = ctx.alpha();
    let path = it
        .stage(alpha)
        .path(ctx.atom())
        .expect("the generic is generated by a minimal element")
        .to_vec();
    let shifted = it.provider().shifted(&path);
    let caps = IterationCaps {
        max_stages: shifted.stages(),
        ..IterationCaps::default()
    };
    let rebuilt = build_iteration(shifted, caps)?;
    let mut report = SuiteReport::new(SUITE);
    let mut rec = CheckRecord::new(
        &ctx.label(it.steps()),
        SUITE,
        "stagewise-isomorphism",
        "canonical-form matching",
    );
    rec.case(rebuilt.stage(0).len() == 1, || {
        Counterexample::new("stage 0", "one point", rebuilt.stage(0).len().to_string())
    });
    for beta in alpha + 1..=it.steps() {
        let quotient = ctx.level(beta)?.poset();
        let local = rebuilt.stage(beta - alpha).poset();
        rec.case(find_isomorphism(quotient, local).is_some(), || {
            Counterexample::new(
                format!("stage {beta}"),
                format!("{} elements", quotient.len()),
                format!("{} elements, not isomorphic", local.len()),
            )
        });
    }
    report.records.push(rec);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::generic::enumerate_generics;
    use crate::iteration::StepProvider;
    use crate::poset::Poset;
    use crate::projection::make_context;

    fn check_all(provider: StepProvider) {
        let it = Arc::new(build_iteration(provider, IterationCaps::default()).unwrap());
        for alpha in 0..=it.steps() {
            for g in enumerate_generics(it.stage(alpha).poset()).unwrap() {
                let ctx = make_context(it.clone(), alpha, &g).unwrap();
                let r = verify_corollary15(&ctx).unwrap();
                assert!(r.passed(), "{:#?}", r.records);
            }
        }
    }

    #[test]
    fn trivial_and_antichain_tails() {
        check_all(StepProvider::constant(vec![Some(Poset::point()); 2]));
        check_all(StepProvider::constant(vec![Some(Poset::antichain(2)); 2]));
    }

    #[test]
    fn generic_dependent_table() {
        // Stage 1 forces A2 after the first minimal element of Q_0 and a
        // point after the second.
        let a2 = Arc::new(Poset::antichain(2));
        let mut table = BTreeMap::new();
        table.insert(vec![], a2.clone());
        table.insert(vec![0], a2.clone());
        table.insert(vec![1], Arc::new(Poset::point()));
        check_all(StepProvider::from_table(2, "dependent", table));
    }
}
