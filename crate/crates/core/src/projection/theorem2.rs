use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;
use crate::boolalg::{check_complete_hom, BoolAlgebra, HomCoverage};
use crate::formula::Formula;
use crate::names::{bounded_universe, NameId, NameStore, NameUniverse, TruthSession};

use super::{CheckRecord, Counterexample, ProjectionContext, ProjectionError, SuiteReport};

/// Parameters for the name universes the suites quantify over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniverseOptions {
    pub rank: usize,
    /// Largest exhaustive universe; above it the top rank is sampled.
    pub cap: usize,
    pub draws: usize,
    pub seed: u64,
    /// Largest number of constant tuples per supplied formula.
    pub max_tuples: usize,
}

impl Default for UniverseOptions {
    fn default() -> Self {
        UniverseOptions {
            rank: 2,
            cap: 300,
            draws: 40,
            seed: 0,
            max_tuples: 4096,
        }
    }
}

impl UniverseOptions {
    pub fn build(&self, alg: Arc<BoolAlgebra>) -> Result<NameUniverse, ProjectionError> {
        Ok(bounded_universe(
            alg, self.rank, self.cap, self.draws, self.seed,
        )?)
    }
}

pub(crate) fn coverage_label(u: &NameUniverse) -> String {
    match u.coverage() {
        crate::names::Coverage::Exhaustive => format!("exhaustive rank<={}", u.rank_bound()),
        crate::names::Coverage::Sampled { drawn, seed } => {
            format!("rank<={} sampled {drawn} seed {seed}", u.rank_bound())
        }
        crate::names::Coverage::Supplied => "supplied".into(),
    }
}

fn hom_coverage(c: HomCoverage) -> &'static str {
    match c {
        HomCoverage::AllFamilies => "all subfamilies",
        HomCoverage::PairsAndExtremes => "pairs and extremes",
        HomCoverage::AtomDecomposition => "atom decomposition",
    }
}

/// The three claims about `pi'` and `pi''` at stage `beta`: `pi'` is a
/// complete homomorphism, `pi''` is onto the target universe, and truth
/// values commute with the maps.
///
/// `universe` must be over the algebra of `P_beta`. Atomic formulas are
/// checked on every pair from the universe; each supplied formula on the
/// tuples of constants it mentions. Quantifiers range over the universe on
/// the source side and over its `pi''` image on the target side.
pub fn verify_theorem2(
    ctx: &ProjectionContext,
    beta: usize,
    universe: &NameUniverse,
    opts: &UniverseOptions,
    formulas: &[Formula],
) -> Result<SuiteReport, ProjectionError> {
    let instance = ctx.label(beta);
    let level = ctx.level(beta)?;
    let src = ctx.iteration().stage(beta).algebra();
    if universe.algebra().source_id() != src.source_id() {
        return Err(ProjectionError::ForeignStore(beta));
    }
    let dst = level.algebra();
    let mut report = SuiteReport::new("theorem2");

    report.records.push(item1(
        ctx,
        beta,
        &instance,
        "theorem2",
        "item1-complete-hom",
    ));

    let target = opts.build(dst.clone())?;
    report
        .records
        .push(onto_record(ctx, beta, &target, "theorem2", "item2-onto")?);

    report.records.push(atomic_record(
        ctx,
        beta,
        universe,
        "theorem2",
        "item3-atomic",
    )?);

    if !formulas.is_empty() {
        let mut rec = CheckRecord::new(
            &instance,
            "theorem2",
            "item3-formulas",
            &coverage_label(universe),
        );
        let mut tr = ctx.transport(beta, universe.store(), None)?;
        let list = universe.list();
        let image: Vec<NameId> = list.iter().map(|&x| tr.map(x)).collect();
        let dst_store = tr.into_store();
        let table = ctx.pi_prime_table(beta);
        let mut s_src = universe.session();
        let mut s_dst = TruthSession::new(&dst, &dst_store)?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for f in formulas {
            let arity = f.max_constant().map_or(0, |k| k + 1);
            for tuple in constant_tuples(list.len(), arity, opts.max_tuples, &mut rng) {
                let cs: Vec<NameId> = tuple.iter().map(|&k| list[k]).collect();
                let ci: Vec<NameId> = tuple.iter().map(|&k| image[k]).collect();
                let a = s_src.value(f, &cs, list)?;
                let b = s_dst.value(f, &ci, &image)?;
                rec.case(table[a] == b, || {
                    Counterexample::new(
                        format!("{f} with constants {tuple:?}"),
                        table[a].to_string(),
                        b.to_string(),
                    )
                });
            }
        }
        report.records.push(rec);
    }
    Ok(report)
}

/// `pi'(||x R y||) = ||pi''x R pi''y||` for membership and equality over
/// every pair from the universe.
pub(crate) fn atomic_record(
    ctx: &ProjectionContext,
    beta: usize,
    universe: &NameUniverse,
    suite: &str,
    check: &str,
) -> Result<CheckRecord, ProjectionError> {
    let dst = ctx.level(beta)?.algebra();
    let mut tr = ctx.transport(beta, universe.store(), None)?;
    let image: Vec<NameId> = universe.list().iter().map(|&x| tr.map(x)).collect();
    let dst_store = tr.into_store();
    let table = ctx.pi_prime_table(beta);
    let mut s_src = universe.session();
    let mut s_dst = TruthSession::new(&dst, &dst_store)?;
    let list = universe.list();
    let mut rec = CheckRecord::new(&ctx.label(beta), suite, check, &coverage_label(universe));
    for (i, &x) in list.iter().enumerate() {
        for (j, &y) in list.iter().enumerate() {
            for (op, a, b) in [
                ("in", s_src.member(x, y), s_dst.member(image[i], image[j])),
                ("=", s_src.equal(x, y), s_dst.equal(image[i], image[j])),
            ] {
                rec.case(table[a] == b, || {
                    Counterexample::new(
                        format!(
                            "{} {op} {}",
                            universe.store().literal(x),
                            universe.store().literal(y)
                        ),
                        table[a].to_string(),
                        b.to_string(),
                    )
                });
            }
        }
    }
    Ok(rec)
}

pub(crate) fn item1(
    ctx: &ProjectionContext,
    beta: usize,
    instance: &str,
    suite: &str,
    check: &str,
) -> CheckRecord {
    let src = ctx.iteration().stage(beta).algebra();
    let dst = ctx.level(beta).expect("beta in range").algebra();
    let hom = check_complete_hom(ctx.pi_prime_table(beta), &src, &dst);
    let mut rec = CheckRecord::new(instance, suite, check, hom_coverage(hom.coverage));
    rec.cases = hom.families_checked;
    for c in &hom.counterexamples {
        rec.fail(Counterexample::new(
            format!("{:?} of {:?}", c.law, c.family),
            c.expected.to_string(),
            c.got.to_string(),
        ));
    }
    if !hom.passed() && rec.passed {
        rec.fail(Counterexample::new("hom report", "pass", "fail"));
    }
    rec
}

/// Builds a `pi''` preimage of every target name by recursion on rank:
/// each value `c` is replaced by the join of the source atoms whose image
/// lies below `c`, and the result is transported back.
pub(crate) fn onto_record(
    ctx: &ProjectionContext,
    beta: usize,
    target: &NameUniverse,
    suite: &str,
    check: &str,
) -> Result<CheckRecord, ProjectionError> {
    let src = ctx.iteration().stage(beta).algebra();
    let table = ctx.pi_prime_table(beta);
    let lift: Vec<usize> = {
        let dst = ctx.level(beta)?.algebra();
        (0..dst.len())
            .map(|c| {
                (0..src.atom_count())
                    .map(|i| 1usize << i)
                    .filter(|&x| dst.leq(table[x], c))
                    .fold(0, |m, x| m | x)
            })
            .collect()
    };
    let mut wstore = NameStore::new(&src);
    let mut memo: HashMap<NameId, NameId> = HashMap::new();
    let witnesses: Vec<NameId> = target
        .list()
        .iter()
        .map(|&y| witness(target.store(), &mut wstore, &lift, &mut memo, y))
        .collect::<Result<_, _>>()?;
    let mut tr = ctx.transport(beta, &wstore, Some(target.store().clone()))?;
    let mut rec = CheckRecord::new(&ctx.label(beta), suite, check, &coverage_label(target));
    for (&y, &w) in target.list().iter().zip(&witnesses) {
        let got = tr.map(w);
        rec.case(got == y, || {
            Counterexample::new(
                target.store().literal(y),
                target.store().literal(y),
                tr.store().literal(got),
            )
        });
    }
    Ok(rec)
}

fn witness(
    target: &NameStore,
    out: &mut NameStore,
    lift: &[usize],
    memo: &mut HashMap<NameId, NameId>,
    y: NameId,
) -> Result<NameId, ProjectionError> {
    if let Some(&w) = memo.get(&y) {
        return Ok(w);
    }
    let mut entries = Vec::new();
    for &(t, c) in target.entries(y) {
        entries.push((witness(target, out, lift, memo, t)?, lift[c as usize]));
    }
    let w = out.intern(entries)?;
    memo.insert(y, w);
    Ok(w)
}

/// All `arity`-tuples of indices below `n`, or a seeded sample of `max`
/// of them when there are more.
fn constant_tuples(n: usize, arity: usize, max: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total = (n as u128).checked_pow(arity as u32);
    if total.is_some_and(|t| t <= max as u128) {
        let mut out = vec![Vec::new()];
        for _ in 0..arity {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..n).map(move |k| {
                        let mut t = t.clone();
                        t.push(k);
                        t
                    })
                })
                .collect();
        }
        return out;
    }
    let idx: Vec<usize> = (0..n).collect();
    (0..max)
        .map(|_| (0..arity).map(|_| *idx.choose(rng).unwrap()).collect())
        .collect()
}

/// Complement laws for the cut-level map `U -> pi'(U)` on non-regular cuts
/// `down(c) + down(d)` and on every regular cut: `pi'(-U) = -pi'(U)` and
/// `pi'(U) = -pi'(-U)`. With `regularize` off the map is the bare image,
/// which breaks the second law as soon as some union of two cones is not
/// regular.
pub fn check_cut_complements(
    ctx: &ProjectionContext,
    beta: usize,
    regularize: bool,
) -> Result<CheckRecord, ProjectionError> {
    let level = ctx.level(beta)?;
    let p = ctx.iteration().stage(beta).poset().clone();
    let q = level.poset();
    let alg = ctx.iteration().stage(beta).algebra();
    let mut cuts: Vec<Bits> = (0..alg.len()).map(|u| alg.cut_members(u)).collect();
    for c in 0..p.len() {
        for d in c..p.len() {
            cuts.push(p.down(c).union(p.down(d)));
        }
    }
    let name = if regularize {
        "cut-complements"
    } else {
        "cut-complements-unregularized"
    };
    let mut rec = CheckRecord::new(
        &ctx.label(beta),
        "theorem2",
        name,
        "regular cuts and pairs of cones",
    );
    for u in &cuts {
        let neg = p.complement_set(u);
        let img = ctx.pi_prime_set(beta, u, regularize);
        let img_neg = ctx.pi_prime_set(beta, &neg, regularize);
        let fmt = |s: &Bits| format!("{:?}", s.iter().collect::<Vec<_>>());
        rec.case(img_neg == q.complement_set(&img), || {
            Counterexample::new(
                format!("-U for U = {}", fmt(u)),
                fmt(&q.complement_set(&img)),
                fmt(&img_neg),
            )
        });
        rec.case(img == q.complement_set(&img_neg), || {
            Counterexample::new(
                format!("U = {}", fmt(u)),
                fmt(&q.complement_set(&img_neg)),
                fmt(&img),
            )
        });
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_closed_formula;
    use crate::generic::enumerate_generics;
    use crate::iteration::{build_iteration, IterationCaps, StepProvider};
    use crate::poset::Poset;
    use crate::projection::make_context;

    fn ctx_for(steps: Vec<Option<Poset>>, alpha: usize, g: usize) -> ProjectionContext {
        let it = Arc::new(
            build_iteration(StepProvider::constant(steps), IterationCaps::default()).unwrap(),
        );
        let gen = &enumerate_generics(it.stage(alpha).poset()).unwrap()[g];
        make_context(it, alpha, gen).unwrap()
    }

    #[test]
    fn antichain_instance_passes_every_item() {
        let a2 = Some(Poset::antichain(2));
        let ctx = ctx_for(vec![a2.clone(), a2], 1, 0);
        let u = UniverseOptions::default()
            .build(ctx.iteration().stage(2).algebra())
            .unwrap();
        let fs = vec![
            parse_closed_formula("exists z (z in $0)").unwrap(),
            parse_closed_formula("forall z (z in $0 -> z in $1)").unwrap(),
        ];
        let opts = UniverseOptions {
            max_tuples: 64,
            ..Default::default()
        };
        let r = verify_theorem2(&ctx, 2, &u, &opts, &fs).unwrap();
        assert!(r.passed(), "{:#?}", r.records);
        assert_eq!(r.records.len(), 4);
        assert!(r.cases() > 0);
    }

    #[test]
    fn point_step_is_degenerate() {
        let ctx = ctx_for(vec![Some(Poset::antichain(2)), Some(Poset::point())], 1, 1);
        assert_eq!(ctx.level(2).unwrap().poset().len(), 1);
        let u = UniverseOptions::default()
            .build(ctx.iteration().stage(2).algebra())
            .unwrap();
        let r = verify_theorem2(&ctx, 2, &u, &UniverseOptions::default(), &[]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn bare_images_break_complements() {
        let a2 = Some(Poset::antichain(2));
        let ctx = ctx_for(vec![a2.clone(), a2], 1, 0);
        assert!(check_cut_complements(&ctx, 2, true).unwrap().passed);
        let bad = check_cut_complements(&ctx, 2, false).unwrap();
        assert!(!bad.passed);
        assert!(!bad.counterexamples.is_empty());
    }
}
