//! Exhaustive truth-lemma sweep over quantifier-free formulas.

use std::collections::HashMap;

use serde::Serialize;

use crate::formula::{Formula, Term};
use crate::names::{Evaluator, HfSet, NameError, NameId, NameUniverse};
use crate::poset::Poset;

use super::{enumerate_generics, GenericError};

/// Every depth-3 formula whose position is a multiple of this is also
/// rebuilt as a syntax tree and evaluated directly.
const AST_STRIDE: usize = 97;

const MAX_FAILURES: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum TruthLemmaError {
    #[error(transparent)]
    Generic(#[from] GenericError),
    #[error(transparent)]
    Name(#[from] NameError),
    #[error("more than 64 generics")]
    TooManyGenerics,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TruthLemmaReport {
    pub generics: usize,
    /// Ordered pairs of constants drawn from the universe.
    pub pairs: u64,
    /// Pairs with distinct atomic behaviour; every formula is checked once
    /// per signature.
    pub signatures: usize,
    /// Formulas per pair, i.e. closed formulas of depth at most 3.
    pub formulas_per_pair: u64,
    /// Formula instances covered: `pairs * formulas_per_pair`.
    pub instances: u128,
    /// Formulas also evaluated through the syntax tree.
    pub ast_checks: u64,
    pub failures: Vec<String>,
}

impl TruthLemmaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: impl FnOnce() -> String) {
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(msg());
        }
    }
}

/// One formula in the layered enumeration: its truth value in the algebra
/// and, bit `i`, whether it holds in the extension by generic `i`.
#[derive(Clone, Copy)]
struct Value {
    mask: usize,
    bits: u64,
}

/// Checks, for every ordered pair of names `($0, $1)` from `universe`, every
/// generic `G` of `poset`, and every closed quantifier-free formula of depth
/// at most 3 built from the eight atomic formulas in `$0, $1` with
/// `!, &, |, ->`:
///
/// * some `p` in `G` forces the formula iff it holds of the evaluations
///   under `G`;
/// * `p` forces it iff it holds under every generic containing `p`.
///
/// `universe` must be built over the regular-open algebra of `poset`.
/// Pairs are grouped by their atomic truth values and atomic semantic bits,
/// which determine those of every compound formula, so each group is
/// checked once.
pub fn check_truth_lemma(
    poset: &Poset,
    universe: &NameUniverse,
) -> Result<TruthLemmaReport, TruthLemmaError> {
    let alg = universe.algebra().clone();
    let store = universe.store();
    let generics = enumerate_generics(poset)?;
    if generics.len() > 64 {
        return Err(TruthLemmaError::TooManyGenerics);
    }
    let all: u64 = if generics.len() == 64 {
        u64::MAX
    } else {
        (1u64 << generics.len()) - 1
    };
    let mut report = TruthLemmaReport {
        generics: generics.len(),
        formulas_per_pair: formulas_up_to_depth_3(),
        ..TruthLemmaReport::default()
    };

    // Generics (as a bitmask) in which some member forces each algebra element.
    let forced_in: Vec<u64> = (0..alg.len())
        .map(|m| {
            generics
                .iter()
                .enumerate()
                .filter(|(_, g)| g.members().iter().any(|p| alg.leq(alg.principal(p), m)))
                .fold(0, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let containing: Vec<u64> = (0..poset.len())
        .map(|p| {
            generics
                .iter()
                .enumerate()
                .filter(|(_, g)| g.members().contains(p))
                .fold(0, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    let principal: Vec<usize> = (0..poset.len()).map(|p| alg.principal(p)).collect();

    let evaluations: Vec<HashMap<NameId, HfSet>> = generics
        .iter()
        .map(|g| {
            let filter = g.members().iter().map(|p| alg.to_base()[p]).collect();
            let mut ev = Evaluator::new(&alg, store, filter);
            universe.list().iter().map(|&x| (x, ev.eval(x))).collect()
        })
        .collect();

    let atoms = atomic_formulas();
    let mut session = universe.session();
    let mut groups: HashMap<Vec<(usize, u64)>, (NameId, NameId)> = HashMap::new();
    for &x in universe.list() {
        for &y in universe.list() {
            report.pairs += 1;
            let c = [x, y];
            let key: Vec<(usize, u64)> = atoms
                .iter()
                .map(|&(member, a, b)| {
                    let mask = if member {
                        session.member(c[a], c[b])
                    } else {
                        session.equal(c[a], c[b])
                    };
                    let bits = evaluations.iter().enumerate().fold(0u64, |acc, (i, ev)| {
                        let (u, v) = (&ev[&c[a]], &ev[&c[b]]);
                        let holds = if member { v.contains(u) } else { u == v };
                        acc | (holds as u64) << i
                    });
                    (mask, bits)
                })
                .collect();
            groups.entry(key).or_insert((x, y));
        }
    }
    report.signatures = groups.len();
    report.instances = report.pairs as u128 * report.formulas_per_pair as u128;

    let mut groups: Vec<_> = groups.into_iter().collect();
    groups.sort_by_key(|(_, pair)| *pair);
    for (key, (x, y)) in groups {
        let describe = |f: &dyn Fn() -> String| {
            format!(
                "{}: $0 = {}, $1 = {}: {}",
                poset_label(poset),
                store.literal(x),
                store.literal(y),
                f()
            )
        };
        let check = |v: Value, report: &mut TruthLemmaReport, f: &dyn Fn() -> String| {
            if forced_in[v.mask] != v.bits {
                report.fail(|| {
                    describe(&|| {
                        format!(
                            "{}: forced in generics {:b}, holds in {:b}",
                            f(),
                            forced_in[v.mask],
                            v.bits
                        )
                    })
                });
            }
            for (p, &gp) in containing.iter().enumerate() {
                if alg.leq(principal[p], v.mask) != (v.bits & gp == gp) {
                    report.fail(|| describe(&|| format!("{}: forcing at {p} disagrees", f())));
                }
            }
        };
        let not = |v: Value| Value {
            mask: alg.complement(v.mask),
            bits: !v.bits & all,
        };
        let binary = |op: usize, a: Value, b: Value| match op {
            0 => Value {
                mask: alg.meet(a.mask, b.mask),
                bits: a.bits & b.bits,
            },
            1 => Value {
                mask: alg.join(a.mask, b.mask),
                bits: a.bits | b.bits,
            },
            _ => Value {
                mask: alg.join(alg.complement(a.mask), b.mask),
                bits: (!a.bits & all) | b.bits,
            },
        };

        let layer1: Vec<(Formula, Value)> = atoms
            .iter()
            .zip(&key)
            .map(|(&(member, a, b), &(mask, bits))| {
                let (s, t) = (Term::Const(a), Term::Const(b));
                let f = if member {
                    Formula::member(s, t)
                } else {
                    Formula::equal(s, t)
                };
                (f, Value { mask, bits })
            })
            .collect();
        let mut layer2 = layer1.clone();
        for (f, v) in &layer1 {
            layer2.push((Formula::not(f.clone()), not(*v)));
        }
        for op in 0..3 {
            for (f, a) in &layer1 {
                for (g, b) in &layer1 {
                    layer2.push((combine(op, f, g), binary(op, *a, *b)));
                }
            }
        }
        for (f, v) in &layer2 {
            check(*v, &mut report, &|| f.to_string());
            cross_check(f, *v, [x, y], &mut session, &evaluations, &mut report)?;
        }
        for (f, v) in &layer2 {
            let nv = not(*v);
            check(nv, &mut report, &|| format!("!({f})"));
        }
        let mut position = 0usize;
        for op in 0..3 {
            for (f, a) in &layer2 {
                for (g, b) in &layer2 {
                    let v = binary(op, *a, *b);
                    check(v, &mut report, &|| combine(op, f, g).to_string());
                    if position.is_multiple_of(AST_STRIDE) {
                        let h = combine(op, f, g);
                        cross_check(&h, v, [x, y], &mut session, &evaluations, &mut report)?;
                    }
                    position += 1;
                }
            }
        }
    }
    Ok(report)
}

/// `x in y` and `x = y` for every ordered pair of the two constants.
fn atomic_formulas() -> Vec<(bool, usize, usize)> {
    let mut out = Vec::new();
    for member in [true, false] {
        for a in 0..2 {
            for b in 0..2 {
                out.push((member, a, b));
            }
        }
    }
    out
}

/// Formulas of depth at most 3 over eight atoms and four connectives.
fn formulas_up_to_depth_3() -> u64 {
    let d1 = 8u64;
    let d2 = d1 + d1 + 3 * d1 * d1;
    d2 + d2 + 3 * d2 * d2
}

fn combine(op: usize, f: &Formula, g: &Formula) -> Formula {
    let (f, g) = (f.clone(), g.clone());
    match op {
        0 => Formula::and(f, g),
        1 => Formula::or(f, g),
        _ => Formula::implies(f, g),
    }
}

/// Recomputes `f` from its syntax tree, through the truth-value clauses and
/// through `holds_in` on the evaluations, and compares with `v`.
fn cross_check(
    f: &Formula,
    v: Value,
    constants: [NameId; 2],
    session: &mut crate::names::TruthSession<'_>,
    evaluations: &[HashMap<NameId, HfSet>],
    report: &mut TruthLemmaReport,
) -> Result<(), NameError> {
    report.ast_checks += 1;
    let mask = session.value(f, &constants, &[])?;
    let mut bits = 0u64;
    for (i, ev) in evaluations.iter().enumerate() {
        let c = [ev[&constants[0]].clone(), ev[&constants[1]].clone()];
        let holds = f
            .holds_in(&[], &c, &mut Vec::new())
            .map_err(|_| NameError::Open(Vec::new()))?;
        bits |= (holds as u64) << i;
    }
    if mask != v.mask || bits != v.bits {
        report.fail(|| format!("layered value of {f} differs from direct evaluation"));
    }
    Ok(())
}

fn poset_label(p: &Poset) -> String {
    let mut edges = Vec::new();
    for a in 0..p.len() {
        for b in 0..p.len() {
            if a != b && p.leq(a, b) {
                edges.push(format!("{}<{}", p.label(a), p.label(b)));
            }
        }
    }
    format!("poset[{}]", edges.join(","))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::boolalg::{ro_algebra, AlgebraLimits};
    use crate::names::name_universe;

    #[test]
    fn counts_formulas_by_depth() {
        assert_eq!(formulas_up_to_depth_3(), 130_208);
    }

    #[test]
    fn antichain_rank_one_passes() {
        let p = Poset::antichain(2);
        let alg = Arc::new(ro_algebra(&p, AlgebraLimits::default()).unwrap());
        let u = name_universe(alg, 1, 1000).unwrap();
        let r = check_truth_lemma(&p, &u).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert_eq!(r.pairs, 16);
        assert!(r.signatures >= 2);
        assert!(r.ast_checks > 208);
    }
}
