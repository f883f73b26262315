//! Quotients of an iteration by a generic on an initial stage.
//!
//! Fix `alpha` and a generic `G` on `P_alpha`. For every later stage `beta`
//! the context materializes the quotient poset `P_(alpha beta)`, the partial
//! map `pi` from `P_beta` onto it (defined on conditions whose
//! `alpha`-prefix lies in `G`), the map `pi'` on regular cuts (pointwise
//! image, then regularization) and the map `pi''` on names (recursion on
//! rank, applying `pi'` to every Boolean value).
//!
//! The first quotient is the step poset evaluated at `G`. Later quotients
//! consist of pairs (earlier quotient element, image of a tail name under
//! `pi''`), ordered by forcing over the earlier quotient, and taken modulo
//! mutual extension. Everything is computed from the ground iteration and
//! the generic; nothing reuses the step provider.

mod corollary;
mod factor;
mod lemma20;
mod lemmas;
mod report;
mod theorem2;

pub use corollary::verify_corollary15;
pub use factor::{factor_generic, Factorization};
pub use lemma20::verify_lemma20_analogue;
pub use lemmas::verify_projection_lemmas;
pub use report::{CheckRecord, Counterexample, SuiteReport, COUNTEREXAMPLE_CAP};
pub use theorem2::{check_cut_complements, verify_theorem2, UniverseOptions};

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::bits::Bits;
use crate::boolalg::{ro_algebra, AlgebraError, AlgebraLimits, BoolAlgebra};
use crate::generic::GenericSet;
use crate::iteration::{Iteration, IterationError, Tail};
use crate::names::{evaluate, NameError, NameId, NameStore};
use crate::poset::{Poset, PosetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("stage {alpha} is beyond the final stage {last}")]
    AlphaOutOfRange { alpha: usize, last: usize },
    #[error("stage {beta} is outside the context range {alpha}..={last}")]
    BetaOutOfRange {
        beta: usize,
        alpha: usize,
        last: usize,
    },
    #[error("generic does not belong to stage {0}")]
    ForeignGeneric(usize),
    #[error("quotient at stage {beta}: image order is not a partial order")]
    NotPartialOrder { beta: usize },
    #[error("quotient at stage {beta} is not separative")]
    NotSeparative { beta: usize },
    #[error("quotient at stage {beta}: minimal element {atom} has no preimage")]
    AtomWithoutPreimage { beta: usize, atom: usize },
    #[error("quotient at stage {beta}: {reason}")]
    BadTail { beta: usize, reason: String },
    #[error("name store does not belong to stage {0}")]
    ForeignStore(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Name(#[from] NameError),
    #[error(transparent)]
    Iteration(#[from] IterationError),
}

/// Tail of a quotient element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuotTail {
    One,
    /// At the first quotient: an element of the step poset under `G`.
    Value(usize),
    /// Later: a name over the previous quotient's algebra.
    Name(NameId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotElem {
    /// Element of the previous quotient (0 at the first one).
    pub prev: usize,
    pub tail: QuotTail,
}

/// The quotient `P_(alpha beta)` and the maps into it.
#[derive(Debug)]
pub struct Level {
    beta: usize,
    poset: Arc<Poset>,
    elems: Vec<QuotElem>,
    pi: Vec<Option<usize>>,
    /// For each minimal quotient element (in id order), a minimal element of
    /// `P_beta` mapped onto it.
    atom_pre: Vec<(usize, usize)>,
    /// Store holding the tail names of this level (over the previous
    /// quotient's algebra).
    tail_store: Option<NameStore>,
    algebra: OnceLock<Arc<BoolAlgebra>>,
    pi_prime: OnceLock<Vec<usize>>,
}

impl Level {
    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn elems(&self) -> &[QuotElem] {
        &self.elems
    }

    /// `pi(c)` for every condition `c` of `P_beta`.
    pub fn pi(&self) -> &[Option<usize>] {
        &self.pi
    }

    pub fn tail_store(&self) -> Option<&NameStore> {
        self.tail_store.as_ref()
    }

    /// A minimal condition of `P_beta` projecting onto the minimal quotient
    /// element `h`.
    pub fn atom_preimage(&self, h: usize) -> Option<usize> {
        self.atom_pre
            .iter()
            .find(|&&(a, _)| a == h)
            .map(|&(_, g)| g)
    }

    pub fn algebra(&self) -> Arc<BoolAlgebra> {
        self.algebra
            .get_or_init(|| {
                Arc::new(
                    ro_algebra(&self.poset, AlgebraLimits::unbounded())
                        .expect("quotients fit the algebra bounds"),
                )
            })
            .clone()
    }
}

/// Everything derived from one generic on one stage.
#[derive(Debug)]
pub struct ProjectionContext {
    iteration: Arc<Iteration>,
    alpha: usize,
    atom: usize,
    generic: Bits,
    levels: Vec<Level>,
}

/// Builds the quotients for every stage after `alpha`.
pub fn make_context(
    iteration: Arc<Iteration>,
    alpha: usize,
    g: &GenericSet,
) -> Result<ProjectionContext, ProjectionError> {
    let last = iteration.steps();
    if alpha > last {
        return Err(ProjectionError::AlphaOutOfRange { alpha, last });
    }
    let stage = iteration.stage(alpha);
    if g.filter().owner() != stage.poset().id() {
        return Err(ProjectionError::ForeignGeneric(alpha));
    }
    let mut ctx = ProjectionContext {
        alpha,
        atom: g.atom(),
        generic: *g.members(),
        levels: Vec::new(),
        iteration,
    };
    for beta in alpha + 1..=last {
        let level = if beta == alpha + 1 {
            ctx.first_level()?
        } else {
            ctx.next_level(beta)?
        };
        ctx.levels.push(level);
    }
    Ok(ctx)
}

/// One context per generic on `P_alpha`, in minimal-element order. Used
/// wherever a statement is forced by a condition of `P_alpha` rather than
/// evaluated under a single generic.
#[derive(Debug)]
pub struct ContextFamily {
    alpha: usize,
    contexts: Vec<ProjectionContext>,
}

impl ContextFamily {
    pub fn new(iteration: Arc<Iteration>, alpha: usize) -> Result<ContextFamily, ProjectionError> {
        let last = iteration.steps();
        if alpha > last {
            return Err(ProjectionError::AlphaOutOfRange { alpha, last });
        }
        let p = iteration.stage(alpha).poset().clone();
        let contexts = crate::generic::enumerate_generics(&p)
            .expect("generics of a finite poset")
            .iter()
            .map(|g| make_context(iteration.clone(), alpha, g))
            .collect::<Result<_, _>>()?;
        Ok(ContextFamily { alpha, contexts })
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn iteration(&self) -> &Arc<Iteration> {
        self.contexts[0].iteration()
    }

    pub fn contexts(&self) -> &[ProjectionContext] {
        &self.contexts
    }

    /// The context of the generic generated by the minimal element `atom`.
    pub fn for_atom(&self, atom: usize) -> Option<&ProjectionContext> {
        self.contexts.iter().find(|c| c.atom == atom)
    }

    /// The contexts of every generic containing `r`.
    pub fn containing(&self, r: usize) -> impl Iterator<Item = &ProjectionContext> {
        self.contexts.iter().filter(move |c| c.generic.contains(r))
    }

    pub fn label(&self, beta: usize) -> String {
        format!(
            "{}|alpha={}|beta={beta}",
            self.iteration().provider().description(),
            self.alpha
        )
    }
}

impl ProjectionContext {
    pub fn iteration(&self) -> &Arc<Iteration> {
        &self.iteration
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// The minimal element of `P_alpha` generating `G`.
    pub fn atom(&self) -> usize {
        self.atom
    }

    pub fn generic(&self) -> &Bits {
        &self.generic
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Instance id of the checks made at stage `beta`.
    pub fn label(&self, beta: usize) -> String {
        format!(
            "{}|alpha={}|G={}|beta={beta}",
            self.iteration.provider().description(),
            self.alpha,
            self.iteration.stage(self.alpha).poset().label(self.atom)
        )
    }

    pub fn level(&self, beta: usize) -> Result<&Level, ProjectionError> {
        if beta <= self.alpha || beta > self.iteration.steps() {
            return Err(ProjectionError::BetaOutOfRange {
                beta,
                alpha: self.alpha,
                last: self.iteration.steps(),
            });
        }
        Ok(&self.levels[beta - self.alpha - 1])
    }

    /// `pi_(alpha beta)(c)`; `None` when the `alpha`-prefix of `c` is not in `G`.
    pub fn pi(&self, beta: usize, c: usize) -> Option<usize> {
        if beta == self.alpha {
            return self.generic.contains(c).then_some(0);
        }
        self.level(beta).ok()?.pi[c]
    }

    /// `pi'` of a regular cut of `P_beta`, as a set of quotient elements.
    /// With `regularize` off this is the bare image, kept as a test hook.
    pub fn pi_prime_set(&self, beta: usize, members: &Bits, regularize: bool) -> Bits {
        let level = self.level(beta).expect("beta in range");
        let image: Bits = members.iter().filter_map(|c| level.pi[c]).collect();
        if regularize {
            level.poset.regularize_set(&image)
        } else {
            image
        }
    }

    /// `pi'` on the whole algebra of `P_beta`, indexed by algebra element.
    pub fn pi_prime_table(&self, beta: usize) -> &[usize] {
        let level = self.level(beta).expect("beta in range");
        level.pi_prime.get_or_init(|| {
            let src = self.iteration.stage(beta).algebra();
            let dst = level.algebra();
            (0..src.len())
                .map(|u| {
                    let reg = self.pi_prime_set(beta, &src.cut_members(u), true);
                    let v = dst.mask_of_set(&reg);
                    debug_assert_eq!(dst.cut_members(v), reg);
                    v
                })
                .collect()
        })
    }

    /// A transport of names over `P_beta`'s algebra into a store over the
    /// quotient's algebra, starting from `dst` (or an empty store).
    pub fn transport<'a>(
        &'a self,
        beta: usize,
        src: &'a NameStore,
        dst: Option<NameStore>,
    ) -> Result<NameTransport<'a>, ProjectionError> {
        let level = self.level(beta)?;
        let src_alg = self.iteration.stage(beta).algebra();
        src.check_algebra(&src_alg)
            .map_err(|_| ProjectionError::ForeignStore(beta))?;
        let dst_alg = level.algebra();
        let dst = match dst {
            Some(d) => {
                d.check_algebra(&dst_alg)?;
                d
            }
            None => NameStore::new(&dst_alg),
        };
        Ok(NameTransport {
            table: self.pi_prime_table(beta),
            src,
            dst,
            memo: HashMap::new(),
        })
    }

    /// The quotient atoms below `x` at `level`, with the `P_beta` atom each
    /// comes from.
    fn atoms_below(&self, level: &Level, x: usize) -> Vec<(usize, usize)> {
        level
            .atom_pre
            .iter()
            .copied()
            .filter(|&(h, _)| level.poset.leq(h, x))
            .collect()
    }

    fn first_level(&self) -> Result<Level, ProjectionError> {
        let beta = self.alpha + 1;
        let it = &self.iteration;
        let prev = it.stage(self.alpha);
        let q = prev.step(self.atom).cloned();
        let stage = it.stage(beta);
        let mut keys: Vec<Option<QuotElem>> = Vec::with_capacity(stage.len());
        for (c, cond) in stage.conds().iter().enumerate() {
            if !self.generic.contains(cond.prev) {
                keys.push(None);
                continue;
            }
            let tail = match (&q, &cond.tail) {
                (None, _) => QuotTail::One,
                (Some(q), _) => {
                    let v = it
                        .tail_value(beta, c, self.atom)
                        .expect("tail defined under G");
                    if v == q.top() {
                        QuotTail::One
                    } else {
                        QuotTail::Value(v)
                    }
                }
            };
            keys.push(Some(QuotElem { prev: 0, tail }));
        }
        let top_key = keys[stage.poset().top()]
            .clone()
            .expect("top is in the domain");
        let (elems, pi) = index_keys(&keys);
        let n = elems.len();
        let mut rel = vec![Bits::empty(); n];
        let sp = stage.poset();
        for c in 0..sp.len() {
            let Some(i) = pi[c] else { continue };
            for d in sp.up(c).iter() {
                if let Some(j) = pi[d] {
                    rel[j].insert(i);
                }
            }
        }
        let labels = elems
            .iter()
            .map(|e| match (&e.tail, &q) {
                (QuotTail::Value(v), Some(q)) => q.label(*v).to_string(),
                _ => "1".to_string(),
            })
            .collect();
        let top = elems.iter().position(|e| *e == top_key).unwrap();
        let poset = order_from_relation(beta, labels, rel, top)?;
        self.finish_level(beta, poset, elems, pi, None)
    }

    fn next_level(&self, beta: usize) -> Result<Level, ProjectionError> {
        let gamma = beta - 1;
        let it = &self.iteration;
        let prev_level = self.level(gamma)?;
        let stage = it.stage(beta);
        let names = it.tail_names(beta);
        let mut tr = self.transport(gamma, &names.store, None)?;
        let mut keys: Vec<Option<QuotElem>> = Vec::with_capacity(stage.len());
        for (c, cond) in stage.conds().iter().enumerate() {
            let Some(x) = prev_level.pi[cond.prev] else {
                keys.push(None);
                continue;
            };
            let tail = match (&cond.tail, names.names[c]) {
                (Tail::Fun(_), Some(n)) => QuotTail::Name(tr.map(n)),
                _ => QuotTail::One,
            };
            keys.push(Some(QuotElem { prev: x, tail }));
        }
        let tail_store = tr.into_store();
        let top_key = keys[stage.poset().top()]
            .clone()
            .expect("top is in the domain");
        let (raw, raw_pi) = index_keys(&keys);

        // Decode every tail under every quotient atom below its prefix.
        let alg = prev_level.algebra();
        let prev_stage = it.stage(gamma);
        let value = |e: &QuotElem, h: usize, g: usize| -> Result<usize, ProjectionError> {
            let q = prev_stage.step(g);
            match (&e.tail, q) {
                (QuotTail::One, Some(q)) => Ok(q.top()),
                (QuotTail::One, None) => Ok(usize::MAX),
                (QuotTail::Name(n), Some(q)) => {
                    let filter: Bits = prev_level.poset.up(h).iter().collect();
                    let v = evaluate(&alg, &tail_store, *n, filter);
                    match v.as_numeral() {
                        Some(k) if k < q.len() => Ok(k),
                        _ => Err(ProjectionError::BadTail {
                            beta,
                            reason: format!("name evaluates to {v} under minimal element {h}"),
                        }),
                    }
                }
                (t, None) => Err(ProjectionError::BadTail {
                    beta,
                    reason: format!("tail {t:?} below {h} where no step is defined"),
                }),
                (QuotTail::Value(_), _) => unreachable!("values only at the first quotient"),
            }
        };
        let below: Vec<Vec<(usize, usize)>> = raw
            .iter()
            .map(|e| self.atoms_below(prev_level, e.prev))
            .collect();
        let mut vals: Vec<Vec<usize>> = Vec::with_capacity(raw.len());
        for (e, bl) in raw.iter().zip(&below) {
            vals.push(
                bl.iter()
                    .map(|&(h, g)| value(e, h, g))
                    .collect::<Result<_, _>>()?,
            );
        }
        let leq = |i: usize, j: usize| -> bool {
            let (a, b) = (&raw[i], &raw[j]);
            if !prev_level.poset.leq(a.prev, b.prev) {
                return false;
            }
            if b.tail == QuotTail::One {
                return true;
            }
            below[i].iter().enumerate().all(|(k, &(h, g))| {
                let Some(q) = prev_stage.step(g) else {
                    return true;
                };
                let pos = below[j].iter().position(|&(h2, _)| h2 == h).unwrap();
                q.leq(vals[i][k], vals[j][pos])
            })
        };
        let labels: Vec<String> = raw
            .iter()
            .map(|e| {
                let tail = match e.tail {
                    QuotTail::Name(n) => format!("n{n}"),
                    _ => "1".into(),
                };
                format!("{}|{}", prev_level.poset.label(e.prev), tail)
            })
            .collect();
        let top_raw = raw.iter().position(|e| *e == top_key).unwrap();
        let (poset, class) = Poset::quotient_of_preorder(&labels, leq, top_raw)?;
        let mut elems: Vec<Option<QuotElem>> = vec![None; poset.len()];
        for (i, e) in raw.into_iter().enumerate() {
            elems[class[i]].get_or_insert(e);
        }
        let elems = elems.into_iter().map(Option::unwrap).collect();
        let pi = raw_pi.iter().map(|r| r.map(|i| class[i])).collect();
        self.finish_level(beta, poset, elems, pi, Some(tail_store))
    }

    fn finish_level(
        &self,
        beta: usize,
        poset: Poset,
        elems: Vec<QuotElem>,
        pi: Vec<Option<usize>>,
        tail_store: Option<NameStore>,
    ) -> Result<Level, ProjectionError> {
        if !poset.is_separative() {
            return Err(ProjectionError::NotSeparative { beta });
        }
        let stage = self.iteration.stage(beta);
        let mut atom_pre = Vec::new();
        for h in poset.minimal_elements().iter() {
            let g = stage
                .atoms()
                .iter()
                .copied()
                .find(|&g| pi[g] == Some(h))
                .ok_or(ProjectionError::AtomWithoutPreimage { beta, atom: h })?;
            atom_pre.push((h, g));
        }
        Ok(Level {
            beta,
            poset: Arc::new(poset),
            elems,
            pi,
            atom_pre,
            tail_store,
            algebra: OnceLock::new(),
            pi_prime: OnceLock::new(),
        })
    }
}

/// Distinct keys in order of first appearance, and each input's index.
fn index_keys(keys: &[Option<QuotElem>]) -> (Vec<QuotElem>, Vec<Option<usize>>) {
    let mut seen: HashMap<&QuotElem, usize> = HashMap::new();
    let mut elems = Vec::new();
    let pi = keys
        .iter()
        .map(|k| {
            k.as_ref().map(|k| {
                *seen.entry(k).or_insert_with(|| {
                    elems.push(k.clone());
                    elems.len() - 1
                })
            })
        })
        .collect();
    (elems, pi)
}

/// Accepts an image relation (`rel[j]` = elements below `j`) only if it is
/// already reflexive, transitive and antisymmetric.
fn order_from_relation(
    beta: usize,
    labels: Vec<String>,
    rel: Vec<Bits>,
    top: usize,
) -> Result<Poset, ProjectionError> {
    Poset::from_down_sets(labels, rel, top).map_err(|e| match e {
        PosetError::NotReflexive(_)
        | PosetError::NotTransitive(..)
        | PosetError::Cycle(..)
        | PosetError::TopNotMaximal { .. } => ProjectionError::NotPartialOrder { beta },
        other => ProjectionError::Poset(other),
    })
}

/// `pi''`: rebuilds a name with every Boolean value replaced by its `pi'`
/// image, memoized per source name.
pub struct NameTransport<'a> {
    table: &'a [usize],
    src: &'a NameStore,
    dst: NameStore,
    memo: HashMap<NameId, NameId>,
}

impl NameTransport<'_> {
    pub fn map(&mut self, x: NameId) -> NameId {
        if let Some(&y) = self.memo.get(&x) {
            return y;
        }
        let src = self.src;
        let entries: Vec<(NameId, usize)> = src
            .entries(x)
            .iter()
            .map(|&(t, c)| (self.map(t), self.table[c as usize]))
            .collect();
        let y = self
            .dst
            .intern(entries)
            .expect("images are names over the target algebra");
        self.memo.insert(x, y);
        y
    }

    pub fn store(&self) -> &NameStore {
        &self.dst
    }

    pub fn store_mut(&mut self) -> &mut NameStore {
        &mut self.dst
    }

    pub fn into_store(self) -> NameStore {
        self.dst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generic::enumerate_generics;
    use crate::iteration::{build_iteration, IterationCaps, StepProvider};
    use crate::poset::find_isomorphism;

    pub(crate) fn a2_iteration(n: usize) -> Arc<Iteration> {
        Arc::new(
            build_iteration(
                StepProvider::constant(vec![Some(Poset::antichain(2)); n]),
                IterationCaps::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn first_quotient_is_the_step() {
        let it = a2_iteration(2);
        let g = &enumerate_generics(it.stage(1).poset()).unwrap()[0];
        let ctx = make_context(it.clone(), 1, g).unwrap();
        let q = ctx.level(2).unwrap().poset();
        assert!(find_isomorphism(q, &Poset::antichain(2)).is_some());
        // Conditions whose prefix is outside G have no image.
        let stage = it.stage(2);
        for (c, cond) in stage.conds().iter().enumerate() {
            assert_eq!(ctx.pi(2, c).is_some(), g.members().contains(cond.prev));
        }
    }

    #[test]
    fn identity_context_at_the_last_stage() {
        let it = a2_iteration(2);
        let g = &enumerate_generics(it.stage(2).poset()).unwrap()[1];
        let ctx = make_context(it, 2, g).unwrap();
        assert!(ctx.levels().is_empty());
        assert!(ctx.level(3).is_err());
    }

    #[test]
    fn deeper_quotients_match_the_tail_iteration() {
        let it = a2_iteration(3);
        for g in enumerate_generics(it.stage(1).poset()).unwrap() {
            let ctx = make_context(it.clone(), 1, &g).unwrap();
            assert_eq!(ctx.level(3).unwrap().poset().len(), 15);
        }
        let g = &enumerate_generics(it.stage(0).poset()).unwrap()[0];
        let ctx = make_context(it.clone(), 0, g).unwrap();
        assert!(find_isomorphism(ctx.level(3).unwrap().poset(), it.stage(3).poset()).is_some());
    }

    #[test]
    fn top_tail_projects_to_top() {
        let it = a2_iteration(2);
        let g = &enumerate_generics(it.stage(1).poset()).unwrap()[0];
        let ctx = make_context(it.clone(), 1, g).unwrap();
        let stage = it.stage(2);
        let top1 = it.stage(1).poset().top();
        let c = stage
            .find(&crate::iteration::Cond {
                prev: top1,
                tail: Tail::One,
            })
            .unwrap();
        assert_eq!(ctx.pi(2, c), Some(ctx.level(2).unwrap().poset().top()));
    }
}
