use crate::bits::Bits;
use crate::names::{evaluate, NameStore};

use super::{normalize_tail, Cond, Iteration, IterationError, Tail};

/// A raw successor coordinate, before identification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawCoord {
    One,
    /// The same step-poset element id under every generic.
    Const(usize),
    /// Element ids per minimal element below the prefix, in id order.
    Fun(Vec<usize>),
    /// A name literal over the previous stage's algebra; under each generic
    /// it must evaluate to the von Neumann numeral of an element id.
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalCondition {
    /// Number of coordinates left after trimming trailing ones.
    pub length: usize,
    /// The condition at stage `length`.
    pub id: usize,
    /// The same condition padded with ones to the final stage.
    pub final_id: usize,
}

/// Maps a raw coordinate sequence to its canonical condition: missing and
/// trailing coordinates read as `1`, tails naming the top everywhere become
/// `1`, and tails agreeing under every generic become equal.
pub fn canonicalize_condition(
    iteration: &Iteration,
    coords: &[RawCoord],
) -> Result<CanonicalCondition, IterationError> {
    let n = iteration.steps();
    if coords.len() > n {
        return Err(IterationError::ConditionTooLong {
            len: coords.len(),
            stages: n,
        });
    }
    let mut c = 0;
    let mut ids = vec![0];
    for k in 0..n {
        let raw = coords.get(k).unwrap_or(&RawCoord::One);
        let tail = resolve(iteration, k, c, raw)
            .map_err(|reason| IterationError::BadCoordinate { coord: k, reason })?;
        c = iteration.stages[k + 1]
            .find(&Cond { prev: c, tail })
            .expect("every resolved pair is a condition");
        ids.push(c);
    }
    let length = (0..=n)
        .rev()
        .find(|&m| m == 0 || iteration.stages[m].conds[ids[m]].tail != Tail::One)
        .unwrap_or(0);
    Ok(CanonicalCondition {
        length,
        id: ids[length],
        final_id: c,
    })
}

fn resolve(it: &Iteration, k: usize, prefix: usize, raw: &RawCoord) -> Result<Tail, String> {
    let prev = &it.stages[k];
    let below = prev.atoms_below(prefix);
    let vals: Vec<usize> = match raw {
        RawCoord::One => return Ok(Tail::One),
        RawCoord::Const(e) => vec![*e; below.len()],
        RawCoord::Fun(v) => {
            if v.len() != below.len() {
                return Err(format!(
                    "{} values for {} generics below the prefix",
                    v.len(),
                    below.len()
                ));
            }
            v.clone()
        }
        RawCoord::Name(text) => {
            let alg = prev.algebra();
            let mut store = NameStore::new(&alg);
            let x = store.parse_literal(text).map_err(|e| e.to_string())?;
            below
                .iter()
                .map(|&g| {
                    let filter: Bits = prev.poset.up(g).iter().map(|p| alg.to_base()[p]).collect();
                    let v = evaluate(&alg, &store, x, filter);
                    v.as_numeral()
                        .ok_or_else(|| format!("name evaluates to {v}, not a numeral"))
                })
                .collect::<Result<_, _>>()?
        }
    };
    for (&g, &v) in below.iter().zip(&vals) {
        match prev.step(g) {
            None => return Err(format!("no step poset under generic {g}")),
            Some(q) if v >= q.len() => {
                return Err(format!(
                    "element {v} outside a step poset of size {}",
                    q.len()
                ))
            }
            Some(_) => {}
        }
    }
    Ok(normalize_tail(prev, &below, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::{build_iteration, IterationCaps, StepProvider};
    use crate::poset::Poset;

    fn it() -> Iteration {
        build_iteration(
            StepProvider::constant(vec![Some(Poset::antichain(2)), Some(Poset::antichain(2))]),
            IterationCaps::default(),
        )
        .unwrap()
    }

    #[test]
    fn trailing_ones_are_trimmed() {
        let it = it();
        let c = canonicalize_condition(&it, &[RawCoord::Const(0), RawCoord::One]).unwrap();
        assert_eq!(c.length, 1);
        assert_eq!(it.stage(1).poset().label(c.id), "1|a0");
        let d = canonicalize_condition(&it, &[RawCoord::Const(0)]).unwrap();
        assert_eq!(c, d);
        let t = canonicalize_condition(&it, &[]).unwrap();
        assert_eq!((t.length, t.final_id), (0, it.final_stage().poset().top()));
    }

    #[test]
    fn top_tails_become_one() {
        let it = it();
        let c = canonicalize_condition(&it, &[RawCoord::Const(2)]).unwrap();
        assert_eq!(c.length, 0);
        let top = RawCoord::Name("{({}, 3), ({({}, 3)}, 3)}".into());
        let n = canonicalize_condition(&it, &[RawCoord::One, top]).unwrap();
        assert_eq!(n.length, 0);
    }

    #[test]
    fn names_agreeing_under_every_generic_coincide() {
        let it = it();
        // Second coordinate, over the first stage: under the generic of atom
        // 0 (mask 1) the name is 1, under atom 1 it is 0.
        let a = RawCoord::Name("{({}, 1)}".into());
        let b = RawCoord::Name("{({}, 1), ({({}, 3)}, 0)}".into());
        let f = RawCoord::Fun(vec![1, 0]);
        let ca = canonicalize_condition(&it, &[RawCoord::One, a]).unwrap();
        assert_eq!(
            ca,
            canonicalize_condition(&it, &[RawCoord::One, b]).unwrap()
        );
        assert_eq!(
            ca,
            canonicalize_condition(&it, &[RawCoord::One, f]).unwrap()
        );
        assert_eq!(ca.length, 2);
    }

    #[test]
    fn bad_coordinates_are_reported() {
        let it = it();
        assert!(matches!(
            canonicalize_condition(&it, &[RawCoord::Const(7)]),
            Err(IterationError::BadCoordinate { coord: 0, .. })
        ));
        assert!(matches!(
            canonicalize_condition(&it, &[RawCoord::One, RawCoord::One, RawCoord::One]),
            Err(IterationError::ConditionTooLong { .. })
        ));
    }
}
