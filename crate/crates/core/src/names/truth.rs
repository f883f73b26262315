//! Boolean truth values of formulas about names.

use std::collections::HashMap;

use crate::boolalg::BoolAlgebra;
use crate::formula::{Formula, Term};

use super::{NameError, NameId, NameStore};

/// Memoized truth values over one store.
///
/// Atomic values follow the recursive clauses
/// `||x in y|| = sum over t in dom y of ||t = x|| * y(t)` and
/// `||x = y|| = prod over t in dom x of (-x(t) + ||t in y||)`
/// `* prod over t in dom y of (-y(t) + ||t in x||)`, memoized by name pair.
/// Each recursive call lowers the rank of one side, so it terminates.
pub struct TruthSession<'a> {
    algebra: &'a BoolAlgebra,
    store: &'a NameStore,
    member: HashMap<(NameId, NameId), u32>,
    equal: HashMap<(NameId, NameId), u32>,
}

impl<'a> TruthSession<'a> {
    pub fn new(algebra: &'a BoolAlgebra, store: &'a NameStore) -> Result<Self, NameError> {
        store.check_algebra(algebra)?;
        Ok(TruthSession {
            algebra,
            store,
            member: HashMap::new(),
            equal: HashMap::new(),
        })
    }

    pub fn algebra(&self) -> &BoolAlgebra {
        self.algebra
    }

    /// `||x in y||`
    pub fn member(&mut self, x: NameId, y: NameId) -> usize {
        if let Some(&v) = self.member.get(&(x, y)) {
            return v as usize;
        }
        let store = self.store;
        let mut acc = self.algebra.zero();
        for &(t, c) in store.entries(y) {
            if acc == self.algebra.one() {
                break;
            }
            let e = self.equal(t, x);
            acc = self.algebra.join(acc, self.algebra.meet(e, c as usize));
        }
        self.member.insert((x, y), acc as u32);
        acc
    }

    /// `||x = y||`
    pub fn equal(&mut self, x: NameId, y: NameId) -> usize {
        if x == y {
            return self.algebra.one();
        }
        let key = (x.min(y), x.max(y));
        if let Some(&v) = self.equal.get(&key) {
            return v as usize;
        }
        let store = self.store;
        let alg = self.algebra;
        let mut acc = alg.one();
        for (a, b) in [(x, y), (y, x)] {
            for &(t, c) in store.entries(a) {
                if acc == alg.zero() {
                    break;
                }
                let m = self.member(t, b);
                acc = alg.meet(acc, alg.join(alg.complement(c as usize), m));
            }
        }
        self.equal.insert(key, acc as u32);
        acc
    }

    /// `||f||` with `$k` read as `constants[k]` and quantifiers over `domain`.
    pub fn value(
        &mut self,
        f: &Formula,
        constants: &[NameId],
        domain: &[NameId],
    ) -> Result<usize, NameError> {
        let mut env = Vec::new();
        self.value_in(f, constants, domain, &mut env)
    }

    /// As [`TruthSession::value`], with free variables bound by `env`.
    pub fn value_in(
        &mut self,
        f: &Formula,
        constants: &[NameId],
        domain: &[NameId],
        env: &mut Vec<(String, NameId)>,
    ) -> Result<usize, NameError> {
        let term = |t: &Term, env: &Vec<(String, NameId)>| -> Result<NameId, NameError> {
            match t {
                Term::Const(k) => constants
                    .get(*k)
                    .copied()
                    .ok_or(NameError::ConstantOutOfRange {
                        index: *k,
                        len: constants.len(),
                    }),
                Term::Var(v) => env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|&(_, x)| x)
                    .ok_or_else(|| NameError::Open(vec![v.clone()])),
            }
        };
        let alg = self.algebra;
        Ok(match f {
            Formula::Member(a, b) => {
                let (a, b) = (term(a, env)?, term(b, env)?);
                self.member(a, b)
            }
            Formula::Equal(a, b) => {
                let (a, b) = (term(a, env)?, term(b, env)?);
                self.equal(a, b)
            }
            Formula::Not(g) => alg.complement(self.value_in(g, constants, domain, env)?),
            Formula::And(a, b) => {
                let x = self.value_in(a, constants, domain, env)?;
                alg.meet(x, self.value_in(b, constants, domain, env)?)
            }
            Formula::Or(a, b) => {
                let x = self.value_in(a, constants, domain, env)?;
                alg.join(x, self.value_in(b, constants, domain, env)?)
            }
            Formula::Implies(a, b) => {
                let x = self.value_in(a, constants, domain, env)?;
                alg.join(alg.complement(x), self.value_in(b, constants, domain, env)?)
            }
            Formula::Exists(v, g) => {
                let mut acc = alg.zero();
                for &x in domain {
                    env.push((v.clone(), x));
                    let r = self.value_in(g, constants, domain, env);
                    env.pop();
                    acc = alg.join(acc, r?);
                    if acc == alg.one() {
                        break;
                    }
                }
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolalg::{ro_algebra, AlgebraLimits};
    use crate::formula::parse_formula;
    use crate::names::{HfSet, EMPTY_NAME};
    use crate::poset::Poset;

    #[test]
    fn reflexive_equality_of_check_names() {
        let alg = ro_algebra(&Poset::antichain(2), AlgebraLimits::default()).unwrap();
        let mut store = NameStore::new(&alg);
        let xs: Vec<NameId> = (0..4)
            .map(|n| store.check_name(&HfSet::numeral(n)))
            .collect();
        let mut s = TruthSession::new(&alg, &store).unwrap();
        let f = parse_formula("$0 = $0").unwrap();
        for &x in &xs {
            assert_eq!(s.value(&f, &[x], &xs).unwrap(), alg.one());
        }
        assert_eq!(s.equal(xs[1], xs[2]), alg.zero());
        assert_eq!(s.member(xs[1], xs[2]), alg.one());
    }

    #[test]
    fn antichain_name_values() {
        let alg = ro_algebra(&Poset::antichain(2), AlgebraLimits::default()).unwrap();
        let mut store = NameStore::new(&alg);
        let ua = alg.principal(0);
        let ub = alg.principal(1);
        let y = store.intern([(EMPTY_NAME, ua)]).unwrap();
        let mut s = TruthSession::new(&alg, &store).unwrap();
        assert_eq!(s.member(EMPTY_NAME, y), ua);
        assert_eq!(s.equal(y, EMPTY_NAME), ub);
        let ex = parse_formula("exists z (z in $0)").unwrap();
        assert_eq!(s.value(&ex, &[y], &[EMPTY_NAME, y]).unwrap(), ua);
        let open = parse_formula("z in $0").unwrap();
        assert_eq!(
            s.value(&open, &[y], &[]),
            Err(NameError::Open(vec!["z".into()]))
        );
        assert!(matches!(
            s.value(&open, &[], &[]),
            Err(NameError::ConstantOutOfRange { .. }) | Err(NameError::Open(_))
        ));
    }
}
