//! First-order formulas over `in` and `=` with name constants.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! formula  := or ( "->" formula )?
//! or       := and ( "|" and )*
//! and      := unary ( "&" unary )*
//! unary    := "!" unary | primary
//! primary  := "(" formula ")" | ("exists" | "forall") var "(" formula ")" | term ("in" | "=") term
//! term     := var | "$" digits
//! ```
//!
//! `forall v (f)` is stored as `!exists v (!f)` and printed back as `forall`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::names::HfSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("formula has free variables: {}", .0.join(", "))]
    Open(Vec<String>),
    #[error("variable `{0}` is bound in the formula")]
    BoundVariable(String),
    #[error("constant ${index} is outside a universe of {len} names")]
    ConstantOutOfRange { index: usize, len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// `$k`: the `k`-th name of the active universe.
    Const(usize),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(k) => write!(f, "${k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Member(Term, Term),
    Equal(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn member(a: Term, b: Term) -> Formula {
        Formula::Member(a, b)
    }

    pub fn equal(a: Term, b: Term) -> Formula {
        Formula::Equal(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::not(Formula::exists(v, Formula::not(f)))
    }

    /// Free variables in sorted order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let mut term = |t: &Term, bound: &Vec<String>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            };
            match f {
                Formula::Member(a, b) | Formula::Equal(a, b) => {
                    term(a, bound);
                    term(b, bound);
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, g) => {
                    bound.push(v.clone());
                    go(g, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Exists(v, _) = f {
                out.insert(v.clone());
            }
        });
        out
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| qf &= !matches!(f, Formula::Exists(..)));
        qf
    }

    /// Largest constant index used, if any.
    pub fn max_constant(&self) -> Option<usize> {
        let mut max = None;
        self.visit(&mut |f| {
            if let Formula::Member(a, b) | Formula::Equal(a, b) = f {
                for t in [a, b] {
                    if let Term::Const(k) = t {
                        max = max.max(Some(*k));
                    }
                }
            }
        });
        max
    }

    /// Nesting depth; atomic formulas have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Member(..) | Formula::Equal(..) => 1,
            Formula::Not(g) | Formula::Exists(_, g) => 1 + g.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Member(..) | Formula::Equal(..) => {}
            Formula::Not(g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Replaces the free occurrences of `var` by the constant `$k`.
    ///
    /// Fails when `var` is bound somewhere in the formula. Constants carry
    /// no variables, so no capture can happen otherwise.
    pub fn substitute(&self, var: &str, k: usize) -> Result<Formula, FormulaError> {
        if self.bound_vars().contains(var) {
            return Err(FormulaError::BoundVariable(var.to_string()));
        }
        Ok(self.map_terms(&|t| match t {
            Term::Var(v) if v == var => Term::Const(k),
            t => t.clone(),
        }))
    }

    /// Renumbers every constant through `f`.
    pub fn map_constants(&self, f: &impl Fn(usize) -> usize) -> Formula {
        self.map_terms(&|t| match t {
            Term::Const(k) => Term::Const(f(*k)),
            t => t.clone(),
        })
    }

    fn map_terms(&self, m: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Member(a, b) => Formula::Member(m(a), m(b)),
            Formula::Equal(a, b) => Formula::Equal(m(a), m(b)),
            Formula::Not(g) => Formula::not(g.map_terms(m)),
            Formula::And(a, b) => Formula::and(a.map_terms(m), b.map_terms(m)),
            Formula::Or(a, b) => Formula::or(a.map_terms(m), b.map_terms(m)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(m), b.map_terms(m)),
            Formula::Exists(v, g) => Formula::exists(v, g.map_terms(m)),
        }
    }

    /// Truth in the hereditarily finite structure `(domain, in)`, with
    /// quantifiers ranging over `domain` and `$k` denoting `constants[k]`.
    /// Free variables must be assigned in `env`.
    pub fn holds_in(
        &self,
        domain: &[HfSet],
        constants: &[HfSet],
        env: &mut Vec<(String, HfSet)>,
    ) -> Result<bool, FormulaError> {
        let value = |t: &Term, env: &Vec<(String, HfSet)>| -> Result<HfSet, FormulaError> {
            match t {
                Term::Const(k) => {
                    constants
                        .get(*k)
                        .cloned()
                        .ok_or(FormulaError::ConstantOutOfRange {
                            index: *k,
                            len: constants.len(),
                        })
                }
                Term::Var(v) => env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| x.clone())
                    .ok_or_else(|| FormulaError::Open(vec![v.clone()])),
            }
        };
        Ok(match self {
            Formula::Member(a, b) => {
                let x = value(a, env)?;
                value(b, env)?.contains(&x)
            }
            Formula::Equal(a, b) => value(a, env)? == value(b, env)?,
            Formula::Not(g) => !g.holds_in(domain, constants, env)?,
            Formula::And(a, b) => {
                a.holds_in(domain, constants, env)? && b.holds_in(domain, constants, env)?
            }
            Formula::Or(a, b) => {
                a.holds_in(domain, constants, env)? || b.holds_in(domain, constants, env)?
            }
            Formula::Implies(a, b) => {
                !a.holds_in(domain, constants, env)? || b.holds_in(domain, constants, env)?
            }
            Formula::Exists(v, g) => {
                let mut found = false;
                for x in domain {
                    env.push((v.clone(), x.clone()));
                    let r = g.holds_in(domain, constants, env);
                    env.pop();
                    if r? {
                        found = true;
                        break;
                    }
                }
                found
            }
        })
    }
}

/// Binding strength used by the printer.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 0,
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, g: &Formula, paren: bool| {
            if paren {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        match self {
            Formula::Member(a, b) => write!(f, "{a} in {b}"),
            Formula::Equal(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(g) => {
                if let Formula::Exists(v, body) = &**g {
                    if let Formula::Not(inner) = &**body {
                        return write!(f, "forall {v} ({inner})");
                    }
                }
                f.write_str("!")?;
                wrap(f, g, level(g) < 3)
            }
            Formula::And(a, b) => {
                wrap(f, a, level(a) < 2)?;
                f.write_str(" & ")?;
                wrap(f, b, level(b) <= 2)
            }
            Formula::Or(a, b) => {
                wrap(f, a, level(a) < 1)?;
                f.write_str(" | ")?;
                wrap(f, b, level(b) <= 1)
            }
            Formula::Implies(a, b) => {
                wrap(f, a, level(a) == 0)?;
                f.write_str(" -> ")?;
                wrap(f, b, false)
            }
            Formula::Exists(v, g) => write!(f, "exists {v} ({g})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(usize),
    In,
    Exists,
    Forall,
    LParen,
    RParen,
    Not,
    And,
    Or,
    Implies,
    Eq,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |offset: usize, message: &str| FormulaError::Syntax {
        offset,
        message: message.to_string(),
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'!' => out.push((Tok::Not, start)),
            b'&' => out.push((Tok::And, start)),
            b'|' => out.push((Tok::Or, start)),
            b'=' => out.push((Tok::Eq, start)),
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 1;
                    out.push((Tok::Implies, start));
                } else {
                    return Err(err(start, "expected `->`"));
                }
            }
            b'$' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let k = text[i + 1..j]
                    .parse()
                    .map_err(|_| err(start, "expected digits after `$`"))?;
                out.push((Tok::Const(k), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word {
                    "in" => Tok::In,
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    w => Tok::Ident(w.to_string()),
                };
                out.push((tok, start));
                i = j;
                continue;
            }
            _ => return Err(err(start, "unexpected character")),
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: &str) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            q @ (Tok::Exists | Tok::Forall) => {
                self.bump();
                let v = match self.bump() {
                    Tok::Ident(v) => v,
                    _ => {
                        self.pos -= 1;
                        return self.fail("expected a variable after quantifier");
                    }
                };
                self.expect(Tok::LParen, "`(` after quantified variable")?;
                let body = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if q == Tok::Exists {
                    Formula::exists(&v, body)
                } else {
                    Formula::forall(&v, body)
                })
            }
            _ => {
                let a = self.term()?;
                let f = match self.peek() {
                    Tok::In => {
                        self.bump();
                        Formula::Member(a, self.term()?)
                    }
                    Tok::Eq => {
                        self.bump();
                        Formula::Equal(a, self.term()?)
                    }
                    _ => return self.fail("expected `in` or `=`"),
                };
                Ok(f)
            }
        }
    }

    fn term(&mut self) -> Result<Term, FormulaError> {
        match self.peek().clone() {
            Tok::Ident(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Const(k) => {
                self.bump();
                Ok(Term::Const(k))
            }
            _ => self.fail("expected a variable or `$k` constant"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(f)
}

/// Parses and additionally reports every free variable as an error.
pub fn parse_closed_formula(text: &str) -> Result<Formula, FormulaError> {
    let f = parse_formula(text)?;
    let free = f.free_vars();
    if free.is_empty() {
        Ok(f)
    } else {
        Err(FormulaError::Open(free.into_iter().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> Term {
        Term::Var(s.into())
    }

    #[test]
    fn parses_atoms_and_quantifiers() {
        assert_eq!(
            parse_formula("x in y").unwrap(),
            Formula::Member(v("x"), v("y"))
        );
        let f = parse_formula("exists z (z in x & z in y)").unwrap();
        assert_eq!(
            f,
            Formula::exists(
                "z",
                Formula::and(
                    Formula::Member(v("z"), v("x")),
                    Formula::Member(v("z"), v("y"))
                )
            )
        );
        assert_eq!(
            parse_formula("forall z (z = z)").unwrap(),
            Formula::forall("z", Formula::Equal(v("z"), v("z")))
        );
    }

    #[test]
    fn reports_error_offsets() {
        assert_eq!(
            parse_formula("x in").unwrap_err(),
            FormulaError::Syntax {
                offset: 4,
                message: "expected a variable or `$k` constant".into()
            }
        );
        assert!(matches!(
            parse_formula("x in y )"),
            Err(FormulaError::Syntax { offset: 7, .. })
        ));
        assert!(matches!(
            parse_formula("x - y"),
            Err(FormulaError::Syntax { offset: 2, .. })
        ));
    }

    #[test]
    fn closed_mode_reports_unbound_variables() {
        assert_eq!(
            parse_closed_formula("x in y & exists z (z in x)").unwrap_err(),
            FormulaError::Open(vec!["x".into(), "y".into()])
        );
        assert!(parse_closed_formula("exists z ($0 in z)").is_ok());
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("a in b | c in d & !e in f -> g = h -> i = j").unwrap();
        assert_eq!(f.to_string(), "a in b | c in d & !e in f -> g = h -> i = j");
        match f {
            Formula::Implies(lhs, rhs) => {
                assert!(matches!(*lhs, Formula::Or(..)));
                assert!(matches!(*rhs, Formula::Implies(..)));
            }
            other => panic!("{other:?}"),
        }
        let g = parse_formula("(a in b -> c in d) -> e in f").unwrap();
        assert_eq!(g.to_string(), "(a in b -> c in d) -> e in f");
    }

    #[test]
    fn substitution() {
        let f = parse_formula("x in y").unwrap();
        assert_eq!(f.substitute("x", 3).unwrap().to_string(), "$3 in y");
        let closed = parse_formula("$0 in $1").unwrap();
        assert_eq!(closed.substitute("x", 5).unwrap(), closed);
        let bound = parse_formula("exists z (z in x)").unwrap();
        assert_eq!(
            bound.substitute("z", 0),
            Err(FormulaError::BoundVariable("z".into()))
        );
    }

    #[test]
    fn depth_counts_atoms_as_one() {
        assert_eq!(parse_formula("x in y").unwrap().depth(), 1);
        assert_eq!(parse_formula("!(x in y & y = x)").unwrap().depth(), 3);
    }

    #[test]
    fn hf_truth() {
        let e = HfSet::empty();
        let one = HfSet::from_elems(vec![e.clone()]);
        let domain = vec![e.clone(), one.clone()];
        let f = parse_formula("forall z (!z in x)").unwrap();
        let mut env = vec![("x".to_string(), e.clone())];
        assert!(f.holds_in(&domain, &[], &mut env).unwrap());
        let mut env = vec![("x".to_string(), one.clone())];
        assert!(!f.holds_in(&domain, &[], &mut env).unwrap());
        let g = parse_formula("$0 in $1").unwrap();
        assert!(g.holds_in(&domain, &[e, one], &mut Vec::new()).unwrap());
        assert!(matches!(
            g.holds_in(&domain, &[], &mut Vec::new()),
            Err(FormulaError::ConstantOutOfRange { index: 0, len: 0 })
        ));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            prop::sample::select(vec!["x", "y", "z"]).prop_map(|s| Term::Var(s.into())),
            (0usize..4).prop_map(Term::Const),
        ]
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Member(a, b)),
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Equal(a, b)),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (prop::sample::select(vec!["x", "y", "w"]), inner)
                    .prop_map(|(v, f)| Formula::exists(v, f)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_print_roundtrip(f in arb_formula()) {
            let text = f.to_string();
            let back = parse_formula(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
