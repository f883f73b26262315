//! Regular-open algebras against a brute-force enumeration of regular cuts.

use forcinglab_core::poset::{posets_with_top, separative_posets};
use forcinglab_core::{ro_algebra, AlgebraLimits, Bits, Poset};

/// Every subset of `p` that is downward closed and equal to the set of
/// elements all of whose lower cones meet it only inside it, found without
/// the library's complement operator.
fn regular_cuts_by_brute_force(p: &Poset) -> Vec<Bits> {
    let n = p.len();
    let compatible = |a: usize, b: usize| (0..n).any(|r| p.leq(r, a) && p.leq(r, b));
    let neg = |s: &Bits| -> Bits {
        (0..n)
            .filter(|&a| s.iter().all(|b| !compatible(a, b)))
            .collect()
    };
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let s: Bits = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let closed = s
            .iter()
            .all(|a| (0..n).all(|b| !p.leq(b, a) || s.contains(b)));
        if closed && neg(&neg(&s)) == s {
            out.push(s);
        }
    }
    out
}

fn antichain_with_top(k: usize) -> Poset {
    if k == 1 {
        Poset::point()
    } else {
        Poset::antichain(k)
    }
}

#[test]
fn separative_algebras_have_exactly_the_brute_force_cuts() {
    for p in separative_posets(5) {
        let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
        let mut brute = regular_cuts_by_brute_force(&p);
        let mut ours: Vec<Bits> = (0..alg.len()).map(|a| alg.cut_members(a)).collect();
        brute.sort();
        ours.sort();
        assert_eq!(ours, brute, "poset {:?}", p.labels());
    }
}

#[test]
fn law_suite_passes_on_small_separative_posets() {
    for p in separative_posets(5) {
        let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
        let r = alg.law_report();
        assert!(r.passed(), "{:?}: {:?}", p.labels(), r.violations);
        for a in 0..p.len() {
            for b in 0..p.len() {
                assert_eq!(p.leq(a, b), alg.leq(alg.principal(a), alg.principal(b)));
            }
        }
    }
}

#[test]
fn antichain_algebras_have_two_to_the_k_elements() {
    for k in 1..=4 {
        let p = antichain_with_top(k);
        let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
        assert_eq!(alg.len(), 1 << k);
        assert_eq!(regular_cuts_by_brute_force(&p).len(), 1 << k);
    }
}

#[test]
fn non_separative_posets_share_the_algebra_of_their_quotient() {
    for p in posets_with_top(5) {
        let alg = ro_algebra(&p, AlgebraLimits::default()).unwrap();
        let (q, _) = p.separative_quotient();
        assert_eq!(alg.len(), regular_cuts_by_brute_force(&q).len());
        // Regular cuts of the original correspond to those of the quotient.
        assert_eq!(regular_cuts_by_brute_force(&p).len(), alg.len());
    }
}
