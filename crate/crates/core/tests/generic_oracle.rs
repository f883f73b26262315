//! Generic filters against brute force over all subsets.

use forcinglab_core::poset::posets_with_top;
use forcinglab_core::{enumerate_generics, Bits, Poset};

fn subsets(n: usize) -> impl Iterator<Item = Bits> {
    (0u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn is_filter(p: &Poset, s: &Bits) -> bool {
    let n = p.len();
    s.contains(p.top())
        && s.iter()
            .all(|a| (0..n).all(|b| !p.leq(a, b) || s.contains(b)))
        && s.iter().all(|a| {
            s.iter()
                .all(|b| s.iter().any(|c| p.leq(c, a) && p.leq(c, b)))
        })
}

fn is_dense(p: &Poset, d: &Bits) -> bool {
    (0..p.len()).all(|q| d.iter().any(|r| p.leq(r, q)))
}

#[test]
fn generics_are_the_filters_meeting_every_dense_set() {
    for p in posets_with_top(5) {
        let dense: Vec<Bits> = subsets(p.len()).filter(|d| is_dense(&p, d)).collect();
        let mut brute: Vec<Bits> = subsets(p.len())
            .filter(|s| is_filter(&p, s) && dense.iter().all(|d| d.intersects(s)))
            .collect();
        let mut ours: Vec<Bits> = enumerate_generics(&p)
            .unwrap()
            .iter()
            .map(|g| *g.members())
            .collect();
        brute.sort();
        ours.sort();
        assert_eq!(ours, brute, "{:?}", p.labels());
    }
}
