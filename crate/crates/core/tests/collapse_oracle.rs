//! Collapse posets against brute-force enumeration of partial injections.

use std::collections::BTreeSet;

use forcinglab_core::iteration::{collapse_count, collapse_poset, CollapseParams};
use forcinglab_core::HfSet;

/// Every subset of `X x m` that is a function, injective, and smaller than
/// `m`, found by scanning all relations.
fn injections_by_brute_force(x: usize, m: usize) -> BTreeSet<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..x).flat_map(|i| (0..m).map(move |v| (i, v))).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << cells.len()) {
        let rel: Vec<(usize, usize)> = cells
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let function = rel
            .iter()
            .all(|a| rel.iter().filter(|b| b.0 == a.0).count() == 1);
        let injective = rel
            .iter()
            .all(|a| rel.iter().filter(|b| b.1 == a.1).count() == 1);
        if function && injective && rel.len() < m {
            out.insert(rel);
        }
    }
    out
}

#[test]
fn counts_and_members_match_brute_force() {
    for x in 0..=3 {
        for m in 1..=4 {
            let brute = injections_by_brute_force(x, m);
            let params = CollapseParams {
                x: (0..x).map(HfSet::numeral).collect(),
                m,
            };
            let col = collapse_poset(&params).unwrap();
            let ours: BTreeSet<Vec<(usize, usize)>> = col.maps.iter().cloned().collect();
            assert_eq!(ours, brute, "|X| = {x}, m = {m}");
            assert_eq!(col.poset.len(), brute.len());
            assert_eq!(collapse_count(x, m), brute.len() as u128);
            // Reverse inclusion.
            for (a, f) in col.maps.iter().enumerate() {
                for (b, g) in col.maps.iter().enumerate() {
                    let sub = g.iter().all(|e| f.contains(e));
                    assert_eq!(col.poset.leq(a, b), sub);
                }
            }
        }
    }
}

#[test]
fn known_counts() {
    assert_eq!(collapse_count(2, 2), 5);
    assert_eq!(collapse_count(2, 3), 13);
}

#[test]
fn atoms_are_total_injections_below_the_bound() {
    for x in 0..=3 {
        for m in x + 1..=4 {
            let params = CollapseParams {
                x: (0..x).map(HfSet::numeral).collect(),
                m,
            };
            let col = collapse_poset(&params).unwrap();
            for a in col.poset.minimal_elements().iter() {
                assert_eq!(col.maps[a].len(), x);
            }
        }
    }
}
