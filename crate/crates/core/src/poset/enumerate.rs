//! Isomorphism machinery and exhaustive generation of small posets.

use std::collections::{BTreeMap, BTreeSet};

use crate::bits::Bits;

use super::Poset;

/// Isomorphism-invariant code of a poset: the lexicographically least
/// comparability matrix over all colour-respecting orderings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    code: Vec<u8>,
}

/// Iterated colour refinement over several posets at once, so that equal
/// colours in different posets mean the same thing.
fn refine(posets: &[&Poset]) -> Vec<Vec<u32>> {
    let mut colors: Vec<Vec<u32>> = posets
        .iter()
        .map(|p| (0..p.len()).map(|_| 0).collect())
        .collect();
    let mut classes = 0usize;
    loop {
        let sigs: Vec<Vec<(u32, usize, usize, Vec<u32>, Vec<u32>)>> = posets
            .iter()
            .zip(&colors)
            .map(|(p, col)| {
                (0..p.len())
                    .map(|e| {
                        let mut dn: Vec<u32> = p
                            .down(e)
                            .iter()
                            .filter(|&x| x != e)
                            .map(|x| col[x])
                            .collect();
                        let mut up: Vec<u32> =
                            p.up(e).iter().filter(|&x| x != e).map(|x| col[x]).collect();
                        dn.sort_unstable();
                        up.sort_unstable();
                        (col[e], p.down(e).len(), p.up(e).len(), dn, up)
                    })
                    .collect()
            })
            .collect();
        let distinct: BTreeSet<_> = sigs.iter().flatten().cloned().collect();
        let rank: BTreeMap<_, u32> = distinct
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i as u32))
            .collect();
        colors = sigs
            .iter()
            .map(|row| row.iter().map(|s| rank[s]).collect())
            .collect();
        if rank.len() == classes {
            return colors;
        }
        classes = rank.len();
    }
}

/// Search order: minimal elements first, each followed by the elements
/// whose atoms are then all placed. Dense comparabilities early make the
/// consistency test prune hard, and in a separative poset every
/// non-minimal element is pinned by its atoms.
fn search_order(p: &Poset, colors: &[u32]) -> Vec<usize> {
    let atoms = p.minimal_elements();
    let mut atom_list: Vec<usize> = atoms.iter().collect();
    atom_list.sort_by_key(|&a| (colors[a], a));
    let mut rest: Vec<usize> = (0..p.len()).filter(|&e| !atoms.contains(e)).collect();
    rest.sort_by_key(|&e| (p.down(e).len(), colors[e], e));
    let mut order = Vec::with_capacity(p.len());
    let mut placed = Bits::empty();
    let mut used = Bits::empty();
    for a in atom_list {
        order.push(a);
        placed.insert(a);
        used.insert(a);
        for &e in &rest {
            if !used.contains(e) && p.atoms_below(e).is_subset(&placed) {
                order.push(e);
                used.insert(e);
            }
        }
    }
    order
}

/// Backtracking over colour-preserving, order-preserving-and-reflecting
/// injections `a -> b`. `visit` returns `false` to stop the search.
fn search_isomorphisms(a: &Poset, b: &Poset, mut visit: impl FnMut(&[usize]) -> bool) {
    if a.len() != b.len() {
        return;
    }
    let colors = refine(&[a, b]);
    let (ca, cb) = (&colors[0], &colors[1]);
    let mut hist_a = ca.clone();
    let mut hist_b = cb.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return;
    }
    let order = search_order(a, ca);
    let mut map = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    fn go(
        depth: usize,
        order: &[usize],
        a: &Poset,
        b: &Poset,
        ca: &[u32],
        cb: &[u32],
        map: &mut [usize],
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == order.len() {
            return visit(map);
        }
        let e = order[depth];
        for f in 0..b.len() {
            if used[f] || ca[e] != cb[f] {
                continue;
            }
            let consistent = order[..depth].iter().all(|&x| {
                let y = map[x];
                a.leq(x, e) == b.leq(y, f) && a.leq(e, x) == b.leq(f, y)
            });
            if !consistent {
                continue;
            }
            map[e] = f;
            used[f] = true;
            let go_on = go(depth + 1, order, a, b, ca, cb, map, used, visit);
            used[f] = false;
            map[e] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
    go(0, &order, a, b, ca, cb, &mut map, &mut used, &mut visit);
}

/// An order isomorphism `a -> b` as an element map, if one exists.
pub fn find_isomorphism(a: &Poset, b: &Poset) -> Option<Vec<usize>> {
    let mut found = None;
    search_isomorphisms(a, b, |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

/// Every automorphism of `p`, identity first.
pub fn automorphisms(p: &Poset) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    search_isomorphisms(p, p, |m| {
        out.push(m.to_vec());
        true
    });
    out.sort();
    out
}

pub fn canonical_form(p: &Poset) -> CanonicalForm {
    let colors = refine(&[p]).remove(0);
    let n = p.len();
    let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for e in 0..n {
        cells.entry(colors[e]).or_default().push(e);
    }
    let slots: Vec<u32> = cells
        .iter()
        .flat_map(|(&c, v)| std::iter::repeat_n(c, v.len()))
        .collect();
    let mut best: Option<Vec<u8>> = None;
    let mut placed = Vec::with_capacity(n);
    let mut code = Vec::with_capacity(n * n);
    let mut used = vec![false; n];

    // `tied` is true while the current prefix equals the best code so far.
    #[allow(clippy::too_many_arguments)]
    fn go(
        p: &Poset,
        colors: &[u32],
        slots: &[u32],
        placed: &mut Vec<usize>,
        code: &mut Vec<u8>,
        used: &mut [bool],
        best: &mut Option<Vec<u8>>,
        tied: bool,
    ) {
        let k = placed.len();
        if k == slots.len() {
            if best.as_ref().is_none_or(|b| *code < *b) {
                *best = Some(code.clone());
            }
            return;
        }
        for e in 0..p.len() {
            if used[e] || colors[e] != slots[k] {
                continue;
            }
            let mark = code.len();
            for &x in placed.iter() {
                code.push(p.leq(x, e) as u8);
                code.push(p.leq(e, x) as u8);
            }
            let mut still_tied = tied;
            let mut prune = false;
            if tied {
                if let Some(b) = best.as_ref() {
                    match code[mark..].cmp(&b[mark..code.len()]) {
                        std::cmp::Ordering::Greater => prune = true,
                        std::cmp::Ordering::Less => still_tied = false,
                        std::cmp::Ordering::Equal => {}
                    }
                } else {
                    still_tied = false;
                }
            }
            if !prune {
                used[e] = true;
                placed.push(e);
                go(p, colors, slots, placed, code, used, best, still_tied);
                placed.pop();
                used[e] = false;
            }
            code.truncate(mark);
        }
    }
    go(
        p,
        &colors,
        &slots,
        &mut placed,
        &mut code,
        &mut used,
        &mut best,
        true,
    );
    let mut out = vec![n as u8];
    out.extend(slots.iter().map(|&c| c as u8));
    out.extend(best.unwrap_or_default());
    CanonicalForm { code: out }
}

/// One representative of every isomorphism class of posets with a top
/// element and at most `max_elements` elements, smallest first.
pub fn posets_with_top(max_elements: usize) -> Vec<Poset> {
    let mut out = Vec::new();
    for n in 1..=max_elements {
        let mut seen = BTreeSet::new();
        let mut downs: Vec<Bits> = Vec::new();
        natural_posets(n - 1, &mut downs, &mut |downs| {
            let mut all: Vec<Bits> = downs.to_vec();
            all.push(Bits::full(n));
            let labels = (0..n)
                .map(|i| {
                    if i + 1 == n {
                        "1".to_string()
                    } else {
                        format!("e{i}")
                    }
                })
                .collect();
            let p = Poset::from_down_sets(labels, all, n - 1).expect("generated poset");
            if seen.insert(canonical_form(&p)) {
                out.push(p);
            }
        });
    }
    out
}

pub fn separative_posets(max_elements: usize) -> Vec<Poset> {
    posets_with_top(max_elements)
        .into_iter()
        .filter(Poset::is_separative)
        .collect()
}

/// Every naturally labelled poset on `k` elements (`i <= j` implies `i` before
/// `j`), given as reflexive down sets.
fn natural_posets(k: usize, downs: &mut Vec<Bits>, emit: &mut dyn FnMut(&[Bits])) {
    let i = downs.len();
    if i == k {
        emit(downs);
        return;
    }
    for mask in 0u64..(1u64 << i) {
        let strict: Bits = (0..i).filter(|&j| mask >> j & 1 == 1).collect();
        if strict.iter().all(|j| downs[j].is_subset(&strict)) {
            let mut d = strict;
            d.insert(i);
            downs.push(d);
            natural_posets(k, downs, emit);
            downs.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        // Partial sums of the unlabelled poset counts 1, 1, 2, 5, 16, 63 (one fewer element, no top).
        let counts: Vec<usize> = (1..=6).map(|n| posets_with_top(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 9, 25, 88]);
    }

    #[test]
    fn separative_counts() {
        let sep = separative_posets(5);
        // point, 2 and 3 and 4 atoms under a top, and {a,b} joined below the top
        assert_eq!(sep.len(), 5);
        assert!(sep.iter().all(Poset::is_separative));
    }

    #[test]
    fn isomorphism_found_between_relabellings() {
        let a = Poset::antichain(3);
        let labels: Vec<String> = ["1", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let b = Poset::from_relation(labels, &[(1, 0), (2, 0), (3, 0)], 0).unwrap();
        let m = find_isomorphism(&a, &b).unwrap();
        assert_eq!(m[3], 0);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_eq!(automorphisms(&a).len(), 6);
    }

    #[test]
    fn non_isomorphic_posets_are_distinguished() {
        let a = Poset::antichain(2);
        let labels: Vec<String> = ["1", "a", "b"].iter().map(|s| s.to_string()).collect();
        let chain = Poset::from_relation(labels, &[(2, 1), (1, 0)], 0).unwrap();
        assert!(find_isomorphism(&a, &chain).is_none());
        assert_ne!(canonical_form(&a), canonical_form(&chain));
    }

    #[test]
    fn large_product_isomorphism() {
        let a2 = Poset::antichain(2);
        let a3 = Poset::antichain(3);
        let (p, _) = Poset::product(&[&a2, &a3, &a2]).unwrap();
        let (q, _) = Poset::product(&[&a3, &a2, &a2]).unwrap();
        assert!(find_isomorphism(&p, &q).is_some());
        let (r, _) = Poset::product(&[&a3, &a3]).unwrap();
        assert!(find_isomorphism(&p, &r).is_none());
    }
}
