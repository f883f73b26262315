//! Collapse posets of partial injections.

use crate::names::HfSet;
use crate::poset::Poset;

use super::IterationError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollapseParams {
    pub x: Vec<HfSet>,
    pub m: usize,
}

/// `Col(X, m)` together with the partial map behind every element.
#[derive(Debug, Clone)]
pub struct CollapsePoset {
    pub poset: Poset,
    /// `X` sorted and deduplicated.
    pub x: Vec<HfSet>,
    /// `maps[e]` lists `(index into x, value)` pairs sorted by index.
    pub maps: Vec<Vec<(usize, usize)>>,
}

/// `sum_k C(|X|, k) * m! / (m - k)!` over `k < m`.
pub fn collapse_count(x: usize, m: usize) -> u128 {
    let mut total = 0u128;
    for k in 0..m.min(x + 1) {
        let mut choose = 1u128;
        for i in 0..k {
            choose = choose * (x - i) as u128 / (i + 1) as u128;
        }
        let falling: u128 = (0..k).map(|i| (m - i) as u128).product();
        total += choose * falling;
    }
    total
}

/// Injective partial maps `X -> {0..m-1}` of size below `m`, ordered by
/// reverse inclusion, with the empty map on top.
pub fn collapse_poset(params: &CollapseParams) -> Result<CollapsePoset, IterationError> {
    if params.m == 0 {
        return Err(IterationError::InvalidCollapse);
    }
    let mut x = params.x.clone();
    x.sort();
    x.dedup();
    let mut maps: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut frontier = maps.clone();
    for _ in 1..params.m {
        let mut next = Vec::new();
        for f in &frontier {
            let start = f.last().map_or(0, |&(i, _)| i + 1);
            for i in start..x.len() {
                for v in 0..params.m {
                    if f.iter().all(|&(_, w)| w != v) {
                        let mut g = f.clone();
                        g.push((i, v));
                        next.push(g);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        maps.extend(next.iter().cloned());
        frontier = next;
    }
    if maps.len() > crate::bits::MAX_ELEMENTS {
        return Err(IterationError::Poset(crate::poset::PosetError::TooLarge(
            maps.len(),
        )));
    }
    let labels: Vec<String> = maps
        .iter()
        .map(|f| {
            let parts: Vec<String> = f.iter().map(|(i, v)| format!("{i}:{v}")).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let down = maps
        .iter()
        .map(|f| {
            maps.iter()
                .enumerate()
                .filter(|(_, g)| f.iter().all(|e| g.contains(e)))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let poset = Poset::from_down_sets(labels, down, 0)?;
    Ok(CollapsePoset { poset, x, maps })
}

impl CollapsePoset {
    /// The union of the maps of a set of elements, if it is a function.
    pub fn union_of(&self, elems: impl IntoIterator<Item = usize>) -> Option<Vec<(usize, usize)>> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for e in elems {
            for &(i, v) in &self.maps[e] {
                match out.iter().find(|&&(j, _)| j == i) {
                    Some(&(_, w)) if w != v => return None,
                    Some(_) => {}
                    None => out.push((i, v)),
                }
            }
        }
        out.sort();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(x: usize, m: usize) -> CollapseParams {
        CollapseParams {
            x: (0..x).map(HfSet::numeral).collect(),
            m,
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(collapse_poset(&params(2, 2)).unwrap().poset.len(), 5);
        assert_eq!(collapse_poset(&params(1, 1)).unwrap().poset.len(), 1);
        assert_eq!(collapse_poset(&params(2, 3)).unwrap().poset.len(), 13);
        assert_eq!(collapse_poset(&params(0, 3)).unwrap().poset.len(), 1);
        assert_eq!(collapse_count(2, 3), 13);
        assert!(matches!(
            collapse_poset(&params(1, 0)),
            Err(IterationError::InvalidCollapse)
        ));
    }

    #[test]
    fn collapses_are_separative_with_total_atoms() {
        let c = collapse_poset(&params(2, 3)).unwrap();
        assert!(c.poset.is_separative());
        for a in c.poset.minimal_elements().iter() {
            assert_eq!(c.maps[a].len(), 2);
        }
    }
}
