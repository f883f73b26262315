//! Instance generation: named step posets and provider trees.
//!
//! A provider over at most `n` stages is a tree. The root names the step
//! poset `Q_0` (or `U` for undefined); below a node naming `Q` there is one
//! subtree per minimal element of `Q`, read as the choice made under the
//! generics extending that element. An undefined node has a single subtree.
//! Trees differing by an automorphism of some `Q` give isomorphic
//! iterations, so the generator keeps one tree per orbit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use forcinglab_core::iteration::NO_STEP;
use forcinglab_core::poset::{automorphisms, separative_posets};
use forcinglab_core::{Poset, StepProvider};
use thiserror::Error;

use crate::config::MAX_POSET_CAP;

/// Providers a single run may generate.
pub const CENSUS_CAP: u128 = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("unknown step poset `{0}`")]
    UnknownPoset(String),
    #[error("step poset name `{0}` is already taken")]
    DuplicateName(String),
    #[error("`{name}`: {message}")]
    BadPoset { name: String, message: String },
    #[error("provider code `{code}`: {message}")]
    BadCode { code: String, message: String },
    #[error("node `{name}` has {got} subtrees, expected {expected}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("subtrees have different depths")]
    Ragged,
    #[error("the bounds generate {0} providers, above the cap {CENSUS_CAP}")]
    TooLarge(u128),
}

/// Step posets by name. The standard names are `P` for the point, `A<k>`
/// for `k` pairwise incompatible elements below a top, and `S<n><letter>`
/// for the other separative posets with `n` elements in generation order.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: BTreeMap<String, Arc<Poset>>,
    /// Standard posets in generation order.
    standard: Vec<String>,
}

impl Catalog {
    pub fn standard() -> Catalog {
        let mut entries = BTreeMap::new();
        let mut standard = Vec::new();
        let mut letters: BTreeMap<usize, u8> = BTreeMap::new();
        for p in separative_posets(MAX_POSET_CAP) {
            let n = p.len();
            let atoms = p.minimal_elements().len();
            let name = if n == 1 {
                "P".to_string()
            } else if atoms == n - 1 {
                format!("A{atoms}")
            } else {
                let l = letters.entry(n).or_insert(b'a');
                let name = format!("S{n}{}", *l as char);
                *l += 1;
                name
            };
            standard.push(name.clone());
            entries.insert(name, Arc::new(p));
        }
        Catalog { entries, standard }
    }

    pub fn get(&self, name: &str) -> Result<&Arc<Poset>, CensusError> {
        self.entries
            .get(name)
            .ok_or_else(|| CensusError::UnknownPoset(name.to_string()))
    }

    /// Adds a user poset. It must be separative; `U` is reserved.
    pub fn insert(&mut self, name: &str, poset: Poset) -> Result<(), CensusError> {
        if name == "U" || self.entries.contains_key(name) {
            return Err(CensusError::DuplicateName(name.to_string()));
        }
        if !valid_name(name) {
            return Err(CensusError::BadPoset {
                name: name.into(),
                message: "names are letters and digits, starting with a letter".into(),
            });
        }
        if let Some((p, q)) = poset.separativity_violation() {
            return Err(CensusError::BadPoset {
                name: name.into(),
                message: format!(
                    "not separative at `{}` and `{}`",
                    poset.label(p),
                    poset.label(q)
                ),
            });
        }
        self.entries.insert(name.to_string(), Arc::new(poset));
        Ok(())
    }

    /// Standard step posets with at most `max_poset` elements.
    pub fn targets(&self, max_poset: usize) -> Vec<&str> {
        self.standard
            .iter()
            .filter(|n| self.entries[*n].len() <= max_poset)
            .map(String::as_str)
            .collect()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    /// Step poset name; `None` is undefined.
    pub step: Option<String>,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(step: Option<&str>) -> Tree {
        Tree {
            step: step.map(str::to_string),
            children: Vec::new(),
        }
    }

    /// Number of stages the tree describes.
    pub fn depth(&self) -> usize {
        1 + self.children.first().map_or(0, Tree::depth)
    }

    /// Checks arities against the catalog and that all leaves share a depth.
    pub fn validate(&self, catalog: &Catalog) -> Result<(), CensusError> {
        if !self.children.is_empty() {
            let expected = match &self.step {
                Some(name) => catalog.get(name)?.minimal_elements().len(),
                None => 1,
            };
            if self.children.len() != expected {
                return Err(CensusError::Arity {
                    name: self.step.clone().unwrap_or_else(|| "U".into()),
                    expected,
                    got: self.children.len(),
                });
            }
            let d = self.children[0].depth();
            if self.children.iter().any(|c| c.depth() != d) {
                return Err(CensusError::Ragged);
            }
            for c in &self.children {
                c.validate(catalog)?;
            }
        } else if let Some(name) = &self.step {
            catalog.get(name)?;
        }
        Ok(())
    }

    /// The provider reading the tree along generic paths.
    pub fn provider(&self, catalog: &Catalog) -> Result<StepProvider, CensusError> {
        self.validate(catalog)?;
        let resolved = Arc::new(Resolved::new(self, catalog)?);
        Ok(StepProvider::new(
            self.depth(),
            self.to_string(),
            move |k, path| resolved.at(k, path),
        ))
    }

    pub fn parse(code: &str) -> Result<Tree, CensusError> {
        let bad = |message: &str| CensusError::BadCode {
            code: code.into(),
            message: message.into(),
        };
        let bytes = code.as_bytes();
        let mut pos = 0;
        let tree = parse_node(bytes, &mut pos).ok_or_else(|| bad("malformed"))?;
        if pos != bytes.len() {
            return Err(bad("trailing input"));
        }
        Ok(tree)
    }
}

fn parse_node(s: &[u8], pos: &mut usize) -> Option<Tree> {
    let start = *pos;
    while *pos < s.len() && s[*pos].is_ascii_alphanumeric() {
        *pos += 1;
    }
    let name = std::str::from_utf8(&s[start..*pos]).ok()?;
    if name.is_empty() {
        return None;
    }
    let mut tree = Tree::leaf((name != "U").then_some(name));
    if s.get(*pos) == Some(&b'(') {
        *pos += 1;
        loop {
            tree.children.push(parse_node(s, pos)?);
            match s.get(*pos)? {
                b',' => *pos += 1,
                b')' => {
                    *pos += 1;
                    break;
                }
                _ => return None,
            }
        }
    }
    Some(tree)
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.step.as_deref().unwrap_or("U"))?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A tree with its posets looked up and minimal elements listed.
struct Resolved {
    step: Option<Arc<Poset>>,
    atoms: Vec<usize>,
    children: Vec<Resolved>,
}

impl Resolved {
    fn new(t: &Tree, catalog: &Catalog) -> Result<Resolved, CensusError> {
        let step = t
            .step
            .as_deref()
            .map(|n| catalog.get(n).cloned())
            .transpose()?;
        let atoms = step
            .as_ref()
            .map_or(Vec::new(), |q| q.minimal_elements().iter().collect());
        let children = t
            .children
            .iter()
            .map(|c| Resolved::new(c, catalog))
            .collect::<Result<_, _>>()?;
        Ok(Resolved {
            step,
            atoms,
            children,
        })
    }

    fn at(&self, k: usize, path: &[usize]) -> Option<Arc<Poset>> {
        let mut node = self;
        for &v in &path[..k] {
            let i = if v == NO_STEP {
                0
            } else {
                node.atoms.iter().position(|&a| a == v)?
            };
            node = node.children.get(i)?;
        }
        node.step.clone()
    }
}

/// How the automorphisms of a step poset permute its minimal elements.
fn atom_permutations(q: &Poset) -> Vec<Vec<usize>> {
    let atoms: Vec<usize> = q.minimal_elements().iter().collect();
    let mut perms: Vec<Vec<usize>> = automorphisms(q)
        .iter()
        .map(|s| {
            atoms
                .iter()
                .map(|&a| {
                    atoms
                        .iter()
                        .position(|&b| b == s[a])
                        .expect("atoms map to atoms")
                })
                .collect()
        })
        .collect();
    perms.sort();
    perms.dedup();
    perms
}

/// Number of orbits of `n^k` colourings under the permutation group
/// (Burnside's count).
fn orbit_count(perms: &[Vec<usize>], n: u128) -> u128 {
    let total: u128 = perms
        .iter()
        .map(|p| {
            let mut seen = vec![false; p.len()];
            let mut cycles = 0u32;
            for i in 0..p.len() {
                if !seen[i] {
                    cycles += 1;
                    let mut j = i;
                    while !seen[j] {
                        seen[j] = true;
                        j = p[j];
                    }
                }
            }
            n.saturating_pow(cycles)
        })
        .fold(0u128, u128::saturating_add);
    total / perms.len() as u128
}

/// Number of providers [`generate_providers`] returns, computed without
/// building them.
pub fn census_size(catalog: &Catalog, max_poset: usize, max_stages: usize) -> u128 {
    let targets: Vec<Vec<Vec<usize>>> = catalog
        .targets(max_poset)
        .iter()
        .map(|n| atom_permutations(catalog.get(n).expect("standard")))
        .collect();
    let mut total = 0u128;
    let mut prev = 0u128;
    for depth in 1..=max_stages {
        let here: u128 = if depth == 1 {
            targets.len() as u128
        } else {
            targets
                .iter()
                .map(|perms| orbit_count(perms, prev))
                .fold(0, u128::saturating_add)
        };
        total = total.saturating_add(here);
        prev = here;
    }
    total
}

/// One provider per isomorphism class of trees over the standard posets
/// with at most `max_poset` elements and `1..=max_stages` stages, shallow
/// trees first. Undefined steps are not generated: an undefined step adds
/// a coordinate that is always `1`, isomorphic to a point step.
pub fn generate_providers(
    catalog: &Catalog,
    max_poset: usize,
    max_stages: usize,
) -> Result<Vec<Tree>, CensusError> {
    let size = census_size(catalog, max_poset, max_stages);
    if size > CENSUS_CAP {
        return Err(CensusError::TooLarge(size));
    }
    let targets = catalog.targets(max_poset);
    let mut out = Vec::new();
    let mut prev: Vec<Tree> = Vec::new();
    for depth in 1..=max_stages {
        let mut here = Vec::new();
        for &name in &targets {
            if depth == 1 {
                here.push(Tree::leaf(Some(name)));
                continue;
            }
            let perms = atom_permutations(catalog.get(name)?);
            let k = perms.first().map_or(0, Vec::len);
            for choice in canonical_assignments(&perms, k, prev.len()) {
                here.push(Tree {
                    step: Some(name.to_string()),
                    children: choice.iter().map(|&i| prev[i].clone()).collect(),
                });
            }
        }
        out.extend(here.iter().cloned());
        prev = here;
    }
    Ok(out)
}

/// Every `k`-tuple over `0..n` that is lexicographically least in its
/// orbit under `perms`.
fn canonical_assignments(perms: &[Vec<usize>], k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let symmetric = perms.len() == (1..=k).product::<usize>();
    let mut a = vec![0usize; k];
    loop {
        let sorted = a.windows(2).all(|w| w[0] <= w[1]);
        let keep = if symmetric {
            sorted
        } else {
            perms.iter().all(|p| {
                let image: Vec<usize> = (0..k).map(|i| a[p[i]]).collect();
                a <= image
            })
        };
        if keep {
            out.push(a.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < n {
                // Symmetric groups only need non-decreasing tuples.
                if symmetric {
                    for j in i + 1..k {
                        a[j] = a[i];
                    }
                }
                break;
            }
            a[i] = 0;
        }
    }
}
