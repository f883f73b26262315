//! Text formats for posets and provider tables.
//!
//! A poset is a line `top: <id>` followed by Hasse edges `<id> < <id>`:
//!
//! ```text
//! top: 1
//! a < 1
//! b < 1
//! ```
//!
//! A provider table defines extra posets in `poset <name> ... end` blocks,
//! then lists, stage by stage, the step poset under each generic:
//!
//! ```text
//! stage 0
//! G:- -> A2
//! stage 1
//! G:a -> P
//! G:b -> undef
//! ```
//!
//! A generic of stage `k` is written as the minimal elements it picks in
//! `Q_0, ..., Q_(k-1)`, joined by `.`, with `_` for an undefined step and
//! `-` for the empty path.

use std::collections::BTreeMap;

use forcinglab_core::{validate_poset, Poset, PosetError};
use thiserror::Error;

use crate::census::{Catalog, CensusError, Tree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `top:` line")]
    NoTop,
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error("stage {stage}: no entry for generic `{path}`")]
    MissingEntry { stage: usize, path: String },
    #[error("stage {stage}: entry for `{path}` matches no generic")]
    UnusedEntry { stage: usize, path: String },
    #[error("table has no stages")]
    NoStages,
}

fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax {
        line,
        message: message.into(),
    }
}

/// Reads the poset format.
pub fn parse_poset(text: &str) -> Result<Poset, TextError> {
    parse_poset_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

fn parse_poset_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
) -> Result<Poset, TextError> {
    let mut top: Option<String> = None;
    let mut elements: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let note = |e: &str, elements: &mut Vec<String>| {
        if !elements.iter().any(|x| x == e) {
            elements.push(e.to_string());
        }
    };
    for (n, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("top:") {
            if top.is_some() {
                return Err(syntax(n, "second `top:` line"));
            }
            let t = rest.trim();
            check_id(n, t)?;
            note(t, &mut elements);
            top = Some(t.to_string());
            continue;
        }
        if top.is_none() {
            return Err(syntax(n, "the first line must be `top: <id>`"));
        }
        let (a, b) = line
            .split_once('<')
            .ok_or_else(|| syntax(n, "expected `<id> < <id>`"))?;
        let (a, b) = (a.trim(), b.trim());
        check_id(n, a)?;
        check_id(n, b)?;
        note(a, &mut elements);
        note(b, &mut elements);
        edges.push((a.to_string(), b.to_string()));
    }
    let top = top.ok_or(TextError::NoTop)?;
    Ok(validate_poset(&elements, &edges, &top)?)
}

fn check_id(line: usize, id: &str) -> Result<(), TextError> {
    let ok = !id.is_empty()
        && id != "_"
        && id != "-"
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if ok {
        Ok(())
    } else {
        Err(syntax(line, format!("bad element id `{id}`")))
    }
}

/// Writes the poset format: the top, then every covering pair.
pub fn format_poset(p: &Poset) -> String {
    let mut out = format!("top: {}\n", p.label(p.top()));
    for a in 0..p.len() {
        for b in 0..p.len() {
            let covers = a != b
                && p.leq(a, b)
                && !(0..p.len()).any(|c| c != a && c != b && p.leq(a, c) && p.leq(c, b));
            if covers {
                out.push_str(&format!("{} < {}\n", p.label(a), p.label(b)));
            }
        }
    }
    out
}

/// Reads a provider table. Posets defined in the table are added to a copy
/// of `catalog`, which is returned with the tree.
pub fn parse_provider_table(text: &str, catalog: &Catalog) -> Result<(Catalog, Tree), TextError> {
    let mut catalog = catalog.clone();
    let mut entries: Vec<BTreeMap<String, String>> = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    while let Some((n, raw)) = lines.next() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix("poset ") {
            let mut body = Vec::new();
            let mut closed = false;
            for (m, l) in lines.by_ref() {
                if l.trim() == "end" {
                    closed = true;
                    break;
                }
                body.push((m, l));
            }
            if !closed {
                return Err(syntax(n, "`poset` block without `end`"));
            }
            let p = parse_poset_lines(body.into_iter())?;
            catalog.insert(name.trim(), p)?;
        } else if let Some(k) = line.strip_prefix("stage ") {
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| syntax(n, "expected `stage <n>`"))?;
            if k != entries.len() {
                return Err(syntax(n, format!("expected stage {}", entries.len())));
            }
            entries.push(BTreeMap::new());
        } else if let Some(rest) = line.strip_prefix("G:") {
            let stage = entries
                .last_mut()
                .ok_or_else(|| syntax(n, "entry before the first `stage` line"))?;
            let (path, target) = rest
                .split_once("->")
                .ok_or_else(|| syntax(n, "expected `G:<path> -> <poset | undef>`"))?;
            let path = path.trim().to_string();
            if stage
                .insert(path.clone(), target.trim().to_string())
                .is_some()
            {
                return Err(syntax(n, format!("second entry for `{path}`")));
            }
        } else {
            return Err(syntax(n, format!("unexpected `{line}`")));
        }
    }
    if entries.is_empty() {
        return Err(TextError::NoStages);
    }
    let mut used: Vec<usize> = vec![0; entries.len()];
    let tree = build_node(&catalog, &entries, &mut used, 0, &mut Vec::new())?;
    for (stage, table) in entries.iter().enumerate() {
        if used[stage] != table.len() {
            let path = table.keys().next().cloned().unwrap_or_default();
            // Report an entry that was never reached.
            let unreached = table
                .keys()
                .find(|p| !reachable(&catalog, &entries, stage, p))
                .cloned()
                .unwrap_or(path);
            return Err(TextError::UnusedEntry {
                stage,
                path: unreached,
            });
        }
    }
    Ok((catalog, tree))
}

fn path_key(path: &[String]) -> String {
    if path.is_empty() {
        "-".into()
    } else {
        path.join(".")
    }
}

fn build_node(
    catalog: &Catalog,
    entries: &[BTreeMap<String, String>],
    used: &mut [usize],
    stage: usize,
    path: &mut Vec<String>,
) -> Result<Tree, TextError> {
    let key = path_key(path);
    let target = entries[stage]
        .get(&key)
        .ok_or_else(|| TextError::MissingEntry {
            stage,
            path: key.clone(),
        })?;
    used[stage] += 1;
    let step = (target != "undef").then(|| target.clone());
    let mut tree = Tree {
        step: step.clone(),
        children: Vec::new(),
    };
    if stage + 1 < entries.len() {
        let labels: Vec<String> = match &step {
            Some(name) => {
                let q = catalog.get(name)?;
                q.minimal_elements()
                    .iter()
                    .map(|a| q.label(a).to_string())
                    .collect()
            }
            None => vec!["_".into()],
        };
        for l in labels {
            path.push(l);
            tree.children
                .push(build_node(catalog, entries, used, stage + 1, path)?);
            path.pop();
        }
    } else if let Some(name) = &step {
        catalog.get(name)?;
    }
    Ok(tree)
}

fn reachable(
    catalog: &Catalog,
    entries: &[BTreeMap<String, String>],
    stage: usize,
    key: &str,
) -> bool {
    let mut frontier = vec![Vec::<String>::new()];
    for k in 0..stage {
        let mut next = Vec::new();
        for p in frontier {
            let Some(target) = entries[k].get(&path_key(&p)) else {
                continue;
            };
            let labels: Vec<String> = if target == "undef" {
                vec!["_".into()]
            } else if let Ok(q) = catalog.get(target) {
                q.minimal_elements()
                    .iter()
                    .map(|a| q.label(a).to_string())
                    .collect()
            } else {
                continue;
            };
            for l in labels {
                let mut p2 = p.clone();
                p2.push(l);
                next.push(p2);
            }
        }
        frontier = next;
    }
    frontier.iter().any(|p| path_key(p) == key)
}

/// Writes a provider table for `tree`. Posets are referenced by name; the
/// catalog must contain them.
pub fn format_provider_table(tree: &Tree, catalog: &Catalog) -> Result<String, TextError> {
    tree.validate(catalog)?;
    let mut stages: Vec<Vec<String>> = vec![Vec::new(); tree.depth()];
    emit(tree, catalog, 0, &mut Vec::new(), &mut stages)?;
    let mut out = String::new();
    for (k, lines) in stages.iter().enumerate() {
        out.push_str(&format!("stage {k}\n"));
        for l in lines {
            out.push_str(l);
            out.push('\n');
        }
    }
    Ok(out)
}

fn emit(
    t: &Tree,
    catalog: &Catalog,
    stage: usize,
    path: &mut Vec<String>,
    out: &mut [Vec<String>],
) -> Result<(), TextError> {
    let target = t.step.as_deref().unwrap_or("undef");
    out[stage].push(format!("G:{} -> {target}", path_key(path)));
    let labels: Vec<String> = match &t.step {
        Some(name) => {
            let q = catalog.get(name)?;
            q.minimal_elements()
                .iter()
                .map(|a| q.label(a).to_string())
                .collect()
        }
        None => vec!["_".into()],
    };
    for (c, l) in t.children.iter().zip(labels) {
        path.push(l);
        emit(c, catalog, stage + 1, path, out)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::generate_providers;

    #[test]
    fn poset_round_trip() {
        let text = "top: 1\na < m\nb < m\nm < 1\nc < 1\n";
        let p = parse_poset(text).unwrap();
        assert_eq!(p.len(), 5);
        let q = parse_poset(&format_poset(&p)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn poset_errors() {
        assert_eq!(parse_poset(""), Err(TextError::NoTop));
        assert!(matches!(
            parse_poset("a < b\ntop: b"),
            Err(TextError::Syntax { line: 1, .. })
        ));
        assert!(parse_poset("top: 1\na < b\n").is_err());
        assert!(parse_poset("top: 1\na < 1\n1 < a\n").is_err());
        assert_eq!(parse_poset("top: t\n").unwrap().len(), 1);
    }

    #[test]
    fn generated_tables_round_trip() {
        let c = Catalog::standard();
        for t in generate_providers(&c, 3, 3).unwrap() {
            let text = format_provider_table(&t, &c).unwrap();
            let (_, back) = parse_provider_table(&text, &c).unwrap();
            assert_eq!(back, t, "{text}");
        }
    }

    #[test]
    fn tables_with_custom_posets_and_undefined_steps() {
        let c = Catalog::standard();
        let text = "\
poset V
top: 1
a < 1
b < 1
end
stage 0
G:- -> V
stage 1
G:a -> undef
G:b -> A2
";
        let (cat, t) = parse_provider_table(text, &c).unwrap();
        assert_eq!(t.to_string(), "V(U,A2)");
        assert_eq!(
            format_provider_table(&t, &cat).unwrap(),
            text.split_once("end\n").unwrap().1
        );
    }

    #[test]
    fn table_errors() {
        let c = Catalog::standard();
        let missing = "stage 0\nG:- -> A2\nstage 1\nG:0 -> P\n";
        assert!(matches!(
            parse_provider_table(missing, &c),
            Err(TextError::MissingEntry { stage: 1, .. })
        ));
        let extra = "stage 0\nG:- -> P\nstage 1\nG:1 -> P\nG:9 -> P\n";
        assert!(matches!(
            parse_provider_table(extra, &c),
            Err(TextError::UnusedEntry { stage: 1, .. })
        ));
        assert!(parse_provider_table("stage 1\n", &c).is_err());
        assert!(parse_provider_table("", &c).is_err());
        let chain = "poset C\ntop: 1\na < 1\nend\nstage 0\nG:- -> C\n";
        assert!(matches!(
            parse_provider_table(chain, &c),
            Err(TextError::Census(CensusError::BadPoset { .. }))
        ));
    }
}
