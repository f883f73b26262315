//! Suite execution over the census, report assembly and replay.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use forcinglab_core::iteration::{collapse_count, collapse_poset, CifsProvider, CollapseParams};
use forcinglab_core::projection::check_cut_complements;
use forcinglab_core::{
    build_iteration, check_lemma1, cifs_toy_iteration, enumerate_generics, factor_generic,
    make_context, parse_formula, verify_corollary15, verify_lemma20_analogue,
    verify_projection_lemmas, verify_theorem2, CheckRecord, ContextFamily, Counterexample, Formula,
    HfSet, Iteration, IterationCaps, SuiteReport, UniverseOptions,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{generate_providers, Catalog, CensusError, Tree};
use crate::config::{ConfigError, ExperimentConfig, Suite};
use crate::text::TextError;

/// Compound formulas checked by the transport suite besides atomic ones.
const TRANSPORT_FORMULAS: [&str; 3] = [
    "$0 in $1 & !($1 = $0)",
    "$0 = $1 -> $1 = $0",
    "!($0 in $0) | $1 in $0",
];

/// Formula lists and ladders of the collapse iterations in the `cifs`
/// suite. Entries with more steps than `max-stages` are skipped.
const CIFS_CATALOG: [(&[&str], &[(usize, usize)]); 5] = [
    (&["x = x"], &[(1, 2)]),
    (&["forall z (!(z in x))"], &[(2, 2)]),
    (&["x = x"], &[(1, 2), (2, 3)]),
    (&["exists z (z in x)"], &[(1, 3)]),
    (&["x = x", "forall z (!(z in x))"], &[(0, 1), (1, 2)]),
];

/// Largest collapse checked by the `cifs` suite's count records.
const COLLAPSE_MAX_X: usize = 3;
const COLLAPSE_MAX_M: usize = 4;

const ABORTED: &str = "aborted";

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed counterexample id `{0}`")]
    BadId(String),
    #[error("counterexample `{0}` not found")]
    NotFound(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCounterexample {
    /// `<suite>/<instance>/<record>/<index>`; accepted by `replay`.
    pub id: String,
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

/// One sub-check on one instance, as written to the report file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportLine {
    pub instance: String,
    pub suite: String,
    pub check: String,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub coverage: String,
    /// The checked object as described by the suite.
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<LineCounterexample>,
}

impl ReportLine {
    pub fn is_aborted(&self) -> bool {
        self.check == ABORTED
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub providers: usize,
    /// Instances per suite.
    pub instances: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub instances: usize,
    pub records: usize,
    pub cases: u64,
    pub failures: u64,
    pub aborted: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub census: Census,
    pub suites: Vec<SuiteSummary>,
    pub total_counterexamples: u64,
    /// Some instance hit a cap and was skipped.
    pub partial: bool,
    pub exit_status: i32,
    #[serde(skip)]
    pub lines: Vec<ReportLine>,
}

/// One unit of work: a suite applied to one generated object.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Instance {
    Lemma1 {
        tree: String,
    },
    Theorem2 {
        tree: String,
        alpha: usize,
        g: usize,
    },
    ProjectionLemmas {
        tree: String,
        alpha: usize,
    },
    Theorem16 {
        tree: String,
        alpha: usize,
        g: usize,
    },
    Corollary15 {
        tree: String,
        alpha: usize,
        g: usize,
    },
    Cifs {
        entry: usize,
        g: usize,
    },
    Collapse {
        x: usize,
        m: usize,
    },
}

impl Instance {
    fn suite(&self) -> Suite {
        match self {
            Instance::Lemma1 { .. } => Suite::Lemma1,
            Instance::Theorem2 { .. } => Suite::Theorem2,
            Instance::ProjectionLemmas { .. } => Suite::ProjectionLemmas,
            Instance::Theorem16 { .. } => Suite::Theorem16,
            Instance::Corollary15 { .. } => Suite::Corollary15,
            Instance::Cifs { .. } | Instance::Collapse { .. } => Suite::Cifs,
        }
    }

    fn id(&self) -> String {
        match self {
            Instance::Lemma1 { tree } => tree.clone(),
            Instance::Theorem2 { tree, alpha, g } | Instance::Corollary15 { tree, alpha, g } => {
                format!("{tree}@{alpha}:{g}")
            }
            Instance::ProjectionLemmas { tree, alpha } => format!("{tree}@{alpha}"),
            Instance::Theorem16 { tree, alpha, g } => format!("{tree}@{alpha}~{g}"),
            Instance::Cifs { entry, g } => format!("cifs{entry}~{g}"),
            Instance::Collapse { x, m } => format!("col{x}x{m}"),
        }
    }

    fn tree(&self) -> Option<&str> {
        match self {
            Instance::Lemma1 { tree }
            | Instance::Theorem2 { tree, .. }
            | Instance::ProjectionLemmas { tree, .. }
            | Instance::Theorem16 { tree, .. }
            | Instance::Corollary15 { tree, .. } => Some(tree),
            _ => None,
        }
    }

    fn parse(suite: Suite, id: &str) -> Option<Instance> {
        let num = |s: &str| s.parse::<usize>().ok();
        let (tree, rest) = match id.split_once('@') {
            Some((t, r)) => (t.to_string(), Some(r)),
            None => (id.to_string(), None),
        };
        Some(match (suite, rest) {
            (Suite::Lemma1, None) => Instance::Lemma1 { tree },
            (Suite::ProjectionLemmas, Some(r)) => Instance::ProjectionLemmas {
                tree,
                alpha: num(r)?,
            },
            (Suite::Theorem2 | Suite::Corollary15, Some(r)) => {
                let (a, g) = r.split_once(':')?;
                let (alpha, g) = (num(a)?, num(g)?);
                if suite == Suite::Theorem2 {
                    Instance::Theorem2 { tree, alpha, g }
                } else {
                    Instance::Corollary15 { tree, alpha, g }
                }
            }
            (Suite::Theorem16, Some(r)) => {
                let (a, g) = r.split_once('~')?;
                Instance::Theorem16 {
                    tree,
                    alpha: num(a)?,
                    g: num(g)?,
                }
            }
            (Suite::Cifs, None) => {
                if let Some(r) = id.strip_prefix("cifs") {
                    let (e, g) = r.split_once('~')?;
                    Instance::Cifs {
                        entry: num(e)?,
                        g: num(g)?,
                    }
                } else {
                    let (x, m) = id.strip_prefix("col")?.split_once('x')?;
                    Instance::Collapse {
                        x: num(x)?,
                        m: num(m)?,
                    }
                }
            }
            _ => return None,
        })
    }
}

/// Built objects shared by all instances of a run.
struct Env {
    iterations: HashMap<String, Result<Arc<Iteration>, String>>,
    cifs: Vec<Result<(CifsProvider, Arc<Iteration>), String>>,
    opts: UniverseOptions,
    formulas: Vec<Formula>,
}

impl Env {
    fn new(config: &ExperimentConfig, catalog: &Catalog, trees: &[Tree], with_cifs: bool) -> Env {
        let iterations = trees
            .par_iter()
            .map(|t| {
                let built = t
                    .provider(catalog)
                    .map_err(|e| e.to_string())
                    .and_then(|p| {
                        build_iteration(p, IterationCaps::default()).map_err(|e| e.to_string())
                    })
                    .map(Arc::new);
                (t.to_string(), built)
            })
            .collect();
        let cifs = if with_cifs {
            CIFS_CATALOG
                .iter()
                .map(|(formulas, ladder)| {
                    let formulas = formulas
                        .iter()
                        .map(|f| parse_formula(f))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| e.to_string())?;
                    let c = cifs_toy_iteration(&formulas, ladder).map_err(|e| e.to_string())?;
                    let it = build_iteration(c.provider().clone(), IterationCaps::default())
                        .map_err(|e| e.to_string())?;
                    Ok((c, Arc::new(it)))
                })
                .collect()
        } else {
            Vec::new()
        };
        Env {
            iterations,
            cifs,
            opts: UniverseOptions {
                rank: config.max_rank,
                cap: config.cap,
                draws: config.draws,
                seed: config.seed,
                ..UniverseOptions::default()
            },
            formulas: TRANSPORT_FORMULAS
                .iter()
                .map(|f| parse_formula(f).expect("built-in formula"))
                .collect(),
        }
    }

    fn iteration(&self, tree: &str) -> Result<&Arc<Iteration>, String> {
        match self.iterations.get(tree) {
            Some(Ok(it)) => Ok(it),
            Some(Err(e)) => Err(e.clone()),
            None => Err(format!("provider `{tree}` was not built")),
        }
    }
}

fn generic_count(it: &Iteration, stage: usize) -> usize {
    it.stage(stage).atoms().len()
}

/// Every instance of `suite` over the built providers, in generation order.
fn plan(suite: Suite, trees: &[Tree], env: &Env, max_stages: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    if suite == Suite::Cifs {
        for (entry, (_, ladder)) in CIFS_CATALOG.iter().enumerate() {
            if ladder.len() > max_stages {
                continue;
            }
            let gs = match &env.cifs[entry] {
                Ok((_, it)) => generic_count(it, it.steps()),
                Err(_) => 1,
            };
            out.extend((0..gs).map(|g| Instance::Cifs { entry, g }));
        }
        for x in 0..=COLLAPSE_MAX_X {
            for m in 1..=COLLAPSE_MAX_M {
                out.push(Instance::Collapse { x, m });
            }
        }
        return out;
    }
    for t in trees {
        let tree = t.to_string();
        let Ok(it) = env.iteration(&tree) else {
            // Planned once so the failure is reported.
            out.push(match suite {
                Suite::Lemma1 => Instance::Lemma1 { tree },
                Suite::ProjectionLemmas => Instance::ProjectionLemmas { tree, alpha: 0 },
                Suite::Theorem2 => Instance::Theorem2 {
                    tree,
                    alpha: 0,
                    g: 0,
                },
                Suite::Theorem16 => Instance::Theorem16 {
                    tree,
                    alpha: 0,
                    g: 0,
                },
                _ => Instance::Corollary15 {
                    tree,
                    alpha: 0,
                    g: 0,
                },
            });
            continue;
        };
        let n = it.steps();
        match suite {
            Suite::Lemma1 => out.push(Instance::Lemma1 { tree }),
            Suite::ProjectionLemmas => {
                for alpha in 0..n {
                    out.push(Instance::ProjectionLemmas {
                        tree: tree.clone(),
                        alpha,
                    });
                }
            }
            Suite::Theorem2 | Suite::Corollary15 => {
                let last = if suite == Suite::Theorem2 { n } else { n + 1 };
                for alpha in 0..last {
                    for g in 0..generic_count(it, alpha) {
                        let tree = tree.clone();
                        out.push(if suite == Suite::Theorem2 {
                            Instance::Theorem2 { tree, alpha, g }
                        } else {
                            Instance::Corollary15 { tree, alpha, g }
                        });
                    }
                }
            }
            Suite::Theorem16 => {
                for alpha in 0..=n {
                    for g in 0..generic_count(it, n) {
                        out.push(Instance::Theorem16 {
                            tree: tree.clone(),
                            alpha,
                            g,
                        });
                    }
                }
            }
            Suite::Cifs | Suite::All => unreachable!("expanded before planning"),
        }
    }
    out
}

fn aborted_line(inst: &Instance, reason: String) -> ReportLine {
    ReportLine {
        instance: inst.id(),
        suite: inst.suite().name().into(),
        check: ABORTED.into(),
        passed: true,
        cases: 0,
        failures: 0,
        coverage: "none".into(),
        label: inst.id(),
        note: Some(reason),
        counterexamples: Vec::new(),
    }
}

fn lines_of(inst: &Instance, report: SuiteReport) -> Vec<ReportLine> {
    let id = inst.id();
    let suite = inst.suite().name();
    report
        .records
        .into_iter()
        .enumerate()
        .map(|(r, rec)| ReportLine {
            instance: id.clone(),
            suite: suite.into(),
            check: rec.check,
            passed: rec.passed,
            cases: rec.cases,
            failures: rec.failures,
            coverage: rec.coverage,
            label: rec.instance,
            note: rec.note,
            counterexamples: rec
                .counterexamples
                .into_iter()
                .enumerate()
                .map(|(k, c)| LineCounterexample {
                    id: format!("{suite}/{id}/{r}/{k}"),
                    inputs: c.inputs,
                    expected: c.expected,
                    got: c.got,
                })
                .collect(),
        })
        .collect()
}

fn execute(inst: &Instance, env: &Env) -> Vec<ReportLine> {
    match check(inst, env) {
        Ok(report) => lines_of(inst, report),
        Err(reason) => vec![aborted_line(inst, reason)],
    }
}

fn generic_of(
    it: &Iteration,
    stage: usize,
    g: usize,
) -> Result<forcinglab_core::GenericSet, String> {
    enumerate_generics(it.stage(stage).poset())
        .map_err(|e| e.to_string())?
        .into_iter()
        .nth(g)
        .ok_or_else(|| format!("stage {stage} has no generic {g}"))
}

fn check(inst: &Instance, env: &Env) -> Result<SuiteReport, String> {
    let err = |e: forcinglab_core::ProjectionError| e.to_string();
    match inst {
        Instance::Lemma1 { tree } => {
            let it = env.iteration(tree)?;
            Ok(lemma1_report(it))
        }
        Instance::Theorem2 { tree, alpha, g } => {
            let it = env.iteration(tree)?;
            let ctx =
                make_context(it.clone(), *alpha, &generic_of(it, *alpha, *g)?).map_err(err)?;
            let mut report = SuiteReport::new(Suite::Theorem2.name());
            for beta in alpha + 1..=it.steps() {
                let universe = env.opts.build(it.stage(beta).algebra()).map_err(err)?;
                report.extend(
                    verify_theorem2(&ctx, beta, &universe, &env.opts, &env.formulas)
                        .map_err(err)?,
                );
                report
                    .records
                    .push(check_cut_complements(&ctx, beta, true).map_err(err)?);
            }
            Ok(report)
        }
        Instance::ProjectionLemmas { tree, alpha } => {
            let it = env.iteration(tree)?;
            let family = ContextFamily::new(it.clone(), *alpha).map_err(err)?;
            verify_projection_lemmas(&family, &env.opts).map_err(err)
        }
        Instance::Theorem16 { tree, alpha, g } => {
            let it = env.iteration(tree)?;
            let g_full = generic_of(it, it.steps(), *g)?;
            Ok(factor_generic(it.clone(), *alpha, &g_full, &env.opts)
                .map_err(err)?
                .report)
        }
        Instance::Corollary15 { tree, alpha, g } => {
            let it = env.iteration(tree)?;
            let ctx =
                make_context(it.clone(), *alpha, &generic_of(it, *alpha, *g)?).map_err(err)?;
            verify_corollary15(&ctx).map_err(err)
        }
        Instance::Cifs { entry, g } => {
            let (c, it) = env
                .cifs
                .get(*entry)
                .ok_or_else(|| format!("no collapse iteration {entry}"))?
                .as_ref()
                .map_err(Clone::clone)?;
            let g_full = generic_of(it, it.steps(), *g)?;
            verify_lemma20_analogue(c, it, &g_full).map_err(err)
        }
        Instance::Collapse { x, m } => Ok(collapse_report(*x, *m)),
    }
}

fn lemma1_report(it: &Iteration) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Lemma1.name());
    let mut rec = CheckRecord::new(
        it.provider().description(),
        Suite::Lemma1.name(),
        "stage-separative",
        "exhaustive",
    );
    for s in check_lemma1(it) {
        rec.case(s.separative, || {
            let got = match s.witness {
                Some((p, q)) => {
                    format!("{p} is not below {q} yet every extension of {p} meets {q}")
                }
                None => "separative".into(),
            };
            Counterexample::new(
                format!("stage {} ({} elements)", s.stage, s.size),
                "separative",
                got,
            )
        });
    }
    report.records.push(rec);
    report
}

/// Partial injections from `x` into `m` of size below `m`, by scanning
/// every relation.
fn injections_by_scan(x: usize, m: usize) -> BTreeSet<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..x).flat_map(|i| (0..m).map(move |v| (i, v))).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..1 << cells.len() {
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

fn collapse_report(x: usize, m: usize) -> SuiteReport {
    let mut report = SuiteReport::new(Suite::Cifs.name());
    let label = format!("Col({x},{m})");
    let mut rec = CheckRecord::new(&label, Suite::Cifs.name(), "collapse-count", "exhaustive");
    let scan = injections_by_scan(x, m);
    let closed = collapse_count(x, m);
    rec.case(closed == scan.len() as u128, || {
        Counterexample::new(
            &label,
            scan.len().to_string(),
            format!("closed form {closed}"),
        )
    });
    let params = CollapseParams {
        x: (0..x).map(HfSet::numeral).collect(),
        m,
    };
    match collapse_poset(&params) {
        Ok(col) => {
            rec.case(col.poset.len() == scan.len(), || {
                Counterexample::new(
                    &label,
                    scan.len().to_string(),
                    format!("poset of {}", col.poset.len()),
                )
            });
            let built: BTreeSet<Vec<(usize, usize)>> = col.maps.iter().cloned().collect();
            rec.case(built == scan, || {
                Counterexample::new(&label, "the scanned injections", "a different set")
            });
        }
        Err(e) => rec.fail(Counterexample::new(
            &label,
            "a collapse poset",
            e.to_string(),
        )),
    }
    report.records.push(rec);
    report
}

/// Runs the configured suites over the generated census.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    let catalog = Catalog::standard();
    let trees = generate_providers(&catalog, config.max_poset, config.max_stages)?;
    Ok(run_on(config, &catalog, &trees))
}

/// Runs the configured suites on the given providers instead of the census.
pub fn run_on(config: &ExperimentConfig, catalog: &Catalog, trees: &[Tree]) -> RunReport {
    let suites = config.suite.expand();
    let env = Env::new(config, catalog, trees, suites.contains(&Suite::Cifs));
    let mut census = Census {
        providers: trees.len(),
        instances: BTreeMap::new(),
    };
    let mut planned = Vec::new();
    for &s in &suites {
        let p = plan(s, trees, &env, config.max_stages);
        census.instances.insert(s.name().into(), p.len());
        planned.extend(p);
    }
    let mut results: Vec<(String, usize, Vec<ReportLine>)> = planned
        .par_iter()
        .map(|inst| {
            let order = Suite::CONCRETE
                .iter()
                .position(|&s| s == inst.suite())
                .unwrap_or(0);
            (inst.id(), order, execute(inst, &env))
        })
        .collect();
    results.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let lines: Vec<ReportLine> = results.into_iter().flat_map(|r| r.2).collect();

    let summaries: Vec<SuiteSummary> = suites
        .iter()
        .map(|s| {
            let mine: Vec<&ReportLine> = lines.iter().filter(|l| l.suite == s.name()).collect();
            SuiteSummary {
                suite: s.name().into(),
                instances: census.instances[s.name()],
                records: mine.iter().filter(|l| !l.is_aborted()).count(),
                cases: mine.iter().map(|l| l.cases).sum(),
                failures: mine.iter().map(|l| l.failures).sum(),
                aborted: mine.iter().filter(|l| l.is_aborted()).count(),
            }
        })
        .collect();
    let total: u64 = summaries.iter().map(|s| s.failures).sum();
    RunReport {
        config: config.clone(),
        census,
        partial: summaries.iter().any(|s| s.aborted > 0),
        exit_status: if total > 0 { 1 } else { 0 },
        total_counterexamples: total,
        suites: summaries,
        lines,
    }
}

impl RunReport {
    /// The human-readable summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:>9} {:>8} {:>14} {:>9} {:>8}",
            "suite", "instances", "records", "cases", "failures", "aborted"
        );
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{:<18} {:>9} {:>8} {:>14} {:>9} {:>8}",
                s.suite, s.instances, s.records, s.cases, s.failures, s.aborted
            );
        }
        let _ = writeln!(
            out,
            "providers: {}  counterexamples: {}  {}",
            self.census.providers,
            self.total_counterexamples,
            if self.partial { "PARTIAL" } else { "complete" }
        );
        out
    }

    /// Writes the records to `out` (one JSON object per line) and the run
    /// summary next to it.
    pub fn write(&self, out: &Path) -> Result<(), RunError> {
        let mut text = String::new();
        for l in &self.lines {
            text.push_str(&serde_json::to_string(l).expect("report lines serialize"));
            text.push('\n');
        }
        write_file(out, &text)?;
        let summary = serde_json::to_string_pretty(self).expect("run report serializes");
        write_file(&summary_path(out), &(summary + "\n"))
    }
}

/// `report.jsonl` -> `report.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

fn write_file(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reruns the instance a counterexample id names and returns its record
/// with only that counterexample.
pub fn replay(
    config: &ExperimentConfig,
    catalog: &Catalog,
    id: &str,
) -> Result<ReportLine, RunError> {
    config.validate()?;
    let parts: Vec<&str> = id.split('/').collect();
    let bad = || RunError::BadId(id.to_string());
    let [suite, instance, r, k] = parts[..] else {
        return Err(bad());
    };
    let suite: Suite = suite.parse().map_err(|_| bad())?;
    let inst = Instance::parse(suite, instance).ok_or_else(bad)?;
    let (r, k): (usize, usize) = (r.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?);
    let trees = match inst.tree() {
        Some(code) => vec![Tree::parse(code)?],
        None => Vec::new(),
    };
    for t in &trees {
        t.validate(catalog)?;
    }
    let env = Env::new(config, catalog, &trees, suite == Suite::Cifs);
    let mut line = execute(&inst, &env)
        .into_iter()
        .nth(r)
        .ok_or_else(|| RunError::NotFound(id.to_string()))?;
    let cx = line
        .counterexamples
        .iter()
        .find(|c| c.id == id)
        .cloned()
        .ok_or_else(|| RunError::NotFound(id.to_string()))?;
    debug_assert_eq!(line.counterexamples.get(k), Some(&cx));
    line.counterexamples = vec![cx];
    Ok(line)
}
