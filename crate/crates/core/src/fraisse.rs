//! Finite stages of the chain of amalgamations whose union is the rational
//! Urysohn space, together with an exact audit of the one-point (in fact
//! finite) extension property between consecutive stages.
//!
//! `K_0` is empty. Step `n` takes every catalog isometry `h: X → Y` of
//! stratum at most `n`, every admissible `u: X → K_n`, and forms the pushout
//! of `⨆u: ⨆X → K_n` along `⨆h: ⨆X → ⨆Y`.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded};
use crate::colimit::pushout;
use crate::construct::coproduct;
use crate::extrat::ExtRat;
use crate::grid::{enumerate_spaces, DistanceGrid};
use crate::hom::{automorphisms, HomSearch, MapKind};
use crate::io::{to_json, Document, SchemaError};
use crate::morphism::MetMap;
use crate::space::Space;

/// Which spans `(u, h)` a step processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SpanPolicy {
    /// Isometric `u` only, skipping spans whose extension already exists.
    #[default]
    #[serde(rename = "iso-skip")]
    IsoSkip,
    #[serde(rename = "iso")]
    Iso,
    /// Every non-expansive `u`.
    #[serde(rename = "full")]
    Full,
    #[serde(rename = "full-skip")]
    FullSkip,
}

impl SpanPolicy {
    pub const ALL: [SpanPolicy; 4] = [SpanPolicy::IsoSkip, SpanPolicy::Iso, SpanPolicy::Full, SpanPolicy::FullSkip];

    pub fn isometric_u(self) -> bool {
        matches!(self, SpanPolicy::IsoSkip | SpanPolicy::Iso)
    }

    pub fn skip_satisfied(self) -> bool {
        matches!(self, SpanPolicy::IsoSkip | SpanPolicy::FullSkip)
    }
}

impl fmt::Display for SpanPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpanPolicy::IsoSkip => "iso-skip",
            SpanPolicy::Iso => "iso",
            SpanPolicy::Full => "full",
            SpanPolicy::FullSkip => "full-skip",
        })
    }
}

impl FromStr for SpanPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SpanPolicy::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| format!("unknown span policy {s:?} (expected iso-skip, iso, full or full-skip)"))
    }
}

/// One isometry class `h: X → Y` modulo automorphisms of `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub dom: usize,
    pub cod: usize,
    pub map: MetMap,
    /// `h` belongs to `S_n` for every `n >= stratum`.
    pub stratum: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryCatalog {
    pub grid: DistanceGrid,
    pub spaces: Vec<Arc<Space>>,
    pub isometries: Vec<CatalogEntry>,
}

/// Stratum of an isometry between spaces of the given sizes: `S_n` holds the
/// maps whose ends have at most `n + 1` points.
pub fn stratum_of(dom_len: usize, cod_len: usize) -> usize {
    dom_len.max(cod_len).saturating_sub(1)
}

impl IsometryCatalog {
    /// Every space over the grid and every isometry between two of them, one
    /// per orbit under automorphisms of the codomain (the lexicographically
    /// least representative).
    pub fn build(grid: &DistanceGrid, budget: &Budget) -> Result<IsometryCatalog, BudgetExceeded> {
        let spaces: Vec<Arc<Space>> = enumerate_spaces(grid, budget)?.into_iter().map(Arc::new).collect();
        let auts = spaces.iter().map(|s| automorphisms(s, budget)).collect::<Result<Vec<_>, _>>()?;
        let mut isometries = Vec::new();
        for (i, x) in spaces.iter().enumerate() {
            for (j, y) in spaces.iter().enumerate() {
                if x.len() > y.len() {
                    continue;
                }
                let raw = HomSearch::new(x.clone(), y.clone(), MapKind::Isometric).collect_raw(&[], budget)?;
                let reps: BTreeSet<Vec<usize>> = raw
                    .into_iter()
                    .map(|h| auts[j].iter().map(|a| h.iter().map(|&p| a[p]).collect::<Vec<usize>>()).min().expect("identity"))
                    .collect();
                for h in reps {
                    isometries.push(CatalogEntry {
                        dom: i,
                        cod: j,
                        map: MetMap::new_unchecked(x.clone(), y.clone(), h),
                        stratum: stratum_of(x.len(), y.len()),
                    });
                }
            }
        }
        Ok(IsometryCatalog { grid: grid.clone(), spaces, isometries })
    }

    /// Indices of the isometries in `S_n`.
    pub fn stratum(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.isometries.iter().enumerate().filter(move |(_, e)| e.stratum <= n).map(|(i, _)| i)
    }

    fn to_value(&self) -> Value {
        let isos: Vec<Value> =
            self.isometries.iter().map(|e| json!({ "dom": e.dom, "cod": e.cod, "map": e.map.as_slice(), "stratum": e.stratum })).collect();
        json!({
            "grid": self.grid.to_string(),
            "max_size": self.grid.max_size,
            "objects": self.spaces.iter().map(|s| s.as_ref()).collect::<Vec<_>>(),
            "isometries": isos,
        })
    }
}

/// A processed span with the image of `Y` inside the next stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanRecord {
    /// Catalog index of `h`.
    pub h: usize,
    pub u: Vec<usize>,
    pub copy: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStage {
    pub index: usize,
    pub space: Arc<Space>,
    /// `K_n → K_{n+1}`; absent on the last stage.
    pub embedding: Option<MetMap>,
    pub spans: Vec<SpanRecord>,
}

/// Result of one amalgamation step.
#[derive(Debug, Clone)]
pub struct Step {
    pub space: Arc<Space>,
    pub embedding: MetMap,
    /// For each span, `Y → K_{n+1}`.
    pub copies: Vec<MetMap>,
}

/// The pushout of `⨆u` along `⨆h`. Every `h` must be an isometry and every
/// `u` must end at `k`.
pub fn chain_step(k: &Arc<Space>, spans: &[(MetMap, MetMap)], max_points: usize) -> Result<Step, BudgetExceeded> {
    let needed = k.len() + spans.iter().map(|(_, h)| h.cod().len() - h.dom().len()).sum::<usize>();
    if needed > max_points {
        return Err(BudgetExceeded::Points { needed, limit: max_points });
    }
    let xs = coproduct(&spans.iter().map(|(u, _)| u.dom().clone()).collect::<Vec<_>>());
    let ys = coproduct(&spans.iter().map(|(_, h)| h.cod().clone()).collect::<Vec<_>>());
    let us: Vec<MetMap> = spans.iter().map(|(u, _)| u.clone()).collect();
    let hs: Vec<MetMap> = spans.iter().zip(&ys.injections).map(|((_, h), inj)| inj.after(h)).collect();
    let u_all = xs.copair(k, &us).expect("every u starts at its summand and ends at k");
    let h_all = xs.copair(&ys.space, &hs).expect("every h lands in its summand");
    let po = pushout(&u_all, &h_all).expect("both legs start at the coproduct");
    let copies = ys.injections.iter().map(|inj| po.leg_f.after(inj)).collect();
    Ok(Step { space: po.apex, embedding: po.leg_g, copies })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainBudget {
    pub max_stage_points: usize,
    pub max_spans: usize,
    pub search: Budget,
}

impl Default for ChainBudget {
    fn default() -> Self {
        ChainBudget { max_stage_points: 256, max_spans: 512, search: Budget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub policy: SpanPolicy,
    pub stages: Vec<ChainStage>,
}

/// A build that ran out of budget, with every stage completed so far.
#[derive(Debug, Clone, Error)]
#[error("chain stopped after {} stage(s): {cause}", partial.stages.len())]
pub struct ChainError {
    pub partial: Chain,
    pub cause: BudgetExceeded,
}

/// Spans for step `n` in catalog order, then lexicographic order of `u`.
pub fn step_spans(
    catalog: &IsometryCatalog,
    k: &Arc<Space>,
    n: usize,
    policy: SpanPolicy,
    budget: &Budget,
) -> Result<Vec<(usize, Vec<usize>)>, BudgetExceeded> {
    let kind = if policy.isometric_u() { MapKind::Isometric } else { MapKind::NonExpansive };
    let entries: Vec<usize> = catalog.stratum(n).collect();
    let per_entry: Vec<Result<Vec<(usize, Vec<usize>)>, BudgetExceeded>> = entries
        .par_iter()
        .map(|&e| {
            let h = &catalog.isometries[e].map;
            let mut out = Vec::new();
            for u in HomSearch::new(h.dom().clone(), k.clone(), kind).collect_raw(&[], budget)? {
                if policy.skip_satisfied() && extension(h, &u, k, budget)?.is_some() {
                    continue;
                }
                out.push((e, u));
            }
            Ok(out)
        })
        .collect();
    let mut spans = Vec::new();
    for r in per_entry {
        spans.extend(r?);
    }
    Ok(spans)
}

/// An isometry `v: Y → k` with `v ∘ h = u`.
fn extension(h: &MetMap, u: &[usize], k: &Arc<Space>, budget: &Budget) -> Result<Option<Vec<usize>>, BudgetExceeded> {
    let mut pins = vec![None; h.cod().len()];
    for (x, &y) in h.as_slice().iter().enumerate() {
        pins[y] = Some(u[x]);
    }
    HomSearch::new(h.cod().clone(), k.clone(), MapKind::Isometric).first(&pins, budget)
}

/// Runs `steps` amalgamation steps from the empty space.
pub fn build_chain(catalog: &IsometryCatalog, steps: usize, policy: SpanPolicy, budget: &ChainBudget) -> Result<Chain, ChainError> {
    let mut chain =
        Chain { policy, stages: vec![ChainStage { index: 0, space: Arc::new(Space::empty()), embedding: None, spans: Vec::new() }] };
    for n in 0..steps {
        match advance(catalog, &chain.stages[n].space, n, policy, budget) {
            Ok((step, spans)) => {
                let stage = &mut chain.stages[n];
                stage.embedding = Some(step.embedding);
                stage.spans = spans;
                chain.stages.push(ChainStage { index: n + 1, space: step.space, embedding: None, spans: Vec::new() });
            }
            Err(cause) => return Err(ChainError { partial: chain, cause }),
        }
    }
    Ok(chain)
}

fn advance(
    catalog: &IsometryCatalog,
    k: &Arc<Space>,
    n: usize,
    policy: SpanPolicy,
    budget: &ChainBudget,
) -> Result<(Step, Vec<SpanRecord>), BudgetExceeded> {
    let spans = step_spans(catalog, k, n, policy, &budget.search)?;
    if spans.len() > budget.max_spans {
        return Err(BudgetExceeded::Spans { needed: spans.len(), limit: budget.max_spans });
    }
    let maps: Vec<(MetMap, MetMap)> = spans
        .iter()
        .map(|(e, u)| {
            let h = catalog.isometries[*e].map.clone();
            (MetMap::new_unchecked(h.dom().clone(), k.clone(), u.clone()), h)
        })
        .collect();
    let step = chain_step(k, &maps, budget.max_stage_points)?;
    let records = spans.into_iter().zip(&step.copies).map(|((h, u), copy)| SpanRecord { h, u, copy: copy.as_slice().to_vec() }).collect();
    Ok((step, records))
}

/// An isometric `u: X → K_n` whose `h: X → Y` has no isometric extension
/// `v: Y → K_{n+1}` with `v ∘ h = k ∘ u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingExtension {
    pub stage: usize,
    pub isometry: usize,
    pub u: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageAudit {
    pub index: usize,
    /// Size of the audited stratum `S_n`.
    pub isometries: usize,
    /// `(h, u)` pairs examined.
    pub checked: u64,
    pub embedding_is_isometry: bool,
    pub span_log_consistent: bool,
    /// Every finite distance is a sum of finite grid values.
    pub distances_are_grid_sums: bool,
    pub missing: Vec<MissingExtension>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub passed: bool,
    pub stages: Vec<StageAudit>,
}

/// Checks, for each stage `n` with a successor (or the only stage, against
/// itself), that every `h` in `S_n` and every isometric `u: X → K_n` extend
/// isometrically into `K_{n+1}`.
pub fn audit_saturation(catalog: &IsometryCatalog, stages: &[ChainStage], budget: &Budget) -> Result<AuditReport, BudgetExceeded> {
    assert!(!stages.is_empty(), "a chain has at least its first stage");
    let audited = if stages.len() == 1 { 1 } else { stages.len() - 1 };
    let mut out = Vec::with_capacity(audited);
    for n in 0..audited {
        let stage = &stages[n];
        let (next, k) = match &stage.embedding {
            Some(e) if n + 1 < stages.len() => (&stages[n + 1].space, e.clone()),
            _ => (&stage.space, MetMap::identity(stage.space.clone())),
        };
        let entries: Vec<usize> = catalog.stratum(n).collect();
        let results: Vec<Result<(u64, Vec<MissingExtension>), BudgetExceeded>> = entries
            .par_iter()
            .map(|&e| {
                let h = &catalog.isometries[e].map;
                let mut checked = 0;
                let mut missing = Vec::new();
                for u in HomSearch::new(h.dom().clone(), stage.space.clone(), MapKind::Isometric).collect_raw(&[], budget)? {
                    checked += 1;
                    let ku: Vec<usize> = u.iter().map(|&x| k.apply(x)).collect();
                    if extension(h, &ku, next, budget)?.is_none() {
                        missing.push(MissingExtension { stage: n, isometry: e, u });
                    }
                }
                Ok((checked, missing))
            })
            .collect();
        let mut checked = 0;
        let mut missing = Vec::new();
        for r in results {
            let (c, m) = r?;
            checked += c;
            missing.extend(m);
        }
        let span_log_consistent = stage.spans.iter().all(|s| {
            let Some(entry) = catalog.isometries.get(s.h) else { return false };
            entry.map.as_slice().len() == s.u.len()
                && s.copy.len() == entry.map.cod().len()
                && s.copy.iter().all(|&p| p < next.len())
                && s.u.iter().all(|&p| p < stage.space.len())
                && entry.map.as_slice().iter().zip(&s.u).all(|(&hx, &ux)| s.copy[hx] == k.apply(ux))
        });
        out.push(StageAudit {
            index: n,
            isometries: entries.len(),
            checked,
            embedding_is_isometry: k.is_isometry(),
            span_log_consistent,
            distances_are_grid_sums: distances_are_grid_sums(&stage.space, &catalog.grid),
            missing,
        });
    }
    if stages.len() > 1 {
        let last = stages.last().expect("nonempty");
        let grid_ok = distances_are_grid_sums(&last.space, &catalog.grid);
        if let Some(a) = out.last_mut() {
            a.distances_are_grid_sums &= grid_ok;
        }
    }
    let passed = out.iter().all(|a| a.missing.is_empty() && a.embedding_is_isometry && a.span_log_consistent && a.distances_are_grid_sums);
    Ok(AuditReport { passed, stages: out })
}

/// Whether every finite distance of `k` is a sum of finite grid values.
pub fn distances_are_grid_sums(k: &Space, grid: &DistanceGrid) -> bool {
    let coins: Vec<&ExtRat> = grid.values().iter().filter(|v| !v.is_inf()).collect();
    let targets: BTreeSet<&ExtRat> =
        (0..k.len()).flat_map(|i| ((i + 1)..k.len()).map(move |j| (i, j))).map(|(i, j)| k.d(i, j)).filter(|d| !d.is_inf()).collect();
    targets.into_iter().all(|d| is_grid_sum(d, &coins))
}

fn is_grid_sum(d: &ExtRat, coins: &[&ExtRat]) -> bool {
    let d = d.as_rational().expect("finite");
    if d.is_zero() {
        return true;
    }
    let scale =
        coins.iter().map(|c| c.as_rational().expect("finite").denom().clone()).fold(d.denom().clone(), |acc: BigInt, x| acc.lcm(&x));
    let as_int = |q: &num_rational::BigRational| (q * &scale).to_integer().to_usize();
    let (Some(target), Some(coins)) =
        (as_int(d), coins.iter().map(|c| as_int(c.as_rational().expect("finite"))).collect::<Option<Vec<_>>>())
    else {
        return false;
    };
    let mut reach = vec![false; target + 1];
    reach[0] = true;
    for t in 1..=target {
        reach[t] = coins.iter().any(|&c| c <= t && reach[t - c]);
    }
    reach[target]
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Schema { path: PathBuf, source: SchemaError },
    #[error("{path}: {message}")]
    Inconsistent { path: PathBuf, message: String },
}

fn write(path: PathBuf, text: String) -> Result<(), RunError> {
    fs::write(&path, text + "\n").map_err(|source| RunError::Io { path, source })
}

fn read(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

fn doc(path: &Path) -> Result<Document, RunError> {
    Document::parse(&read(path)?).map_err(|source| RunError::Schema { path: path.to_path_buf(), source })
}

fn bad(path: &Path, message: impl Into<String>) -> RunError {
    RunError::Inconsistent { path: path.to_path_buf(), message: message.into() }
}

/// Writes `catalog.json`, `stages/K_nnn.json`, `embeddings/k_nnn.json` and
/// `spans/spans_nnn.json` under `dir`.
pub fn write_run(dir: &Path, catalog: &IsometryCatalog, chain: &Chain) -> Result<(), RunError> {
    for sub in ["stages", "embeddings", "spans"] {
        let p = dir.join(sub);
        fs::create_dir_all(&p).map_err(|source| RunError::Io { path: p, source })?;
    }
    write(dir.join("catalog.json"), to_json(&catalog.to_value()))?;
    for s in &chain.stages {
        write(dir.join(format!("stages/K_{:03}.json", s.index)), to_json(&json!({ "index": s.index, "space": s.space.as_ref() })))?;
        if let Some(e) = &s.embedding {
            write(dir.join(format!("embeddings/k_{:03}.json", s.index)), to_json(e))?;
            write(dir.join(format!("spans/spans_{:03}.json", s.index)), to_json(&json!({ "index": s.index, "spans": s.spans })))?;
        }
    }
    Ok(())
}

/// Reads back a run directory written by [`write_run`].
pub fn read_run(dir: &Path) -> Result<(IsometryCatalog, Vec<ChainStage>), RunError> {
    let cat_path = dir.join("catalog.json");
    let mut cat = doc(&cat_path)?;
    let grid_text = cat.root().get("grid").and_then(Value::as_str).ok_or_else(|| bad(&cat_path, "missing grid"))?.to_string();
    let max_size = cat.root().get("max_size").and_then(Value::as_u64).ok_or_else(|| bad(&cat_path, "missing max_size"))? as usize;
    let grid = DistanceGrid::parse(&grid_text, max_size).map_err(|e| bad(&cat_path, e.to_string()))?;
    let spaces = cat.space_list("/objects").map_err(|source| RunError::Schema { path: cat_path.clone(), source })?;
    let raw = cat.root().get("isometries").and_then(Value::as_array).ok_or_else(|| bad(&cat_path, "missing isometries"))?.clone();
    let mut isometries = Vec::with_capacity(raw.len());
    for (i, e) in raw.iter().enumerate() {
        let field =
            |k: &str| e.get(k).and_then(Value::as_u64).map(|v| v as usize).ok_or_else(|| bad(&cat_path, format!("isometry {i}: bad {k}")));
        let (dom, cod, stratum) = (field("dom")?, field("cod")?, field("stratum")?);
        let map: Vec<usize> = serde_json::from_value(e.get("map").cloned().unwrap_or(Value::Null))
            .map_err(|err| bad(&cat_path, format!("isometry {i}: {err}")))?;
        let (x, y) = (spaces.get(dom), spaces.get(cod));
        let (Some(x), Some(y)) = (x, y) else { return Err(bad(&cat_path, format!("isometry {i}: no such space"))) };
        let map = MetMap::new(x.clone(), y.clone(), map).map_err(|err| bad(&cat_path, format!("isometry {i}: {err}")))?;
        if !map.is_isometry() {
            return Err(bad(&cat_path, format!("isometry {i} does not preserve distances")));
        }
        isometries.push(CatalogEntry { dom, cod, map, stratum });
    }
    let catalog = IsometryCatalog { grid, spaces, isometries };

    let mut stages = Vec::new();
    loop {
        let n = stages.len();
        let path = dir.join(format!("stages/K_{n:03}.json"));
        if !path.exists() {
            break;
        }
        let mut d = doc(&path)?;
        let space = d.space("/space").map_err(|source| RunError::Schema { path: path.clone(), source })?;
        stages.push(ChainStage { index: n, space, embedding: None, spans: Vec::new() });
    }
    if stages.is_empty() {
        return Err(bad(&dir.join("stages"), "no stages"));
    }
    for n in 0..stages.len() - 1 {
        let path = dir.join(format!("embeddings/k_{n:03}.json"));
        let mut d = doc(&path)?;
        let e = d.morphism("").map_err(|source| RunError::Schema { path: path.clone(), source })?;
        if !e.dom().same_metric(&stages[n].space) || !e.cod().same_metric(&stages[n + 1].space) {
            return Err(bad(&path, "embedding endpoints differ from the stage files"));
        }
        let e = MetMap::new(stages[n].space.clone(), stages[n + 1].space.clone(), e.as_slice().to_vec()).expect("same metrics as checked");
        let spans_path = dir.join(format!("spans/spans_{n:03}.json"));
        let v: Value = serde_json::from_str(&read(&spans_path)?).map_err(|err| bad(&spans_path, err.to_string()))?;
        let spans: Vec<SpanRecord> =
            serde_json::from_value(v.get("spans").cloned().unwrap_or(Value::Null)).map_err(|err| bad(&spans_path, err.to_string()))?;
        stages[n].embedding = Some(e);
        stages[n].spans = spans;
    }
    Ok((catalog, stages))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog(values: &str, max: usize) -> IsometryCatalog {
        IsometryCatalog::build(&DistanceGrid::parse(values, max).unwrap(), &Budget::default()).unwrap()
    }

    fn find(c: &IsometryCatalog, dom: &Space, cod: &Space) -> Vec<usize> {
        c.isometries
            .iter()
            .enumerate()
            .filter(|(_, e)| c.spaces[e.dom].same_metric(dom) && c.spaces[e.cod].same_metric(cod))
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn catalog_classes() {
        let c = catalog("1,2", 2);
        let (e, p) = (Space::empty(), Space::point());
        let (two1, two2) = (Space::two(ExtRat::one()), Space::two(ExtRat::int(2)));
        for y in [&e, &p, &two1, &two2] {
            assert_eq!(find(&c, &e, y).len(), 1);
        }
        assert_eq!(find(&c, &p, &two1).len(), 1);
        assert!(find(&c, &two1, &two2).is_empty());
        assert_eq!(find(&c, &two1, &two1).len(), 1);
        for entry in &c.isometries {
            assert!(entry.map.is_isometry());
            assert_eq!(entry.stratum, stratum_of(entry.map.dom().len(), entry.map.cod().len()));
        }
    }

    #[test]
    fn empty_step_is_identity() {
        let k = Arc::new(Space::two(ExtRat::one()));
        let s = chain_step(&k, &[], 256).unwrap();
        assert!(s.space.same_metric(&k));
        assert_eq!(s.embedding.as_slice(), &[0, 1]);
    }

    #[test]
    fn attaching_a_neighbour() {
        let k = Arc::new(Space::point());
        let y = Arc::new(Space::two(ExtRat::one()));
        let h = MetMap::new(k.clone(), y.clone(), vec![0]).unwrap();
        let u = MetMap::identity(k.clone());
        let s = chain_step(&k, &[(u, h)], 256).unwrap();
        assert!(s.space.same_metric(&y));
        assert!(s.embedding.is_isometry());
        assert_eq!(s.copies[0].as_slice(), &[0, 1]);
    }

    #[test]
    fn first_step_is_a_coproduct() {
        let c = catalog("1,2", 2);
        let k0 = Arc::new(Space::empty());
        let ys: Vec<(MetMap, MetMap)> =
            c.isometries.iter().filter(|e| e.map.dom().is_empty()).map(|e| (MetMap::from_empty(k0.clone()), e.map.clone())).collect();
        let s = chain_step(&k0, &ys, 256).unwrap();
        let expected = coproduct(&ys.iter().map(|(_, h)| h.cod().clone()).collect::<Vec<_>>());
        assert!(s.space.same_metric(&expected.space));
    }

    #[test]
    fn point_budget_is_enforced() {
        let k = Arc::new(Space::point());
        let y = Arc::new(Space::two(ExtRat::one()));
        let h = MetMap::new(k.clone(), y, vec![0]).unwrap();
        let err = chain_step(&k, &[(MetMap::identity(k.clone()), h)], 1).unwrap_err();
        assert_eq!(err, BudgetExceeded::Points { needed: 2, limit: 1 });
    }

    #[test]
    fn zero_steps_give_the_empty_stage() {
        let c = catalog("1", 2);
        let chain = build_chain(&c, 0, SpanPolicy::IsoSkip, &ChainBudget::default()).unwrap();
        assert_eq!(chain.stages.len(), 1);
        assert!(chain.stages[0].space.is_empty());
    }

    #[test]
    fn unprocessed_empty_stage_fails_the_audit() {
        let c = catalog("1", 2);
        let stages = vec![ChainStage { index: 0, space: Arc::new(Space::empty()), embedding: None, spans: vec![] }];
        let report = audit_saturation(&c, &stages, &Budget::default()).unwrap();
        assert!(!report.passed);
        let missing = &report.stages[0].missing;
        assert_eq!(missing.len(), 1);
        let h = &c.isometries[missing[0].isometry].map;
        assert!(h.dom().is_empty());
        assert_eq!(h.cod().len(), 1);
    }

    #[test]
    fn unit_grid_neighbours_appear() {
        let c = catalog("1", 2);
        let chain = build_chain(&c, 2, SpanPolicy::IsoSkip, &ChainBudget::default()).unwrap();
        assert_eq!(chain.stages.len(), 3);
        for w in chain.stages.windows(2) {
            let e = w[0].embedding.as_ref().unwrap();
            for x in 0..w[0].space.len() {
                let fx = e.apply(x);
                assert!((0..w[1].space.len()).any(|y| *w[1].space.d(fx, y) == ExtRat::one()));
            }
        }
        assert!(audit_saturation(&c, &chain.stages, &Budget::default()).unwrap().passed);
    }

    #[test]
    fn every_policy_passes_on_a_small_grid() {
        let c = catalog("1,2", 2);
        for policy in SpanPolicy::ALL {
            let chain = build_chain(&c, 2, policy, &ChainBudget::default()).unwrap();
            let report = audit_saturation(&c, &chain.stages, &Budget::default()).unwrap();
            assert!(report.passed, "{policy}: {report:?}");
        }
    }

    #[test]
    fn grid_sums() {
        let g = DistanceGrid::parse("2,3,inf", 2).unwrap();
        let k = |d: u64| Space::two(ExtRat::int(d));
        assert!(distances_are_grid_sums(&k(5), &g));
        assert!(!distances_are_grid_sums(&k(1), &g));
        assert!(distances_are_grid_sums(&Space::two(ExtRat::INF), &g));
        let h = DistanceGrid::parse("1/2", 2).unwrap();
        assert!(distances_are_grid_sums(&Space::two(ExtRat::frac(3, 2)), &h));
        assert!(!distances_are_grid_sums(&Space::two(ExtRat::frac(1, 3)), &h));
    }

    #[test]
    fn policy_names() {
        for p in SpanPolicy::ALL {
            assert_eq!(p.to_string().parse::<SpanPolicy>().unwrap(), p);
        }
        assert!("everything".parse::<SpanPolicy>().is_err());
    }

    #[test]
    fn run_directory_round_trip() {
        let c = catalog("1,2", 2);
        let chain = build_chain(&c, 2, SpanPolicy::IsoSkip, &ChainBudget::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_run(dir.path(), &c, &chain).unwrap();
        let (c2, stages) = read_run(dir.path()).unwrap();
        assert_eq!(c2.isometries.len(), c.isometries.len());
        assert_eq!(stages.len(), chain.stages.len());
        for (a, b) in stages.iter().zip(&chain.stages) {
            assert!(a.space.same_metric(&b.space));
            assert_eq!(a.spans, b.spans);
            assert_eq!(a.embedding.as_ref().map(|e| e.as_slice().to_vec()), b.embedding.as_ref().map(|e| e.as_slice().to_vec()));
        }
        assert!(audit_saturation(&c2, &stages, &Budget::default()).unwrap().passed);
    }
}
