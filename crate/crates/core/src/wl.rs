//! Weak and strong well-linked decompositions.
//!
//! Capacities are read as multiplicities, so boundary sizes are integers.

use crate::error::{Error, Result};
use crate::flow::sparsest::{partition_sparsity, sparsest_cut, sparsest_cut_exact, SparsestCut};
use crate::graph::{Graph, VertexId};
use crate::scalar::Scalar;
use num_bigint::BigUint;
use num_traits::{Signed, ToPrimitive};
use std::collections::BinaryHeap;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DecompKind {
    Weak,
    Strong,
}

#[derive(Clone, Debug)]
pub struct DecompOptions {
    pub budget_exp: u32,
    /// c in the weak threshold 1/(c * max(1, log2 z)).
    pub weak_const: u64,
}

impl Default for DecompOptions {
    fn default() -> Self {
        DecompOptions { budget_exp: 22, weak_const: 128 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitRecord<S> {
    pub parent_out: i64,
    pub out_a: i64,
    pub out_b: i64,
    pub cut: S,
    pub sparsity: S,
    /// out() of the side holding fewer terminal units.
    pub out_lighter: i64,
    /// Split into connected components (cut value zero).
    pub component_split: bool,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct Decomposition<S> {
    pub kind: DecompKind,
    pub set: Vec<VertexId>,
    pub z: i64,
    pub clusters: Vec<Vec<VertexId>>,
    pub outs: Vec<i64>,
    pub splits: Vec<SplitRecord<S>>,
    pub weak_const: u64,
    /// Every sparsest cut computed was exact.
    pub exact: bool,
}

/// 1 / (c * max(1, log2 z)) as a float.
pub fn weak_alpha(z: i64, c: u64) -> f64 {
    1.0 / (c as f64 * (z.max(1) as f64).log2().max(1.0))
}

/// sigma < 1 / (c * max(1, log2 z)), decided exactly for rational sigma.
pub fn below_log_threshold<S: Scalar>(sigma: &S, z: i64, c: u64) -> bool {
    let r = sigma.to_big_rational();
    if !r.is_positive() {
        return true;
    }
    let l = (z.max(1) as f64).log2().max(1.0);
    let f = c as f64 * ToPrimitive::to_f64(&r).unwrap_or(f64::INFINITY) * l;
    if !S::EXACT || (f - 1.0).abs() > 1e-6 {
        return f < 1.0;
    }
    let (p, q) = (r.numer().to_biguint().unwrap(), r.denom().to_biguint().unwrap());
    if z <= 2 {
        return BigUint::from(c) * p < q;
    }
    let cp = (BigUint::from(c) * p).to_u32().unwrap_or(u32::MAX);
    let qe = q.to_u32().unwrap_or(u32::MAX);
    BigUint::from(z as u64).pow(cp) < BigUint::from(2u32).pow(qe)
}

fn units<S: Scalar>(x: &S) -> Result<i64> {
    x.to_i64_exact().ok_or_else(|| Error::Precondition("capacities must be integral".into()))
}

fn out_units<S: Scalar>(g: &Graph<S>, set: &[VertexId]) -> Result<i64> {
    units(&g.out_capacity(&g.mask_of(set)))
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct Item {
    out: i64,
    neg_min: i64,
    idx: usize,
}

struct Worklist {
    heap: BinaryHeap<Item>,
    sets: Vec<Vec<VertexId>>,
}

impl Worklist {
    fn push(&mut self, out: i64, set: Vec<VertexId>) {
        let idx = self.sets.len();
        self.heap.push(Item { out, neg_min: -(set[0] as i64), idx });
        self.sets.push(set);
    }
    fn pop(&mut self) -> Option<(i64, Vec<VertexId>)> {
        let it = self.heap.pop()?;
        Some((it.out, std::mem::take(&mut self.sets[it.idx])))
    }
}

fn check_set<S: Scalar>(g: &Graph<S>, set: &[VertexId]) -> Result<Vec<VertexId>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != set.len() || s.is_empty() {
        return Err(Error::Precondition("vertex set must be non-empty without duplicates".into()));
    }
    if let Some(&v) = s.iter().find(|&&v| v >= g.n() || g.is_terminal(v)) {
        return Err(Error::Precondition(format!("vertex {v} is a terminal or out of range")));
    }
    if !g.is_integral() {
        return Err(Error::Precondition("capacities must be integral".into()));
    }
    Ok(s)
}

/// Peel components one at a time, smallest boundary first.
fn push_components<S: Scalar>(
    g: &Graph<S>,
    part: Vec<VertexId>,
    work: &mut Worklist,
    splits: &mut Vec<SplitRecord<S>>,
) -> Result<()> {
    let mut comps = g.components_within(&g.mask_of(&part));
    if comps.len() == 1 {
        let o = out_units(g, &part)?;
        work.push(o, part);
        return Ok(());
    }
    let mut outs: Vec<i64> = comps.iter().map(|c| out_units(g, c)).collect::<Result<_>>()?;
    let mut rest_out: i64 = outs.iter().sum();
    while comps.len() > 1 {
        let i = (0..comps.len()).min_by_key(|&i| (outs[i], comps[i][0])).unwrap();
        let c = comps.remove(i);
        let o = outs.remove(i);
        splits.push(SplitRecord {
            parent_out: rest_out,
            out_a: o,
            out_b: rest_out - o,
            cut: S::zero(),
            sparsity: S::zero(),
            out_lighter: o.min(rest_out - o),
            component_split: true,
            exact: true,
        });
        rest_out -= o;
        work.push(o, c);
    }
    let c = comps.pop().unwrap();
    work.push(outs[0], c);
    Ok(())
}

/// Find the split of `r` given by a sparsest cut of its subdivided instance,
/// projected to a partition of `r`.
fn best_split<S: Scalar>(
    g: &Graph<S>,
    r: &[VertexId],
    budget: u32,
    exact_only: bool,
) -> Result<Option<(Vec<VertexId>, Vec<VertexId>, S, S, bool, bool)>> {
    if r.len() < 2 {
        return Ok(None);
    }
    let sd = g.subdivide_boundary(r)?;
    let sc: SparsestCut<S> =
        if exact_only { sparsest_cut_exact(&sd.graph, budget)? } else { sparsest_cut(&sd.graph, budget)? };
    let Some(cut) = sc.cut else { return Ok(None) };
    let inner: Vec<bool> = (0..sd.graph.n()).map(|v| v < sd.s_len() && cut.inner_side[v]).collect();
    let na = (0..sd.s_len()).filter(|&v| inner[v]).count();
    if na == 0 || na == sd.s_len() {
        return Ok(None);
    }
    let proj = partition_sparsity(&sd.graph, &inner)?;
    let a: Vec<VertexId> = (0..sd.s_len()).filter(|&v| inner[v]).map(|v| sd.inner[v]).collect();
    let b: Vec<VertexId> = (0..sd.s_len()).filter(|&v| !inner[v]).map(|v| sd.inner[v]).collect();
    let a_lighter = proj.weight_a <= proj.weight_b;
    Ok(Some((a, b, proj.value, proj.sparsity, a_lighter, sc.exact)))
}

/// Weak decomposition: split along cuts sparser than 1/(c max(1, log2 z)),
/// largest boundary first.
pub fn weak_decompose<S: Scalar>(g: &Graph<S>, set: &[VertexId], opts: &DecompOptions) -> Result<Decomposition<S>> {
    let s = check_set(g, set)?;
    let z = out_units(g, &s)?;
    let mut work = Worklist { heap: BinaryHeap::new(), sets: Vec::new() };
    let mut splits = Vec::new();
    for c in g.components_within(&g.mask_of(&s)) {
        let o = out_units(g, &c)?;
        work.push(o, c);
    }
    let mut clusters = Vec::new();
    let mut exact = true;
    while let Some((out, r)) = work.pop() {
        match best_split(g, &r, opts.budget_exp, false)? {
            Some((a, b, cut, sp, lighter, ex)) if below_log_threshold(&sp, z, opts.weak_const) => {
                exact &= ex;
                let (oa, ob) = (out_units(g, &a)?, out_units(g, &b)?);
                splits.push(SplitRecord {
                    parent_out: out,
                    out_a: oa,
                    out_b: ob,
                    cut,
                    sparsity: sp,
                    out_lighter: if lighter { oa } else { ob },
                    component_split: false,
                    exact: ex,
                });
                push_components(g, a, &mut work, &mut splits)?;
                push_components(g, b, &mut work, &mut splits)?;
            }
            res => {
                if let Some((.., ex)) = res {
                    exact &= ex;
                }
                clusters.push(r);
            }
        }
    }
    finish(g, DecompKind::Weak, s, z, clusters, splits, opts.weak_const, exact)
}

/// Strong decomposition: split while some cluster has a cut of sparsity
/// below 1/3. Requires G[S] connected and an exact solver within budget.
pub fn strong_decompose<S: Scalar>(g: &Graph<S>, set: &[VertexId], opts: &DecompOptions) -> Result<Decomposition<S>> {
    let s = check_set(g, set)?;
    if !g.is_connected_set(&s) {
        return Err(Error::Precondition("G[S] must be connected".into()));
    }
    let sd = g.subdivide_boundary(&s)?;
    let cost = crate::flow::sparsest::exact_cost_log2(&sd.graph)?;
    if cost > opts.budget_exp as f64 {
        return Err(Error::Budget { what: "strong decomposition".into(), needed: cost, budget: opts.budget_exp });
    }
    let z = out_units(g, &s)?;
    let third = S::from_frac(1, 3);
    let mut work = Worklist { heap: BinaryHeap::new(), sets: Vec::new() };
    work.push(z, s.clone());
    let mut splits = Vec::new();
    let mut clusters = Vec::new();
    while let Some((out, r)) = work.pop() {
        match best_split(g, &r, opts.budget_exp, true)? {
            Some((a, b, cut, sp, lighter, _)) if sp < third => {
                let (oa, ob) = (out_units(g, &a)?, out_units(g, &b)?);
                splits.push(SplitRecord {
                    parent_out: out,
                    out_a: oa,
                    out_b: ob,
                    cut,
                    sparsity: sp,
                    out_lighter: if lighter { oa } else { ob },
                    component_split: false,
                    exact: true,
                });
                push_components(g, a, &mut work, &mut splits)?;
                push_components(g, b, &mut work, &mut splits)?;
            }
            _ => clusters.push(r),
        }
    }
    finish(g, DecompKind::Strong, s, z, clusters, splits, opts.weak_const, true)
}

#[allow(clippy::too_many_arguments)]
fn finish<S: Scalar>(
    g: &Graph<S>,
    kind: DecompKind,
    set: Vec<VertexId>,
    z: i64,
    mut clusters: Vec<Vec<VertexId>>,
    splits: Vec<SplitRecord<S>>,
    weak_const: u64,
    exact: bool,
) -> Result<Decomposition<S>> {
    clusters.sort();
    let outs = clusters.iter().map(|c| out_units(g, c)).collect::<Result<_>>()?;
    Ok(Decomposition { kind, set, z, clusters, outs, splits, weak_const, exact })
}

/// Level i >= 1 with z/2^i < out <= z/2^(i-1); None when out is zero.
pub fn level_of(z: i64, out: i64) -> Option<u32> {
    if out <= 0 || z <= 0 {
        return None;
    }
    (1..=64).find(|&i| (out as i128) << i > z as i128)
}

impl<S: Scalar> Decomposition<S> {
    pub fn sum_out(&self) -> i64 {
        self.outs.iter().sum()
    }

    /// Number of clusters on each level, index i - 1.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut v: Vec<usize> = Vec::new();
        for &o in &self.outs {
            if let Some(l) = level_of(self.z, o) {
                let i = l as usize - 1;
                if v.len() <= i {
                    v.resize(i + 1, 0);
                }
                v[i] += 1;
            }
        }
        v
    }

    pub fn alpha_label(&self) -> String {
        match self.kind {
            DecompKind::Strong => "1/3".into(),
            DecompKind::Weak => format!("{:.6e}", weak_alpha(self.z, self.weak_const)),
        }
    }

    /// Text dump: a header, then `c <level> <alpha> <vertices>` per cluster.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let kind = match self.kind {
            DecompKind::Weak => "weak",
            DecompKind::Strong => "strong",
        };
        writeln!(s, "# decomposition {kind} z {} sum_out {} clusters {}", self.z, self.sum_out(), self.clusters.len()).unwrap();
        for (c, o) in self.clusters.iter().zip(&self.outs) {
            let lvl = level_of(self.z, *o).map_or("0".to_string(), |l| l.to_string());
            let vs: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            writeln!(s, "c {lvl} {} {}", self.alpha_label(), vs.join(" ")).unwrap();
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct CertReport {
    pub checks: Vec<Check>,
}

impl CertReport {
    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(Check { name: name.into(), status, detail: detail.into() });
    }
    fn skip(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), status: CheckStatus::Skipped, detail: detail.into() });
    }
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail).collect()
    }
}

/// Re-derive every claim of a decomposition from scratch.
pub fn certify_decomposition<S: Scalar>(g: &Graph<S>, dec: &Decomposition<S>, budget_exp: u32) -> Result<CertReport> {
    let mut rep = CertReport::default();
    let mut owner = vec![usize::MAX; g.n()];
    let mut partition_ok = true;
    for (i, c) in dec.clusters.iter().enumerate() {
        for &v in c {
            if v >= g.n() || owner[v] != usize::MAX || g.is_terminal(v) {
                partition_ok = false;
            } else {
                owner[v] = i;
            }
        }
    }
    let covered = dec.set.iter().all(|&v| v < g.n() && owner[v] != usize::MAX);
    let total: usize = dec.clusters.iter().map(|c| c.len()).sum();
    rep.push("partition", partition_ok && covered && total == dec.set.len(), "clusters partition S");
    if !(partition_ok && covered) {
        return Ok(rep);
    }
    // boundary tallies by a direct scan
    let mut outs = vec![0i64; dec.clusters.len()];
    let mut z = 0i64;
    let in_s = g.mask_of(&dec.set);
    for e in g.edges() {
        let c = units(&e.cap)?;
        let (a, b) = (owner[e.u], owner[e.v]);
        if a != b {
            if a != usize::MAX {
                outs[a] += c;
            }
            if b != usize::MAX {
                outs[b] += c;
            }
        }
        if in_s[e.u] != in_s[e.v] {
            z += c;
        }
    }
    rep.push("boundary tally", outs == dec.outs && z == dec.z, format!("z = {z}"));
    let conn = dec.clusters.iter().all(|c| g.is_connected_set(c));
    rep.push("clusters connected", conn, "");
    rep.push("cluster boundary at most z", outs.iter().all(|&o| o <= z), "");
    let sum: i64 = outs.iter().sum();
    match dec.kind {
        DecompKind::Weak => {
            rep.push("sum out <= 1.2 z", 5 * sum <= 6 * z, format!("{sum} vs 1.2 * {z}"));
            let mut sparse_ok = true;
            let mut light_ok = true;
            for sp in &dec.splits {
                if !below_log_threshold(&sp.sparsity, z, dec.weak_const) {
                    sparse_ok = false;
                }
                if 100 * sp.out_lighter > 51 * sp.parent_out {
                    light_ok = false;
                }
            }
            rep.push("splits below threshold", sparse_ok, format!("{} splits", dec.splits.len()));
            rep.push("smaller side out <= 0.51 out(R)", light_ok, "");
        }
        DecompKind::Strong => {
            let bound = 3 * (z as i128).pow(3);
            rep.push("sum out <= 3 z^3", (sum as i128) <= bound, format!("{sum} vs {bound}"));
            let counts = dec.level_counts();
            let ok = counts.iter().enumerate().all(|(i, &c)| (c as u128) <= 1u128 << (3 * (i + 1) + 3).min(120));
            rep.push("level counts <= 2^(3i+3)", ok, format!("{counts:?}"));
        }
    }
    for (i, c) in dec.clusters.iter().enumerate() {
        let name = format!("cluster {i} well-linked");
        let sd = g.subdivide_boundary(c)?;
        match sparsest_cut_exact(&sd.graph, budget_exp) {
            Err(Error::Budget { .. }) => rep.skip(name, "over enumeration budget"),
            Err(e) => return Err(e),
            Ok(sc) => {
                let worst = if sc.unsplittable { None } else { sc.cut.as_ref().map(|c| c.sparsity.clone()) };
                let ok = match (&worst, dec.kind) {
                    (None, _) => true,
                    (Some(s), DecompKind::Strong) => *s >= S::from_frac(1, 3),
                    (Some(s), DecompKind::Weak) => !below_log_threshold(s, z, dec.weak_const),
                };
                rep.push(name, ok, worst.map_or("unsplittable".into(), |s| format!("sparsity {s}")));
            }
        }
    }
    Ok(rep)
}
