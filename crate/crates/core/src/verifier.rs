//! Independent quality checks for cut and flow sparsifiers.
//!
//! Terminals of G and H correspond by position in their terminal lists.
//! Cut checks are exact over all terminal bipartitions (within the
//! enumeration budget). Flow checks sample demand sets, so the observed
//! flow quality is only a lower bound on the true one; the constructive
//! reroute checks the upper side through the cluster routers.

use crate::cut_sparsifier::CutSparsifier;
use crate::error::{Error, Result};
use crate::flow::{min_congestion_routing, min_cut_between, DemandSet, RoutingMethod, RoutingOptions, WellLinked};
use crate::flow_sparsifier::{recheck_certificate, uniform_router_check, FlowParams, FlowSparsifier, RouterCertificate};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cut,
    Flow,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cut" => Ok(Mode::Cut),
            "flow" => Ok(Mode::Flow),
            _ => Err(Error::Input(format!("unknown mode '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Uniform,
    Matching,
    Gravity,
    Adversarial,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Uniform, Strategy::Matching, Strategy::Gravity, Strategy::Adversarial];
}

/// What a sparsifier claims about itself.
#[derive(Clone, Debug)]
pub struct Claim<S> {
    pub mode: Mode,
    pub clusters: Vec<Vec<VertexId>>,
    pub eps: Option<S>,
    pub quality: S,
    pub eta_star: i64,
}

impl<S: Scalar> Claim<S> {
    pub fn of_cut(sp: &CutSparsifier<S>) -> Self {
        Claim { mode: Mode::Cut, clusters: sp.clusters.clone(), eps: sp.eps.clone(), quality: sp.quality.clone(), eta_star: 34 }
    }
    pub fn of_flow(sp: &FlowSparsifier<S>) -> Self {
        Claim {
            mode: Mode::Flow,
            clusters: sp.clusters.clone(),
            eps: sp.eps.clone(),
            quality: sp.quality.clone(),
            eta_star: sp.eta_star,
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Exhaustive cut enumeration up to this many terminals.
    pub budget_enum: usize,
    /// Bipartitions sampled past the enumeration budget.
    pub cut_samples: usize,
    pub strategies: Vec<Strategy>,
    /// Random matchings evaluated.
    pub samples: usize,
    /// Local search evaluations of the adversarial strategy.
    pub adversarial_steps: usize,
    pub delta: f64,
    pub seed: u64,
    pub budget_exp: u32,
    pub routing: RoutingOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget_enum: 16,
            cut_samples: 512,
            strategies: Strategy::ALL.to_vec(),
            samples: 100,
            adversarial_steps: 24,
            delta: 1e-6,
            seed: 0,
            budget_exp: 22,
            routing: RoutingOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TestRecord {
    pub id: usize,
    pub kind: String,
    /// Bipartition side A or demand pairs, over terminal positions.
    pub input: String,
    pub g_value: f64,
    pub h_value: f64,
    pub ratio: f64,
    /// Congestion of the rerouted H flow, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reroute: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QualityReport {
    pub mode: Mode,
    pub q_observed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_q: Option<f64>,
    pub exhaustive: bool,
    /// Sampled demands only bound the true quality from below.
    pub lower_bound_only: bool,
    pub delta: f64,
    pub tests: Vec<TestRecord>,
    pub violations: Vec<String>,
    pub budget_flags: Vec<String>,
}

impl QualityReport {
    fn new(mode: Mode, delta: f64) -> Self {
        QualityReport {
            mode,
            q_observed: 1.0,
            q_exact: None,
            claimed_q: None,
            exhaustive: true,
            lower_bound_only: mode == Mode::Flow,
            delta,
            tests: Vec::new(),
            violations: Vec::new(),
            budget_flags: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn positions(mask: u64, k: usize) -> String {
    let v: Vec<String> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

fn check_terminals<S: Scalar>(g: &Graph<S>, h: &Graph<S>) -> Result<()> {
    if g.k() != h.k() {
        return Err(Error::Input(format!("G has {} terminals, H has {}", g.k(), h.k())));
    }
    Ok(())
}

/// Min-cut ratios of H against G over terminal bipartitions. Returns the
/// report and the exact observed quality.
pub fn verify_cut_quality<S: Scalar>(
    g: &Graph<S>,
    h: &Graph<S>,
    claimed: Option<&S>,
    opts: &VerifyOptions,
) -> Result<(QualityReport, S)> {
    check_terminals(g, h)?;
    let k = g.k();
    let mut rep = QualityReport::new(Mode::Cut, 0.0);
    rep.claimed_q = claimed.map(|q| q.to_f64());
    if k < 2 {
        rep.q_exact = Some("1".into());
        return Ok((rep, S::one()));
    }
    // the last terminal always sits on side B
    let masks: Vec<u64> = if k <= opts.budget_enum.min(63) {
        (1..1u64 << (k - 1)).collect()
    } else {
        rep.exhaustive = false;
        rep.budget_flags.push(format!("non-exhaustive: k = {k} exceeds enumeration budget {}, sampled {} bipartitions", opts.budget_enum, opts.cut_samples));
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut seen = std::collections::BTreeSet::new();
        let limit = (k - 1).min(63);
        let target = opts.cut_samples.min(((1u128 << limit) - 1).min(usize::MAX as u128) as usize);
        while seen.len() < target {
            let m: u64 = rng.gen::<u64>() & ((1u64 << limit) - 1);
            if m != 0 {
                seen.insert(m);
            }
        }
        seen.into_iter().collect()
    };
    let side = |m: u64, gr: &Graph<S>| -> (Vec<VertexId>, Vec<VertexId>) {
        let t = gr.terminals();
        let a = (0..k).filter(|&i| m >> i & 1 == 1).map(|i| t[i]).collect();
        let b = (0..k).filter(|&i| m >> i & 1 == 0).map(|i| t[i]).collect();
        (a, b)
    };
    let results: Vec<Result<(u64, S, S)>> = masks
        .par_iter()
        .map(|&m| {
            let (ga, gb) = side(m, g);
            let (ha, hb) = side(m, h);
            let cg = min_cut_between(g, &ga, &gb)?.value;
            let ch = min_cut_between(h, &ha, &hb)?.value;
            Ok((m, cg, ch))
        })
        .collect();
    let mut q = S::one();
    let mut unbounded = false;
    for (id, r) in results.into_iter().enumerate() {
        let (m, cg, ch) = r?;
        let ratio: Option<S> = if cg.is_zero() {
            if ch.is_zero() {
                Some(S::one())
            } else {
                None
            }
        } else {
            Some(ch.clone() / cg.clone())
        };
        if ch < cg {
            rep.violations.push(format!("lower side: bipartition {} has H cut {ch} below G cut {cg}", positions(m, k)));
        }
        match &ratio {
            Some(x) => {
                if let Some(cq) = claimed {
                    if x > cq {
                        rep.violations.push(format!("upper side: bipartition {} has ratio {x} above {cq}", positions(m, k)));
                    }
                }
                if *x > q {
                    q = x.clone();
                }
            }
            None => {
                unbounded = true;
                rep.violations.push(format!("upper side: bipartition {} separates in G but not in H", positions(m, k)));
            }
        }
        rep.tests.push(TestRecord {
            id,
            kind: "bipartition".into(),
            input: positions(m, k),
            g_value: cg.to_f64(),
            h_value: ch.to_f64(),
            ratio: ratio.as_ref().map_or(f64::INFINITY, |x| x.to_f64()),
            reroute: None,
        });
    }
    rep.q_observed = if unbounded { f64::INFINITY } else { q.to_f64() };
    rep.q_exact = Some(if unbounded { "inf".into() } else { q.to_string() });
    Ok((rep, q))
}

/// Demand over terminal positions.
type PosDemand = Vec<(usize, usize, f64)>;

fn describe(d: &PosDemand) -> String {
    let v: Vec<String> = d.iter().map(|(a, b, x)| format!("{a}-{b}:{x:.6}")).collect();
    v.join(" ")
}

/// Load every base edge would carry when an H flow is routed back through
/// the cluster routers, as per-unit contributions of boundary edges.
pub struct Reroute {
    base_caps: Vec<f64>,
    scale: f64,
    eta_star: i64,
    /// H edge of every base edge not inside a cluster.
    h_of_base: Vec<Option<EdgeId>>,
    /// Per cluster: (boundary base edge, per-unit load on internal base edges).
    units: Vec<Vec<(EdgeId, Vec<(EdgeId, f64)>)>>,
}

impl Reroute {
    pub fn new<S: Scalar>(
        base: &Graph<S>,
        scale: &S,
        clusters: &[Vec<VertexId>],
        certs: &[RouterCertificate<S>],
        eta_star: i64,
    ) -> Result<Self> {
        let c = base.contract(clusters)?;
        let mut h_of_base = vec![None; base.m()];
        for (he, &be) in c.edge_parent.iter().enumerate() {
            h_of_base[be] = Some(he);
        }
        let mut units = Vec::new();
        for (cl, cert) in clusters.iter().zip(certs) {
            let mask = base.mask_of(cl);
            let mut mult: BTreeMap<VertexId, f64> = BTreeMap::new();
            let boundary = base.out_edges(&mask);
            let inside = |e: EdgeId| {
                let ed = base.edge(e);
                if mask[ed.u] {
                    ed.u
                } else {
                    ed.v
                }
            };
            for &b in &boundary {
                *mult.entry(inside(b)).or_insert(0.0) += base.edge(b).cap.to_f64();
            }
            // per group: sum of loads of the commodities it takes part in
            let mut per_group: BTreeMap<VertexId, BTreeMap<EdgeId, f64>> = BTreeMap::new();
            for com in &cert.flow.commodities {
                let (a, b) = (cert.members[com.a], cert.members[com.b]);
                for p in &com.paths {
                    for &le in &p.edges {
                        let be = cert.internal_edges[le];
                        for x in [a, b] {
                            *per_group.entry(x).or_default().entry(be).or_insert(0.0) += p.amount.to_f64();
                        }
                    }
                }
            }
            let mut list = Vec::new();
            for &b in &boundary {
                let u = inside(b);
                let m = mult[&u];
                let loads: Vec<(EdgeId, f64)> = per_group
                    .get(&u)
                    .map(|l| l.iter().map(|(&e, &x)| (e, x / (2.0 * m))).collect())
                    .unwrap_or_default();
                list.push((b, loads));
            }
            units.push(list);
        }
        Ok(Reroute {
            base_caps: base.edges().iter().map(|e| e.cap.to_f64()).collect(),
            scale: scale.to_f64(),
            eta_star,
            h_of_base,
            units,
        })
    }

    /// Congestion (in H capacity units) of the rerouted flow, plus issues
    /// with the per-cluster demands.
    pub fn congestion(&self, h: &Graph<f64>, h_loads: &[f64], eta_h: f64, delta: f64) -> (f64, Vec<String>) {
        let mut issues = Vec::new();
        let mut load = vec![0.0; self.base_caps.len()];
        for (e, he) in self.h_of_base.iter().enumerate() {
            if let Some(he) = he {
                load[e] = h_loads[*he];
            }
        }
        for (ci, list) in self.units.iter().enumerate() {
            for (b, per_unit) in list {
                let Some(hb) = self.h_of_base[*b] else {
                    issues.push(format!("cluster {ci}: boundary edge {b} has no H image"));
                    continue;
                };
                let f = h_loads[hb];
                if f > eta_h * h.edge(hb).cap * (1.0 + 2.0 * delta) + 1e-12 {
                    issues.push(format!("cluster {ci}: demand through boundary edge {b} is not 1-restricted"));
                }
                for &(e, u) in per_unit {
                    load[e] += f * u;
                }
            }
        }
        let cong = load.iter().zip(&self.base_caps).map(|(l, c)| l / c).fold(0.0, f64::max) / self.scale;
        let bound = 2.0 * self.eta_star as f64 * eta_h * (1.0 + 2.0 * delta);
        if cong > bound + 1e-12 {
            issues.push(format!("rerouted congestion {cong} exceeds 2 eta* eta_H = {bound}"));
        }
        (cong, issues)
    }
}

fn to_demand(d: &PosDemand, terms: &[VertexId]) -> Result<DemandSet<f64>> {
    let mut ds = DemandSet::new();
    for &(a, b, x) in d {
        ds.add(terms[a], terms[b], x)?;
    }
    Ok(ds)
}

struct Eval {
    eta_g: f64,
    eta_h: f64,
    ratio: f64,
    reroute: Option<f64>,
    issues: Vec<String>,
    approximate: bool,
}

fn evaluate(g: &Graph<f64>, h: &Graph<f64>, d: &PosDemand, rr: Option<&Reroute>, opts: &VerifyOptions) -> Result<Eval> {
    let rg = min_congestion_routing(g, &to_demand(d, g.terminals())?, &opts.routing)?;
    let rh = min_congestion_routing(h, &to_demand(d, h.terminals())?, &opts.routing)?;
    let approximate = rg.method == RoutingMethod::Mwu || rh.method == RoutingMethod::Mwu;
    let eta_g = rg.eta.unwrap_or(f64::INFINITY);
    let eta_h = rh.eta.unwrap_or(f64::INFINITY);
    let ratio = if eta_h == 0.0 || eta_h.is_infinite() {
        if eta_g == eta_h {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        eta_g / eta_h
    };
    let mut issues = Vec::new();
    if eta_h > eta_g * (1.0 + 2.0 * opts.delta) {
        issues.push(format!("lower side: eta_H {eta_h} above eta_G {eta_g}"));
    }
    let mut reroute = None;
    if let (Some(rr), Some(eh)) = (rr, rh.eta) {
        let (c, iss) = rr.congestion(h, &rh.flow.loads, eh, opts.delta);
        reroute = Some(c);
        issues.extend(iss);
    }
    Ok(Eval { eta_g, eta_h, ratio, reroute, issues, approximate })
}

fn demand_sets(k: usize, g: &Graph<f64>, opts: &VerifyOptions, rng: &mut ChaCha8Rng) -> Vec<(String, PosDemand)> {
    let mut out = Vec::new();
    for s in &opts.strategies {
        match s {
            Strategy::Uniform => {
                let mut d = Vec::new();
                for a in 0..k {
                    for b in a + 1..k {
                        d.push((a, b, 1.0 / k as f64));
                    }
                }
                out.push(("uniform".into(), d));
            }
            Strategy::Gravity => {
                let w: Vec<f64> = g.terminals().iter().map(|&t| g.degree_cap(t)).collect();
                let total: f64 = w.iter().sum();
                let mut d = Vec::new();
                for a in 0..k {
                    for b in a + 1..k {
                        if w[a] * w[b] > 0.0 {
                            d.push((a, b, w[a] * w[b] / total));
                        }
                    }
                }
                out.push(("gravity".into(), d));
            }
            Strategy::Matching => {
                let mut p: Vec<usize> = (0..k).collect();
                for _ in 0..opts.samples {
                    p.shuffle(rng);
                    let d = p.chunks(2).filter(|c| c.len() == 2).map(|c| (c[0].min(c[1]), c[0].max(c[1]), 1.0)).collect();
                    out.push(("matching".into(), d));
                }
            }
            Strategy::Adversarial => {}
        }
    }
    out
}

/// Congestion ratios of G against H over sampled demand sets. With a
/// reroute context every H flow is also mapped back into G.
pub fn verify_flow_quality<S: Scalar>(
    g: &Graph<S>,
    h: &Graph<S>,
    claimed: Option<f64>,
    rr: Option<&Reroute>,
    opts: &VerifyOptions,
) -> Result<QualityReport> {
    check_terminals(g, h)?;
    let (gf, hf) = (g.to_f64(), h.to_f64());
    let k = g.k();
    let mut rep = QualityReport::new(Mode::Flow, opts.delta);
    rep.claimed_q = claimed;
    rep.exhaustive = false;
    if k < 2 {
        return Ok(rep);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sets = demand_sets(k, &gf, opts, &mut rng);
    let mut evals: Vec<(String, PosDemand, Eval)> = sets
        .into_par_iter()
        .map(|(kind, d)| evaluate(&gf, &hf, &d, rr, opts).map(|e| (kind, d, e)))
        .collect::<Result<_>>()?;
    if opts.strategies.contains(&Strategy::Adversarial) {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        let mut w: Vec<f64> = pairs.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
        let mk = |w: &[f64]| -> PosDemand {
            pairs.iter().zip(w).filter(|(_, &x)| x > 0.0).map(|(&(a, b), &x)| (a, b, x)).collect()
        };
        let mut best = f64::NEG_INFINITY;
        for _ in 0..opts.adversarial_steps {
            let mut cand = w.clone();
            let i = rng.gen_range(0..pairs.len());
            cand[i] = match rng.gen_range(0..3) {
                0 => 0.0,
                1 => cand[i] * rng.gen_range(0.0..3.0),
                _ => cand[i] + 1.0,
            };
            if cand.iter().all(|&x| x <= 0.0) {
                continue;
            }
            let d = mk(&cand);
            let e = evaluate(&gf, &hf, &d, rr, opts)?;
            if e.ratio >= best {
                best = e.ratio;
                w = cand;
            }
            evals.push(("adversarial".into(), d, e));
        }
    }
    let mut approximate = false;
    for (id, (kind, d, e)) in evals.into_iter().enumerate() {
        approximate |= e.approximate;
        for i in e.issues {
            rep.violations.push(format!("test {id} ({kind}): {i}"));
        }
        if let Some(q) = claimed {
            if e.eta_g > q * e.eta_h * (1.0 + 2.0 * opts.delta) {
                rep.violations.push(format!("test {id} ({kind}): upper side: eta_G {} above {q} eta_H {}", e.eta_g, e.eta_h));
            }
        }
        rep.q_observed = rep.q_observed.max(e.ratio);
        rep.tests.push(TestRecord {
            id,
            kind,
            input: describe(&d),
            g_value: e.eta_g,
            h_value: e.eta_h,
            ratio: e.ratio,
            reroute: e.reroute,
        });
    }
    if approximate {
        rep.budget_flags.push("some demands were routed by multiplicative weights (approximate)".into());
    }
    Ok(rep)
}

/// The integral graph the clusters live on, and the factor H is scaled by.
/// Recomputed from G and the claim alone.
pub fn expected_base<S: Scalar>(g: &Graph<S>, claim: &Claim<S>) -> Result<(Graph<S>, S)> {
    let Some(eps) = claim.eps.clone() else {
        return Ok((g.clone(), S::one()));
    };
    if !eps.is_pos() {
        return Err(Error::Input("eps must be positive".into()));
    }
    let cap_c = g.terminal_capacity();
    let (factor, scale) = match claim.mode {
        Mode::Cut => {
            let e = eps / S::from_int(3);
            (S::one() / e.clone(), e)
        }
        Mode::Flow => {
            let unit = g.edges().iter().all(|e| e.cap.is_one()) && g.terminals_have_single_edge();
            if unit {
                return Ok((g.clone(), S::one()));
            }
            let two_eta = S::from_int(2 * claim.eta_star);
            (two_eta.clone() / eps.clone(), eps / two_eta)
        }
    };
    let mut base = Graph::new(g.n());
    for e in g.edges() {
        let m = (factor.clone() * S::min_of(e.cap.clone(), cap_c.clone())).ceil();
        if m.is_pos() {
            base.add_edge(e.u, e.v, m)?;
        }
    }
    base.set_terminals(g.terminals())?;
    Ok((base, scale))
}

/// Cluster sanity and H == scale * contract(base, clusters).
pub fn check_structure<S: Scalar>(g: &Graph<S>, h: &Graph<S>, claim: &Claim<S>) -> Result<(Vec<String>, Graph<S>, S)> {
    let (base, scale) = expected_base(g, claim)?;
    let mut v = Vec::new();
    let mut owner = vec![usize::MAX; base.n()];
    for (ci, c) in claim.clusters.iter().enumerate() {
        if c.is_empty() {
            v.push(format!("cluster {ci} is empty"));
        }
        for &x in c {
            if x >= base.n() {
                v.push(format!("cluster {ci}: vertex {x} out of range"));
            } else if base.is_terminal(x) {
                v.push(format!("cluster {ci}: contains terminal {x}"));
            } else if owner[x] != usize::MAX {
                v.push(format!("vertex {x} lies in clusters {} and {ci}", owner[x]));
            } else {
                owner[x] = ci;
            }
        }
    }
    if !v.is_empty() {
        return Ok((v, base, scale));
    }
    for (ci, c) in claim.clusters.iter().enumerate() {
        if !base.is_connected_set(c) {
            v.push(format!("cluster {ci} is not connected"));
        }
    }
    for x in 0..base.n() {
        if !base.is_terminal(x) && owner[x] == usize::MAX {
            v.push(format!("non-terminal {x} is in no cluster"));
        }
    }
    let c = base.contract(&claim.clusters)?;
    let want = c.graph.map_caps(|x| x.clone() * scale.clone());
    if want.n() != h.n() {
        v.push(format!("H has {} vertices, expected {}", h.n(), want.n()));
    }
    if want.terminals() != h.terminals() {
        v.push("terminal list of H differs from the contraction".into());
    }
    if want.m() != h.m() {
        v.push(format!("H has {} edges, expected {}", h.m(), want.m()));
    }
    for (i, (a, b)) in want.edges().iter().zip(h.edges()).enumerate() {
        if (a.u, a.v) != (b.u, b.v) && (a.u, a.v) != (b.v, b.u) {
            v.push(format!("H edge {i} joins {}-{}, expected {}-{}", b.u, b.v, a.u, a.v));
        } else if a.cap != b.cap {
            v.push(format!("H edge {i} has capacity {}, expected {}", b.cap, a.cap));
        }
    }
    Ok((v, base, scale))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CertRecheck {
    pub violations: Vec<String>,
    pub budget_flags: Vec<String>,
    pub max_congestion: f64,
}

/// Re-evaluate each cluster's stored router flow and re-certify
/// 1/3-well-linkedness where the budget allows.
pub fn recheck_router_certificates<S: Scalar>(
    base: &Graph<S>,
    clusters: &[Vec<VertexId>],
    certs: &[RouterCertificate<S>],
    eta_star: i64,
    budget_exp: u32,
) -> CertRecheck {
    let mut out = CertRecheck::default();
    if certs.len() != clusters.len() {
        out.violations.push(format!("{} certificates for {} clusters", certs.len(), clusters.len()));
        return out;
    }
    let third = S::from_frac(1, 3);
    let per: Vec<(Vec<String>, Vec<String>, f64)> = clusters
        .par_iter()
        .zip(certs.par_iter())
        .enumerate()
        .map(|(ci, (c, cert))| {
            let mut viol = Vec::new();
            let mut flags = Vec::new();
            let mut sorted = c.clone();
            sorted.sort_unstable();
            if sorted != cert.members {
                viol.push(format!("cluster {ci}: certificate members differ from the cluster"));
            }
            viol.extend(recheck_certificate(base, cert, eta_star).into_iter().map(|s| format!("cluster {ci}: {s}")));
            match crate::flow::is_well_linked(base, &sorted, &third, budget_exp) {
                Ok(WellLinked::Yes) => {}
                Ok(WellLinked::No(cut)) => viol.push(format!("cluster {ci}: not 1/3-well-linked (sparsity {})", cut.sparsity)),
                Ok(WellLinked::Unknown) => flags.push(format!("cluster {ci}: 1/3-well-linkedness not certified within budget")),
                Err(e) => flags.push(format!("cluster {ci}: {e}")),
            }
            (viol, flags, cert.congestion.to_f64())
        })
        .collect();
    for (v, f, c) in per {
        out.violations.extend(v);
        out.budget_flags.extend(f);
        out.max_congestion = out.max_congestion.max(c);
    }
    out
}

/// Compare stored per-cluster congestion values with certificates.
pub fn check_stored_etas<S: Scalar>(certs: &[RouterCertificate<S>], stored: &[(usize, S)]) -> Vec<String> {
    let mut v = Vec::new();
    if stored.len() != certs.len() {
        v.push(format!("{} stored certificate values for {} clusters", stored.len(), certs.len()));
    }
    for (c, eta) in stored {
        match certs.get(*c) {
            Some(cert) if cert.congestion.approx_eq(eta) => {}
            Some(cert) => v.push(format!("cluster {c}: stored eta {eta}, recomputed {}", cert.congestion)),
            None => v.push(format!("stored eta for missing cluster {c}")),
        }
    }
    v
}

/// Full check of a sparsifier: structure, certificates (flow mode) and
/// quality. Missing certificates are recomputed from the clusters.
pub fn verify_sparsifier<S: Scalar>(
    g: &Graph<S>,
    h: &Graph<S>,
    claim: &Claim<S>,
    certs: Option<&[RouterCertificate<S>]>,
    opts: &VerifyOptions,
) -> Result<QualityReport> {
    let (structure, base, scale) = check_structure(g, h, claim)?;
    let sound = structure.is_empty();
    let mut rep = match claim.mode {
        Mode::Cut => verify_cut_quality(g, h, Some(&claim.quality), opts)?.0,
        Mode::Flow => {
            let mut extra = CertRecheck::default();
            let mut rr = None;
            if sound {
                let owned: Vec<RouterCertificate<S>>;
                let certs = match certs {
                    Some(c) => c,
                    None => {
                        let params = FlowParams { eta_star: claim.eta_star, budget_exp: opts.budget_exp, ..FlowParams::aggressive() };
                        owned = claim
                            .clusters
                            .par_iter()
                            .map(|c| uniform_router_check(&base, c, &params))
                            .collect::<Result<_>>()?;
                        &owned
                    }
                };
                extra = recheck_router_certificates(&base, &claim.clusters, certs, claim.eta_star, opts.budget_exp);
                if extra.violations.is_empty() {
                    rr = Some(Reroute::new(&base, &scale, &claim.clusters, certs, claim.eta_star)?);
                }
            }
            let mut r = verify_flow_quality(g, h, Some(claim.quality.to_f64()), rr.as_ref(), opts)?;
            r.violations.splice(0..0, extra.violations);
            r.budget_flags.extend(extra.budget_flags);
            r
        }
    };
    rep.violations.splice(0..0, structure.into_iter().map(|s| format!("structure: {s}")));
    Ok(rep)
}
