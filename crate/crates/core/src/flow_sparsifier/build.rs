//! Router-based flow sparsifier builders.

use super::params::{FlowParams, Profile};
use super::router::{is_good_router, RouterCertificate, WlStatus};
use super::search::{find_contractible_or_witness, terminal_units, SearchOutcome, SearchTrace};
use super::witness::{verify_witness, witness_to_flow};
use crate::cut_sparsifier::steiner_clusters;
use crate::error::{Error, Result};
use crate::graph::{Contracted, Graph, VertexId};
use crate::scalar::Scalar;
use crate::wl::{strong_decompose, DecompOptions};
use rayon::prelude::*;

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ContractionRecord {
    pub set_size: usize,
    pub v_before: usize,
    pub v_after: usize,
    pub k_prime: i64,
    pub k_pow2: i64,
    pub pieces: usize,
    pub sum_f: f64,
    /// 128 F(k'') for the ledger check.
    pub ledger_bound: f64,
    pub ledger_ok: bool,
    pub fired: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct WitnessRecord {
    pub kind: u8,
    pub issues: Vec<String>,
    /// Congestion of the induced concurrent flow, if it could be built.
    pub congestion: Option<f64>,
    pub bound: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct WellLinkedRun {
    pub k: i64,
    pub f_k: f64,
    pub n_inner: usize,
    pub steiner_out: usize,
    pub size_bound_met: bool,
    pub exit: String,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct BuildReport {
    pub runs: Vec<WellLinkedRun>,
    pub contractions: Vec<ContractionRecord>,
    pub searches: Vec<SearchTrace>,
    pub witnesses: Vec<WitnessRecord>,
    /// Clusters replaced by singletons because their certificate failed.
    pub sanitized: usize,
}

impl BuildReport {
    fn merge(&mut self, o: BuildReport) {
        self.runs.extend(o.runs);
        self.contractions.extend(o.contractions);
        self.searches.extend(o.searches);
        self.witnesses.extend(o.witnesses);
        self.sanitized += o.sanitized;
    }
}

#[derive(Clone, Debug)]
pub struct FlowSparsifier<S> {
    pub h: Graph<S>,
    /// Graph the certificates refer to (G, or G with integral multiplicities).
    pub router_graph: Graph<S>,
    /// H = scale * contract(router_graph, clusters).
    pub scale: S,
    pub clusters: Vec<Vec<VertexId>>,
    pub certs: Vec<RouterCertificate<S>>,
    pub vertex_map: Vec<VertexId>,
    pub supernodes: Vec<VertexId>,
    pub edge_parent: Vec<usize>,
    pub quality: S,
    pub eps: Option<S>,
    pub profile: Profile,
    pub r: u64,
    pub eta_star: i64,
    pub report: BuildReport,
}

fn decomp_opts(params: &FlowParams) -> DecompOptions {
    DecompOptions { budget_exp: params.budget_exp, ..Default::default() }
}

/// Procedure Contract(G', S). Returns the new cluster family, or None when
/// the contraction does not shrink G' (only possible off the theoretical
/// constants).
pub fn contract_procedure<S: Scalar>(
    g: &Graph<S>,
    clusters: &[Vec<VertexId>],
    c: &Contracted<S>,
    set: &[VertexId],
    params: &FlowParams,
    rep: &mut BuildReport,
) -> Result<Option<Vec<Vec<VertexId>>>> {
    let v_before = c.graph.n();
    let first_super = c.supernodes.first().copied().unwrap_or(usize::MAX);
    let mut inv = vec![usize::MAX; c.graph.n()];
    for (v, &x) in c.vertex_map.iter().enumerate() {
        if x < first_super {
            inv[x] = v;
        }
    }
    let mut removed = vec![false; clusters.len()];
    let mut s_prime = Vec::new();
    for &v in set {
        if v >= first_super {
            removed[v - first_super] = true;
            s_prime.extend_from_slice(&clusters[v - first_super]);
        } else {
            s_prime.push(inv[v]);
        }
    }
    s_prime.sort_unstable();
    let k_prime = terminal_units_of_set(g, &s_prime)?;
    let (bundled, _) = g.bundle_parallel();
    let dec = strong_decompose(&bundled, &s_prime, &decomp_opts(params))?;
    let mut next: Vec<Vec<VertexId>> =
        clusters.iter().zip(&removed).filter(|(_, &r)| !r).map(|(c, _)| c.clone()).collect();
    let mut sum_f = 0.0;
    for z in &dec.clusters {
        let sd = g.subdivide_boundary(z)?;
        sum_f += params.f(terminal_units(&sd.graph)? as usize);
        for cl in well_linked_clusters(&sd.graph, params, rep)? {
            next.push(cl.iter().map(|&v| sd.inner[v]).collect());
        }
    }
    let after = g.contract(&next)?.graph.n();
    let k_pow2 = (k_prime.max(1) as u64).next_power_of_two() as i64;
    let ledger_bound = 128.0 * params.f(k_pow2 as usize);
    rep.contractions.push(ContractionRecord {
        set_size: set.len(),
        v_before,
        v_after: after,
        k_prime,
        k_pow2,
        pieces: dec.clusters.len(),
        sum_f,
        ledger_bound,
        ledger_ok: sum_f <= ledger_bound,
        fired: after < v_before,
    });
    if after >= v_before {
        if params.profile == Profile::Theoretical {
            return Err(Error::Internal(format!(
                "contraction did not shrink the graph ({v_before} -> {after}); decomposition:\n{}",
                dec.dump()
            )));
        }
        return Ok(None);
    }
    Ok(Some(next))
}

fn terminal_units_of_set<S: Scalar>(g: &Graph<S>, set: &[VertexId]) -> Result<i64> {
    g.out_capacity(&g.mask_of(set))
        .to_i64_exact()
        .ok_or_else(|| Error::Precondition("integral capacities required".into()))
}

/// Good-router clusters covering V \ T of a graph whose terminals have one
/// edge each and whose V \ T is 1/3-well-linked.
pub fn well_linked_clusters<S: Scalar>(
    g: &Graph<S>,
    params: &FlowParams,
    rep: &mut BuildReport,
) -> Result<Vec<Vec<VertexId>>> {
    let k = terminal_units(g)?;
    let inner = g.non_terminals();
    let f_k = params.f(k as usize);
    let mut run = WellLinkedRun {
        k,
        f_k,
        n_inner: inner.len(),
        steiner_out: inner.len(),
        size_bound_met: inner.len() as f64 <= f_k,
        exit: String::new(),
    };
    if inner.is_empty() {
        run.exit = "empty".into();
        rep.runs.push(run);
        return Ok(vec![]);
    }
    let star = |run: &mut WellLinkedRun, why: &str, rep: &mut BuildReport| {
        run.exit = why.into();
        run.steiner_out = 1;
        run.size_bound_met = 1.0 <= f_k;
        rep.runs.push(run.clone());
        Ok(vec![inner.clone()])
    };
    if k <= 4 {
        return star(&mut run, "k<=4", rep);
    }
    let mut checked: Option<bool> = None;
    if params.precheck {
        let ok = is_good_router(g, &inner, params)?.0;
        if ok {
            return star(&mut run, "precheck", rep);
        }
        checked = Some(ok);
    }
    let mut clusters: Vec<Vec<VertexId>> = Vec::new();
    let mut exit = String::from("size bound");
    loop {
        let c = g.contract(&clusters)?;
        let count = c.graph.n() - c.graph.k();
        if count as f64 <= f_k {
            break;
        }
        let mut tr = SearchTrace::default();
        let out = find_contractible_or_witness(&c.graph, params, &mut tr)?;
        rep.searches.push(tr);
        match out {
            SearchOutcome::Contractible(s) => {
                if let Some(next) = contract_procedure(g, &clusters, &c, &s, params, rep)? {
                    clusters = next;
                    continue;
                }
                exit = "stalled contraction".into();
            }
            SearchOutcome::Witness(w) => {
                let (issues, _) = verify_witness(&c.graph, &w, params)?;
                let lifted = w.lift(&c, &clusters);
                let bound = if w.kind() == 1 { 10.0 } else { 34.0 };
                let (congestion, error) = match witness_to_flow(g, &lifted, &params.routing) {
                    Ok(f) => (Some(f.congestion.to_f64()), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                rep.witnesses.push(WitnessRecord { kind: w.kind(), issues, congestion, bound, error });
                exit = format!("witness type {}", w.kind());
            }
            SearchOutcome::Inconclusive(m) => exit = format!("inconclusive: {m}"),
        }
        let ok = match checked {
            Some(ok) => ok,
            None => is_good_router(g, &inner, params)?.0,
        };
        if ok {
            return star(&mut run, &format!("{exit}; router"), rep);
        }
        break;
    }
    let mut covered = vec![false; g.n()];
    for c in &clusters {
        for &v in c {
            covered[v] = true;
        }
    }
    for &v in &inner {
        if !covered[v] {
            clusters.push(vec![v]);
        }
    }
    run.steiner_out = clusters.len();
    run.size_bound_met = clusters.len() as f64 <= f_k;
    run.exit = exit;
    rep.runs.push(run);
    Ok(clusters)
}

/// Certificates for every cluster; failing clusters are split into singletons.
fn certify<S: Scalar>(
    g: &Graph<S>,
    clusters: Vec<Vec<VertexId>>,
    params: &FlowParams,
    rep: &mut BuildReport,
) -> Result<(Vec<Vec<VertexId>>, Vec<RouterCertificate<S>>)> {
    let checked: Vec<Result<(Vec<VertexId>, bool, Option<RouterCertificate<S>>)>> = clusters
        .into_par_iter()
        .map(|mut c| {
            c.sort_unstable();
            let (ok, cert) = is_good_router(g, &c, params)?;
            Ok((c, ok, cert))
        })
        .collect();
    let mut out_c = Vec::new();
    let mut out_r = Vec::new();
    for item in checked {
        let (c, ok, cert) = item?;
        match cert {
            Some(cert) if ok && cert.well_linked == WlStatus::Certified => {
                out_c.push(c);
                out_r.push(cert);
            }
            _ => {
                rep.sanitized += 1;
                for v in c {
                    let (_, cert) = is_good_router(g, &[v], params)?;
                    out_c.push(vec![v]);
                    out_r.push(cert.expect("single vertex is connected"));
                }
            }
        }
    }
    Ok((out_c, out_r))
}

fn assemble<S: Scalar>(
    router_graph: Graph<S>,
    clusters: Vec<Vec<VertexId>>,
    scale: S,
    quality: S,
    eps: Option<S>,
    params: &FlowParams,
    mut rep: BuildReport,
) -> Result<FlowSparsifier<S>> {
    let (clusters, certs) = certify(&router_graph, clusters, params, &mut rep)?;
    let c = router_graph.contract(&clusters)?;
    let h = c.graph.map_caps(|x| x.clone() * scale.clone());
    Ok(FlowSparsifier {
        h,
        router_graph,
        scale,
        clusters,
        certs,
        vertex_map: c.vertex_map,
        supernodes: c.supernodes,
        edge_parent: c.edge_parent,
        quality,
        eps,
        profile: params.profile,
        r: params.r,
        eta_star: params.eta_star,
        report: rep,
    })
}

fn unit_clusters<S: Scalar>(g: &Graph<S>, params: &FlowParams) -> Result<(Vec<Vec<VertexId>>, BuildReport)> {
    let (bundled, _) = g.bundle_parallel();
    let xs = steiner_clusters(&bundled, &decomp_opts(params))?;
    let parts: Vec<Result<(Vec<Vec<VertexId>>, BuildReport)>> = xs
        .par_iter()
        .map(|x| {
            let sd = g.subdivide_boundary(x)?;
            let mut rep = BuildReport::default();
            let cl = well_linked_clusters(&sd.graph, params, &mut rep)?;
            Ok((cl.into_iter().map(|c| c.iter().map(|&v| sd.inner[v]).collect()).collect(), rep))
        })
        .collect();
    let mut clusters = Vec::new();
    let mut rep = BuildReport::default();
    for p in parts {
        let (c, r) = p?;
        clusters.extend(c);
        rep.merge(r);
    }
    Ok((clusters, rep))
}

/// Quality-68 restricted flow sparsifier of an integral graph whose
/// terminals have exactly one incident edge.
pub fn build_flow_sparsifier_unit<S: Scalar>(g: &Graph<S>, params: &FlowParams) -> Result<FlowSparsifier<S>> {
    if !g.is_integral() {
        return Err(Error::Precondition("unit builder needs integral capacities".into()));
    }
    if !g.terminals_have_single_edge() {
        return Err(Error::Precondition("unit builder needs terminals with exactly one edge".into()));
    }
    let (clusters, rep) = unit_clusters(g, params)?;
    let q = S::from_int(2 * params.eta_star);
    assemble(g.clone(), clusters, S::one(), q, None, params, rep)
}

/// Integral multiplicities ceil((2 eta* / eps) min(c_e, C)), C the terminal capacity.
pub fn flow_multiplicities<S: Scalar>(g: &Graph<S>, eps: &S, eta_star: i64) -> Result<Vec<i64>> {
    let cap = g.terminal_capacity();
    let f = S::from_int(2 * eta_star) / eps.clone();
    g.edges()
        .iter()
        .map(|e| {
            let c = S::min_of(e.cap.clone(), cap.clone());
            crate::scalar::ceil_to_i64(&(f.clone() * c)).ok_or_else(|| Error::Input("capacity too large".into()))
        })
        .collect()
}

/// Quality-(68 + eps) restricted flow sparsifier for capacities >= 1.
pub fn build_flow_sparsifier<S: Scalar>(g: &Graph<S>, eps: &S, params: &FlowParams) -> Result<FlowSparsifier<S>> {
    if !(eps.is_pos() && *eps < S::one()) {
        return Err(Error::Input("eps must lie in (0, 1)".into()));
    }
    if g.edges().iter().any(|e| e.cap < S::one()) {
        return Err(Error::Precondition("capacities must be at least 1".into()));
    }
    let q = S::from_int(2 * params.eta_star) + eps.clone();
    if g.edges().iter().all(|e| e.cap.is_one()) && g.terminals_have_single_edge() {
        let mut sp = build_flow_sparsifier_unit(g, params)?;
        sp.quality = q;
        sp.eps = Some(eps.clone());
        return Ok(sp);
    }
    let mult = flow_multiplicities(g, eps, params.eta_star)?;
    let mut router_graph: Graph<S> = Graph::new(g.n());
    let mut split: Graph<S> = Graph::new(g.n());
    for (e, ed) in g.edges().iter().enumerate() {
        let c = S::from_int(mult[e]);
        router_graph.add_edge(ed.u, ed.v, c.clone())?;
        let u = if g.is_terminal(ed.u) { split.add_vertex() } else { ed.u };
        let v = if g.is_terminal(ed.v) { split.add_vertex() } else { ed.v };
        split.add_edge(u, v, c)?;
    }
    router_graph.set_terminals(g.terminals())?;
    let split_terms: Vec<VertexId> = g.terminals().iter().copied().chain(g.n()..split.n()).collect();
    split.set_terminals(&split_terms)?;
    let (clusters, rep) = unit_clusters(&split, params)?;
    let scale = eps.clone() / S::from_int(2 * params.eta_star);
    assemble(router_graph, clusters, scale, q, Some(eps.clone()), params, rep)
}
