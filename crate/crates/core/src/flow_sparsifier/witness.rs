//! Type-1 and type-2 witnesses and the concurrent flows they induce.

use super::params::FlowParams;
use super::router::local_graph;
use crate::error::{Error, Result};
use crate::flow::{
    decompose_paths, max_flow, route_commodities, sparsest_cut, Commodity, FlowPath, FlowSolution, RoutingOptions,
};
use crate::graph::{Contracted, EdgeId, Graph, VertexId};
use crate::scalar::Scalar;
use crate::wl::below_log_threshold;
use std::collections::BTreeMap;

/// A walk that starts at `terminal`; its last edge is the target edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub terminal: VertexId,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Type1 {
        sets: Vec<Vec<VertexId>>,
        /// paths[j] joins ceil(k/2) distinct terminals to distinct edges of out(sets[j]).
        paths: Vec<Vec<Walk>>,
    },
    Type2 {
        set: Vec<VertexId>,
        groups: Vec<Vec<EdgeId>>,
        t_star: Vec<VertexId>,
        /// paths[j] joins t_star one-to-one to groups[j] with congestion <= 2.
        paths: Vec<Vec<Walk>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum WlCheck {
    Certified,
    Violated,
    Unverified,
}

impl Witness {
    pub fn kind(&self) -> u8 {
        match self {
            Witness::Type1 { .. } => 1,
            Witness::Type2 { .. } => 2,
        }
    }

    pub fn r(&self) -> usize {
        match self {
            Witness::Type1 { sets, .. } => sets.len(),
            Witness::Type2 { groups, .. } => groups.len(),
        }
    }

    /// Move a witness found in a contracted graph to the original graph.
    /// Walks are dropped; they are only meaningful in the contracted graph.
    pub fn lift<S: Scalar>(&self, c: &Contracted<S>, clusters: &[Vec<VertexId>]) -> Witness {
        let expand = |set: &[VertexId]| -> Vec<VertexId> {
            let mut out = Vec::new();
            for &v in set {
                match c.supernodes.iter().position(|&s| s == v) {
                    Some(ci) => out.extend_from_slice(&clusters[ci]),
                    None => out.extend(c.vertex_map.iter().position(|&x| x == v)),
                }
            }
            out.sort_unstable();
            out
        };
        let inv_t = |t: VertexId| c.vertex_map.iter().position(|&x| x == t).unwrap_or(t);
        match self {
            Witness::Type1 { sets, .. } => Witness::Type1 { sets: sets.iter().map(|s| expand(s)).collect(), paths: vec![] },
            Witness::Type2 { set, groups, t_star, .. } => Witness::Type2 {
                set: expand(set),
                groups: groups.iter().map(|gr| gr.iter().map(|&e| c.edge_parent[e]).collect()).collect(),
                t_star: t_star.iter().map(|&t| inv_t(t)).collect(),
                paths: vec![],
            },
        }
    }
}

/// G[set] with one pendant terminal per edge of `edges` (which must leave `set`).
pub fn edge_instance<S: Scalar>(g: &Graph<S>, set: &[VertexId], edges: &[EdgeId]) -> Result<Graph<S>> {
    let (mut h, _) = local_graph(g, set);
    let mask = g.mask_of(set);
    for &e in edges {
        let ed = g.edge(e);
        let inside = match (mask[ed.u], mask[ed.v]) {
            (true, false) => ed.u,
            (false, true) => ed.v,
            _ => return Err(Error::Precondition(format!("edge {e} does not leave the set"))),
        };
        let li = set.binary_search(&inside).map_err(|_| Error::Precondition("set must be sorted".into()))?;
        let t = h.add_vertex();
        h.add_edge(li, t, ed.cap.clone())?;
        h.add_terminal(t)?;
    }
    Ok(h)
}

/// Whether the instance is alpha_W(z)-well-linked with alpha_W(z) = 1/(128 max(1, log2 z)).
pub fn log_well_linked<S: Scalar>(inst: &Graph<S>, z: i64, budget_exp: u32) -> Result<WlCheck> {
    let sc = sparsest_cut(inst, budget_exp)?;
    if sc.unsplittable {
        return Ok(WlCheck::Certified);
    }
    Ok(match sc.cut {
        None => WlCheck::Certified,
        Some(c) if below_log_threshold(&c.sparsity, z, 128) => WlCheck::Violated,
        Some(_) if sc.exact => WlCheck::Certified,
        Some(_) => WlCheck::Unverified,
    })
}

/// End vertex of a walk, or None if it is not a walk from its terminal.
pub fn walk_end<S: Scalar>(g: &Graph<S>, w: &Walk) -> Option<VertexId> {
    let mut x = w.terminal;
    for &e in &w.edges {
        if e >= g.m() {
            return None;
        }
        let ed = g.edge(e);
        if ed.u == x {
            x = ed.v;
        } else if ed.v == x {
            x = ed.u;
        } else {
            return None;
        }
    }
    Some(x)
}

fn check_walks<S: Scalar>(
    g: &Graph<S>,
    tag: &str,
    walks: &[Walk],
    count: usize,
    targets: &[EdgeId],
    max_cong: i64,
    terminals: Option<&[VertexId]>,
    issues: &mut Vec<String>,
) {
    if walks.len() != count {
        issues.push(format!("{tag}: {} walks, expected {count}", walks.len()));
    }
    let mut used_t = Vec::new();
    let mut used_e = Vec::new();
    let mut load: BTreeMap<EdgeId, i64> = BTreeMap::new();
    for w in walks {
        if !g.is_terminal(w.terminal) {
            issues.push(format!("{tag}: walk starts at non-terminal {}", w.terminal));
        }
        if let Some(ts) = terminals {
            if !ts.contains(&w.terminal) {
                issues.push(format!("{tag}: walk starts outside T*"));
            }
        }
        if walk_end(g, w).is_none() {
            issues.push(format!("{tag}: broken walk from {}", w.terminal));
            continue;
        }
        match w.edges.last() {
            Some(e) if targets.contains(e) => used_e.push(*e),
            _ => issues.push(format!("{tag}: walk from {} does not end on a target edge", w.terminal)),
        }
        used_t.push(w.terminal);
        for &e in &w.edges {
            *load.entry(e).or_insert(0) += 1;
        }
    }
    used_t.sort_unstable();
    used_e.sort_unstable();
    if used_t.windows(2).any(|p| p[0] == p[1]) {
        issues.push(format!("{tag}: terminal used twice"));
    }
    if used_e.windows(2).any(|p| p[0] == p[1]) {
        issues.push(format!("{tag}: target edge used twice"));
    }
    for (e, l) in load {
        let cap = g.edge(e).cap.clone();
        if S::from_int(l) > cap * S::from_int(max_cong) {
            issues.push(format!("{tag}: edge {e} carries {l} walks, above congestion {max_cong}"));
        }
    }
}

/// Check a witness against its definition in `g`. Returns the problems found.
pub fn verify_witness<S: Scalar>(g: &Graph<S>, w: &Witness, params: &FlowParams) -> Result<(Vec<String>, Vec<WlCheck>)> {
    let k = g.k();
    let mut issues = Vec::new();
    let mut wl = Vec::new();
    let mut seen = vec![false; g.n()];
    let mut claim = |set: &[VertexId], issues: &mut Vec<String>| {
        for &v in set {
            if v >= g.n() || g.is_terminal(v) || seen[v] {
                issues.push(format!("vertex {v} is a terminal, out of range or repeated"));
            } else {
                seen[v] = true;
            }
        }
        if set.is_empty() || set.windows(2).any(|p| p[0] >= p[1]) {
            issues.push("set must be non-empty and sorted".into());
        }
    };
    match w {
        Witness::Type1 { sets, paths } => {
            let z = params.k_star(k).ceil() as i64;
            if paths.len() != sets.len() {
                issues.push("path systems and sets differ in number".into());
            }
            for (j, s) in sets.iter().enumerate() {
                let before = issues.len();
                claim(s, &mut issues);
                if issues.len() > before {
                    return Ok((issues, wl));
                }
                let out = g.out_edges(&g.mask_of(s));
                if let Some(p) = paths.get(j) {
                    check_walks(g, &format!("P{j}"), p, k.div_ceil(2), &out, 1, None, &mut issues);
                }
                let st = log_well_linked(&g.subdivide_boundary(s)?.graph, z, params.budget_exp)?;
                if st == WlCheck::Violated {
                    issues.push(format!("set {j} is not alpha_W(k*)-well-linked"));
                }
                wl.push(st);
            }
        }
        Witness::Type2 { set, groups, t_star, paths } => {
            claim(set, &mut issues);
            if !issues.is_empty() {
                return Ok((issues, wl));
            }
            let q = k.div_ceil(4);
            let out = g.out_edges(&g.mask_of(set));
            let mut all: Vec<EdgeId> = groups.iter().flatten().copied().collect();
            for (j, gr) in groups.iter().enumerate() {
                if gr.len() != q {
                    issues.push(format!("group {j} has {} edges, expected {q}", gr.len()));
                }
            }
            if all.iter().any(|e| !out.contains(e)) {
                issues.push("group edge does not leave the set".into());
            }
            all.sort_unstable();
            if all.windows(2).any(|p| p[0] == p[1]) {
                issues.push("groups overlap".into());
                return Ok((issues, wl));
            }
            let mut ts = t_star.clone();
            ts.sort_unstable();
            ts.dedup();
            if ts.len() != q || ts.len() != t_star.len() || ts.iter().any(|&t| t >= g.n() || !g.is_terminal(t)) {
                issues.push(format!("T* must hold {q} distinct terminals"));
            }
            if paths.len() != groups.len() {
                issues.push("path systems and groups differ in number".into());
            }
            for (j, p) in paths.iter().enumerate() {
                if let Some(gr) = groups.get(j) {
                    check_walks(g, &format!("P{j}"), p, q, gr, 2, Some(t_star), &mut issues);
                }
            }
            if issues.is_empty() {
                let inst = edge_instance(g, set, &all)?;
                let st = log_well_linked(&inst, all.len() as i64, params.budget_exp)?;
                if st == WlCheck::Violated {
                    issues.push("set is not alpha_W-well-linked for its edge groups".into());
                }
                wl.push(st);
            }
        }
    }
    Ok((issues, wl))
}

struct Arrival<S> {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    at: VertexId,
    amount: S,
}

/// Route every terminal into `inner` through `entries`, one unit per terminal,
/// with capacities scaled by `mult`.
fn arrivals<S: Scalar>(
    g: &Graph<S>,
    inner: &[VertexId],
    entries: &[EdgeId],
    mult: i64,
) -> Result<Vec<Vec<Arrival<S>>>> {
    let n = g.n();
    let mask = g.mask_of(inner);
    let mut aux: Graph<S> = Graph::new(n);
    let mut parent = Vec::new();
    let m = S::from_int(mult);
    for (e, ed) in g.edges().iter().enumerate() {
        if !mask[ed.u] && !mask[ed.v] {
            aux.add_edge(ed.u, ed.v, ed.cap.clone() * m.clone())?;
            parent.push((e, usize::MAX));
        }
    }
    let mut sinks = Vec::new();
    for &e in entries {
        let ed = g.edge(e);
        let (x, y) = if mask[ed.v] { (ed.u, ed.v) } else { (ed.v, ed.u) };
        let s = aux.add_vertex();
        aux.add_edge(x, s, ed.cap.clone() * m.clone())?;
        parent.push((e, y));
        sinks.push(s);
    }
    let mut sources = Vec::new();
    for &t in g.terminals() {
        let s = aux.add_vertex();
        aux.add_edge(s, t, S::one())?;
        parent.push((usize::MAX, usize::MAX));
        sources.push(s);
    }
    let mf = max_flow(&aux, &sources, &sinks)?;
    if mf.value != S::from_count(g.k()) {
        return Err(Error::Internal(format!(
            "terminals reach the witness layer with flow {} < {}",
            mf.value,
            g.k()
        )));
    }
    let paths = decompose_paths(&aux, &mf.flow, &sources, &sinks);
    let mut out: Vec<Vec<Arrival<S>>> = (0..g.k()).map(|_| Vec::new()).collect();
    for p in paths {
        let ti = sources.iter().position(|&s| s == p.vertices[0]).expect("path starts at a source");
        let mut edges = Vec::new();
        let mut at = usize::MAX;
        for &ae in &p.edges[1..] {
            let (e, y) = parent[ae];
            edges.push(e);
            if y != usize::MAX {
                at = y;
            }
        }
        let mut vertices = p.vertices[1..p.vertices.len() - 1].to_vec();
        vertices.push(at);
        out[ti].push(Arrival { vertices, edges, at, amount: p.amount });
    }
    Ok(out)
}

fn reversed<S: Scalar>(p: &FlowPath<S>) -> FlowPath<S> {
    let mut q = p.clone();
    q.vertices.reverse();
    q.edges.reverse();
    q
}

/// Concurrent flow in which every terminal pair exchanges 1/k, built from the
/// witness layers. Loads are evaluated exactly on `g`.
pub fn witness_to_flow<S: Scalar>(g: &Graph<S>, w: &Witness, routing: &RoutingOptions) -> Result<FlowSolution<S>> {
    let k = g.k();
    if k < 2 {
        return Ok(FlowSolution::from_commodities(g, vec![], vec![]));
    }
    let (layers, mult): (Vec<(Vec<VertexId>, Vec<EdgeId>)>, i64) = match w {
        Witness::Type1 { sets, .. } => {
            (sets.iter().map(|s| (s.clone(), g.out_edges(&g.mask_of(s)))).collect(), 3)
        }
        Witness::Type2 { set, groups, .. } => (groups.iter().map(|gr| (set.clone(), gr.clone())).collect(), 6),
    };
    let r = layers.len() as i64;
    let base = S::from_frac(1, k as i64 * r);
    let ts = g.terminals().to_vec();
    let mut per_pair: BTreeMap<(usize, usize), Vec<FlowPath<S>>> = BTreeMap::new();
    for (inner, entries) in &layers {
        let arr = arrivals(g, inner, entries, mult)?;
        let (local, lparent) = local_graph(g, inner);
        let li = |v: VertexId| inner.binary_search(&v).expect("arrival inside the layer");
        let mut demand: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for a in 0..k {
            for b in a + 1..k {
                for p in &arr[a] {
                    for q in &arr[b] {
                        let (x, y) = (li(p.at), li(q.at));
                        if x != y {
                            let key = (x.min(y), x.max(y));
                            let amt = base.clone() * p.amount.clone() * q.amount.clone();
                            let d = demand.entry(key).or_insert_with(S::zero);
                            *d = d.clone() + amt;
                        }
                    }
                }
            }
        }
        let comms: Vec<(usize, usize, S)> = demand.iter().map(|(&(x, y), d)| (x, y, d.clone())).collect();
        let inner_paths: BTreeMap<(usize, usize), (S, Vec<FlowPath<S>>)> = if comms.is_empty() {
            BTreeMap::new()
        } else {
            let rt = route_commodities(&local, &comms, &[], routing)?;
            if rt.eta.is_none() {
                return Err(Error::Internal("witness layer is disconnected".into()));
            }
            rt.flow
                .commodities
                .into_iter()
                .map(|c| {
                    let ps = c
                        .paths
                        .into_iter()
                        .map(|p| FlowPath {
                            vertices: p.vertices.iter().map(|&v| inner[v]).collect(),
                            edges: p.edges.iter().map(|&e| lparent[e]).collect(),
                            amount: p.amount,
                        })
                        .collect();
                    ((c.a, c.b), (c.demand, ps))
                })
                .collect()
        };
        for a in 0..k {
            for b in a + 1..k {
                let slot = per_pair.entry((a, b)).or_default();
                for p in &arr[a] {
                    for q in &arr[b] {
                        let amt = base.clone() * p.amount.clone() * q.amount.clone();
                        let head = FlowPath { vertices: p.vertices.clone(), edges: p.edges.clone(), amount: S::zero() };
                        let tail = reversed(&FlowPath {
                            vertices: q.vertices.clone(),
                            edges: q.edges.clone(),
                            amount: S::zero(),
                        });
                        let (x, y) = (li(p.at), li(q.at));
                        if x == y {
                            slot.push(join(&[&head, &tail], amt));
                            continue;
                        }
                        let (d, ips) = &inner_paths[&(x.min(y), x.max(y))];
                        for ip in ips {
                            let mid = if x < y { ip.clone() } else { reversed(ip) };
                            let share = amt.clone() * ip.amount.clone() / d.clone();
                            slot.push(join(&[&head, &mid, &tail], share));
                        }
                    }
                }
            }
        }
    }
    let demand = S::from_frac(1, k as i64);
    let commodities = per_pair
        .into_iter()
        .map(|((a, b), paths)| Commodity { a: ts[a], b: ts[b], demand: demand.clone(), paths })
        .collect();
    Ok(FlowSolution::from_commodities(g, commodities, vec![]))
}

fn join<S: Scalar>(parts: &[&FlowPath<S>], amount: S) -> FlowPath<S> {
    let mut vertices = parts[0].vertices.clone();
    let mut edges = parts[0].edges.clone();
    for p in &parts[1..] {
        debug_assert_eq!(vertices.last(), p.vertices.first());
        vertices.extend_from_slice(&p.vertices[1..]);
        edges.extend_from_slice(&p.edges);
    }
    FlowPath { vertices, edges, amount }
}

/// Layered instances carrying a valid witness.
pub mod fixtures {
    use super::*;

    fn clique<S: Scalar>(g: &mut Graph<S>, vs: &[VertexId]) {
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                g.add_edge(vs[i], vs[j], S::one()).expect("valid");
            }
        }
    }

    /// k pendant terminals on hubs; every hub touches each of r cliques of size m.
    pub fn type1<S: Scalar>(k: usize, r: usize, m: usize) -> (Graph<S>, Witness) {
        let mut g = Graph::new(2 * k + r * m);
        let hub = |i: usize| k + i;
        let cl = |j: usize, i: usize| 2 * k + j * m + i;
        let mut t_edge = Vec::new();
        for i in 0..k {
            t_edge.push(g.add_edge(i, hub(i), S::one()).expect("valid"));
            g.add_terminal(i).expect("valid");
        }
        let mut sets = Vec::new();
        let mut paths = Vec::new();
        let mut link = vec![vec![0; k]; r];
        for j in 0..r {
            for i in 0..k {
                link[j][i] = g.add_edge(hub(i), cl(j, i % m), S::one()).expect("valid");
            }
        }
        for j in 0..r {
            let vs: Vec<VertexId> = (0..m).map(|i| cl(j, i)).collect();
            clique(&mut g, &vs);
            sets.push(vs);
            paths.push((0..k.div_ceil(2)).map(|i| Walk { terminal: i, edges: vec![t_edge[i], link[j][i]] }).collect());
        }
        (g, Witness::Type1 { sets, paths })
    }

    /// k pendant terminals on a hub clique; hub i has one edge into a clique A
    /// of size m. Group j holds the edges of hubs j q .. j q + q - 1.
    pub fn type2<S: Scalar>(k: usize, r: usize, m: usize) -> (Graph<S>, Witness) {
        let q = k.div_ceil(4);
        assert!(r * q <= k, "not enough hubs for the groups");
        let mut g = Graph::new(2 * k + m);
        let hub = |i: usize| k + i;
        let a = |i: usize| 2 * k + i;
        let mut t_edge = Vec::new();
        for i in 0..k {
            t_edge.push(g.add_edge(i, hub(i), S::one()).expect("valid"));
            g.add_terminal(i).expect("valid");
        }
        let mut hh = BTreeMap::new();
        for i in 0..k {
            for j in i + 1..k {
                hh.insert((i, j), g.add_edge(hub(i), hub(j), S::one()).expect("valid"));
            }
        }
        let into: Vec<EdgeId> = (0..k).map(|i| g.add_edge(hub(i), a(i % m), S::one()).expect("valid")).collect();
        let set: Vec<VertexId> = (0..m).map(a).collect();
        clique(&mut g, &set);
        let groups: Vec<Vec<EdgeId>> = (0..r).map(|j| (0..q).map(|i| into[j * q + i]).collect()).collect();
        let t_star: Vec<VertexId> = (0..q).collect();
        let paths = (0..r)
            .map(|j| {
                (0..q)
                    .map(|i| {
                        let h = j * q + i;
                        let mut edges = vec![t_edge[i]];
                        if h != i {
                            edges.push(hh[&(i.min(h), i.max(h))]);
                        }
                        edges.push(into[h]);
                        Walk { terminal: i, edges }
                    })
                    .collect()
            })
            .collect();
        (g, Witness::Type2 { set, groups, t_star, paths })
    }
}
