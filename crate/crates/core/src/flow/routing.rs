//! Minimum-congestion routing of symmetric demands.
//!
//! The edge formulation aggregates commodities by source. Solvers: the
//! exact simplex (small instances, exact scalars), an f64 sparse simplex,
//! or multiplicative weights for very large instances. In every case the
//! result is turned into explicit paths whose amounts sum exactly to the
//! demands, and the reported congestion is that of these paths.

use super::demand::DemandSet;
use super::maxflow::FlowPath;
use super::simplex::{Cmp, LinearProgram, LpOutcome};
use super::solution::{Commodity, FlowSolution};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::Scalar;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum RoutingMethod {
    Auto,
    Exact,
    Lp,
    Mwu,
}

#[derive(Clone, Debug)]
pub struct RoutingOptions {
    pub method: RoutingMethod,
    pub exact_var_limit: usize,
    pub lp_var_limit: usize,
    pub mwu_iters: usize,
}

impl Default for RoutingOptions {
    fn default() -> Self {
        RoutingOptions { method: RoutingMethod::Auto, exact_var_limit: 60, lp_var_limit: 40_000, mwu_iters: 400 }
    }
}

#[derive(Clone, Debug)]
pub struct Routing<S> {
    /// None when some demand joins disconnected vertices.
    pub eta: Option<S>,
    pub flow: FlowSolution<S>,
    pub method: RoutingMethod,
}

pub fn min_congestion_routing<S: Scalar>(g: &Graph<S>, d: &DemandSet<S>, opts: &RoutingOptions) -> Result<Routing<S>> {
    let comms: Vec<(VertexId, VertexId, S)> = d.iter().map(|(a, b, v)| (a, b, v.clone())).collect();
    route_commodities(g, &comms, &[], opts)
}

struct Group<S> {
    source: VertexId,
    sinks: Vec<(VertexId, S, usize)>,
    comp: usize,
}

/// Route `comms` (a, b, demand) on top of fixed `background` edge loads.
pub fn route_commodities<S: Scalar>(
    g: &Graph<S>,
    comms: &[(VertexId, VertexId, S)],
    background: &[S],
    opts: &RoutingOptions,
) -> Result<Routing<S>> {
    for (a, b, v) in comms {
        if *a >= g.n() || *b >= g.n() || a == b {
            return Err(Error::Precondition(format!("bad commodity ({a}, {b})")));
        }
        if v.is_negative() {
            return Err(Error::Precondition("negative demand".into()));
        }
    }
    if !background.is_empty() && background.len() != g.m() {
        return Err(Error::Precondition("background length differs from edge count".into()));
    }
    let bg: Vec<S> = background.to_vec();
    let mut comp = vec![usize::MAX; g.n()];
    for (ci, c) in g.components().iter().enumerate() {
        for &v in c {
            comp[v] = ci;
        }
    }
    let live: Vec<usize> = (0..comms.len()).filter(|&i| comms[i].2.is_pos()).collect();
    if live.iter().any(|&i| comp[comms[i].0] != comp[comms[i].1]) {
        let flow = FlowSolution { commodities: vec![], background: bg, loads: vec![], congestion: S::zero() };
        return Ok(Routing { eta: None, flow, method: opts.method });
    }
    let mut by_src: BTreeMap<VertexId, Vec<(VertexId, S, usize)>> = BTreeMap::new();
    for &i in &live {
        let (a, b, v) = &comms[i];
        by_src.entry(*a).or_default().push((*b, v.clone(), i));
    }
    let groups: Vec<Group<S>> =
        by_src.into_iter().map(|(source, sinks)| Group { source, comp: comp[source], sinks }).collect();
    let mut comp_edges: HashMap<usize, Vec<EdgeId>> = HashMap::new();
    for gr in &groups {
        comp_edges.entry(gr.comp).or_insert_with(|| (0..g.m()).filter(|&e| comp[g.edge(e).u] == gr.comp).collect());
    }
    let vars: usize = groups.iter().map(|gr| 2 * comp_edges[&gr.comp].len()).sum::<usize>() + 1;
    let method = match opts.method {
        RoutingMethod::Auto if groups.is_empty() => RoutingMethod::Exact,
        RoutingMethod::Auto if S::EXACT && vars <= opts.exact_var_limit => RoutingMethod::Exact,
        RoutingMethod::Auto if vars <= opts.lp_var_limit => RoutingMethod::Lp,
        RoutingMethod::Auto => RoutingMethod::Mwu,
        m => m,
    };
    let paths: Vec<Vec<FlowPath<S>>> = match method {
        RoutingMethod::Exact => {
            let lp = build_lp::<S>(g, &groups, &comp_edges, &bg);
            let x = match lp.solve() {
                LpOutcome::Optimal { x, .. } => x,
                o => return Err(Error::Internal(format!("routing LP not optimal: {o:?}"))),
            };
            paths_from_vars(g, &groups, &comp_edges, &x, comms.len())
        }
        RoutingMethod::Lp => {
            let lp = build_lp::<f64>(&g.to_f64(), &convert_groups(&groups), &comp_edges, &conv_vec(&bg));
            let x = solve_minilp(&lp)?;
            let gf = g.to_f64();
            let pf = paths_from_vars(&gf, &convert_groups(&groups), &comp_edges, &x, comms.len());
            pf.into_iter().map(|ps| ps.into_iter().map(|p| FlowPath { vertices: p.vertices, edges: p.edges, amount: quantize::<S>(p.amount) }).collect()).collect()
        }
        RoutingMethod::Mwu | RoutingMethod::Auto => mwu_paths(g, &groups, &bg, opts.mwu_iters, comms.len()),
    };
    let mut commodities = Vec::with_capacity(comms.len());
    for (i, (a, b, v)) in comms.iter().enumerate() {
        let ps = if v.is_pos() { normalize(g, paths[i].clone(), *a, *b, v) } else { Vec::new() };
        commodities.push(Commodity { a: *a, b: *b, demand: v.clone(), paths: ps });
    }
    let flow = FlowSolution::from_commodities(g, commodities, bg);
    Ok(Routing { eta: Some(flow.congestion.clone()), flow, method })
}

fn conv_vec<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64()).collect()
}

fn convert_groups<S: Scalar>(gs: &[Group<S>]) -> Vec<Group<f64>> {
    gs.iter()
        .map(|g| Group {
            source: g.source,
            comp: g.comp,
            sinks: g.sinks.iter().map(|(b, d, i)| (*b, d.to_f64(), *i)).collect(),
        })
        .collect()
}

fn quantize<S: Scalar>(x: f64) -> S {
    let q = (x * (1u64 << 40) as f64).round() as i64;
    S::from_frac(q.max(0), 1i64 << 40)
}

fn build_lp<T: Scalar>(
    g: &Graph<T>,
    groups: &[Group<T>],
    comp_edges: &HashMap<usize, Vec<EdgeId>>,
    bg: &[T],
) -> LinearProgram<T> {
    let mut lp = LinearProgram::new(0);
    let eta = lp.add_var(T::one());
    let mut base = Vec::new();
    let mut cap_rows: BTreeMap<EdgeId, Vec<(usize, T)>> = BTreeMap::new();
    for gr in groups {
        let edges = &comp_edges[&gr.comp];
        let b0 = lp.n_vars;
        base.push(b0);
        for _ in 0..2 * edges.len() {
            lp.add_var(T::zero());
        }
        let mut rows: BTreeMap<VertexId, Vec<(usize, T)>> = BTreeMap::new();
        for (j, &e) in edges.iter().enumerate() {
            let ed = g.edge(e);
            let (fwd, bwd) = (b0 + 2 * j, b0 + 2 * j + 1);
            rows.entry(ed.v).or_default().extend([(fwd, T::one()), (bwd, -T::one())]);
            rows.entry(ed.u).or_default().extend([(bwd, T::one()), (fwd, -T::one())]);
            cap_rows.entry(e).or_default().extend([(fwd, T::one()), (bwd, T::one())]);
        }
        let mut need: HashMap<VertexId, T> = HashMap::new();
        for (b, d, _) in &gr.sinks {
            let x = need.remove(b).unwrap_or_else(T::zero) + d.clone();
            need.insert(*b, x);
        }
        for (v, co) in rows {
            if v != gr.source {
                lp.add_row(co, Cmp::Eq, need.get(&v).cloned().unwrap_or_else(T::zero));
            }
        }
    }
    for (e, mut co) in cap_rows {
        co.push((eta, -g.edge(e).cap.clone()));
        let rhs = if bg.is_empty() { T::zero() } else { -bg[e].clone() };
        lp.add_row(co, Cmp::Le, rhs);
    }
    lp
}

fn solve_minilp(lp: &LinearProgram<f64>) -> Result<Vec<f64>> {
    use minilp::{ComparisonOp, OptimizationDirection, Problem};
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = lp.objective.iter().map(|&c| p.add_var(c, (0.0, f64::INFINITY))).collect();
    for (co, cmp, rhs) in &lp.rows {
        let expr: Vec<_> = co.iter().map(|&(j, c)| (vars[j], c)).collect();
        let op = match cmp {
            Cmp::Le => ComparisonOp::Le,
            Cmp::Eq => ComparisonOp::Eq,
            Cmp::Ge => ComparisonOp::Ge,
        };
        p.add_constraint(expr.as_slice(), op, *rhs);
    }
    let sol = p.solve().map_err(|e| Error::Internal(format!("LP solver: {e}")))?;
    Ok(vars.iter().map(|&v| *sol.var_value(v)).collect())
}

fn paths_from_vars<T: Scalar>(
    g: &Graph<T>,
    groups: &[Group<T>],
    comp_edges: &HashMap<usize, Vec<EdgeId>>,
    x: &[T],
    n_comms: usize,
) -> Vec<Vec<FlowPath<T>>> {
    let mut out = vec![Vec::new(); n_comms];
    let mut off = 1;
    for gr in groups {
        let edges = &comp_edges[&gr.comp];
        let mut flow = vec![T::zero(); g.m()];
        for (j, &e) in edges.iter().enumerate() {
            flow[e] = x[off + 2 * j].clone() - x[off + 2 * j + 1].clone();
        }
        off += 2 * edges.len();
        for (ci, p) in decompose_group(g, &mut flow, gr) {
            out[ci].push(p);
        }
    }
    out
}

/// Peel paths from `source` to sinks, each sink taking at most its need.
fn decompose_group<T: Scalar>(g: &Graph<T>, flow: &mut [T], gr: &Group<T>) -> Vec<(usize, FlowPath<T>)> {
    let mut need: HashMap<VertexId, Vec<(usize, T)>> = HashMap::new();
    for (b, d, i) in &gr.sinks {
        need.entry(*b).or_default().push((*i, d.clone()));
    }
    let floor = if T::EXACT { T::zero() } else { T::from_f64(1e-12) };
    let has_need = |need: &HashMap<VertexId, Vec<(usize, T)>>, v: VertexId| {
        need.get(&v).is_some_and(|l| l.iter().any(|(_, d)| *d > floor))
    };
    let mut out = Vec::new();
    for _ in 0..10 * (g.m() + gr.sinks.len() + 1) {
        let mut prev: Vec<Option<EdgeId>> = vec![None; g.n()];
        let mut seen = vec![false; g.n()];
        seen[gr.source] = true;
        let mut queue = std::collections::VecDeque::from([gr.source]);
        let mut hit = None;
        while let Some(x) = queue.pop_front() {
            if x != gr.source && has_need(&need, x) {
                hit = Some(x);
                break;
            }
            for &e in g.incident(x) {
                let ed = g.edge(e);
                let y = ed.other(x);
                let f = if ed.u == x { flow[e].clone() } else { -flow[e].clone() };
                if !seen[y] && f > floor {
                    seen[y] = true;
                    prev[y] = Some(e);
                    queue.push_back(y);
                }
            }
        }
        let Some(end) = hit else { break };
        let mut edges = Vec::new();
        let mut verts = vec![end];
        let mut x = end;
        while x != gr.source {
            let e = prev[x].unwrap();
            edges.push(e);
            x = g.edge(e).other(x);
            verts.push(x);
        }
        edges.reverse();
        verts.reverse();
        let mut amt: Option<T> = None;
        for (i, &e) in edges.iter().enumerate() {
            let f = if g.edge(e).u == verts[i] { flow[e].clone() } else { -flow[e].clone() };
            amt = Some(match amt {
                None => f,
                Some(a) => T::min_of(a, f),
            });
        }
        let slot = need.get_mut(&end).unwrap();
        let k = slot.iter().position(|(_, d)| *d > floor).unwrap();
        let amt = T::min_of(amt.unwrap(), slot[k].1.clone());
        slot[k].1 = slot[k].1.clone() - amt.clone();
        for (i, &e) in edges.iter().enumerate() {
            if g.edge(e).u == verts[i] {
                flow[e] = flow[e].clone() - amt.clone();
            } else {
                flow[e] = flow[e].clone() + amt.clone();
            }
        }
        out.push((slot[k].0, FlowPath { vertices: verts, edges, amount: amt }));
    }
    out
}

/// Shortest hop path, used when numerical noise leaves a demand unrouted.
fn bfs_path<S: Scalar>(g: &Graph<S>, a: VertexId, b: VertexId) -> Option<FlowPath<S>> {
    let mut prev: Vec<Option<EdgeId>> = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    seen[a] = true;
    let mut q = std::collections::VecDeque::from([a]);
    while let Some(x) = q.pop_front() {
        if x == b {
            break;
        }
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some(e);
                q.push_back(y);
            }
        }
    }
    if !seen[b] {
        return None;
    }
    let (mut edges, mut verts, mut x) = (Vec::new(), vec![b], b);
    while x != a {
        let e = prev[x]?;
        edges.push(e);
        x = g.edge(e).other(x);
        verts.push(x);
    }
    edges.reverse();
    verts.reverse();
    Some(FlowPath { vertices: verts, edges, amount: S::zero() })
}

/// Make path amounts sum exactly to `d` by adjusting the largest path.
fn normalize<S: Scalar>(g: &Graph<S>, mut ps: Vec<FlowPath<S>>, a: VertexId, b: VertexId, d: &S) -> Vec<FlowPath<S>> {
    ps.retain(|p| p.amount.is_pos());
    for p in ps.iter_mut() {
        if p.vertices[0] != a {
            p.vertices.reverse();
            p.edges.reverse();
        }
    }
    let sum = ps.iter().fold(S::zero(), |x, p| x + p.amount.clone());
    if ps.is_empty() {
        let mut p = bfs_path(g, a, b).expect("endpoints are connected");
        p.amount = d.clone();
        return vec![p];
    }
    let diff = d.clone() - sum.clone();
    let big = (0..ps.len()).max_by(|&i, &j| ps[i].amount.partial_cmp(&ps[j].amount).unwrap().then(j.cmp(&i))).unwrap();
    let adjusted = ps[big].amount.clone() + diff;
    if adjusted.is_negative() {
        let f = d.clone() / sum;
        for p in ps.iter_mut() {
            p.amount = p.amount.clone() * f.clone();
        }
    } else {
        ps[big].amount = adjusted;
    }
    ps
}

#[derive(PartialEq)]
struct HeapItem(f64, VertexId);
impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.partial_cmp(&self.0).unwrap_or(std::cmp::Ordering::Equal).then(o.1.cmp(&self.1))
    }
}

fn dijkstra<S: Scalar>(g: &Graph<S>, s: VertexId, len: &[f64]) -> Vec<Option<EdgeId>> {
    let mut dist = vec![f64::INFINITY; g.n()];
    let mut prev = vec![None; g.n()];
    dist[s] = 0.0;
    let mut h = BinaryHeap::from([HeapItem(0.0, s)]);
    while let Some(HeapItem(d, x)) = h.pop() {
        if d > dist[x] {
            continue;
        }
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            let nd = d + len[e];
            if nd < dist[y] {
                dist[y] = nd;
                prev[y] = Some(e);
                h.push(HeapItem(nd, y));
            }
        }
    }
    prev
}

/// Multiplicative weights: average of shortest-path routings under
/// exponential edge lengths.
fn mwu_paths<S: Scalar>(g: &Graph<S>, groups: &[Group<S>], bg: &[S], iters: usize, n_comms: usize) -> Vec<Vec<FlowPath<S>>> {
    let caps: Vec<f64> = g.edges().iter().map(|e| e.cap.to_f64()).collect();
    let bgf: Vec<f64> = if bg.is_empty() { vec![0.0; g.m()] } else { conv_vec(bg) };
    let mut len: Vec<f64> = caps.iter().map(|c| 1.0 / c).collect();
    let mut acc = vec![0.0; g.m()];
    let mut counts: Vec<HashMap<Vec<EdgeId>, (Vec<VertexId>, usize)>> = vec![HashMap::new(); n_comms];
    let iters = iters.max(1);
    let beta0 = ((g.m() + 1) as f64).ln() / 0.05;
    for it in 1..=iters {
        for gr in groups {
            let prev = dijkstra(g, gr.source, &len);
            for (b, d, ci) in &gr.sinks {
                let (mut edges, mut verts, mut x) = (Vec::new(), vec![*b], *b);
                while x != gr.source {
                    let e = prev[x].expect("connected");
                    edges.push(e);
                    x = g.edge(e).other(x);
                    verts.push(x);
                }
                edges.reverse();
                verts.reverse();
                let df = d.to_f64();
                for &e in &edges {
                    acc[e] += df;
                }
                counts[*ci].entry(edges).or_insert((verts, 0)).1 += 1;
            }
        }
        let cong: Vec<f64> = (0..g.m()).map(|e| (acc[e] / it as f64 + bgf[e]) / caps[e]).collect();
        let top = cong.iter().cloned().fold(1e-12, f64::max);
        let beta = beta0 / top;
        for e in 0..g.m() {
            len[e] = (beta * (cong[e] - top)).exp() / caps[e] + 1e-300;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(ci, m)| {
            let d = groups
                .iter()
                .flat_map(|gr| gr.sinks.iter())
                .find(|(_, _, i)| *i == ci)
                .map(|(_, d, _)| d.clone())
                .unwrap_or_else(S::zero);
            let mut ps: Vec<_> = m
                .into_iter()
                .map(|(edges, (verts, c))| FlowPath {
                    vertices: verts,
                    edges,
                    amount: d.clone() * S::from_frac(c as i64, iters as i64),
                })
                .collect();
            ps.sort_by(|a, b| a.edges.cmp(&b.edges));
            ps
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    type R = BigRational;

    fn cycle4() -> Graph<R> {
        let mut g = Graph::new(4);
        for i in 0..4 {
            g.add_edge(i, (i + 1) % 4, R::from_int(1)).unwrap();
        }
        g.set_terminals(&[0, 1, 2, 3]).unwrap();
        g
    }

    #[test]
    fn single_edge_eta_is_demand_over_cap() {
        let mut g = Graph::<R>::new(2);
        g.add_edge(0, 1, R::from_int(2)).unwrap();
        let mut d = DemandSet::new();
        d.add(0, 1, R::from_int(1)).unwrap();
        for m in [RoutingMethod::Exact, RoutingMethod::Lp, RoutingMethod::Mwu] {
            let opts = RoutingOptions { method: m, ..Default::default() };
            let r = min_congestion_routing(&g, &d, &opts).unwrap();
            assert_eq!(r.eta, Some(R::from_frac(1, 2)), "{m:?}");
            assert!(r.flow.check(&g).is_empty());
        }
    }

    #[test]
    fn four_cycle_opposite_pairs() {
        let g = cycle4();
        let mut d = DemandSet::new();
        d.add(0, 2, R::from_int(1)).unwrap();
        d.add(1, 3, R::from_int(1)).unwrap();
        let r = min_congestion_routing(&g, &d, &RoutingOptions { method: RoutingMethod::Exact, ..Default::default() }).unwrap();
        assert_eq!(r.eta, Some(R::from_int(1)));
        let r = min_congestion_routing(&g, &d, &RoutingOptions { method: RoutingMethod::Lp, ..Default::default() }).unwrap();
        assert!((r.eta.unwrap().to_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disconnected_is_infinite() {
        let mut g = Graph::<R>::new(3);
        g.add_edge(0, 1, R::from_int(1)).unwrap();
        let mut d = DemandSet::new();
        d.add(0, 2, R::from_int(1)).unwrap();
        assert_eq!(min_congestion_routing(&g, &d, &RoutingOptions::default()).unwrap().eta, None);
    }
}
