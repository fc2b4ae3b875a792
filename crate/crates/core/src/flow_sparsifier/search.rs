//! Contractible sets, balanced partitions and witnesses in a contracted graph.

use super::params::FlowParams;
use super::witness::{edge_instance, Walk, Witness};
use crate::error::{Error, Result};
use crate::flow::{decompose_paths, max_flow, sparsest_cut};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::Scalar;
use crate::wl::{weak_decompose, DecompOptions};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Contractible(Vec<VertexId>),
    Witness(Witness),
    /// A premise of the search failed (possible only when the profile's
    /// constants are below the ones the analysis needs).
    Inconclusive(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RefineOutcome {
    Balanced { x: Vec<VertexId>, y: Vec<VertexId>, cut: i64 },
    Witness(Witness),
    Contractible(Vec<VertexId>),
    Inconclusive(String),
}

/// One balanced-cut refinement run.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct RefineTrace {
    pub set_size: usize,
    /// |E(X, Y)| of every partition visited, in order.
    pub cuts: Vec<i64>,
    /// Final |X|, |Y| when a balanced partition was returned.
    pub final_sizes: Option<(usize, usize)>,
    pub bound: i64,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct SearchTrace {
    pub refines: Vec<RefineTrace>,
    /// (|S'_j|, required size, holds) for every phase-two selection.
    pub phase2_claims: Vec<(usize, f64, bool)>,
    pub outcome: String,
}

fn units<S: Scalar>(x: &S) -> Result<i64> {
    x.to_i64_exact().ok_or_else(|| Error::Precondition("search needs integral capacities".into()))
}

fn cut_between<S: Scalar>(g: &Graph<S>, a: &[bool], b: &[bool]) -> Result<i64> {
    let mut c = 0;
    for ed in g.edges() {
        if (a[ed.u] && b[ed.v]) || (a[ed.v] && b[ed.u]) {
            c += units(&ed.cap)?;
        }
    }
    Ok(c)
}

/// Terminal units k of G'.
pub fn terminal_units<S: Scalar>(g: &Graph<S>) -> Result<i64> {
    units(&g.terminal_capacity())
}

/// Whether `set` satisfies the contractible-set definition in G'.
pub fn is_contractible<S: Scalar>(g: &Graph<S>, set: &[VertexId], params: &FlowParams) -> Result<bool> {
    if set.is_empty() || set.iter().any(|&v| v >= g.n() || g.is_terminal(v)) || !g.is_connected_set(set) {
        return Ok(false);
    }
    let k = terminal_units(g)?;
    let out = units(&g.out_capacity(&g.mask_of(set)))?;
    Ok(out <= (k + 1) / 2 && set.len() as f64 > params.contract_factor * params.f(out as usize))
}

fn bfs_order<S: Scalar>(g: &Graph<S>, set: &[VertexId]) -> Vec<VertexId> {
    let mask = g.mask_of(set);
    let mut seen = vec![false; g.n()];
    let mut order = Vec::with_capacity(set.len());
    for &s in set {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            order.push(x);
            for &e in g.incident(x) {
                let y = g.edge(e).other(x);
                if mask[y] && !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    order
}

/// Best BFS-prefix cut among the balanced prefixes.
fn initial_partition<S: Scalar>(g: &Graph<S>, set: &[VertexId]) -> Result<(Vec<bool>, Vec<bool>)> {
    let order = bfs_order(g, set);
    let n = order.len();
    let lo = n.div_ceil(4).max(1);
    let hi = n - n.div_ceil(4);
    let mut x = vec![false; g.n()];
    let mut y = g.mask_of(set);
    let mut cur = 0i64;
    let mut best = (i64::MAX, lo);
    for (i, &v) in order.iter().enumerate() {
        for &e in g.incident(v) {
            let w = g.edge(e).other(v);
            let c = units(&g.edge(e).cap)?;
            if x[w] {
                cur -= c;
            } else if y[w] && w != v {
                cur += c;
            }
        }
        x[v] = true;
        y[v] = false;
        let size = i + 1;
        let skew = |s: usize| s.abs_diff(n - s);
        if size >= lo && size <= hi && (cur < best.0 || (cur == best.0 && skew(size) < skew(best.1))) {
            best = (cur, size);
        }
    }
    let mut x = vec![false; g.n()];
    let mut y = g.mask_of(set);
    for &v in &order[..best.1] {
        x[v] = true;
        y[v] = false;
    }
    Ok(orient(x, y))
}

fn count(m: &[bool]) -> usize {
    m.iter().filter(|&&b| b).count()
}

/// Order so that |X| >= |Y|.
fn orient(x: Vec<bool>, y: Vec<bool>) -> (Vec<bool>, Vec<bool>) {
    if count(&x) >= count(&y) {
        (x, y)
    } else {
        (y, x)
    }
}

fn to_list(m: &[bool]) -> Vec<VertexId> {
    (0..m.len()).filter(|&v| m[v]).collect()
}

struct P1Path {
    terminal: VertexId,
    prefix: Vec<EdgeId>,
    /// Endpoint of the target edge reached first.
    near: VertexId,
    target: EdgeId,
}

enum Step<T> {
    Done(T),
    Replace(Vec<bool>, Vec<bool>),
    Stop(RefineOutcome),
}

/// Step 1: ceil(k/2) terminal units into the cut edges, or a replacement.
fn step1<S: Scalar>(
    g: &Graph<S>,
    s_mask: &[bool],
    x: &[bool],
    gamma: &[EdgeId],
    k: i64,
    params: &FlowParams,
) -> Result<Step<Vec<P1Path>>> {
    let n = g.n();
    let mut aux: Graph<S> = Graph::new(n);
    let mut parent = Vec::new();
    let is_gamma = {
        let mut m = vec![false; g.m()];
        for &e in gamma {
            m[e] = true;
        }
        m
    };
    let mut zs = Vec::new();
    for (e, ed) in g.edges().iter().enumerate() {
        if is_gamma[e] {
            let z = aux.add_vertex();
            aux.add_edge(ed.u, z, ed.cap.clone())?;
            parent.push((e, Some(ed.u)));
            aux.add_edge(z, ed.v, ed.cap.clone())?;
            parent.push((e, Some(ed.v)));
            zs.push(z);
        } else {
            aux.add_edge(ed.u, ed.v, ed.cap.clone())?;
            parent.push((e, None));
        }
    }
    let ts = g.terminals().to_vec();
    let need = (k + 1) / 2;
    let mf = max_flow(&aux, &ts, &zs)?;
    if mf.value >= S::from_int(need) {
        let paths = decompose_paths(&aux, &mf.flow, &ts, &zs);
        let q = ((k + 3) / 4) as usize;
        let mut chosen: Vec<P1Path> = Vec::new();
        for p in paths {
            let t = p.vertices[0];
            let last = *p.edges.last().expect("non-empty path");
            let (target, near) = parent[last];
            if chosen.iter().any(|c| c.terminal == t || c.target == target) {
                continue;
            }
            let prefix = p.edges[..p.edges.len() - 1].iter().map(|&ae| parent[ae].0).collect();
            chosen.push(P1Path { terminal: t, prefix, near: near.expect("ends at a subdivision"), target });
            if chosen.len() == q {
                break;
            }
        }
        if chosen.len() < q {
            return Ok(Step::Stop(RefineOutcome::Inconclusive("step 1 paths share cut edges".into())));
        }
        return Ok(Step::Done(chosen));
    }
    let side = &mf.cut.side;
    let a: Vec<bool> = (0..n).map(|v| side[v] && !g.is_terminal(v)).collect();
    let b: Vec<bool> = (0..n).map(|v| !side[v] && !g.is_terminal(v)).collect();
    let xa: Vec<bool> = (0..n).map(|v| x[v] && a[v]).collect();
    let xb: Vec<bool> = (0..n).map(|v| x[v] && b[v]).collect();
    if count(&xa) >= count(&xb) {
        let y2: Vec<bool> = (0..n).map(|v| s_mask[v] && !xa[v]).collect();
        return Ok(Step::Replace(xa, y2));
    }
    let half = (k as usize).div_ceil(2);
    for c in g.components_within(&b) {
        if c.len() as f64 > params.phase2_factor * params.f(half) && is_contractible(g, &c, params)? {
            return Ok(Step::Stop(RefineOutcome::Contractible(c)));
        }
    }
    let sb: Vec<bool> = (0..n).map(|v| s_mask[v] && b[v]).collect();
    let size = count(s_mask);
    let mut x2 = vec![false; n];
    let mut got = 0;
    for c in g.components_within(&sb) {
        if 4 * got >= size {
            break;
        }
        for &v in &c {
            x2[v] = true;
        }
        got += c.len();
    }
    if 4 * got < size {
        return Ok(Step::Stop(RefineOutcome::Inconclusive("step 1 found no balanced replacement".into())));
    }
    let y2: Vec<bool> = (0..n).map(|v| s_mask[v] && !x2[v]).collect();
    Ok(Step::Replace(x2, y2))
}

/// Step 2: route Gamma_1 to each further group inside X.
fn step2<S: Scalar>(
    g: &Graph<S>,
    x: &[bool],
    y: &[bool],
    p1: &[P1Path],
    groups: &[Vec<EdgeId>],
) -> Result<Step<Vec<Vec<Walk>>>> {
    let n = g.n();
    let xs = to_list(x);
    let mut local = vec![usize::MAX; n];
    for (i, &v) in xs.iter().enumerate() {
        local[v] = i;
    }
    let inside = |e: EdgeId| {
        let ed = g.edge(e);
        if x[ed.u] {
            ed.u
        } else {
            ed.v
        }
    };
    let mut systems = vec![p1
        .iter()
        .map(|p| {
            let mut edges = p.prefix.clone();
            edges.push(p.target);
            Walk { terminal: p.terminal, edges }
        })
        .collect::<Vec<_>>()];
    for gj in &groups[1..] {
        let mut aux: Graph<S> = Graph::new(xs.len());
        let mut parent = Vec::new();
        for (e, ed) in g.edges().iter().enumerate() {
            if x[ed.u] && x[ed.v] {
                aux.add_edge(local[ed.u], local[ed.v], ed.cap.clone())?;
                parent.push(e);
            }
        }
        let mut src = Vec::new();
        for p in p1 {
            let s = aux.add_vertex();
            aux.add_edge(s, local[inside(p.target)], g.edge(p.target).cap.clone())?;
            parent.push(p.target);
            src.push(s);
        }
        let mut snk = Vec::new();
        for &e in gj {
            let t = aux.add_vertex();
            aux.add_edge(t, local[inside(e)], g.edge(e).cap.clone())?;
            parent.push(e);
            snk.push(t);
        }
        let mf = max_flow(&aux, &src, &snk)?;
        if mf.value >= S::from_count(p1.len()) {
            let paths = decompose_paths(&aux, &mf.flow, &src, &snk);
            let mut sys = Vec::new();
            for (i, p) in p1.iter().enumerate() {
                let Some(fp) = paths.iter().find(|fp| fp.vertices[0] == src[i]) else {
                    return Ok(Step::Stop(RefineOutcome::Inconclusive("step 2 decomposition lost a path".into())));
                };
                let mut edges = p.prefix.clone();
                if !x[p.near] {
                    edges.push(p.target);
                }
                edges.extend(fp.edges[1..].iter().map(|&ae| parent[ae]));
                sys.push(Walk { terminal: p.terminal, edges });
            }
            systems.push(sys);
            continue;
        }
        let side = &mf.cut.side;
        let a: Vec<bool> = (0..n).map(|v| x[v] && side[local[v]]).collect();
        let b: Vec<bool> = (0..n).map(|v| x[v] && !side[local[v]]).collect();
        let (keep, give) = if count(&a) <= count(&b) { (b, a) } else { (a, b) };
        let y2: Vec<bool> = (0..n).map(|v| y[v] || give[v]).collect();
        return Ok(Step::Replace(keep, y2));
    }
    Ok(Step::Done(systems))
}

/// Balanced partition of S with |E(X, Y)| <= r k, a type-2 witness, or a
/// contractible set.
pub fn balanced_cut_refine<S: Scalar>(
    g: &Graph<S>,
    set: &[VertexId],
    params: &FlowParams,
    trace: &mut RefineTrace,
) -> Result<RefineOutcome> {
    let k = terminal_units(g)?;
    let r = params.r as i64;
    let n = g.n();
    let s_mask = g.mask_of(set);
    let size = set.len();
    trace.set_size = size;
    trace.bound = r * k;
    if size < 2 {
        return Ok(RefineOutcome::Inconclusive("set too small to partition".into()));
    }
    let (mut x, mut y) = initial_partition(g, set)?;
    let limit = g.m() + 1;
    for _ in 0..=limit {
        let cut = cut_between(g, &x, &y)?;
        if let Some(&prev) = trace.cuts.last() {
            if cut >= prev {
                return Err(Error::Internal(format!("refinement did not decrease the cut ({prev} -> {cut})")));
            }
        }
        trace.cuts.push(cut);
        if cut <= r * k {
            trace.final_sizes = Some((count(&x), count(&y)));
            return Ok(RefineOutcome::Balanced { x: to_list(&x), y: to_list(&y), cut });
        }
        let gamma: Vec<EdgeId> =
            (0..g.m()).filter(|&e| { let ed = g.edge(e); (x[ed.u] && y[ed.v]) || (x[ed.v] && y[ed.u]) }).collect();
        let next = match step1(g, &s_mask, &x, &gamma, k, params)? {
            Step::Stop(o) => return Ok(o),
            Step::Replace(a, b) => Some((a, b)),
            Step::Done(p1) => {
                let q = p1.len();
                let t_star: Vec<VertexId> = p1.iter().map(|p| p.terminal).collect();
                let rest: Vec<EdgeId> = gamma.iter().copied().filter(|e| !p1.iter().any(|p| p.target == *e)).collect();
                if rest.len() < (params.r as usize - 1) * q {
                    return Ok(RefineOutcome::Inconclusive("cut too small for the edge groups".into()));
                }
                let mut groups = vec![p1.iter().map(|p| p.target).collect::<Vec<_>>()];
                for j in 1..params.r as usize {
                    groups.push(rest[(j - 1) * q..j * q].to_vec());
                }
                match step2(g, &x, &y, &p1, &groups)? {
                    Step::Stop(o) => return Ok(o),
                    Step::Replace(a, b) => Some((a, b)),
                    Step::Done(paths) => {
                        let all: Vec<EdgeId> = groups.iter().flatten().copied().collect();
                        let xs = to_list(&x);
                        let inst = edge_instance(g, &xs, &all)?;
                        let sc = sparsest_cut(&inst, params.budget_exp)?;
                        let mut replace = None;
                        if let Some(c) = sc.cut.filter(|_| !sc.unsplittable) {
                            let a: Vec<bool> = (0..n).map(|v| x[v] && c.inner_side[xs.binary_search(&v).unwrap_or(0)]).collect();
                            let b: Vec<bool> = (0..n).map(|v| x[v] && !a[v]).collect();
                            let ta = all.iter().filter(|&&e| a[g.edge(e).u] || a[g.edge(e).v]).count() as i64;
                            let tb = all.len() as i64 - ta;
                            if cut_between(g, &a, &b)? < ta.min(tb) {
                                let (small, big) = if count(&a) <= count(&b) { (a, b) } else { (b, a) };
                                let y2: Vec<bool> = (0..n).map(|v| y[v] || small[v]).collect();
                                replace = Some((big, y2));
                            }
                        }
                        match replace {
                            Some(p) => Some(p),
                            None => {
                                return Ok(RefineOutcome::Witness(Witness::Type2 { set: xs, groups, t_star, paths }));
                            }
                        }
                    }
                }
            }
        };
        let (a, b) = next.expect("replacement");
        let (a, b) = orient(a, b);
        if 4 * count(&b) < size || cut_between(g, &a, &b)? >= cut {
            return Ok(RefineOutcome::Inconclusive("replacement partition is not an improvement".into()));
        }
        x = a;
        y = b;
    }
    Err(Error::Internal("refinement exceeded |E| iterations".into()))
}

/// Find a contractible set or a witness in G' (|V(G') \ T| > F(k) required).
pub fn find_contractible_or_witness<S: Scalar>(
    g: &Graph<S>,
    params: &FlowParams,
    trace: &mut SearchTrace,
) -> Result<SearchOutcome> {
    let out = search(g, params, trace)?;
    trace.outcome = match &out {
        SearchOutcome::Contractible(s) => format!("contractible |S|={}", s.len()),
        SearchOutcome::Witness(w) => format!("witness type {}", w.kind()),
        SearchOutcome::Inconclusive(m) => format!("inconclusive: {m}"),
    };
    Ok(out)
}

fn search<S: Scalar>(g: &Graph<S>, params: &FlowParams, trace: &mut SearchTrace) -> Result<SearchOutcome> {
    let k = terminal_units(g)?;
    let inner = g.non_terminals();
    if inner.len() as f64 <= params.f(k as usize) {
        return Err(Error::Precondition(format!(
            "|V(G') \\ T| = {} does not exceed F({k}) = {}",
            inner.len(),
            params.f(k as usize)
        )));
    }
    if g.edges().iter().any(|e| !e.cap.is_one()) {
        return Ok(SearchOutcome::Inconclusive("search runs on unit-capacity graphs".into()));
    }
    let half = (k as usize).div_ceil(2);
    let rounds = (params.r as f64).log2().ceil() as usize;
    let mut family = vec![inner];
    for _ in 0..rounds {
        let mut next = Vec::new();
        for s in &family {
            if s.len() as f64 <= params.lemma_factor * params.f(half) {
                return Ok(SearchOutcome::Inconclusive(format!("set of size {} below the lemma premise", s.len())));
            }
            let mut rt = RefineTrace::default();
            let res = balanced_cut_refine(g, s, params, &mut rt)?;
            trace.refines.push(rt);
            match res {
                RefineOutcome::Balanced { x, y, .. } => {
                    next.push(x);
                    next.push(y);
                }
                RefineOutcome::Witness(w) => return Ok(SearchOutcome::Witness(w)),
                RefineOutcome::Contractible(c) => return Ok(SearchOutcome::Contractible(c)),
                RefineOutcome::Inconclusive(m) => return Ok(SearchOutcome::Inconclusive(m)),
            }
        }
        family = next;
    }
    let opts = DecompOptions { budget_exp: params.budget_exp, ..Default::default() };
    let mut sets = Vec::new();
    let mut paths = Vec::new();
    for s in family.iter().take(params.r as usize) {
        let dec = weak_decompose(g, s, &opts)?;
        for (c, &o) in dec.clusters.iter().zip(&dec.outs) {
            if o as usize <= half && is_contractible(g, c, params)? {
                return Ok(SearchOutcome::Contractible(c.clone()));
            }
        }
        let big = dec.clusters.iter().max_by_key(|c| c.len()).expect("non-empty decomposition").clone();
        let need = params.phase2_factor * params.f(half);
        trace.phase2_claims.push((big.len(), need, big.len() as f64 > need));
        let mf = max_flow(g, g.terminals(), &big)?;
        if mf.value < S::from_count(half) {
            let b: Vec<bool> = (0..g.n()).map(|v| !mf.cut.side[v] && !g.is_terminal(v)).collect();
            let comp = g.components_within(&b).into_iter().find(|c| c.contains(&big[0])).expect("sink side holds S'");
            if is_contractible(g, &comp, params)? {
                return Ok(SearchOutcome::Contractible(comp));
            }
            return Ok(SearchOutcome::Inconclusive("deficient cut side is not contractible".into()));
        }
        let in_big = g.mask_of(&big);
        let mut sys = Vec::new();
        for p in decompose_paths(g, &mf.flow, g.terminals(), &big) {
            let stop = p.vertices.iter().position(|&v| in_big[v]).expect("path ends in S'");
            if sys.iter().any(|w: &Walk| w.terminal == p.vertices[0]) {
                continue;
            }
            sys.push(Walk { terminal: p.vertices[0], edges: p.edges[..stop].to_vec() });
            if sys.len() == half {
                break;
            }
        }
        sets.push(big);
        paths.push(sys);
    }
    Ok(SearchOutcome::Witness(Witness::Type1 { sets, paths }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    type R = BigRational;

    fn path_with_ends(len: usize, per_end: usize) -> Graph<R> {
        let mut g = Graph::new(len + 2 * per_end);
        for i in 0..len - 1 {
            g.add_edge(i, i + 1, R::from_int(1)).unwrap();
        }
        for j in 0..per_end {
            g.add_edge(len + j, 0, R::from_int(1)).unwrap();
            g.add_edge(len + per_end + j, len - 1, R::from_int(1)).unwrap();
        }
        g.set_terminals(&(len..len + 2 * per_end).collect::<Vec<_>>()).unwrap();
        g
    }

    #[test]
    fn long_path_gives_contractible() {
        let g = path_with_ends(12, 3);
        let p = FlowParams::aggressive();
        let mut tr = SearchTrace::default();
        match find_contractible_or_witness(&g, &p, &mut tr).unwrap() {
            SearchOutcome::Contractible(s) => assert!(is_contractible(&g, &s, &p).unwrap()),
            o => panic!("unexpected {o:?}"),
        }
    }

    #[test]
    fn small_graph_rejected() {
        let g = path_with_ends(1, 1);
        let mut tr = SearchTrace::default();
        assert!(find_contractible_or_witness(&g, &FlowParams::aggressive(), &mut tr).is_err());
    }

    #[test]
    fn two_blobs_split_immediately() {
        let mut g = Graph::<R>::new(12);
        for base in [0, 5] {
            for i in 0..5 {
                for j in i + 1..5 {
                    g.add_edge(base + i, base + j, R::from_int(1)).unwrap();
                }
            }
        }
        g.add_edge(4, 5, R::from_int(1)).unwrap();
        g.add_edge(10, 0, R::from_int(1)).unwrap();
        g.add_edge(11, 9, R::from_int(1)).unwrap();
        g.set_terminals(&[10, 11]).unwrap();
        let set: Vec<usize> = (0..10).collect();
        let mut tr = RefineTrace::default();
        match balanced_cut_refine(&g, &set, &FlowParams::aggressive(), &mut tr).unwrap() {
            RefineOutcome::Balanced { x, y, cut } => {
                assert_eq!(cut, 1);
                assert_eq!((x.len(), y.len()), (5, 5));
            }
            o => panic!("unexpected {o:?}"),
        }
    }
}
