//! Sparsest cut of a terminal instance.
//!
//! An instance is a graph whose terminals are pendants: each terminal has
//! exactly one edge, to a non-terminal. Capacities are read as
//! multiplicities, so a pendant of capacity c stands for c unit terminals
//! that may be split across the cut. The sparsity of a cut is
//! cut / min(W(A), W(B)) with W counting terminal units.

use super::dinic::Dinic;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::scalar::Scalar;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseCut<S> {
    /// Side of every non-terminal vertex (true = A), indexed by vertex id;
    /// entries for terminals are meaningless.
    pub inner_side: Vec<bool>,
    /// Units of each terminal (by position in `terminals()`) on side A.
    pub units_a: Vec<i64>,
    pub value: S,
    pub weight_a: S,
    pub weight_b: S,
    pub sparsity: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparsestCut<S> {
    pub cut: Option<SparseCut<S>>,
    /// No partition of the non-terminal part exists, or fewer than two
    /// terminal units: well-linked at every alpha.
    pub unsplittable: bool,
    pub exact: bool,
}

impl<S: Scalar> SparsestCut<S> {
    pub fn sparsity(&self) -> Option<&S> {
        self.cut.as_ref().map(|c| &c.sparsity)
    }
}

struct Layout {
    inner: Vec<VertexId>,
    local: Vec<usize>,
    /// (inner local index, weight) per terminal
    att: Vec<(usize, i64)>,
    groups: Vec<usize>,
    gw: Vec<i64>,
    internal: Vec<(usize, usize, i64)>,
    total: i64,
}

fn layout<S: Scalar>(g: &Graph<S>) -> Result<Layout> {
    let inner = g.non_terminals();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in inner.iter().enumerate() {
        local[v] = i;
    }
    let mut att = Vec::new();
    for &t in g.terminals() {
        let inc = g.incident(t);
        if inc.len() != 1 {
            return Err(Error::Precondition(format!("terminal {t} must have exactly one edge")));
        }
        let e = g.edge(inc[0]);
        let u = e.other(t);
        if g.is_terminal(u) {
            return Err(Error::Precondition(format!("terminal {t} attaches to terminal {u}")));
        }
        let w = e.cap.to_i64_exact().ok_or_else(|| Error::Precondition("capacities must be integral".into()))?;
        att.push((local[u], w));
    }
    let mut internal = Vec::new();
    for e in g.edges() {
        if !g.is_terminal(e.u) && !g.is_terminal(e.v) {
            let c = e.cap.to_i64_exact().ok_or_else(|| Error::Precondition("capacities must be integral".into()))?;
            internal.push((local[e.u], local[e.v], c));
        }
    }
    let mut gw_by = vec![0i64; inner.len()];
    for &(u, w) in &att {
        gw_by[u] += w;
    }
    let groups: Vec<usize> = (0..inner.len()).filter(|&u| gw_by[u] > 0).collect();
    let gw: Vec<i64> = groups.iter().map(|&u| gw_by[u]).collect();
    let total = gw.iter().sum();
    Ok(Layout { inner, local, att, groups, gw, internal, total })
}

fn vector_cost(l: &Layout) -> f64 {
    l.gw.iter().map(|&w| ((w + 1) as f64).log2()).sum()
}

fn partition_cost(l: &Layout) -> f64 {
    l.inner.len().saturating_sub(1) as f64
}

/// log2 of the number of cases the exact solver enumerates: terminal count
/// vectors or inner-vertex bipartitions, whichever is fewer.
pub fn exact_cost_log2<S: Scalar>(g: &Graph<S>) -> Result<f64> {
    let l = layout(g)?;
    Ok(vector_cost(&l).min(partition_cost(&l)))
}

fn frac_less(a: (i64, i64), b: (i64, i64)) -> bool {
    (a.0 as i128) * (b.1 as i128) < (b.0 as i128) * (a.1 as i128)
}

/// Exact sparsest cut by enumerating per-vertex terminal counts.
pub fn sparsest_cut_exact<S: Scalar>(g: &Graph<S>, budget_exp: u32) -> Result<SparsestCut<S>> {
    let l = layout(g)?;
    if l.total < 2 {
        return Ok(SparsestCut { cut: None, unsplittable: true, exact: true });
    }
    let cost = vector_cost(&l);
    let pcost = partition_cost(&l);
    if pcost <= budget_exp as f64 && (cost > budget_exp as f64 || pcost <= cost + 4.0) {
        return Ok(sparsest_by_partition(g, &l));
    }
    if cost > budget_exp as f64 {
        return Err(Error::Budget { what: "exact sparsest cut".into(), needed: cost.min(pcost), budget: budget_exp });
    }
    sparsest_by_vectors(g, &l)
}

/// Exact route over terminal count vectors, ignoring the budget.
pub fn sparsest_cut_by_vectors<S: Scalar>(g: &Graph<S>) -> Result<SparsestCut<S>> {
    let l = layout(g)?;
    if l.total < 2 {
        return Ok(SparsestCut { cut: None, unsplittable: true, exact: true });
    }
    sparsest_by_vectors(g, &l)
}

/// Exact route over inner bipartitions, ignoring the budget.
pub fn sparsest_cut_by_partitions<S: Scalar>(g: &Graph<S>) -> Result<SparsestCut<S>> {
    let l = layout(g)?;
    if l.total < 2 {
        return Ok(SparsestCut { cut: None, unsplittable: true, exact: true });
    }
    Ok(sparsest_by_partition(g, &l))
}

fn sparsest_by_vectors<S: Scalar>(g: &Graph<S>, l: &Layout) -> Result<SparsestCut<S>> {
    let unsplittable = l.inner.len() <= 1;
    let ni = l.inner.len();
    let (s, t) = (ni, ni + 1);
    let mut base = Dinic::<i64>::new(ni + 2);
    for &(a, b, c) in &l.internal {
        base.add_arc(a, b, c, c);
    }
    let src_arc: Vec<usize> = l.groups.iter().map(|&u| base.add_arc(s, u, 0, 0)).collect();
    let snk_arc: Vec<usize> = l.groups.iter().map(|&u| base.add_arc(u, t, 0, 0)).collect();
    let total_vectors: u64 = l.gw.iter().map(|&w| (w + 1) as u64).product();
    let gw = &l.gw;
    let decode = |mut idx: u64| -> Vec<i64> {
        gw.iter()
            .map(|&w| {
                let b = (w + 1) as u64;
                let j = (idx % b) as i64;
                idx /= b;
                j
            })
            .collect()
    };
    let eval = |idx: u64| -> Option<(i64, i64, u64)> {
        let j = decode(idx);
        let jj: i64 = j.iter().sum();
        if jj == 0 || jj == l.total {
            return None;
        }
        // keep one of each complementary pair
        for (x, &w) in j.iter().zip(gw.iter()) {
            if *x != w - x {
                if *x > w - x {
                    return None;
                }
                break;
            }
        }
        let mut d = base.clone();
        for (i, &x) in j.iter().enumerate() {
            d.res[src_arc[i]] = x;
            d.res[snk_arc[i]] = gw[i] - x;
        }
        let c = d.run(s, t);
        Some((c, jj.min(l.total - jj), idx))
    };
    let better = |a: &(i64, i64, u64), b: &(i64, i64, u64)| -> bool {
        if frac_less((a.0, a.1), (b.0, b.1)) {
            return true;
        }
        if frac_less((b.0, b.1), (a.0, a.1)) {
            return false;
        }
        (a.0, a.2) < (b.0, b.2)
    };
    let best = if total_vectors > 2048 {
        (0..total_vectors)
            .into_par_iter()
            .filter_map(eval)
            .reduce_with(|a, b| if better(&b, &a) { b } else { a })
    } else {
        (0..total_vectors).filter_map(eval).reduce(|a, b| if better(&b, &a) { b } else { a })
    };
    let (_, _, idx) = best.ok_or_else(|| Error::Internal("no split vector".into()))?;
    let j = decode(idx);
    let mut d = base.clone();
    for (i, &x) in j.iter().enumerate() {
        d.res[src_arc[i]] = x;
        d.res[snk_arc[i]] = gw[i] - x;
    }
    d.run(s, t);
    let reach = d.reachable(s);
    let mut inner_side = vec![false; g.n()];
    for (i, &v) in l.inner.iter().enumerate() {
        inner_side[v] = reach[i];
    }
    let mut left: Vec<i64> = vec![0; ni];
    for (gi, &u) in l.groups.iter().enumerate() {
        left[u] = j[gi];
    }
    let units_a: Vec<i64> = l
        .att
        .iter()
        .map(|&(u, w)| {
            let take = left[u].min(w);
            left[u] -= take;
            take
        })
        .collect();
    let cut = evaluate_units(g, l, inner_side, units_a);
    Ok(SparsestCut { cut: Some(cut), unsplittable, exact: true })
}

/// Exact sparsest cut over bipartitions of the non-terminal vertices with
/// every terminal following its attachment. Splitting the units of a group
/// across the cut adds one to the cut and at most one to the lighter side
/// per unit, so it only helps down to sparsity 1, which a cut of the units
/// alone always reaches.
fn sparsest_by_partition<S: Scalar>(g: &Graph<S>, l: &Layout) -> SparsestCut<S> {
    let ni = l.inner.len();
    let unsplittable = ni <= 1;
    let mut gw_by = vec![0i64; ni];
    for (gi, &u) in l.groups.iter().enumerate() {
        gw_by[u] = l.gw[gi];
    }
    let eval = |mask: u64| -> Option<(i64, i64, u64)> {
        let a = |u: usize| mask >> u & 1 == 1;
        let wa: i64 = (0..ni).filter(|&u| a(u)).map(|u| gw_by[u]).sum();
        if wa == 0 || wa == l.total {
            return None;
        }
        let c: i64 = l.internal.iter().filter(|&&(x, y, _)| a(x) != a(y)).map(|&(_, _, c)| c).sum();
        Some((c, wa.min(l.total - wa), mask))
    };
    let better = |a: &(i64, i64, u64), b: &(i64, i64, u64)| -> bool {
        if frac_less((a.0, a.1), (b.0, b.1)) {
            return true;
        }
        !frac_less((b.0, b.1), (a.0, a.1)) && (a.0, a.2) < (b.0, b.2)
    };
    let masks = if ni == 0 { 0 } else { 1u64 << (ni - 1) };
    let best = (1..masks).into_par_iter().filter_map(eval).reduce_with(|a, b| if better(&b, &a) { b } else { a });
    let cut = match best {
        Some((c, w, mask)) if c < w => {
            let mut inner_side = vec![false; g.n()];
            for (i, &v) in l.inner.iter().enumerate() {
                inner_side[v] = mask >> i & 1 == 1;
            }
            let units_a = l.att.iter().map(|&(u, w)| if mask >> u & 1 == 1 { w } else { 0 }).collect();
            evaluate_units(g, l, inner_side, units_a)
        }
        _ => {
            // everything on one side except a single terminal unit
            let mut inner_side = vec![false; g.n()];
            for &v in &l.inner {
                inner_side[v] = true;
            }
            let mut units_a: Vec<i64> = l.att.iter().map(|&(_, w)| w).collect();
            if let Some(x) = units_a.iter_mut().find(|x| **x > 0) {
                *x -= 1;
            }
            evaluate_units(g, l, inner_side, units_a)
        }
    };
    SparsestCut { cut: Some(cut), unsplittable, exact: true }
}

fn evaluate_units<S: Scalar>(g: &Graph<S>, l: &Layout, inner_side: Vec<bool>, units_a: Vec<i64>) -> SparseCut<S> {
    let mut value = 0i64;
    for &(a, b, c) in &l.internal {
        if inner_side[l.inner[a]] != inner_side[l.inner[b]] {
            value += c;
        }
    }
    let mut wa = 0i64;
    for (ti, &(u, w)) in l.att.iter().enumerate() {
        let x = units_a[ti];
        wa += x;
        value += if inner_side[l.inner[u]] { w - x } else { x };
    }
    let wb = l.total - wa;
    let _ = g;
    SparseCut {
        inner_side,
        units_a,
        value: S::from_int(value),
        weight_a: S::from_int(wa),
        weight_b: S::from_int(wb),
        sparsity: S::from_frac(value, wa.min(wb).max(1)),
    }
}

/// Evaluate a partition of the non-terminal part with every terminal
/// following its attachment vertex.
pub fn partition_sparsity<S: Scalar>(g: &Graph<S>, inner_side: &[bool]) -> Result<SparseCut<S>> {
    let l = layout(g)?;
    let units_a = l.att.iter().map(|&(u, w)| if inner_side[l.inner[u]] { w } else { 0 }).collect();
    let mut side = vec![false; g.n()];
    for &v in &l.inner {
        side[v] = inner_side[v];
    }
    Ok(evaluate_units(g, &l, side, units_a))
}

struct Sweep<'a, S> {
    g: &'a Graph<S>,
    l: &'a Layout,
}

impl<S: Scalar> Sweep<'_, S> {
    /// side over all vertices; terminals take whole units.
    fn score(&self, side: &[bool]) -> Option<(i64, i64)> {
        let mut value = 0i64;
        for &(a, b, c) in &self.l.internal {
            if side[self.l.inner[a]] != side[self.l.inner[b]] {
                value += c;
            }
        }
        let mut wa = 0i64;
        for (ti, &(u, w)) in self.l.att.iter().enumerate() {
            let t = self.g.terminals()[ti];
            if side[t] {
                wa += w;
            }
            if side[t] != side[self.l.inner[u]] {
                value += w;
            }
        }
        let m = wa.min(self.l.total - wa);
        (m > 0).then_some((value, m))
    }
}

fn fiedler_order<S: Scalar>(g: &Graph<S>) -> Option<Vec<VertexId>> {
    let n = g.n();
    if !(3..=400).contains(&n) {
        return None;
    }
    let mut lap = nalgebra::DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        let c = e.cap.to_f64();
        lap[(e.u, e.u)] += c;
        lap[(e.v, e.v)] += c;
        lap[(e.u, e.v)] -= c;
        lap[(e.v, e.u)] -= c;
    }
    let eig = nalgebra::SymmetricEigen::new(lap);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vec = eig.eigenvectors.column(idx[1]);
    let mut order: Vec<VertexId> = (0..n).collect();
    order.sort_by(|&a, &b| vec[a].partial_cmp(&vec[b]).unwrap().then(a.cmp(&b)));
    Some(order)
}

fn bfs_order<S: Scalar>(g: &Graph<S>, s: VertexId) -> Vec<VertexId> {
    let mut seen = vec![false; g.n()];
    let mut order = vec![s];
    seen[s] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            if !seen[y] {
                seen[y] = true;
                order.push(y);
            }
        }
    }
    for v in 0..g.n() {
        if !seen[v] {
            order.push(v);
        }
    }
    order
}

/// Heuristic sparsest cut: spectral and BFS sweeps refined by local moves.
/// The returned cut is a valid cut with its exact sparsity.
pub fn sparsest_cut_heuristic<S: Scalar>(g: &Graph<S>) -> Result<SparsestCut<S>> {
    let l = layout(g)?;
    let unsplittable = l.inner.len() <= 1;
    if l.total < 2 {
        return Ok(SparsestCut { cut: None, unsplittable: true, exact: false });
    }
    let sw = Sweep { g, l: &l };
    let mut orders = Vec::new();
    if let Some(o) = fiedler_order(g) {
        orders.push(o);
    }
    for &t in g.terminals().iter().take(8) {
        orders.push(bfs_order(g, t));
    }
    let mut best: Option<((i64, i64), Vec<bool>)> = None;
    let consider = |side: &[bool], best: &mut Option<((i64, i64), Vec<bool>)>| {
        if let Some(sc) = sw.score(side) {
            let take = match best {
                None => true,
                Some((b, _)) => frac_less(sc, *b),
            };
            if take {
                *best = Some((sc, side.to_vec()));
            }
        }
    };
    for o in &orders {
        let mut side = vec![false; g.n()];
        for &v in &o[..o.len() - 1] {
            side[v] = true;
            consider(&side, &mut best);
        }
    }
    if let Some(&t) = g.terminals().first() {
        let mut side = vec![false; g.n()];
        side[t] = true;
        consider(&side, &mut best);
    }
    let (mut sc, mut side) = best.ok_or_else(|| Error::Internal("no candidate cut".into()))?;
    for _ in 0..50 {
        let mut improved = false;
        for v in 0..g.n() {
            side[v] = !side[v];
            match sw.score(&side) {
                Some(s2) if frac_less(s2, sc) => {
                    sc = s2;
                    improved = true;
                }
                _ => side[v] = !side[v],
            }
        }
        if !improved {
            break;
        }
    }
    let units_a = l.att.iter().enumerate().map(|(ti, &(_, w))| if side[g.terminals()[ti]] { w } else { 0 }).collect();
    let mut inner_side = vec![false; g.n()];
    for &v in &l.inner {
        inner_side[v] = side[v];
    }
    let cut = evaluate_units(g, &l, inner_side, units_a);
    let _ = &l.local;
    Ok(SparsestCut { cut: Some(cut), unsplittable, exact: false })
}

/// Exact when the enumeration fits the budget, heuristic otherwise.
pub fn sparsest_cut<S: Scalar>(g: &Graph<S>, budget_exp: u32) -> Result<SparsestCut<S>> {
    match sparsest_cut_exact(g, budget_exp) {
        Err(Error::Budget { .. }) => sparsest_cut_heuristic(g),
        r => r,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WellLinked<S> {
    Yes,
    No(SparseCut<S>),
    /// Exact check over budget and the heuristic found no violating cut.
    Unknown,
}

impl<S> WellLinked<S> {
    pub fn is_yes(&self) -> bool {
        matches!(self, WellLinked::Yes)
    }
}

/// Whether `set` is alpha-well-linked in `g` (alpha in (0, 1]).
pub fn is_well_linked<S: Scalar>(g: &Graph<S>, set: &[VertexId], alpha: &S, budget_exp: u32) -> Result<WellLinked<S>> {
    let sd = g.subdivide_boundary(set)?;
    well_linked_instance(&sd.graph, alpha, budget_exp)
}

pub fn well_linked_instance<S: Scalar>(inst: &Graph<S>, alpha: &S, budget_exp: u32) -> Result<WellLinked<S>> {
    let sc = sparsest_cut(inst, budget_exp)?;
    if sc.unsplittable {
        return Ok(WellLinked::Yes);
    }
    match sc.cut {
        None => Ok(WellLinked::Yes),
        Some(c) if c.sparsity < *alpha => Ok(WellLinked::No(c)),
        Some(_) if sc.exact => Ok(WellLinked::Yes),
        Some(_) => Ok(WellLinked::Unknown),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    type R = BigRational;

    fn star_instance(leaves: usize) -> Graph<R> {
        let mut g = Graph::new(leaves + 1);
        for i in 0..leaves {
            g.add_edge(0, i + 1, R::from_int(1)).unwrap();
            g.add_terminal(i + 1).unwrap();
        }
        g
    }

    #[test]
    fn single_vertex_two_pendants() {
        let sc = sparsest_cut_exact(&star_instance(2), 20).unwrap();
        assert!(sc.unsplittable);
        assert_eq!(sc.cut.unwrap().sparsity, R::from_int(1));
    }

    #[test]
    fn path_with_end_pendants() {
        // t - a - b - t'
        let mut g = Graph::<R>::new(4);
        g.add_edge(0, 1, R::from_int(1)).unwrap();
        g.add_edge(2, 0, R::from_int(1)).unwrap();
        g.add_edge(1, 3, R::from_int(1)).unwrap();
        g.set_terminals(&[2, 3]).unwrap();
        let sc = sparsest_cut_exact(&g, 20).unwrap();
        assert_eq!(sc.cut.unwrap().sparsity, R::from_int(1));
    }

    #[test]
    fn dumbbell_is_sparse() {
        // two triangles joined by one edge, 3 pendants each side
        let mut g = Graph::<R>::new(12);
        for &(a, b) in &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)] {
            g.add_edge(a, b, R::from_int(1)).unwrap();
        }
        for i in 0..6 {
            g.add_edge(i, 6 + i, R::from_int(1)).unwrap();
            g.add_terminal(6 + i).unwrap();
        }
        let sc = sparsest_cut_exact(&g, 20).unwrap();
        assert_eq!(sc.cut.as_ref().unwrap().sparsity, R::from_frac(1, 3));
        let h = sparsest_cut_heuristic(&g).unwrap();
        assert_eq!(h.cut.unwrap().sparsity, R::from_frac(1, 3));
    }

    fn heavy_path(len: usize, w: i64) -> Graph<R> {
        let mut g = Graph::new(2 * len);
        for i in 0..len {
            if i + 1 < len {
                g.add_edge(i, i + 1, R::from_int(1)).unwrap();
            }
            g.add_edge(i, len + i, R::from_int(w)).unwrap();
            g.add_terminal(len + i).unwrap();
        }
        g
    }

    #[test]
    fn partition_route_matches_vectors() {
        for (len, w) in [(3, 1), (4, 2), (5, 3), (2, 5)] {
            let g = heavy_path(len, w);
            let a = sparsest_cut_by_vectors(&g).unwrap();
            let b: SparsestCut<R> = sparsest_cut_by_partitions(&g).unwrap();
            assert_eq!(a.cut.unwrap().sparsity, b.cut.unwrap().sparsity, "len {len} w {w}");
        }
    }

    #[test]
    fn budget_refusal() {
        let g = star_instance(30);
        // one inner vertex: a single bipartition case
        assert!(sparsest_cut_exact(&g, 0).is_ok());
        let h = heavy_path(8, 30);
        assert!(matches!(sparsest_cut_exact(&h, 4), Err(Error::Budget { .. })));
        assert!(sparsest_cut_exact(&h, 7).is_ok());
    }
}
