//! Brute-force reference implementations used by the integration tests.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use vsparse::flow::simplex::{Cmp, LinearProgram, LpOutcome};
use vsparse::flow::FlowSolution;
use vsparse::{Graph, Scalar, VertexId};

pub type R = BigRational;

pub fn int(n: i64) -> R {
    R::from_int(n)
}

/// Min cut between vertex sets by enumerating every side assignment of the
/// remaining vertices.
pub fn brute_min_cut(g: &Graph<R>, a: &[VertexId], b: &[VertexId]) -> R {
    let n = g.n();
    let mut fixed = vec![None; n];
    for &v in a {
        fixed[v] = Some(true);
    }
    for &v in b {
        fixed[v] = Some(false);
    }
    let free: Vec<VertexId> = (0..n).filter(|&v| fixed[v].is_none()).collect();
    assert!(free.len() <= 20, "oracle too large");
    let mut best: Option<R> = None;
    for mask in 0u64..1 << free.len() {
        let mut side: Vec<bool> = fixed.iter().map(|x| x.unwrap_or(false)).collect();
        for (i, &v) in free.iter().enumerate() {
            side[v] = mask >> i & 1 == 1;
        }
        let c = g.edges().iter().filter(|e| side[e.u] != side[e.v]).fold(R::zero(), |s, e| s + e.cap.clone());
        if best.as_ref().map_or(true, |b| c < *b) {
            best = Some(c);
        }
    }
    best.unwrap()
}

/// Edmonds-Karp on a dense residual matrix, super source and sink.
pub fn ek_min_cut(g: &Graph<R>, a: &[VertexId], b: &[VertexId]) -> R {
    let n = g.n() + 2;
    let (s, t) = (n - 2, n - 1);
    let mut res = vec![vec![R::zero(); n]; n];
    let mut inf = R::one();
    for e in g.edges() {
        res[e.u][e.v] = res[e.u][e.v].clone() + e.cap.clone();
        res[e.v][e.u] = res[e.v][e.u].clone() + e.cap.clone();
        inf = inf + e.cap.clone();
    }
    for &v in a {
        res[s][v] = inf.clone();
    }
    for &v in b {
        res[v][t] = inf.clone();
    }
    let mut total = R::zero();
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && res[u][v] > R::zero() {
                    prev[v] = u;
                    q.push_back(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut aug = inf.clone();
        let mut v = t;
        while v != s {
            let u = prev[v];
            if res[u][v] < aug {
                aug = res[u][v].clone();
            }
            v = u;
        }
        let mut v = t;
        while v != s {
            let u = prev[v];
            res[u][v] = res[u][v].clone() - aug.clone();
            res[v][u] = res[v][u].clone() + aug.clone();
            v = u;
        }
        total = total + aug;
    }
}

/// Sparsest cut of a pendant-terminal instance: every non-terminal vertex
/// and every single terminal unit is assigned a side independently.
pub fn brute_sparsest(inst: &Graph<R>) -> Option<R> {
    let inner: Vec<VertexId> = (0..inst.n()).filter(|&v| !inst.is_terminal(v)).collect();
    let mut units = Vec::new();
    for &t in inst.terminals() {
        let e = inst.edge(inst.incident(t)[0]);
        let w = e.cap.to_i64_exact().unwrap();
        for _ in 0..w {
            units.push(e.other(t));
        }
    }
    let total = units.len();
    if total < 2 {
        return None;
    }
    let bits = inner.len() + units.len();
    assert!(bits <= 24, "oracle too large");
    let mut pos = vec![usize::MAX; inst.n()];
    for (i, &v) in inner.iter().enumerate() {
        pos[v] = i;
    }
    let mut best: Option<R> = None;
    for mask in 0u64..1 << bits {
        let side = |i: usize| mask >> i & 1 == 1;
        let wa = (0..units.len()).filter(|&j| side(inner.len() + j)).count();
        if wa == 0 || wa == total {
            continue;
        }
        let mut c = 0i64;
        for e in inst.edges() {
            if !inst.is_terminal(e.u) && !inst.is_terminal(e.v) && side(pos[e.u]) != side(pos[e.v]) {
                c += e.cap.to_i64_exact().unwrap();
            }
        }
        for (j, &u) in units.iter().enumerate() {
            if side(inner.len() + j) != side(pos[u]) {
                c += 1;
            }
        }
        let sp = R::new(c.into(), (wa.min(total - wa) as i64).into());
        if best.as_ref().map_or(true, |b| sp < *b) {
            best = Some(sp);
        }
    }
    best
}

/// Minimum congestion by a per-pair arc formulation solved exactly.
pub fn lp_congestion(g: &Graph<R>, demands: &[(VertexId, VertexId, R)]) -> Option<R> {
    let m = g.m();
    let p = demands.len();
    let mut lp = LinearProgram::new(0);
    let eta = lp.add_var(R::one());
    let mut var = vec![vec![(0usize, 0usize); m]; p];
    for row in var.iter_mut() {
        for slot in row.iter_mut() {
            *slot = (lp.add_var(R::zero()), lp.add_var(R::zero()));
        }
    }
    for (pi, (a, b, d)) in demands.iter().enumerate() {
        for v in 0..g.n() {
            let mut coeffs = Vec::new();
            for &e in g.incident(v) {
                let ed = g.edge(e);
                let (fwd, bwd) = var[pi][e];
                // arc fwd goes u -> v
                if ed.u == v {
                    coeffs.push((fwd, R::one()));
                    coeffs.push((bwd, -R::one()));
                } else {
                    coeffs.push((fwd, -R::one()));
                    coeffs.push((bwd, R::one()));
                }
            }
            let rhs = if v == *a {
                d.clone()
            } else if v == *b {
                -d.clone()
            } else {
                R::zero()
            };
            lp.add_row(coeffs, Cmp::Eq, rhs);
        }
    }
    for e in 0..m {
        let mut coeffs: Vec<(usize, R)> = Vec::new();
        for row in &var {
            coeffs.push((row[e].0, R::one()));
            coeffs.push((row[e].1, R::one()));
        }
        coeffs.push((eta, -g.edge(e).cap.clone()));
        lp.add_row(coeffs, Cmp::Le, R::zero());
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

/// Walk validity, demand sums and loads of a path flow, from scratch.
/// Returns (issues, congestion).
pub fn audit_flow(g: &Graph<R>, f: &FlowSolution<R>) -> (Vec<String>, R) {
    let mut issues = Vec::new();
    let mut load = vec![R::zero(); g.m()];
    for (ci, c) in f.commodities.iter().enumerate() {
        let mut sum = R::zero();
        for p in &c.paths {
            let mut at = c.a;
            for &e in &p.edges {
                let ed = g.edge(e);
                at = if ed.u == at {
                    ed.v
                } else if ed.v == at {
                    ed.u
                } else {
                    issues.push(format!("commodity {ci}: broken walk"));
                    break;
                };
                load[e] = load[e].clone() + p.amount.clone();
            }
            if at != c.b {
                issues.push(format!("commodity {ci}: walk ends at {at}, not {}", c.b));
            }
            if p.amount < R::zero() {
                issues.push(format!("commodity {ci}: negative amount"));
            }
            sum = sum + p.amount.clone();
        }
        if sum != c.demand {
            issues.push(format!("commodity {ci}: routes {sum}, demand {}", c.demand));
        }
    }
    let cong = load
        .iter()
        .zip(g.edges())
        .map(|(l, e)| l.clone() / e.cap.clone())
        .fold(R::zero(), |a, b| if b > a { b } else { a });
    (issues, cong)
}

/// Connected random graph on `inner` vertices plus `k` pendant terminals.
pub fn pendant_random(inner: usize, k: usize, pct: u32, max_cap: i64, seed: u64) -> Graph<R> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(inner + k);
    for v in 1..inner {
        let u = r.gen_range(0..v);
        g.add_edge(u, v, int(r.gen_range(1..=max_cap))).unwrap();
    }
    for u in 0..inner {
        for v in u + 2..inner {
            if r.gen_range(0..100) < pct {
                g.add_edge(u, v, int(r.gen_range(1..=max_cap))).unwrap();
            }
        }
    }
    for t in 0..k {
        g.add_edge(inner + t, r.gen_range(0..inner), int(r.gen_range(1..=max_cap))).unwrap();
        g.add_terminal(inner + t).unwrap();
    }
    g
}
