//! Max-flow / min-cut between vertex sets of a [`Graph`].

use super::network::Network;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::Scalar;

/// A vertex bipartition together with the capacity crossing it.
#[derive(Clone, Debug, PartialEq)]
pub struct CutCertificate<S> {
    /// side[v] is true on the source side.
    pub side: Vec<bool>,
    pub edges: Vec<EdgeId>,
    pub value: S,
}

impl<S: Scalar> CutCertificate<S> {
    pub fn from_side(g: &Graph<S>, side: Vec<bool>) -> Self {
        let edges = g.out_edges(&side);
        let value = edges.iter().fold(S::zero(), |a, &e| a + g.edge(e).cap.clone());
        CutCertificate { side, edges, value }
    }
}

#[derive(Clone, Debug)]
pub struct MaxFlow<S> {
    pub value: S,
    /// Signed flow on every edge, positive in the u -> v direction.
    pub flow: Vec<S>,
    pub cut: CutCertificate<S>,
}

fn check_sets(n: usize, a: &[VertexId], b: &[VertexId]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Precondition("source and sink sets must be non-empty".into()));
    }
    let mut mark = vec![0u8; n];
    for &v in a {
        if v >= n {
            return Err(Error::Precondition(format!("vertex {v} out of range")));
        }
        mark[v] = 1;
    }
    for &v in b {
        if v >= n {
            return Err(Error::Precondition(format!("vertex {v} out of range")));
        }
        if mark[v] == 1 {
            return Err(Error::Precondition(format!("vertex {v} is both source and sink")));
        }
    }
    Ok(())
}

/// Maximum flow from the set `sources` to the set `sinks`.
pub fn max_flow<S: Scalar>(g: &Graph<S>, sources: &[VertexId], sinks: &[VertexId]) -> Result<MaxFlow<S>> {
    check_sets(g.n(), sources, sinks)?;
    let n = g.n();
    let big = g.edges().iter().fold(S::one(), |a, e| a + e.cap.clone());
    let mut net = Network::new(n + 2);
    let (s, t) = (n, n + 1);
    for e in g.edges() {
        net.add_undirected(e.u, e.v, e.cap.clone());
    }
    for &v in sources {
        net.add_arc(s, v, big.clone());
    }
    for &v in sinks {
        net.add_arc(v, t, big.clone());
    }
    let value = net.solve(s, t);
    let flow = (0..g.m()).map(|i| net.flow(i)).collect();
    let side: Vec<bool> = net.source_side()[..n].to_vec();
    let cut = CutCertificate::from_side(g, side);
    debug_assert!(cut.value.approx_eq(&value));
    Ok(MaxFlow { value, flow, cut })
}

/// Minimum cut separating `a` from `b`.
pub fn min_cut_between<S: Scalar>(g: &Graph<S>, a: &[VertexId], b: &[VertexId]) -> Result<CutCertificate<S>> {
    Ok(max_flow(g, a, b)?.cut)
}

/// A path with the amount of flow it carries.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowPath<S> {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub amount: S,
}

/// Decompose signed edge flows into source-to-sink paths. Flow cycles are
/// dropped.
pub fn decompose_paths<S: Scalar>(
    g: &Graph<S>,
    flow: &[S],
    sources: &[VertexId],
    sinks: &[VertexId],
) -> Vec<FlowPath<S>> {
    let n = g.n();
    let mut rem: Vec<S> = flow.to_vec();
    let is_sink = crate::graph::mask(n, sinks);
    let mut out = Vec::new();
    for &src in sources {
        loop {
            let mut prev: Vec<Option<EdgeId>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[src] = true;
            let mut stack = vec![src];
            let mut hit = None;
            while let Some(x) = stack.pop() {
                if is_sink[x] && x != src {
                    hit = Some(x);
                    break;
                }
                for &e in g.incident(x) {
                    let ed = g.edge(e);
                    let y = ed.other(x);
                    let f = if ed.u == x { rem[e].clone() } else { -rem[e].clone() };
                    if !seen[y] && f.is_pos() {
                        seen[y] = true;
                        prev[y] = Some(e);
                        stack.push(y);
                    }
                }
            }
            let Some(end) = hit else { break };
            let mut edges = Vec::new();
            let mut verts = vec![end];
            let mut x = end;
            while x != src {
                let e = prev[x].unwrap();
                edges.push(e);
                x = g.edge(e).other(x);
                verts.push(x);
            }
            edges.reverse();
            verts.reverse();
            let mut amt: Option<S> = None;
            for (i, &e) in edges.iter().enumerate() {
                let f = if g.edge(e).u == verts[i] { rem[e].clone() } else { -rem[e].clone() };
                amt = Some(match amt {
                    None => f,
                    Some(a) => S::min_of(a, f),
                });
            }
            let amt = amt.unwrap();
            for (i, &e) in edges.iter().enumerate() {
                if g.edge(e).u == verts[i] {
                    rem[e] = rem[e].clone() - amt.clone();
                } else {
                    rem[e] = rem[e].clone() + amt.clone();
                }
            }
            out.push(FlowPath { vertices: verts, edges, amount: amt });
        }
    }
    out
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
        g
    }

    #[test]
    fn four_cycle_opposite() {
        let g = cycle4();
        let mf = max_flow(&g, &[0], &[2]).unwrap();
        assert_eq!(mf.value, R::from_int(2));
        let paths = decompose_paths(&g, &mf.flow, &[0], &[2]);
        let total = paths.iter().fold(R::from_int(0), |a, p| a + p.amount.clone());
        assert_eq!(total, R::from_int(2));
    }

    #[test]
    fn single_edge_and_disconnected() {
        let mut g = Graph::<R>::new(3);
        g.add_edge(0, 1, R::from_frac(3, 2)).unwrap();
        assert_eq!(max_flow(&g, &[0], &[1]).unwrap().value, R::from_frac(3, 2));
        let mf = max_flow(&g, &[0], &[2]).unwrap();
        assert_eq!(mf.value, R::from_int(0));
        assert!(mf.cut.edges.is_empty());
        assert!(max_flow(&g, &[0], &[0]).is_err());
    }
}
