//! Capacitated undirected multigraphs with an ordered terminal set.

mod io;

pub use io::{read_graph, read_graph_ext, write_graph, ExtraLine};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<S> {
    pub u: VertexId,
    pub v: VertexId,
    pub cap: S,
}

impl<S> Edge<S> {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Graph<S> {
    n: usize,
    edges: Vec<Edge<S>>,
    adj: Vec<Vec<EdgeId>>,
    terminals: Vec<VertexId>,
    is_terminal: Vec<bool>,
}

/// The instance (G_S, T'_S): S plus one pendant terminal per boundary edge.
#[derive(Clone, Debug)]
pub struct Subdivided<S> {
    pub graph: Graph<S>,
    /// Local vertex i < inner.len() is parent vertex inner[i].
    pub inner: Vec<VertexId>,
    /// Local terminal inner.len() + j subdivides parent edge boundary[j].
    pub boundary: Vec<EdgeId>,
    /// Parent edge of every local edge.
    pub edge_parent: Vec<EdgeId>,
}

impl<S> Subdivided<S> {
    pub fn s_len(&self) -> usize {
        self.inner.len()
    }
    pub fn parent_vertex(&self, local: VertexId) -> Option<VertexId> {
        self.inner.get(local).copied()
    }
}

/// Result of contracting disjoint clusters.
#[derive(Clone, Debug)]
pub struct Contracted<S> {
    pub graph: Graph<S>,
    /// Image of every parent vertex.
    pub vertex_map: Vec<VertexId>,
    /// Supernode of cluster i.
    pub supernodes: Vec<VertexId>,
    /// Parent edge of every surviving edge.
    pub edge_parent: Vec<EdgeId>,
}

impl<S: Scalar> Graph<S> {
    pub fn new(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n], terminals: Vec::new(), is_terminal: vec![false; n] }
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.is_terminal.push(false);
        self.n += 1;
        self.n - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, cap: S) -> Result<EdgeId> {
        if u >= self.n || v >= self.n {
            return Err(Error::Input(format!("edge ({u},{v}) references a vertex outside 0..{}", self.n)));
        }
        if u == v {
            return Err(Error::Input(format!("self-loop at vertex {u}")));
        }
        if !cap.is_positive() {
            return Err(Error::Input(format!("edge ({u},{v}) has non-positive capacity {cap}")));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, cap });
        self.adj[u].push(id);
        self.adj[v].push(id);
        Ok(id)
    }

    pub fn add_terminal(&mut self, t: VertexId) -> Result<()> {
        if t >= self.n {
            return Err(Error::Input(format!("terminal {t} outside 0..{}", self.n)));
        }
        if self.is_terminal[t] {
            return Err(Error::Input(format!("duplicate terminal {t}")));
        }
        self.is_terminal[t] = true;
        self.terminals.push(t);
        Ok(())
    }

    pub fn set_terminals(&mut self, ts: &[VertexId]) -> Result<()> {
        self.terminals.clear();
        self.is_terminal = vec![false; self.n];
        for &t in ts {
            self.add_terminal(t)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.edges.len()
    }
    pub fn k(&self) -> usize {
        self.terminals.len()
    }
    pub fn edges(&self) -> &[Edge<S>] {
        &self.edges
    }
    pub fn edge(&self, e: EdgeId) -> &Edge<S> {
        &self.edges[e]
    }
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.adj[v]
    }
    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }
    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.is_terminal[v]
    }
    pub fn terminal_mask(&self) -> &[bool] {
        &self.is_terminal
    }
    pub fn non_terminals(&self) -> Vec<VertexId> {
        (0..self.n).filter(|&v| !self.is_terminal[v]).collect()
    }
    pub fn terminal_index(&self, v: VertexId) -> Option<usize> {
        self.terminals.iter().position(|&t| t == v)
    }

    pub fn degree_cap(&self, v: VertexId) -> S {
        self.adj[v].iter().fold(S::zero(), |a, &e| a + self.edges[e].cap.clone())
    }

    /// Total capacity of edges incident to at least one terminal.
    pub fn terminal_capacity(&self) -> S {
        self.edges
            .iter()
            .filter(|e| self.is_terminal[e.u] || self.is_terminal[e.v])
            .fold(S::zero(), |a, e| a + e.cap.clone())
    }

    pub fn mask_of(&self, set: &[VertexId]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &v in set {
            m[v] = true;
        }
        m
    }

    /// out(S): edges with exactly one endpoint in S, in edge-id order.
    pub fn out_edges(&self, mask: &[bool]) -> Vec<EdgeId> {
        (0..self.edges.len()).filter(|&e| mask[self.edges[e].u] != mask[self.edges[e].v]).collect()
    }

    pub fn out_capacity(&self, mask: &[bool]) -> S {
        self.out_edges(mask).iter().fold(S::zero(), |a, &e| a + self.edges[e].cap.clone())
    }

    /// Capacity of edges crossing between side-true and side-false.
    pub fn cut_value(&self, side: &[bool]) -> S {
        self.out_capacity(side)
    }

    /// Connected components of the subgraph induced by `mask`, each sorted,
    /// ordered by smallest vertex.
    pub fn components_within(&self, mask: &[bool]) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if !mask[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                i += 1;
                for &e in &self.adj[x] {
                    let y = self.edges[e].other(x);
                    if mask[y] && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.components_within(&vec![true; self.n])
    }

    pub fn is_connected_set(&self, set: &[VertexId]) -> bool {
        !set.is_empty() && self.components_within(&self.mask_of(set)).len() == 1
    }

    /// Build (G_S, T'_S). Local edges follow parent edge order.
    pub fn subdivide_boundary(&self, set: &[VertexId]) -> Result<Subdivided<S>> {
        let mut inner: Vec<VertexId> = set.to_vec();
        inner.sort_unstable();
        inner.dedup();
        if inner.len() != set.len() {
            return Err(Error::Precondition("vertex set has duplicates".into()));
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in inner.iter().enumerate() {
            if v >= self.n {
                return Err(Error::Precondition(format!("vertex {v} out of range")));
            }
            local[v] = i;
        }
        let mask: Vec<bool> = local.iter().map(|&l| l != usize::MAX).collect();
        let boundary = self.out_edges(&mask);
        let s = inner.len();
        let mut g = Graph::new(s + boundary.len());
        let mut edge_parent = Vec::new();
        let mut bi = 0;
        for (e, ed) in self.edges.iter().enumerate() {
            let (iu, iv) = (mask[ed.u], mask[ed.v]);
            if iu && iv {
                g.add_edge(local[ed.u], local[ed.v], ed.cap.clone())?;
                edge_parent.push(e);
            } else if iu || iv {
                let inside = if iu { ed.u } else { ed.v };
                g.add_edge(local[inside], s + bi, ed.cap.clone())?;
                edge_parent.push(e);
                bi += 1;
            }
        }
        for j in 0..boundary.len() {
            g.add_terminal(s + j)?;
        }
        Ok(Subdivided { graph: g, inner, boundary, edge_parent })
    }

    /// Contract disjoint, terminal-free, non-empty clusters into supernodes.
    pub fn contract(&self, clusters: &[Vec<VertexId>]) -> Result<Contracted<S>> {
        let mut owner = vec![usize::MAX; self.n];
        for (ci, c) in clusters.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Precondition(format!("cluster {ci} is empty")));
            }
            for &v in c {
                if v >= self.n {
                    return Err(Error::Precondition(format!("cluster {ci} has vertex {v} out of range")));
                }
                if self.is_terminal[v] {
                    return Err(Error::Precondition(format!("cluster {ci} contains terminal {v}")));
                }
                if owner[v] != usize::MAX {
                    return Err(Error::Precondition(format!("vertex {v} is in two clusters")));
                }
                owner[v] = ci;
            }
        }
        let mut vertex_map = vec![0; self.n];
        let mut next = 0;
        for v in 0..self.n {
            if owner[v] == usize::MAX {
                vertex_map[v] = next;
                next += 1;
            }
        }
        let supernodes: Vec<VertexId> = (0..clusters.len()).map(|i| next + i).collect();
        for v in 0..self.n {
            if owner[v] != usize::MAX {
                vertex_map[v] = supernodes[owner[v]];
            }
        }
        let mut g = Graph::new(next + clusters.len());
        let mut edge_parent = Vec::new();
        for (e, ed) in self.edges.iter().enumerate() {
            let (a, b) = (vertex_map[ed.u], vertex_map[ed.v]);
            if a != b {
                g.add_edge(a, b, ed.cap.clone())?;
                edge_parent.push(e);
            }
        }
        for &t in &self.terminals {
            g.add_terminal(vertex_map[t])?;
        }
        Ok(Contracted { graph: g, vertex_map, supernodes, edge_parent })
    }

    /// Replace edge e by mult[e] parallel unit-capacity edges.
    pub fn unit_expand(&self, mult: &[usize]) -> Result<(Graph<S>, Vec<EdgeId>)> {
        if mult.len() != self.m() {
            return Err(Error::Precondition("multiplicity vector length differs from edge count".into()));
        }
        let mut g = Graph::new(self.n);
        let mut parent = Vec::new();
        for (e, ed) in self.edges.iter().enumerate() {
            for _ in 0..mult[e] {
                g.add_edge(ed.u, ed.v, S::one())?;
                parent.push(e);
            }
        }
        g.set_terminals(&self.terminals)?;
        Ok((g, parent))
    }

    /// Merge parallel edges, summing capacities. Returns the merged graph and
    /// the merged edge of every original edge.
    pub fn bundle_parallel(&self) -> (Graph<S>, Vec<EdgeId>) {
        let mut key: std::collections::BTreeMap<(VertexId, VertexId), EdgeId> = Default::default();
        let mut g: Graph<S> = Graph::new(self.n);
        let mut map = Vec::with_capacity(self.m());
        for ed in &self.edges {
            let k = (ed.u.min(ed.v), ed.u.max(ed.v));
            match key.get(&k) {
                Some(&id) => {
                    g.edges[id].cap = g.edges[id].cap.clone() + ed.cap.clone();
                    map.push(id);
                }
                None => {
                    let id = g.add_edge(k.0, k.1, ed.cap.clone()).expect("valid edge");
                    key.insert(k, id);
                    map.push(id);
                }
            }
        }
        g.set_terminals(&self.terminals).expect("valid terminals");
        (g, map)
    }

    pub fn set_capacity(&mut self, e: EdgeId, cap: S) {
        self.edges[e].cap = cap;
    }

    pub fn map_caps<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Graph<T> {
        let mut g = Graph::new(self.n);
        for ed in &self.edges {
            g.add_edge(ed.u, ed.v, f(&ed.cap)).expect("mapped capacity must stay positive");
        }
        g.set_terminals(&self.terminals).unwrap();
        g
    }

    pub fn to_f64(&self) -> Graph<f64> {
        self.map_caps(|c| c.to_f64())
    }

    /// Every capacity is a positive integer.
    pub fn is_integral(&self) -> bool {
        self.edges.iter().all(|e| e.cap.is_integral())
    }

    /// Terminals touch exactly one edge each.
    pub fn terminals_have_single_edge(&self) -> bool {
        self.terminals.iter().all(|&t| self.adj[t].len() == 1)
    }
}

/// Sorted vertex list to membership mask.
pub fn mask(n: usize, set: &[VertexId]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}
