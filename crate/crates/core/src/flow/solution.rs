//! Path-based multicommodity flows with stored loads.

use super::maxflow::FlowPath;
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::Scalar;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct Commodity<S> {
    pub a: VertexId,
    pub b: VertexId,
    pub demand: S,
    /// Walks from `a` to `b`.
    pub paths: Vec<FlowPath<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSolution<S> {
    pub commodities: Vec<Commodity<S>>,
    /// Fixed load per edge not carried by any listed path (may be empty).
    pub background: Vec<S>,
    pub loads: Vec<S>,
    pub congestion: S,
}

impl<S: Scalar> FlowSolution<S> {
    pub fn from_commodities(g: &Graph<S>, commodities: Vec<Commodity<S>>, background: Vec<S>) -> Self {
        let mut f = FlowSolution { commodities, background, loads: Vec::new(), congestion: S::zero() };
        f.loads = f.compute_loads(g);
        f.congestion = congestion_of(g, &f.loads);
        f
    }

    pub fn compute_loads(&self, g: &Graph<S>) -> Vec<S> {
        let mut l: Vec<S> = if self.background.len() == g.m() { self.background.clone() } else { vec![S::zero(); g.m()] };
        for c in &self.commodities {
            for p in &c.paths {
                for &e in &p.edges {
                    if e < l.len() {
                        l[e] = l[e].clone() + p.amount.clone();
                    }
                }
            }
        }
        l
    }

    /// Re-derive everything from the paths and report each inconsistency.
    pub fn check(&self, g: &Graph<S>) -> Vec<String> {
        let mut issues = Vec::new();
        if !self.background.is_empty() && self.background.len() != g.m() {
            issues.push("background load vector has wrong length".into());
        }
        for (ci, c) in self.commodities.iter().enumerate() {
            let mut sum = S::zero();
            for (pi, p) in c.paths.iter().enumerate() {
                if p.amount.is_negative() {
                    issues.push(format!("commodity {ci} path {pi} has negative amount"));
                }
                sum = sum + p.amount.clone();
                if let Some(msg) = walk_error(g, p, c.a, c.b) {
                    issues.push(format!("commodity {ci} path {pi}: {msg}"));
                }
            }
            if !sum.approx_eq(&c.demand) {
                issues.push(format!("commodity {ci} delivers {sum}, demand is {}", c.demand));
            }
        }
        let loads = self.compute_loads(g);
        if loads.len() != self.loads.len() {
            issues.push("stored load vector has wrong length".into());
        } else {
            for (e, (a, b)) in loads.iter().zip(&self.loads).enumerate() {
                if !a.approx_eq(b) {
                    issues.push(format!("edge {e} stored load {b} differs from recomputed {a}"));
                }
            }
        }
        let cong = congestion_of(g, &loads);
        if !cong.approx_eq(&self.congestion) {
            issues.push(format!("stored congestion {} differs from recomputed {cong}", self.congestion));
        }
        issues
    }

    pub fn total_delivered(&self, ci: usize) -> S {
        self.commodities[ci].paths.iter().fold(S::zero(), |a, p| a + p.amount.clone())
    }
}

fn walk_error<S: Scalar>(g: &Graph<S>, p: &FlowPath<S>, a: VertexId, b: VertexId) -> Option<String> {
    if p.vertices.len() != p.edges.len() + 1 {
        return Some("vertex and edge counts disagree".into());
    }
    let ends = (p.vertices[0], *p.vertices.last().unwrap());
    if ends != (a, b) && ends != (b, a) {
        return Some(format!("walk joins {:?}, commodity joins ({a}, {b})", ends));
    }
    for (i, &e) in p.edges.iter().enumerate() {
        if e >= g.m() {
            return Some(format!("edge {e} does not exist"));
        }
        let ed = g.edge(e);
        let (x, y) = (p.vertices[i], p.vertices[i + 1]);
        if !((ed.u == x && ed.v == y) || (ed.u == y && ed.v == x)) {
            return Some(format!("edge {e} does not join {x} and {y}"));
        }
    }
    None
}

pub fn congestion_of<S: Scalar>(g: &Graph<S>, loads: &[S]) -> S {
    let mut best = S::zero();
    for (e, l) in loads.iter().enumerate() {
        if e < g.m() {
            let r = l.clone() / g.edge(e).cap.clone();
            if r > best {
                best = r;
            }
        }
    }
    best
}

/// `f <edge-id> <load>` per edge (1-based) and `eta <value>`.
pub fn write_flow<S: Scalar>(f: &FlowSolution<S>) -> String {
    let mut s = String::new();
    for (e, l) in f.loads.iter().enumerate() {
        writeln!(s, "f {} {}", e + 1, l).unwrap();
    }
    writeln!(s, "eta {}", f.congestion).unwrap();
    s
}

/// Loads restricted to a set of edges.
pub fn loads_on<S: Scalar>(f: &FlowSolution<S>, edges: &[EdgeId]) -> Vec<S> {
    edges.iter().map(|&e| f.loads[e].clone()).collect()
}
