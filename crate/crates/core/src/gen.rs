//! Seeded instance families.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Dumbbell,
    Grid,
    Regular,
    WellLinked,
    Random,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "dumbbell" => Family::Dumbbell,
            "grid" => Family::Grid,
            "regular" => Family::Regular,
            "welllinked" => Family::WellLinked,
            "random" => Family::Random,
            _ => return Err(Error::Input(format!("unknown family '{s}'"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub family: Family,
    /// Number of terminals.
    pub k: usize,
    /// Family size parameter (clique size, grid side, vertex count).
    pub size: usize,
    /// Degree for `regular`, edge probability in percent for `random`.
    pub param: usize,
    /// Capacities are drawn from 1..=max_cap.
    pub max_cap: i64,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec { family: Family::Random, k: 4, size: 10, param: 30, max_cap: 1, seed: 0 }
    }
}

fn cap<S: Scalar>(rng: &mut ChaCha8Rng, max_cap: i64) -> S {
    S::from_int(if max_cap <= 1 { 1 } else { rng.gen_range(1..=max_cap) })
}

/// Attach k degree-1 terminals to the given anchors (round robin).
fn pendants<S: Scalar>(g: &mut Graph<S>, anchors: &[VertexId], k: usize, rng: &mut ChaCha8Rng, max_cap: i64) {
    for i in 0..k {
        let t = g.add_vertex();
        let a = anchors[i % anchors.len()];
        g.add_edge(t, a, cap(rng, max_cap)).expect("valid");
        g.add_terminal(t).expect("valid");
    }
}

fn clique<S: Scalar>(g: &mut Graph<S>, vs: &[VertexId], rng: &mut ChaCha8Rng, max_cap: i64) {
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            g.add_edge(vs[i], vs[j], cap(rng, max_cap)).expect("valid");
        }
    }
}

pub fn generate<S: Scalar>(spec: &GenSpec) -> Result<Graph<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let GenSpec { k, size, param, max_cap, .. } = *spec;
    if size == 0 {
        return Err(Error::Input("size must be positive".into()));
    }
    let mut g: Graph<S> = Graph::new(0);
    match spec.family {
        Family::Dumbbell => {
            let a: Vec<VertexId> = (0..size).map(|_| g.add_vertex()).collect();
            let b: Vec<VertexId> = (0..size).map(|_| g.add_vertex()).collect();
            clique(&mut g, &a, &mut rng, max_cap);
            clique(&mut g, &b, &mut rng, max_cap);
            g.add_edge(a[0], b[0], cap(&mut rng, max_cap))?;
            let anchors: Vec<VertexId> = a.iter().zip(&b).flat_map(|(&x, &y)| [x, y]).collect();
            pendants(&mut g, &anchors, k, &mut rng, max_cap);
        }
        Family::Grid => {
            let id = |r: usize, c: usize| r * size + c;
            for _ in 0..size * size {
                g.add_vertex();
            }
            for r in 0..size {
                for c in 0..size {
                    if c + 1 < size {
                        g.add_edge(id(r, c), id(r, c + 1), cap(&mut rng, max_cap))?;
                    }
                    if r + 1 < size {
                        g.add_edge(id(r, c), id(r + 1, c), cap(&mut rng, max_cap))?;
                    }
                }
            }
            let mut border: Vec<VertexId> =
                (0..size * size).filter(|&v| v / size == 0 || v / size == size - 1 || v % size == 0 || v % size == size - 1).collect();
            border.shuffle(&mut rng);
            pendants(&mut g, &border, k, &mut rng, max_cap);
        }
        Family::Regular => {
            let d = param.max(2);
            if size * d % 2 == 1 || d >= size {
                return Err(Error::Input("regular needs size * d even and d < size".into()));
            }
            let edges = random_regular(size, d, &mut rng)?;
            for _ in 0..size {
                g.add_vertex();
            }
            for (u, v) in edges {
                g.add_edge(u, v, cap(&mut rng, max_cap))?;
            }
            let mut vs: Vec<VertexId> = (0..size).collect();
            vs.shuffle(&mut rng);
            pendants(&mut g, &vs, k, &mut rng, max_cap);
        }
        Family::WellLinked => {
            let vs: Vec<VertexId> = (0..size).map(|_| g.add_vertex()).collect();
            clique(&mut g, &vs, &mut rng, 1);
            pendants(&mut g, &vs, k, &mut rng, 1);
        }
        Family::Random => {
            let n = size.max(k + 1);
            for _ in 0..n {
                g.add_vertex();
            }
            let mut order: Vec<VertexId> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut present = std::collections::BTreeSet::new();
            for i in 1..n {
                let j = rng.gen_range(0..i);
                let (u, v) = (order[i].min(order[j]), order[i].max(order[j]));
                present.insert((u, v));
            }
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_range(0..100) < param {
                        present.insert((u, v));
                    }
                }
            }
            for (u, v) in present {
                g.add_edge(u, v, cap(&mut rng, max_cap))?;
            }
            let mut vs: Vec<VertexId> = (0..n).collect();
            vs.shuffle(&mut rng);
            g.set_terminals(&vs[..k.min(n)])?;
        }
    }
    Ok(g)
}

/// Pairing-model d-regular simple graph (retries until simple).
fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    'outer: for _ in 0..1000 {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        points.shuffle(rng);
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for p in points.chunks(2) {
            let (u, v) = (p[0].min(p[1]), p[0].max(p[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'outer;
            }
            out.push((u, v));
        }
        return Ok(out);
    }
    Err(Error::Input("could not sample a simple regular graph".into()))
}
