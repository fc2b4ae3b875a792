//! Flow networks over a scalar type, solved with Dinic.

use super::dinic::Dinic;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug)]
struct Arc<S> {
    u: usize,
    v: usize,
    fwd: S,
    bwd: S,
}

/// A network with directed or undirected capacitated arcs.
#[derive(Clone, Debug)]
pub struct Network<S> {
    n: usize,
    arcs: Vec<Arc<S>>,
    flow: Vec<S>,
    reach: Vec<bool>,
}

impl<S: Scalar> Network<S> {
    pub fn new(n: usize) -> Self {
        Network { n, arcs: Vec::new(), flow: Vec::new(), reach: Vec::new() }
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }
    pub fn add_arc(&mut self, u: usize, v: usize, cap: S) -> usize {
        self.arcs.push(Arc { u, v, fwd: cap, bwd: S::zero() });
        self.arcs.len() - 1
    }
    pub fn add_undirected(&mut self, u: usize, v: usize, cap: S) -> usize {
        self.arcs.push(Arc { u, v, fwd: cap.clone(), bwd: cap });
        self.arcs.len() - 1
    }

    /// Maximum s-t flow value. Afterwards `flow` and `source_side` are valid.
    pub fn solve(&mut self, s: usize, t: usize) -> S {
        if let Some((scale, caps)) = self.integer_caps() {
            let mut d = Dinic::<i64>::new(self.n);
            for (a, (f, b)) in self.arcs.iter().zip(caps.iter()) {
                d.add_arc(a.u, a.v, *f, *b);
            }
            let value = d.run(s, t);
            self.flow = self
                .arcs
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    let used = caps[i].0 - d.res[2 * i];
                    S::from_frac(used, 1) / scale.clone()
                })
                .collect();
            self.reach = d.reachable(s);
            S::from_frac(value, 1) / scale
        } else {
            let mut d = Dinic::<S>::new(self.n);
            for a in &self.arcs {
                d.add_arc(a.u, a.v, a.fwd.clone(), a.bwd.clone());
            }
            let value = d.run(s, t);
            self.flow = self.arcs.iter().enumerate().map(|(i, a)| a.fwd.clone() - d.res[2 * i].clone()).collect();
            self.reach = d.reachable(s);
            value
        }
    }

    /// Net flow from `u` to `v` on arc `i` (negative for reverse use).
    pub fn flow(&self, i: usize) -> S {
        self.flow[i].clone()
    }
    pub fn source_side(&self) -> &[bool] {
        &self.reach
    }
    pub fn arc_ends(&self, i: usize) -> (usize, usize) {
        (self.arcs[i].u, self.arcs[i].v)
    }

    /// Scale to integers when every capacity is rational with a common
    /// denominator small enough that all sums fit in i64.
    fn integer_caps(&self) -> Option<(S, Vec<(i64, i64)>)> {
        if !S::EXACT {
            if self.arcs.iter().all(|a| a.fwd.is_integral() && a.bwd.is_integral()) {
                let caps: Option<Vec<(i64, i64)>> =
                    self.arcs.iter().map(|a| Some((a.fwd.to_i64_exact()?, a.bwd.to_i64_exact()?))).collect();
                let caps = caps?;
                let sum: i128 = caps.iter().map(|c| (c.0 + c.1) as i128).sum();
                return (sum < (1i128 << 62)).then(|| (S::one(), caps));
            }
            return None;
        }
        let mut l = BigInt::one();
        let rs: Vec<_> = self.arcs.iter().map(|a| (a.fwd.to_big_rational(), a.bwd.to_big_rational())).collect();
        for (f, b) in &rs {
            l = l.lcm(f.denom());
            l = l.lcm(b.denom());
        }
        let lv = l.to_i64()?;
        let mut sum = BigInt::zero();
        let mut caps = Vec::with_capacity(rs.len());
        for (f, b) in &rs {
            let fi = (f.numer() * &l) / f.denom();
            let bi = (b.numer() * &l) / b.denom();
            sum += &fi + &bi;
            caps.push((fi.to_i64()?, bi.to_i64()?));
        }
        if sum >= BigInt::from(1i64 << 62) {
            return None;
        }
        Some((S::from_frac(lv, 1), caps))
    }
}
