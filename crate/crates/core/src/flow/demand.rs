//! Symmetric terminal demands. Text format: `d <t1> <t2> <value>` (1-based).

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt::Write;

/// D(t, t') for unordered pairs; stored once per pair with t < t'.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DemandSet<S> {
    pairs: BTreeMap<(VertexId, VertexId), S>,
}

impl<S: Scalar> DemandSet<S> {
    pub fn new() -> Self {
        DemandSet { pairs: BTreeMap::new() }
    }

    /// Add `v` to D(a, b). Zero entries are dropped.
    pub fn add(&mut self, a: VertexId, b: VertexId, v: S) -> Result<()> {
        if a == b {
            return Err(Error::Input(format!("demand between {a} and itself")));
        }
        if v.is_negative() {
            return Err(Error::Input(format!("negative demand {v}")));
        }
        let key = (a.min(b), a.max(b));
        let cur = self.pairs.remove(&key).unwrap_or_else(S::zero);
        let nv = cur + v;
        if !nv.is_zero() {
            self.pairs.insert(key, nv);
        }
        Ok(())
    }

    pub fn get(&self, a: VertexId, b: VertexId) -> S {
        self.pairs.get(&(a.min(b), a.max(b))).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId, &S)> {
        self.pairs.iter().map(|(&(a, b), v)| (a, b, v))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Largest total demand at a single vertex.
    pub fn gamma(&self) -> S {
        let mut tot: BTreeMap<VertexId, S> = BTreeMap::new();
        for (&(a, b), v) in &self.pairs {
            for x in [a, b] {
                let e = tot.entry(x).or_insert_with(S::zero);
                *e = e.clone() + v.clone();
            }
        }
        tot.into_values().fold(S::zero(), S::max_of)
    }

    pub fn scaled(&self, f: &S) -> Self {
        DemandSet { pairs: self.pairs.iter().map(|(k, v)| (*k, v.clone() * f.clone())).collect() }
    }

    pub fn map_vertices(&self, f: impl Fn(VertexId) -> VertexId) -> Result<Self> {
        let mut d = DemandSet::new();
        for (a, b, v) in self.iter() {
            d.add(f(a), f(b), v.clone())?;
        }
        Ok(d)
    }

    pub fn convert<T: Scalar>(&self) -> DemandSet<T> {
        DemandSet { pairs: self.pairs.iter().map(|(k, v)| (*k, crate::scalar::convert(v))).collect() }
    }
}

pub fn read_demands<S: Scalar>(text: &str, g: &Graph<S>) -> Result<DemandSet<S>> {
    let mut d = DemandSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let t: Vec<&str> = s.split_whitespace().collect();
        let perr = |m: String| Error::Parse { line, msg: m };
        if t[0] != "d" || t.len() != 4 {
            return Err(perr("demand line must be 'd <t1> <t2> <value>'".into()));
        }
        let mut vs = [0usize; 2];
        for j in 0..2 {
            let v: usize = t[1 + j].parse().map_err(|_| perr(format!("bad vertex '{}'", t[1 + j])))?;
            if v == 0 || v > g.n() || !g.is_terminal(v - 1) {
                return Err(perr(format!("{v} is not a terminal")));
            }
            vs[j] = v - 1;
        }
        let val = S::parse_scalar(t[3]).ok_or_else(|| perr(format!("bad value '{}'", t[3])))?;
        d.add(vs[0], vs[1], val).map_err(|e| perr(e.to_string()))?;
    }
    Ok(d)
}

pub fn write_demands<S: Scalar>(d: &DemandSet<S>) -> String {
    let mut s = String::new();
    for (a, b, v) in d.iter() {
        writeln!(s, "d {} {} {}", a + 1, b + 1, v).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    type R = BigRational;

    #[test]
    fn symmetric_and_gamma() {
        let mut d = DemandSet::<R>::new();
        d.add(2, 0, R::from_int(1)).unwrap();
        d.add(0, 1, R::from_frac(1, 2)).unwrap();
        assert_eq!(d.get(0, 2), d.get(2, 0));
        assert_eq!(d.gamma(), R::from_frac(3, 2));
        assert!(d.add(1, 1, R::from_int(1)).is_err());
    }

    #[test]
    fn parse_checks_terminals() {
        let mut g = Graph::<R>::new(3);
        g.add_edge(0, 1, R::from_int(1)).unwrap();
        g.add_edge(1, 2, R::from_int(1)).unwrap();
        g.set_terminals(&[0, 2]).unwrap();
        let d = read_demands("d 1 3 1/2\n", &g).unwrap();
        assert_eq!(d.get(0, 2), R::from_frac(1, 2));
        assert!(read_demands("d 1 2 1\n", &g).is_err());
        assert_eq!(read_demands(&write_demands(&d), &g).unwrap(), d);
    }
}
