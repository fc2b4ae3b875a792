//! Sparsifier files: the graph format of H plus
//!
//! ```text
//! # vsparse <key> <value> ...
//! map <supernode> <vertices of G>
//! cert <cluster> eta <value>
//! ```

use crate::error::{Error, Result};
use crate::graph::{read_graph_ext, write_graph, Graph, VertexId};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct SparsifierFile<S> {
    pub h: Graph<S>,
    /// Clusters in supernode order, as G vertex ids.
    pub clusters: Vec<Vec<VertexId>>,
    pub supernodes: Vec<VertexId>,
    pub certs: Vec<(usize, S)>,
    pub header: BTreeMap<String, String>,
}

pub fn write_sparsifier<S: Scalar>(f: &SparsifierFile<S>) -> String {
    let mut s = String::from("# vsparse");
    for (k, v) in &f.header {
        write!(s, " {k} {v}").unwrap();
    }
    s.push('\n');
    s.push_str(&write_graph(&f.h));
    for (c, &sn) in f.clusters.iter().zip(&f.supernodes) {
        let vs: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
        writeln!(s, "map {} {}", sn + 1, vs.join(" ")).unwrap();
    }
    for (c, eta) in &f.certs {
        writeln!(s, "cert {} eta {}", c + 1, eta).unwrap();
    }
    s
}

pub fn read_sparsifier<S: Scalar>(text: &str) -> Result<SparsifierFile<S>> {
    let (h, extra) = read_graph_ext::<S>(text, &["map", "cert"])?;
    let mut header = BTreeMap::new();
    if let Some(first) = text.lines().map(str::trim).find(|l| l.starts_with("# vsparse")) {
        let toks: Vec<&str> = first.split_whitespace().skip(2).collect();
        for kv in toks.chunks(2) {
            if kv.len() == 2 {
                header.insert(kv[0].to_string(), kv[1].to_string());
            }
        }
    }
    let mut maps: Vec<(VertexId, Vec<VertexId>)> = Vec::new();
    let mut certs = Vec::new();
    for x in extra {
        let perr = |m: &str| Error::Parse { line: x.line, msg: m.to_string() };
        let num = |t: &str| t.parse::<usize>().ok().filter(|&v| v > 0).map(|v| v - 1);
        match x.tokens[0].as_str() {
            "map" => {
                if x.tokens.len() < 3 {
                    return Err(perr("map line must be 'map <supernode> <vertices>'"));
                }
                let sn = num(&x.tokens[1]).filter(|&v| v < h.n()).ok_or_else(|| perr("bad supernode id"))?;
                let vs = x.tokens[2..].iter().map(|t| num(t).ok_or_else(|| perr("bad vertex id"))).collect::<Result<_>>()?;
                maps.push((sn, vs));
            }
            _ => {
                if x.tokens.len() != 4 || x.tokens[2] != "eta" {
                    return Err(perr("cert line must be 'cert <cluster> eta <value>'"));
                }
                let c = num(&x.tokens[1]).ok_or_else(|| perr("bad cluster id"))?;
                let v = S::parse_scalar(&x.tokens[3]).ok_or_else(|| perr("bad eta"))?;
                certs.push((c, v));
            }
        }
    }
    maps.sort_by_key(|m| m.0);
    let supernodes = maps.iter().map(|m| m.0).collect();
    let clusters = maps.into_iter().map(|m| m.1).collect();
    Ok(SparsifierFile { h, clusters, supernodes, certs, header })
}
