//! Text format:
//!
//! ```text
//! # comment
//! p vsp <n> <m> <k>
//! e <u> <v> <cap>      (1-based vertices, cap decimal or a/b)
//! t <v>
//! ```

use super::Graph;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::fmt::Write;

/// A line the graph reader does not interpret (e.g. `map`, `cert`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExtraLine {
    pub line: usize,
    pub tokens: Vec<String>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn vertex(tok: Option<&str>, n: usize, line: usize) -> Result<usize> {
    let t = tok.ok_or_else(|| perr(line, "missing vertex id"))?;
    let v: usize = t.parse().map_err(|_| perr(line, format!("bad vertex id '{t}'")))?;
    if v == 0 || v > n {
        return Err(perr(line, format!("vertex {v} outside 1..{n}")));
    }
    Ok(v - 1)
}

pub fn read_graph<S: Scalar>(text: &str) -> Result<Graph<S>> {
    let (g, extra) = read_graph_ext(text, &[])?;
    if let Some(x) = extra.first() {
        return Err(perr(x.line, format!("unknown line kind '{}'", x.tokens[0])));
    }
    Ok(g)
}

/// Read a graph, passing lines whose first token is in `extra_kinds` back.
pub fn read_graph_ext<S: Scalar>(text: &str, extra_kinds: &[&str]) -> Result<(Graph<S>, Vec<ExtraLine>)> {
    let mut g: Option<Graph<S>> = None;
    let mut expect = (0, 0);
    let mut extra = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if g.is_some() {
                    return Err(perr(line, "duplicate header"));
                }
                if toks.len() != 5 || toks[1] != "vsp" {
                    return Err(perr(line, "header must be 'p vsp <n> <m> <k>'"));
                }
                let num = |t: &str| t.parse::<usize>().map_err(|_| perr(line, format!("bad count '{t}'")));
                let n = num(toks[2])?;
                expect = (num(toks[3])?, num(toks[4])?);
                g = Some(Graph::new(n));
            }
            "e" => {
                let gr = g.as_mut().ok_or_else(|| perr(line, "edge before header"))?;
                if toks.len() != 4 {
                    return Err(perr(line, "edge line must be 'e <u> <v> <cap>'"));
                }
                let u = vertex(toks.get(1).copied(), gr.n(), line)?;
                let v = vertex(toks.get(2).copied(), gr.n(), line)?;
                let cap = S::parse_scalar(toks[3]).ok_or_else(|| perr(line, format!("bad capacity '{}'", toks[3])))?;
                gr.add_edge(u, v, cap).map_err(|e| perr(line, e.to_string()))?;
            }
            "t" => {
                let gr = g.as_mut().ok_or_else(|| perr(line, "terminal before header"))?;
                if toks.len() != 2 {
                    return Err(perr(line, "terminal line must be 't <v>'"));
                }
                let v = vertex(toks.get(1).copied(), gr.n(), line)?;
                gr.add_terminal(v).map_err(|e| perr(line, e.to_string()))?;
            }
            k if extra_kinds.contains(&k) => {
                extra.push(ExtraLine { line, tokens: toks.iter().map(|t| t.to_string()).collect() });
            }
            k => return Err(perr(line, format!("unknown line kind '{k}'"))),
        }
    }
    let g = g.ok_or_else(|| Error::Input("missing 'p vsp' header".into()))?;
    if g.m() != expect.0 {
        return Err(Error::Input(format!("header declares {} edges, found {}", expect.0, g.m())));
    }
    if g.k() != expect.1 {
        return Err(Error::Input(format!("header declares {} terminals, found {}", expect.1, g.k())));
    }
    Ok((g, extra))
}

pub fn write_graph<S: Scalar>(g: &Graph<S>) -> String {
    let mut s = String::new();
    writeln!(s, "p vsp {} {} {}", g.n(), g.m(), g.k()).unwrap();
    for e in g.edges() {
        writeln!(s, "e {} {} {}", e.u + 1, e.v + 1, e.cap).unwrap();
    }
    for &t in g.terminals() {
        writeln!(s, "t {}", t + 1).unwrap();
    }
    s
}
