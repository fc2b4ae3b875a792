//! Good routers and their certificates.
//!
//! A cluster S is a good router when it is 1/3-well-linked and every
//! boundary unit can send 1/z to every other boundary unit simultaneously
//! with congestion at most eta*. Boundary units attached to the same vertex
//! are grouped; each group pair (u, w) carries 2 m_u m_w / z inside G[S],
//! and every boundary edge carries 2 (z - 1) / z per unit regardless of
//! the routing.

use super::params::FlowParams;
use crate::error::{Error, Result};
use crate::flow::{is_well_linked, route_commodities, FlowSolution, WellLinked};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::Scalar;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum WlStatus {
    Certified,
    Violated,
    Unverified,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouterCertificate<S> {
    pub members: Vec<VertexId>,
    pub boundary: Vec<EdgeId>,
    pub z: i64,
    pub well_linked: WlStatus,
    /// Parent edges of the local graph G[S], in local order.
    pub internal_edges: Vec<EdgeId>,
    /// Flow on the local graph G[S] (local vertex i is members[i]).
    pub flow: FlowSolution<S>,
    pub boundary_congestion: S,
    pub congestion: S,
}

/// Local graph G[S] with members in sorted order and edges in parent order.
pub fn local_graph<S: Scalar>(g: &Graph<S>, members: &[VertexId]) -> (Graph<S>, Vec<EdgeId>) {
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let mut h = Graph::new(members.len());
    let mut parent = Vec::new();
    for (e, ed) in g.edges().iter().enumerate() {
        if local[ed.u] != usize::MAX && local[ed.v] != usize::MAX {
            h.add_edge(local[ed.u], local[ed.v], ed.cap.clone()).expect("valid");
            parent.push(e);
        }
    }
    (h, parent)
}

/// Boundary units per member (local index) and z.
pub fn boundary_groups<S: Scalar>(g: &Graph<S>, members: &[VertexId]) -> Result<(BTreeMap<usize, i64>, i64, Vec<EdgeId>)> {
    let mask = g.mask_of(members);
    let boundary = g.out_edges(&mask);
    let mut groups: BTreeMap<usize, i64> = BTreeMap::new();
    let mut z = 0;
    for &e in &boundary {
        let ed = g.edge(e);
        let inside = if mask[ed.u] { ed.u } else { ed.v };
        let li = members.binary_search(&inside).map_err(|_| Error::Internal("member lookup".into()))?;
        let c = ed.cap.to_i64_exact().ok_or_else(|| Error::Precondition("router check needs integral capacities".into()))?;
        *groups.entry(li).or_insert(0) += c;
        z += c;
    }
    Ok((groups, z, boundary))
}

/// Group-pair commodities (local ids) of the uniform router demand.
pub fn router_commodities<S: Scalar>(groups: &BTreeMap<usize, i64>, z: i64) -> Vec<(usize, usize, S)> {
    let gs: Vec<(usize, i64)> = groups.iter().map(|(&u, &m)| (u, m)).collect();
    let mut out = Vec::new();
    for i in 0..gs.len() {
        for j in i + 1..gs.len() {
            out.push((gs[i].0, gs[j].0, S::from_frac(2 * gs[i].1 * gs[j].1, z)));
        }
    }
    out
}

pub fn boundary_congestion<S: Scalar>(z: i64) -> S {
    if z <= 1 {
        S::zero()
    } else {
        S::from_frac(2 * (z - 1), z)
    }
}

/// Route the uniform router demand of S and report the certificate. The
/// well-linkedness field is left `Unverified`.
pub fn uniform_router_check<S: Scalar>(g: &Graph<S>, set: &[VertexId], params: &FlowParams) -> Result<RouterCertificate<S>> {
    let mut members = set.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() || members.iter().any(|&v| v >= g.n() || g.is_terminal(v)) {
        return Err(Error::Precondition("router set must be non-empty and terminal-free".into()));
    }
    let (groups, z, boundary) = boundary_groups(g, &members)?;
    let (local, internal_edges) = local_graph(g, &members);
    let comms = router_commodities::<S>(&groups, z);
    let routing = route_commodities(&local, &comms, &[], &params.routing)?;
    let bc = boundary_congestion::<S>(z);
    let congestion = match &routing.eta {
        Some(e) => S::max_of(e.clone(), bc.clone()),
        None => {
            return Err(Error::Precondition("router set is disconnected between boundary vertices".into()));
        }
    };
    Ok(RouterCertificate {
        members,
        boundary,
        z,
        well_linked: WlStatus::Unverified,
        internal_edges,
        flow: routing.flow,
        boundary_congestion: bc,
        congestion,
    })
}

/// Decide whether S is a good router; the certificate is returned either way
/// when the routing could be computed.
pub fn is_good_router<S: Scalar>(g: &Graph<S>, set: &[VertexId], params: &FlowParams) -> Result<(bool, Option<RouterCertificate<S>>)> {
    let wl = match is_well_linked(g, set, &S::from_frac(1, 3), params.budget_exp)? {
        WellLinked::Yes => WlStatus::Certified,
        WellLinked::No(_) => WlStatus::Violated,
        WellLinked::Unknown => WlStatus::Unverified,
    };
    if !g.is_connected_set(set) {
        return Ok((false, None));
    }
    let mut cert = uniform_router_check(g, set, params)?;
    cert.well_linked = wl;
    let ok = wl == WlStatus::Certified && cert.congestion <= S::from_int(params.eta_star);
    Ok((ok, Some(cert)))
}

/// Re-derive a certificate against G. Returns the list of problems found.
pub fn recheck_certificate<S: Scalar>(g: &Graph<S>, cert: &RouterCertificate<S>, eta_star: i64) -> Vec<String> {
    let mut issues = Vec::new();
    let mut members = cert.members.clone();
    members.sort_unstable();
    members.dedup();
    if members != cert.members || members.iter().any(|&v| v >= g.n() || g.is_terminal(v)) {
        issues.push("member list is not a sorted terminal-free vertex set".into());
        return issues;
    }
    let (groups, z, boundary) = match boundary_groups(g, &members) {
        Ok(x) => x,
        Err(e) => return vec![e.to_string()],
    };
    if z != cert.z || boundary != cert.boundary {
        issues.push(format!("boundary differs: stored z {} recomputed {z}", cert.z));
    }
    let (local, internal) = local_graph(g, &members);
    if internal != cert.internal_edges {
        issues.push("internal edge list differs from G[S]".into());
        return issues;
    }
    issues.extend(cert.flow.check(&local));
    let expected = router_commodities::<S>(&groups, z);
    let mut got: Vec<(usize, usize, S)> =
        cert.flow.commodities.iter().map(|c| (c.a.min(c.b), c.a.max(c.b), c.demand.clone())).collect();
    got.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    if got != expected {
        issues.push("commodities differ from the uniform router demand".into());
    }
    let bc = boundary_congestion::<S>(z);
    let cong = S::max_of(crate::flow::congestion_of(&local, &cert.flow.compute_loads(&local)), bc);
    if !cong.approx_eq(&cert.congestion) {
        issues.push(format!("stored congestion {} differs from recomputed {cong}", cert.congestion));
    }
    if cong > S::from_int(eta_star) {
        issues.push(format!("congestion {cong} exceeds {eta_star}"));
    }
    issues
}
