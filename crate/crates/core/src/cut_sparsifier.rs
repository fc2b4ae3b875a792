//! Cut sparsifiers by contracting a strong well-linked decomposition.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::scalar::{ceil_to_i64, Scalar};
use crate::wl::{strong_decompose, DecompOptions};

#[derive(Clone, Debug)]
pub struct CutSparsifier<S> {
    pub h: Graph<S>,
    /// Integral graph the clusters were computed on; H = contract(unit) * scale.
    pub unit: Graph<S>,
    pub scale: S,
    pub clusters: Vec<Vec<VertexId>>,
    pub vertex_map: Vec<VertexId>,
    pub supernodes: Vec<VertexId>,
    pub edge_parent: Vec<EdgeId>,
    pub quality: S,
    pub eps: Option<S>,
}

/// Strong decompositions of every component of G[V \ T].
pub fn steiner_clusters<S: Scalar>(g: &Graph<S>, opts: &DecompOptions) -> Result<Vec<Vec<VertexId>>> {
    let inner = g.non_terminals();
    let mut clusters = Vec::new();
    for comp in g.components_within(&g.mask_of(&inner)) {
        let d = strong_decompose(g, &comp, opts)?;
        clusters.extend(d.clusters);
    }
    Ok(clusters)
}

/// Quality-3 cut sparsifier of an integral (multi)graph.
pub fn build_cut_sparsifier_unit<S: Scalar>(g: &Graph<S>, opts: &DecompOptions) -> Result<CutSparsifier<S>> {
    if !g.is_integral() {
        return Err(Error::Precondition("unit builder needs integral capacities".into()));
    }
    let (bundled, _) = g.bundle_parallel();
    let clusters = steiner_clusters(&bundled, opts)?;
    let c = g.contract(&clusters)?;
    Ok(CutSparsifier {
        h: c.graph,
        unit: g.clone(),
        scale: S::one(),
        clusters,
        vertex_map: c.vertex_map,
        supernodes: c.supernodes,
        edge_parent: c.edge_parent,
        quality: S::from_int(3),
        eps: None,
    })
}

/// Integral multiplicities ceil(min(c_e, C) / eps) with C the terminal
/// capacity.
pub fn expansion_multiplicities<S: Scalar>(g: &Graph<S>, eps: &S) -> Result<Vec<i64>> {
    let cap_c = g.terminal_capacity();
    g.edges()
        .iter()
        .map(|e| {
            let c = S::min_of(e.cap.clone(), cap_c.clone());
            ceil_to_i64(&(c / eps.clone())).ok_or_else(|| Error::Precondition("multiplicity overflow".into()))
        })
        .collect()
}

/// Quality (3 + eps') cut sparsifier of a capacitated graph.
pub fn build_cut_sparsifier<S: Scalar>(g: &Graph<S>, eps_prime: &S, opts: &DecompOptions) -> Result<CutSparsifier<S>> {
    if !eps_prime.is_positive() {
        return Err(Error::Precondition("eps must be positive".into()));
    }
    let eps = eps_prime.clone() / S::from_int(3);
    let mult = expansion_multiplicities(g, &eps)?;
    let mut unit = Graph::new(g.n());
    for (e, ed) in g.edges().iter().enumerate() {
        if mult[e] > 0 {
            unit.add_edge(ed.u, ed.v, S::from_int(mult[e]))?;
        }
    }
    unit.set_terminals(g.terminals())?;
    let clusters = steiner_clusters(&unit, opts)?;
    let c = unit.contract(&clusters)?;
    let h = c.graph.map_caps(|x| x.clone() * eps.clone());
    Ok(CutSparsifier {
        h,
        unit,
        scale: eps,
        clusters,
        vertex_map: c.vertex_map,
        supernodes: c.supernodes,
        edge_parent: c.edge_parent,
        quality: S::from_int(3) + eps_prime.clone(),
        eps: Some(eps_prime.clone()),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterMove<S> {
    pub to_x: bool,
    /// Capacity that became cut by the move.
    pub added: S,
    /// Capacity of E'_R, inner edges cut before the move.
    pub inner_cut: S,
}

#[derive(Clone, Debug)]
pub struct LiftedCut<S> {
    /// Side of every unit-graph vertex after the lift (true = X).
    pub side: Vec<bool>,
    /// Side of every H vertex.
    pub h_side: Vec<bool>,
    pub before: S,
    pub after: S,
    pub moves: Vec<ClusterMove<S>>,
}

/// Move every cluster wholly to one side of a cut of the unit graph, cluster
/// by cluster in id order, toward the side with more boundary capacity.
pub fn lift_cut<S: Scalar>(sp: &CutSparsifier<S>, side: &[bool]) -> Result<LiftedCut<S>> {
    let g = &sp.unit;
    if side.len() != g.n() {
        return Err(Error::Precondition("cut side has wrong length".into()));
    }
    let before = g.cut_value(side);
    let mut side = side.to_vec();
    let mut moves = Vec::new();
    for r in &sp.clusters {
        let inr = g.mask_of(r);
        let (mut ex, mut ey, mut exy, mut eyx, mut inner) = (S::zero(), S::zero(), S::zero(), S::zero(), S::zero());
        for e in g.edges() {
            let c = e.cap.clone();
            match (inr[e.u], inr[e.v]) {
                (true, true) => {
                    if side[e.u] != side[e.v] {
                        inner = inner + c;
                    }
                }
                (false, false) => {}
                (iu, _) => {
                    let (u, v) = if iu { (e.u, e.v) } else { (e.v, e.u) };
                    match (side[u], side[v]) {
                        (true, true) => ex = ex + c,
                        (false, false) => ey = ey + c,
                        (true, false) => exy = exy + c,
                        (false, true) => eyx = eyx + c,
                    }
                }
            }
        }
        let to_x = ex.clone() + exy.clone() > ey.clone() + eyx.clone();
        // capacity newly cut: edges to the other side that were uncut
        let added = if to_x { ey } else { ex };
        for &v in r {
            side[v] = to_x;
        }
        moves.push(ClusterMove { to_x, added, inner_cut: inner });
    }
    let after = g.cut_value(&side);
    let mut h_side = vec![false; sp.h.n()];
    for v in 0..g.n() {
        h_side[sp.vertex_map[v]] = side[v];
    }
    Ok(LiftedCut { side, h_side, before, after, moves })
}

/// Pull a cut of H back to the unit graph.
pub fn project_cut<S: Scalar>(sp: &CutSparsifier<S>, h_side: &[bool]) -> Vec<bool> {
    sp.vertex_map.iter().map(|&h| h_side[h]).collect()
}
