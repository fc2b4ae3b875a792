//! Max-flow, sparsest cut and congestion routing.

mod dinic;
pub mod demand;
pub mod maxflow;
pub mod network;
pub mod routing;
pub mod simplex;
pub mod solution;
pub mod sparsest;

pub use demand::{read_demands, write_demands, DemandSet};
pub use maxflow::{decompose_paths, max_flow, min_cut_between, CutCertificate, FlowPath, MaxFlow};
pub use network::Network;
pub use routing::{min_congestion_routing, route_commodities, Routing, RoutingMethod, RoutingOptions};
pub use solution::{congestion_of, write_flow, Commodity, FlowSolution};
pub use sparsest::{
    is_well_linked, partition_sparsity, sparsest_cut, sparsest_cut_exact, sparsest_cut_heuristic, well_linked_instance,
    SparseCut, SparsestCut, WellLinked,
};
