//! Flow sparsifiers built from good routers.

pub mod build;
pub mod params;
pub mod router;
pub mod search;
pub mod witness;

pub use build::{
    build_flow_sparsifier, build_flow_sparsifier_unit, contract_procedure, flow_multiplicities, well_linked_clusters,
    BuildReport, ContractionRecord, FlowSparsifier, WellLinkedRun, WitnessRecord,
};
pub use params::{alpha_w, beta_fcg, theoretical_r, FlowParams, Profile};
pub use router::{is_good_router, recheck_certificate, uniform_router_check, RouterCertificate, WlStatus};
pub use search::{balanced_cut_refine, find_contractible_or_witness, is_contractible, RefineOutcome, SearchOutcome, SearchTrace};
pub use witness::{verify_witness, witness_to_flow, Walk, Witness};
