//! Diffuse connectedness penalty.
//!
//! The high phase `{u > 1-α}` is split into 4-connected components `U_i`,
//! each carrying a β-mass `B_i = ∫_{U_i} β(u)`. Components are joined by
//! geodesics in the grid graph weighted by `F(u)`, giving distances `D_ij`,
//! and the penalty is `Σ_{i≠j} B_i B_j D_ij`. The low-phase variant applies
//! the same construction to `1-u`, merging every component that touches the
//! domain boundary.

mod geodesic;
mod graph;
mod labeling;
mod penalty;
mod profile;

pub use geodesic::{pairwise_geodesics, GeodesicTable};
pub use graph::{
    build_weighted_graph, multi_source_dijkstra, ShortestPaths, WeightedGraph, NO_PRED,
};
pub use labeling::{label_components, label_components_with, mask_components, ComponentLabeling};
pub use penalty::{
    complement_connectedness_energy, connectedness_energy, connectedness_gradient,
    simply_connected_energy, simply_connected_gradient, Phase, PhaseTopology,
    SimplyConnectedEnergy,
};
pub use profile::{beta_prime, beta_profile, weight_prime, weight_profile, ProfileParams};
