pub mod admissible_tuples;
pub mod automorphisms;
pub mod exact_lattice;
pub mod fibrations_bundles;
pub mod fixtures;
pub mod flag_builder;
pub mod gkm_graph;
pub mod graph_cohomology;
pub mod root_weyl;
