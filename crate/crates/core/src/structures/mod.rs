//! Hypergraph and bipartite-graph data types, named constructors and the
//! JSON document format.

mod bipartite;
mod constructors;
mod hypergraph;
pub mod io;

pub use bipartite::BipartiteGraph;
pub use constructors::{
    box_product, combinations, complete_bipartite, cycle, double, fano, grid, levi,
    set_inclusion_graph, set_inclusion_rgraph, single_edge, star, subdivision_krr, BoxProduct,
};
pub use hypergraph::{EdgeType, Hypergraph, WeightedHypergraph};
pub use io::HypergraphDocument;

