//! Rooted trees and rooted graphs up to isomorphism.

mod canon;
mod graph;
mod iso;
mod profile;
mod tree;

pub use canon::{canon_rooted_graph, canon_rooted_graph_with, canon_tree, canon_unrooted, canonical_form, CanonCode, CanonConfig};
pub use graph::RootedGraph;
pub use iso::{binary_below, has_light_spine, restricted_iso, sim_r, spine_event, tree_iso, ShapeInterner};
pub use profile::{component_codes, graph_profile, profile, profile_with, vertex_profile, Profile};
pub use tree::RootedTree;
