//! Finite metric trees standing in for dendrites.

pub mod complex;
pub mod format;
pub mod map;
pub mod space;
pub mod subtree;

pub use complex::{DendriteComplex, Edge, EdgeId, Location, PathStep, VertexId};
pub use map::{
    image_subtree, preimage_subtree, verify_monotone, EdgeBehaviour, EdgeProfile, EdgewiseMap, MonotoneReport,
    TreeMap,
};
pub use space::{CombLayer, DendriteSpace, EdgeLineage, Tooth, TreeMetric};
pub use subtree::{connected_span, geodesic_hausdorff, subtree_intersection, Piece, Subtree};
