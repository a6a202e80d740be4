//! Finite-scale experiments on the shadowing property: dendrites and their
//! hyperspaces of subcontinua, and hyperbolic toral automorphisms.

pub mod anosov;
pub mod constructions;
pub mod dendrite;
pub mod error;
pub mod hyperspace;
pub mod metric;
pub mod shadowing;

pub use error::{Error, Result};
pub use metric::{diameter, directed_hausdorff, hausdorff_distance, FinitePointSet, MetricSpace, SpaceId, SpaceKind};
