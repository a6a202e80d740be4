//! Builders for the model systems: interval homeomorphisms, star unions,
//! bridges, combs and the staged universal dendrite.

pub mod bridge;
pub mod comb;
pub mod interval;
pub mod star;
pub mod system;
pub mod universal;

pub use bridge::make_bridge;
pub use comb::{make_comb, CombMap};
pub use interval::{make_square_map, make_three_fixed_homeo, FixedKind, IntervalHomeo};
pub use star::{make_n_star, make_omega_star, make_star, Arm};
pub use system::{grid_lipschitz, is_simple, trap_certificate, SimpleReport, SimpleSystem, SystemMap, TrapCertificate};
pub use universal::{build_universal_stage, density_radius, invariant_suite, InvariantReport, StageSystem, SuiteParams};
