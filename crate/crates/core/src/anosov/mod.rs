//! Hyperbolic toral automorphisms: stable and unstable continua, the spliced
//! pseudo-orbit of continua that no continuum shadows, and expansiveness and
//! transitivity probes.

mod continua;
mod probes;
mod refute;
mod torus;

pub use continua::{
    build_global_continuum, density_radius, local_stable_continuum, local_unstable_continuum, sample_spacing,
    sampled_diameter, sampled_hausdorff, ContinuumKind, DiamBounds, GlobalContinuum, SampleIndex, TorusContinuum,
};
pub use probes::{diameter_dichotomy_probe, dynamical_ball, transitivity_probe, DichotomyReport, TorusBall, TransitivityHit};
pub use refute::{
    candidate_family, find_splice, refute_shadowing, segment_hausdorff_upper, splice_pseudo_orbit, Candidate,
    CandidateFamily, CandidateRow, Certificate, FamilySpec, RefutationReport, SpliceStep, SplicePair, SplicedOrbit,
    SAMPLE_CAP,
};
pub use torus::{frac, rational_near, to_f64, wrap_delta, RationalPoint, ToralAutomorphism, Torus};
