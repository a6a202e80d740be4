//! Metric-space layer shared by every space in the crate.
//!
//! Compact sets are carried as finite samples ([`FinitePointSet`]) with an
//! optional mesh `η`: the sample is `η`-dense in the compact set it stands
//! for. Hausdorff distances and diameters computed from samples are exact for
//! the samples and within `mesh(A) + mesh(B)` of the underlying compacts.

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The families of spaces the crate knows how to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    Interval,
    StarUnion,
    Bridge,
    CombProduct,
    Torus,
}

/// Identity of a constructed space; point sets remember which space they live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceId(u64);

impl SpaceId {
    pub fn fresh() -> Self {
        static NEXT: AtomicU64 = AtomicU64::new(1);
        SpaceId(NEXT.fetch_add(1, Ordering::Relaxed))
    }
}

pub trait MetricSpace: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;

    fn id(&self) -> SpaceId;
    fn kind(&self) -> SpaceKind;

    /// Checks that `p` is a point of this space.
    fn validate(&self, p: &Self::Point) -> Result<()>;

    /// Unchecked distance. Callers guarantee both points are valid.
    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Diameter of the whole space (finite, positive).
    fn space_diameter(&self) -> f64;

    /// An `eps`-dense finite subset of the space.
    fn eps_net_points(&self, eps: f64) -> Vec<Self::Point>;

    /// A random point of the open ball of radius `radius` around `center`.
    fn sample_ball(&self, center: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> Result<f64> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.dist(a, b))
    }
}

/// A finite sample of a compact subset of some space.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePointSet<P> {
    pub space: SpaceId,
    pub points: Vec<P>,
    /// The sample is `mesh`-dense in the compact it approximates, when known.
    pub mesh: Option<f64>,
}

impl<P> FinitePointSet<P> {
    pub fn new(space: SpaceId, points: Vec<P>, mesh: Option<f64>) -> Self {
        Self { space, points, mesh }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mesh_or_zero(&self) -> f64 {
        self.mesh.unwrap_or(0.0)
    }
}

/// Largest pairwise distance in `set`.
pub fn diameter<S: MetricSpace>(space: &S, set: &FinitePointSet<S::Point>) -> Result<f64> {
    check_set(space, set)?;
    let pts = &set.points;
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(space.dist(&pts[i], &pts[j]));
        }
    }
    Ok(best)
}

/// An `eps`-dense net of the whole space.
pub fn build_eps_net<S: MetricSpace>(space: &S, eps: f64) -> Result<FinitePointSet<S::Point>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return domain(format!("net spacing must be positive, got {eps}"));
    }
    Ok(FinitePointSet::new(space.id(), space.eps_net_points(eps), Some(eps)))
}

/// `max_{a∈A} min_{b∈B} d(a,b)`.
pub fn directed_hausdorff<S: MetricSpace>(space: &S, a: &[S::Point], b: &[S::Point]) -> f64 {
    let mut worst = 0.0f64;
    for p in a {
        let mut near = f64::INFINITY;
        for q in b {
            let d = space.dist(p, q);
            if d < near {
                near = d;
                if near <= worst {
                    break;
                }
            }
        }
        worst = worst.max(near);
    }
    worst
}

pub fn hausdorff_distance<S: MetricSpace>(
    space: &S,
    a: &FinitePointSet<S::Point>,
    b: &FinitePointSet<S::Point>,
) -> Result<f64> {
    check_set(space, a)?;
    check_set(space, b)?;
    Ok(directed_hausdorff(space, &a.points, &b.points)
        .max(directed_hausdorff(space, &b.points, &a.points)))
}

fn check_set<S: MetricSpace>(space: &S, set: &FinitePointSet<S::Point>) -> Result<()> {
    if set.space != space.id() {
        return domain("point set belongs to a different space");
    }
    if set.points.is_empty() {
        return domain("empty point set");
    }
    Ok(())
}
