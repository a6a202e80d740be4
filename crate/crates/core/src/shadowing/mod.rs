//! Pseudo-orbits and point-level shadowing: generation, verification, the
//! brute-force net oracle, the constructive shadower for simple systems and
//! empirical shadowing moduli.

mod recipe;
mod search;

use rand::RngCore;
use serde::Serialize;

use crate::constructions::SimpleSystem;
use crate::dendrite::{DendriteSpace, EdgewiseMap, Location, TreeMap};
use crate::error::{domain, Error, Result};
use crate::metric::MetricSpace;

pub use recipe::{shadow_recipe, simple_shadow_point, RecipeParams, ShadowRecipe};
pub use search::{estimate_modulus, net_lipschitz, search_shadow_point, Generator, ModulusEstimate, ModulusRow};

/// A map on a metric space, with a backward map where one exists.
pub trait DynamicalSystem: Send + Sync {
    type Space: MetricSpace;

    fn space(&self) -> &Self::Space;
    fn step(&self, p: &Point<Self>) -> Point<Self>;

    fn step_back(&self, _p: &Point<Self>) -> Option<Point<Self>> {
        None
    }
}

pub type Point<S> = <<S as DynamicalSystem>::Space as MetricSpace>::Point;

impl DynamicalSystem for SimpleSystem {
    type Space = DendriteSpace;

    fn space(&self) -> &DendriteSpace {
        &self.space
    }

    fn step(&self, p: &Location) -> Location {
        self.forward(p)
    }

    fn step_back(&self, p: &Location) -> Option<Location> {
        self.backward(p)
    }
}

impl DynamicalSystem for EdgewiseMap {
    type Space = DendriteSpace;

    fn space(&self) -> &DendriteSpace {
        self.space()
    }

    fn step(&self, p: &Location) -> Location {
        self.eval(p)
    }

    fn step_back(&self, p: &Location) -> Option<Location> {
        self.eval_inverse(p)
    }
}

/// `x₀ … x_N` with `d(f(x_k), x_{k+1}) < delta`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoOrbit<P> {
    points: Vec<P>,
    delta: f64,
    /// Largest observed jump.
    max_jump: f64,
}

impl<P: Clone> PseudoOrbit<P> {
    pub fn new<S>(sys: &S, points: Vec<P>, delta: f64) -> Result<Self>
    where
        S: DynamicalSystem + ?Sized,
        S::Space: MetricSpace<Point = P>,
    {
        if points.is_empty() {
            return domain("a pseudo-orbit needs at least one point");
        }
        let mut max_jump = 0.0f64;
        for (k, w) in points.windows(2).enumerate() {
            let jump = sys.space().dist(&sys.step(&w[0]), &w[1]);
            if !(jump < delta) && !(delta == 0.0 && jump == 0.0) {
                return Err(Error::Invariant(format!("jump {jump} at step {k} is not below delta = {delta}")));
            }
            max_jump = max_jump.max(jump);
        }
        Ok(Self { points, delta, max_jump })
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn max_jump(&self) -> f64 {
        self.max_jump
    }

    /// Number of steps `N` (one less than the number of points).
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }
}

/// `x_{k+1}` uniform in the `δ/2`-ball around `f(x_k)`. `δ = 0` gives the true orbit.
pub fn generate_pseudo_orbit<S: DynamicalSystem + ?Sized>(
    sys: &S,
    x0: &Point<S>,
    delta: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<PseudoOrbit<Point<S>>> {
    if delta < 0.0 {
        return domain("delta must be nonnegative");
    }
    let mut pts = vec![x0.clone()];
    for _ in 0..n {
        let fx = sys.step(pts.last().unwrap());
        let next = if delta > 0.0 { sys.space().sample_ball(&fx, delta / 2.0, rng) } else { fx };
        pts.push(next);
    }
    PseudoOrbit::new(sys, pts, delta)
}

/// Adversarial pseudo-orbit: every step pushes `δ/2` toward the `b` end of the current edge.
pub fn drift_pseudo_orbit<S>(sys: &S, x0: &Location, delta: f64, n: usize) -> Result<PseudoOrbit<Location>>
where
    S: DynamicalSystem<Space = DendriteSpace> + ?Sized,
{
    let cx = &sys.space().complex;
    let mut pts = vec![*x0];
    for _ in 0..n {
        let fx = sys.step(pts.last().unwrap());
        let len = cx.edge(fx.edge).length;
        pts.push(Location::new(fx.edge, (fx.t + 0.5 * delta / len).min(1.0)));
    }
    PseudoOrbit::new(sys, pts, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Shadowed,
    NotShadowedInFamily,
    Refuted,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowReport<P> {
    pub verdict: Verdict,
    pub witness: Option<P>,
    /// `d(fᵏ(y), x_k)` for the witness (or the last candidate tried).
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub eps: f64,
    pub delta: f64,
    pub steps: usize,
    pub method: &'static str,
    /// Number of candidates examined.
    pub candidates: usize,
}

impl<P> ShadowReport<P> {
    pub fn is_shadowed(&self) -> bool {
        self.verdict == Verdict::Shadowed
    }
}

/// Iterates `y` forward and compares with the pseudo-orbit step by step.
pub fn verify_shadow<S: DynamicalSystem + ?Sized>(
    sys: &S,
    y: &Point<S>,
    po: &PseudoOrbit<Point<S>>,
    eps: f64,
) -> ShadowReport<Point<S>> {
    let mut distances = Vec::with_capacity(po.points().len());
    let mut z = y.clone();
    for (k, x) in po.points().iter().enumerate() {
        if k > 0 {
            z = sys.step(&z);
        }
        distances.push(sys.space().dist(&z, x));
    }
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    ShadowReport {
        verdict: if max_distance < eps { Verdict::Shadowed } else { Verdict::NotShadowedInFamily },
        witness: Some(y.clone()),
        distances,
        max_distance,
        eps,
        delta: po.delta(),
        steps: po.steps(),
        method: "verify",
        candidates: 1,
    }
}
