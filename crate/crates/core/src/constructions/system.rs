//! Simple systems: a homeomorphism (or a monotone truncation of one) whose
//! forward orbits accumulate on a finite attracting set `P` and whose
//! backward orbits accumulate on a finite repelling set `Q`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::comb::CombMap;
use crate::dendrite::{DendriteSpace, EdgeBehaviour, EdgeId, EdgewiseMap, Location, TreeMap};
use crate::error::{contract, Result};
use crate::metric::MetricSpace;

#[derive(Debug, Clone)]
pub enum SystemMap {
    Edgewise(EdgewiseMap),
    Comb(Arc<CombMap>),
}

impl SystemMap {
    fn inner(&self) -> &dyn TreeMap {
        match self {
            SystemMap::Edgewise(m) => m,
            SystemMap::Comb(m) => m.as_ref(),
        }
    }
}

impl TreeMap for SystemMap {
    fn domain(&self) -> &DendriteSpace {
        self.inner().domain()
    }
    fn codomain(&self) -> &DendriteSpace {
        self.inner().codomain()
    }
    fn eval(&self, p: &Location) -> Location {
        self.inner().eval(p)
    }
    fn eval_inverse(&self, p: &Location) -> Option<Location> {
        self.inner().eval_inverse(p)
    }
    fn is_homeomorphism(&self) -> bool {
        self.inner().is_homeomorphism()
    }
    fn is_monotone(&self) -> bool {
        self.inner().is_monotone()
    }
    fn edge_behaviour(&self, e: EdgeId) -> EdgeBehaviour {
        self.inner().edge_behaviour(e)
    }
    fn invert_on_edge(&self, e: EdgeId, y: &Location) -> Option<f64> {
        self.inner().invert_on_edge(e, y)
    }
}

#[derive(Debug, Clone)]
pub struct SimpleSystem {
    pub name: String,
    pub space: Arc<DendriteSpace>,
    pub map: SystemMap,
    /// Quasi-attracting fixed points.
    pub attractors: Vec<Location>,
    /// Quasi-repelling fixed points.
    pub repellers: Vec<Location>,
}

impl SimpleSystem {
    pub fn new(
        name: &str,
        space: Arc<DendriteSpace>,
        map: SystemMap,
        attractors: Vec<Location>,
        repellers: Vec<Location>,
    ) -> Result<Self> {
        if attractors.is_empty() {
            return contract("a simple system needs an attracting fixed point");
        }
        let cx = &space.complex;
        for p in attractors.iter().chain(&repellers) {
            cx.validate(p)?;
            if !cx.same_point(&map.eval(p), p) {
                return contract(format!("declared fixed point {p:?} is moved by the map"));
            }
        }
        Ok(Self { name: name.to_string(), space, map, attractors, repellers })
    }

    pub fn forward(&self, p: &Location) -> Location {
        self.map.eval(p)
    }

    pub fn backward(&self, p: &Location) -> Option<Location> {
        self.map.eval_inverse(p)
    }

    pub fn dist_to_attractors(&self, p: &Location) -> f64 {
        self.attractors.iter().map(|a| self.space.dist(p, a)).fold(f64::INFINITY, f64::min)
    }

    pub fn dist_to_repellers(&self, p: &Location) -> f64 {
        self.repellers.iter().map(|a| self.space.dist(p, a)).fold(f64::INFINITY, f64::min)
    }

    fn is_special(&self, p: &Location) -> bool {
        let cx = &self.space.complex;
        self.attractors.iter().chain(&self.repellers).any(|q| cx.same_point(p, q))
    }

    /// Uniform point on a random edge; half the draws pick the edge by index,
    /// half by length, so short teeth are not starved.
    pub fn random_point(&self, rng: &mut impl Rng) -> Location {
        let cx = &self.space.complex;
        let e = if rng.gen::<bool>() {
            rng.gen_range(0..cx.n_edges())
        } else {
            let mut u = rng.gen::<f64>() * cx.total_length();
            let mut pick = cx.n_edges() - 1;
            for (i, ed) in cx.edges().iter().enumerate() {
                if u < ed.length {
                    pick = i;
                    break;
                }
                u -= ed.length;
            }
            pick
        };
        Location::new(EdgeId(e), rng.gen::<f64>())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimpleReport {
    pub pass: bool,
    pub samples: usize,
    pub n_max: usize,
    pub tol: f64,
    /// Largest number of forward steps needed to come within `tol` of `P`.
    pub max_forward_steps: usize,
    pub max_backward_steps: usize,
    pub forward_failures: Vec<Location>,
    pub backward_failures: Vec<Location>,
}

/// Checks `d(fᴺ(x), P) < tol` and `d(f⁻ᴺ(x), Q) < tol` for some `N ≤ n_max` on random `x ∉ P ∪ Q`.
pub fn is_simple(sys: &SimpleSystem, samples: usize, n_max: usize, tol: f64, seed: u64) -> SimpleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SimpleReport {
        pass: true,
        samples,
        n_max,
        tol,
        max_forward_steps: 0,
        max_backward_steps: 0,
        forward_failures: Vec::new(),
        backward_failures: Vec::new(),
    };
    for _ in 0..samples {
        let x = sys.random_point(&mut rng);
        if sys.is_special(&x) {
            continue;
        }
        match steps_until(&x, n_max, |p| Some(sys.forward(p)), |p| sys.dist_to_attractors(p) < tol) {
            Some(n) => rep.max_forward_steps = rep.max_forward_steps.max(n),
            None => rep.forward_failures.push(x),
        }
        match steps_until(&x, n_max, |p| sys.backward(p), |p| sys.dist_to_repellers(p) < tol) {
            Some(n) => rep.max_backward_steps = rep.max_backward_steps.max(n),
            None => rep.backward_failures.push(x),
        }
    }
    rep.pass = rep.forward_failures.is_empty() && rep.backward_failures.is_empty();
    rep
}

fn steps_until(
    x: &Location,
    n_max: usize,
    step: impl Fn(&Location) -> Option<Location>,
    done: impl Fn(&Location) -> bool,
) -> Option<usize> {
    let mut p = *x;
    for n in 0..=n_max {
        if done(&p) {
            return Some(n);
        }
        p = step(&p)?;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapCertificate {
    pub eps: f64,
    /// Radius `r < eps` of a neighbourhood `V = {d(·, A) < r}` with `cl f(V) ⊂ V`.
    pub radius: Option<f64>,
    /// `r − sup_{cl V} d(f(x), A)` after the grid correction; positive when certified.
    pub margin: f64,
}

/// Searches radii `eps/2, eps/4, …` for a trapping neighbourhood of `set`
/// (under `f`, or under the backward map when `forward` is false).
/// Suprema are taken on a grid of spacing `h` and corrected by the grid
/// Lipschitz constant of the map over `V` times `h`.
pub fn trap_certificate(sys: &SimpleSystem, set: &[Location], forward: bool, eps: f64, h: f64) -> TrapCertificate {
    let cx = &sys.space.complex;
    let dist_to = |p: &Location| set.iter().map(|a| sys.space.dist(p, a)).fold(f64::INFINITY, f64::min);
    let image = |p: &Location| if forward { Some(sys.forward(p)) } else { sys.backward(p) };
    // grid links along every edge, with distances to the set and images
    let mut links = Vec::new();
    for (i, e) in cx.edges().iter().enumerate() {
        let k = (e.length / h).ceil().max(1.0) as usize;
        let mut prev = Location::new(EdgeId(i), 0.0);
        for j in 1..=k {
            let cur = Location::new(EdgeId(i), j as f64 / k as f64);
            links.push((prev, cur));
            prev = cur;
        }
    }
    let mut best_margin = f64::NEG_INFINITY;
    let mut r = eps / 2.0;
    for _ in 0..12 {
        let mut sup = 0.0f64;
        let mut lip = 0.0f64;
        let mut ok = true;
        for (a, b) in &links {
            let (da, db) = (dist_to(a), dist_to(b));
            if da.min(db) > r {
                continue;
            }
            match (image(a), image(b)) {
                (Some(fa), Some(fb)) => {
                    if da <= r {
                        sup = sup.max(dist_to(&fa));
                    }
                    if db <= r {
                        sup = sup.max(dist_to(&fb));
                    }
                    let d = sys.space.dist(a, b);
                    if d > 0.0 {
                        lip = lip.max(sys.space.dist(&fa, &fb) / d);
                    }
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        let margin = r - sup - lip * h;
        if ok && margin > 0.0 {
            return TrapCertificate { eps, radius: Some(r), margin };
        }
        best_margin = best_margin.max(margin);
        r /= 2.0;
    }
    TrapCertificate { eps, radius: None, margin: best_margin }
}

/// Largest ratio `d(f(x), f(y)) / d(x, y)` over grid neighbours along edges.
pub fn grid_lipschitz(sys: &SimpleSystem, forward: bool, h: f64) -> f64 {
    let cx = &sys.space.complex;
    let image = |p: &Location| if forward { Some(sys.forward(p)) } else { sys.backward(p) };
    let mut lip = 0.0f64;
    for (i, e) in cx.edges().iter().enumerate() {
        let k = (e.length / h).ceil().max(1.0) as usize;
        let mut prev = Location::new(EdgeId(i), 0.0);
        let mut fprev = image(&prev);
        for j in 1..=k {
            let cur = Location::new(EdgeId(i), j as f64 / k as f64);
            let fcur = image(&cur);
            if let (Some(a), Some(b)) = (&fprev, &fcur) {
                let d = sys.space.dist(&prev, &cur);
                if d > 0.0 {
                    lip = lip.max(sys.space.dist(a, b) / d);
                }
            }
            prev = cur;
            fprev = fcur;
        }
    }
    lip
}
