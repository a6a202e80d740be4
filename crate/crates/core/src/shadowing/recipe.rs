//! The constructive shadower for simple systems.
//!
//! Trapping balls `U_P` (forward) and `U_Q` (backward) of diameter below
//! `ε/2`; gaps `g_P`, `g_Q` between `cl f(U_P)` and the complement of `U_P`
//! (resp. for `f⁻¹` and `U_Q`); a uniform escape time `N` from the middle
//! region `X ∖ (U_P ∪ f⁻¹(U_Q))` into `f(U_P)`; `η < min(ε, g_P, g_Q)/2`;
//! and `δ < η` such that `δ`-pseudo-orbits from the middle region stay
//! `η`-close to the true orbit for `N` steps and `ω_{f⁻¹}(δ) < η`.

use rayon::prelude::*;
use serde::Serialize;

use super::{verify_shadow, PseudoOrbit, ShadowReport};
use crate::constructions::{trap_certificate, SimpleSystem};
use crate::dendrite::Location;
use crate::error::{contract, Error, Result};
use crate::metric::MetricSpace;

#[derive(Debug, Clone, Copy)]
pub struct RecipeParams {
    /// Grid spacing as a fraction of `ε`.
    pub grid_fraction: f64,
    /// Multiplier applied to the grid Lipschitz estimate.
    pub lipschitz_slack: f64,
    /// Iteration cap for the escape-time search.
    pub max_escape: usize,
}

impl Default for RecipeParams {
    fn default() -> Self {
        Self { grid_fraction: 1.0 / 40.0, lipschitz_slack: 1.05, max_escape: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShadowRecipe {
    pub eps: f64,
    pub grid: f64,
    pub attractor_radii: Vec<f64>,
    pub repeller_radii: Vec<f64>,
    pub gap_p: f64,
    pub gap_q: f64,
    pub escape_time: usize,
    pub eta: f64,
    /// Grid Lipschitz estimate of `f` after slack.
    pub lipschitz: f64,
    /// Measured `ω_{f⁻¹}(δ)` at the chosen `δ`.
    pub inverse_modulus: f64,
    pub delta: f64,
}

impl ShadowRecipe {
    fn in_up(&self, sys: &SimpleSystem, x: &Location) -> Option<usize> {
        sys.attractors.iter().zip(&self.attractor_radii).position(|(p, &r)| sys.space.dist(x, p) < r)
    }

    fn in_uq(&self, sys: &SimpleSystem, x: &Location) -> Option<usize> {
        sys.repellers.iter().zip(&self.repeller_radii).position(|(q, &r)| sys.space.dist(x, q) < r)
    }
}

fn trap_radii(sys: &SimpleSystem, set: &[Location], forward: bool, eps: f64, h: f64) -> Result<(Vec<f64>, f64)> {
    let mut radii = Vec::new();
    let mut gap = f64::INFINITY;
    for p in set {
        let c = trap_certificate(sys, std::slice::from_ref(p), forward, 0.99 * eps / 2.0, h);
        match c.radius {
            Some(r) => {
                radii.push(r);
                gap = gap.min(c.margin);
            }
            None => return contract(format!("no trapping neighbourhood found around {p:?}")),
        }
    }
    Ok((radii, gap))
}

/// Sup of `d(f⁻¹(x), f⁻¹(y))` over grid points `x` and the boundary points `y`
/// of the geodesic ball of radius `reach` around `x`.
fn inverse_modulus(sys: &SimpleSystem, grid: &[Location], reach: f64) -> Option<f64> {
    let cx = &sys.space.complex;
    grid.par_iter()
        .map(|x| {
            let gx = sys.backward(x)?;
            let mut worst = 0.0f64;
            for (e, t0, t1) in cx.ball_pieces(x, reach) {
                for t in [t0, t1] {
                    let gy = sys.backward(&Location::new(e, t))?;
                    worst = worst.max(sys.space.dist(&gx, &gy));
                }
            }
            Some(worst)
        })
        .try_reduce(|| 0.0, |a, b| Some(a.max(b)))
}

/// Computes the constants of the constructive shadower at scale `eps`.
pub fn shadow_recipe(sys: &SimpleSystem, eps: f64, params: RecipeParams) -> Result<ShadowRecipe> {
    let h = eps * params.grid_fraction;
    let (attractor_radii, gap_p) = trap_radii(sys, &sys.attractors, true, eps, h)?;
    let (repeller_radii, gap_q) = trap_radii(sys, &sys.repellers, false, eps, h)?;
    let space = &sys.space;
    let centers: Vec<(&Location, f64)> = sys
        .attractors
        .iter()
        .zip(attractor_radii.iter().copied())
        .chain(sys.repellers.iter().zip(repeller_radii.iter().copied()))
        .collect();
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            if space.dist(centers[i].0, centers[j].0) <= centers[i].1 + centers[j].1 {
                return contract("trapping neighbourhoods overlap");
            }
        }
    }
    let mut recipe = ShadowRecipe {
        eps,
        grid: h,
        attractor_radii,
        repeller_radii,
        gap_p,
        gap_q,
        escape_time: 0,
        eta: 0.49 * eps.min(gap_p).min(gap_q),
        lipschitz: 0.0,
        inverse_modulus: 0.0,
        delta: 0.0,
    };

    let grid = space.eps_net_points(h);
    // uniform escape time from the middle region
    let escape: Vec<Option<usize>> = grid
        .par_iter()
        .filter(|x| recipe.in_up(sys, x).is_none() && recipe.in_uq(sys, &sys.forward(x)).is_none())
        .map(|x| {
            let mut y = *x;
            for k in 0..params.max_escape {
                if recipe.in_up(sys, &y).is_some() {
                    return Some(k + 1);
                }
                y = sys.forward(&y);
            }
            None
        })
        .collect();
    let mut n = 0;
    for e in escape {
        match e {
            Some(k) => n = n.max(k),
            None => return Err(Error::Invariant("a middle-region point does not reach U_P".into())),
        }
    }
    recipe.escape_time = n + 2;

    // Lipschitz constant over grid points and the boundaries of balls of radius h, 2h, 4h
    let cx = &space.complex;
    let lip = grid
        .par_iter()
        .map(|x| {
            let fx = sys.forward(x);
            let mut best = 0.0f64;
            for r in [h, 2.0 * h, 4.0 * h] {
                for (e, t0, t1) in cx.ball_pieces(x, r) {
                    for t in [t0, t1] {
                        let y = Location::new(e, t);
                        let d = space.dist(x, &y);
                        if d > 0.0 {
                            best = best.max(space.dist(&fx, &sys.forward(&y)) / d);
                        }
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
        * params.lipschitz_slack;
    recipe.lipschitz = lip;
    let eta = recipe.eta;
    let big_n = recipe.escape_time as i32;
    // e_{j+1} = L e_j + δ stays below η for j ≤ N
    let delta_fwd = if lip > 1.0 {
        eta * (lip - 1.0) / (lip.powi(big_n + 1) - 1.0)
    } else {
        eta / (big_n + 1) as f64
    };
    // comb balls are contained in geodesic balls of twice the radius at this scale
    let reach = if space.is_geodesic() { 1.0 } else { 2.0 };
    let mut delta = 0.99 * delta_fwd.min(eta);
    let mut om = f64::INFINITY;
    for _ in 0..60 {
        match inverse_modulus(sys, &grid, reach * delta) {
            Some(w) if w < eta => {
                om = w;
                break;
            }
            Some(_) => delta /= 2.0,
            None => return contract("the system has no backward map"),
        }
    }
    if !om.is_finite() {
        return Err(Error::Invariant("inverse modulus never dropped below eta".into()));
    }
    recipe.inverse_modulus = om;
    recipe.delta = delta;
    Ok(recipe)
}

/// The shadowing point of the constructive proof: an attractor or repeller
/// if the pseudo-orbit never leaves its neighbourhood, otherwise `f^{−n}(x_n)`
/// for the least `n` with `x_n ∉ f⁻¹(U_Q)`. The result is verified.
pub fn simple_shadow_point(
    sys: &SimpleSystem,
    recipe: &ShadowRecipe,
    po: &PseudoOrbit<Location>,
) -> Result<(Location, ShadowReport<Location>)> {
    if po.delta() > recipe.delta {
        return contract(format!("pseudo-orbit delta {} exceeds the threshold {}", po.delta(), recipe.delta));
    }
    let pts = po.points();
    let y = if let Some(i) = recipe.in_up(sys, &pts[0]).filter(|&i| {
        pts.iter().all(|x| sys.space.dist(x, &sys.attractors[i]) < recipe.attractor_radii[i])
    }) {
        sys.attractors[i]
    } else if let Some(i) = recipe.in_uq(sys, &pts[0]).filter(|&i| {
        pts.iter().all(|x| sys.space.dist(x, &sys.repellers[i]) < recipe.repeller_radii[i])
    }) {
        sys.repellers[i]
    } else {
        let n = pts.iter().position(|x| recipe.in_uq(sys, &sys.forward(x)).is_none()).unwrap_or(pts.len() - 1);
        let mut y = pts[n];
        for _ in 0..n {
            y = sys.backward(&y).ok_or_else(|| Error::Invariant("backward map undefined".into()))?;
        }
        y
    };
    let mut rep = verify_shadow(sys, &y, po, recipe.eps);
    rep.method = "simple-recipe";
    if !rep.is_shadowed() {
        return Err(Error::Invariant(format!("recipe point misses by {}", rep.max_distance)));
    }
    Ok((y, rep))
}
