use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{drift_pseudo_orbit, generate_pseudo_orbit, verify_shadow, DynamicalSystem, Point, PseudoOrbit, ShadowReport, Verdict};
use crate::dendrite::{DendriteSpace, EdgeId, Location};
use crate::error::{contract, Result};
use crate::metric::{build_eps_net, FinitePointSet, MetricSpace};

fn shadows<S: DynamicalSystem + ?Sized>(sys: &S, y: &Point<S>, po: &PseudoOrbit<Point<S>>, eps: f64) -> bool {
    let mut z = y.clone();
    for (k, x) in po.points().iter().enumerate() {
        if k > 0 {
            z = sys.step(&z);
        }
        if !(sys.space().dist(&z, x) < eps) {
            return false;
        }
    }
    true
}

fn pull_back<S: DynamicalSystem + ?Sized>(sys: &S, g: &Point<S>, j: usize) -> Option<Point<S>> {
    let mut y = g.clone();
    for _ in 0..j {
        y = sys.step_back(&y)?;
    }
    Some(y)
}

/// Brute-force oracle over a net. Candidates are the net points themselves
/// (time 0, examined first) and then, when a backward map exists, the points
/// `f^{−j}(g)` for net points `g` within `eps` of `x_j`. The first candidate
/// in `(j, net index)` order that passes verification is returned.
///
/// A failure over the time-0 family alone certifies that no point shadows
/// within `eps − mesh·L^N`, `L` the Lipschitz estimate of [`net_lipschitz`].
pub fn search_shadow_point<S: DynamicalSystem + ?Sized>(
    sys: &S,
    po: &PseudoOrbit<Point<S>>,
    eps: f64,
    net: &FinitePointSet<Point<S>>,
) -> Result<ShadowReport<Point<S>>> {
    if !matches!(net.mesh, Some(m) if m <= eps / 2.0) {
        return contract(format!("net mesh must be at most eps/2 = {}", eps / 2.0));
    }
    let pts = po.points();
    let mut candidates = 0usize;
    let have_back = sys.step_back(&pts[0]).is_some();
    let last_anchor = if have_back { pts.len() - 1 } else { 0 };
    for j in 0..=last_anchor {
        let near: Vec<&Point<S>> = net.points.iter().filter(|g| sys.space().dist(g, &pts[j]) < eps).collect();
        candidates += near.len();
        let hit = near
            .par_iter()
            .map(|g| pull_back(sys, g, j))
            .find_first(|y| matches!(y, Some(y) if shadows(sys, y, po, eps)));
        if let Some(Some(y)) = hit {
            let mut rep = verify_shadow(sys, &y, po, eps);
            rep.method = "net-search";
            rep.candidates = candidates;
            return Ok(rep);
        }
    }
    Ok(ShadowReport {
        verdict: Verdict::NotShadowedInFamily,
        witness: None,
        distances: Vec::new(),
        max_distance: f64::INFINITY,
        eps,
        delta: po.delta(),
        steps: po.steps(),
        method: "net-search",
        candidates,
    })
}

/// Largest ratio `d(f(g), f(h)) / d(g, h)` over net pairs at distance at most `2·mesh`.
pub fn net_lipschitz<S: DynamicalSystem + ?Sized>(sys: &S, net: &FinitePointSet<Point<S>>) -> f64 {
    let r = 2.0 * net.mesh_or_zero();
    let imgs: Vec<Point<S>> = net.points.iter().map(|g| sys.step(g)).collect();
    (0..net.points.len())
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in (i + 1)..net.points.len() {
                let d = sys.space().dist(&net.points[i], &net.points[j]);
                if d > 0.0 && d <= r {
                    best = best.max(sys.space().dist(&imgs[i], &imgs[j]) / d);
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Uniform start, steps uniform in the `δ/2`-ball.
    Uniform,
    /// Start at the `a` end of edge 0, push `δ/2` along the edge every step.
    Drift,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusRow {
    pub delta: f64,
    pub shadowed: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub eps: f64,
    pub steps: usize,
    pub mesh: f64,
    /// Largest `δ` in the grid with every trial shadowed.
    pub best_delta: Option<f64>,
    pub rows: Vec<ModulusRow>,
}

fn trial_rng(seed: u64, row: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((row as u64) << 32) | trial as u64);
    rng
}

fn random_location(space: &DendriteSpace, rng: &mut impl Rng) -> Location {
    let cx = &space.complex;
    let mut u = rng.gen::<f64>() * cx.total_length();
    for (i, e) in cx.edges().iter().enumerate() {
        if u < e.length {
            return Location::new(EdgeId(i), u / e.length);
        }
        u -= e.length;
    }
    Location::new(EdgeId(cx.n_edges() - 1), 1.0)
}

/// Runs `trials` pseudo-orbits per `δ` (grid sorted ascending) through the
/// net oracle with mesh `eps/2`.
pub fn estimate_modulus<S>(
    sys: &S,
    eps: f64,
    trials: usize,
    delta_grid: &[f64],
    n: usize,
    generator: Generator,
    seed: u64,
) -> Result<ModulusEstimate>
where
    S: DynamicalSystem<Space = DendriteSpace> + ?Sized,
{
    let net = build_eps_net(sys.space(), eps / 2.0)?;
    let mut rows = Vec::new();
    for (r, &delta) in delta_grid.iter().enumerate() {
        let outcomes: Vec<Result<bool>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, r, t);
                let po = match generator {
                    Generator::Uniform => {
                        let x0 = random_location(sys.space(), &mut rng);
                        generate_pseudo_orbit(sys, &x0, delta, n, &mut rng)?
                    }
                    Generator::Drift => drift_pseudo_orbit(sys, &Location::new(EdgeId(0), 0.0), delta, n)?,
                };
                Ok(search_shadow_point(sys, &po, eps, &net)?.is_shadowed())
            })
            .collect();
        let mut shadowed = 0;
        for o in outcomes {
            shadowed += o? as usize;
        }
        rows.push(ModulusRow { delta, shadowed, trials });
    }
    let best_delta = rows.iter().filter(|r| r.shadowed == r.trials).map(|r| r.delta).fold(None, |acc: Option<f64>, d| {
        Some(acc.map_or(d, |a| a.max(d)))
    });
    Ok(ModulusEstimate { eps, steps: n, mesh: eps / 2.0, best_delta, rows })
}
