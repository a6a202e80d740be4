//! Diameter dichotomy, transitivity and dynamical-ball probes.

use serde::Serialize;

use super::continua::TorusContinuum;
use super::torus::{frac, ToralAutomorphism};
use crate::error::{contract, Result};
use crate::metric::{FinitePointSet, MetricSpace};

#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    /// First `k ≤ N` with `diam(fᵏC) > ε`.
    pub exceeded_at: Option<usize>,
    /// Upper bounds on `diam(fⁿC)`, `n = 0..=N`.
    pub diameters: Vec<f64>,
    /// Times `n ≥ exceeded_at` with `diam(fⁿC) < δ`.
    pub violations: Vec<usize>,
}

/// Once `fᵏ(C)` grows beyond `ε` its diameter never drops below `δ` again.
pub fn diameter_dichotomy_probe(
    t: &ToralAutomorphism,
    c: &TorusContinuum,
    delta: f64,
    eps: f64,
    n: usize,
) -> Result<DichotomyReport> {
    if c.diam_bounds(t).hi > delta * (1.0 + 1e-12) {
        return contract(format!("continuum diameter exceeds delta {delta}"));
    }
    let bounds: Vec<_> = (0..=n).map(|k| c.shape_image(t, k as i64).diam_bounds(t)).collect();
    let exceeded_at = bounds.iter().position(|b| b.lo > eps);
    let violations = match exceeded_at {
        Some(k) => (k..=n).filter(|&m| bounds[m].hi < delta).collect(),
        None => Vec::new(),
    };
    Ok(DichotomyReport { exceeded_at, diameters: bounds.iter().map(|b| b.hi).collect(), violations })
}

/// An open ball on the torus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TorusBall {
    pub center: [f64; 2],
    pub radius: f64,
}

impl TorusBall {
    /// Grid points of spacing `radius/per_radius` inside the ball.
    pub fn samples(&self, per_radius: usize) -> Vec<[f64; 2]> {
        let m = per_radius.max(1) as i64;
        let h = self.radius / m as f64;
        let mut out = Vec::new();
        for i in -m..=m {
            for j in -m..=m {
                let (dx, dy) = (i as f64 * h, j as f64 * h);
                if dx.hypot(dy) < self.radius {
                    out.push([frac(self.center[0] + dx), frac(self.center[1] + dy)]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TransitivityHit {
    /// Least `n ≥ 0` with a sample of `U` landing in `V` after `n` steps.
    pub least: Option<usize>,
    /// Least such `n ≥ 1`.
    pub least_positive: Option<usize>,
}

pub fn transitivity_probe(
    t: &ToralAutomorphism,
    u: &TorusBall,
    v: &TorusBall,
    max_n: usize,
    per_radius: usize,
) -> TransitivityHit {
    let torus = t.torus();
    let mut pts = u.samples(per_radius);
    let mut least = None;
    let mut least_positive = None;
    for n in 0..=max_n {
        if n > 0 {
            pts.iter_mut().for_each(|p| *p = t.apply(p));
        }
        if pts.iter().any(|p| torus.dist(p, &v.center) < v.radius) {
            least.get_or_insert(n);
            if n >= 1 {
                least_positive = Some(n);
                break;
            }
        }
    }
    TransitivityHit { least, least_positive }
}

/// Local grid points `y` of spacing `h` around `x` with `d(fᵏy, fᵏx) ≤ c`
/// for `|k| ≤ n`.
pub fn dynamical_ball(t: &ToralAutomorphism, x: [f64; 2], c: f64, n: usize, h: f64) -> Result<FinitePointSet<[f64; 2]>> {
    if !(c > 0.0 && c < 0.25) {
        return contract(format!("c = {c} must lie in (0, 1/4)"));
    }
    let torus = t.torus();
    let orbit = |p: [f64; 2], back: bool| {
        std::iter::successors(Some(p), move |q| Some(if back { t.apply_inverse(q) } else { t.apply(q) }))
            .take(n + 1)
            .collect::<Vec<_>>()
    };
    let (xf, xb) = (orbit(x, false), orbit(x, true));
    let m = (c / h).floor() as i64;
    let mut out = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let (dx, dy) = (i as f64 * h, j as f64 * h);
            if dx.hypot(dy) > c {
                continue;
            }
            let y = [frac(x[0] + dx), frac(x[1] + dy)];
            let ok = |xs: &[[f64; 2]], back: bool| {
                let mut z = y;
                xs.iter().skip(1).all(|xk| {
                    z = if back { t.apply_inverse(&z) } else { t.apply(&z) };
                    torus.dist(&z, xk) <= c * (1.0 + 1e-12)
                })
            };
            if ok(&xf, false) && ok(&xb, true) {
                out.push(y);
            }
        }
    }
    Ok(FinitePointSet::new(torus.id(), out, Some(h)))
}
