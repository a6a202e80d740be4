//! Segments and parallelograms on the torus, their exact images under a toral
//! automorphism, and sampled Hausdorff distances.

use rayon::prelude::*;
use serde::Serialize;

use super::torus::{frac, to_f64, wrap_delta, RationalPoint, ToralAutomorphism};
use crate::error::{contract, domain, Result};

const HALF: f64 = 0.5;
const MAX_DIAM: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Segment sampling spacing at scale `eps`.
pub fn sample_spacing(eps: f64) -> f64 {
    1e-3f64.min(eps / 20.0)
}

/// `anchor + s·u + t·v` for `(s, t)` in `[s0, s0+1] × [0, 1]`, with `u`, `v`
/// in eigen-coordinates of the automorphism. A segment has `v = 0`; a
/// segment of length zero is a singleton.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusContinuum {
    pub anchor: RationalPoint,
    pub u: [f64; 2],
    pub v: [f64; 2],
    /// `-0.5` for continua centred on the anchor, `0` for anchored ones.
    pub s0: f64,
}

/// Diameter enclosure `lo ≤ diam ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiamBounds {
    pub lo: f64,
    pub hi: f64,
}

impl DiamBounds {
    pub fn exact(d: f64) -> Self {
        Self { lo: d, hi: d }
    }

    /// Certified lower bound on the Hausdorff distance of sets with these diameters.
    pub fn hausdorff_lower(&self, other: &DiamBounds) -> f64 {
        ((self.lo - other.hi).max(other.lo - self.hi) / 2.0).max(0.0)
    }
}

impl TorusContinuum {
    pub fn point(p: RationalPoint) -> Self {
        Self { anchor: p, u: [0.0; 2], v: [0.0; 2], s0: 0.0 }
    }

    /// A segment from `start` along the plane direction `dir`.
    pub fn segment(t: &ToralAutomorphism, start: RationalPoint, dir: [f64; 2], length: f64) -> Result<Self> {
        let u = scaled(dir, length)?;
        Ok(Self { anchor: start, u: t.coords(u), v: [0.0; 2], s0: 0.0 })
    }

    /// A segment of the given length centred at `center` along eigendirection `which` (0 unstable, 1 stable).
    pub fn eigen_segment(center: RationalPoint, which: usize, length: f64) -> Self {
        let mut u = [0.0; 2];
        u[which] = length;
        Self { anchor: center, u, v: [0.0; 2], s0: -0.5 }
    }

    /// The filled square `corner + [0, side]²`.
    pub fn square(t: &ToralAutomorphism, corner: RationalPoint, side: f64) -> Self {
        Self { anchor: corner, u: t.coords([side, 0.0]), v: t.coords([0.0, side]), s0: 0.0 }
    }

    pub fn is_segment(&self) -> bool {
        self.v == [0.0; 2]
    }

    pub fn plane_u(&self, t: &ToralAutomorphism) -> [f64; 2] {
        t.vector(self.u)
    }

    pub fn plane_v(&self, t: &ToralAutomorphism) -> [f64; 2] {
        t.vector(self.v)
    }

    /// Euclidean diameter of the lifted set.
    pub fn plane_diameter(&self, t: &ToralAutomorphism) -> f64 {
        let u = self.plane_u(t);
        let v = self.plane_v(t);
        (u[0] + v[0]).hypot(u[1] + v[1]).max((u[0] - v[0]).hypot(u[1] - v[1]))
    }

    /// Exact below `1/2`: a lift of diameter `D < 1/2` is isometric to its
    /// image. Longer sets contain a segment of length `1/2`.
    pub fn diam_bounds(&self, t: &ToralAutomorphism) -> DiamBounds {
        let d = self.plane_diameter(t);
        if d <= HALF {
            DiamBounds::exact(d)
        } else {
            DiamBounds { lo: HALF, hi: d.min(MAX_DIAM) }
        }
    }

    /// `fᵏ` of the continuum, exact on the anchor.
    pub fn image(&self, t: &ToralAutomorphism, k: i64) -> Self {
        Self {
            anchor: t.iterate_rational(&self.anchor, k),
            u: t.push_coords(self.u, k as i32),
            v: t.push_coords(self.v, k as i32),
            s0: self.s0,
        }
    }

    /// The vectors of `fᵏ` without moving the anchor (enough for diameters).
    pub fn shape_image(&self, t: &ToralAutomorphism, k: i64) -> Self {
        Self { anchor: self.anchor, u: t.push_coords(self.u, k as i32), v: t.push_coords(self.v, k as i32), s0: self.s0 }
    }

    /// Sample points at spacing at most `h`; `None` if more than `cap` would be needed.
    pub fn samples(&self, t: &ToralAutomorphism, h: f64, cap: usize) -> Option<Vec<[f64; 2]>> {
        let a = to_f64(&self.anchor);
        let u = self.plane_u(t);
        let v = self.plane_v(t);
        let nu = (u[0].hypot(u[1]) / h).ceil().max(1.0) as usize;
        let nv = if self.is_segment() { 0 } else { (v[0].hypot(v[1]) / h).ceil().max(1.0) as usize };
        if (nu + 1).saturating_mul(nv + 1) > cap {
            return None;
        }
        let mut out = Vec::with_capacity((nu + 1) * (nv + 1));
        for i in 0..=nu {
            let s = self.s0 + i as f64 / nu as f64;
            for j in 0..=nv {
                let r = if nv == 0 { 0.0 } else { j as f64 / nv as f64 };
                out.push([frac(a[0] + s * u[0] + r * v[0]), frac(a[1] + s * u[1] + r * v[1])]);
            }
        }
        Some(out)
    }

    /// The segment as polylines in `[0,1]²`, split where it wraps.
    pub fn polylines(&self, t: &ToralAutomorphism, h: f64, cap: usize) -> Result<Vec<Vec<[f64; 2]>>> {
        if !self.is_segment() {
            return domain("only segments render as polylines");
        }
        let pts = self.samples(t, h, cap).ok_or_else(|| crate::Error::Domain("segment too long to render".into()))?;
        let mut lines: Vec<Vec<[f64; 2]>> = vec![vec![pts[0]]];
        for w in pts.windows(2) {
            let d = wrap_delta(&w[0], &w[1]);
            let straight = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
            if (straight[0] - d[0]).abs() > 1e-9 || (straight[1] - d[1]).abs() > 1e-9 {
                lines.push(Vec::new());
            }
            lines.last_mut().expect("nonempty").push(w[1]);
        }
        Ok(lines)
    }
}

fn scaled(dir: [f64; 2], length: f64) -> Result<[f64; 2]> {
    if !(length >= 0.0) || !length.is_finite() {
        return domain(format!("segment length {length} must be finite and nonnegative"));
    }
    let n = dir[0].hypot(dir[1]);
    if length == 0.0 {
        return Ok([0.0; 2]);
    }
    if !(n > 0.0) {
        return domain("segment direction must be nonzero");
    }
    Ok([dir[0] / n * length, dir[1] / n * length])
}

/// A bucket grid over the torus for nearest-sample queries.
pub struct SampleIndex {
    cells: usize,
    buckets: Vec<Vec<[f64; 2]>>,
}

impl SampleIndex {
    pub fn new(points: &[[f64; 2]], cell: f64) -> Self {
        let cells = ((1.0 / cell).floor() as usize).clamp(1, 2048);
        let mut buckets = vec![Vec::new(); cells * cells];
        for p in points {
            buckets[Self::key(cells, p)].push(*p);
        }
        Self { cells, buckets }
    }

    fn key(cells: usize, p: &[f64; 2]) -> usize {
        let i = ((p[0] * cells as f64) as usize).min(cells - 1);
        let j = ((p[1] * cells as f64) as usize).min(cells - 1);
        i * cells + j
    }

    /// Distance to the nearest sample, or `cap` if none lies within `cap`.
    pub fn nearest(&self, p: &[f64; 2], cap: f64) -> f64 {
        let c = self.cells as i64;
        let i0 = ((p[0] * c as f64) as i64).min(c - 1);
        let j0 = ((p[1] * c as f64) as i64).min(c - 1);
        let reach = ((cap * c as f64).ceil() as i64 + 1).min(c / 2 + 1);
        let mut best = cap;
        for ring in 0..=reach {
            // every cell in later rings is at least (ring − 1)/c away
            if ring >= 2 && (ring - 1) as f64 / c as f64 >= best {
                break;
            }
            for di in -ring..=ring {
                for dj in -ring..=ring {
                    if di.abs() != ring && dj.abs() != ring {
                        continue;
                    }
                    let key = ((i0 + di).rem_euclid(c) * c + (j0 + dj).rem_euclid(c)) as usize;
                    for q in &self.buckets[key] {
                        let d = wrap_delta(p, q);
                        best = best.min(d[0].hypot(d[1]));
                    }
                }
            }
        }
        best
    }

    /// `max_{a∈A} d(a, index)`, capped.
    pub fn directed_from(&self, a: &[[f64; 2]], cap: f64) -> f64 {
        a.par_iter().map(|p| self.nearest(p, cap)).reduce(|| 0.0, f64::max)
    }
}

/// Hausdorff distance between samples, capped at `cap`.
pub fn sampled_hausdorff(a: &[[f64; 2]], b: &[[f64; 2]], cap: f64) -> f64 {
    let cell = |n: usize| (2.0 / (n.max(1) as f64).sqrt()).clamp(2e-3, 0.25);
    let ia = SampleIndex::new(a, cell(a.len()));
    let ib = SampleIndex::new(b, cell(b.len()));
    ib.directed_from(a, cap).max(ia.directed_from(b, cap))
}

/// Radius within which every point of a `grid × grid` torus grid sees a sample.
pub fn density_radius(samples: &[[f64; 2]], grid: usize) -> f64 {
    let index = SampleIndex::new(samples, 1.0 / 256.0);
    let pts: Vec<[f64; 2]> = (0..grid * grid)
        .map(|i| [(i / grid) as f64 / grid as f64, (i % grid) as f64 / grid as f64])
        .collect();
    index.directed_from(&pts, MAX_DIAM)
}

/// Lower bound on the diameter from at most `m` evenly chosen samples.
pub fn sampled_diameter(samples: &[[f64; 2]], m: usize) -> f64 {
    let step = (samples.len() / m.max(1)).max(1);
    let sub: Vec<[f64; 2]> = samples.iter().step_by(step).copied().collect();
    sub.par_iter()
        .map(|p| {
            sub.iter()
                .map(|q| {
                    let d = wrap_delta(p, q);
                    d[0].hypot(d[1])
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuumKind {
    Stable,
    Unstable,
}

/// `S_n = ⋃_{i≤k} f⁻ⁱ(Cˢ_ε(fⁱx))` (stable) or `U_n = ⋃_{i≤k} fⁱ(Cᵘ_ε(f⁻ⁱx))`
/// (unstable): for a linear map, the eigen-segment through `x` of length `ε·λ_uᵏ`.
#[derive(Debug, Clone)]
pub struct GlobalContinuum {
    pub center: RationalPoint,
    pub k: u32,
    pub eps: f64,
    pub kind: ContinuumKind,
    pub segment: TorusContinuum,
}

impl GlobalContinuum {
    pub fn length(&self, t: &ToralAutomorphism) -> f64 {
        self.segment.plane_diameter(t)
    }
}

/// The local stable continuum `Cˢ_ε(x)`: the stable segment of diameter `ε` centred at `x`.
pub fn local_stable_continuum(t: &ToralAutomorphism, x: RationalPoint, eps: f64) -> Result<TorusContinuum> {
    local_continuum(t, x, eps, ContinuumKind::Stable)
}

pub fn local_unstable_continuum(t: &ToralAutomorphism, x: RationalPoint, eps: f64) -> Result<TorusContinuum> {
    local_continuum(t, x, eps, ContinuumKind::Unstable)
}

fn local_continuum(t: &ToralAutomorphism, x: RationalPoint, eps: f64, kind: ContinuumKind) -> Result<TorusContinuum> {
    if !t.is_hyperbolic() {
        return contract("local continua need a hyperbolic automorphism");
    }
    if !(0.0..0.25).contains(&eps) {
        return contract(format!("eps {eps} must lie in [0, 1/4)"));
    }
    Ok(TorusContinuum::eigen_segment(x, eigen_index(kind), eps))
}

fn eigen_index(kind: ContinuumKind) -> usize {
    match kind {
        ContinuumKind::Unstable => 0,
        ContinuumKind::Stable => 1,
    }
}

pub fn build_global_continuum(
    t: &ToralAutomorphism,
    x: RationalPoint,
    k: u32,
    eps: f64,
    kind: ContinuumKind,
) -> Result<GlobalContinuum> {
    let local = local_continuum(t, x, eps, kind)?;
    let segment = TorusContinuum { u: local.u.map(|c| c * t.lambda_u().powi(k as i32)), ..local };
    Ok(GlobalContinuum { center: x, k, eps, kind, segment })
}
