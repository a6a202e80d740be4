//! Continuous maps between tree complexes, with the image and preimage
//! mechanics of the induced map on subcontinua.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::complex::{EdgeId, Location};
use super::space::DendriteSpace;
use super::subtree::{connected_span, Piece, Subtree};
use crate::error::{contract, Error, Result};

/// How a map behaves on a single edge of its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeBehaviour {
    /// Injective onto the arc from `f(e, 0)` to `f(e, 1)`.
    Injective,
    /// The whole edge goes to one point.
    Constant,
    General,
}

pub trait TreeMap: Send + Sync {
    fn domain(&self) -> &DendriteSpace;
    fn codomain(&self) -> &DendriteSpace;
    fn eval(&self, p: &Location) -> Location;

    fn eval_inverse(&self, _p: &Location) -> Option<Location> {
        None
    }

    fn is_homeomorphism(&self) -> bool;
    fn is_monotone(&self) -> bool;

    fn edge_behaviour(&self, _e: EdgeId) -> EdgeBehaviour {
        EdgeBehaviour::General
    }

    /// For an injective edge, the parameter `s` with `f(e, s) = y`, if `y` lies
    /// on the image arc. The default bisects arc length from `f(e, 0)`.
    fn invert_on_edge(&self, e: EdgeId, y: &Location) -> Option<f64> {
        let cod = &self.codomain().complex;
        let y0 = self.eval(&Location::new(e, 0.0));
        let y1 = self.eval(&Location::new(e, 1.0));
        let total = cod.geodesic_distance(&y0, &y1);
        let target = cod.geodesic_distance(&y0, y);
        if (target + cod.geodesic_distance(y, &y1) - total).abs() > 1e-9 * (1.0 + total) {
            return None;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if cod.geodesic_distance(&y0, &self.eval(&Location::new(e, mid))) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// Samples per piece used when a map has no closed-form piece images.
pub const IMAGE_SAMPLES: usize = 64;

/// `C(f)(A) = f(A)`.
pub fn image_subtree(f: &dyn TreeMap, a: &Subtree) -> Result<Subtree> {
    let mut pts = Vec::new();
    for p in a.pieces() {
        match f.edge_behaviour(p.edge) {
            EdgeBehaviour::Injective | EdgeBehaviour::Constant => {
                pts.push(f.eval(&Location::new(p.edge, p.t0)));
                if p.t1 > p.t0 {
                    pts.push(f.eval(&Location::new(p.edge, p.t1)));
                }
            }
            EdgeBehaviour::General => {
                for k in 0..=IMAGE_SAMPLES {
                    let t = p.t0 + (p.t1 - p.t0) * k as f64 / IMAGE_SAMPLES as f64;
                    pts.push(f.eval(&Location::new(p.edge, t)));
                }
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Domain("empty subtree".into()));
    }
    connected_span(&f.codomain().complex, &pts)
}

fn pieces_on(a: &Subtree, e: EdgeId) -> &[Piece] {
    let ps = a.pieces();
    let lo = ps.partition_point(|p| p.edge < e);
    let hi = ps.partition_point(|p| p.edge <= e);
    &ps[lo..hi]
}

/// Portion of the arc from `y0` to `y1` lying in `a`, as an arc-length range.
fn arc_overlap(space: &DendriteSpace, a: &Subtree, y0: &Location, y1: &Location) -> Option<(f64, f64)> {
    let cx = &space.complex;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut u = 0.0;
    let hit = |x: f64, lo: &mut f64, hi: &mut f64| {
        *lo = lo.min(x);
        *hi = hi.max(x);
    };
    for step in cx.path(y0, y1) {
        let len = cx.edge(step.edge).length;
        let seg = (step.to - step.from).abs() * len;
        let (smin, smax) = (step.from.min(step.to), step.from.max(step.to));
        for q in pieces_on(a, step.edge) {
            let (c0, c1) = (q.t0.max(smin), q.t1.min(smax));
            if c0 <= c1 {
                let to_u = |t: f64| u + (t - step.from).abs() * len;
                hit(to_u(c0), &mut lo, &mut hi);
                hit(to_u(c1), &mut lo, &mut hi);
            }
        }
        for (t, ut) in [(step.from, u), (step.to, u + seg)] {
            if let Some(v) = cx.vertex_of(&Location::new(step.edge, t)) {
                if a.covers_vertex(cx, v) {
                    hit(ut, &mut lo, &mut hi);
                }
            }
        }
        u += seg;
    }
    (lo <= hi).then_some((lo, hi))
}

fn point_along(space: &DendriteSpace, y0: &Location, y1: &Location, u: f64) -> Location {
    let cx = &space.complex;
    let mut rem = u;
    let steps = cx.path(y0, y1);
    for step in &steps {
        let len = cx.edge(step.edge).length;
        let seg = (step.to - step.from).abs() * len;
        if rem <= seg {
            let frac = if seg > 0.0 { rem / seg } else { 0.0 };
            return Location::new(step.edge, step.from + (step.to - step.from) * frac);
        }
        rem -= seg;
    }
    *y1
}

/// `f⁻¹(A)` for a monotone map.
pub fn preimage_subtree(f: &dyn TreeMap, a: &Subtree) -> Result<Option<Subtree>> {
    if !f.is_monotone() {
        return contract("preimage_subtree requires a monotone map");
    }
    let dom = &f.domain().complex;
    let cod = f.codomain();
    let mut raw = Vec::new();
    for i in 0..dom.n_edges() {
        let e = EdgeId(i);
        let y0 = f.eval(&Location::new(e, 0.0));
        let y1 = f.eval(&Location::new(e, 1.0));
        match f.edge_behaviour(e) {
            EdgeBehaviour::Constant => {
                if a.contains(&cod.complex, &y0) {
                    raw.push(Piece::new(e, 0.0, 1.0));
                }
            }
            EdgeBehaviour::Injective => {
                if let Some((u0, u1)) = arc_overlap(cod, a, &y0, &y1) {
                    let total = cod.complex.geodesic_distance(&y0, &y1);
                    let param = |u: f64| -> f64 {
                        if u <= 0.0 {
                            0.0
                        } else if u >= total {
                            1.0
                        } else {
                            let y = point_along(cod, &y0, &y1, u);
                            f.invert_on_edge(e, &y).unwrap_or(u / total)
                        }
                    };
                    raw.push(Piece::new(e, param(u0), param(u1)));
                }
            }
            EdgeBehaviour::General => {
                const K: usize = 256;
                let inside: Vec<bool> = (0..=K)
                    .map(|k| a.contains(&cod.complex, &f.eval(&Location::new(e, k as f64 / K as f64))))
                    .collect();
                let mut k = 0;
                while k <= K {
                    if inside[k] {
                        let start = k;
                        while k < K && inside[k + 1] {
                            k += 1;
                        }
                        raw.push(Piece::new(e, start as f64 / K as f64, k as f64 / K as f64));
                    }
                    k += 1;
                }
            }
        }
    }
    if raw.is_empty() {
        return Ok(None);
    }
    match Subtree::from_pieces(dom, raw) {
        Some(s) if s.is_connected(dom) => Ok(Some(s)),
        Some(_) => Err(Error::Invariant("preimage of a subtree under a monotone map is disconnected".into())),
        None => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub samples: usize,
    /// A point whose fine-grid preimage is disconnected.
    pub counterexample: Option<Location>,
    pub grid_spacing: f64,
}

/// Samples points, computes their fine-grid preimages and checks connectivity.
pub fn verify_monotone(f: &dyn TreeMap, samples: usize, seed: u64) -> MonotoneReport {
    let dom = &f.domain().complex;
    let cod = &f.codomain().complex;
    let h = dom.total_length() / 4000.0;
    // grid graph: vertices first, then interior points edge by edge
    let nv = dom.n_vertices();
    let mut nodes: Vec<Location> = (0..nv).map(|v| dom.vertex_location(super::complex::VertexId(v))).collect();
    let mut links = Vec::new();
    for (i, e) in dom.edges().iter().enumerate() {
        let k = (e.length / h).ceil().max(1.0) as usize;
        let mut prev = e.a.0;
        for j in 1..k {
            nodes.push(Location::new(EdgeId(i), j as f64 / k as f64));
            let cur = nodes.len() - 1;
            links.push((prev, cur));
            prev = cur;
        }
        links.push((prev, e.b.0));
    }
    let images: Vec<Location> = nodes.iter().map(|p| f.eval(p)).collect();
    let lip = links
        .iter()
        .map(|&(x, y)| {
            let d = dom.geodesic_distance(&nodes[x], &nodes[y]);
            cod.geodesic_distance(&images[x], &images[y]) / d
        })
        .fold(0.0f64, f64::max);
    let tau = 2.0 * lip * h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let e = EdgeId(rng.gen_range(0..dom.n_edges()));
        let x = Location::new(e, rng.gen::<f64>());
        let y = f.eval(&x);
        let member: Vec<bool> = images.iter().map(|q| cod.geodesic_distance(q, &y) <= tau).collect();
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &links {
            if member[u] && member[v] {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru] = rv;
            }
        }
        let mut root = None;
        let mut split = false;
        for i in 0..nodes.len() {
            if member[i] {
                let r = find(&mut parent, i);
                match root {
                    None => root = Some(r),
                    Some(r0) if r0 != r => {
                        split = true;
                        break;
                    }
                    _ => {}
                }
            }
        }
        if split {
            return MonotoneReport { pass: false, samples, counterexample: Some(y), grid_spacing: h };
        }
    }
    MonotoneReport { pass: true, samples, counterexample: None, grid_spacing: h }
}

/// Self-map of `[0, 1]` applied along every edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum EdgeProfile {
    Identity,
    /// `t ↦ t²`.
    Square,
    /// `2t²` below `1/2`, `1 − 2(1 − t)²` above; fixes `0`, `1/2`, `1`.
    ThreeFixed,
    /// Increasing interpolation through `knots`, which must include `(0, 0)` and `(1, 1)`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// `t ↦ 1 − |2t − 1|`.
    Tent,
    /// `t ↦ 1 − g(1 − t)`.
    Reversed { inner: Box<EdgeProfile> },
}

impl EdgeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            EdgeProfile::Identity => t,
            EdgeProfile::Square => t * t,
            EdgeProfile::ThreeFixed => {
                if t <= 0.5 {
                    2.0 * t * t
                } else {
                    1.0 - 2.0 * (1.0 - t) * (1.0 - t)
                }
            }
            EdgeProfile::PiecewiseLinear { knots } => interpolate(knots.iter().copied(), t),
            EdgeProfile::Tent => 1.0 - (2.0 * t - 1.0).abs(),
            EdgeProfile::Reversed { inner } => 1.0 - inner.eval(1.0 - t),
        }
    }

    pub fn inverse(&self, s: f64) -> Option<f64> {
        match self {
            EdgeProfile::Identity => Some(s),
            EdgeProfile::Square => Some(s.sqrt()),
            EdgeProfile::ThreeFixed => Some(if s <= 0.5 { (0.5 * s).sqrt() } else { 1.0 - (0.5 * (1.0 - s)).sqrt() }),
            EdgeProfile::PiecewiseLinear { knots } => Some(interpolate(knots.iter().map(|&(x, y)| (y, x)), s)),
            EdgeProfile::Tent => None,
            EdgeProfile::Reversed { inner } => inner.inverse(1.0 - s).map(|u| 1.0 - u),
        }
    }

    pub fn is_injective(&self) -> bool {
        match self {
            EdgeProfile::Tent => false,
            EdgeProfile::Reversed { inner } => inner.is_injective(),
            _ => true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let EdgeProfile::Reversed { inner } = self {
            return inner.validate();
        }
        if let EdgeProfile::PiecewiseLinear { knots } = self {
            let ok = knots.len() >= 2
                && knots[0] == (0.0, 0.0)
                && *knots.last().unwrap() == (1.0, 1.0)
                && knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1);
            if !ok {
                return Err(Error::Domain("piecewise-linear knots must increase from (0,0) to (1,1)".into()));
            }
        }
        Ok(())
    }
}

fn interpolate(knots: impl Iterator<Item = (f64, f64)>, t: f64) -> f64 {
    let ks: Vec<(f64, f64)> = knots.collect();
    let i = ks.partition_point(|k| k.0 < t).clamp(1, ks.len() - 1);
    let (a, b) = (ks[i - 1], ks[i]);
    a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
}

/// A map fixing every vertex and applying a profile along each edge.
#[derive(Debug, Clone)]
pub struct EdgewiseMap {
    space: Arc<DendriteSpace>,
    profiles: Vec<EdgeProfile>,
}

impl EdgewiseMap {
    pub fn new(space: Arc<DendriteSpace>, profiles: Vec<EdgeProfile>) -> Result<Self> {
        if profiles.len() != space.complex.n_edges() {
            return Err(Error::Domain(format!(
                "{} profiles for {} edges",
                profiles.len(),
                space.complex.n_edges()
            )));
        }
        for p in &profiles {
            p.validate()?;
        }
        if profiles.iter().any(|p| !p.is_injective()) && space.complex.n_edges() != 1 {
            return Err(Error::Domain("tent profile is only defined on a single edge".into()));
        }
        Ok(Self { space, profiles })
    }

    pub fn uniform(space: Arc<DendriteSpace>, profile: EdgeProfile) -> Result<Self> {
        let n = space.complex.n_edges();
        Self::new(space, vec![profile; n])
    }

    pub fn identity(space: Arc<DendriteSpace>) -> Self {
        Self::uniform(space, EdgeProfile::Identity).expect("identity is valid")
    }

    pub fn space(&self) -> &Arc<DendriteSpace> {
        &self.space
    }

    pub fn profiles(&self) -> &[EdgeProfile] {
        &self.profiles
    }
}

impl TreeMap for EdgewiseMap {
    fn domain(&self) -> &DendriteSpace {
        &self.space
    }

    fn codomain(&self) -> &DendriteSpace {
        &self.space
    }

    fn eval(&self, p: &Location) -> Location {
        Location::new(p.edge, self.profiles[p.edge.0].eval(p.t))
    }

    fn eval_inverse(&self, p: &Location) -> Option<Location> {
        self.profiles[p.edge.0].inverse(p.t).map(|t| Location::new(p.edge, t))
    }

    fn is_homeomorphism(&self) -> bool {
        self.profiles.iter().all(EdgeProfile::is_injective)
    }

    fn is_monotone(&self) -> bool {
        self.is_homeomorphism()
    }

    fn edge_behaviour(&self, e: EdgeId) -> EdgeBehaviour {
        if self.profiles[e.0].is_injective() {
            EdgeBehaviour::Injective
        } else {
            EdgeBehaviour::General
        }
    }

    fn invert_on_edge(&self, e: EdgeId, y: &Location) -> Option<f64> {
        let cx = &self.space.complex;
        let y = if y.edge == e {
            *y
        } else {
            let v = cx.vertex_of(y)?;
            let ed = cx.edge(e);
            if ed.a != v && ed.b != v {
                return None;
            }
            Location::new(e, cx.param_of_vertex(e, v))
        };
        self.profiles[e.0].inverse(y.t)
    }
}
