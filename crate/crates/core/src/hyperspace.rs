//! Dynamics on the hyperspace of subcontinua of a dendrite: the induced map,
//! continuum-valued pseudo-orbits, and the shadowing continuum
//! `K = ⋂ f⁻ⁿ(Lₙ)` built from a fine connected cover.
//!
//! Hausdorff jumps are certified with the intrinsic (geodesic) Hausdorff
//! distance, which is exact on geodesic spaces and an upper bound for the
//! comb metric.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::SimpleSystem;
use crate::dendrite::{
    geodesic_hausdorff, image_subtree, preimage_subtree, subtree_intersection, DendriteSpace, EdgeId, EdgewiseMap,
    Location, Piece, Subtree, TreeMap, VertexId,
};
use crate::error::{contract, domain, Error, Result};
use crate::metric::MetricSpace;
use crate::shadowing::{shadow_recipe, simple_shadow_point, PseudoOrbit, RecipeParams, ShadowRecipe, ShadowReport, Verdict};

/// `C(f)(K) = f(K)`, the induced map on subcontinua.
pub fn induced_image(f: &dyn TreeMap, k: &Subtree) -> Result<Subtree> {
    image_subtree(f, k)
}

/// A finite pseudo-orbit of the induced map.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuumPseudoOrbit {
    continua: Vec<Subtree>,
    delta: f64,
    max_jump: f64,
}

impl ContinuumPseudoOrbit {
    /// Validates `d_H(f(K_k), K_{k+1}) < δ` for every consecutive pair.
    pub fn new(f: &dyn TreeMap, continua: Vec<Subtree>, delta: f64) -> Result<Self> {
        if continua.is_empty() {
            return domain("a continuum pseudo-orbit needs at least one continuum");
        }
        if !(delta >= 0.0) {
            return domain("delta must be nonnegative");
        }
        let space = f.domain();
        for k in &continua {
            space.check_subtree(k)?;
        }
        let jumps: Vec<f64> = continua
            .par_windows(2)
            .map(|w| Ok(geodesic_hausdorff(&space.complex, &image_subtree(f, &w[0])?, &w[1])))
            .collect::<Result<_>>()?;
        let mut max_jump = 0.0f64;
        for (i, &j) in jumps.iter().enumerate() {
            let ok = if delta == 0.0 { j <= 1e-12 } else { j < delta };
            if !ok {
                return contract(format!("Hausdorff jump {j} at step {i} is not below delta {delta}"));
            }
            max_jump = max_jump.max(j);
        }
        Ok(Self { continua, delta, max_jump })
    }

    pub fn continua(&self) -> &[Subtree] {
        &self.continua
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn max_jump(&self) -> f64 {
        self.max_jump
    }

    pub fn steps(&self) -> usize {
        self.continua.len() - 1
    }
}

/// `K_{k+1}` is the span of the extreme points of `f(K_k)`, each moved by
/// less than `δ/2`.
pub fn generate_continuum_pseudo_orbit(
    f: &dyn TreeMap,
    k0: &Subtree,
    delta: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<ContinuumPseudoOrbit> {
    if !(delta > 0.0) {
        return domain("delta must be positive");
    }
    let space = f.domain();
    let mut continua = vec![k0.clone()];
    for _ in 0..n {
        let img = image_subtree(f, continua.last().expect("nonempty"))?;
        let moved: Vec<Location> = img
            .extreme_points(&space.complex)
            .iter()
            .map(|p| space.sample_ball(p, 0.5 * delta, rng))
            .collect();
        continua.push(crate::dendrite::connected_span(&space.complex, &moved)?);
    }
    ContinuumPseudoOrbit::new(f, continua, delta)
}

/// Open geodesic balls `B(g, r)` around a grid, `2r < ε/4`.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectedCover {
    pub eps: f64,
    pub radius: f64,
    pub spacing: f64,
    #[serde(skip)]
    pub centers: Vec<Location>,
    #[serde(skip)]
    by_edge: Vec<Vec<usize>>,
    /// Every subset of diameter below this lies in one element.
    pub lebesgue: f64,
}

impl ConnectedCover {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Closure of element `i`.
    pub fn element(&self, space: &DendriteSpace, i: usize) -> Subtree {
        let raw = space
            .complex
            .ball_pieces(&self.centers[i], self.radius)
            .into_iter()
            .map(|(e, a, b)| Piece::new(e, a, b))
            .collect();
        Subtree::from_pieces(&space.complex, raw).expect("a ball is nonempty")
    }

    /// Whether `p` lies in the open element `i`.
    pub fn element_contains(&self, space: &DendriteSpace, i: usize, p: &Location) -> bool {
        space.complex.geodesic_distance(&self.centers[i], p) < self.radius
    }

    /// The fine grid on which anchors and Lebesgue numbers are measured.
    pub fn fine_grid(&self, space: &DendriteSpace) -> Vec<Location> {
        space.complex.grid(0.5 * self.spacing)
    }
}

/// A cover of the space by open geodesic balls of radius `0.95·ε/8` centred on
/// a grid of half that spacing.
pub fn connected_cover(space: &DendriteSpace, eps: f64) -> Result<ConnectedCover> {
    if !(eps > 0.0) {
        return domain("eps must be positive");
    }
    let radius = 0.95 * eps / 8.0;
    let spacing = 0.5 * radius;
    let centers = space.complex.grid(spacing);
    let mut by_edge = vec![Vec::new(); space.complex.n_edges()];
    for (i, c) in centers.iter().enumerate() {
        by_edge[c.edge.0].push(i);
    }
    // a set within geodesic distance `theta` of one of its points lies in the
    // ball around the nearest grid point
    let theta = radius - 0.5 * spacing;
    let lebesgue = if space.is_geodesic() {
        theta
    } else {
        let fine = space.complex.grid(0.5 * spacing);
        let cx = &space.complex;
        let closest = (0..fine.len())
            .into_par_iter()
            .map(|i| {
                let mut best = f64::INFINITY;
                for j in (i + 1)..fine.len() {
                    if cx.geodesic_distance(&fine[i], &fine[j]) >= theta {
                        best = best.min(space.dist(&fine[i], &fine[j]));
                    }
                }
                best
            })
            .reduce(|| f64::INFINITY, f64::min);
        theta.min(closest)
    };
    Ok(ConnectedCover { eps, radius, spacing, centers, by_edge, lebesgue })
}

/// Closure of the union of the cover elements meeting `k`.
pub fn fatten(space: &DendriteSpace, k: &Subtree, cover: &ConnectedCover) -> Result<Subtree> {
    let cx = &space.complex;
    // centres within the radius of k sit on edges of k or reached from its
    // extreme points and covered vertices
    let mut near = vec![false; cx.n_edges()];
    let mut ends = k.extreme_points(cx);
    ends.extend((0..cx.n_vertices()).map(VertexId).filter(|&v| k.covers_vertex(cx, v)).map(|v| cx.vertex_location(v)));
    for p in k.pieces() {
        near[p.edge.0] = true;
    }
    for p in &ends {
        for (e, _, _) in cx.ball_pieces(p, cover.radius) {
            near[e.0] = true;
        }
    }
    let mut raw: Vec<Piece> = k.pieces().to_vec();
    for (e, _) in near.iter().enumerate().filter(|(_, &b)| b) {
        for &i in &cover.by_edge[e] {
            let g = &cover.centers[i];
            if k.geodesic_distance_to(cx, g) < cover.radius {
                raw.extend(cx.ball_pieces(g, cover.radius).into_iter().map(|(e, a, b)| Piece::new(e, a, b)));
            }
        }
    }
    let l = Subtree::from_pieces(cx, raw).expect("contains k");
    if !l.is_connected(cx) {
        return Err(Error::Invariant("fattened continuum is disconnected".into()));
    }
    Ok(l)
}

/// Distance of the induced orbit of `k` from the pseudo-orbit.
pub fn verify_continuum_shadow(
    f: &dyn TreeMap,
    k: &Subtree,
    cpo: &ContinuumPseudoOrbit,
    eps: f64,
) -> Result<ShadowReport<Subtree>> {
    let space = f.domain();
    let mut distances = Vec::with_capacity(cpo.continua.len());
    let mut z = k.clone();
    for (n, kn) in cpo.continua.iter().enumerate() {
        if n > 0 {
            z = image_subtree(f, &z)?;
        }
        let mut d = geodesic_hausdorff(&space.complex, &z, kn);
        if d >= eps && !space.is_geodesic() {
            d = d.min(space.subtree_hausdorff(&z, kn, 0.01 * eps));
        }
        distances.push(d);
    }
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    Ok(ShadowReport {
        verdict: if max_distance < eps { Verdict::Shadowed } else { Verdict::NotShadowedInFamily },
        witness: Some(k.clone()),
        distances,
        max_distance,
        eps,
        delta: cpo.delta,
        steps: cpo.steps(),
        method: "verify-continuum",
        candidates: 1,
    })
}

/// The shadowing continuum and the anchor it was certified against.
#[derive(Debug, Clone, Serialize)]
pub struct ContinuumShadow {
    pub continuum: Subtree,
    /// Fine-grid anchor points.
    pub grid_anchor: Vec<Location>,
    /// The point-level shadow of a pseudo-orbit chosen inside the `K_n`.
    pub seeded_anchor: Option<Location>,
    pub report: ShadowReport<Subtree>,
}

/// Cover, scale and (for simple systems) the point-level shadower at the
/// Lebesgue scale `ε′`.
pub struct HyperShadower<'a> {
    pub map: &'a dyn TreeMap,
    pub eps: f64,
    pub cover: ConnectedCover,
    point: Option<(&'a SimpleSystem, ShadowRecipe)>,
}

impl<'a> HyperShadower<'a> {
    pub fn new(map: &'a dyn TreeMap, eps: f64) -> Result<Self> {
        if !map.is_monotone() {
            return contract("continuum shadowing needs a monotone map");
        }
        let cover = connected_cover(map.domain(), eps)?;
        Ok(Self { map, eps, cover, point: None })
    }

    /// Also computes the point-level shadower at `ε′`, which fixes the
    /// admissible `δ`.
    pub fn for_simple(sys: &'a SimpleSystem, eps: f64) -> Result<Self> {
        let mut h = Self::new(&sys.map, eps)?;
        let recipe = shadow_recipe(sys, h.cover.lebesgue, RecipeParams::default())?;
        h.point = Some((sys, recipe));
        Ok(h)
    }

    /// Largest admissible Hausdorff jump, when known.
    pub fn delta_threshold(&self) -> Option<f64> {
        self.point.as_ref().map(|(_, r)| r.delta)
    }

    pub fn recipe(&self) -> Option<&ShadowRecipe> {
        self.point.as_ref().map(|(_, r)| r)
    }

    pub fn shadow(&self, cpo: &ContinuumPseudoOrbit) -> Result<ContinuumShadow> {
        continuum_shadow(self, cpo)
    }
}

/// `K = ⋂_{n ≤ N} f⁻ⁿ(Lₙ)` with `Lₙ = fatten(Kₙ)`, checked against the anchor
/// and verified step by step.
pub fn continuum_shadow(h: &HyperShadower<'_>, cpo: &ContinuumPseudoOrbit) -> Result<ContinuumShadow> {
    let f = h.map;
    let space = f.domain();
    let cx = &space.complex;
    if let Some(t) = h.delta_threshold() {
        if cpo.delta() > t {
            return contract(format!("delta {} exceeds the continuum threshold {t}", cpo.delta()));
        }
    }
    let ks = cpo.continua();
    let eps1 = h.cover.lebesgue;

    let grid_anchor: Vec<Location> = h
        .cover
        .fine_grid(space)
        .into_par_iter()
        .filter(|a| {
            let mut z = *a;
            for (n, kn) in ks.iter().enumerate() {
                if n > 0 {
                    z = f.eval(&z);
                }
                if kn.geodesic_distance_to(cx, &z) >= eps1 {
                    return false;
                }
            }
            true
        })
        .collect();

    let seeded_anchor = match &h.point {
        Some((sys, recipe)) => {
            let mut pts = vec![ks[0].extreme_points(cx)[0]];
            for kn in &ks[1..] {
                let y = sys.forward(pts.last().expect("nonempty"));
                pts.push(kn.nearest_point(cx, &y));
            }
            let po = PseudoOrbit::new(*sys, pts, cpo.delta().max(1e-12))?;
            Some(simple_shadow_point(sys, recipe, &po)?.0)
        }
        None => None,
    };
    if grid_anchor.is_empty() && seeded_anchor.is_none() {
        return contract(format!(
            "empty anchor: no fine-grid orbit stays within {eps1} of the pseudo-orbit; delta {} is too large at this resolution",
            cpo.delta()
        ));
    }

    let fattened: Vec<Subtree> = ks.par_iter().map(|kn| fatten(space, kn, &h.cover)).collect::<Result<_>>()?;
    let mut k = fattened.last().expect("nonempty").clone();
    for l in fattened.iter().rev().skip(1) {
        let pre = preimage_subtree(f, &k)?
            .ok_or_else(|| Error::Invariant("preimage of a shadowing stage is empty".into()))?;
        k = subtree_intersection(cx, l, &pre)?
            .ok_or_else(|| Error::Invariant("shadowing intersection is empty".into()))?;
    }
    if !k.is_connected(cx) {
        return Err(Error::Invariant("shadowing continuum is disconnected".into()));
    }
    for a in grid_anchor.iter().chain(seeded_anchor.iter()) {
        if !k.contains(cx, a) && k.geodesic_distance_to(cx, a) > 1e-9 {
            return Err(Error::Invariant(format!("anchor point {a:?} lies outside the shadowing continuum")));
        }
    }
    let mut report = verify_continuum_shadow(f, &k, cpo, h.eps)?;
    report.method = "fattened-intersection";
    if !report.is_shadowed() {
        return Err(Error::Invariant(format!("shadowing continuum misses by {}", report.max_distance)));
    }
    Ok(ContinuumShadow { continuum: k, grid_anchor, seeded_anchor, report })
}

/// Searches continua whose free ends are grid points of spacing `mesh`
/// transported by the map to some time `j ≤ N` (that is, ends `f⁻ʲ(g)`),
/// keeping the vertex structure of `K₀`. For an edgewise homeomorphism the
/// Hausdorff distance between continua of one type is the largest end
/// displacement, so each end is optimised on its own.
pub fn exhaustive_subtree_oracle(
    f: &EdgewiseMap,
    cpo: &ContinuumPseudoOrbit,
    eps: f64,
    mesh: f64,
) -> Result<Option<(Subtree, ShadowReport<Subtree>)>> {
    let profiles = f.profiles();
    if !profiles.iter().all(|p| p.is_injective() && p.eval(0.0) == 0.0 && p.eval(1.0) == 1.0) {
        return contract("the oracle needs an edgewise homeomorphism fixing the vertices");
    }
    let space = f.space();
    let cx = &space.complex;
    let ks = cpo.continua();
    let n = ks.len();
    let piece_on = |s: &Subtree, e: EdgeId| s.pieces().iter().find(|p| p.edge == e).copied();

    let mut chosen: Vec<Piece> = Vec::new();
    for p0 in ks[0].pieces() {
        let e = p0.edge;
        let prof = &profiles[e.0];
        let len = cx.edge(e).length;
        let k = (len / mesh).round().max(1.0) as usize;
        let tracks_of = |g: f64| -> Vec<Vec<f64>> {
            // the orbit through g at each anchor time j
            let fwd: Vec<f64> = std::iter::successors(Some(g), |&t| Some(prof.eval(t))).take(n).collect();
            let mut bwd = vec![g];
            for _ in 1..n {
                match prof.inverse(*bwd.last().expect("nonempty")) {
                    Some(t) => bwd.push(t),
                    None => break,
                }
            }
            (0..bwd.len())
                .map(|j| (0..n).map(|m| if m >= j { fwd[m - j] } else { bwd[j - m] }).collect())
                .collect()
        };
        let mut ends = [p0.t0, p0.t1];
        for (side, end) in ends.iter_mut().enumerate() {
            if *end == 0.0 || *end == 1.0 {
                continue;
            }
            let targets: Vec<Option<f64>> = ks
                .iter()
                .map(|kn| piece_on(kn, e).map(|q| if side == 0 { q.t0 } else { q.t1 }))
                .collect();
            let best = (0..=k)
                .into_par_iter()
                .flat_map_iter(|i| tracks_of(i as f64 / k as f64))
                .filter(|tr| (tr[0] - *end).abs() * len < eps)
                .map(|tr| {
                    let err = tr
                        .iter()
                        .zip(&targets)
                        .filter_map(|(v, t)| t.map(|t| (v - t).abs() * len))
                        .fold(0.0, f64::max);
                    (err, tr[0])
                })
                .min_by(|a, b| a.0.total_cmp(&b.0));
            if let Some((_, v)) = best {
                *end = v;
            }
        }
        let (a, b) = if ends[0] <= ends[1] { (ends[0], ends[1]) } else { (ends[1], ends[0]) };
        chosen.push(Piece::new(e, a, b));
    }
    let Some(cand) = Subtree::from_pieces(cx, chosen) else {
        return Ok(None);
    };
    if !cand.is_connected(cx) {
        return Ok(None);
    }
    let mut rep = verify_continuum_shadow(f, &cand, cpo, eps)?;
    rep.method = "exhaustive-subtree";
    Ok(rep.is_shadowed().then_some((cand, rep)))
}
