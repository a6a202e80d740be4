//! Combs: a base system with scaled copies of an `(n − 2)`-star attached at
//! the points of a finite orbit-closed set `D`.
//!
//! The tooth over `dᵢ` is the unit star scaled by `1/i`. The comb map sends
//! `(x, 0)` to `(h₁(x), 0)` and the tooth over `dᵢ` to the tooth over
//! `dⱼ = h₁(dᵢ)` by `y ↦ (1/j)·h₂(i·y)`, with `h₂(t) = t²` on every arm.
//! `D` is a union of finite orbit segments; the tooth over the last point of
//! a segment collapses onto `(h₁(d), 0)`, and the backward map collapses the
//! tooth over the first point onto `(h₁⁻¹(d), 0)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::system::{SimpleSystem, SystemMap};
use crate::dendrite::{
    CombLayer, DendriteComplex, DendriteSpace, Edge, EdgeBehaviour, EdgeId, EdgeLineage, Location, Tooth, TreeMap,
    TreeMetric, VertexId,
};
use crate::error::{contract, domain, Result};
use crate::metric::{MetricSpace, SpaceKind};

/// Minimum distance between `D` and `P ∪ Q`.
pub const D_GAP: f64 = 1e-3;

#[derive(Debug)]
pub struct CombMap {
    space: Arc<DendriteSpace>,
    base: Arc<SimpleSystem>,
    /// Orbit segments of `D`, as tooth numbers.
    segments: Vec<Vec<usize>>,
    /// `(segment, position)` of every tooth.
    position: Vec<(usize, usize)>,
    tooth_at_vertex: BTreeMap<VertexId, usize>,
}

impl CombMap {
    pub fn space(&self) -> &Arc<DendriteSpace> {
        &self.space
    }

    pub fn base(&self) -> &Arc<SimpleSystem> {
        &self.base
    }

    pub fn layer(&self) -> &CombLayer {
        self.space.comb().expect("comb space")
    }

    pub fn segments(&self) -> &[Vec<usize>] {
        &self.segments
    }

    /// The projection `Π` onto the base.
    pub fn project(&self, p: &Location) -> Location {
        self.layer().project(p)
    }

    fn tooth_of(&self, p: &Location) -> Option<(usize, usize)> {
        let layer = self.layer();
        if let Some(v) = self.space.complex.vertex_of(p) {
            if let Some(&tooth) = self.tooth_at_vertex.get(&v) {
                return Some((tooth, usize::MAX));
            }
        }
        layer.tooth_of(p.edge)
    }

    fn next_tooth(&self, tooth: usize) -> Option<usize> {
        let (s, pos) = self.position[tooth];
        self.segments[s].get(pos + 1).copied()
    }

    fn prev_tooth(&self, tooth: usize) -> Option<usize> {
        let (s, pos) = self.position[tooth];
        pos.checked_sub(1).map(|q| self.segments[s][q])
    }

    fn root_of(&self, tooth: usize) -> Location {
        let v = self.layer().teeth[tooth].root_vertex;
        self.space.complex.vertex_location(v)
    }

    fn on_arm(&self, tooth: usize, arm: usize, t: f64) -> Location {
        if t == 0.0 {
            return self.root_of(tooth);
        }
        Location::new(self.layer().teeth[tooth].arm_edges[arm], t)
    }
}

impl TreeMap for CombMap {
    fn domain(&self) -> &DendriteSpace {
        &self.space
    }

    fn codomain(&self) -> &DendriteSpace {
        &self.space
    }

    fn eval(&self, p: &Location) -> Location {
        let layer = self.layer();
        match self.tooth_of(p) {
            Some((tooth, arm)) => match self.next_tooth(tooth) {
                Some(j) if arm == usize::MAX => self.root_of(j),
                Some(j) => self.on_arm(j, arm, p.t * p.t),
                None => layer.lift(&self.base.forward(&layer.teeth[tooth].root)),
            },
            None => layer.lift(&self.base.forward(&layer.project(p))),
        }
    }

    fn eval_inverse(&self, p: &Location) -> Option<Location> {
        let layer = self.layer();
        match self.tooth_of(p) {
            Some((tooth, arm)) => match self.prev_tooth(tooth) {
                Some(i) if arm == usize::MAX => Some(self.root_of(i)),
                Some(i) => Some(self.on_arm(i, arm, p.t.sqrt())),
                None => Some(layer.lift(&self.base.backward(&layer.teeth[tooth].root)?)),
            },
            None => Some(layer.lift(&self.base.backward(&layer.project(p))?)),
        }
    }

    fn is_homeomorphism(&self) -> bool {
        false
    }

    fn is_monotone(&self) -> bool {
        self.base.map.is_monotone()
    }

    fn edge_behaviour(&self, e: EdgeId) -> EdgeBehaviour {
        match self.layer().lineage[e.0] {
            EdgeLineage::Base { parent, .. } => self.base.map.edge_behaviour(parent),
            EdgeLineage::Tooth { tooth, .. } => match self.next_tooth(tooth) {
                Some(_) => EdgeBehaviour::Injective,
                None => EdgeBehaviour::Constant,
            },
        }
    }

    fn invert_on_edge(&self, e: EdgeId, y: &Location) -> Option<f64> {
        let layer = self.layer();
        let cx = &self.space.complex;
        match layer.lineage[e.0] {
            EdgeLineage::Tooth { tooth, arm } => {
                let j = self.next_tooth(tooth)?;
                if cx.same_point(y, &self.root_of(j)) {
                    return Some(0.0);
                }
                (y.edge == layer.teeth[j].arm_edges[arm]).then(|| y.t.sqrt())
            }
            EdgeLineage::Base { parent, t0, t1 } => {
                if layer.planar(y) != [0.0, 0.0] {
                    return None;
                }
                let t = self.base.map.invert_on_edge(parent, &layer.project(y))?;
                let s = (t - t0) / (t1 - t0);
                (-1e-12..=1.0 + 1e-12).contains(&s).then(|| s.clamp(0.0, 1.0))
            }
        }
    }
}

/// Unit directions of the arms of the standard `k`-star.
pub fn arm_directions(k: usize) -> Vec<[f64; 2]> {
    (0..k)
        .map(|a| {
            let th = PI / 2.0 + 2.0 * PI * a as f64 / k as f64;
            [th.cos(), th.sin()]
        })
        .collect()
}

/// The `(X, D, n − 2)`-comb over `base`. `segments` lists `D` as orbit
/// segments (`h₁(seg[p]) = seg[p + 1]` exactly); teeth are numbered from
/// `first_index` in segment order.
pub fn make_comb(
    base: Arc<SimpleSystem>,
    segments: &[Vec<Location>],
    n: usize,
    first_index: usize,
) -> Result<SimpleSystem> {
    if n < 3 {
        return domain("tooth order n must be at least 3");
    }
    if first_index == 0 {
        return domain("tooth numbering starts at 1");
    }
    let bx = &base.space.complex;
    let mut flat = Vec::new();
    for seg in segments {
        if seg.is_empty() {
            return domain("empty orbit segment");
        }
        for (p, d) in seg.iter().enumerate() {
            bx.validate(d)?;
            if !(d.t > 0.0 && d.t < 1.0) {
                return contract(format!("D point {d:?} sits on a vertex"));
            }
            if base.dist_to_attractors(d) < D_GAP || base.dist_to_repellers(d) < D_GAP {
                return contract(format!("D point {d:?} is within {D_GAP} of P or Q"));
            }
            if let Some(next) = seg.get(p + 1) {
                if base.forward(d) != *next {
                    return contract(format!("D is not orbit-closed at {d:?}"));
                }
            }
            flat.push(*d);
        }
    }
    for i in 0..flat.len() {
        for j in (i + 1)..flat.len() {
            if bx.same_point(&flat[i], &flat[j]) {
                return contract("D has a repeated point");
            }
        }
    }

    // cut base edges at the D points
    let nv = bx.n_vertices();
    let mut cuts: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
    for (k, d) in flat.iter().enumerate() {
        cuts.entry(d.edge.0).or_default().push((d.t, k));
    }
    for v in cuts.values_mut() {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let mut edges = Vec::new();
    let mut lineage = Vec::new();
    let mut root_vertex = vec![VertexId(0); flat.len()];
    let mut next_vertex = nv;
    for (i, e) in bx.edges().iter().enumerate() {
        let mut prev = (0.0, e.a);
        let list = cuts.get(&i).cloned().unwrap_or_default();
        for (t, k) in list {
            let v = VertexId(next_vertex);
            next_vertex += 1;
            root_vertex[k] = v;
            edges.push(Edge { a: prev.1, b: v, length: (t - prev.0) * e.length });
            lineage.push(EdgeLineage::Base { parent: EdgeId(i), t0: prev.0, t1: t });
            prev = (t, v);
        }
        edges.push(Edge { a: prev.1, b: e.b, length: (1.0 - prev.0) * e.length });
        lineage.push(EdgeLineage::Base { parent: EdgeId(i), t0: prev.0, t1: 1.0 });
    }
    let arms = n - 2;
    let mut teeth = Vec::new();
    for (k, d) in flat.iter().enumerate() {
        let index = first_index + k;
        let mut arm_edges = Vec::new();
        for a in 0..arms {
            let tip = VertexId(next_vertex);
            next_vertex += 1;
            arm_edges.push(EdgeId(edges.len()));
            edges.push(Edge { a: root_vertex[k], b: tip, length: 1.0 / index as f64 });
            lineage.push(EdgeLineage::Tooth { tooth: k, arm: a });
        }
        teeth.push(Tooth { root: *d, index, root_vertex: root_vertex[k], arm_edges });
    }
    let mut complex = DendriteComplex::new(next_vertex, edges)?;
    let layer = CombLayer::new(base.space.clone(), lineage, teeth, arm_directions(arms));
    for (name, l) in &bx.labels {
        complex.labels.insert(name.clone(), layer.lift(l));
    }
    let space = Arc::new(DendriteSpace::new(SpaceKind::CombProduct, complex, TreeMetric::Comb(Box::new(layer))));

    let mut seg_ids = Vec::new();
    let mut position = Vec::new();
    let mut k = 0;
    for (s, seg) in segments.iter().enumerate() {
        let mut ids = Vec::new();
        for p in 0..seg.len() {
            ids.push(k);
            position.push((s, p));
            k += 1;
        }
        seg_ids.push(ids);
    }
    let tooth_at_vertex = root_vertex.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let layer = space.comb().expect("comb space");
    let attractors = base.attractors.iter().map(|p| space.complex.canonical(layer.lift(p))).collect();
    let repellers = base.repellers.iter().map(|p| space.complex.canonical(layer.lift(p))).collect();
    let map = CombMap { space: space.clone(), base: base.clone(), segments: seg_ids, position, tooth_at_vertex };
    SimpleSystem::new(&format!("comb({})", base.name), space, SystemMap::Comb(Arc::new(map)), attractors, repellers)
}

impl CombMap {
    /// Checks `Π ∘ h = h₁ ∘ Π` at `p`; returns the base-space discrepancy.
    pub fn commutation_defect(&self, p: &Location) -> f64 {
        let lhs = self.project(&self.eval(p));
        let rhs = self.base.forward(&self.project(p));
        self.base.space.dist(&lhs, &rhs)
    }
}
