//! Metric structure on tree complexes: the intrinsic geodesic metric for
//! intervals, star unions and bridges, and the max-product metric for combs.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rand::{Rng, RngCore};

use super::complex::{DendriteComplex, EdgeId, Location, VertexId};
use super::subtree::{geodesic_hausdorff, Subtree};
use crate::error::{domain, Result};
use crate::metric::{MetricSpace, SpaceId, SpaceKind};

/// Where an edge of a comb comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeLineage {
    /// The sub-arc `[t0, t1]` of edge `parent` of the base space, at height 0.
    Base { parent: EdgeId, t0: f64, t1: f64 },
    /// Arm `arm` of tooth number `tooth`; `t = 0` is the root, `t = 1` the tip.
    Tooth { tooth: usize, arm: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tooth {
    /// Attachment point in the base space.
    pub root: Location,
    /// Enumeration index `i` of the attachment point; the tooth is the unit star scaled by `1/i`.
    pub index: usize,
    pub root_vertex: VertexId,
    pub arm_edges: Vec<EdgeId>,
}

impl Tooth {
    pub fn scale(&self) -> f64 {
        1.0 / self.index as f64
    }
}

/// The comb layer `Z ⊂ X × R²` over a base space `X`.
#[derive(Debug, Clone)]
pub struct CombLayer {
    pub base: Arc<DendriteSpace>,
    pub lineage: Vec<EdgeLineage>,
    pub teeth: Vec<Tooth>,
    /// Unit directions of the arms of the standard star.
    pub arm_dirs: Vec<[f64; 2]>,
    /// For every base edge, its sub-arcs `(t0, t1, child)` sorted by `t0`.
    children: BTreeMap<EdgeId, Vec<(f64, f64, EdgeId)>>,
}

impl CombLayer {
    pub fn new(base: Arc<DendriteSpace>, lineage: Vec<EdgeLineage>, teeth: Vec<Tooth>, arm_dirs: Vec<[f64; 2]>) -> Self {
        let mut children: BTreeMap<EdgeId, Vec<(f64, f64, EdgeId)>> = BTreeMap::new();
        for (i, l) in lineage.iter().enumerate() {
            if let EdgeLineage::Base { parent, t0, t1 } = *l {
                children.entry(parent).or_default().push((t0, t1, EdgeId(i)));
            }
        }
        for v in children.values_mut() {
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Self { base, lineage, teeth, arm_dirs, children }
    }

    /// The projection `Π(x, y) = x`.
    pub fn project(&self, p: &Location) -> Location {
        match self.lineage[p.edge.0] {
            EdgeLineage::Base { parent, t0, t1 } => {
                let t = if p.t == 0.0 {
                    t0
                } else if p.t == 1.0 {
                    t1
                } else {
                    t0 + p.t * (t1 - t0)
                };
                Location::new(parent, t)
            }
            EdgeLineage::Tooth { tooth, .. } => self.teeth[tooth].root,
        }
    }

    /// Planar coordinate `y`.
    pub fn planar(&self, p: &Location) -> [f64; 2] {
        match self.lineage[p.edge.0] {
            EdgeLineage::Base { .. } => [0.0, 0.0],
            EdgeLineage::Tooth { tooth, arm } => {
                let s = p.t * self.teeth[tooth].scale();
                [s * self.arm_dirs[arm][0], s * self.arm_dirs[arm][1]]
            }
        }
    }

    /// The point `(x, 0)` for a base location `x`.
    pub fn lift(&self, x: &Location) -> Location {
        let (edge, t) = (x.edge, x.t);
        let kids = &self.children[&edge];
        let idx = kids.partition_point(|c| c.1 < t).min(kids.len() - 1);
        let (t0, t1, child) = kids[idx];
        let s = if t == t0 {
            0.0
        } else if t == t1 {
            1.0
        } else {
            ((t - t0) / (t1 - t0)).clamp(0.0, 1.0)
        };
        Location::new(child, s)
    }

    pub fn tooth_of(&self, e: EdgeId) -> Option<(usize, usize)> {
        match self.lineage[e.0] {
            EdgeLineage::Tooth { tooth, arm } => Some((tooth, arm)),
            EdgeLineage::Base { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum TreeMetric {
    Geodesic,
    Comb(Box<CombLayer>),
}

/// A tree complex together with the metric it is measured in.
#[derive(Debug)]
pub struct DendriteSpace {
    id: SpaceId,
    kind: SpaceKind,
    pub complex: DendriteComplex,
    pub metric: TreeMetric,
    diameter: OnceLock<f64>,
}

impl DendriteSpace {
    pub fn new(kind: SpaceKind, complex: DendriteComplex, metric: TreeMetric) -> Self {
        Self { id: SpaceId::fresh(), kind, complex, metric, diameter: OnceLock::new() }
    }

    pub fn geodesic(kind: SpaceKind, complex: DendriteComplex) -> Self {
        Self::new(kind, complex, TreeMetric::Geodesic)
    }

    pub fn unit_interval() -> Self {
        Self::geodesic(SpaceKind::Interval, DendriteComplex::path_graph(&[1.0]).expect("valid path"))
    }

    pub fn comb(&self) -> Option<&CombLayer> {
        match &self.metric {
            TreeMetric::Comb(c) => Some(c),
            TreeMetric::Geodesic => None,
        }
    }

    pub fn is_geodesic(&self) -> bool {
        matches!(self.metric, TreeMetric::Geodesic)
    }

    fn raw_dist(&self, a: &Location, b: &Location) -> f64 {
        // fixed argument order keeps the metric exactly symmetric
        let (a, b) = if (a.edge.0, a.t) <= (b.edge.0, b.t) { (a, b) } else { (b, a) };
        match &self.metric {
            TreeMetric::Geodesic => self.complex.geodesic_distance(a, b),
            TreeMetric::Comb(layer) => {
                let (ya, yb) = (layer.planar(a), layer.planar(b));
                let dy = ((ya[0] - yb[0]).powi(2) + (ya[1] - yb[1]).powi(2)).sqrt();
                let dx = layer.base.raw_dist(&layer.project(a), &layer.project(b));
                dx.max(dy)
            }
        }
    }

    /// Distance from a point to a subtree. Exact for geodesic spaces; sampled
    /// at spacing `h` otherwise.
    pub fn dist_to_subtree(&self, p: &Location, s: &Subtree, h: f64) -> f64 {
        if s.contains(&self.complex, p) {
            return 0.0;
        }
        match self.metric {
            TreeMetric::Geodesic => s.geodesic_distance_to(&self.complex, p),
            TreeMetric::Comb(_) => s
                .samples(&self.complex, h)
                .iter()
                .map(|q| self.raw_dist(p, q))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Hausdorff distance between subtrees. Geodesic spaces: exact. Comb
    /// spaces: sampled at spacing `h` (error at most `h`); the intrinsic value
    /// is always an upper bound.
    pub fn subtree_hausdorff(&self, a: &Subtree, b: &Subtree, h: f64) -> f64 {
        match self.metric {
            TreeMetric::Geodesic => geodesic_hausdorff(&self.complex, a, b),
            TreeMetric::Comb(_) => {
                let sa = a.samples(&self.complex, h);
                let sb = b.samples(&self.complex, h);
                crate::metric::directed_hausdorff(self, &sa, &sb)
                    .max(crate::metric::directed_hausdorff(self, &sb, &sa))
            }
        }
    }

    /// Diameter of a subtree (exact for geodesic spaces: the largest distance between extreme points).
    pub fn subtree_diameter(&self, s: &Subtree, h: f64) -> f64 {
        let pts = match self.metric {
            TreeMetric::Geodesic => s.extreme_points(&self.complex),
            TreeMetric::Comb(_) => s.samples(&self.complex, h),
        };
        let mut best = 0.0f64;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.max(self.raw_dist(&pts[i], &pts[j]));
            }
        }
        best
    }

    pub fn check_subtree(&self, s: &Subtree) -> Result<()> {
        for p in s.pieces() {
            if p.edge.0 >= self.complex.n_edges() {
                return domain(format!("subtree references missing edge {}", p.edge));
            }
        }
        Ok(())
    }
}

impl MetricSpace for DendriteSpace {
    type Point = Location;

    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn validate(&self, p: &Location) -> Result<()> {
        self.complex.validate(p)
    }

    fn dist(&self, a: &Location, b: &Location) -> f64 {
        self.raw_dist(a, b)
    }

    fn space_diameter(&self) -> f64 {
        *self.diameter.get_or_init(|| {
            let leaves: Vec<Location> = (0..self.complex.n_vertices())
                .map(VertexId)
                .filter(|&v| self.complex.degree(v) <= 1)
                .map(|v| self.complex.vertex_location(v))
                .collect();
            let mut best = 0.0f64;
            for i in 0..leaves.len() {
                for j in (i + 1)..leaves.len() {
                    best = best.max(self.raw_dist(&leaves[i], &leaves[j]));
                }
            }
            best
        })
    }

    fn eps_net_points(&self, eps: f64) -> Vec<Location> {
        self.complex.grid(eps)
    }

    fn sample_ball(&self, center: &Location, radius: f64, rng: &mut dyn RngCore) -> Location {
        let r = radius * (1.0 - 1e-9);
        let pieces = self.complex.ball_pieces(center, r);
        let lengths: Vec<f64> = pieces
            .iter()
            .map(|&(e, a, b)| (b - a) * self.complex.edge(e).length)
            .collect();
        let total: f64 = lengths.iter().sum();
        if !(total > 0.0) {
            return *center;
        }
        let mut u = rng.gen::<f64>() * total;
        for (&(e, a, b), &len) in pieces.iter().zip(&lengths) {
            if u <= len {
                let t = a + (b - a) * (u / len).clamp(0.0, 1.0);
                return Location::new(e, t);
            }
            u -= len;
        }
        *center
    }
}
