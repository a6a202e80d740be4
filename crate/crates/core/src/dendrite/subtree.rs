//! Subcontinua of a finite tree, stored as canonical lists of edge intervals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::complex::{DendriteComplex, EdgeId, Location, VertexId};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub edge: EdgeId,
    pub t0: f64,
    pub t1: f64,
}

impl Piece {
    pub fn new(edge: EdgeId, t0: f64, t1: f64) -> Self {
        Self { edge, t0: t0.min(t1), t1: t0.max(t1) }
    }

    pub fn is_degenerate(&self) -> bool {
        self.t0 == self.t1
    }

    fn touches(&self, complex: &DendriteComplex, v: VertexId) -> bool {
        let e = complex.edge(self.edge);
        (e.a == v && self.t0 == 0.0) || (e.b == v && self.t1 == 1.0)
    }
}

/// A closed connected subset of a tree; possibly a single point.
///
/// Canonical form: pieces sorted by edge then `t0`; pieces on one edge disjoint;
/// a degenerate piece only appears when the point is covered by nothing else,
/// and vertex points sit on their lowest incident edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subtree {
    pieces: Vec<Piece>,
}

impl Subtree {
    pub fn point(complex: &DendriteComplex, p: Location) -> Self {
        let p = complex.canonical(p);
        Self { pieces: vec![Piece::new(p.edge, p.t, p.t)] }
    }

    pub fn whole(complex: &DendriteComplex) -> Self {
        Self {
            pieces: (0..complex.n_edges()).map(|i| Piece::new(EdgeId(i), 0.0, 1.0)).collect(),
        }
    }

    /// Canonicalizes raw pieces; `None` when no pieces are given.
    pub fn from_pieces(complex: &DendriteComplex, raw: Vec<Piece>) -> Option<Self> {
        if raw.is_empty() {
            return None;
        }
        let mut by_edge: BTreeMap<EdgeId, Vec<Piece>> = BTreeMap::new();
        for p in raw {
            let p = Piece::new(p.edge, p.t0.clamp(0.0, 1.0), p.t1.clamp(0.0, 1.0));
            by_edge.entry(p.edge).or_default().push(p);
        }
        let mut merged = Vec::new();
        for (_, mut ps) in by_edge {
            ps.sort_by(|a, b| a.t0.total_cmp(&b.t0).then(a.t1.total_cmp(&b.t1)));
            let mut cur = ps[0];
            for p in ps.into_iter().skip(1) {
                if p.t0 <= cur.t1 {
                    cur.t1 = cur.t1.max(p.t1);
                } else {
                    merged.push(cur);
                    cur = p;
                }
            }
            merged.push(cur);
        }
        // Drop degenerate vertex pieces covered elsewhere; move the rest to canonical edges.
        let solid: Vec<Piece> = merged.iter().copied().filter(|p| !p.is_degenerate()).collect();
        let mut out = solid.clone();
        let mut lone_points = Vec::new();
        for p in merged.iter().filter(|p| p.is_degenerate()) {
            let loc = Location::new(p.edge, p.t0);
            let covered = match complex.vertex_of(&loc) {
                Some(v) => solid.iter().any(|s| s.touches(complex, v)),
                None => false,
            };
            if !covered {
                let c = complex.canonical(loc);
                lone_points.push(Piece::new(c.edge, c.t, c.t));
            }
        }
        for lp in lone_points {
            if !out.iter().any(|q| q == &lp) {
                out.push(lp);
            }
        }
        out.sort_by(|a, b| a.edge.cmp(&b.edge).then(a.t0.total_cmp(&b.t0)));
        Some(Self { pieces: out })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_point(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].is_degenerate()
    }

    pub fn covers_vertex(&self, complex: &DendriteComplex, v: VertexId) -> bool {
        self.pieces.iter().any(|p| p.touches(complex, v))
    }

    pub fn contains(&self, complex: &DendriteComplex, p: &Location) -> bool {
        if let Some(v) = complex.vertex_of(p) {
            return self.covers_vertex(complex, v);
        }
        self.pieces.iter().any(|q| q.edge == p.edge && q.t0 <= p.t && p.t <= q.t1)
    }

    /// Total arc length.
    pub fn length(&self, complex: &DendriteComplex) -> f64 {
        self.pieces.iter().map(|p| (p.t1 - p.t0) * complex.edge(p.edge).length).sum()
    }

    /// Connectivity of the union of pieces (pieces meet on an edge or at a vertex).
    pub fn is_connected(&self, complex: &DendriteComplex) -> bool {
        let n = self.pieces.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.pieces[i], self.pieces[j]);
                let meet = if a.edge == b.edge {
                    a.t0 <= b.t1 && b.t0 <= a.t1
                } else {
                    let e = complex.edge(a.edge);
                    [e.a, e.b].into_iter().any(|v| a.touches(complex, v) && b.touches(complex, v))
                };
                if meet {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        (0..n).map(|i| find(&mut parent, i)).collect::<std::collections::BTreeSet<_>>().len() <= 1
    }

    /// Leaves of the subtree: the points whose removal does not disconnect it.
    pub fn extreme_points(&self, complex: &DendriteComplex) -> Vec<Location> {
        if self.is_point() {
            let p = self.pieces[0];
            return vec![Location::new(p.edge, p.t0)];
        }
        let mut out: Vec<Location> = Vec::new();
        for p in &self.pieces {
            let e = complex.edge(p.edge);
            for (t, v) in [(p.t0, e.a), (p.t1, e.b)] {
                let at_vertex = (t == 0.0 && v == e.a) || (t == 1.0 && v == e.b);
                let extreme = if at_vertex {
                    self.pieces.iter().filter(|q| q.touches(complex, v)).count() == 1
                } else {
                    true
                };
                if extreme {
                    let loc = complex.canonical(Location::new(p.edge, t));
                    if !out.contains(&loc) {
                        out.push(loc);
                    }
                }
            }
        }
        out
    }

    /// Sample points: every piece endpoint plus interior points at spacing at most `h`.
    pub fn samples(&self, complex: &DendriteComplex, h: f64) -> Vec<Location> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let len = (p.t1 - p.t0) * complex.edge(p.edge).length;
            let k = (len / h).ceil().max(1.0) as usize;
            for j in 0..=k {
                if p.is_degenerate() && j > 0 {
                    break;
                }
                let t = p.t0 + (p.t1 - p.t0) * j as f64 / k as f64;
                out.push(Location::new(p.edge, t));
            }
        }
        out
    }

    pub fn approx_eq(&self, other: &Subtree, tol: f64) -> bool {
        self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(&other.pieces).all(|(a, b)| {
                a.edge == b.edge && (a.t0 - b.t0).abs() <= tol && (a.t1 - b.t1).abs() <= tol
            })
    }

    /// Union of two subtrees with a common point (per-edge hull).
    pub fn union_connected(&self, complex: &DendriteComplex, other: &Subtree) -> Subtree {
        let mut raw = self.pieces.clone();
        raw.extend_from_slice(&other.pieces);
        hull_per_edge(complex, raw)
    }
}

/// Merges pieces edge-wise into their hull; valid when the union is connected.
pub(crate) fn hull_per_edge(complex: &DendriteComplex, raw: Vec<Piece>) -> Subtree {
    let mut by_edge: BTreeMap<EdgeId, (f64, f64)> = BTreeMap::new();
    for p in raw {
        let ent = by_edge.entry(p.edge).or_insert((p.t0, p.t1));
        ent.0 = ent.0.min(p.t0);
        ent.1 = ent.1.max(p.t1);
    }
    Subtree::from_pieces(complex, by_edge.into_iter().map(|(e, (a, b))| Piece::new(e, a, b)).collect())
        .expect("hull of a nonempty piece list")
}

/// `A ∩ B`; `None` when empty. Asserts connectivity of a nonempty result.
pub fn subtree_intersection(complex: &DendriteComplex, a: &Subtree, b: &Subtree) -> Result<Option<Subtree>> {
    let mut raw = Vec::new();
    for p in &a.pieces {
        for q in b.pieces.iter().filter(|q| q.edge == p.edge) {
            let lo = p.t0.max(q.t0);
            let hi = p.t1.min(q.t1);
            if lo <= hi {
                raw.push(Piece::new(p.edge, lo, hi));
            }
        }
    }
    for v in 0..complex.n_vertices() {
        let v = VertexId(v);
        if a.covers_vertex(complex, v) && b.covers_vertex(complex, v) {
            let loc = complex.vertex_location(v);
            raw.push(Piece::new(loc.edge, loc.t, loc.t));
        }
    }
    match Subtree::from_pieces(complex, raw) {
        None => Ok(None),
        Some(s) if s.is_connected(complex) => Ok(Some(s)),
        Some(_) => Err(Error::Invariant("intersection of subtrees is disconnected".into())),
    }
}

/// The smallest subtree containing all `points`.
pub fn connected_span(complex: &DendriteComplex, points: &[Location]) -> Result<Subtree> {
    let Some(first) = points.first() else {
        return domain("cannot span an empty point set");
    };
    let mut raw = vec![Piece::new(first.edge, first.t, first.t)];
    for p in &points[1..] {
        for step in complex.path(first, p) {
            raw.push(Piece::new(step.edge, step.from, step.to));
        }
    }
    Ok(hull_per_edge(complex, raw))
}

impl Subtree {
    /// The point of the subtree nearest to `p` in the intrinsic metric.
    pub fn nearest_point(&self, complex: &DendriteComplex, p: &Location) -> Location {
        let mut best = (f64::INFINITY, *p);
        for q in &self.pieces {
            let cand = if q.edge == p.edge {
                Location::new(q.edge, p.t.clamp(q.t0, q.t1))
            } else {
                let a = Location::new(q.edge, q.t0);
                let b = Location::new(q.edge, q.t1);
                if complex.geodesic_distance(p, &a) <= complex.geodesic_distance(p, &b) {
                    a
                } else {
                    b
                }
            };
            let d = complex.geodesic_distance(p, &cand);
            if d < best.0 {
                best = (d, cand);
            }
        }
        best.1
    }

    /// Intrinsic distance from `p` to the subtree.
    pub fn geodesic_distance_to(&self, complex: &DendriteComplex, p: &Location) -> f64 {
        if self.contains(complex, p) {
            return 0.0;
        }
        complex.geodesic_distance(p, &self.nearest_point(complex, p))
    }
}

/// Intrinsic Hausdorff distance between subtrees, exact: the distance to a
/// subtree is convex along arcs, so suprema sit at extreme points.
pub fn geodesic_hausdorff(complex: &DendriteComplex, a: &Subtree, b: &Subtree) -> f64 {
    let directed = |x: &Subtree, y: &Subtree| {
        x.extreme_points(complex)
            .iter()
            .map(|p| y.geodesic_distance_to(complex, p))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
