//! Finite metric trees.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Endpoint at `t = 0`.
    pub a: VertexId,
    /// Endpoint at `t = 1`.
    pub b: VertexId,
    pub length: f64,
}

/// A point of a tree: arc-length fraction `t` along `edge`, measured from `edge.a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub edge: EdgeId,
    pub t: f64,
}

impl Location {
    pub fn new(edge: EdgeId, t: f64) -> Self {
        Self { edge, t }
    }
}

/// One step of a geodesic: traverse `edge` from parameter `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathStep {
    pub edge: EdgeId,
    pub from: f64,
    pub to: f64,
}

const LOG_MAX: usize = 20;

/// A finite tree with positive edge lengths.
#[derive(Debug, Clone)]
pub struct DendriteComplex {
    n_vertices: usize,
    edges: Vec<Edge>,
    /// Distinguished points (p, q, members of D, ...).
    pub labels: BTreeMap<String, Location>,
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
    parent_edge: Vec<Option<EdgeId>>,
    depth: Vec<usize>,
    weighted_depth: Vec<f64>,
    up: Vec<[usize; LOG_MAX]>,
}

impl PartialEq for DendriteComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n_vertices == other.n_vertices && self.edges == other.edges && self.labels == other.labels
    }
}

impl DendriteComplex {
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if n_vertices == 0 {
            return domain("a tree needs at least one vertex");
        }
        if edges.len() + 1 != n_vertices {
            return domain(format!(
                "a tree on {n_vertices} vertices has {} edges, got {}",
                n_vertices - 1,
                edges.len()
            ));
        }
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (i, e) in edges.iter().enumerate() {
            if e.a.0 >= n_vertices || e.b.0 >= n_vertices {
                return domain(format!("edge e{i} references a missing vertex"));
            }
            if e.a == e.b {
                return domain(format!("edge e{i} is a loop"));
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return domain(format!("edge e{i} has non-positive length {}", e.length));
            }
            adjacency[e.a.0].push((EdgeId(i), e.b));
            adjacency[e.b.0].push((EdgeId(i), e.a));
        }
        for adj in &mut adjacency {
            adj.sort();
        }
        let mut parent_edge = vec![None; n_vertices];
        let mut depth = vec![0usize; n_vertices];
        let mut weighted_depth = vec![0.0; n_vertices];
        let mut up = vec![[0usize; LOG_MAX]; n_vertices];
        let mut seen = vec![false; n_vertices];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adjacency[v] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    parent_edge[w.0] = Some(e);
                    depth[w.0] = depth[v] + 1;
                    weighted_depth[w.0] = weighted_depth[v] + edges[e.0].length;
                    up[w.0][0] = v;
                    queue.push_back(w.0);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return domain("graph is not connected");
        }
        for k in 1..LOG_MAX {
            for v in 0..n_vertices {
                up[v][k] = up[up[v][k - 1]][k - 1];
            }
        }
        Ok(Self {
            n_vertices,
            edges,
            labels: BTreeMap::new(),
            adjacency,
            parent_edge,
            depth,
            weighted_depth,
            up,
        })
    }

    /// A path graph with the given edge lengths (vertex `i` joins edges `i-1` and `i`).
    pub fn path_graph(lengths: &[f64]) -> Result<Self> {
        let edges = lengths
            .iter()
            .enumerate()
            .map(|(i, &length)| Edge { a: VertexId(i), b: VertexId(i + 1), length })
            .collect();
        Self::new(lengths.len() + 1, edges)
    }

    /// Star with center vertex 0; edge `i` runs from the center (`t = 0`) to tip `i + 1`.
    pub fn star(arm_lengths: &[f64]) -> Result<Self> {
        let edges = arm_lengths
            .iter()
            .enumerate()
            .map(|(i, &length)| Edge { a: VertexId(0), b: VertexId(i + 1), length })
            .collect();
        Self::new(arm_lengths.len() + 1, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn incident(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn validate(&self, p: &Location) -> Result<()> {
        if p.edge.0 >= self.edges.len() {
            return domain(format!("no edge {}", p.edge));
        }
        if !(0.0..=1.0).contains(&p.t) {
            return domain(format!("edge parameter {} outside [0,1]", p.t));
        }
        Ok(())
    }

    /// The vertex a location sits on, if any.
    pub fn vertex_of(&self, p: &Location) -> Option<VertexId> {
        let e = &self.edges[p.edge.0];
        if p.t == 0.0 {
            Some(e.a)
        } else if p.t == 1.0 {
            Some(e.b)
        } else {
            None
        }
    }

    /// Canonical location of a vertex: the lowest incident edge id wins.
    pub fn vertex_location(&self, v: VertexId) -> Location {
        match self.adjacency[v.0].first() {
            Some(&(e, _)) => Location::new(e, if self.edges[e.0].a == v { 0.0 } else { 1.0 }),
            None => Location::new(EdgeId(0), 0.0),
        }
    }

    /// Sends vertex locations to their canonical representative.
    pub fn canonical(&self, p: Location) -> Location {
        match self.vertex_of(&p) {
            Some(v) if self.n_edges() > 0 => self.vertex_location(v),
            _ => p,
        }
    }

    pub fn same_point(&self, a: &Location, b: &Location) -> bool {
        self.canonical(*a) == self.canonical(*b)
    }

    /// Parameter of vertex `v` on edge `e` (0 or 1). `v` must be an endpoint of `e`.
    pub fn param_of_vertex(&self, e: EdgeId, v: VertexId) -> f64 {
        if self.edges[e.0].a == v {
            0.0
        } else {
            1.0
        }
    }

    fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let diff = self.depth[u] - self.depth[v];
        for k in 0..LOG_MAX {
            if diff >> k & 1 == 1 {
                u = self.up[u][k];
            }
        }
        if u == v {
            return u;
        }
        for k in (0..LOG_MAX).rev() {
            if self.up[u][k] != self.up[v][k] {
                u = self.up[u][k];
                v = self.up[v][k];
            }
        }
        self.up[u][0]
    }

    pub fn vertex_distance(&self, u: VertexId, v: VertexId) -> f64 {
        let w = self.lca(u.0, v.0);
        self.weighted_depth[u.0] + self.weighted_depth[v.0] - 2.0 * self.weighted_depth[w]
    }

    /// Edges on the vertex path from `u` to `v`, in travel order.
    pub fn vertex_path(&self, u: VertexId, v: VertexId) -> Vec<(EdgeId, VertexId, VertexId)> {
        let w = self.lca(u.0, v.0);
        let mut front = Vec::new();
        let mut x = u.0;
        while x != w {
            let e = self.parent_edge[x].expect("non-root vertex has a parent");
            front.push((e, VertexId(x), VertexId(self.up[x][0])));
            x = self.up[x][0];
        }
        let mut back = Vec::new();
        let mut y = v.0;
        while y != w {
            let e = self.parent_edge[y].expect("non-root vertex has a parent");
            back.push((e, VertexId(self.up[y][0]), VertexId(y)));
            y = self.up[y][0];
        }
        back.reverse();
        front.extend(back);
        front
    }

    /// Length of the unique arc between two locations.
    pub fn geodesic_distance(&self, a: &Location, b: &Location) -> f64 {
        if a.edge == b.edge {
            return (a.t - b.t).abs() * self.edges[a.edge.0].length;
        }
        let (ea, eb) = (&self.edges[a.edge.0], &self.edges[b.edge.0]);
        let mut best = f64::INFINITY;
        for (x, ox) in [(ea.a, a.t * ea.length), (ea.b, (1.0 - a.t) * ea.length)] {
            for (y, oy) in [(eb.a, b.t * eb.length), (eb.b, (1.0 - b.t) * eb.length)] {
                best = best.min(ox + self.vertex_distance(x, y) + oy);
            }
        }
        best
    }

    pub fn checked_geodesic_distance(&self, a: &Location, b: &Location) -> Result<f64> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.geodesic_distance(a, b))
    }

    /// The unique arc from `a` to `b` as a sequence of edge traversals.
    pub fn path(&self, a: &Location, b: &Location) -> Vec<PathStep> {
        if a.edge == b.edge {
            return vec![PathStep { edge: a.edge, from: a.t, to: b.t }];
        }
        let (ea, eb) = (&self.edges[a.edge.0], &self.edges[b.edge.0]);
        let mut best = (f64::INFINITY, ea.a, eb.a);
        for (x, ox) in [(ea.a, a.t * ea.length), (ea.b, (1.0 - a.t) * ea.length)] {
            for (y, oy) in [(eb.a, b.t * eb.length), (eb.b, (1.0 - b.t) * eb.length)] {
                let d = ox + self.vertex_distance(x, y) + oy;
                if d < best.0 {
                    best = (d, x, y);
                }
            }
        }
        let (_, x, y) = best;
        let mut steps = vec![PathStep { edge: a.edge, from: a.t, to: self.param_of_vertex(a.edge, x) }];
        for (e, from, to) in self.vertex_path(x, y) {
            steps.push(PathStep {
                edge: e,
                from: self.param_of_vertex(e, from),
                to: self.param_of_vertex(e, to),
            });
        }
        steps.push(PathStep { edge: b.edge, from: self.param_of_vertex(b.edge, y), to: b.t });
        let first = steps[0];
        steps.retain(|s| s.from != s.to);
        if steps.is_empty() {
            steps.push(first);
        }
        steps
    }

    /// Number of components of the complement of `p`.
    pub fn point_order(&self, p: &Location) -> Result<usize> {
        self.validate(p)?;
        Ok(match self.vertex_of(p) {
            Some(v) => self.degree(v),
            None => 2,
        })
    }

    /// All vertices plus interior points on each edge at spacing at most `h`.
    pub fn grid(&self, h: f64) -> Vec<Location> {
        let mut out: Vec<Location> = (0..self.n_vertices).map(|v| self.vertex_location(VertexId(v))).collect();
        for (i, e) in self.edges.iter().enumerate() {
            let k = (e.length / h).ceil().max(1.0) as usize;
            for j in 1..k {
                out.push(Location::new(EdgeId(i), j as f64 / k as f64));
            }
        }
        out
    }

    /// Closed geodesic ball as raw edge intervals (not canonicalized).
    pub fn ball_pieces(&self, center: &Location, r: f64) -> Vec<(EdgeId, f64, f64)> {
        let e0 = &self.edges[center.edge.0];
        let dt = r / e0.length;
        let mut pieces = vec![(center.edge, (center.t - dt).max(0.0), (center.t + dt).min(1.0))];
        let mut stack = Vec::new();
        let to_a = center.t * e0.length;
        let to_b = (1.0 - center.t) * e0.length;
        if to_a <= r {
            stack.push((e0.a, center.edge, r - to_a));
        }
        if to_b <= r {
            stack.push((e0.b, center.edge, r - to_b));
        }
        while let Some((v, came, rem)) = stack.pop() {
            for &(e, w) in &self.adjacency[v.0] {
                if e == came {
                    continue;
                }
                let len = self.edges[e.0].length;
                let reach = (rem / len).min(1.0);
                if self.edges[e.0].a == v {
                    pieces.push((e, 0.0, reach));
                } else {
                    pieces.push((e, 1.0 - reach, 1.0));
                }
                if rem >= len {
                    stack.push((w, e, rem - len));
                }
            }
        }
        pieces
    }

    /// The point at arc length `s` from `from_vertex` along edge `e` (clamped to the edge).
    pub fn point_at_offset(&self, e: EdgeId, from_vertex: VertexId, s: f64) -> Location {
        let edge = &self.edges[e.0];
        let frac = (s / edge.length).clamp(0.0, 1.0);
        if edge.a == from_vertex {
            Location::new(e, frac)
        } else {
            Location::new(e, 1.0 - frac)
        }
    }
}
