//! Two systems joined by a unit segment between their glue points.

use std::sync::Arc;

use super::interval::{FixedKind, IntervalHomeo};
use super::system::{SimpleSystem, SystemMap};
use crate::dendrite::{DendriteComplex, DendriteSpace, Edge, EdgeId, EdgewiseMap, Location, VertexId};
use crate::error::{contract, Result};
use crate::metric::SpaceKind;

fn edgewise(sys: &SimpleSystem) -> Result<&EdgewiseMap> {
    match &sys.map {
        SystemMap::Edgewise(m) => Ok(m),
        SystemMap::Comb(_) => contract("bridges are built from edgewise systems"),
    }
}

fn glue_vertex(sys: &SimpleSystem) -> Result<VertexId> {
    match sys.attractors.first().and_then(|p| sys.space.complex.vertex_of(p)) {
        Some(v) => Ok(v),
        None => contract(format!("{}: the glue point must be a vertex", sys.name)),
    }
}

/// `X₁ ∪ [p₁, p₂] ∪ X₂`, glued at the first attractor of each system, with
/// `bridge` acting on the segment oriented from `p₁` to `p₂`.
pub fn make_bridge(sys1: &SimpleSystem, sys2: &SimpleSystem, bridge: &IntervalHomeo) -> Result<SimpleSystem> {
    if bridge.eval(0.0) != 0.0 || bridge.eval(1.0) != 1.0 {
        return contract("the bridge map must fix both endpoints");
    }
    if bridge.kind_at(0.0) != Some(FixedKind::Attracting) || bridge.kind_at(1.0) != Some(FixedKind::Attracting) {
        return contract("the bridge endpoints must be attracting");
    }
    let (m1, m2) = (edgewise(sys1)?, edgewise(sys2)?);
    let (c1, c2) = (&sys1.space.complex, &sys2.space.complex);
    let (v1, v2) = (glue_vertex(sys1)?, glue_vertex(sys2)?);
    let (nv1, ne1) = (c1.n_vertices(), c1.n_edges());
    let mut edges: Vec<Edge> = c1.edges().to_vec();
    edges.extend(c2.edges().iter().map(|e| Edge {
        a: VertexId(e.a.0 + nv1),
        b: VertexId(e.b.0 + nv1),
        length: e.length,
    }));
    edges.push(Edge { a: v1, b: VertexId(v2.0 + nv1), length: 1.0 });
    let complex = DendriteComplex::new(nv1 + c2.n_vertices(), edges)?;
    let bridge_edge = EdgeId(complex.n_edges() - 1);
    let space = Arc::new(DendriteSpace::geodesic(SpaceKind::Bridge, complex));
    let mut profiles = m1.profiles().to_vec();
    profiles.extend(m2.profiles().iter().cloned());
    profiles.push(bridge.profile.clone());
    let map = EdgewiseMap::new(space.clone(), profiles)?;

    let cx = &space.complex;
    let from1 = |p: &Location| cx.canonical(*p);
    let from2 = |p: &Location| cx.canonical(Location::new(EdgeId(p.edge.0 + ne1), p.t));
    let mut attractors: Vec<Location> = sys1.attractors.iter().map(from1).collect();
    attractors.extend(sys2.attractors.iter().map(from2));
    let mut repellers: Vec<Location> = sys1.repellers.iter().map(from1).collect();
    repellers.extend(sys2.repellers.iter().map(from2));
    repellers.extend(bridge.repellers().into_iter().map(|t| Location::new(bridge_edge, t)));
    SimpleSystem::new("bridge", space, SystemMap::Edgewise(map), attractors, repellers)
}
