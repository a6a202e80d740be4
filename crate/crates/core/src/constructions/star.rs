//! Star unions of interval systems glued at a common attracting endpoint.

use std::sync::Arc;

use super::interval::IntervalHomeo;
use super::system::{SimpleSystem, SystemMap};
use crate::dendrite::{DendriteComplex, DendriteSpace, EdgeId, EdgeProfile, EdgewiseMap, Location};
use crate::error::{contract, domain, Result};
use crate::metric::SpaceKind;

/// One arm: an interval system of the given length, glued at `t = 0`.
#[derive(Debug, Clone)]
pub struct Arm {
    pub homeo: IntervalHomeo,
    pub length: f64,
}

pub fn make_star(arms: &[Arm]) -> Result<SimpleSystem> {
    if arms.is_empty() {
        return domain("a star needs at least one arm");
    }
    for (i, a) in arms.iter().enumerate() {
        if !a.homeo.attractors().contains(&0.0) {
            return contract(format!("arm {i}: the glue point is not an attractor of the arm system"));
        }
    }
    let lengths: Vec<f64> = arms.iter().map(|a| a.length).collect();
    let complex = DendriteComplex::star(&lengths)?;
    let space = Arc::new(DendriteSpace::geodesic(SpaceKind::StarUnion, complex));
    let map = EdgewiseMap::new(space.clone(), arms.iter().map(|a| a.homeo.profile.clone()).collect())?;
    let cx = &space.complex;
    let center = cx.vertex_location(crate::dendrite::VertexId(0));
    let mut attractors = vec![center];
    let mut repellers = Vec::new();
    for (i, a) in arms.iter().enumerate() {
        let at = |t: f64| cx.canonical(Location::new(EdgeId(i), t));
        attractors.extend(a.homeo.attractors().into_iter().filter(|&t| t > 0.0).map(at));
        repellers.extend(a.homeo.repellers().into_iter().map(at));
    }
    SimpleSystem::new("star", space, SystemMap::Edgewise(map), attractors, repellers)
}

/// The `n`-star with unit arms, each carrying `x ↦ x²` toward the center.
pub fn make_n_star(n: usize) -> Result<SimpleSystem> {
    let h = IntervalHomeo::new(EdgeProfile::Square)?;
    let arms: Vec<Arm> = (0..n).map(|_| Arm { homeo: h.clone(), length: 1.0 }).collect();
    let mut s = make_star(&arms)?;
    s.name = format!("star-{n}");
    Ok(s)
}

/// The ω-star truncated to `n` arms; arm `k` has diameter `1/k`.
pub fn make_omega_star(n: usize) -> Result<SimpleSystem> {
    let h = IntervalHomeo::new(EdgeProfile::Square)?;
    let arms: Vec<Arm> = (1..=n).map(|k| Arm { homeo: h.clone(), length: 1.0 / k as f64 }).collect();
    let mut s = make_star(&arms)?;
    s.name = format!("omega-star-{n}");
    Ok(s)
}
