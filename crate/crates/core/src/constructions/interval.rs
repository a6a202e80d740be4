//! Increasing homeomorphisms of `[0, 1]`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::system::{SimpleSystem, SystemMap};
use crate::dendrite::{DendriteSpace, EdgeId, EdgeProfile, EdgewiseMap, Location};
use crate::error::{domain, Result};

/// Behaviour of a fixed point of an interval homeomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixedKind {
    Attracting,
    Repelling,
    /// Attracting from one side, repelling from the other.
    Semi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalHomeo {
    pub profile: EdgeProfile,
    pub fixed_points: Vec<(f64, FixedKind)>,
}

impl IntervalHomeo {
    pub fn new(profile: EdgeProfile) -> Result<Self> {
        profile.validate()?;
        if !profile.is_injective() {
            return domain("interval homeomorphisms must be injective");
        }
        let fixed = fixed_points(&profile)?;
        let fixed_points = classify(&profile, &fixed);
        Ok(Self { profile, fixed_points })
    }

    /// The same map read in the opposite direction, `t ↦ 1 − h(1 − t)`.
    pub fn reversed(&self) -> Self {
        Self::new(EdgeProfile::Reversed { inner: Box::new(self.profile.clone()) }).expect("reversal preserves validity")
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }

    pub fn inverse(&self, t: f64) -> f64 {
        self.profile.inverse(t).expect("injective profile")
    }

    pub fn kind_at(&self, t: f64) -> Option<FixedKind> {
        self.fixed_points.iter().find(|f| f.0 == t).map(|f| f.1)
    }

    pub fn attractors(&self) -> Vec<f64> {
        self.of_kind(FixedKind::Attracting)
    }

    pub fn repellers(&self) -> Vec<f64> {
        self.of_kind(FixedKind::Repelling)
    }

    fn of_kind(&self, k: FixedKind) -> Vec<f64> {
        self.fixed_points.iter().filter(|f| f.1 == k).map(|f| f.0).collect()
    }

    /// The system on `[0, 1]` with the attracting and repelling fixed points as `P` and `Q`.
    pub fn system(&self, name: &str) -> Result<SimpleSystem> {
        if self.fixed_points.iter().any(|f| f.1 == FixedKind::Semi) {
            return domain("a semi-stable fixed point rules out a simple system");
        }
        let space = Arc::new(DendriteSpace::unit_interval());
        let map = EdgewiseMap::new(space.clone(), vec![self.profile.clone()])?;
        let at = |t: f64| space.complex.canonical(Location::new(EdgeId(0), t));
        let attractors = self.attractors().into_iter().map(at).collect();
        let repellers = self.repellers().into_iter().map(at).collect();
        SimpleSystem::new(name, space, SystemMap::Edgewise(map), attractors, repellers)
    }
}

fn fixed_points(p: &EdgeProfile) -> Result<Vec<f64>> {
    let mut out = vec![0.0];
    match p {
        EdgeProfile::ThreeFixed => out.push(0.5),
        EdgeProfile::Reversed { inner } if **inner == EdgeProfile::ThreeFixed => out.push(0.5),
        EdgeProfile::PiecewiseLinear { knots } => {
            for w in knots.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (ga, gb) = (a.1 - a.0, b.1 - b.0);
                if ga == 0.0 && gb == 0.0 {
                    return domain("piecewise-linear map is the identity on a segment");
                }
                if gb == 0.0 && b.0 < 1.0 {
                    out.push(b.0);
                } else if ga * gb < 0.0 {
                    out.push(a.0 + (b.0 - a.0) * ga / (ga - gb));
                }
            }
        }
        EdgeProfile::Identity => return domain("the identity has a continuum of fixed points"),
        EdgeProfile::Reversed { inner } => {
            let mut inner_fixed = fixed_points(inner)?;
            inner_fixed.retain(|&t| t > 0.0 && t < 1.0);
            out.extend(inner_fixed.into_iter().map(|t| 1.0 - t));
        }
        _ => {}
    }
    out.push(1.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

fn classify(p: &EdgeProfile, fixed: &[f64]) -> Vec<(f64, FixedKind)> {
    // sign of h(x) − x on each gap between consecutive fixed points
    let signs: Vec<f64> = fixed
        .windows(2)
        .map(|w| {
            let m = 0.5 * (w[0] + w[1]);
            (p.eval(m) - m).signum()
        })
        .collect();
    fixed
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            // +1 = orbits on that side approach t, −1 = they leave
            let left = (i > 0).then(|| signs[i - 1]);
            let right = signs.get(i).map(|s| -s);
            let sides: Vec<f64> = left.into_iter().chain(right).collect();
            let kind = if sides.iter().all(|&s| s > 0.0) {
                FixedKind::Attracting
            } else if sides.iter().all(|&s| s < 0.0) {
                FixedKind::Repelling
            } else {
                FixedKind::Semi
            };
            (t, kind)
        })
        .collect()
}

/// `h(x) = x²`: attracting at 0, repelling at 1, inverse `√x`.
pub fn make_square_map() -> SimpleSystem {
    IntervalHomeo::new(EdgeProfile::Square)
        .and_then(|h| h.system("square"))
        .expect("square map is simple")
}

/// `2x²` on `[0, 1/2]`, `1 − 2(1 − x)²` on `[1/2, 1]`. Fixes exactly `0, 1/2, 1`;
/// below the identity on `(0, 1/2)`, above it on `(1/2, 1)`.
pub fn make_three_fixed_homeo() -> IntervalHomeo {
    IntervalHomeo::new(EdgeProfile::ThreeFixed).expect("valid profile")
}
