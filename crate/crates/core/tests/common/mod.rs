#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use shadowlab::constructions::*;
use shadowlab::dendrite::*;
use shadowlab::{hausdorff_distance, FinitePointSet, MetricSpace};

/// One system per dendrite space kind.
pub fn dendrite_systems() -> Vec<(&'static str, Arc<SimpleSystem>)> {
    let star = make_n_star(3).unwrap();
    let bridge = make_bridge(&make_n_star(3).unwrap(), &make_n_star(3).unwrap(), &make_three_fixed_homeo()).unwrap();
    let comb = build_universal_stage(3, 1, 8, 0).unwrap().pop().unwrap().system;
    vec![
        ("interval", Arc::new(make_square_map())),
        ("star-union", Arc::new(star)),
        ("bridge", Arc::new(bridge)),
        ("comb-product", comb),
    ]
}

pub fn random_subtree(sys: &SimpleSystem, rng: &mut impl Rng) -> Subtree {
    let k = rng.gen_range(1..4);
    let pts: Vec<Location> = (0..k).map(|_| sys.random_point(rng)).collect();
    connected_span(&sys.space.complex, &pts).unwrap()
}

/// Counts failures of the metric axioms on random triples.
pub fn axiom_violations<S: MetricSpace>(
    space: &S,
    same: impl Fn(&S::Point, &S::Point) -> bool,
    mut draw: impl FnMut() -> S::Point,
    triples: usize,
) -> usize {
    let mut bad = 0;
    for _ in 0..triples {
        let (a, b, c) = (draw(), draw(), draw());
        let (ab, ba, bc, ac) = (space.dist(&a, &b), space.dist(&b, &a), space.dist(&b, &c), space.dist(&a, &c));
        let ok = ab >= 0.0
            && ab == ba
            && space.dist(&a, &a) == 0.0
            && (ab > 0.0 || same(&a, &b))
            && ac <= ab + bc + 1e-12;
        bad += usize::from(!ok);
    }
    bad
}

/// `max_a min_b` by nested loops, with no shortcuts.
fn brute_directed<S: MetricSpace>(space: &S, a: &[S::Point], b: &[S::Point]) -> f64 {
    let mut sup = 0.0f64;
    for p in a {
        let mut inf = f64::INFINITY;
        for q in b {
            inf = inf.min(space.dist(p, q));
        }
        sup = sup.max(inf);
    }
    sup
}

/// Compares `hausdorff_distance` on mesh-`h` samples against a brute force
/// on samples four times finer. Returns (disagreements beyond 2h, worst gap).
pub fn hausdorff_disagreements(sys: &SimpleSystem, pairs: usize, h: f64, rng: &mut impl Rng) -> (usize, f64) {
    let space = &sys.space;
    let cx = &space.complex;
    let mut bad = 0;
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let (a, b) = (random_subtree(sys, rng), random_subtree(sys, rng));
        let sa = FinitePointSet::new(space.id(), a.samples(cx, h), Some(h));
        let sb = FinitePointSet::new(space.id(), b.samples(cx, h), Some(h));
        let d = hausdorff_distance(space.as_ref(), &sa, &sb).unwrap();
        let (fa, fb) = (a.samples(cx, h / 4.0), b.samples(cx, h / 4.0));
        let brute = brute_directed(space.as_ref(), &fa, &fb).max(brute_directed(space.as_ref(), &fb, &fa));
        let gap = (d - brute).abs();
        worst = worst.max(gap);
        bad += usize::from(gap > 2.0 * h);
    }
    (bad, worst)
}
