mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowlab::anosov::Torus;
use shadowlab::dendrite::geodesic_hausdorff;
use shadowlab::metric::build_eps_net;
use shadowlab::{diameter, directed_hausdorff, hausdorff_distance, Error, FinitePointSet, MetricSpace, SpaceKind};

#[test]
fn axioms_hold_on_every_dendrite_kind() {
    for (name, sys) in common::dendrite_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cx = sys.space.complex.clone();
        let bad = common::axiom_violations(sys.space.as_ref(), |a, b| cx.same_point(a, b), || sys.random_point(&mut rng), 2000);
        assert_eq!(bad, 0, "{name}");
    }
}

#[test]
fn axioms_hold_on_the_torus() {
    let torus = Torus::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    assert_eq!(common::axiom_violations(&torus, |a, b| a == b, || [rng.gen(), rng.gen()], 2000), 0);
}

#[test]
fn space_kinds() {
    let kinds: Vec<SpaceKind> = common::dendrite_systems().iter().map(|(_, s)| s.space.kind()).collect();
    assert_eq!(kinds, vec![SpaceKind::Interval, SpaceKind::StarUnion, SpaceKind::Bridge, SpaceKind::CombProduct]);
}

#[test]
fn hausdorff_matches_brute_force() {
    for (name, sys) in common::dendrite_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (bad, worst) = common::hausdorff_disagreements(&sys, 60, 0.05, &mut rng);
        assert_eq!(bad, 0, "{name}: worst gap {worst}");
    }
}

#[test]
fn sampled_hausdorff_brackets_the_exact_value() {
    let systems = common::dendrite_systems();
    let sys = &systems[2].1;
    let cx = &sys.space.complex;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 0.02;
    for _ in 0..100 {
        let (a, b) = (common::random_subtree(sys, &mut rng), common::random_subtree(sys, &mut rng));
        let exact = geodesic_hausdorff(cx, &a, &b);
        let sa = FinitePointSet::new(sys.space.id(), a.samples(cx, h), Some(h));
        let sb = FinitePointSet::new(sys.space.id(), b.samples(cx, h), Some(h));
        let d = hausdorff_distance(sys.space.as_ref(), &sa, &sb).unwrap();
        assert!((d - exact).abs() <= 2.0 * h);
    }
}

#[test]
fn finite_set_errors() {
    let systems = common::dendrite_systems();
    let (s1, s2) = (&systems[0].1, &systems[1].1);
    let p = s1.random_point(&mut ChaCha8Rng::seed_from_u64(0));
    let a = FinitePointSet::new(s1.space.id(), vec![p], None);
    let foreign = FinitePointSet::new(s2.space.id(), vec![p], None);
    let empty = FinitePointSet::new(s1.space.id(), vec![], None);
    assert!(matches!(hausdorff_distance(s1.space.as_ref(), &a, &foreign), Err(Error::Domain(_))));
    assert!(matches!(diameter(s1.space.as_ref(), &empty), Err(Error::Domain(_))));
    assert_eq!(diameter(s1.space.as_ref(), &a).unwrap(), 0.0);
    assert_eq!(directed_hausdorff(s1.space.as_ref(), &a.points, &a.points), 0.0);
    assert!(matches!(build_eps_net(s1.space.as_ref(), 0.0), Err(Error::Domain(_))));
}

proptest! {
    #[test]
    fn torus_triangle_inequality(a in (0.0f64..1.0, 0.0f64..1.0), b in (0.0f64..1.0, 0.0f64..1.0), c in (0.0f64..1.0, 0.0f64..1.0)) {
        let t = Torus::new();
        let (a, b, c) = ([a.0, a.1], [b.0, b.1], [c.0, c.1]);
        prop_assert!(t.dist(&a, &c) <= t.dist(&a, &b) + t.dist(&b, &c) + 1e-12);
        prop_assert!(t.dist(&a, &b) <= t.space_diameter() + 1e-12);
    }

    #[test]
    fn torus_nets_cover(eps in 0.02f64..0.3, p in (0.0f64..1.0, 0.0f64..1.0)) {
        let t = Torus::new();
        let net = build_eps_net(&t, eps).unwrap();
        let p = [p.0, p.1];
        prop_assert!(net.points.iter().any(|q| t.dist(&p, q) <= eps));
    }
}

