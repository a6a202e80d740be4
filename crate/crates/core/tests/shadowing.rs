use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shadowlab::constructions::*;
use shadowlab::dendrite::*;
use shadowlab::metric::build_eps_net;
use shadowlab::shadowing::*;
use shadowlab::Error;

fn loc(t: f64) -> Location {
    Location::new(EdgeId(0), t)
}

fn identity() -> EdgewiseMap {
    EdgewiseMap::identity(Arc::new(DendriteSpace::unit_interval()))
}

#[test]
fn zero_delta_is_the_true_orbit() {
    let s = make_square_map();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let po = generate_pseudo_orbit(&s, &loc(0.9), 0.0, 20, &mut rng).unwrap();
    let mut x = loc(0.9);
    for p in po.points() {
        assert_eq!(*p, x);
        x = s.forward(&x);
    }
    let rep = verify_shadow(&s, &loc(0.9), &po, 1e-9);
    assert!(rep.is_shadowed());
    assert_eq!(rep.max_distance, 0.0);
}

#[test]
fn drift_arithmetic() {
    let id = identity();
    let po = drift_pseudo_orbit(&id, &loc(0.3), 0.01, 200).unwrap();
    for (k, p) in po.points().iter().enumerate() {
        let want = (0.3 + k as f64 * 0.005).min(1.0);
        assert!((p.t - want).abs() < 1e-12);
    }
}

#[test]
fn square_pseudo_orbit_validates() {
    let s = make_square_map();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let po = generate_pseudo_orbit(&s, &loc(0.9), 0.01, 100, &mut rng).unwrap();
    assert_eq!(po.steps(), 100);
    assert!(po.max_jump() < 0.01);
    // re-validation rejects a tighter bound
    assert!(PseudoOrbit::new(&s, po.points().to_vec(), po.max_jump() / 2.0).is_err());
}

#[test]
fn fixed_point_orbit_is_shadowed_by_the_fixed_point() {
    let s = make_square_map();
    let po = PseudoOrbit::new(&s, vec![loc(0.0); 30], 0.01).unwrap();
    assert!(verify_shadow(&s, &loc(0.0), &po, 0.01).is_shadowed());
    let net = build_eps_net(s.space.as_ref(), 0.02).unwrap();
    let rep = search_shadow_point(&s, &po, 0.05, &net).unwrap();
    assert_eq!(rep.witness, Some(loc(0.0)));
}

#[test]
fn drift_is_not_shadowed() {
    let id = identity();
    let po = drift_pseudo_orbit(&id, &loc(0.0), 0.01, 100).unwrap();
    for g in id.space().complex.grid(0.001) {
        let rep = verify_shadow(&id, &g, &po, 0.1);
        assert!(!rep.is_shadowed());
        assert!(rep.max_distance >= 0.25 - 1e-12);
    }
    let net = build_eps_net(id.space().as_ref(), 0.01).unwrap();
    let rep = search_shadow_point(&id, &po, 0.1, &net).unwrap();
    assert_eq!(rep.verdict, Verdict::NotShadowedInFamily);
    assert_eq!(net_lipschitz(&id, &net), 1.0);
}

#[test]
fn net_search_finds_true_orbit() {
    let s = make_square_map();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let po = generate_pseudo_orbit(&s, &loc(0.9), 0.0, 50, &mut rng).unwrap();
    let net = build_eps_net(s.space.as_ref(), 0.025).unwrap();
    let rep = search_shadow_point(&s, &po, 0.05, &net).unwrap();
    assert!(rep.is_shadowed());
    assert!((rep.witness.unwrap().t - 0.9).abs() <= 0.025);
}

#[test]
fn coarse_net_is_rejected() {
    let s = make_square_map();
    let po = PseudoOrbit::new(&s, vec![loc(0.0); 3], 0.01).unwrap();
    let net = build_eps_net(s.space.as_ref(), 0.1).unwrap();
    assert!(matches!(search_shadow_point(&s, &po, 0.05, &net), Err(Error::Contract(_))));
}

#[test]
fn recipe_cases() {
    let s = make_square_map();
    let r = shadow_recipe(&s, 0.05, RecipeParams::default()).unwrap();
    assert!(r.delta > 0.0 && r.delta < r.eta && r.eta < 0.025);
    // entirely inside U_p
    let po = PseudoOrbit::new(&s, vec![loc(0.005), loc(0.005 * 0.005), loc(0.0)], r.delta).unwrap();
    assert_eq!(simple_shadow_point(&s, &r, &po).unwrap().0, s.attractors[0]);
    // entirely inside U_q
    let po = PseudoOrbit::new(&s, vec![loc(1.0); 10], r.delta).unwrap();
    assert_eq!(simple_shadow_point(&s, &r, &po).unwrap().0, s.repellers[0]);
    // from near 1 to near 0
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let po = generate_pseudo_orbit(&s, &loc(1.0 - 1e-3), r.delta, 60, &mut rng).unwrap();
    let (y, rep) = simple_shadow_point(&s, &r, &po).unwrap();
    assert!(rep.is_shadowed());
    assert!(y != s.attractors[0] && y != s.repellers[0]);
    // above the threshold
    let po = generate_pseudo_orbit(&s, &loc(0.5), 10.0 * r.delta, 10, &mut rng).unwrap();
    assert!(matches!(simple_shadow_point(&s, &r, &po), Err(Error::Contract(_))));
}

#[test]
fn recipe_agrees_with_net_oracle() {
    let s = make_n_star(3).unwrap();
    let r = shadow_recipe(&s, 0.05, RecipeParams::default()).unwrap();
    let net = build_eps_net(s.space.as_ref(), 0.025).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let x0 = s.random_point(&mut rng);
        let po = generate_pseudo_orbit(&s, &x0, r.delta, 80, &mut rng).unwrap();
        let (_, rep) = simple_shadow_point(&s, &r, &po).unwrap();
        assert!(rep.is_shadowed());
        assert!(search_shadow_point(&s, &po, 0.05, &net).unwrap().is_shadowed());
    }
}

#[test]
fn modulus_examples() {
    let id = identity();
    let est = estimate_modulus(&id, 0.1, 4, &[0.01, 0.02, 0.05], 100, Generator::Drift, 0).unwrap();
    assert_eq!(est.best_delta, None);
    let s = make_square_map();
    let est = estimate_modulus(&s, 0.05, 50, &[0.0, 1e-3], 100, Generator::Uniform, 0).unwrap();
    assert_eq!(est.rows[0].shadowed, 50);
    assert!(est.best_delta.unwrap() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witnesses_verify_and_eps_is_monotone(t0 in 0.0f64..1.0, seed in 0u64..1000, delta in 0.0f64..0.01) {
        let s = make_square_map();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let po = generate_pseudo_orbit(&s, &loc(t0), delta, 40, &mut rng).unwrap();
        let net = build_eps_net(s.space.as_ref(), 0.025).unwrap();
        let rep = search_shadow_point(&s, &po, 0.05, &net).unwrap();
        if let Some(y) = rep.witness {
            let v = verify_shadow(&s, &y, &po, 0.05);
            prop_assert!(v.is_shadowed());
            prop_assert!(verify_shadow(&s, &y, &po, 0.06).is_shadowed());
            prop_assert_eq!(v.max_distance, rep.max_distance);
        }
    }

    #[test]
    fn true_orbits_shadow_themselves(t0 in 0.0f64..1.0) {
        let s = make_three_fixed_homeo().system("tf").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let po = generate_pseudo_orbit(&s, &loc(t0), 0.0, 30, &mut rng).unwrap();
        prop_assert_eq!(verify_shadow(&s, &loc(t0), &po, 1e-12).max_distance, 0.0);
    }
}
