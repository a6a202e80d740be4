use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowlab::anosov::*;
use shadowlab::metric::build_eps_net;
use shadowlab::shadowing::{DynamicalSystem, Verdict};
use shadowlab::{diameter, Error, FinitePointSet, MetricSpace};

fn q(x: f64) -> RationalPoint {
    rational_near([x, x], 1_000_000)
}

fn x0() -> RationalPoint {
    rational_near([2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0], 1_000_003)
}

#[test]
fn matrix_action() {
    let t = ToralAutomorphism::cat_map();
    assert_eq!(t.apply(&[0.0, 0.0]), [0.0, 0.0]);
    assert_eq!(t.apply(&[0.5, 0.5]), [0.5, 0.0]);
    let half = Rational64::new(1, 2);
    assert_eq!(t.apply_rational(&[half, half]), [half, Rational64::from_integer(0)]);
    let p = [Rational64::new(3, 7), Rational64::new(5, 11)];
    assert_eq!(t.apply_rational_inverse(&t.apply_rational(&p)), p);
    assert_eq!(t.iterate_rational(&t.iterate_rational(&p, 9), -9), p);
    assert_eq!(t.step_back(&t.step(&[0.25, 0.5])), Some([0.25, 0.5]));
}

#[test]
fn eigenvalues() {
    let t = ToralAutomorphism::cat_map();
    assert!(t.is_hyperbolic());
    assert!((t.lambda_u() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    assert!((t.lambda_u() - 2.618034).abs() < 1e-6);
    // Vieta: the product of the roots of x² − 3x + 1 is the determinant
    assert_eq!(t.characteristic(), (3, 1));
    assert!((t.lambda_u() * t.lambda_s() - 1.0).abs() < 1e-15);
    let m = t.matrix();
    for (l, e) in t.eigenvalues().iter().zip(t.eigenvectors()) {
        let me = [m[0][0] as f64 * e[0] + m[0][1] as f64 * e[1], m[1][0] as f64 * e[0] + m[1][1] as f64 * e[1]];
        assert!((me[0] - l * e[0]).abs() < 1e-14 && (me[1] - l * e[1]).abs() < 1e-14);
    }
    assert!(!ToralAutomorphism::identity().is_hyperbolic());
    assert!(matches!(ToralAutomorphism::new([[2, 0], [0, 1]]), Err(Error::Domain(_))));
    assert!(matches!(ToralAutomorphism::new([[1, 1], [0, 1]]), Err(Error::Domain(_))));
}

#[test]
fn area_is_preserved() {
    let t = ToralAutomorphism::cat_map();
    let sq = TorusContinuum::square(&t, q(0.3), 0.01);
    for k in [-3, 1, 4] {
        let im = sq.shape_image(&t, k);
        let (u, v) = (im.plane_u(&t), im.plane_v(&t));
        assert!(((u[0] * v[1] - u[1] * v[0]).abs() - 1e-4).abs() < 1e-12);
    }
}

#[test]
fn local_stable_continuum_contracts() {
    let t = ToralAutomorphism::cat_map();
    let eps = 0.05;
    let c = local_stable_continuum(&t, x0(), eps).unwrap();
    assert!((c.diam_bounds(&t).hi - eps).abs() < 1e-15);
    let d1 = c.shape_image(&t, 1).diam_bounds(&t).hi;
    assert!((d1 - t.lambda_s() * eps).abs() < 1e-15 && (d1 / eps - 0.381966).abs() < 1e-6);
    let d20 = c.shape_image(&t, 20).diam_bounds(&t).hi;
    assert!((d20 / eps - t.lambda_s().powi(20)).abs() < 1e-20);
    assert!((d20 / eps - 4.370e-9).abs() < 0.001e-9);
    assert!(local_stable_continuum(&t, x0(), 0.0).unwrap().diam_bounds(&t).hi == 0.0);
    assert!(matches!(local_stable_continuum(&t, x0(), 0.3), Err(Error::Contract(_))));
}

#[test]
fn sampled_diameters_follow_the_geometric_law() {
    let t = ToralAutomorphism::cat_map();
    let h = 1e-3;
    for (c, lam) in [
        (local_unstable_continuum(&t, x0(), 0.002).unwrap(), t.lambda_u()),
        (local_stable_continuum(&t, x0(), 0.2).unwrap(), t.lambda_s()),
    ] {
        for k in 0..4 {
            let im = c.image(&t, k);
            let sampled = sampled_diameter(&im.samples(&t, h, 10_000).unwrap(), 10_000);
            let law = c.diam_bounds(&t).hi * lam.powi(k as i32);
            assert!((sampled - law).abs() <= h, "k={k}: {sampled} vs {law}");
        }
    }
    // wrap saturation
    let long = build_global_continuum(&t, x0(), 4, 0.05, ContinuumKind::Stable).unwrap();
    let b = long.segment.diam_bounds(&t);
    assert!(b.lo == 0.5 && b.hi <= std::f64::consts::FRAC_1_SQRT_2);
}

#[test]
fn stable_segment_diameter_sample() {
    let t = ToralAutomorphism::cat_map();
    let c = local_stable_continuum(&t, x0(), 0.04).unwrap();
    let pts = FinitePointSet::new(t.torus().id(), c.samples(&t, 0.01, 100).unwrap(), Some(0.01));
    let d = diameter(t.torus(), &pts).unwrap();
    assert!((d - 0.04).abs() <= 0.02);
}

#[test]
fn global_continua() {
    let t = ToralAutomorphism::cat_map();
    let eps = 0.05;
    let g0 = build_global_continuum(&t, x0(), 0, eps, ContinuumKind::Stable).unwrap();
    assert_eq!(g0.segment, local_stable_continuum(&t, x0(), eps).unwrap());
    let g5 = build_global_continuum(&t, x0(), 5, eps, ContinuumKind::Stable).unwrap();
    assert!((g5.length(&t) / eps - 122.99).abs() < 0.01);
    // length ≥ 40 is 0.05-dense
    let g = build_global_continuum(&t, x0(), 7, eps, ContinuumKind::Unstable).unwrap();
    assert!(g.length(&t) >= 40.0);
    let r = density_radius(&g.segment.samples(&t, 1e-3, 1_000_000).unwrap(), 100);
    assert!(r < 0.05, "{r}");
    // forward images of S contract below ε from k_n on
    for k in 5..12 {
        assert!(g5.segment.shape_image(&t, k).diam_bounds(&t).hi <= eps + 1e-12);
    }
}

#[test]
fn splice_and_refute() {
    let t = ToralAutomorphism::cat_map();
    let (eps, delta) = (0.05, 0.01);
    let pair = find_splice(&t, x0(), eps, delta, 25).unwrap();
    assert!(pair.hausdorff < delta && pair.stable.k <= 25);
    let window = pair.stable.k as i64 + 10;
    let orbit = splice_pseudo_orbit(&t, &pair, delta, window).unwrap();
    let nonzero: Vec<usize> = (0..orbit.jumps.len()).filter(|&i| orbit.jumps[i] != 0.0).collect();
    assert_eq!(nonzero, vec![window as usize - 1]);
    assert_eq!(orbit.jumps[window as usize - 1], pair.hausdorff);
    for k in pair.stable.k as i64..=window {
        assert!(orbit.at(k).diam_bounds(&t).hi <= eps + 1e-12);
        assert!(orbit.at(-k).diam_bounds(&t).hi <= eps + 1e-12);
    }
    assert!(matches!(splice_pseudo_orbit(&t, &pair, pair.hausdorff, window), Err(Error::Contract(_))));

    let family = candidate_family(&t, &FamilySpec::default()).unwrap();
    assert_eq!(family.len(), 10_000);
    let count = |f: CandidateFamily| family.iter().filter(|c| c.family == f).count();
    assert_eq!(
        (count(CandidateFamily::Singleton), count(CandidateFamily::Segment), count(CandidateFamily::Square)),
        (2500, 6000, 1500)
    );
    let rep = refute_shadowing(&t, &orbit, eps, &family).unwrap();
    assert_eq!(rep.verdict, Verdict::Refuted);
    assert_eq!(rep.shadowing_candidates, 0);
    assert!(rep.rows.iter().all(|r| r.violates_necessary_condition()));
    for r in &rep.rows {
        match r.family {
            CandidateFamily::Singleton => {
                assert!(!r.meets_time0);
                assert!(r.lower_bound > eps);
            }
            _ if r.label.contains("stable length 2") && !r.label.contains("unstable") => assert!(!r.meets_backward),
            _ if r.label.contains("unstable length 2") => assert!(!r.meets_forward),
            _ => {}
        }
    }
}

#[test]
fn dichotomy_examples() {
    let t = ToralAutomorphism::cat_map();
    let s = local_stable_continuum(&t, x0(), 0.01).unwrap();
    let rep = diameter_dichotomy_probe(&t, &s, 0.01, 0.1, 40).unwrap();
    assert!(rep.exceeded_at.is_none() && rep.violations.is_empty());
    let u = local_unstable_continuum(&t, x0(), 0.01).unwrap();
    let rep = diameter_dichotomy_probe(&t, &u, 0.01, 0.1, 40).unwrap();
    let k = ((0.1f64 / 0.01).ln() / t.lambda_u().ln()).ceil() as usize;
    assert_eq!(rep.exceeded_at, Some(k));
    assert_eq!(k, 3);
    assert!(rep.violations.is_empty());
    let g = TorusContinuum::segment(&t, x0(), [1.0, 0.3], 0.01).unwrap();
    let rep = diameter_dichotomy_probe(&t, &g, 0.01, 0.1, 40).unwrap();
    assert!(rep.exceeded_at.is_some() && rep.violations.is_empty());
    let big = TorusContinuum::segment(&t, x0(), [1.0, 0.3], 0.02).unwrap();
    assert!(matches!(diameter_dichotomy_probe(&t, &big, 0.01, 0.1, 40), Err(Error::Contract(_))));
}

#[test]
fn random_dichotomy_segments() {
    let t = ToralAutomorphism::cat_map();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let th = rng.gen::<f64>() * std::f64::consts::PI;
        let p = rational_near([rng.gen(), rng.gen()], 1_000_003);
        let c = TorusContinuum::segment(&t, p, [th.cos(), th.sin()], rng.gen::<f64>() * 0.01).unwrap();
        assert!(diameter_dichotomy_probe(&t, &c, 0.01, 0.1, 40).unwrap().violations.is_empty());
    }
}

#[test]
fn transitivity_examples() {
    let t = ToralAutomorphism::cat_map();
    let u = TorusBall { center: [0.1, 0.1], radius: 0.05 };
    let v = TorusBall { center: [0.7, 0.3], radius: 0.05 };
    let hit = transitivity_probe(&t, &u, &v, 20, 10);
    assert!(hit.least.is_some_and(|n| n <= 20));
    let same = transitivity_probe(&t, &u, &u, 20, 10);
    assert_eq!(same.least, Some(0));
    assert!(same.least_positive.is_some_and(|n| n >= 1));
    let id = ToralAutomorphism::identity();
    assert_eq!(transitivity_probe(&id, &u, &v, 20, 10).least, None);
}

#[test]
fn dynamical_balls() {
    let t = ToralAutomorphism::cat_map();
    let x = [0.3123, 0.6517];
    let ball0 = dynamical_ball(&t, x, 0.1, 0, 0.01).unwrap();
    let torus = t.torus();
    let m = (0.1f64 / 0.01) as i64;
    let expected = (-m..=m)
        .flat_map(|i| (-m..=m).map(move |j| (i, j)))
        .filter(|&(i, j)| (i as f64 * 0.01).hypot(j as f64 * 0.01) <= 0.1)
        .count();
    assert_eq!(ball0.len(), expected);
    let ball = dynamical_ball(&t, x, 0.1, 10, 0.001).unwrap();
    assert!(!ball.is_empty());
    assert!(ball.points.iter().all(|y| torus.dist(y, &x) < 1e-3));
    let id = ToralAutomorphism::identity();
    assert_eq!(dynamical_ball(&id, x, 0.1, 10, 0.01).unwrap().len(), expected);
    assert!(matches!(dynamical_ball(&t, x, 0.3, 1, 0.01), Err(Error::Contract(_))));
}

#[test]
fn torus_nets() {
    let t = ToralAutomorphism::cat_map();
    let torus = t.torus();
    let net = build_eps_net(torus, 0.1).unwrap();
    assert!(net.len() <= 121);
    for i in 0..50 {
        for j in 0..50 {
            let p = [i as f64 / 50.0, j as f64 / 50.0];
            assert!(net.points.iter().any(|n| torus.dist(&p, n) <= 0.1));
        }
    }
    assert!((torus.dist(&[0.95, 0.5], &[0.05, 0.5]) - 0.1).abs() < 1e-12);
    assert!(torus.validate(&[1.0, 0.2]).is_err());
}
