use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shadowlab::anosov::*;
use shadowlab::constructions::*;
use shadowlab::dendrite::*;
use shadowlab::hyperspace::*;
use shadowlab::metric::build_eps_net;
use shadowlab::shadowing::*;
use shadowlab::{hausdorff_distance, FinitePointSet, MetricSpace};

fn x0() -> RationalPoint {
    rational_near([2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0], 1_000_003)
}

fn distances(c: &mut Criterion) {
    let mut g = c.benchmark_group("dist");
    let comb = build_universal_stage(3, 2, 8, 0).unwrap().pop().unwrap().system;
    for (name, sys) in [("5-star", std::sync::Arc::new(make_n_star(5).unwrap())), ("stage-2 comb", comb)] {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pts: Vec<Location> = (0..256).map(|_| sys.random_point(&mut rng)).collect();
        g.bench_function(name, |b| {
            b.iter(|| {
                let mut s = 0.0;
                for w in pts.windows(2) {
                    s += sys.space.dist(&w[0], &w[1]);
                }
                black_box(s)
            })
        });
    }
    g.finish();
}

fn hausdorff(c: &mut Criterion) {
    let sys = make_n_star(5).unwrap();
    let cx = &sys.space.complex;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let span = |rng: &mut ChaCha8Rng| {
        let pts: Vec<Location> = (0..3).map(|_| sys.random_point(rng)).collect();
        connected_span(cx, &pts).unwrap()
    };
    let (a, b) = (span(&mut rng), span(&mut rng));
    let mut g = c.benchmark_group("hausdorff");
    for h in [0.05, 0.01] {
        let sa = FinitePointSet::new(sys.space.id(), a.samples(cx, h), Some(h));
        let sb = FinitePointSet::new(sys.space.id(), b.samples(cx, h), Some(h));
        g.bench_with_input(BenchmarkId::new("sampled", h), &h, |bch, _| {
            bch.iter(|| hausdorff_distance(sys.space.as_ref(), &sa, &sb).unwrap())
        });
    }
    g.bench_function("exact subtrees", |bch| bch.iter(|| geodesic_hausdorff(cx, &a, &b)));
    let t = ToralAutomorphism::cat_map();
    let s = local_stable_continuum(&t, x0(), 0.05).unwrap().image(&t, -6);
    let u = local_unstable_continuum(&t, x0(), 0.05).unwrap().image(&t, 6);
    let (ps, pu) = (s.samples(&t, 1e-3, SAMPLE_CAP).unwrap(), u.samples(&t, 1e-3, SAMPLE_CAP).unwrap());
    g.bench_function("torus segments", |bch| bch.iter(|| sampled_hausdorff(&ps, &pu, 1.0)));
    g.finish();
}

fn point_shadowing(c: &mut Criterion) {
    let sys = make_n_star(3).unwrap();
    let recipe = shadow_recipe(&sys, 0.05, RecipeParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = sys.random_point(&mut rng);
    let po = generate_pseudo_orbit(&sys, &x, recipe.delta, 100, &mut rng).unwrap();
    let net = build_eps_net(sys.space.as_ref(), 0.025).unwrap();
    let mut g = c.benchmark_group("shadow point");
    g.bench_function("recipe", |b| b.iter(|| shadow_recipe(&sys, 0.05, RecipeParams::default()).unwrap()));
    g.bench_function("constructive", |b| b.iter(|| simple_shadow_point(&sys, &recipe, &po).unwrap()));
    g.bench_function("net search", |b| b.iter(|| search_shadow_point(&sys, &po, 0.05, &net).unwrap()));
    g.finish();
}

fn continuum_shadowing(c: &mut Criterion) {
    let sys = make_n_star(5).unwrap();
    let h = HyperShadower::for_simple(&sys, 0.05).unwrap();
    let delta = h.delta_threshold().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pts: Vec<Location> = (0..3).map(|_| sys.random_point(&mut rng)).collect();
    let k0 = connected_span(&sys.space.complex, &pts).unwrap();
    let cpo = generate_continuum_pseudo_orbit(&sys.map, &k0, delta, 30, &mut rng).unwrap();
    let mut g = c.benchmark_group("shadow continuum");
    g.sample_size(10);
    g.bench_function("5-star, 30 steps", |b| b.iter(|| h.shadow(&cpo).unwrap()));
    g.finish();
}

fn refutation(c: &mut Criterion) {
    let t = ToralAutomorphism::cat_map();
    let pair = find_splice(&t, x0(), 0.05, 0.01, 25).unwrap();
    let window = pair.stable.k as i64 + 10;
    let orbit = splice_pseudo_orbit(&t, &pair, 0.01, window).unwrap();
    let spec = FamilySpec::default();
    let family = candidate_family(&t, &spec).unwrap();
    let mut g = c.benchmark_group("cat map");
    g.sample_size(10);
    g.bench_function("find splice", |b| b.iter(|| find_splice(&t, x0(), 0.05, 0.01, 25).unwrap()));
    g.bench_function("refute 10^4 candidates", |b| b.iter(|| refute_shadowing(&t, &orbit, 0.05, &family).unwrap()));
    g.finish();
}

criterion_group!(benches, distances, hausdorff, point_shadowing, continuum_shadowing, refutation);
criterion_main!(benches);
