mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use shadowlab::anosov::*;
use shadowlab::constructions::*;
use shadowlab::dendrite::*;
use shadowlab::hyperspace::*;
use shadowlab::metric::build_eps_net;
use shadowlab::shadowing::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn x0() -> RationalPoint {
    rational_near([2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0], 1_000_003)
}

fn square_map_modulus() -> Outcome {
    let s = make_square_map();
    let grid = [1e-4, 2e-4, 5e-4, 1e-3, 2e-3];
    let est = estimate_modulus(&s, 0.05, 1000, &grid, 200, Generator::Uniform, 42).unwrap();
    let rows: Vec<String> = est.rows.iter().map(|r| format!("{}:{}/{}", r.delta, r.shadowed, r.trials)).collect();
    let pass = est.best_delta.is_some_and(|d| d >= 1e-4);
    outcome(pass, format!("best δ {:?}, rows {}", est.best_delta, rows.join(" ")))
}

fn simple_shadower() -> Outcome {
    let comb = build_universal_stage(3, 1, 8, 0).unwrap().pop().unwrap().system;
    let systems: Vec<(&str, Arc<SimpleSystem>)> = vec![
        ("square", Arc::new(make_square_map())),
        ("three-fixed", Arc::new(make_three_fixed_homeo().system("three-fixed").unwrap())),
        ("3-star", Arc::new(make_n_star(3).unwrap())),
        (
            "bridge",
            Arc::new(make_bridge(&make_n_star(3).unwrap(), &make_n_star(2).unwrap(), &make_three_fixed_homeo()).unwrap()),
        ),
        ("comb", comb),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, sys) in systems {
        let r = shadow_recipe(&sys, 0.05, RecipeParams::default()).unwrap();
        let results: Vec<(bool, f64)> = (0..500u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(i);
                let x = sys.random_point(&mut rng);
                let po = generate_pseudo_orbit(sys.as_ref(), &x, r.delta, 100, &mut rng).unwrap();
                match simple_shadow_point(&sys, &r, &po) {
                    Ok((y, _)) => {
                        let v = verify_shadow(sys.as_ref(), &y, &po, 0.05);
                        (v.is_shadowed(), v.max_distance)
                    }
                    Err(_) => (false, f64::INFINITY),
                }
            })
            .collect();
        let ok = results.iter().filter(|r| r.0).count();
        let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
        pass &= ok == 500 && worst < 0.05;
        parts.push(format!("{name} {ok}/500 δ={:.2e} max {worst:.4}", r.delta));
    }
    outcome(pass, parts.join("; "))
}

fn hyperspace_run(sys: &SimpleSystem, trials: u64, oracle: bool) -> (bool, String) {
    let eps = 0.05;
    let h = HyperShadower::for_simple(sys, eps).unwrap();
    let delta = h.delta_threshold().unwrap();
    let cx = &sys.space.complex;
    let results: Vec<(bool, bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let k0 = common::random_subtree(sys, &mut rng);
            let cpo = generate_continuum_pseudo_orbit(&sys.map, &k0, delta, 100, &mut rng).unwrap();
            let Ok(s) = h.shadow(&cpo) else { return (false, false, f64::INFINITY) };
            let ok = s.continuum.is_connected(cx) && s.report.is_shadowed() && s.report.max_distance < eps;
            let agree = match (&sys.map, oracle) {
                (SystemMap::Edgewise(m), true) => exhaustive_subtree_oracle(m, &cpo, eps, 0.02).unwrap().is_some(),
                _ => true,
            };
            (ok, agree, s.report.max_distance)
        })
        .collect();
    let ok = results.iter().filter(|r| r.0).count() as u64;
    let agree = results.iter().filter(|r| r.1).count() as u64;
    let worst = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut detail = format!("{ok}/{trials} shadowed (δ={delta:.2e}, max d_H {worst:.4})");
    if oracle {
        detail += &format!(", oracle {agree}/{trials}");
    }
    (ok == trials && agree == trials, detail)
}

fn hyperspace() -> Outcome {
    let star = make_n_star(5).unwrap();
    let (p1, d1) = hyperspace_run(&star, 100, star.space.complex.n_edges() <= 8);
    let stage = build_universal_stage(3, 2, 8, 0).unwrap().pop().unwrap().system;
    let (p2, d2) = hyperspace_run(&stage, 100, stage.space.complex.n_edges() <= 8);
    outcome(p1 && p2, format!("5-star {d1}; stage 2 {d2}"))
}

fn identity_control() -> Outcome {
    let t0 = Instant::now();
    let id = EdgewiseMap::identity(Arc::new(DendriteSpace::unit_interval()));
    let po = drift_pseudo_orbit(&id, &Location::new(EdgeId(0), 0.0), 0.01, 100).unwrap();
    let net = build_eps_net(id.space().as_ref(), 0.01).unwrap();
    let rep = search_shadow_point(&id, &po, 0.1, &net).unwrap();
    let el = t0.elapsed();
    let pass = rep.verdict == Verdict::NotShadowedInFamily && el < Duration::from_secs(5);
    outcome(pass, format!("verdict {:?} over {} net points, {el:.2?}", rep.verdict, net.points.len()))
}

fn anosov_refutation() -> Outcome {
    let t0 = Instant::now();
    let t = ToralAutomorphism::cat_map();
    let (eps, delta) = (0.05, 0.01);
    let pair = find_splice(&t, x0(), eps, delta, 25).unwrap();
    let window = pair.stable.k as i64 + 10;
    let orbit = splice_pseudo_orbit(&t, &pair, delta, window);
    let Ok(orbit) = orbit else { return outcome(false, "splice failed to validate".into()) };
    let family = candidate_family(&t, &FamilySpec::default()).unwrap();
    let rep = refute_shadowing(&t, &orbit, eps, &family).unwrap();
    let el = t0.elapsed();
    let pass = pair.hausdorff < delta
        && pair.stable.k <= 25
        && rep.verdict == Verdict::Refuted
        && rep.shadowing_candidates == 0
        && rep.necessary_violations == rep.candidates
        && el < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "k_n={} d_H≤{:.4}, {:?}, {} candidates, {} certified, {} shadowing, {} violate a necessary condition, {el:.2?}",
            pair.stable.k, pair.hausdorff, rep.verdict, rep.candidates, rep.certified_failures,
            rep.shadowing_candidates, rep.necessary_violations
        ),
    )
}

fn universal_builder() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3, 4] {
        let stages = build_universal_stage(n, 3, 8, 0).unwrap();
        let rep = invariant_suite(&stages, &SuiteParams::default());
        let exact_orders = stages.iter().all(|s| {
            let cx = s.complex();
            s.branch_points().iter().all(|b| cx.point_order(b) == Ok(n))
        });
        let radii: Vec<String> =
            rep.stages.iter().filter_map(|c| c.density_radius).map(|r| format!("{r:.4}")).collect();
        let defect = rep.stages.iter().map(|c| c.commutation_defect).fold(0.0, f64::max);
        pass &= rep.pass && exact_orders && defect <= rep.commutation_tol;
        parts.push(format!("n={n}: suite {}, commutation defect {defect:e} (tol {:e}), radii [{}]", rep.pass, rep.commutation_tol, radii.join(", ")));
    }
    outcome(pass, parts.join("; "))
}

fn metric_correctness() -> Outcome {
    let mut bad = 0;
    let mut parts = Vec::new();
    for (name, sys) in common::dendrite_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cx = sys.space.complex.clone();
        let v = common::axiom_violations(sys.space.as_ref(), |a, b| cx.same_point(a, b), || sys.random_point(&mut rng), 10_000);
        let (h, worst) = common::hausdorff_disagreements(&sys, 1000, 0.05, &mut rng);
        bad += v + h;
        parts.push(format!("{name} {v}+{h} (gap {worst:.4})"));
    }
    let torus = Torus::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v = common::axiom_violations(&torus, |a, b| a == b, || [rng.gen(), rng.gen()], 10_000);
    bad += v;
    parts.push(format!("torus {v}"));
    outcome(bad == 0, format!("violations: {}", parts.join(", ")))
}

fn dichotomy() -> Outcome {
    let t = ToralAutomorphism::cat_map();
    let results: Vec<(usize, bool)> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let th = rng.gen::<f64>() * std::f64::consts::PI;
            let p = rational_near([rng.gen(), rng.gen()], 1_000_003);
            let c = TorusContinuum::segment(&t, p, [th.cos(), th.sin()], rng.gen::<f64>() * 0.01).unwrap();
            let rep = diameter_dichotomy_probe(&t, &c, 0.01, 0.1, 40).unwrap();
            (rep.violations.len(), rep.exceeded_at.is_some())
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let exceeded = results.iter().filter(|r| r.1).count();
    outcome(violations == 0, format!("{violations} violations, {exceeded}/1000 segments exceed ε"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("square-map modulus", square_map_modulus),
        ("simple-system shadower", simple_shadower),
        ("hyperspace shadowing", hyperspace),
        ("identity negative control", identity_control),
        ("cat-map refutation", anosov_refutation),
        ("universal dendrite builder", universal_builder),
        ("metric and Hausdorff", metric_correctness),
        ("diameter dichotomy", dichotomy),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| outcome(false, "panicked".into()));
        let tag = if res.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {tag} {name} [{:.1?}] {}", i + 1, t0.elapsed(), res.detail);
        failed += usize::from(!res.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
