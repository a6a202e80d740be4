use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use shadowlab::anosov::*;
use shadowlab::constructions::universal::stage_from_text;
use shadowlab::constructions::*;
use shadowlab::dendrite::{connected_span, format, DendriteSpace, Location, Subtree};
use shadowlab::hyperspace::*;
use shadowlab::metric::build_eps_net;
use shadowlab::shadowing::*;
use shadowlab::{MetricSpace, SpaceKind};

use crate::config::{Builder, ExperimentConfig, ExperimentKind};
use crate::render::{render_dendrite, render_torus, DendriteScene, TorusScene};
use crate::systems::{self, BuiltSystem};
use crate::{CliError, Context, CODE_VERSION, REPORT_SCHEMA};

type Budgets = BTreeMap<&'static str, f64>;

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema: &'static str,
    version: &'static str,
    kind: &'static str,
    seed: u64,
    config: &'a ExperimentConfig,
    error_budgets: Budgets,
    result: T,
}

/// Files written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Artifacts {
    fn write(&mut self, name: String, contents: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(path.clone(), e))?;
        self.files.push(path);
        Ok(())
    }

    fn report<T: Serialize>(&mut self, cfg: &ExperimentConfig, budgets: Budgets, result: T) -> Result<(), CliError> {
        let kind = cfg.kind()?;
        let report = Report {
            schema: REPORT_SCHEMA,
            version: CODE_VERSION,
            kind: kind.name(),
            seed: cfg.seed(),
            config: cfg,
            error_budgets: budgets,
            result,
        };
        let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
        text.push('\n');
        self.write(format!("{}.json", kind.name()), text.as_bytes())
    }

    fn csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        self.write(format!("{name}.csv"), &bytes)
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Validates, fills in defaults, runs and writes every artifact. The report
/// embeds the filled-in config, so it records every parameter actually used.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Artifacts, CliError> {
    config.validate()?;
    let kind = config.kind()?;
    let dir = config.out_dir();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    let mut cfg = config.clone();
    cfg.output.dir = None;
    cfg.seed = Some(config.seed());
    let svg = *cfg.output.svg.get_or_insert(true);
    let mut out = Artifacts { dir, files: Vec::new() };
    match kind {
        ExperimentKind::Construct => construct(&mut cfg, svg, &mut out)?,
        ExperimentKind::Shadow => shadow(&mut cfg, &mut out)?,
        ExperimentKind::HyperShadow => hyper_shadow(&mut cfg, svg, &mut out)?,
        ExperimentKind::AnosovRefute => anosov_refute(&mut cfg, svg, &mut out)?,
        ExperimentKind::UniversalDendrite => universal(&mut cfg, svg, &mut out)?,
        ExperimentKind::Dichotomy => dichotomy(&mut cfg, &mut out)?,
        ExperimentKind::Transitivity => transitivity(&mut cfg, &mut out)?,
    }
    Ok(out)
}

fn dendrite_system(cfg: &mut ExperimentConfig) -> Result<BuiltSystem, CliError> {
    cfg.system.builder.get_or_insert(Builder::Square);
    systems::build(&cfg.system, cfg.seed())
}

#[derive(Serialize)]
struct ConstructResult {
    system: String,
    space: SpaceKind,
    vertices: usize,
    edges: usize,
    total_length: f64,
    diameter: f64,
    attractors: Vec<Location>,
    repellers: Vec<Location>,
    simple: SimpleReport,
}

fn construct(cfg: &mut ExperimentConfig, svg: bool, out: &mut Artifacts) -> Result<(), CliError> {
    let built = dendrite_system(cfg)?;
    let sys = &built.system;
    let samples = *cfg.params.trials.get_or_insert(200);
    let n_max = *cfg.params.steps.get_or_insert(500);
    let tol = *cfg.params.mesh.get_or_insert(1e-3);
    let cx = &sys.space.complex;
    let result = ConstructResult {
        system: built.description.clone(),
        space: sys.space.kind(),
        vertices: cx.n_vertices(),
        edges: cx.n_edges(),
        total_length: cx.total_length(),
        diameter: sys.space.space_diameter(),
        attractors: sys.attractors.clone(),
        repellers: sys.repellers.clone(),
        simple: is_simple(sys, samples, n_max, tol, cfg.seed()),
    };
    out.write("construct.dendrite".into(), built.to_text(cfg.seed()).as_bytes())?;
    out.report(cfg, Budgets::from([("simple_tolerance", tol)]), result)?;
    if svg {
        let mut scene = DendriteScene::new(&sys.space);
        scene.marks = sys.attractors.iter().chain(&sys.repellers).copied().collect();
        out.write("construct.svg".into(), render_dendrite(&scene).as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ShadowResult {
    system: String,
    recipe: ShadowRecipe,
    delta: f64,
    steps: usize,
    trials: usize,
    shadowed: usize,
    oracle_shadowed: usize,
    max_distance: f64,
}

#[derive(Serialize)]
struct OrbitRow {
    step: usize,
    pseudo_edge: usize,
    pseudo_t: f64,
    shadow_edge: usize,
    shadow_t: f64,
    distance: f64,
}

struct Trial {
    shadowed: bool,
    oracle: bool,
    max_distance: f64,
    rows: Vec<OrbitRow>,
}

fn shadow(cfg: &mut ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let built = dendrite_system(cfg)?;
    let sys = built.system.clone();
    let eps = cfg.eps()?;
    let seed = cfg.seed();
    let steps = *cfg.params.steps.get_or_insert(100);
    let trials = *cfg.params.trials.get_or_insert(100);
    let mesh = *cfg.params.mesh.get_or_insert(eps / 2.0);
    if let Some(grid) = cfg.params.delta_grid.clone() {
        let est = estimate_modulus(sys.as_ref(), eps, trials, &grid, steps, Generator::Uniform, seed)
            .context("estimating the shadowing modulus")?;
        return out.report(cfg, Budgets::from([("net_mesh", eps / 2.0)]), est);
    }
    let recipe = shadow_recipe(&sys, eps, RecipeParams::default()).context("computing the shadowing recipe")?;
    let delta = *cfg.params.delta.get_or_insert(recipe.delta);
    let net = build_eps_net(sys.space.as_ref(), mesh).context("building the oracle net")?;
    let results: Result<Vec<Trial>, CliError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x0 = sys.random_point(&mut rng);
            let po = generate_pseudo_orbit(sys.as_ref(), &x0, delta, steps, &mut rng).context("generating a pseudo-orbit")?;
            let (y, rep) = simple_shadow_point(&sys, &recipe, &po).context("constructing a shadowing point")?;
            let oracle = search_shadow_point(sys.as_ref(), &po, eps, &net).context("searching the net")?;
            let mut rows = Vec::new();
            if i == 0 {
                let mut z = y;
                for (n, (p, d)) in po.points().iter().zip(&rep.distances).enumerate() {
                    rows.push(OrbitRow {
                        step: n,
                        pseudo_edge: p.edge.0,
                        pseudo_t: p.t,
                        shadow_edge: z.edge.0,
                        shadow_t: z.t,
                        distance: *d,
                    });
                    z = sys.forward(&z);
                }
            }
            Ok(Trial { shadowed: rep.is_shadowed(), oracle: oracle.is_shadowed(), max_distance: rep.max_distance, rows })
        })
        .collect();
    let mut results = results?;
    let result = ShadowResult {
        system: built.description.clone(),
        delta,
        steps,
        trials,
        shadowed: results.iter().filter(|t| t.shadowed).count(),
        oracle_shadowed: results.iter().filter(|t| t.oracle).count(),
        max_distance: results.iter().map(|t| t.max_distance).fold(0.0, f64::max),
        recipe: recipe.clone(),
    };
    let budgets = Budgets::from([("oracle_mesh", mesh), ("recipe_grid", recipe.grid)]);
    out.report(cfg, budgets, result)?;
    out.csv("shadow", std::mem::take(&mut results[0].rows))
}

#[derive(Serialize)]
struct HyperResult {
    system: String,
    delta_threshold: f64,
    delta: f64,
    cover_elements: usize,
    steps: usize,
    trials: usize,
    shadowed: usize,
    oracle_agreement: Option<usize>,
    max_distance: f64,
}

fn random_continuum(sys: &SimpleSystem, rng: &mut ChaCha8Rng) -> shadowlab::Result<Subtree> {
    let k = rng.gen_range(1..=3);
    let pts: Vec<Location> = (0..k).map(|_| sys.random_point(rng)).collect();
    connected_span(&sys.space.complex, &pts)
}

fn hyper_shadow(cfg: &mut ExperimentConfig, svg: bool, out: &mut Artifacts) -> Result<(), CliError> {
    let built = dendrite_system(cfg)?;
    let sys = built.system.clone();
    let eps = cfg.eps()?;
    let seed = cfg.seed();
    let steps = *cfg.params.steps.get_or_insert(50);
    let trials = *cfg.params.trials.get_or_insert(20);
    let h = HyperShadower::for_simple(&sys, eps).context("preparing the hyperspace shadower")?;
    let threshold = h.delta_threshold().expect("simple systems carry a threshold");
    let delta = *cfg.params.delta.get_or_insert(threshold);
    let oracle_mesh = match &sys.map {
        SystemMap::Edgewise(m) if sys.space.complex.n_edges() <= 8 => Some((m, *cfg.params.mesh.get_or_insert(0.02))),
        _ => None,
    };
    let results: Result<Vec<(ContinuumShadow, bool)>, CliError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let k0 = random_continuum(&sys, &mut rng).context("sampling a continuum")?;
            let cpo = generate_continuum_pseudo_orbit(&sys.map, &k0, delta, steps, &mut rng)
                .context("generating a continuum pseudo-orbit")?;
            let s = h.shadow(&cpo).context("constructing a shadowing continuum")?;
            let agree = match oracle_mesh {
                Some((m, mesh)) => {
                    exhaustive_subtree_oracle(m, &cpo, eps, mesh).context("running the subtree oracle")?.is_some()
                }
                None => true,
            };
            Ok((s, agree))
        })
        .collect();
    let results = results?;
    let result = HyperResult {
        system: built.description.clone(),
        delta_threshold: threshold,
        delta,
        cover_elements: h.cover.len(),
        steps,
        trials,
        shadowed: results.iter().filter(|(s, _)| s.report.is_shadowed()).count(),
        oracle_agreement: oracle_mesh.map(|_| results.iter().filter(|(_, a)| *a).count()),
        max_distance: results.iter().map(|(s, _)| s.report.max_distance).fold(0.0, f64::max),
    };
    let budgets = Budgets::from([("cover_radius", h.cover.radius), ("lebesgue", h.cover.lebesgue)]);
    out.report(cfg, budgets, result)?;
    if svg {
        let mut scene = DendriteScene::new(&sys.space);
        scene.highlights.push(results[0].0.continuum.clone());
        out.write("hyper-shadow.svg".into(), render_dendrite(&scene).as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RefuteResult {
    base_point: [f64; 2],
    k_n: u32,
    splice_hausdorff: f64,
    splice_history: Vec<SpliceStep>,
    stable_length: f64,
    unstable_length: f64,
    verdict: Verdict,
    window: i64,
    candidates: usize,
    certified_failures: usize,
    shadowing_candidates: usize,
    necessary_violations: usize,
    stable_diameter: f64,
}

fn base_point() -> RationalPoint {
    rational_near([2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0], 1_000_003)
}

fn anosov_refute(cfg: &mut ExperimentConfig, svg: bool, out: &mut Artifacts) -> Result<(), CliError> {
    cfg.system.builder.get_or_insert(Builder::CatMap);
    let t = ToralAutomorphism::cat_map();
    let eps = cfg.eps()?;
    let delta = *cfg.params.delta.get_or_insert(0.01);
    let k_max = *cfg.params.k_max.get_or_insert(25);
    let extra = *cfg.params.steps.get_or_insert(10);
    let x = base_point();
    let pair = find_splice(&t, x, eps, delta, k_max).context("growing the stable and unstable continua")?;
    let window = pair.stable.k as i64 + extra as i64;
    let orbit = splice_pseudo_orbit(&t, &pair, delta, window).context("splicing the pseudo-orbit")?;
    let family = candidate_family(&t, &FamilySpec::default()).context("building the candidate family")?;
    let rep = refute_shadowing(&t, &orbit, eps, &family).context("checking the candidates")?;
    let h = sample_spacing(eps);
    let result = RefuteResult {
        base_point: to_f64(&x),
        k_n: pair.stable.k,
        splice_hausdorff: pair.hausdorff,
        splice_history: pair.history.clone(),
        stable_length: pair.stable.length(&t),
        unstable_length: pair.unstable.length(&t),
        verdict: rep.verdict,
        window: rep.window,
        candidates: rep.candidates,
        certified_failures: rep.certified_failures,
        shadowing_candidates: rep.shadowing_candidates,
        necessary_violations: rep.necessary_violations,
        stable_diameter: rep.stable_diameter,
    };
    out.report(cfg, Budgets::from([("sample_spacing", h), ("splice_hausdorff_upper", pair.hausdorff)]), result)?;
    out.csv("anosov-refute", rep.rows.iter())?;
    if svg {
        // straight segments: a coarse spacing still hits every wrap
        let h = h.max(0.01);
        let scene = TorusScene {
            strokes: vec![
                ("stable".into(), pair.stable.segment.polylines(&t, h, SAMPLE_CAP).context("sampling S")?),
                ("unstable".into(), pair.unstable.segment.polylines(&t, h, SAMPLE_CAP).context("sampling U")?),
            ],
            points: vec![to_f64(&x)],
        };
        out.write("anosov-refute.svg".into(), render_torus(&scene).as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct UniversalResult {
    system: String,
    pass: bool,
    suite: InvariantReport,
}

fn universal(cfg: &mut ExperimentConfig, svg: bool, out: &mut Artifacts) -> Result<(), CliError> {
    match cfg.system.builder {
        None | Some(Builder::Universal) => cfg.system.builder = Some(Builder::Universal),
        Some(b) => return Err(CliError::Validation(format!("`universal-dendrite` cannot use builder `{b:?}`"))),
    }
    cfg.system.n.get_or_insert(3);
    cfg.system.k.get_or_insert(2);
    cfg.system.m.get_or_insert(8);
    let built = systems::build(&cfg.system, cfg.seed())?;
    let params = SuiteParams {
        simple_samples: *cfg.params.trials.get_or_insert(200),
        n_max: *cfg.params.steps.get_or_insert(500),
        tol: *cfg.params.mesh.get_or_insert(1e-3),
        seed: cfg.seed(),
        ..Default::default()
    };
    let suite = invariant_suite(&built.stages, &params);
    out.write("universal-dendrite.dendrite".into(), built.to_text(cfg.seed()).as_bytes())?;
    let budgets = Budgets::from([("commutation_tol", params.commutation_tol), ("simple_tolerance", params.tol)]);
    out.report(cfg, budgets, UniversalResult { system: built.description.clone(), pass: suite.pass, suite })?;
    if svg {
        let sys = &built.system;
        let mut scene = DendriteScene::new(&sys.space);
        scene.marks = built.stage().expect("universal stages").branch_points();
        out.write("universal-dendrite.svg".into(), render_dendrite(&scene).as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct DichotomyRow {
    index: usize,
    length: f64,
    angle: f64,
    exceeded_at: Option<usize>,
    violations: usize,
}

#[derive(Serialize)]
struct DichotomyResult {
    trials: usize,
    steps: usize,
    exceeded: usize,
    violations: usize,
}

fn dichotomy(cfg: &mut ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    cfg.system.builder.get_or_insert(Builder::CatMap);
    let t = ToralAutomorphism::cat_map();
    let eps = cfg.eps()?;
    let seed = cfg.seed();
    let delta = *cfg.params.delta.get_or_insert(0.01);
    let steps = *cfg.params.steps.get_or_insert(40);
    let trials = *cfg.params.trials.get_or_insert(1000);
    let rows: Result<Vec<DichotomyRow>, CliError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let angle = rng.gen::<f64>() * std::f64::consts::PI;
            let length = rng.gen::<f64>() * delta;
            let p = rational_near([rng.gen(), rng.gen()], 1_000_003);
            let c = TorusContinuum::segment(&t, p, [angle.cos(), angle.sin()], length).context("building a segment")?;
            let rep = diameter_dichotomy_probe(&t, &c, delta, eps, steps).context("running the probe")?;
            Ok(DichotomyRow { index: i, length, angle, exceeded_at: rep.exceeded_at, violations: rep.violations.len() })
        })
        .collect();
    let rows = rows?;
    let result = DichotomyResult {
        trials,
        steps,
        exceeded: rows.iter().filter(|r| r.exceeded_at.is_some()).count(),
        violations: rows.iter().map(|r| r.violations).sum(),
    };
    out.report(cfg, Budgets::from([("diameter", 0.0)]), result)?;
    out.csv("dichotomy", rows)
}

#[derive(Serialize)]
struct TransitivityRow {
    index: usize,
    u_x: f64,
    u_y: f64,
    v_x: f64,
    v_y: f64,
    least: Option<usize>,
    least_positive: Option<usize>,
}

#[derive(Serialize)]
struct TransitivityResult {
    radius: f64,
    max_n: usize,
    pairs: usize,
    hits: usize,
    worst_least_positive: Option<usize>,
}

fn transitivity(cfg: &mut ExperimentConfig, out: &mut Artifacts) -> Result<(), CliError> {
    cfg.system.builder.get_or_insert(Builder::CatMap);
    let t = ToralAutomorphism::cat_map();
    let radius = cfg.eps()?;
    let seed = cfg.seed();
    let max_n = *cfg.params.steps.get_or_insert(50);
    let pairs = *cfg.params.trials.get_or_insert(20);
    let rows: Vec<TransitivityRow> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let u = TorusBall { center: [rng.gen(), rng.gen()], radius };
            let v = TorusBall { center: [rng.gen(), rng.gen()], radius };
            let hit = transitivity_probe(&t, &u, &v, max_n, 8);
            let ([u_x, u_y], [v_x, v_y]) = (u.center, v.center);
            TransitivityRow { index: i, u_x, u_y, v_x, v_y, least: hit.least, least_positive: hit.least_positive }
        })
        .collect();
    let hits: Vec<usize> = rows.iter().filter_map(|r| r.least_positive).collect();
    let result = TransitivityResult {
        radius,
        max_n,
        pairs,
        hits: hits.len(),
        worst_least_positive: hits.iter().copied().max(),
    };
    out.report(cfg, Budgets::from([("ball_sampling", radius / 8.0)]), result)?;
    out.csv("transitivity", rows)
}

/// Renders a dendrite file. Builder descriptions in the map section are
/// rebuilt so comb teeth can be drawn as groups.
pub fn render_file(input: &Path) -> Result<String, CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Io(input.to_path_buf(), e))?;
    let file = format::from_text(&text).context("parsing the dendrite file")?;
    let head = file.map.first().map(String::as_str).unwrap_or("");
    let space = if head.starts_with("universal") {
        let stage = stage_from_text(&text).context("rebuilding the stage")?;
        stage.system.space.clone()
    } else {
        let kind = if (0..file.complex.n_vertices()).any(|v| file.complex.degree(shadowlab::dendrite::VertexId(v)) > 2) {
            SpaceKind::StarUnion
        } else {
            SpaceKind::Interval
        };
        std::sync::Arc::new(DendriteSpace::geodesic(kind, file.complex))
    };
    Ok(render_dendrite(&DendriteScene::new(&space)))
}
