//! Finite stages of the universal dendrite `Uₙ` as iterated combs.
//!
//! Stage 0 is `[0, 1]` with the three-fixed homeomorphism. Stage `k + 1` is
//! the `(X_k, D_k, n − 2)`-comb, whose branch points (the tooth roots) all
//! have order `n`. `D_{k+1}` lives on the teeth of stage `k + 1`: on the
//! first tooth of every orbit segment, `m` seeds per arm, carried along the
//! segment by the map.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::comb::{make_comb, CombMap};
use super::interval::make_three_fixed_homeo;
use super::system::{is_simple, SimpleReport, SimpleSystem, SystemMap};
use crate::dendrite::{format, DendriteComplex, EdgeId, Location, VertexId};
use crate::error::{domain, Error, Result};
use crate::metric::MetricSpace;

#[derive(Debug, Clone)]
pub struct StageSystem {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub system: Arc<SimpleSystem>,
    /// `D_k` as orbit segments.
    pub d_segments: Vec<Vec<Location>>,
}

impl StageSystem {
    pub fn complex(&self) -> &DendriteComplex {
        &self.system.space.complex
    }

    pub fn d_points(&self) -> impl Iterator<Item = &Location> {
        self.d_segments.iter().flatten()
    }

    /// The bonding map `φ_{k−1}` to the previous stage, for `k ≥ 1`.
    pub fn bonding(&self) -> Option<&CombMap> {
        match &self.system.map {
            SystemMap::Comb(c) => Some(c),
            SystemMap::Edgewise(_) => None,
        }
    }

    pub fn branch_points(&self) -> Vec<Location> {
        let cx = self.complex();
        (0..cx.n_vertices())
            .map(VertexId)
            .filter(|&v| cx.degree(v) >= 3)
            .map(|v| cx.vertex_location(v))
            .collect()
    }
}

/// Numbering of the first tooth added at stage `k ≥ 1`.
pub fn first_tooth_index(k: usize) -> usize {
    1 << (k - 1)
}

/// Stage-0 `D₀`: orbit segments of `0.4` and `0.6` under the three-fixed map.
fn stage0_d(sys: &SimpleSystem, m: usize) -> Vec<Vec<Location>> {
    let lens = [m.div_ceil(2), m / 2];
    let seeds = [0.4, 0.6];
    let mut out = Vec::new();
    for (len, seed) in lens.into_iter().zip(seeds) {
        if len == 0 {
            continue;
        }
        let mut seg = vec![Location::new(EdgeId(0), seed)];
        while seg.len() < len {
            let next = sys.forward(seg.last().unwrap());
            seg.push(next);
        }
        out.push(seg);
    }
    out
}

/// `D_k` for `k ≥ 1`: on the first tooth of each segment, arm parameters
/// `s_j = (j/(m+1))^{1/2^{L−1}}`, so the last orbit point sits at `j/(m+1)`.
fn tooth_d(stage: &SimpleSystem, comb: &CombMap, m: usize) -> Vec<Vec<Location>> {
    let layer = comb.layer();
    let mut out = Vec::new();
    for seg in comb.segments() {
        let first = &layer.teeth[seg[0]];
        let l = seg.len() as i32;
        for &arm_edge in &first.arm_edges {
            for j in 1..=m {
                let s = (j as f64 / (m + 1) as f64).powf(0.5f64.powi(l - 1));
                let mut orbit = vec![Location::new(arm_edge, s)];
                while orbit.len() < seg.len() {
                    let next = stage.forward(orbit.last().unwrap());
                    orbit.push(next);
                }
                out.push(orbit);
            }
        }
    }
    out
}

/// Stages `0..=max_stage` of the universal dendrite of order `n`. The seed is
/// recorded but placement is deterministic.
pub fn build_universal_stage(n: usize, max_stage: usize, m: usize, _seed: u64) -> Result<Vec<StageSystem>> {
    if n < 3 {
        return domain("branch order n must be at least 3");
    }
    if max_stage < 1 {
        return domain("at least one comb stage is required");
    }
    if m < 1 {
        return domain("m must be positive");
    }
    let base = Arc::new(make_three_fixed_homeo().system("stage-0")?);
    let d0 = stage0_d(&base, m);
    let mut stages = vec![StageSystem { k: 0, n, m, system: base, d_segments: d0 }];
    for k in 1..=max_stage {
        let prev = stages.last().unwrap();
        let mut sys = make_comb(prev.system.clone(), &prev.d_segments, n, first_tooth_index(k))?;
        sys.name = format!("stage-{k}");
        let sys = Arc::new(sys);
        let d = match &sys.map {
            SystemMap::Comb(c) => tooth_d(&sys, c, m),
            SystemMap::Edgewise(_) => unreachable!(),
        };
        stages.push(StageSystem { k, n, m, system: sys, d_segments: d });
    }
    Ok(stages)
}

#[derive(Debug, Clone, Serialize)]
pub struct StageCheck {
    pub k: usize,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub n_branch_points: usize,
    pub n_d_points: usize,
    pub branch_orders_ok: bool,
    pub d_orders_ok: bool,
    pub d_orbit_closed: bool,
    /// Largest `d(φ(h_{k}(x)), h_{k−1}(φ(x)))` over the samples (stages `k ≥ 1`).
    pub commutation_defect: f64,
    pub commutation_samples: usize,
    /// Sup over the grid of the distance to the nearest branch point.
    pub density_radius: Option<f64>,
    pub simple: SimpleReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub pass: bool,
    pub commutation_tol: f64,
    pub stages: Vec<StageCheck>,
    pub radii_decreasing: bool,
}

pub struct SuiteParams {
    pub commutation_samples: usize,
    pub commutation_tol: f64,
    pub grid: f64,
    pub simple_samples: usize,
    pub n_max: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            commutation_samples: 10_000,
            commutation_tol: 1e-15,
            grid: 0.01,
            simple_samples: 200,
            n_max: 500,
            tol: 1e-3,
            seed: 0,
        }
    }
}

/// Sup over a grid of spacing `h` of the distance to the nearest branch point.
pub fn density_radius(stage: &StageSystem, h: f64) -> Option<f64> {
    let branch = stage.branch_points();
    if branch.is_empty() {
        return None;
    }
    let space = &stage.system.space;
    let grid = space.complex.grid(h);
    use rayon::prelude::*;
    Some(
        grid.par_iter()
            .map(|g| branch.iter().map(|b| space.dist(g, b)).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max),
    )
}

pub fn check_stage(stage: &StageSystem, params: &SuiteParams) -> StageCheck {
    let cx = stage.complex();
    let n = stage.n;
    let branch = stage.branch_points();
    let branch_orders_ok = (0..cx.n_vertices()).all(|v| {
        let d = cx.degree(VertexId(v));
        d <= 2 || d == n
    });
    let d_orders_ok = stage.d_points().all(|d| cx.point_order(d) == Ok(2));
    let sys = &stage.system;
    let d_orbit_closed = stage
        .d_segments
        .iter()
        .all(|seg| seg.windows(2).all(|w| sys.forward(&w[0]) == w[1]));
    let mut defect = 0.0f64;
    let mut samples = 0;
    if let Some(comb) = stage.bonding() {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ stage.k as u64);
        for _ in 0..params.commutation_samples {
            let x = sys.random_point(&mut rng);
            defect = defect.max(comb.commutation_defect(&x));
        }
        samples = params.commutation_samples;
    }
    StageCheck {
        k: stage.k,
        n_vertices: cx.n_vertices(),
        n_edges: cx.n_edges(),
        n_branch_points: branch.len(),
        n_d_points: stage.d_points().count(),
        branch_orders_ok,
        d_orders_ok,
        d_orbit_closed,
        commutation_defect: defect,
        commutation_samples: samples,
        density_radius: density_radius(stage, params.grid),
        simple: is_simple(sys, params.simple_samples, params.n_max, params.tol, params.seed),
    }
}

pub fn invariant_suite(stages: &[StageSystem], params: &SuiteParams) -> InvariantReport {
    let checks: Vec<StageCheck> = stages.iter().map(|s| check_stage(s, params)).collect();
    let radii: Vec<f64> = checks.iter().filter_map(|c| c.density_radius).collect();
    let radii_decreasing = radii.windows(2).all(|w| w[1] < w[0]);
    let pass = radii_decreasing
        && checks.iter().all(|c| {
            c.branch_orders_ok
                && c.d_orders_ok
                && c.d_orbit_closed
                && c.commutation_defect <= params.commutation_tol
                && c.simple.pass
        });
    InvariantReport { pass, commutation_tol: params.commutation_tol, stages: checks, radii_decreasing }
}

/// Stage file: the complex followed by the builder parameters.
pub fn stage_to_text(stage: &StageSystem, seed: u64) -> String {
    let map = vec![format!("universal n={} k={} m={} seed={}", stage.n, stage.k, stage.m, seed)];
    format::to_text(stage.complex(), &map)
}

/// Rebuilds the stage from its parameters and checks the stored complex matches bit for bit.
pub fn stage_from_text(text: &str) -> Result<StageSystem> {
    let file = format::from_text(text)?;
    let line = file.map.first().ok_or_else(|| Error::Parse { line: 0, msg: "missing map section".into() })?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some("universal") {
        return Err(Error::Parse { line: 0, msg: format!("unknown map description `{line}`") });
    }
    let mut get = |key: &str| -> Result<u64> {
        let tok = toks.next().unwrap_or("");
        tok.strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("expected {key}=<int>") })
    };
    let (n, k, m, seed) = (get("n")?, get("k")?, get("m")?, get("seed")?);
    let stages = build_universal_stage(n as usize, (k as usize).max(1), m as usize, seed)?;
    let stage = stages.into_iter().nth(k as usize).expect("stage exists");
    if *stage.complex() != file.complex {
        return Err(Error::Invariant("stored complex differs from the rebuilt stage".into()));
    }
    Ok(stage)
}
