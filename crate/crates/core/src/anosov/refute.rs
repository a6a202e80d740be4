//! The spliced pseudo-orbit of continua that follows `U` backward and `S`
//! forward, and its refutation over a finite family of candidate continua.

use rayon::prelude::*;
use serde::Serialize;

use super::continua::{
    build_global_continuum, sample_spacing, sampled_diameter, sampled_hausdorff, ContinuumKind, DiamBounds,
    GlobalContinuum, TorusContinuum,
};
use super::torus::{rational_near, to_f64, RationalPoint, ToralAutomorphism};
use crate::error::{contract, domain, Error, Result};
use crate::shadowing::Verdict;

/// Largest sample count used for one continuum.
pub const SAMPLE_CAP: usize = 20_000_000;

/// One step of the search for `S`, `U` with `d_H(S, U) < δ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpliceStep {
    pub k: u32,
    pub length: f64,
    /// Sampled distance plus the sampling mesh: an upper bound.
    pub hausdorff: f64,
}

#[derive(Debug, Clone)]
pub struct SplicePair {
    pub stable: GlobalContinuum,
    pub unstable: GlobalContinuum,
    pub hausdorff: f64,
    pub history: Vec<SpliceStep>,
}

/// Certified upper bound on `d_H` of two segments from samples at spacing `h`.
pub fn segment_hausdorff_upper(t: &ToralAutomorphism, a: &TorusContinuum, b: &TorusContinuum, h: f64) -> Result<f64> {
    let too_long = || Error::Domain("continuum needs more samples than the cap".into());
    let sa = a.samples(t, h, SAMPLE_CAP).ok_or_else(too_long)?;
    let sb = b.samples(t, h, SAMPLE_CAP).ok_or_else(too_long)?;
    Ok(sampled_hausdorff(&sa, &sb, 1.0) + h)
}

/// Grows `k` until the stable and unstable continua through `x` are
/// `δ`-close in the Hausdorff metric.
pub fn find_splice(t: &ToralAutomorphism, x: RationalPoint, eps: f64, delta: f64, k_max: u32) -> Result<SplicePair> {
    let h = sample_spacing(eps);
    let mut history = Vec::new();
    for k in 1..=k_max {
        let s = build_global_continuum(t, x, k, eps, ContinuumKind::Stable)?;
        let u = build_global_continuum(t, x, k, eps, ContinuumKind::Unstable)?;
        let d = segment_hausdorff_upper(t, &s.segment, &u.segment, h)?;
        history.push(SpliceStep { k, length: s.length(t), hausdorff: d });
        if d < delta {
            return Ok(SplicePair { stable: s, unstable: u, hausdorff: d, history });
        }
    }
    contract(format!("no k ≤ {k_max} brings d_H(S, U) below {delta}"))
}

/// A two-sided pseudo-orbit of continua `K_{−N} … K_N`.
#[derive(Debug, Clone)]
pub struct SplicedOrbit {
    pub window: i64,
    pub k_n: u32,
    pub eps: f64,
    pub delta: f64,
    /// `continua[i]` is `K_{i−N}`.
    pub continua: Vec<TorusContinuum>,
    /// `jumps[i]` bounds `d_H(f(K_{i−N}), K_{i−N+1})`.
    pub jumps: Vec<f64>,
}

impl SplicedOrbit {
    pub fn at(&self, k: i64) -> &TorusContinuum {
        &self.continua[(k + self.window) as usize]
    }

    pub fn times(&self) -> std::ops::RangeInclusive<i64> {
        -self.window..=self.window
    }
}

fn same_continuum(a: &TorusContinuum, b: &TorusContinuum) -> bool {
    let close = |x: &[f64; 2], y: &[f64; 2]| {
        x.iter().zip(y).all(|(p, q)| (p - q).abs() <= 1e-12 * (1.0 + p.abs().max(q.abs())))
    };
    a.anchor == b.anchor && a.s0 == b.s0 && close(&a.u, &b.u) && close(&a.v, &b.v)
}

/// `K_k = fᵏ(S)` for `k ≥ 0` and `fᵏ(U)` for `k < 0`; the only jump,
/// `d_H(U, S)`, is at `k = 0`.
pub fn splice_pseudo_orbit(t: &ToralAutomorphism, pair: &SplicePair, delta: f64, window: i64) -> Result<SplicedOrbit> {
    if window < 1 {
        return domain("window must be positive");
    }
    if pair.hausdorff >= delta {
        return contract(format!("measured d_H(S, U) = {} is not below {delta}", pair.hausdorff));
    }
    let continua: Vec<TorusContinuum> = (-window..=window)
        .map(|k| if k >= 0 { pair.stable.segment.image(t, k) } else { pair.unstable.segment.image(t, k) })
        .collect();
    let mut jumps = Vec::with_capacity(continua.len() - 1);
    for (i, w) in continua.windows(2).enumerate() {
        let k = i as i64 - window;
        let img = w[0].image(t, 1);
        if k == -1 {
            if !same_continuum(&img, &pair.unstable.segment) {
                return Err(Error::Invariant("f(K_{-1}) is not U".into()));
            }
            jumps.push(pair.hausdorff);
        } else if same_continuum(&img, &w[1]) {
            jumps.push(0.0);
        } else {
            return Err(Error::Invariant(format!("K_{} is not the image of K_{k}", k + 1)));
        }
    }
    Ok(SplicedOrbit { window, k_n: pair.stable.k, eps: pair.stable.eps, delta, continua, jumps })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateFamily {
    Singleton,
    Segment,
    Square,
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub family: CandidateFamily,
    pub continuum: TorusContinuum,
    pub label: String,
}

/// Sizes of the default candidate family.
#[derive(Debug, Clone, Copy)]
pub struct FamilySpec {
    pub singleton_grid: usize,
    pub segment_grid: usize,
    pub uniform_directions: usize,
    pub segment_lengths: &'static [f64],
    pub square_grid: (usize, usize),
    pub square_sides: &'static [f64],
}

impl Default for FamilySpec {
    /// 2500 singletons, 6000 segments, 1500 squares.
    fn default() -> Self {
        Self {
            singleton_grid: 50,
            segment_grid: 10,
            uniform_directions: 10,
            segment_lengths: &[0.05, 0.2, 0.45, 0.7, 2.0],
            square_grid: (15, 20),
            square_sides: &[0.02, 0.1, 0.3, 0.5, 0.7],
        }
    }
}

/// Singletons on a grid; segments over start grid × directions (uniform
/// angles plus both eigendirections) × lengths; filled squares over corner
/// grid × sides.
pub fn candidate_family(t: &ToralAutomorphism, spec: &FamilySpec) -> Result<Vec<Candidate>> {
    let q = |x: f64| rational_near([x, 0.0], 1_000_000)[0];
    let mut out = Vec::new();
    let g = spec.singleton_grid;
    for i in 0..g * g {
        let p = [q((i / g) as f64 / g as f64), q((i % g) as f64 / g as f64)];
        out.push(Candidate {
            family: CandidateFamily::Singleton,
            continuum: TorusContinuum::point(p),
            label: format!("point {:?}", to_f64(&p)),
        });
    }
    let mut dirs: Vec<([f64; 2], String)> = (0..spec.uniform_directions)
        .map(|j| {
            let th = std::f64::consts::PI * j as f64 / spec.uniform_directions as f64;
            ([th.cos(), th.sin()], format!("angle {th:.4}"))
        })
        .collect();
    dirs.push((t.stable(), "stable".into()));
    dirs.push((t.unstable(), "unstable".into()));
    let g = spec.segment_grid;
    for i in 0..g * g {
        let p = [q(((i / g) as f64 + 0.5) / g as f64), q(((i % g) as f64 + 0.5) / g as f64)];
        for (d, name) in &dirs {
            for &len in spec.segment_lengths {
                let continuum = if name == "stable" || name == "unstable" {
                    let which = usize::from(name == "stable");
                    TorusContinuum { s0: 0.0, ..TorusContinuum::eigen_segment(p, which, len) }
                } else {
                    TorusContinuum::segment(t, p, *d, len)?
                };
                out.push(Candidate {
                    family: CandidateFamily::Segment,
                    continuum,
                    label: format!("segment {:?} {name} length {len}", to_f64(&p)),
                });
            }
        }
    }
    let (a, b) = spec.square_grid;
    for i in 0..a * b {
        let p = [q((i / b) as f64 / a as f64), q((i % b) as f64 / b as f64)];
        for &side in spec.square_sides {
            out.push(Candidate {
                family: CandidateFamily::Square,
                continuum: TorusContinuum::square(t, p, side),
                label: format!("square {:?} side {side}", to_f64(&p)),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// `|diam(fᵏC) − diam(K_k)| / 2 ≥ ε` at some `k`.
    Diameter,
    /// Sampled Hausdorff distance minus both meshes `≥ ε`.
    Sampled,
    None,
}

/// One line of the candidate-failure table.
#[derive(Debug, Clone, Serialize)]
pub struct CandidateRow {
    pub index: usize,
    pub family: CandidateFamily,
    pub label: String,
    pub certificate: Certificate,
    pub fail_time: Option<i64>,
    /// Certified lower bound on `d_H(f^{fail_time}(C), K_{fail_time})`.
    pub lower_bound: f64,
    /// `diam(C) > diam(S) − 2ε` not excluded.
    pub meets_time0: bool,
    /// `diam(fᵏC) ≤ diam(K_k) + 2ε` for `k₀ ≤ k ≤ N` not excluded.
    pub meets_forward: bool,
    /// The same for `−N ≤ −k ≤ −k₀`.
    pub meets_backward: bool,
    /// All sampled distances verified below `ε`.
    pub shadows: bool,
}

impl CandidateRow {
    pub fn violates_necessary_condition(&self) -> bool {
        !(self.meets_time0 && self.meets_forward && self.meets_backward)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RefutationReport {
    pub verdict: Verdict,
    pub eps: f64,
    pub delta: f64,
    pub window: i64,
    pub k0: u32,
    pub candidates: usize,
    pub certified_failures: usize,
    pub shadowing_candidates: usize,
    pub necessary_violations: usize,
    /// Lower bound on `diam(S)` used by the time-0 condition.
    pub stable_diameter: f64,
    pub rows: Vec<CandidateRow>,
}

/// Exhaustive check of the family against the spliced pseudo-orbit, with the
/// diameter necessary conditions. `Refuted` means every candidate fails and
/// violates a necessary condition; it is a statement about the family only.
pub fn refute_shadowing(
    t: &ToralAutomorphism,
    orbit: &SplicedOrbit,
    eps: f64,
    family: &[Candidate],
) -> Result<RefutationReport> {
    let h = sample_spacing(eps);
    let times: Vec<i64> = orbit.times().collect();
    let orbit_diams: Vec<DiamBounds> = times.iter().map(|&k| orbit.at(k).diam_bounds(t)).collect();
    let s_samples = orbit.at(0).samples(t, h, SAMPLE_CAP).ok_or_else(|| Error::Domain("S is too long".into()))?;
    let s_diam = sampled_diameter(&s_samples, 2000).max(orbit_diams[orbit.window as usize].lo);
    let k0 = orbit.k_n as i64;

    let rows: Vec<CandidateRow> = family
        .par_iter()
        .enumerate()
        .map(|(index, cand)| {
            let diams: Vec<DiamBounds> =
                times.iter().map(|&k| cand.continuum.shape_image(t, k).diam_bounds(t)).collect();
            let mut best = (0.0f64, None);
            for (i, (c, o)) in diams.iter().zip(&orbit_diams).enumerate() {
                let lb = c.hausdorff_lower(o);
                if lb > best.0 {
                    best = (lb, Some(times[i]));
                }
            }
            let tail = |sign: i64| {
                times.iter().zip(diams.iter().zip(&orbit_diams)).all(|(&k, (c, o))| {
                    sign * k < k0 || c.lo <= o.hi + 2.0 * eps
                })
            };
            let mut row = CandidateRow {
                index,
                family: cand.family,
                label: cand.label.clone(),
                certificate: Certificate::None,
                fail_time: best.1,
                lower_bound: best.0,
                meets_time0: diams[orbit.window as usize].hi > s_diam - 2.0 * eps,
                meets_forward: tail(1),
                meets_backward: tail(-1),
                shadows: false,
            };
            if best.0 >= eps {
                row.certificate = Certificate::Diameter;
                return row;
            }
            // sampled comparison at every time
            let mut all_close = true;
            for (i, &k) in times.iter().enumerate() {
                let c = cand.continuum.image(t, k);
                let (Some(a), Some(b)) = (c.samples(t, h, SAMPLE_CAP / 4), orbit.continua[i].samples(t, h, SAMPLE_CAP / 4))
                else {
                    all_close = false;
                    continue;
                };
                let d = sampled_hausdorff(&a, &b, 1.0);
                if d - h >= eps {
                    row.certificate = Certificate::Sampled;
                    row.fail_time = Some(k);
                    row.lower_bound = d - h;
                    return row;
                }
                all_close &= d + h < eps;
            }
            row.shadows = all_close;
            row
        })
        .collect();

    let certified_failures = rows.iter().filter(|r| r.certificate != Certificate::None).count();
    let shadowing_candidates = rows.iter().filter(|r| r.shadows).count();
    let necessary_violations = rows.iter().filter(|r| r.violates_necessary_condition()).count();
    let verdict = if shadowing_candidates > 0 {
        Verdict::Shadowed
    } else if certified_failures == rows.len() && necessary_violations == rows.len() {
        Verdict::Refuted
    } else {
        Verdict::NotShadowedInFamily
    };
    Ok(RefutationReport {
        verdict,
        eps,
        delta: orbit.delta,
        window: orbit.window,
        k0: orbit.k_n,
        candidates: rows.len(),
        certified_failures,
        shadowing_candidates,
        necessary_violations,
        stable_diameter: s_diam,
        rows,
    })
}
