//! The flat torus `ℝ²/ℤ²` and linear automorphisms of it.

use num_rational::Rational64;
use rand::{Rng, RngCore};

use crate::error::{domain, Result};
use crate::metric::{MetricSpace, SpaceId, SpaceKind};
use crate::shadowing::DynamicalSystem;

/// A torus point with exact rational coordinates in `[0,1)²`.
pub type RationalPoint = [Rational64; 2];

pub fn frac(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

fn frac_q(x: Rational64) -> Rational64 {
    x - x.floor()
}

pub fn to_f64(p: &RationalPoint) -> [f64; 2] {
    p.map(|c| *c.numer() as f64 / *c.denom() as f64)
}

/// The rational point with denominator `denom` nearest to `p`.
pub fn rational_near(p: [f64; 2], denom: i64) -> RationalPoint {
    p.map(|c| frac_q(Rational64::new((frac(c) * denom as f64).round() as i64, denom)))
}

/// Lattice-wrapped difference `b − a`, each coordinate in `[−1/2, 1/2)`.
pub fn wrap_delta(a: &[f64; 2], b: &[f64; 2]) -> [f64; 2] {
    let w = |d: f64| d - (d + 0.5).floor();
    [w(b[0] - a[0]), w(b[1] - a[1])]
}

/// The flat torus with the quotient Euclidean metric.
#[derive(Debug, Clone)]
pub struct Torus {
    id: SpaceId,
}

impl Torus {
    pub fn new() -> Self {
        Self { id: SpaceId::fresh() }
    }
}

impl Default for Torus {
    fn default() -> Self {
        Self::new()
    }
}

impl MetricSpace for Torus {
    type Point = [f64; 2];

    fn id(&self) -> SpaceId {
        self.id
    }

    fn kind(&self) -> SpaceKind {
        SpaceKind::Torus
    }

    fn validate(&self, p: &[f64; 2]) -> Result<()> {
        if p.iter().all(|c| c.is_finite() && (0.0..1.0).contains(c)) {
            Ok(())
        } else {
            domain(format!("{p:?} is not a point of [0,1)²"))
        }
    }

    fn dist(&self, a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let d = wrap_delta(a, b);
        d[0].hypot(d[1])
    }

    fn space_diameter(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    fn eps_net_points(&self, eps: f64) -> Vec<[f64; 2]> {
        let k = (1.0 / (eps * std::f64::consts::SQRT_2)).ceil().max(1.0) as usize;
        (0..k * k).map(|i| [(i / k) as f64 / k as f64, (i % k) as f64 / k as f64]).collect()
    }

    fn sample_ball(&self, center: &[f64; 2], radius: f64, rng: &mut dyn RngCore) -> [f64; 2] {
        let r = radius.min(0.5) * rng.gen::<f64>().sqrt() * (1.0 - 1e-9);
        let th = rng.gen::<f64>() * std::f64::consts::TAU;
        [frac(center[0] + r * th.cos()), frac(center[1] + r * th.sin())]
    }
}

/// `p ↦ M·p mod 1` for an integer matrix with `|det M| = 1` that is
/// diagonalisable over the reals. Vectors are tracked in the eigenbasis,
/// where iteration is a diagonal scaling.
#[derive(Debug, Clone)]
pub struct ToralAutomorphism {
    matrix: [[i64; 2]; 2],
    inverse: [[i64; 2]; 2],
    /// Eigenvalues, largest modulus first.
    lambda: [f64; 2],
    /// Unit eigenvectors matching `lambda`.
    basis: [[f64; 2]; 2],
    space: Torus,
}

impl ToralAutomorphism {
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let det = a * d - b * c;
        if det.abs() != 1 {
            return domain(format!("determinant {det} is not ±1"));
        }
        let inverse = [[d * det, -b * det], [-c * det, a * det]];
        let tr = (a + d) as f64;
        let disc = tr * tr - 4.0 * det as f64;
        let (lambda, basis) = if disc > 0.0 {
            let big = (tr + tr.signum() * disc.sqrt()) / 2.0;
            let small = det as f64 / big;
            let vec_for = |l: f64| {
                let v = if b != 0 {
                    [b as f64, l - a as f64]
                } else if c != 0 {
                    [l - d as f64, c as f64]
                } else if (l - a as f64).abs() < 1e-12 {
                    [1.0, 0.0]
                } else {
                    [0.0, 1.0]
                };
                let n = v[0].hypot(v[1]);
                [v[0] / n, v[1] / n]
            };
            ([big, small], [vec_for(big), vec_for(small)])
        } else if b == 0 && c == 0 && a == d {
            ([a as f64, a as f64], [[1.0, 0.0], [0.0, 1.0]])
        } else {
            return domain("matrix is not diagonalisable over the reals");
        };
        Ok(Self { matrix, inverse, lambda, basis, space: Torus::new() })
    }

    /// `[[2,1],[1,1]]`.
    pub fn cat_map() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("valid")
    }

    pub fn identity() -> Self {
        Self::new([[1, 0], [0, 1]]).expect("valid")
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.matrix
    }

    pub fn torus(&self) -> &Torus {
        &self.space
    }

    /// `(trace, det)`: the characteristic polynomial is `x² − trace·x + det`.
    pub fn characteristic(&self) -> (i64, i64) {
        let [[a, b], [c, d]] = self.matrix;
        (a + d, a * d - b * c)
    }

    pub fn determinant(&self) -> i64 {
        self.characteristic().1
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.lambda
    }

    pub fn eigenvectors(&self) -> [[f64; 2]; 2] {
        self.basis
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.lambda[0].abs() > 1.0 + 1e-12 && self.lambda[1].abs() < 1.0 - 1e-12
    }

    /// `λ_u`.
    pub fn lambda_u(&self) -> f64 {
        self.lambda[0].abs()
    }

    /// `λ_s`.
    pub fn lambda_s(&self) -> f64 {
        self.lambda[1].abs()
    }

    pub fn unstable(&self) -> [f64; 2] {
        self.basis[0]
    }

    pub fn stable(&self) -> [f64; 2] {
        self.basis[1]
    }

    fn mul(m: &[[i64; 2]; 2], p: &[f64; 2]) -> [f64; 2] {
        [
            frac(m[0][0] as f64 * p[0] + m[0][1] as f64 * p[1]),
            frac(m[1][0] as f64 * p[0] + m[1][1] as f64 * p[1]),
        ]
    }

    fn mul_q(m: &[[i64; 2]; 2], p: &RationalPoint) -> RationalPoint {
        let r = |i: usize| frac_q(p[0] * m[i][0] + p[1] * m[i][1]);
        [r(0), r(1)]
    }

    pub fn apply(&self, p: &[f64; 2]) -> [f64; 2] {
        Self::mul(&self.matrix, p)
    }

    pub fn apply_inverse(&self, p: &[f64; 2]) -> [f64; 2] {
        Self::mul(&self.inverse, p)
    }

    /// `M·p mod 1`, exactly.
    pub fn apply_rational(&self, p: &RationalPoint) -> RationalPoint {
        Self::mul_q(&self.matrix, p)
    }

    pub fn apply_rational_inverse(&self, p: &RationalPoint) -> RationalPoint {
        Self::mul_q(&self.inverse, p)
    }

    /// `fᵏ(p)` for any integer `k`, exactly.
    pub fn iterate_rational(&self, p: &RationalPoint, k: i64) -> RationalPoint {
        let mut q = *p;
        for _ in 0..k.unsigned_abs() {
            q = if k > 0 { self.apply_rational(&q) } else { self.apply_rational_inverse(&q) };
        }
        q
    }

    /// Eigen-coordinates of a plane vector.
    pub fn coords(&self, v: [f64; 2]) -> [f64; 2] {
        let [e, f] = self.basis;
        let det = e[0] * f[1] - f[0] * e[1];
        [(v[0] * f[1] - f[0] * v[1]) / det, (e[0] * v[1] - v[0] * e[1]) / det]
    }

    /// The plane vector with eigen-coordinates `c`.
    pub fn vector(&self, c: [f64; 2]) -> [f64; 2] {
        let [e, f] = self.basis;
        [c[0] * e[0] + c[1] * f[0], c[0] * e[1] + c[1] * f[1]]
    }

    /// Eigen-coordinates of `Mᵏ v` given those of `v`.
    pub fn push_coords(&self, c: [f64; 2], k: i32) -> [f64; 2] {
        [c[0] * self.lambda[0].powi(k), c[1] * self.lambda[1].powi(k)]
    }
}

impl DynamicalSystem for ToralAutomorphism {
    type Space = Torus;

    fn space(&self) -> &Torus {
        &self.space
    }

    fn step(&self, p: &[f64; 2]) -> [f64; 2] {
        self.apply(p)
    }

    fn step_back(&self, p: &[f64; 2]) -> Option<[f64; 2]> {
        Some(self.apply_inverse(p))
    }
}
