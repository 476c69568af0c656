//! Integration over straight and pie-shaped triangles.
//!
//! The straight rule is a collapsed (Duffy) tensor Gauss–Legendre rule: `n`
//! points per direction integrate polynomials of total degree `2n - 2`
//! exactly on a triangle. It is not symmetric, which costs a few extra
//! points but needs no embedded tables.
//!
//! A pie triangle `T` is integrated as `T*` plus the lens between chord and
//! arc. The lens is parameterized from the apex,
//!
//! ```text
//! x(t, r) = v1 + r (c(t) - v1),   c(t) = v2 + t (v3 - v2),   1 <= r <= λ(t)
//! ```
//!
//! with Jacobian `r · 2|T*|`. When the arc bulges into `T*` the inner
//! interval is reversed (`λ < 1`) and the contribution is negative, so both
//! cases need no special handling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{cross, orient, Point};
use crate::mesh::{Mesh, PieGeometry};
use crate::tolerances::LENS_TOL;

/// Gauss–Legendre nodes and weights on `[0, 1]` (weights sum to 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        // map [-1, 1] -> [0, 1], ascending
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = 0.5 * wi;
        w[n - 1 - i] = 0.5 * wi;
    }
    (x, w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    /// Barycentric coordinates `(λ1, λ2, λ3)`.
    pub points: Vec<[f64; 3]>,
    /// Normalized to sum to one.
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    /// Collapsed Gauss rule exact for total degree `degree`.
    pub fn triangle(degree: usize) -> Self {
        let n = degree / 2 + 1;
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in x.iter().enumerate() {
                // (s, t) = (u, v(1 - u)) on the reference triangle
                let s = u;
                let t = v * (1.0 - u);
                points.push([1.0 - s - t, s, t]);
                weights.push(2.0 * w[i] * w[j] * (1.0 - u));
            }
        }
        QuadratureRule {
            points,
            weights,
            degree: 2 * n - 2,
        }
    }

    /// Degree 12, enough for products of two sextics.
    pub fn default_rule() -> Self {
        Self::triangle(12)
    }

    pub fn map(&self, tri: &[Point; 3]) -> impl Iterator<Item = (Point, f64)> + '_ {
        let tri = *tri;
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            (tri[0] * l[0] + tri[1] * l[1] + tri[2] * l[2], w)
        })
    }

    /// Largest relative error over monomials `x^a y^b`, `a + b <= degree`,
    /// on the reference triangle, whose exact integrals are `a! b! / (a+b+2)!`.
    pub fn monomial_error(&self) -> f64 {
        let fact = |n: usize| (1..=n).fold(1.0, |a, k| a * k as f64);
        let mut worst: f64 = 0.0;
        for d in 0..=self.degree {
            for b in 0..=d {
                let a = d - b;
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let approx: f64 = self
                    .points
                    .iter()
                    .zip(&self.weights)
                    .map(|(l, w)| 0.5 * w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum();
                worst = worst.max(((approx - exact) / exact).abs());
            }
        }
        worst
    }
}

/// `∫_T f` over a straight triangle.
pub fn quad_straight<F: Fn(&Point) -> f64>(f: F, tri: &[Point; 3], rule: &QuadratureRule) -> f64 {
    let area = 0.5 * orient(&tri[0], &tri[1], &tri[2]).abs();
    area * rule.map(tri).map(|(p, w)| w * f(&p)).sum::<f64>()
}

/// Vector-valued straight quadrature: `f` adds its values into the slice.
pub fn quad_straight_many<F: Fn(&Point, &mut [f64])>(
    f: F,
    m: usize,
    tri: &[Point; 3],
    rule: &QuadratureRule,
) -> Vec<f64> {
    let area = 0.5 * orient(&tri[0], &tri[1], &tri[2]).abs();
    let mut acc = vec![0.0; m];
    let mut buf = vec![0.0; m];
    for (p, w) in rule.map(tri) {
        buf.iter_mut().for_each(|b| *b = 0.0);
        f(&p, &mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += area * w * b;
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvedIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

const LENS_RADIAL_POINTS: usize = 7;
const LENS_MAX_LEVELS: usize = 20;

/// Lens contribution with `panels` Gauss panels in `t`; `None` if some ray
/// misses the conic.
fn lens_sum<F: Fn(&Point, &mut [f64])>(
    f: &F,
    m: usize,
    g: &PieGeometry,
    panels: usize,
    gt: &(Vec<f64>, Vec<f64>),
    gr: &(Vec<f64>, Vec<f64>),
) -> Option<Vec<f64>> {
    let jac = cross(&(g.b1 - g.apex), &(g.b2 - g.b1)).abs();
    let mut acc = vec![0.0; m];
    let mut buf = vec![0.0; m];
    let h = 1.0 / panels as f64;
    for k in 0..panels {
        for (&tx, &tw) in gt.0.iter().zip(&gt.1) {
            let t = (k as f64 + tx) * h;
            let lam = g.ray_factor(t)?;
            let c = g.chord_point(t);
            let len = lam - 1.0;
            for (&rx, &rw) in gr.0.iter().zip(&gr.1) {
                let r = 1.0 + rx * len;
                let p = g.apex + (c - g.apex) * r;
                buf.iter_mut().for_each(|b| *b = 0.0);
                f(&p, &mut buf);
                let wt = h * tw * len * rw * r * jac;
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += wt * b;
                }
            }
        }
    }
    Some(acc)
}

/// Vector-valued integral over a pie triangle. The lens is refined by
/// doubling the number of panels until successive levels agree to
/// `tol · (1 + |value|)` in every component.
pub fn quad_curved_many<F: Fn(&Point, &mut [f64])>(
    f: F,
    m: usize,
    g: &PieGeometry,
    rule: &QuadratureRule,
    tol: f64,
) -> (Vec<f64>, f64, bool) {
    let base = quad_straight_many(&f, m, &g.straight(), rule);
    let gt = gauss_legendre(rule.degree / 2 + 1);
    let gr = gauss_legendre(LENS_RADIAL_POINTS);
    let mut prev = match lens_sum(&f, m, g, 1, &gt, &gr) {
        Some(v) => v,
        None => return (base, f64::INFINITY, false),
    };
    let mut err = f64::INFINITY;
    let mut panels = 1;
    for _ in 1..LENS_MAX_LEVELS {
        panels *= 2;
        let cur = match lens_sum(&f, m, g, panels, &gt, &gr) {
            Some(v) => v,
            None => break,
        };
        err = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = cur
            .iter()
            .zip(&base)
            .map(|(l, b)| (l + b).abs())
            .fold(0.0, f64::max);
        prev = cur;
        if err <= tol * (1.0 + scale) {
            let total = base.iter().zip(&prev).map(|(b, l)| b + l).collect();
            return (total, err, true);
        }
    }
    let total = base.iter().zip(&prev).map(|(b, l)| b + l).collect();
    (total, err, false)
}

/// `∫_T f` over a pie triangle.
pub fn quad_curved<F: Fn(&Point) -> f64>(f: F, g: &PieGeometry, tol: f64) -> CurvedIntegral {
    let rule = QuadratureRule::default_rule();
    let (v, err, converged) = quad_curved_many(|p, out| out[0] = f(p), 1, g, &rule, tol);
    CurvedIntegral {
        value: v[0],
        error_estimate: err,
        converged,
    }
}

/// Sample points filling the pie triangle itself (not `T*`): Gauss points
/// along rays from the apex to the arc.
pub fn pie_points(g: &PieGeometry, n: usize) -> Vec<Point> {
    let (x, _) = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for &t in &x {
        let Some(lam) = g.ray_factor(t) else { continue };
        let c = g.chord_point(t);
        for &s in &x {
            out.push(g.apex + (c - g.apex) * (s * lam));
        }
    }
    out
}

/// Integrates `f` over every triangle of the mesh, in parallel, summing in
/// triangle order so the result does not depend on the thread count.
pub fn integrate_mesh_many<F>(mesh: &Mesh, f: F, m: usize, rule: &QuadratureRule) -> Vec<Vec<f64>>
where
    F: Fn(usize, &Point, &mut [f64]) + Sync,
{
    (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| match mesh.pie_geometry(t) {
            Some(g) => quad_curved_many(|p, o| f(t, p, o), m, &g, rule, LENS_TOL).0,
            None => quad_straight_many(|p, o| f(t, p, o), m, &mesh.triangle_points(t), rule),
        })
        .collect()
}

/// Measure of the meshed domain.
pub fn mesh_measure(mesh: &Mesh) -> f64 {
    let rule = QuadratureRule::default_rule();
    integrate_mesh_many(mesh, |_, _, o| o[0] = 1.0, 1, &rule)
        .iter()
        .map(|v| v[0])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::{Conic, Domain};
    use crate::geometry::pt;
    use crate::mesh::generate_disk_mesh;

    #[test]
    fn gauss_legendre_moments() {
        for n in 1..=10 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((s - 1.0 / (k + 1) as f64).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn default_rule_is_exact_to_degree_12() {
        let r = QuadratureRule::default_rule();
        assert!(r.degree >= 12);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(r.monomial_error() < 1e-13);
    }

    #[test]
    fn straight_examples() {
        let r = QuadratureRule::default_rule();
        let t = [pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)];
        assert!((quad_straight(|_| 1.0, &t, &r) - 0.5).abs() < 1e-15);
        assert!((quad_straight(|p| p.x, &t, &r) - 1.0 / 6.0).abs() < 1e-15);
        // 6! 6! / 14!
        let exact = 720.0 * 720.0 / 87_178_291_200.0;
        let v = quad_straight(|p| p.x.powi(6) * p.y.powi(6), &t, &r);
        assert!(((v - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn disk_measure() {
        let m = generate_disk_mesh(&Domain::unit_disk(), 32).unwrap();
        assert!((mesh_measure(&m) - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn flat_arc_gives_chord_triangle() {
        // y(1 + y) is reducible but vanishes on the chord y = 0 and is
        // positive above it, which is all the lens needs
        let g = PieGeometry {
            apex: pt(0.3, 1.0),
            b1: pt(0.0, 0.0),
            b2: pt(1.0, 0.0),
            conic: Conic::new_unchecked([0.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
        };
        let r = quad_curved(|_| 1.0, &g, 1e-12);
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn inward_lens_is_subtracted() {
        // outside of x² + (y + 0.9)² = 1 above the arc; lens area by polar oracle
        let q = Conic::new([1.0, 0.0, 1.0, 0.0, 1.8, 0.81 - 1.0]).unwrap();
        let y0 = (1.0f64 - 0.09).sqrt() - 0.9;
        let g = PieGeometry {
            apex: pt(0.0, 0.6),
            b1: pt(0.3, y0),
            b2: pt(-0.3, y0),
            conic: q,
        };
        let r = quad_curved(|_| 1.0, &g, 1e-12);
        // circular segment of radius 1 with half-chord 0.3
        let half = 0.3f64.asin();
        let segment = half - 0.3 * (1.0 - 0.09f64).sqrt();
        let tri = 0.5 * 0.6 * (0.6 - y0);
        assert!(r.converged);
        assert!((r.value - (tri - segment)).abs() < 1e-12, "{}", r.value - (tri - segment));
        let pos = quad_curved(|p| q.eval(p), &g, 1e-12);
        assert!(pos.value > 0.0);
    }
}
