//! Boundary conics `q(x, y) = ax² + bxy + cy² + dx + ey + f` and the arcs
//! they carry.
//!
//! After [`Conic::normalize`] a conic is positive on the domain side of its
//! arcs and its gradient (over the supplied samples) and constant Hessian
//! have 2-norm at most one.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{perp, Point, Vec2};
use crate::poly::Poly2;
use crate::tolerances::ARC_ENDPOINT_ABS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Conic {
    coeffs: [f64; 6],
}

impl Conic {
    /// Builds an irreducible conic; rejects a vanishing quadratic part and
    /// a singular 3×3 conic matrix (a product of two lines).
    pub fn new(coeffs: [f64; 6]) -> Result<Self> {
        let [a, b, c, ..] = coeffs;
        if a == 0.0 && b == 0.0 && c == 0.0 {
            return Err(Error::DegenerateConic(
                "quadratic part vanishes".to_string(),
            ));
        }
        let q = Conic { coeffs };
        let m = q.matrix();
        let scale = coeffs.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        if m.determinant().abs() <= 1e-12 * scale.powi(3) {
            return Err(Error::DegenerateConic(format!(
                "{coeffs:?} factors into linear polynomials"
            )));
        }
        Ok(q)
    }

    /// Skips the irreducibility check; for synthetic tests only.
    pub fn new_unchecked(coeffs: [f64; 6]) -> Self {
        Conic { coeffs }
    }

    /// The unit circle `1 - x² - y²`.
    pub fn unit_circle() -> Self {
        Conic {
            coeffs: [-1.0, 0.0, -1.0, 0.0, 0.0, 1.0],
        }
    }

    /// Axis-aligned ellipse `1 - (x-cx)²/rx² - (y-cy)²/ry²`.
    pub fn ellipse(cx: f64, cy: f64, rx: f64, ry: f64) -> Result<Self> {
        let a = -1.0 / (rx * rx);
        let c = -1.0 / (ry * ry);
        Conic::new([
            a,
            0.0,
            c,
            -2.0 * a * cx,
            -2.0 * c * cy,
            1.0 + a * cx * cx + c * cy * cy,
        ])
    }

    pub fn coeffs(&self) -> [f64; 6] {
        self.coeffs
    }

    fn matrix(&self) -> Matrix3<f64> {
        let [a, b, c, d, e, f] = self.coeffs;
        Matrix3::new(
            a,
            b / 2.0,
            d / 2.0,
            b / 2.0,
            c,
            e / 2.0,
            d / 2.0,
            e / 2.0,
            f,
        )
    }

    pub fn eval(&self, p: &Point) -> f64 {
        let [a, b, c, d, e, f] = self.coeffs;
        let (x, y) = (p.x, p.y);
        (a * x + b * y + d) * x + (c * y + e) * y + f
    }

    pub fn gradient(&self, p: &Point) -> Vec2 {
        let [a, b, c, d, e, _] = self.coeffs;
        Vec2::new(2.0 * a * p.x + b * p.y + d, b * p.x + 2.0 * c * p.y + e)
    }

    pub fn hessian(&self) -> Matrix2<f64> {
        let [a, b, c, ..] = self.coeffs;
        Matrix2::new(2.0 * a, b, b, 2.0 * c)
    }

    /// Spectral norm of the constant Hessian.
    pub fn hessian_norm(&self) -> f64 {
        let [a, b, c, ..] = self.coeffs;
        (a + c).abs() + ((a - c) * (a - c) + b * b).sqrt()
    }

    pub fn to_poly(&self) -> Poly2 {
        let [a, b, c, d, e, f] = self.coeffs;
        // graded-lex order: 1, x, y, x², xy, y²
        Poly2::from_coeffs(2, vec![f, d, e, a, b, c]).expect("six coefficients")
    }

    pub fn scaled(&self, s: f64) -> Conic {
        Conic {
            coeffs: self.coeffs.map(|c| c * s),
        }
    }

    /// Rescales by `s > 0` (after a sign flip if `q(witness) < 0`) so that the
    /// larger of `max ‖∇q‖₂` over `samples` and `‖∇²q‖₂` equals one.
    pub fn normalize(&self, samples: &[Point], witness: &Point) -> Result<Conic> {
        if samples.is_empty() {
            return Err(Error::InvalidInput(
                "normalization needs at least one sample point".into(),
            ));
        }
        let w = self.eval(witness);
        if w == 0.0 {
            return Err(Error::InvalidInput(
                "interior witness lies on the conic".into(),
            ));
        }
        let grad_max = samples
            .iter()
            .map(|p| self.gradient(p).norm())
            .fold(0.0, f64::max);
        let m = grad_max.max(self.hessian_norm());
        if m == 0.0 {
            return Err(Error::DegenerateConic(
                "gradient and Hessian vanish on all samples".into(),
            ));
        }
        Ok(self.scaled(w.signum() / m))
    }

    /// Centre of a central conic (where `∇q = 0`), if the Hessian is regular.
    pub fn center(&self) -> Option<Point> {
        let h = self.hessian();
        let [_, _, _, d, e, _] = self.coeffs;
        h.try_inverse().map(|inv| -(inv * Vec2::new(d, e)))
    }

    /// Points `origin + t·direction`, `t >= 0`, on the conic, ascending in `t`.
    pub fn intersect_ray(&self, origin: &Point, direction: &Vec2) -> Result<Vec<Point>> {
        if direction.norm() == 0.0 {
            return Err(Error::InvalidInput("ray direction is zero".into()));
        }
        let [a, b, c, ..] = self.coeffs;
        let qa = a * direction.x * direction.x
            + b * direction.x * direction.y
            + c * direction.y * direction.y;
        let qb = self.gradient(origin).dot(direction);
        let qc = self.eval(origin);
        let g = |t: f64| (qa * t + qb) * t + qc;
        let dg = |t: f64| 2.0 * qa * t + qb;

        let scale = qa.abs().max(qb.abs()).max(qc.abs());
        let mut roots = Vec::with_capacity(2);
        if qa.abs() <= 1e-15 * scale {
            if qb != 0.0 {
                roots.push(-qc / qb);
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return Ok(Vec::new());
            }
            let sq = disc.sqrt();
            // cancellation-free pair of roots
            let m = -0.5 * (qb + qb.signum() * sq);
            if m != 0.0 {
                roots.push(m / qa);
                roots.push(qc / m);
            } else {
                roots.push(0.0);
            }
            if disc == 0.0 {
                roots.truncate(1);
            }
        }
        let mut ts: Vec<f64> = roots
            .into_iter()
            .map(|t| {
                let s = dg(t);
                if s != 0.0 {
                    t - g(t) / s
                } else {
                    t
                }
            })
            .filter(|&t| t >= 0.0)
            .collect();
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
        Ok(ts.into_iter().map(|t| origin + direction * t).collect())
    }

    /// Unit normal `n = ∇q/‖∇q‖` (towards `q > 0`) and tangent `τ = n`
    /// rotated by +90°.
    pub fn normal_tangent(&self, p: &Point) -> Result<(Vec2, Vec2)> {
        let g = self.gradient(p);
        let norm = g.norm();
        if norm <= 1e-12 {
            return Err(Error::SingularCurvePoint(p.x, p.y));
        }
        let n = g / norm;
        Ok((n, perp(&n)))
    }

    /// Nearest curve point along the line `origin + s·direction`, `s ∈ ℝ`.
    pub fn project_along(&self, origin: &Point, direction: &Vec2) -> Option<Point> {
        let fwd = self.intersect_ray(origin, direction).ok()?;
        let bwd = self.intersect_ray(origin, &-direction).ok()?;
        fwd.into_iter()
            .chain(bwd)
            .min_by(|a, b| {
                (a - origin)
                    .norm()
                    .partial_cmp(&(b - origin).norm())
                    .unwrap()
            })
    }
}

/// An open arc of a domain conic from `start` to `end`, traversed
/// counter-clockwise around the domain witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub conic: usize,
    pub start: Point,
    pub end: Point,
}

/// A simply connected domain bounded by conic arcs.
///
/// Arcs are parameterized by rays from `witness`, so the domain must be
/// star-shaped with respect to the witness point.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub conics: Vec<Conic>,
    pub arcs: Vec<Arc>,
    pub witness: Point,
}

/// Domain description as read from a JSON domain file.
///
/// ```json
/// {
///   "conics": [[-1, 0, -1, 0, 0, 1]],
///   "arcs": [{"conic": 0, "start": [1, 0], "end": [1, 0]}],
///   "witness": [0, 0]
/// }
/// ```
///
/// Conic coefficients are `[a, b, c, d, e, f]` of
/// `ax² + bxy + cy² + dx + ey + f`. An arc whose start equals its end is a
/// closed oval. Conics are normalized on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub conics: Vec<[f64; 6]>,
    pub arcs: Vec<ArcSpec>,
    pub witness: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcSpec {
    pub conic: usize,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

const ARC_CHECK_SAMPLES: usize = 50;

impl Domain {
    /// The unit disk with a single closed arc starting at `(1, 0)`.
    pub fn unit_disk() -> Domain {
        DomainSpec {
            conics: vec![Conic::unit_circle().coeffs()],
            arcs: vec![ArcSpec {
                conic: 0,
                start: [1.0, 0.0],
                end: [1.0, 0.0],
            }],
            witness: [0.0, 0.0],
        }
        .build()
        .expect("unit disk is valid")
    }

    /// The ellipse `x²/rx² + y²/ry² < 1` with a single closed arc.
    pub fn ellipse(rx: f64, ry: f64) -> Result<Domain> {
        DomainSpec {
            conics: vec![Conic::ellipse(0.0, 0.0, rx, ry)?.coeffs()],
            arcs: vec![ArcSpec {
                conic: 0,
                start: [rx, 0.0],
                end: [rx, 0.0],
            }],
            witness: [0.0, 0.0],
        }
        .build()
    }

    pub fn from_json(text: &str) -> Result<Domain> {
        let spec: DomainSpec = serde_json::from_str(text)?;
        spec.build()
    }

    /// Whether the boundary is one closed arc.
    pub fn is_closed_oval(&self) -> bool {
        self.arcs.len() == 1 && (self.arcs[0].start - self.arcs[0].end).norm() <= 1e-12
    }

    fn sweep(&self, arc: &Arc) -> (f64, f64) {
        let a0 = angle_about(&self.witness, &arc.start);
        let a1 = angle_about(&self.witness, &arc.end);
        let mut d = (a1 - a0).rem_euclid(2.0 * PI);
        if d <= 1e-14 {
            d = 2.0 * PI;
        }
        (a0, d)
    }

    /// Point on arc `j` at parameter `t ∈ [0, 1]` (uniform in angle about
    /// the witness).
    pub fn arc_point(&self, j: usize, t: f64) -> Result<Point> {
        let arc = &self.arcs[j];
        let (a0, d) = self.sweep(arc);
        let theta = a0 + t * d;
        let dir = Vec2::new(theta.cos(), theta.sin());
        self.conics[arc.conic]
            .intersect_ray(&self.witness, &dir)?
            .into_iter()
            .next()
            .ok_or_else(|| {
                Error::InvalidInput(format!("ray at angle {theta} misses arc {j}"))
            })
    }

    pub fn arc_samples(&self, j: usize, count: usize) -> Result<Vec<Point>> {
        (0..count)
            .map(|k| self.arc_point(j, (k as f64 + 0.5) / count as f64))
            .collect()
    }

    /// Interior angle `ω_j` at the start point of arc `j`.
    pub fn corner_angle(&self, j: usize) -> Result<f64> {
        let prev = (j + self.arcs.len() - 1) % self.arcs.len();
        let z = self.arcs[j].start;
        // travel direction along a counter-clockwise boundary is -τ
        let (_, tau_next) = self.conics[self.arcs[j].conic].normal_tangent(&z)?;
        let (_, tau_prev) = self.conics[self.arcs[prev].conic].normal_tangent(&z)?;
        let leaving = -tau_next;
        let back = tau_prev;
        let ang = (back.y.atan2(back.x) - leaving.y.atan2(leaving.x)).rem_euclid(2.0 * PI);
        Ok(ang)
    }

    pub fn corner_angles(&self) -> Result<Vec<f64>> {
        (0..self.arcs.len()).map(|j| self.corner_angle(j)).collect()
    }
}

fn angle_about(center: &Point, p: &Point) -> f64 {
    (p.y - center.y).atan2(p.x - center.x)
}

impl DomainSpec {
    /// Validates the description, normalizes every conic and checks the arc
    /// invariants.
    pub fn build(&self) -> Result<Domain> {
        self.build_with(true)
    }

    /// Like [`DomainSpec::build`] but keeps the conic coefficients as given;
    /// used for files that already store normalized conics.
    pub fn assemble(&self) -> Result<Domain> {
        self.build_with(false)
    }

    fn build_with(&self, normalize: bool) -> Result<Domain> {
        if self.arcs.is_empty() {
            return Err(Error::InvalidInput("domain has no arcs".into()));
        }
        let witness = Point::new(self.witness[0], self.witness[1]);
        let raw: Vec<Conic> = self
            .conics
            .iter()
            .map(|c| Conic::new(*c))
            .collect::<Result<_>>()?;
        for (j, a) in self.arcs.iter().enumerate() {
            if a.conic >= raw.len() {
                return Err(Error::InvalidInput(format!(
                    "arc {j} references missing conic {}",
                    a.conic
                )));
            }
        }
        let arcs: Vec<Arc> = self
            .arcs
            .iter()
            .map(|a| Arc {
                conic: a.conic,
                start: Point::new(a.start[0], a.start[1]),
                end: Point::new(a.end[0], a.end[1]),
            })
            .collect();
        for j in 0..arcs.len() {
            let next = &arcs[(j + 1) % arcs.len()];
            if (arcs[j].end - next.start).norm() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "arc {j} does not end where arc {} starts",
                    (j + 1) % arcs.len()
                )));
            }
        }

        let mut pre = Domain {
            conics: raw.clone(),
            arcs,
            witness,
        };
        if !normalize {
            for arc in &pre.arcs {
                if pre.conics[arc.conic].eval(&witness) <= 0.0 {
                    return Err(Error::InvalidInput(
                        "conic is not positive at the witness".into(),
                    ));
                }
            }
        }
        // region samples: arc points and their rays towards the witness
        let mut conics = Vec::with_capacity(raw.len());
        for (ci, conic) in raw.iter().enumerate() {
            let mut samples = vec![witness];
            for (j, arc) in pre.arcs.iter().enumerate() {
                if arc.conic != ci {
                    continue;
                }
                for k in 0..=200 {
                    let p = pre.arc_point(j, k as f64 / 200.0)?;
                    for s in 0..=10 {
                        let f = s as f64 / 10.0;
                        samples.push(witness + (p - witness) * f);
                    }
                }
            }
            conics.push(conic.normalize(&samples, &witness)?);
        }
        if normalize {
            pre.conics = conics;
        }
        let domain = pre;

        for (j, arc) in domain.arcs.iter().enumerate() {
            let q = &domain.conics[arc.conic];
            for z in [arc.start, arc.end] {
                if q.eval(&z).abs() > ARC_ENDPOINT_ABS {
                    return Err(Error::InvalidInput(format!(
                        "endpoint ({}, {}) of arc {j} is off its conic (q = {:e})",
                        z.x,
                        z.y,
                        q.eval(&z)
                    )));
                }
            }
            for k in 0..ARC_CHECK_SAMPLES {
                let p = domain.arc_point(j, k as f64 / (ARC_CHECK_SAMPLES - 1) as f64)?;
                if q.gradient(&p).norm() <= 1e-12 {
                    return Err(Error::SingularCurvePoint(p.x, p.y));
                }
            }
        }
        for (j, w) in domain.corner_angles()?.into_iter().enumerate() {
            if !(w > 0.0 && w < 2.0 * PI) {
                return Err(Error::InvalidInput(format!(
                    "corner angle {w} at arc {j} is outside (0, 2π)"
                )));
            }
        }
        Ok(domain)
    }
}

impl Domain {
    pub fn to_spec(&self) -> DomainSpec {
        DomainSpec {
            conics: self.conics.iter().map(|c| c.coeffs()).collect(),
            arcs: self
                .arcs
                .iter()
                .map(|a| ArcSpec {
                    conic: a.conic,
                    start: [a.start.x, a.start.y],
                    end: [a.end.x, a.end.y],
                })
                .collect(),
            witness: [self.witness.x, self.witness.y],
        }
    }
}
