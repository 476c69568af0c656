//! Nodal functionals and the data they are applied to.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::conic::Conic;
use crate::error::{Error, Result};
use crate::geometry::{centroid, Point, Vec2};
use crate::mesh::{edge_points, InscribedDisk, Mesh};
use crate::poly::{MultiIndex, Poly2};
use crate::tolerances::{QUOTIENT_BOUNDARY_ABS, QUOTIENT_INTERIOR_MIN_Q};

/// Value, gradient and Hessian of a function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec2,
    pub hess: Matrix2<f64>,
}

impl Jet {
    pub fn zero() -> Jet {
        Jet {
            value: 0.0,
            grad: Vec2::zeros(),
            hess: Matrix2::zeros(),
        }
    }

    pub fn product(&self, o: &Jet) -> Jet {
        Jet {
            value: self.value * o.value,
            grad: self.grad * o.value + o.grad * self.value,
            hess: self.hess * o.value
                + o.hess * self.value
                + self.grad * o.grad.transpose()
                + o.grad * self.grad.transpose(),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet {
            value: self.value - o.value,
            grad: self.grad - o.grad,
            hess: self.hess - o.hess,
        }
    }

    /// `∂^α` for `|α| <= 2`.
    pub fn partial(&self, alpha: MultiIndex) -> Option<f64> {
        Some(match alpha {
            (0, 0) => self.value,
            (1, 0) => self.grad.x,
            (0, 1) => self.grad.y,
            (2, 0) => self.hess[(0, 0)],
            (1, 1) => self.hess[(0, 1)],
            (0, 2) => self.hess[(1, 1)],
            _ => return None,
        })
    }
}

/// A function known through its derivatives up to order two.
pub trait HermiteData: Sync {
    fn jet(&self, p: &Point) -> Jet;

    fn max_order(&self) -> usize {
        2
    }
}

impl<F: Fn(&Point) -> Jet + Sync> HermiteData for F {
    fn jet(&self, p: &Point) -> Jet {
        self(p)
    }
}

impl HermiteData for Poly2 {
    fn jet(&self, p: &Point) -> Jet {
        let d = |a| self.diff(a).eval(p);
        let hxy = d((1, 1));
        Jet {
            value: self.eval(p),
            grad: Vec2::new(d((1, 0)), d((0, 1))),
            hess: Matrix2::new(d((2, 0)), hxy, hxy, d((0, 2))),
        }
    }
}

impl HermiteData for Conic {
    fn jet(&self, p: &Point) -> Jet {
        Jet {
            value: self.eval(p),
            grad: self.gradient(p),
            hess: self.hessian(),
        }
    }
}

/// Pointwise product of two Hermite data.
pub struct Product<A, B>(pub A, pub B);

impl<A: HermiteData, B: HermiteData> HermiteData for Product<A, B> {
    fn jet(&self, p: &Point) -> Jet {
        self.0.jet(p).product(&self.1.jet(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Derivative {
    Partial { dx: usize, dy: usize },
    /// First derivative along a unit vector.
    Directional { dir: Vec2 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalFunctional {
    pub site: Point,
    pub derivative: Derivative,
}

impl NodalFunctional {
    pub fn partial(site: Point, dx: usize, dy: usize) -> Self {
        NodalFunctional {
            site,
            derivative: Derivative::Partial { dx, dy },
        }
    }

    pub fn directional(site: Point, dir: Vec2) -> Self {
        NodalFunctional {
            site,
            derivative: Derivative::Directional { dir },
        }
    }

    /// `d(η)`, the derivative order.
    pub fn degree(&self) -> usize {
        match self.derivative {
            Derivative::Partial { dx, dy } => dx + dy,
            Derivative::Directional { .. } => 1,
        }
    }

    /// Applies `η` to a jet known up to `available` derivatives.
    pub fn apply_jet(&self, jet: &Jet, available: usize) -> Result<f64> {
        if self.degree() > available.min(2) {
            return Err(Error::OrderMismatch {
                required: self.degree(),
                available: available.min(2),
            });
        }
        Ok(match self.derivative {
            Derivative::Partial { dx, dy } => jet.partial((dx, dy)).expect("order checked"),
            Derivative::Directional { dir } => jet.grad.dot(&dir),
        })
    }

    pub fn apply<H: HermiteData + ?Sized>(&self, f: &H) -> Result<f64> {
        self.apply_jet(&f.jet(&self.site), f.max_order())
    }

    pub fn apply_poly(&self, p: &Poly2) -> Result<f64> {
        match self.derivative {
            Derivative::Partial { dx, dy } => Ok(p.diff((dx, dy)).eval(&self.site)),
            Derivative::Directional { dir } => p.dir_deriv(&[dir], &self.site),
        }
    }
}

const ORDER_2: [MultiIndex; 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

fn push_partials(out: &mut Vec<NodalFunctional>, site: Point, order: usize) {
    for &(dx, dy) in ORDER_2.iter().filter(|(a, b)| a + b <= order) {
        out.push(NodalFunctional::partial(site, dx, dy));
    }
}

/// `N_T^0`: second-order data at the vertices and the normal derivative at
/// each edge midpoint (21 functionals).
pub fn nodal_set_ordinary(mesh: &Mesh, t: usize) -> Vec<NodalFunctional> {
    let p = mesh.triangle_points(t);
    let mut out = Vec::with_capacity(21);
    for v in p {
        push_partials(&mut out, v, 2);
    }
    for k in 0..3 {
        let e = mesh.triangle_edges[t][k];
        let (a, b) = mesh.edge_points(e);
        out.push(NodalFunctional::directional(edge_points(&a, &b)[1], mesh.edge_normal(e)));
    }
    out
}

/// `N_T^P`: second-order data at the interior vertex `v1`, first-order data
/// at the boundary vertices and at the disk centre `c_T` (15 functionals).
pub fn nodal_set_pie(mesh: &Mesh, t: usize, disk: &InscribedDisk) -> Vec<NodalFunctional> {
    let [v1, v2, v3] = mesh.triangle_points(t);
    let mut out = Vec::with_capacity(15);
    push_partials(&mut out, v1, 2);
    push_partials(&mut out, v2, 1);
    push_partials(&mut out, v3, 1);
    push_partials(&mut out, disk.center, 1);
    out
}

/// One of the three edge groups of a buffer triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferGroup {
    /// Local edge index (the edge opposite local vertex `local_edge`).
    pub local_edge: usize,
    pub functionals: Vec<NodalFunctional>,
}

/// `N_T^B = {f(c_T)} ∪ N_1 ∪ N_2 ∪ N_3` on a buffer triangle with boundary
/// vertex `v1`, where `e1 = ⟨v2,v3⟩`, `e2 = ⟨v1,v2⟩`, `e3 = ⟨v1,v3⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferNodalSet {
    pub barycenter: NodalFunctional,
    pub groups: [BufferGroup; 3],
}

impl BufferNodalSet {
    pub fn all(&self) -> Vec<NodalFunctional> {
        let mut out = vec![self.barycenter];
        for g in &self.groups {
            out.extend_from_slice(&g.functionals);
        }
        out
    }

    pub fn len(&self) -> usize {
        1 + self.groups.iter().map(|g| g.functionals.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn nodal_set_buffer(mesh: &Mesh, t: usize) -> BufferNodalSet {
    let p = mesh.triangle_points(t);
    let edge_group = |local_edge: usize, vertices: &[Point]| -> BufferGroup {
        let e = mesh.triangle_edges[t][local_edge];
        let (a, b) = mesh.edge_points(e);
        let z = edge_points(&a, &b);
        let n = mesh.edge_normal(e);
        let mut f = vec![
            NodalFunctional::partial(z[1], 0, 0),
            NodalFunctional::directional(z[0], n),
            NodalFunctional::directional(z[2], n),
        ];
        for &v in vertices {
            push_partials(&mut f, v, 2);
        }
        BufferGroup {
            local_edge,
            functionals: f,
        }
    };
    BufferNodalSet {
        barycenter: NodalFunctional::partial(centroid(&p), 0, 0),
        groups: [
            edge_group(0, &[p[1], p[2]]),
            edge_group(2, &[p[0]]),
            edge_group(1, &[]),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteKind {
    Interior,
    BoundaryVertex,
}

/// Jet of `u / q` at `site`, together with the number of derivatives it
/// carries (2 in the interior, 1 at boundary vertices).
///
/// Interior sites use the quotient rule. At a boundary vertex `q = 0` and
/// `u = p q`; writing `n, τ` for the unit normal and tangent of the conic,
///
/// ```text
/// p   = u_n / q_n
/// p_n = (u_nn - p q_nn) / (2 q_n)
/// p_τ = (u_nτ - p q_nτ) / q_n
/// ```
pub fn quotient_jet<H: HermiteData + ?Sized>(
    u: &H,
    q: &Conic,
    site: &Point,
    kind: SiteKind,
) -> Result<(Jet, usize)> {
    let uj = u.jet(site);
    match kind {
        SiteKind::Interior => {
            let qv = q.eval(site);
            if qv.abs() <= QUOTIENT_INTERIOR_MIN_Q {
                return Err(Error::QuotientSite(format!(
                    "q = {qv:e} at interior site ({}, {})",
                    site.x, site.y
                )));
            }
            let qg = q.gradient(site);
            let qh = q.hessian();
            let v = uj.value / qv;
            let g = (uj.grad - qg * v) / qv;
            let h = (uj.hess - g * qg.transpose() - qg * g.transpose() - qh * v) / qv;
            Ok((
                Jet {
                    value: v,
                    grad: g,
                    hess: h,
                },
                2,
            ))
        }
        SiteKind::BoundaryVertex => {
            if uj.value.abs() > QUOTIENT_BOUNDARY_ABS {
                return Err(Error::NotVanishing {
                    value: uj.value,
                    x: site.x,
                    y: site.y,
                });
            }
            let (n, tau) = q.normal_tangent(site)?;
            let qh = q.hessian();
            let q_n = q.gradient(site).dot(&n);
            if q_n.abs() <= QUOTIENT_BOUNDARY_ABS {
                return Err(Error::SingularCurvePoint(site.x, site.y));
            }
            let u_n = uj.grad.dot(&n);
            let u_nn = n.dot(&(uj.hess * n));
            let u_nt = n.dot(&(uj.hess * tau));
            let q_nn = n.dot(&(qh * n));
            let q_nt = n.dot(&(qh * tau));
            let p = u_n / q_n;
            let p_n = (u_nn - p * q_nn) / (2.0 * q_n);
            let p_t = (u_nt - p * q_nt) / q_n;
            Ok((
                Jet {
                    value: p,
                    grad: n * p_n + tau * p_t,
                    hess: Matrix2::from_element(f64::NAN),
                },
                1,
            ))
        }
    }
}

/// `η(u/q)`.
pub fn quotient_values<H: HermiteData + ?Sized>(
    u: &H,
    q: &Conic,
    eta: &NodalFunctional,
    kind: SiteKind,
) -> Result<f64> {
    let (jet, order) = quotient_jet(u, q, &eta.site, kind)?;
    eta.apply_jet(&jet, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::Domain;
    use crate::geometry::pt;
    use crate::mesh::{generate_disk_mesh, TriangleClass};
    use crate::poly::dim_p;
    use proptest::prelude::*;

    fn circle() -> Conic {
        Conic::unit_circle().scaled(0.5)
    }

    #[test]
    fn cardinalities() {
        let m = generate_disk_mesh(&Domain::unit_disk(), 16).unwrap();
        for t in 0..m.triangles.len() {
            let n = match m.triangles[t].class {
                TriangleClass::Ordinary => nodal_set_ordinary(&m, t).len(),
                TriangleClass::Pie => nodal_set_pie(&m, t, &m.inscribed_disk(t).unwrap()).len(),
                TriangleClass::Buffer => {
                    let s = nodal_set_buffer(&m, t);
                    assert_eq!(s.groups.clone().map(|g| g.functionals.len()), [15, 9, 3]);
                    s.len()
                }
            };
            let d = match m.triangles[t].class {
                TriangleClass::Ordinary => 5,
                TriangleClass::Pie => 4,
                TriangleClass::Buffer => 6,
            };
            assert_eq!(n, dim_p(d));
        }
    }

    #[test]
    fn buffer_barycenter_is_vertex_mean() {
        let m = generate_disk_mesh(&Domain::unit_disk(), 16).unwrap();
        let t = (0..m.triangles.len())
            .find(|&t| m.triangles[t].class == TriangleClass::Buffer)
            .unwrap();
        let p = m.triangle_points(t);
        let s = nodal_set_buffer(&m, t);
        assert!((s.barycenter.site - (p[0] + p[1] + p[2]) / 3.0).norm() < 1e-15);
        // N_3 carries no vertex data
        assert!(s.groups[2].functionals.iter().all(|f| !p.contains(&f.site)));
    }

    #[test]
    fn apply_examples() {
        let x_plus_y = Poly2::from_coeffs(1, vec![0.0, 1.0, 1.0]).unwrap();
        let eta = NodalFunctional::partial(pt(1.0, 2.0), 0, 0);
        assert_eq!(eta.apply(&x_plus_y).unwrap(), 3.0);
        let xy = Poly2::monomial(1, 1, 1.0);
        assert_eq!(NodalFunctional::partial(pt(0.0, 0.0), 1, 1).apply_poly(&xy).unwrap(), 1.0);
        let y2 = Poly2::monomial(0, 2, 1.0);
        let eta = NodalFunctional::directional(pt(2.0, 0.0), Vec2::new(0.0, 1.0));
        assert_eq!(eta.apply_poly(&y2).unwrap(), 0.0);
        assert_eq!(eta.apply(&y2).unwrap(), 0.0);
    }

    #[test]
    fn order_mismatch() {
        let eta = NodalFunctional::partial(pt(1.0, 0.0), 2, 0);
        let (jet, order) =
            quotient_jet(&circle(), &circle(), &pt(1.0, 0.0), SiteKind::BoundaryVertex).unwrap();
        assert!(matches!(eta.apply_jet(&jet, order), Err(Error::OrderMismatch { .. })));
    }

    #[test]
    fn quotient_examples() {
        let q = circle();
        let one = NodalFunctional::partial(pt(1.0, 0.0), 0, 0);
        assert!((quotient_values(&q, &q, &one, SiteKind::BoundaryVertex).unwrap() - 1.0).abs() < 1e-15);
        for a in [(1, 0), (0, 1)] {
            let eta = NodalFunctional::partial(pt(0.2, -0.1), a.0, a.1);
            assert!(quotient_values(&q, &q, &eta, SiteKind::Interior).unwrap().abs() < 1e-15);
        }
        let xq = Product(Poly2::monomial(1, 0, 1.0), q);
        let v = quotient_values(&xq, &q, &one, SiteKind::BoundaryVertex).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interior_quotient_matches_finite_differences() {
        let q = circle();
        let u = |p: &Point| {
            let s = (p.x + 2.0 * p.y).sin();
            let c = (p.x + 2.0 * p.y).cos();
            Jet {
                value: s,
                grad: Vec2::new(c, 2.0 * c),
                hess: Matrix2::new(-s, -2.0 * s, -2.0 * s, -4.0 * s),
            }
        };
        let f = |p: &Point| u(p).value / q.eval(p);
        let z = pt(0.3, 0.2);
        let (j, _) = quotient_jet(&u, &q, &z, SiteKind::Interior).unwrap();
        let h = 1e-4;
        let (ex, ey) = (Vec2::new(h, 0.0), Vec2::new(0.0, h));
        let gx = (f(&(z + ex)) - f(&(z - ex))) / (2.0 * h);
        let gy = (f(&(z + ey)) - f(&(z - ey))) / (2.0 * h);
        let hxx = (f(&(z + ex)) - 2.0 * f(&z) + f(&(z - ex))) / (h * h);
        let hxy = (f(&(z + ex + ey)) - f(&(z + ex - ey)) - f(&(z - ex + ey)) + f(&(z - ex - ey)))
            / (4.0 * h * h);
        for (a, b) in [(j.grad.x, gx), (j.grad.y, gy), (j.hess[(0, 0)], hxx), (j.hess[(0, 1)], hxy)] {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    fn p4() -> impl Strategy<Value = Poly2> {
        proptest::collection::vec(-1.0f64..1.0, 15).prop_map(|c| Poly2::from_coeffs(4, c).unwrap())
    }

    proptest! {
        #[test]
        fn quotient_reproduces_p(p in p4(), theta in 0.0f64..6.28, r in 0.05f64..0.9) {
            let q = circle();
            let u = Product(p.clone(), q);
            let b = pt(theta.cos(), theta.sin());
            let z = b * r;
            let mut cases: Vec<(NodalFunctional, SiteKind)> = Vec::new();
            for (dx, dy) in ORDER_2 {
                cases.push((NodalFunctional::partial(z, dx, dy), SiteKind::Interior));
                if dx + dy <= 1 {
                    cases.push((NodalFunctional::partial(b, dx, dy), SiteKind::BoundaryVertex));
                }
            }
            for (eta, kind) in cases {
                let got = quotient_values(&u, &q, &eta, kind).unwrap();
                let want = eta.apply_poly(&p).unwrap();
                prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{:?}: {} vs {}", eta, got, want);
            }
        }

        #[test]
        fn apply_is_linear(p in p4(), r in p4(), a in -3.0f64..3.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let combo = &(&p * a) + &r;
            for (dx, dy) in ORDER_2 {
                let eta = NodalFunctional::partial(pt(x, y), dx, dy);
                let lhs = eta.apply(&combo).unwrap();
                let rhs = a * eta.apply(&p).unwrap() + eta.apply(&r).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }
    }
}
