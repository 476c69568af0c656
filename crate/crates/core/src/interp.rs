//! Local interpolation operators and the global two-phase assembly.
//!
//! Every local solve happens in a frame centred at the centroid of the
//! (straight) triangle and scaled by its diameter, `x = o + s ξ`. The
//! resulting piece is kept in that frame: expanding it back into global
//! monomials would reintroduce exactly the ill-conditioning the frame
//! avoids.

use nalgebra::{DMatrix, DVector, Matrix2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conic::Conic;
use crate::error::{Error, Result};
use crate::geometry::{centroid, diameter, Point, Vec2};
use crate::mesh::{Mesh, TriangleClass};
use crate::nodal::{
    nodal_set_buffer, nodal_set_ordinary, nodal_set_pie, quotient_values, Derivative, HermiteData, Jet,
    NodalFunctional, SiteKind,
};
use crate::poly::{dim_p, monomial_derivative, monomial_exponents, MultiIndex, Poly2};
use crate::tolerances::VANISHING_ABS;

const BOUNDARY_SPOT_CHECKS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub origin: Point,
    pub scale: f64,
}

impl LocalFrame {
    pub fn of_triangle(p: &[Point; 3]) -> Self {
        LocalFrame {
            origin: centroid(p),
            scale: diameter(p),
        }
    }

    pub fn to_local(&self, x: &Point) -> Point {
        (x - self.origin) / self.scale
    }
}

/// One polynomial piece `P(x) = poly((x - o) / s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub frame: LocalFrame,
    pub poly: Poly2,
}

impl Piece {
    pub fn zero(frame: LocalFrame, degree: usize) -> Self {
        Piece {
            frame,
            poly: Poly2::zero(degree),
        }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    /// `∂^α P(x)` in global coordinates.
    pub fn eval(&self, x: &Point, alpha: MultiIndex) -> f64 {
        let xi = self.frame.to_local(x);
        self.poly.diff(alpha).eval(&xi) / self.frame.scale.powi((alpha.0 + alpha.1) as i32)
    }

    /// Value, gradient and Hessian in one pass over the coefficients.
    pub fn jet(&self, x: &Point) -> Jet {
        let xi = self.frame.to_local(x);
        let d = self.poly.degree();
        let mut px = [1.0; 8];
        let mut py = [1.0; 8];
        for k in 1..=d {
            px[k] = px[k - 1] * xi.x;
            py[k] = py[k - 1] * xi.y;
        }
        let pow = |a: &[f64; 8], e: isize| if e < 0 { 0.0 } else { a[e as usize] };
        let (mut v, mut gx, mut gy, mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        for ((i, j), &c) in monomial_exponents(d).into_iter().zip(self.poly.coeffs()) {
            if c == 0.0 {
                continue;
            }
            let (fi, fj) = (i as f64, j as f64);
            let (ii, jj) = (i as isize, j as isize);
            v += c * pow(&px, ii) * pow(&py, jj);
            gx += c * fi * pow(&px, ii - 1) * pow(&py, jj);
            gy += c * fj * pow(&px, ii) * pow(&py, jj - 1);
            hxx += c * fi * (fi - 1.0) * pow(&px, ii - 2) * pow(&py, jj);
            hxy += c * fi * fj * pow(&px, ii - 1) * pow(&py, jj - 1);
            hyy += c * fj * (fj - 1.0) * pow(&px, ii) * pow(&py, jj - 2);
        }
        let s = self.frame.scale;
        Jet {
            value: v,
            grad: Vec2::new(gx, gy) / s,
            hess: Matrix2::new(hxx, hxy, hxy, hyy) / (s * s),
        }
    }

    pub fn apply(&self, eta: &NodalFunctional) -> f64 {
        eta.apply_jet(&self.jet(&eta.site), 2).expect("pieces carry second derivatives")
    }

    /// Converts to global monomial coefficients. Only for inspection and
    /// tests: the expansion loses accuracy on small triangles.
    pub fn to_global(&self) -> Poly2 {
        // ξ = (x - o) / s is affine with inverse x = o + s ξ; compose with
        // the inverse map ξ(x) = x/s - o/s
        let inv = LocalFrame {
            origin: -self.frame.origin / self.frame.scale,
            scale: 1.0 / self.frame.scale,
        };
        self.poly.compose_affine(&inv.origin, inv.scale)
    }
}

impl HermiteData for Piece {
    fn jet(&self, p: &Point) -> Jet {
        Piece::jet(self, p)
    }
}

/// Row of `η` against the local monomial basis of degree `d`.
fn collocation_row(frame: &LocalFrame, eta: &NodalFunctional, d: usize) -> Vec<f64> {
    let xi = frame.to_local(&eta.site);
    monomial_exponents(d)
        .into_iter()
        .map(|(i, j)| match eta.derivative {
            Derivative::Partial { dx, dy } => monomial_derivative(i, j, (dx, dy), xi.x, xi.y),
            Derivative::Directional { dir } => {
                dir.x * monomial_derivative(i, j, (1, 0), xi.x, xi.y)
                    + dir.y * monomial_derivative(i, j, (0, 1), xi.x, xi.y)
            }
        })
        .collect()
}

pub fn collocation_matrix(frame: &LocalFrame, set: &[NodalFunctional], d: usize) -> DMatrix<f64> {
    let n = dim_p(d);
    assert_eq!(set.len(), n, "nodal set does not match the polynomial space");
    let mut m = DMatrix::zeros(n, n);
    for (r, eta) in set.iter().enumerate() {
        for (c, v) in collocation_row(frame, eta, d).into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    m
}

/// Smallest singular value of the collocation matrix (unisolvence check).
pub fn min_singular_value(frame: &LocalFrame, set: &[NodalFunctional], d: usize) -> f64 {
    collocation_matrix(frame, set, d)
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Solves `η p = values[η]` for `p` of degree `d` in the local frame.
/// `values` are in global units; they are rescaled by `s^{d(η)}`.
pub fn solve_local(
    frame: &LocalFrame,
    set: &[NodalFunctional],
    values: &[f64],
    d: usize,
    triangle: usize,
) -> Result<Poly2> {
    let m = collocation_matrix(frame, set, d);
    let rhs = DVector::from_iterator(
        values.len(),
        set.iter()
            .zip(values)
            .map(|(eta, v)| v * frame.scale.powi(eta.degree() as i32)),
    );
    let sol = m.lu().solve(&rhs).ok_or_else(|| Error::SingularSystem {
        triangle,
        reason: "collocation matrix is singular".into(),
    })?;
    if sol.iter().any(|c| !c.is_finite()) {
        return Err(Error::SingularSystem {
            triangle,
            reason: "non-finite coefficients".into(),
        });
    }
    Poly2::from_coeffs(d, sol.iter().copied().collect())
}

/// Argyris quintic on an ordinary triangle.
pub fn interp_ordinary<H: HermiteData + ?Sized>(mesh: &Mesh, t: usize, u: &H) -> Result<Piece> {
    let frame = LocalFrame::of_triangle(&mesh.triangle_points(t));
    let set = nodal_set_ordinary(mesh, t);
    let values = set.iter().map(|eta| eta.apply(u)).collect::<Result<Vec<_>>>()?;
    Ok(Piece {
        frame,
        poly: solve_local(&frame, &set, &values, 5, t)?,
    })
}

/// `p q` with `p ∈ P4` fitted to the quotient data `u / q`.
pub fn interp_pie<H: HermiteData + ?Sized>(mesh: &Mesh, t: usize, u: &H) -> Result<Piece> {
    let g = mesh
        .pie_geometry(t)
        .ok_or_else(|| Error::InvalidInput(format!("triangle {t} is not pie-shaped")))?;
    for k in 1..=BOUNDARY_SPOT_CHECKS {
        if let Some(z) = g.arc_point_ray(k as f64 / (BOUNDARY_SPOT_CHECKS + 1) as f64) {
            let v = u.jet(&z).value;
            if v.abs() > VANISHING_ABS {
                return Err(Error::NotVanishing { value: v, x: z.x, y: z.y });
            }
        }
    }
    let disk = mesh.inscribed_disk(t)?;
    let set = nodal_set_pie(mesh, t, &disk);
    let [v1, ..] = mesh.triangle_points(t);
    let values = set
        .iter()
        .map(|eta| {
            let kind = if eta.site == v1 || eta.site == disk.center {
                SiteKind::Interior
            } else {
                SiteKind::BoundaryVertex
            };
            quotient_values(u, &g.conic, eta, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    let frame = LocalFrame::of_triangle(&g.straight());
    let p = solve_local(&frame, &set, &values, 4, t)?;
    Ok(Piece {
        frame,
        poly: p.multiply(&local_conic(&g.conic, &frame))?,
    })
}

/// `q(o + s ξ)` as a polynomial in `ξ`.
pub fn local_conic(q: &Conic, frame: &LocalFrame) -> Poly2 {
    q.to_poly().compose_affine(&frame.origin, frame.scale)
}

/// Sextic on a buffer triangle: barycenter value from `u`, each edge group
/// `N_i` from the phase-one piece across that edge.
pub fn interp_buffer<H: HermiteData + ?Sized>(
    mesh: &Mesh,
    t: usize,
    u: &H,
    neighbor_piece: &dyn Fn(usize) -> Option<Piece>,
) -> Result<Piece> {
    let set = nodal_set_buffer(mesh, t);
    let mut functionals = vec![set.barycenter];
    let mut values = vec![set.barycenter.apply(u)?];
    for g in &set.groups {
        let n = mesh.neighbor(t, g.local_edge).ok_or(Error::MissingNeighbor {
            triangle: t,
            edge: g.local_edge,
        })?;
        let piece = neighbor_piece(n).ok_or(Error::MissingNeighbor {
            triangle: t,
            edge: g.local_edge,
        })?;
        for eta in &g.functionals {
            functionals.push(*eta);
            values.push(piece.apply(eta));
        }
    }
    let frame = LocalFrame::of_triangle(&mesh.triangle_points(t));
    Ok(Piece {
        frame,
        poly: solve_local(&frame, &functionals, &values, 6, t)?,
    })
}

/// Piecewise polynomial on a mesh, one piece per triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spline {
    pub classes: Vec<TriangleClass>,
    pub pieces: Vec<Piece>,
}

/// Checks that `u` vanishes at `BOUNDARY_SPOT_CHECKS` points of every arc.
pub fn check_boundary_vanishing<H: HermiteData + ?Sized>(mesh: &Mesh, u: &H) -> Result<()> {
    for j in 0..mesh.domain.arcs.len() {
        for z in mesh.domain.arc_samples(j, BOUNDARY_SPOT_CHECKS)? {
            let v = u.jet(&z).value;
            if v.abs() > VANISHING_ABS {
                return Err(Error::NotVanishing { value: v, x: z.x, y: z.y });
            }
        }
    }
    Ok(())
}

/// `I_△ u`: ordinary and pie pieces first, then buffers from their
/// neighbours. Both phases run in parallel; results are stored by triangle
/// id, so the output does not depend on scheduling.
pub fn interpolate<H: HermiteData + ?Sized>(mesh: &Mesh, u: &H) -> Result<Spline> {
    check_boundary_vanishing(mesh, u)?;
    let n = mesh.triangles.len();
    let phase1: Vec<Option<Piece>> = (0..n)
        .into_par_iter()
        .map(|t| match mesh.triangles[t].class {
            TriangleClass::Ordinary => interp_ordinary(mesh, t, u).map(Some),
            TriangleClass::Pie => interp_pie(mesh, t, u).map(Some),
            TriangleClass::Buffer => Ok(None),
        })
        .collect::<Result<_>>()?;
    let lookup = |o: usize| phase1[o].clone();
    let phase2: Vec<Option<Piece>> = (0..n)
        .into_par_iter()
        .map(|t| match mesh.triangles[t].class {
            TriangleClass::Buffer => interp_buffer(mesh, t, u, &lookup).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<_>>()?;
    let pieces = phase1
        .into_iter()
        .zip(phase2)
        .map(|(a, b)| a.or(b).expect("every triangle gets a piece"))
        .collect();
    Ok(Spline {
        classes: mesh.triangles.iter().map(|t| t.class).collect(),
        pieces,
    })
}

impl Spline {
    pub fn zero(mesh: &Mesh) -> Spline {
        Spline {
            classes: mesh.triangles.iter().map(|t| t.class).collect(),
            pieces: (0..mesh.triangles.len())
                .map(|t| {
                    let d = if mesh.triangles[t].class == TriangleClass::Ordinary { 5 } else { 6 };
                    Piece::zero(LocalFrame::of_triangle(&mesh.triangle_points(t)), d)
                })
                .collect(),
        }
    }

    /// Checks that the spline belongs to `mesh`.
    pub fn check_matches(&self, mesh: &Mesh) -> Result<()> {
        if self.pieces.len() != mesh.triangles.len() || self.classes.len() != self.pieces.len() {
            return Err(Error::InvalidInput(format!(
                "spline has {} pieces but the mesh has {} triangles",
                self.pieces.len(),
                mesh.triangles.len()
            )));
        }
        for (t, (c, p)) in self.classes.iter().zip(&self.pieces).enumerate() {
            let want = if *c == TriangleClass::Ordinary { 5 } else { 6 };
            if *c != mesh.triangles[t].class || p.degree() != want {
                return Err(Error::InvalidInput(format!(
                    "piece {t} does not match triangle class {:?}",
                    mesh.triangles[t].class
                )));
            }
        }
        Ok(())
    }

    /// `∂^α s(z)` for `|α| <= 2`, taken from the containing triangle.
    pub fn eval(&self, mesh: &Mesh, z: &Point, alpha: MultiIndex) -> Result<f64> {
        if alpha.0 + alpha.1 > 2 {
            return Err(Error::OrderMismatch {
                required: alpha.0 + alpha.1,
                available: 2,
            });
        }
        let t = mesh.locate(z, 0)?;
        Ok(self.pieces[t].eval(z, alpha))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Spline> {
        let s: Spline = serde_json::from_str(text)?;
        for (t, p) in s.pieces.iter().enumerate() {
            if p.poly.coeffs().len() != dim_p(p.degree()) || !(p.frame.scale > 0.0) {
                return Err(Error::InvalidInput(format!("piece {t} is malformed")));
            }
        }
        Ok(s)
    }
}
