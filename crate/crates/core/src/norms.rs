//! Error norms and continuity measurements for splines.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::interp::{Piece, Spline};
use crate::mesh::{edge_points, Mesh, TriangleClass};
use crate::nodal::{nodal_set_ordinary, HermiteData, Jet, NodalFunctional};
use crate::quadrature::{integrate_mesh_many, QuadratureRule};

/// Broken Sobolev errors `‖u - s‖_{H^k}` for `k = 0, 1, 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Seminorms `|u - s|_{H^k}`.
    pub seminorms: [f64; 3],
    /// Full norms, root-sums of the seminorms up to `k`.
    pub norms: [f64; 3],
    pub h: f64,
    pub ordinary: usize,
    pub pie: usize,
    pub buffer: usize,
}

/// Squared seminorm densities of `u - s` at one point.
fn densities(d: &Jet, out: &mut [f64]) {
    out[0] = d.value * d.value;
    out[1] = d.grad.norm_squared();
    // each multi-index with |α| = 2 counted once
    out[2] = d.hess[(0, 0)].powi(2) + d.hess[(0, 1)].powi(2) + d.hess[(1, 1)].powi(2);
}

pub fn error_report<H: HermiteData + ?Sized>(mesh: &Mesh, s: &Spline, u: &H) -> Result<ErrorReport> {
    s.check_matches(mesh)?;
    let rule = QuadratureRule::default_rule();
    let per = integrate_mesh_many(
        mesh,
        |t, p, out| densities(&u.jet(p).sub(&s.pieces[t].jet(p)), out),
        3,
        &rule,
    );
    let mut sq = [0.0; 3];
    for v in &per {
        for k in 0..3 {
            sq[k] += v[k];
        }
    }
    let seminorms = sq.map(|x| x.max(0.0).sqrt());
    let norms = [
        sq[0].sqrt(),
        (sq[0] + sq[1]).sqrt(),
        (sq[0] + sq[1] + sq[2]).sqrt(),
    ];
    Ok(ErrorReport {
        seminorms,
        norms,
        h: mesh.max_diameter(),
        ordinary: mesh.class_count(TriangleClass::Ordinary),
        pie: mesh.class_count(TriangleClass::Pie),
        buffer: mesh.class_count(TriangleClass::Buffer),
    })
}

/// `|u - s|_{H^k}` (`full = false`) or `‖u - s‖_{H^k}` (`full = true`).
pub fn error_norm<H: HermiteData + ?Sized>(
    mesh: &Mesh,
    s: &Spline,
    u: &H,
    k: usize,
    full: bool,
) -> Result<f64> {
    if k > 2 {
        return Err(Error::OrderMismatch {
            required: k,
            available: 2,
        });
    }
    let r = error_report(mesh, s, u)?;
    Ok(if full { r.norms[k] } else { r.seminorms[k] })
}

/// Magnitude scale of a piece near a triangle: `max(|P|, h|∇P|, h²|∇²P|)`
/// over the vertices and centroid, used to make jumps relative.
fn piece_scale(piece: &Piece, pts: &[Point; 3], h: f64) -> f64 {
    let c = (pts[0] + pts[1] + pts[2]) / 3.0;
    pts.iter()
        .chain(std::iter::once(&c))
        .map(|p| {
            let j = piece.jet(p);
            j.value.abs().max(h * j.grad.norm()).max(h * h * j.hess.norm())
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeJump {
    pub edge: usize,
    /// Largest value jump divided by the local scale.
    pub value: f64,
    /// Largest jump of `∂s/∂τ⊥`, times `h`, divided by the local scale.
    pub normal: f64,
}

/// Jumps of `s` and of its normal derivative across interior edge `e`,
/// sampled at `n_samples` equispaced points including the endpoints.
pub fn c1_jump(mesh: &Mesh, s: &Spline, e: usize, n_samples: usize) -> Result<EdgeJump> {
    let edge = &mesh.edges[e];
    if edge.triangles.len() != 2 {
        return Err(Error::InvalidInput(format!("edge {e} is not an interior edge")));
    }
    let (t1, t2) = (edge.triangles[0], edge.triangles[1]);
    let (a, b) = mesh.edge_points(e);
    let n = mesh.edge_normal(e);
    let h = (b - a).norm();
    let (p1, p2) = (&s.pieces[t1], &s.pieces[t2]);
    let scale = piece_scale(p1, &mesh.triangle_points(t1), h)
        .max(piece_scale(p2, &mesh.triangle_points(t2), h))
        .max(f64::MIN_POSITIVE);
    let (mut dv, mut dn): (f64, f64) = (0.0, 0.0);
    for k in 0..n_samples.max(2) {
        let z = a + (b - a) * (k as f64 / (n_samples.max(2) - 1) as f64);
        let (j1, j2) = (p1.jet(&z), p2.jet(&z));
        dv = dv.max((j1.value - j2.value).abs());
        dn = dn.max((j1.grad - j2.grad).dot(&n).abs() * h);
    }
    Ok(EdgeJump {
        edge: e,
        value: dv / scale,
        normal: dn / scale,
    })
}

/// Jumps over all interior edges, in edge order.
pub fn all_jumps(mesh: &Mesh, s: &Spline, n_samples: usize) -> Vec<EdgeJump> {
    (0..mesh.edges.len())
        .into_par_iter()
        .filter(|&e| mesh.edges[e].triangles.len() == 2)
        .map(|e| c1_jump(mesh, s, e, n_samples).expect("interior edge"))
        .collect()
}

/// Largest disagreement of value, gradient and Hessian between the pieces
/// meeting at each vertex, relative to `max(|s|, h|∇s|, h²|∇²s|)`.
/// Returns `(worst, vertex)`.
pub fn vertex_mismatch(mesh: &Mesh, s: &Spline) -> (f64, usize) {
    let incident = mesh.vertex_triangles();
    incident
        .par_iter()
        .enumerate()
        .map(|(v, ts)| {
            let z = mesh.vertices[v].pos;
            let h = ts.iter().map(|&t| mesh.diameter(t)).fold(0.0, f64::max);
            let jets: Vec<Jet> = ts.iter().map(|&t| s.pieces[t].jet(&z)).collect();
            let mag = |j: &Jet| j.value.abs().max(h * j.grad.norm()).max(h * h * j.hess.norm());
            let scale = jets.iter().map(mag).fold(f64::MIN_POSITIVE, f64::max);
            let mut worst: f64 = 0.0;
            for a in &jets {
                for b in &jets {
                    worst = worst.max(mag(&a.sub(b)) / scale);
                }
            }
            (worst, v)
        })
        .reduce(|| (0.0, 0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
}

/// Largest `|s|` over `n_per_arc` points of each boundary arc, and the
/// sup-norm estimate of `s` it is compared against.
pub fn boundary_trace(mesh: &Mesh, s: &Spline, n_per_arc: usize) -> Result<(f64, f64)> {
    let pies: Vec<usize> = (0..mesh.triangles.len())
        .filter(|&t| mesh.triangles[t].class == TriangleClass::Pie)
        .collect();
    let mut trace: f64 = 0.0;
    for j in 0..mesh.domain.arcs.len() {
        for z in mesh.domain.arc_samples(j, n_per_arc)? {
            let t = pies
                .iter()
                .copied()
                .find(|&t| mesh.pie_geometry(t).is_some_and(|g| g.contains(&z)))
                .ok_or(Error::OutsideDomain(z.x, z.y))?;
            trace = trace.max(s.pieces[t].jet(&z).value.abs());
        }
    }
    Ok((trace, sup_norm(mesh, s)))
}

/// `max |s|` over the vertices, edge points and quadrature points.
pub fn sup_norm(mesh: &Mesh, s: &Spline) -> f64 {
    let rule = QuadratureRule::triangle(6);
    (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let p = mesh.triangle_points(t);
            let piece = &s.pieces[t];
            let mut m: f64 = 0.0;
            let mut pts: Vec<Point> = p.to_vec();
            for k in 0..3 {
                pts.extend(edge_points(&p[k], &p[(k + 1) % 3]));
            }
            let inside: Vec<Point> = match mesh.pie_geometry(t) {
                Some(g) => crate::quadrature::pie_points(&g, 4),
                None => rule.map(&p).map(|(z, _)| z).collect(),
            };
            for z in pts.iter().chain(&inside) {
                m = m.max(piece.jet(z).value.abs());
            }
            m
        })
        .reduce(|| 0.0, f64::max)
}

/// Residuals of the interpolation conditions satisfied by `I_△ u`, each
/// measured as `|η s - η u| / max(1, |η u|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionResiduals {
    /// Order `<= 2` data at every vertex, from every incident piece.
    pub vertex: f64,
    /// Normal derivatives at edge midpoints of ordinary triangles.
    pub edge_normal: f64,
    /// Order `<= 1` data at `c_T` of pie triangles.
    pub pie_center: f64,
    /// Values at buffer barycenters.
    pub buffer_barycenter: f64,
}

impl ConditionResiduals {
    pub fn max(&self) -> f64 {
        self.vertex
            .max(self.edge_normal)
            .max(self.pie_center)
            .max(self.buffer_barycenter)
    }
}

fn residual<H: HermiteData + ?Sized>(piece: &Piece, u: &H, eta: &NodalFunctional) -> Result<f64> {
    let want = eta.apply(u)?;
    Ok((piece.apply(eta) - want).abs() / want.abs().max(1.0))
}

pub fn condition_residuals<H: HermiteData + ?Sized>(
    mesh: &Mesh,
    s: &Spline,
    u: &H,
) -> Result<ConditionResiduals> {
    s.check_matches(mesh)?;
    let per: Vec<[f64; 4]> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| -> Result<[f64; 4]> {
            let piece = &s.pieces[t];
            let p = mesh.triangle_points(t);
            let mut r = [0.0f64; 4];
            for v in p {
                for (dx, dy) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
                    r[0] = r[0].max(residual(piece, u, &NodalFunctional::partial(v, dx, dy))?);
                }
            }
            match mesh.triangles[t].class {
                TriangleClass::Ordinary => {
                    for eta in nodal_set_ordinary(mesh, t).iter().skip(18) {
                        r[1] = r[1].max(residual(piece, u, eta)?);
                    }
                }
                TriangleClass::Pie => {
                    let c = mesh.inscribed_disk(t)?.center;
                    for (dx, dy) in [(0, 0), (1, 0), (0, 1)] {
                        r[2] = r[2].max(residual(piece, u, &NodalFunctional::partial(c, dx, dy))?);
                    }
                }
                TriangleClass::Buffer => {
                    let c = (p[0] + p[1] + p[2]) / 3.0;
                    r[3] = residual(piece, u, &NodalFunctional::partial(c, 0, 0))?;
                }
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let m = per.iter().fold([0.0f64; 4], |a, b| {
        [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]), a[3].max(b[3])]
    });
    Ok(ConditionResiduals {
        vertex: m[0],
        edge_normal: m[1],
        pie_center: m[2],
        buffer_barycenter: m[3],
    })
}

/// Summary of the continuity and boundary checks on a spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub tolerance: f64,
    pub max_value_jump: f64,
    pub max_normal_jump: f64,
    /// Interior edges whose value or normal jump exceeds the tolerance.
    pub offending_edges: Vec<EdgeJump>,
    pub vertex_mismatch: f64,
    pub worst_vertex: usize,
    pub boundary_trace: f64,
    pub sup_norm: f64,
    pub passed: bool,
}

/// Runs `c1_jump` on every interior edge, the vertex second-order check and
/// the boundary trace (relative to `sup |s|`, at the tighter `1e-9`).
pub fn continuity_report(mesh: &Mesh, s: &Spline, n_samples: usize, tol: f64) -> Result<ContinuityReport> {
    s.check_matches(mesh)?;
    let jumps = all_jumps(mesh, s, n_samples);
    let max_value_jump = jumps.iter().map(|j| j.value).fold(0.0, f64::max);
    let max_normal_jump = jumps.iter().map(|j| j.normal).fold(0.0, f64::max);
    let offending_edges: Vec<EdgeJump> = jumps
        .into_iter()
        .filter(|j| j.value > tol || j.normal > tol)
        .collect();
    let (vm, worst_vertex) = vertex_mismatch(mesh, s);
    let (trace, sup) = boundary_trace(mesh, s, 100)?;
    let passed = offending_edges.is_empty()
        && vm <= tol
        && trace <= crate::tolerances::BOUNDARY_TRACE_REL * sup;
    Ok(ContinuityReport {
        tolerance: tol,
        max_value_jump,
        max_normal_jump,
        offending_edges,
        vertex_mismatch: vm,
        worst_vertex,
        boundary_trace: trace,
        sup_norm: sup,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::Domain;
    use crate::interp::{interpolate, LocalFrame};
    use crate::mesh::generate_disk_mesh;
    use crate::poly::Poly2;

    fn mesh16() -> Mesh {
        generate_disk_mesh(&Domain::unit_disk(), 16).unwrap()
    }

    /// Every piece is the same global polynomial, expressed in its own frame.
    fn global_poly_spline(m: &Mesh, p: &Poly2) -> Spline {
        let mut s = Spline::zero(m);
        for (t, piece) in s.pieces.iter_mut().enumerate() {
            let f = LocalFrame::of_triangle(&m.triangle_points(t));
            let d = piece.degree();
            piece.poly = p.compose_affine(&f.origin, f.scale).with_degree(d).unwrap();
        }
        s
    }

    #[test]
    fn zero_error_for_zero() {
        let m = mesh16();
        let s = Spline::zero(&m);
        let r = error_report(&m, &s, &Poly2::zero(0)).unwrap();
        assert_eq!(r.norms, [0.0; 3]);
        assert!(error_norm(&m, &s, &Poly2::zero(0), 3, false).is_err());
    }

    #[test]
    fn reproduced_conic_has_tiny_error() {
        let m = mesh16();
        let q = m.domain.conics[0];
        let s = interpolate(&m, &q).unwrap();
        let r = error_report(&m, &s, &q).unwrap();
        assert!(r.norms[2] <= 1e-8, "{:?}", r.norms);
    }

    #[test]
    fn norm_scales_linearly() {
        let m = mesh16();
        let s = Spline::zero(&m);
        let u = Poly2::from_coeffs(2, vec![0.3, 1.0, -0.5, 0.2, 0.7, -0.1]).unwrap();
        let base = error_report(&m, &s, &u).unwrap();
        for c in [2.0, 10.0] {
            let r = error_report(&m, &s, &(&u * c)).unwrap();
            for k in 0..3 {
                assert!((r.norms[k] - c * base.norms[k]).abs() <= 1e-10 * c * base.norms[k]);
            }
        }
        // ∫ 1 over the disk is π
        let one = Poly2::constant(1.0);
        let r = error_report(&m, &s, &one).unwrap();
        assert!((r.norms[0] - std::f64::consts::PI.sqrt()).abs() < 1e-9);
        assert_eq!(r.seminorms[1], 0.0);
    }

    #[test]
    fn global_polynomial_has_no_jumps() {
        let m = mesh16();
        let p = Poly2::from_coeffs(3, (0..10).map(|k| 0.1 * k as f64 - 0.4).collect()).unwrap();
        let s = global_poly_spline(&m, &p);
        for j in all_jumps(&m, &s, 20) {
            assert!(j.value <= 1e-12 && j.normal <= 1e-12, "{j:?}");
        }
        assert!(vertex_mismatch(&m, &s).0 <= 1e-12);
    }

    #[test]
    fn bubble_jump_is_detected() {
        let m = mesh16();
        let e = (0..m.edges.len()).find(|&e| m.edges[e].triangles.len() == 2).unwrap();
        let mut s = Spline::zero(&m);
        // adding the edge's line equation to one side leaves the trace
        // unchanged but creates a normal-derivative jump
        let (a, _) = m.edge_points(e);
        let n = m.edge_normal(e);
        let t = m.edges[e].triangles[0];
        let f = s.pieces[t].frame;
        // L(x) = n · (x - a), in local coordinates
        let l = Poly2::from_coeffs(1, vec![n.dot(&(f.origin - a)), n.x * f.scale, n.y * f.scale]).unwrap();
        s.pieces[t].poly = &s.pieces[t].poly + &l.with_degree(s.pieces[t].degree()).unwrap();
        let j = c1_jump(&m, &s, e, 50).unwrap();
        assert!(j.value < 1e-14, "{j:?}");
        assert!(j.normal > 1e-3, "{j:?}");
        let same = c1_jump(&m, &Spline::zero(&m), e, 50).unwrap();
        assert_eq!((same.value, same.normal), (0.0, 0.0));
        let boundary = (0..m.edges.len()).find(|&e| m.edges[e].triangles.len() == 1).unwrap();
        assert!(c1_jump(&m, &s, boundary, 10).is_err());
    }

    #[test]
    fn conic_spline_vanishes_on_boundary() {
        let m = mesh16();
        let s = interpolate(&m, &m.domain.conics[0]).unwrap();
        let (trace, sup) = boundary_trace(&m, &s, 100).unwrap();
        assert!(trace <= 1e-9 * sup, "{trace} vs {sup}");
        assert!((sup - 0.5).abs() < 1e-3);
    }
}
