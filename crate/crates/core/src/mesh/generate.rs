//! Structured meshes of oval domains.
//!
//! Layout, from the boundary inwards:
//!
//! * `n` boundary vertices `b_k` on rays from the conic centre at equal
//!   angles, starting at the arc start point (the single corner `z_1`);
//! * a ring of `n` pie apexes `r_k` on the mid-angle rays; pie `k` is
//!   `(r_k, b_k, b_{k+1})` and buffer `k` is `(b_k, r_{k-1}, r_k)`, so
//!   pies only touch buffers and buffers only touch each other at vertices;
//! * concentric rings of ordinary triangles with roughly constant spacing,
//!   stitched by angle, closed by a fan around the centre.

use std::f64::consts::PI;

use super::{CurvedEdge, Mesh, RawTriangle, Vertex};
use crate::conic::Domain;
use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};

const MIN_BOUNDARY_VERTICES: usize = 8;
const MIN_RING_VERTICES: usize = 6;
const ROW_HEIGHT: f64 = 0.866_025_403_784_438_6; // √3/2

struct Ring {
    ids: Vec<usize>,
    angles: Vec<f64>,
}

pub fn generate_disk_mesh(domain: &Domain, n: usize) -> Result<Mesh> {
    if !domain.is_closed_oval() {
        return Err(Error::Generation(
            "the generator needs a domain bounded by a single closed conic arc".into(),
        ));
    }
    if n < MIN_BOUNDARY_VERTICES {
        return Err(Error::Generation(format!(
            "n = {n} is too small: the pie and buffer layers need at least \
             {MIN_BOUNDARY_VERTICES} boundary vertices, otherwise the pie apexes \
             collide near the centre and buffer triangles cannot be kept from \
             sharing edges (condition F)"
        )));
    }
    let arc = &domain.arcs[0];
    let q = domain.conics[arc.conic];
    let center = q
        .center()
        .filter(|c| q.eval(c) > 0.0)
        .ok_or_else(|| Error::Generation("conic is not a bounded oval around its centre".into()))?;
    let radial = |theta: f64| -> Result<Point> {
        q.intersect_ray(&center, &Vec2::new(theta.cos(), theta.sin()))?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Generation(format!("ray at angle {theta} misses the conic")))
    };
    let at = |theta: f64, s: f64| -> Result<Point> { Ok(center + (radial(theta)? - center) * s) };

    let theta0 = (arc.start.y - center.y).atan2(arc.start.x - center.x);
    let step = 2.0 * PI / n as f64;

    let mut vertices = Vec::new();
    for k in 0..n {
        let pos = if k == 0 { arc.start } else { radial(theta0 + k as f64 * step)? };
        vertices.push(Vertex { pos, boundary: true });
    }

    let s0 = 1.0 - ROW_HEIGHT * step;
    let mut rings = Vec::new();
    let apex_angles: Vec<f64> = (0..n).map(|k| theta0 + (k as f64 + 0.5) * step).collect();
    let mut ids = Vec::with_capacity(n);
    for &a in &apex_angles {
        ids.push(vertices.len());
        vertices.push(Vertex { pos: at(a, s0)?, boundary: false });
    }
    rings.push(Ring { ids, angles: apex_angles });

    let (mut s, mut m, mut offset) = (s0, n, theta0 + 0.5 * step);
    loop {
        let spacing = 2.0 * PI * s / m as f64;
        let s_next = s - ROW_HEIGHT * spacing;
        let m_next = (2.0 * PI * s_next / spacing).round();
        if m_next < MIN_RING_VERTICES as f64 || s_next < 0.5 * spacing {
            break;
        }
        let m_next = m_next as usize;
        offset += PI / m_next as f64;
        let angles: Vec<f64> = (0..m_next)
            .map(|k| offset + 2.0 * PI * k as f64 / m_next as f64)
            .collect();
        let mut ids = Vec::with_capacity(m_next);
        for &a in &angles {
            ids.push(vertices.len());
            vertices.push(Vertex { pos: at(a, s_next)?, boundary: false });
        }
        rings.push(Ring { ids, angles });
        s = s_next;
        m = m_next;
    }
    let center_id = vertices.len();
    vertices.push(Vertex { pos: center, boundary: false });

    let mut raw = Vec::new();
    let apex = &rings[0].ids;
    for k in 0..n {
        raw.push(RawTriangle {
            vertices: [apex[k], k, (k + 1) % n],
            curved_edges: vec![CurvedEdge { arc: 0, local_edge: 0 }],
        });
    }
    for k in 0..n {
        raw.push(RawTriangle {
            vertices: [k, apex[(k + n - 1) % n], apex[k]],
            curved_edges: vec![],
        });
    }
    for w in rings.windows(2) {
        stitch(&w[0], &w[1], &mut raw);
    }
    let last = rings.last().expect("at least the apex ring");
    let c = last.ids.len();
    for k in 0..c {
        raw.push(RawTriangle {
            vertices: [center_id, last.ids[k], last.ids[(k + 1) % c]],
            curved_edges: vec![],
        });
    }
    Mesh::new(domain.clone(), vertices, raw)
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// Triangulates the annulus between two rings by advancing along whichever
/// ring has the smaller next angle.
fn stitch(outer: &Ring, inner: &Ring, out: &mut Vec<RawTriangle>) {
    let (ma, mb) = (outer.ids.len(), inner.ids.len());
    let a0 = outer.angles[0];
    let j0 = (0..mb)
        .min_by(|&x, &y| {
            wrap(inner.angles[x] - a0)
                .abs()
                .partial_cmp(&wrap(inner.angles[y] - a0).abs())
                .unwrap()
        })
        .unwrap();
    let b0 = a0 + wrap(inner.angles[j0] - a0);
    let alpha = |i: usize| a0 + 2.0 * PI * i as f64 / ma as f64;
    let beta = |j: usize| b0 + 2.0 * PI * j as f64 / mb as f64;
    let a_id = |i: usize| outer.ids[i % ma];
    let b_id = |j: usize| inner.ids[(j0 + j) % mb];
    let (mut i, mut j) = (0, 0);
    while i < ma || j < mb {
        let advance_outer = if i == ma {
            false
        } else if j == mb {
            true
        } else {
            alpha(i + 1) <= beta(j + 1)
        };
        if advance_outer {
            out.push(RawTriangle {
                vertices: [a_id(i), a_id(i + 1), b_id(j)],
                curved_edges: vec![],
            });
            i += 1;
        } else {
            out.push(RawTriangle {
                vertices: [a_id(i), b_id(j + 1), b_id(j)],
                curved_edges: vec![],
            });
            j += 1;
        }
    }
}
