//! Triangulations of conic-bounded domains.
//!
//! Local vertex and edge conventions: edge `i` of a triangle joins the two
//! vertices other than vertex `i`. After [`Mesh::classify`]
//!
//! * a pie triangle has its interior vertex at position 0, so its curved
//!   edge is local edge 0;
//! * a buffer triangle with exactly one boundary vertex has it at position
//!   0, so `e₁ = ⟨v₂, v₃⟩` is local edge 0, `e₂ = ⟨v₁, v₂⟩` is local edge 2
//!   and `e₃ = ⟨v₁, v₃⟩` is local edge 1.
//!
//! Vertex order is always counter-clockwise.

mod disk;
mod generate;
mod io;
mod validate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::conic::{Conic, Domain};
use crate::error::{Error, Result};
use crate::geometry::{barycentric, diameter, orient, perp, Point, Vec2};
use crate::tolerances::CONTAINMENT_SLACK;

pub use disk::InscribedDisk;
pub use generate::generate_disk_mesh;
pub use io::{MeshFile, TriangleRecord, VertexRecord};
pub use validate::{ConditionResult, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleClass {
    Ordinary,
    Pie,
    Buffer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvedEdge {
    pub arc: usize,
    pub local_edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub pos: Point,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub class: TriangleClass,
    pub curved_edge: Option<CurvedEdge>,
}

/// Triangle as supplied to [`Mesh::new`]; may list any number of curved
/// edges so that classification can reject invalid input.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTriangle {
    pub vertices: [usize; 3],
    pub curved_edges: Vec<CurvedEdge>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints, lexicographically smaller position first.
    pub vertices: [usize; 2],
    pub triangles: Vec<usize>,
    pub arc: Option<usize>,
}

impl Edge {
    pub fn is_curved(&self) -> bool {
        self.arc.is_some()
    }

    pub fn is_interior(&self) -> bool {
        self.triangles.len() == 2
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub domain: Domain,
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    /// Global edge id of each local edge.
    pub triangle_edges: Vec<[usize; 3]>,
    edge_lookup: HashMap<(usize, usize), usize>,
}

fn lex_less(a: &Point, b: &Point) -> bool {
    a.x < b.x || (a.x == b.x && a.y < b.y)
}

impl Mesh {
    /// Builds edges and adjacency, orients triangles counter-clockwise and
    /// classifies them.
    pub fn new(domain: Domain, vertices: Vec<Vertex>, raw: Vec<RawTriangle>) -> Result<Mesh> {
        let mut triangles = Vec::with_capacity(raw.len());
        for (t, r) in raw.into_iter().enumerate() {
            if r.vertices.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            if r.curved_edges.len() > 1 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has {} curved edges (at most one allowed)",
                    r.curved_edges.len()
                )));
            }
            let mut curved = r.curved_edges.first().copied();
            if let Some(c) = curved {
                if c.local_edge > 2 || c.arc >= domain.arcs.len() {
                    return Err(Error::InvalidMesh(format!(
                        "triangle {t} has an invalid curved edge {c:?}"
                    )));
                }
            }
            let mut v = r.vertices;
            let p = v.map(|i| vertices[i].pos);
            let o = orient(&p[0], &p[1], &p[2]);
            if o == 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {t} is degenerate")));
            }
            if o < 0.0 {
                v.swap(1, 2);
                if let Some(c) = curved.as_mut() {
                    c.local_edge = [0, 2, 1][c.local_edge];
                }
            }
            triangles.push(Triangle {
                vertices: v,
                class: TriangleClass::Ordinary,
                curved_edge: curved,
            });
        }
        let mut mesh = Mesh {
            domain,
            vertices,
            triangles,
            edges: Vec::new(),
            triangle_edges: Vec::new(),
            edge_lookup: HashMap::new(),
        };
        mesh.classify()?;
        Ok(mesh)
    }

    fn build_edges(&mut self) -> Result<()> {
        self.edges.clear();
        self.edge_lookup.clear();
        self.triangle_edges = vec![[0; 3]; self.triangles.len()];
        for t in 0..self.triangles.len() {
            for k in 0..3 {
                let (a, b) = self.local_edge_vertices(t, k);
                let key = (a.min(b), a.max(b));
                let arc = self.triangles[t]
                    .curved_edge
                    .filter(|c| c.local_edge == k)
                    .map(|c| c.arc);
                let id = match self.edge_lookup.get(&key) {
                    Some(&id) => id,
                    None => {
                        let (pa, pb) = (self.vertices[a].pos, self.vertices[b].pos);
                        let ends = if lex_less(&pa, &pb) { [a, b] } else { [b, a] };
                        self.edges.push(Edge {
                            vertices: ends,
                            triangles: Vec::new(),
                            arc: None,
                        });
                        self.edge_lookup.insert(key, self.edges.len() - 1);
                        self.edges.len() - 1
                    }
                };
                let e = &mut self.edges[id];
                e.triangles.push(t);
                if e.triangles.len() > 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({}, {}) is shared by more than two triangles",
                        key.0, key.1
                    )));
                }
                if arc.is_some() {
                    if e.triangles.len() > 1 {
                        return Err(Error::InvalidMesh(format!(
                            "curved edge ({}, {}) has two incident triangles",
                            key.0, key.1
                        )));
                    }
                    e.arc = arc;
                } else if e.arc.is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "curved edge ({}, {}) has two incident triangles",
                        key.0, key.1
                    )));
                }
                self.triangle_edges[t][k] = id;
            }
        }
        Ok(())
    }

    /// Assigns pie / buffer / ordinary classes and local vertex roles.
    /// Idempotent.
    pub fn classify(&mut self) -> Result<()> {
        // roles first so that local edge numbering is final
        for t in &mut self.triangles {
            if let Some(c) = t.curved_edge {
                let r = c.local_edge;
                t.vertices.rotate_left(r);
                t.curved_edge = Some(CurvedEdge {
                    arc: c.arc,
                    local_edge: 0,
                });
                t.class = TriangleClass::Pie;
            } else {
                t.class = TriangleClass::Ordinary;
            }
        }
        self.build_edges()?;
        let mut buffer = vec![false; self.triangles.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.class == TriangleClass::Pie {
                continue;
            }
            buffer[t] = self.triangle_edges[t].iter().any(|&e| {
                self.edges[e]
                    .triangles
                    .iter()
                    .any(|&o| self.triangles[o].class == TriangleClass::Pie)
            });
        }
        for (t, is_buffer) in buffer.into_iter().enumerate() {
            if !is_buffer {
                continue;
            }
            self.triangles[t].class = TriangleClass::Buffer;
            let bnd: Vec<usize> = (0..3)
                .filter(|&k| self.vertices[self.triangles[t].vertices[k]].boundary)
                .collect();
            if bnd.len() == 1 && bnd[0] != 0 {
                self.triangles[t].vertices.rotate_left(bnd[0]);
            }
        }
        self.build_edges()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].vertices.map(|v| self.vertices[v].pos)
    }

    /// Vertex ids of local edge `k` (the edge opposite local vertex `k`).
    pub fn local_edge_vertices(&self, t: usize, k: usize) -> (usize, usize) {
        let v = self.triangles[t].vertices;
        (v[(k + 1) % 3], v[(k + 2) % 3])
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn edge_points(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a].pos, self.vertices[b].pos)
    }

    /// Unit normal `τ⊥` of a straight edge: the direction from the
    /// lexicographically smaller endpoint to the larger one, rotated +90°.
    pub fn edge_normal(&self, e: usize) -> Vec2 {
        let (a, b) = self.edge_points(e);
        perp(&(b - a).normalize())
    }

    /// The triangle across local edge `k` of `t`, if any.
    pub fn neighbor(&self, t: usize, k: usize) -> Option<usize> {
        self.edges[self.triangle_edges[t][k]]
            .triangles
            .iter()
            .copied()
            .find(|&o| o != t)
    }

    pub fn class_count(&self, class: TriangleClass) -> usize {
        self.triangles.iter().filter(|t| t.class == class).count()
    }

    /// Conic carrying the curved edge of pie triangle `t`.
    pub fn pie_conic(&self, t: usize) -> Option<&Conic> {
        self.triangles[t]
            .curved_edge
            .map(|c| &self.domain.conics[self.domain.arcs[c.arc].conic])
    }

    pub fn pie_geometry(&self, t: usize) -> Option<PieGeometry> {
        let conic = *self.pie_conic(t)?;
        let [apex, b1, b2] = self.triangle_points(t);
        Some(PieGeometry {
            apex,
            b1,
            b2,
            conic,
        })
    }

    /// Diameter `h_T`; for pie triangles the arc is sampled at 100 points.
    pub fn diameter(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        match self.pie_geometry(t) {
            Some(g) => {
                let mut pts = p.to_vec();
                for k in 1..100 {
                    if let Some(a) = g.arc_point_normal(k as f64 / 100.0) {
                        pts.push(a);
                    }
                }
                diameter(&pts)
            }
            None => diameter(&p),
        }
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.diameter(t))
            .fold(0.0, f64::max)
    }

    /// `R = max h_T / ρ_T`.
    pub fn shape_regularity(&self) -> Result<f64> {
        let mut r: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let disk = self.inscribed_disk(t)?;
            r = r.max(self.diameter(t) / disk.radius);
        }
        Ok(r)
    }

    /// Whether `z` lies in the closed triangle `t` (with the arc replacing
    /// the chord for pie triangles).
    pub fn contains(&self, t: usize, z: &Point) -> bool {
        let p = self.triangle_points(t);
        match self.pie_geometry(t) {
            None => {
                let l = barycentric(&p, z);
                l.iter().all(|&c| c >= -CONTAINMENT_SLACK)
            }
            Some(g) => g.contains(z),
        }
    }

    /// Locates the triangle containing `z` by walking across edges from
    /// `start`; ties are broken by the lowest triangle id.
    pub fn locate(&self, z: &Point, start: usize) -> Result<usize> {
        let n = self.triangles.len();
        let mut t = start.min(n.saturating_sub(1));
        let mut found = None;
        for _ in 0..(4 * n).max(16) {
            if self.contains(t, z) {
                found = Some(t);
                break;
            }
            let l = barycentric(&self.triangle_points(t), z);
            let k = (0..3)
                .min_by(|&a, &b| l[a].partial_cmp(&l[b]).unwrap())
                .unwrap();
            match self.neighbor(t, k) {
                Some(o) => t = o,
                None => break,
            }
        }
        let hit = match found {
            Some(t) => t,
            None => (0..n)
                .find(|&t| self.contains(t, z))
                .ok_or(Error::OutsideDomain(z.x, z.y))?,
        };
        // lowest id among triangles sharing a vertex with the hit
        let verts = self.triangles[hit].vertices;
        let best = self
            .triangles
            .iter()
            .enumerate()
            .filter(|(_, tri)| tri.vertices.iter().any(|v| verts.contains(v)))
            .map(|(i, _)| i)
            .filter(|&i| i < hit && self.contains(i, z))
            .min()
            .unwrap_or(hit);
        Ok(best)
    }

    /// Triangles incident to each vertex.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in &tri.vertices {
                out[v].push(t);
            }
        }
        out
    }

    /// Total area, integrating pie triangles exactly over their curved side.
    pub fn area(&self) -> f64 {
        crate::quadrature::mesh_measure(self)
    }
}

/// `z_e^j = v' + (j/4)(v'' - v')` for `j = 1, 2, 3`.
pub fn edge_points(v1: &Point, v2: &Point) -> [Point; 3] {
    [1.0, 2.0, 3.0].map(|j| v1 + (v2 - v1) * (j / 4.0))
}

/// Geometry of a pie triangle: interior vertex `apex`, boundary vertices
/// `b1`, `b2` (counter-clockwise) and the conic through the curved side.
#[derive(Debug, Clone, Copy)]
pub struct PieGeometry {
    pub apex: Point,
    pub b1: Point,
    pub b2: Point,
    pub conic: Conic,
}

impl PieGeometry {
    pub fn chord_point(&self, t: f64) -> Point {
        self.b1 + (self.b2 - self.b1) * t
    }

    /// `λ(t)`: the ray from the apex through the chord point `c(t)` meets the
    /// arc at `apex + λ(t)(c(t) - apex)`.
    pub fn ray_factor(&self, t: f64) -> Option<f64> {
        let d = self.chord_point(t) - self.apex;
        let hit = self.conic.intersect_ray(&self.apex, &d).ok()?;
        hit.first().map(|p| (p - self.apex).dot(&d) / d.norm_squared())
    }

    /// Arc point on the ray from the apex through `c(t)`.
    pub fn arc_point_ray(&self, t: f64) -> Option<Point> {
        if t <= 0.0 {
            return Some(self.b1);
        }
        if t >= 1.0 {
            return Some(self.b2);
        }
        let lam = self.ray_factor(t)?;
        Some(self.apex + (self.chord_point(t) - self.apex) * lam)
    }

    /// Arc point obtained by projecting `c(t)` onto the conic along the
    /// chord normal. Independent of the apex, so usable to test
    /// star-shapedness.
    pub fn arc_point_normal(&self, t: f64) -> Option<Point> {
        if t <= 0.0 {
            return Some(self.b1);
        }
        if t >= 1.0 {
            return Some(self.b2);
        }
        let nrm = perp(&(self.b2 - self.b1).normalize());
        self.conic.project_along(&self.chord_point(t), &nrm)
    }

    pub fn straight(&self) -> [Point; 3] {
        [self.apex, self.b1, self.b2]
    }

    pub fn contains(&self, z: &Point) -> bool {
        let s = (self.b1 - self.apex).norm().max((self.b2 - self.apex).norm());
        let slack = CONTAINMENT_SLACK * s;
        // inside the wedge at the apex
        if orient(&self.apex, &self.b1, z) < -slack * s
            || orient(&self.apex, z, &self.b2) < -slack * s
        {
            return false;
        }
        let chord = self.b2 - self.b1;
        let d = z - self.apex;
        let denom = crate::geometry::cross(&d, &chord);
        if denom.abs() <= f64::MIN_POSITIVE {
            return (z - self.apex).norm() <= slack;
        }
        // z = apex + r (c(t) - apex)
        let t = crate::geometry::cross(&d, &(self.apex - self.b1)) / denom;
        let c = self.chord_point(t.clamp(0.0, 1.0));
        let r = d.dot(&(c - self.apex)) / (c - self.apex).norm_squared();
        match self.ray_factor(t.clamp(0.0, 1.0)) {
            Some(lam) => r <= lam + CONTAINMENT_SLACK,
            None => false,
        }
    }
}
