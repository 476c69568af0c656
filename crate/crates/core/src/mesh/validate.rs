use serde::{Deserialize, Serialize};

use super::{Mesh, TriangleClass};
use crate::geometry::{cross, orient};
use crate::tolerances::ARC_ENDPOINT_ABS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub description: String,
    pub passed: bool,
    pub offenders: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn condition(name: &str, description: &str, offenders: Vec<String>) -> ConditionResult {
    ConditionResult {
        name: name.to_string(),
        description: description.to_string(),
        passed: offenders.is_empty(),
        offenders,
    }
}

const STAR_SAMPLES: usize = 64;

impl Mesh {
    /// Checks conditions (A)–(F) plus the structural invariants the
    /// interpolation scheme relies on. Never fails; the report carries the
    /// offending entities.
    pub fn validate(&self) -> ValidationReport {
        let mut conditions = Vec::new();

        let mut conf = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let [a, b] = edge.vertices;
            let boundary_edge = edge.triangles.len() == 1;
            if boundary_edge != edge.is_curved() {
                conf.push(format!("edge {e} ({a}, {b})"));
            }
        }
        for (t, _) in self.triangles.iter().enumerate() {
            let p = self.triangle_points(t);
            if orient(&p[0], &p[1], &p[2]) <= 0.0 {
                conf.push(format!("triangle {t} (orientation)"));
            }
        }
        conditions.push(condition(
            "conformity",
            "interior edges have two triangles, boundary edges are curved and have one",
            conf,
        ));

        let mut a = Vec::new();
        for (j, arc) in self.domain.arcs.iter().enumerate() {
            let hit = self
                .vertices
                .iter()
                .any(|v| v.boundary && (v.pos - arc.start).norm() <= 1e-10);
            if !hit {
                a.push(format!("arc {j} start ({}, {})", arc.start.x, arc.start.y));
            }
        }
        conditions.push(condition("A", "arc endpoints are boundary vertices", a));

        let mut b = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let [v, w] = edge.vertices;
            if edge.is_interior() && self.vertices[v].boundary && self.vertices[w].boundary {
                b.push(format!("edge {e} ({v}, {w})"));
            }
        }
        conditions.push(condition(
            "B",
            "no interior edge has both endpoints on the boundary",
            b,
        ));

        let pairs = |class: TriangleClass| -> Vec<String> {
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| {
                    e.triangles.len() == 2
                        && e.triangles.iter().all(|&t| self.triangles[t].class == class)
                })
                .map(|(i, e)| format!("edge {i} (triangles {}, {})", e.triangles[0], e.triangles[1]))
                .collect()
        };
        conditions.push(condition(
            "C",
            "no pair of pie-shaped triangles shares an edge",
            pairs(TriangleClass::Pie),
        ));

        let mut d = Vec::new();
        let mut e_fail = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.class != TriangleClass::Pie {
                continue;
            }
            let g = self.pie_geometry(t).expect("pie triangle has a conic");
            let [v1, v2, v3] = [g.apex, g.b1, g.b2];
            if self.vertices[tri.vertices[0]].boundary
                || !self.vertices[tri.vertices[1]].boundary
                || !self.vertices[tri.vertices[2]].boundary
            {
                d.push(format!("triangle {t} (vertex roles)"));
                continue;
            }
            if g.conic.eval(&v2).abs() > ARC_ENDPOINT_ABS || g.conic.eval(&v3).abs() > ARC_ENDPOINT_ABS {
                e_fail.push(format!("triangle {t} (boundary vertex off conic)"));
            }
            // star-shaped w.r.t. v1: the angle of sampled arc points seen
            // from v1 must increase monotonically from v2 to v3
            let mut prev = v2 - v1;
            let mut star = true;
            for k in 1..=STAR_SAMPLES {
                match g.arc_point_normal(k as f64 / STAR_SAMPLES as f64) {
                    Some(a) => {
                        let cur = a - v1;
                        if cross(&prev, &cur) <= 0.0 {
                            star = false;
                        }
                        prev = cur;
                    }
                    None => star = false,
                }
            }
            if !star {
                d.push(format!("triangle {t}"));
                continue;
            }
            // (E): q > 0 at quadrature points of T and on its straight sides
            let mut ok = g.conic.eval(&v1) > 0.0;
            for p in crate::quadrature::pie_points(&g, 8) {
                ok &= g.conic.eval(&p) > 0.0;
            }
            for k in 1..16 {
                let s = k as f64 / 16.0;
                ok &= g.conic.eval(&(v1 + (v2 - v1) * s)) > 0.0;
                ok &= g.conic.eval(&(v1 + (v3 - v1) * s)) > 0.0;
            }
            if !ok {
                e_fail.push(format!("triangle {t}"));
            }
        }
        conditions.push(condition(
            "D",
            "every pie triangle is star-shaped with respect to its interior vertex",
            d,
        ));
        conditions.push(condition(
            "E",
            "q_j > 0 on every pie triangle away from its curved side",
            e_fail,
        ));

        conditions.push(condition(
            "F",
            "no pair of buffer triangles shares an edge",
            pairs(TriangleClass::Buffer),
        ));

        let single: Vec<String> = self
            .triangles
            .iter()
            .enumerate()
            .filter(|(_, tri)| tri.class == TriangleClass::Buffer)
            .filter(|(_, tri)| {
                tri.vertices
                    .iter()
                    .filter(|&&v| self.vertices[v].boundary)
                    .count()
                    != 1
            })
            .map(|(t, _)| format!("triangle {t}"))
            .collect();
        conditions.push(condition(
            "buffer_vertex",
            "every buffer triangle has exactly one boundary vertex",
            single,
        ));

        ValidationReport { conditions }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{CurvedEdge, Mesh, RawTriangle, Vertex};
    use crate::conic::Domain;
    use crate::geometry::pt;

    fn ring(n: usize, r: f64, offset: f64) -> Vec<crate::geometry::Point> {
        (0..n)
            .map(|k| {
                let a = offset + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                pt(r * a.cos(), r * a.sin())
            })
            .collect()
    }

    /// Two adjacent pie triangles sharing the apex edge, violating (C).
    #[test]
    fn adjacent_pies_fail_c() {
        let b = ring(8, 1.0, 0.0);
        let mut vertices: Vec<Vertex> = b.iter().map(|&p| Vertex { pos: p, boundary: true }).collect();
        vertices.push(Vertex { pos: pt(0.0, 0.0), boundary: false });
        let raw = (0..8)
            .map(|k| RawTriangle {
                vertices: [8, k, (k + 1) % 8],
                curved_edges: vec![CurvedEdge { arc: 0, local_edge: 0 }],
            })
            .collect();
        let m = Mesh::new(Domain::unit_disk(), vertices, raw).unwrap();
        let r = m.validate();
        assert!(!r.get("C").unwrap().passed);
        assert!(r.get("B").unwrap().passed);
    }

    /// Splitting one buffer triangle of a pie/buffer ring at an extra
    /// vertex `c` creates two buffers sharing the edge `(b_1, c)`.
    #[test]
    fn adjacent_buffers_fail_f() {
        let n = 8;
        let b = ring(n, 1.0, 0.0);
        let r = ring(n, 0.75, std::f64::consts::PI / n as f64);
        let mut vertices: Vec<Vertex> = b.iter().map(|&p| Vertex { pos: p, boundary: true }).collect();
        vertices.extend(r.iter().map(|&p| Vertex { pos: p, boundary: false }));
        let c = vertices.len();
        vertices.push(Vertex { pos: b[1] * 0.8, boundary: false });
        let mut raw = Vec::new();
        for k in 0..n {
            raw.push(RawTriangle {
                vertices: [n + k, k, (k + 1) % n],
                curved_edges: vec![CurvedEdge { arc: 0, local_edge: 0 }],
            });
        }
        for k in 0..n {
            if k == 1 {
                raw.push(RawTriangle { vertices: [1, n, c], curved_edges: vec![] });
                raw.push(RawTriangle { vertices: [1, c, n + 1], curved_edges: vec![] });
            } else {
                raw.push(RawTriangle {
                    vertices: [k, n + (k + n - 1) % n, n + k],
                    curved_edges: vec![],
                });
            }
        }
        raw.push(RawTriangle { vertices: [n, n + 1, c], curved_edges: vec![] });
        for k in 1..n - 1 {
            raw.push(RawTriangle { vertices: [n, n + k, n + k + 1], curved_edges: vec![] });
        }
        let m = Mesh::new(Domain::unit_disk(), vertices, raw).unwrap();
        let rep = m.validate();
        let f = rep.get("F").unwrap();
        assert!(!f.passed);
        assert_eq!(f.offenders.len(), 1);
        assert!(rep.get("C").unwrap().passed);
        assert!(rep.get("conformity").unwrap().passed);
    }
}
