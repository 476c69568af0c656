//! JSON mesh files.
//!
//! ```json
//! {
//!   "domain": { "conics": [[a, b, c, d, e, f]], "arcs": [...], "witness": [x, y] },
//!   "vertices": [{"x": 1.0, "y": 0.0, "boundary": true}, ...],
//!   "triangles": [{"vertices": [i, j, k], "class": "pie",
//!                  "curved_edge": {"arc": 0, "local_edge": 0}}, ...]
//! }
//! ```
//!
//! Conics in a mesh file are stored already normalized and are not
//! rescaled on load. Floats are written as shortest round-trip decimals, so
//! dump → load → dump reproduces the file byte for byte.

use serde::{Deserialize, Serialize};

use super::{CurvedEdge, Mesh, RawTriangle, TriangleClass, Vertex};
use crate::conic::DomainSpec;
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub x: f64,
    pub y: f64,
    pub boundary: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleRecord {
    pub vertices: [usize; 3],
    pub class: TriangleClass,
    pub curved_edge: Option<CurvedEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub domain: DomainSpec,
    pub vertices: Vec<VertexRecord>,
    pub triangles: Vec<TriangleRecord>,
}

impl Mesh {
    pub fn to_file(&self) -> MeshFile {
        MeshFile {
            domain: self.domain.to_spec(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexRecord {
                    x: v.pos.x,
                    y: v.pos.y,
                    boundary: v.boundary,
                })
                .collect(),
            triangles: self
                .triangles
                .iter()
                .map(|t| TriangleRecord {
                    vertices: t.vertices,
                    class: t.class,
                    curved_edge: t.curved_edge,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_file(file: &MeshFile) -> Result<Mesh> {
        let domain = file.domain.assemble()?;
        let vertices = file
            .vertices
            .iter()
            .map(|v| Vertex {
                pos: Point::new(v.x, v.y),
                boundary: v.boundary,
            })
            .collect();
        let raw = file
            .triangles
            .iter()
            .map(|t| RawTriangle {
                vertices: t.vertices,
                curved_edges: t.curved_edge.into_iter().collect(),
            })
            .collect();
        let mesh = Mesh::new(domain, vertices, raw)?;
        for (i, (t, rec)) in mesh.triangles.iter().zip(&file.triangles).enumerate() {
            if t.class != rec.class {
                return Err(Error::InvalidMesh(format!(
                    "triangle {i} is stored as {:?} but classifies as {:?}",
                    rec.class, t.class
                )));
            }
        }
        Ok(mesh)
    }

    pub fn from_json(text: &str) -> Result<Mesh> {
        let file: MeshFile = serde_json::from_str(text)?;
        Mesh::from_file(&file)
    }
}
