//! C¹ piecewise polynomial Hermite interpolation of Argyris type on planar
//! domains bounded by conic arcs, with homogeneous boundary values.

pub mod conic;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod mesh;
pub mod nodal;
pub mod norms;
pub mod poly;
pub mod quadrature;
pub mod study;
pub mod testfn;
pub mod tolerances;

pub use conic::{Arc, Conic, Domain, DomainSpec};
pub use error::{Error, Result};
pub use mesh::{generate_disk_mesh, Mesh, TriangleClass};
pub use poly::{Poly1, Poly2};
pub use interp::{interpolate, Piece, Spline};
pub use nodal::{HermiteData, Jet, NodalFunctional};
pub use study::{run_study, StudyConfig, StudyReport};
pub use testfn::TestFunction;
