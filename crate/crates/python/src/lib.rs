//! Python bindings. Reports cross the boundary as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use argyris::geometry::pt;
use argyris::norms::{continuity_report, error_report};
use argyris::{interpolate as interp, run_study, StudyConfig, TestFunction};

fn err(e: argyris::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Domain(argyris::Domain);

#[pymethods]
impl Domain {
    #[staticmethod]
    fn unit_disk() -> Self {
        Domain(argyris::Domain::unit_disk())
    }

    #[staticmethod]
    fn ellipse(rx: f64, ry: f64) -> PyResult<Self> {
        argyris::Domain::ellipse(rx, ry).map(Domain).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        argyris::Domain::from_json(text).map(Domain).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0.to_spec())
    }

    fn __repr__(&self) -> String {
        format!("Domain(arcs={})", self.0.arcs.len())
    }
}

#[pyclass(frozen)]
struct Mesh(argyris::Mesh);

#[pymethods]
impl Mesh {
    /// Mesh of a single closed oval with `n` boundary vertices.
    #[staticmethod]
    fn generate(domain: &Domain, n: usize) -> PyResult<Self> {
        argyris::generate_disk_mesh(&domain.0, n).map(Mesh).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        argyris::Mesh::from_json(text).map(Mesh).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    /// Validation report (JSON).
    fn validate(&self) -> PyResult<String> {
        json(&self.0.validate())
    }

    /// Number of ordinary, pie and buffer triangles.
    fn class_counts(&self) -> (usize, usize, usize) {
        use argyris::TriangleClass::*;
        (self.0.class_count(Ordinary), self.0.class_count(Pie), self.0.class_count(Buffer))
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.max_diameter()
    }

    fn shape_regularity(&self) -> PyResult<f64> {
        self.0.shape_regularity().map_err(err)
    }

    fn area(&self) -> f64 {
        self.0.area()
    }

    fn __len__(&self) -> usize {
        self.0.triangles.len()
    }
}

#[pyclass(frozen)]
struct Spline(argyris::Spline);

#[pymethods]
impl Spline {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        argyris::Spline::from_json(text).map(Spline).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    /// `∂^α s(x, y)`, with `alpha = (i, j)`.
    #[pyo3(signature = (mesh, x, y, alpha = (0, 0)))]
    fn eval(&self, mesh: &Mesh, x: f64, y: f64, alpha: (usize, usize)) -> PyResult<f64> {
        self.0.eval(&mesh.0, &pt(x, y), alpha).map_err(err)
    }

    /// C¹ jumps, vertex mismatch and boundary trace (JSON).
    #[pyo3(signature = (mesh, samples = 50, tol = 1e-8))]
    fn continuity(&self, mesh: &Mesh, samples: usize, tol: f64) -> PyResult<String> {
        json(&continuity_report(&mesh.0, &self.0, samples, tol).map_err(err)?)
    }

    /// Errors against a named test function (JSON).
    fn errors(&self, mesh: &Mesh, function: &str) -> PyResult<String> {
        let u = TestFunction::lookup(function, &mesh.0.domain).map_err(err)?;
        json(&error_report(&mesh.0, &self.0, &u).map_err(err)?)
    }
}

/// Interpolates a named test function on `mesh`.
#[pyfunction]
fn interpolate(mesh: &Mesh, function: &str) -> PyResult<Spline> {
    let u = TestFunction::lookup(function, &mesh.0.domain).map_err(err)?;
    interp(&mesh.0, &u).map(Spline).map_err(err)
}

/// Convergence study on `domain` (JSON report).
#[pyfunction]
#[pyo3(signature = (levels, function = "circle_sin", domain = None))]
fn convergence(levels: Vec<usize>, function: &str, domain: Option<&Domain>) -> PyResult<String> {
    let d = domain.map(|d| d.0.clone()).unwrap_or_else(argyris::Domain::unit_disk);
    let r = run_study(&d, &StudyConfig::new(levels, function)).map_err(err)?;
    r.to_json().map_err(err)
}

#[pymodule]
#[pyo3(name = "conic_argyris")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Domain>()?;
    m.add_class::<Mesh>()?;
    m.add_class::<Spline>()?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    Ok(())
}
