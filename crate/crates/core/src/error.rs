use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate conic: {0}")]
    DegenerateConic(String),

    #[error("singular curve point at ({0}, {1}): gradient of the conic vanishes")]
    SingularCurvePoint(f64, f64),

    #[error("direction ({0}, {1}) is not a unit vector")]
    NonUnitDirection(f64, f64),

    #[error("polynomial degree {0} exceeds the supported maximum of {max}", max = crate::poly::MAX_DEGREE)]
    DegreeOverflow(usize),

    #[error("segment endpoints coincide")]
    CoincidentPoints,

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh generation failed: {0}")]
    Generation(String),

    #[error("singular local system on triangle {triangle}: {reason}")]
    SingularSystem { triangle: usize, reason: String },

    #[error("buffer triangle {triangle} has no neighbour across local edge {edge}")]
    MissingNeighbor { triangle: usize, edge: usize },

    #[error("function does not vanish on the boundary: |u| = {value:e} at ({x}, {y})")]
    NotVanishing { value: f64, x: f64, y: f64 },

    #[error("functional of order {required} applied to data with derivatives up to order {available}")]
    OrderMismatch { required: usize, available: usize },

    #[error("quotient site invalid: {0}")]
    QuotientSite(String),

    #[error("point ({0}, {1}) lies outside the domain")]
    OutsideDomain(f64, f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown test function `{0}`")]
    UnknownFunction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
