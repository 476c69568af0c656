//! Built-in test functions. Each boundary-vanishing function is a product of
//! the boundary conic(s) and a smooth factor, so it lies in `H¹₀` by
//! construction.

use nalgebra::Matrix2;

use crate::conic::{Conic, Domain};
use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};
use crate::nodal::{HermiteData, Jet};

/// Smooth factors `g` multiplying the boundary conic(s).
#[derive(Debug, Clone, Copy, PartialEq)]
enum Factor {
    One,
    /// `sin(x + 2y)`
    Sin,
    /// `exp(x - y/2)`
    Exp,
    /// `1 + x + 2y²`
    Poly,
}

impl Factor {
    fn jet(&self, p: &Point) -> Jet {
        match self {
            Factor::One => Jet {
                value: 1.0,
                grad: Vec2::zeros(),
                hess: Matrix2::zeros(),
            },
            Factor::Sin => {
                let (s, c) = (p.x + 2.0 * p.y).sin_cos();
                Jet {
                    value: s,
                    grad: Vec2::new(c, 2.0 * c),
                    hess: Matrix2::new(1.0, 2.0, 2.0, 4.0) * -s,
                }
            }
            Factor::Exp => {
                let e = (p.x - 0.5 * p.y).exp();
                Jet {
                    value: e,
                    grad: Vec2::new(e, -0.5 * e),
                    hess: Matrix2::new(1.0, -0.5, -0.5, 0.25) * e,
                }
            }
            Factor::Poly => Jet {
                value: 1.0 + p.x + 2.0 * p.y * p.y,
                grad: Vec2::new(1.0, 4.0 * p.y),
                hess: Matrix2::new(0.0, 0.0, 0.0, 4.0),
            },
        }
    }
}

/// `g · Π q_j`; with no conics this is just `g`.
pub struct TestFunction {
    pub id: String,
    pub description: String,
    conics: Vec<Conic>,
    factor: Factor,
    zero: bool,
}

impl HermiteData for TestFunction {
    fn jet(&self, p: &Point) -> Jet {
        if self.zero {
            return Jet::zero();
        }
        self.conics
            .iter()
            .fold(self.factor.jet(p), |acc, q| acc.product(&q.jet(p)))
    }
}

pub const FUNCTION_IDS: [&str; 8] = [
    "zero",
    "one",
    "circle_sin",
    "circle_exp",
    "circle_poly",
    "conic_sin",
    "conic_exp",
    "conic_poly",
];

impl TestFunction {
    /// Looks up a function by id. `circle_*` use the normalized unit circle
    /// `(1 - x² - y²)/2`; `conic_*` use the conics of `domain`.
    pub fn lookup(id: &str, domain: &Domain) -> Result<TestFunction> {
        let circle = vec![Conic::unit_circle().scaled(0.5)];
        let (conics, factor, description) = match id {
            "zero" => (vec![], Factor::One, "0".to_string()),
            "one" => (vec![], Factor::One, "1 (does not vanish on the boundary)".to_string()),
            "circle_sin" => (circle, Factor::Sin, "(1-x²-y²)/2 · sin(x+2y)".to_string()),
            "circle_exp" => (circle, Factor::Exp, "(1-x²-y²)/2 · exp(x-y/2)".to_string()),
            "circle_poly" => (circle, Factor::Poly, "(1-x²-y²)/2 · (1+x+2y²)".to_string()),
            "conic_sin" => (domain.conics.clone(), Factor::Sin, "Π q_j · sin(x+2y)".to_string()),
            "conic_exp" => (domain.conics.clone(), Factor::Exp, "Π q_j · exp(x-y/2)".to_string()),
            "conic_poly" => (domain.conics.clone(), Factor::Poly, "Π q_j · (1+x+2y²)".to_string()),
            other => {
                return Err(Error::UnknownFunction(format!(
                    "{other} (known: {})",
                    FUNCTION_IDS.join(", ")
                )))
            }
        };
        Ok(TestFunction {
            id: id.to_string(),
            description,
            conics,
            factor,
            zero: id == "zero",
        })
    }

    /// Compares the supplied gradient and Hessian with central differences
    /// (step `1e-5`) at `count` points inside `domain`. Returns the worst
    /// relative discrepancy.
    pub fn finite_difference_check(&self, domain: &Domain, count: usize) -> Result<f64> {
        const H: f64 = 1e-5;
        let mut worst: f64 = 0.0;
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let arcs = domain.arcs.len();
        for k in 0..count {
            let j = k % arcs;
            let t = (k as f64 + 0.5) / count as f64;
            let r = 0.05 + 0.9 * ((k as f64 + 1.0) * golden).fract();
            let b = domain.arc_point(j, t)?;
            let z = domain.witness + (b - domain.witness) * r;
            let jet = self.jet(&z);
            for (axis, e) in [Vec2::new(H, 0.0), Vec2::new(0.0, H)].iter().enumerate() {
                let (jp, jm) = (self.jet(&(z + e)), self.jet(&(z - e)));
                let fd = (jp.value - jm.value) / (2.0 * H);
                let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
                worst = worst.max(rel(fd, jet.grad[axis]));
                let col = (jp.grad - jm.grad) / (2.0 * H);
                worst = worst.max(rel(col.x, jet.hess[(0, axis)]));
                worst = worst.max(rel(col.y, jet.hess[(1, axis)]));
            }
            if (jet.hess[(0, 1)] - jet.hess[(1, 0)]).abs() > 1e-10 * jet.hess.norm().max(1.0) {
                worst = f64::INFINITY;
            }
        }
        Ok(worst)
    }
}
