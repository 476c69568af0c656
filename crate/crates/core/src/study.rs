//! Convergence studies over a sequence of independently generated meshes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conic::Domain;
use crate::error::{Error, Result};
use crate::interp::interpolate;
use crate::mesh::generate_disk_mesh;
use crate::norms::error_report;
use crate::testfn::TestFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    /// Boundary vertex counts, strictly increasing.
    pub levels: Vec<usize>,
    pub function: String,
    /// Orders must reach `expected - slack` on the finest pair.
    pub slack: f64,
}

impl StudyConfig {
    pub fn new(levels: Vec<usize>, function: &str) -> Self {
        StudyConfig {
            levels,
            function: function.to_string(),
            slack: crate::tolerances::ORDER_SLACK,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.levels.len() < 2 {
            return Err(Error::InvalidInput("a study needs at least two levels".into()));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("levels must be strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub level: usize,
    pub n_boundary: usize,
    pub h: f64,
    /// `‖u - I u‖_{H^k}` for `k = 0, 1, 2`.
    pub errors: [f64; 3],
    /// Observed orders against the previous level.
    pub orders: Option<[f64; 3]>,
    pub shape_regularity: f64,
    pub triangles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub function: String,
    pub rows: Vec<StudyRow>,
    /// `6 - k`.
    pub expected: [f64; 3],
    pub thresholds: [f64; 3],
    /// Finest-pair order against threshold, per `k`.
    pub passed: [bool; 3],
}

/// `log(e1/e2) / log(h1/h2)`.
pub fn observed_order(e1: f64, e2: f64, h1: f64, h2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

pub fn run_study(domain: &Domain, config: &StudyConfig) -> Result<StudyReport> {
    config.check()?;
    let u = TestFunction::lookup(&config.function, domain)?;
    let mut rows: Vec<StudyRow> = Vec::new();
    for (level, &n) in config.levels.iter().enumerate() {
        let mesh = generate_disk_mesh(domain, n)?;
        let s = interpolate(&mesh, &u)?;
        let r = error_report(&mesh, &s, &u)?;
        let orders = rows.last().map(|prev| {
            let mut o = [0.0; 3];
            for k in 0..3 {
                o[k] = observed_order(prev.errors[k], r.norms[k], prev.h, r.h);
            }
            o
        });
        rows.push(StudyRow {
            level,
            n_boundary: n,
            h: r.h,
            errors: r.norms,
            orders,
            shape_regularity: mesh.shape_regularity()?,
            triangles: mesh.triangles.len(),
        });
    }
    let expected = [6.0, 5.0, 4.0];
    let thresholds = expected.map(|e| e - config.slack);
    let last = rows.last().and_then(|r| r.orders).expect("at least two levels");
    let passed = [0, 1, 2].map(|k| last[k].is_finite() && last[k] >= thresholds[k]);
    Ok(StudyReport {
        function: config.function.clone(),
        rows,
        expected,
        thresholds,
        passed,
    })
}

impl StudyReport {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|&p| p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,n_boundary,h,e_L2,e_H1,e_H2,order_L2,order_H1,order_H2\n");
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{:e},{:e},{:e},{:e}",
                r.level, r.n_boundary, r.h, r.errors[0], r.errors[1], r.errors[2]
            );
            match r.orders {
                Some(o) => {
                    let _ = writeln!(out, ",{:.4},{:.4},{:.4}", o[0], o[1], o[2]);
                }
                None => out.push_str(",,,\n"),
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
