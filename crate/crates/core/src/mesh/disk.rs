use serde::{Deserialize, Serialize};

use super::{Mesh, PieGeometry};
use crate::error::{Error, Result};
use crate::geometry::{diameter, signed_line_distance, Point};

/// Disk `B_T` inscribed in `T` (straight triangles) or in `T ∩ T*` (pie
/// triangles).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InscribedDisk {
    pub center: Point,
    pub radius: f64,
}

impl InscribedDisk {
    pub fn boundary_points(&self, count: usize) -> Vec<Point> {
        (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                self.center + Point::new(a.cos(), a.sin()) * self.radius
            })
            .collect()
    }
}

/// Classical incircle of a straight triangle.
pub fn incircle(v: &[Point; 3]) -> InscribedDisk {
    let a = (v[1] - v[2]).norm();
    let b = (v[2] - v[0]).norm();
    let c = (v[0] - v[1]).norm();
    let per = a + b + c;
    let center = (v[0] * a + v[1] * b + v[2] * c) / per;
    let area = 0.5 * crate::geometry::orient(&v[0], &v[1], &v[2]).abs();
    InscribedDisk {
        center,
        radius: 2.0 * area / per,
    }
}

const ARC_SAMPLES: usize = 64;

impl PieGeometry {
    /// Distance from `p` to the curved side, signed positive where `q > 0`.
    pub fn signed_arc_distance(&self, p: &Point) -> f64 {
        let dist = |t: f64| -> f64 {
            self.arc_point_ray(t)
                .map(|a| (a - p).norm())
                .unwrap_or(f64::INFINITY)
        };
        let mut best_k = 0;
        let mut best = f64::INFINITY;
        for k in 0..=ARC_SAMPLES {
            let d = dist(k as f64 / ARC_SAMPLES as f64);
            if d < best {
                best = d;
                best_k = k;
            }
        }
        // golden-section refinement in the bracketing interval
        let step = 1.0 / ARC_SAMPLES as f64;
        let (mut lo, mut hi) = (
            (best_k as f64 - 1.0).max(0.0) * step,
            (best_k as f64 + 1.0).min(ARC_SAMPLES as f64) * step,
        );
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (dist(x1), dist(x2));
        for _ in 0..80 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = dist(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = dist(x2);
            }
        }
        let d = best.min(f1).min(f2);
        if self.conic.eval(p) >= 0.0 {
            d
        } else {
            -d
        }
    }

    /// `min` of the distances to the two straight sides, the chord and the
    /// arc, each signed positive inside `T ∩ T*`.
    pub fn clearance(&self, p: &Point) -> f64 {
        let s1 = signed_line_distance(&self.apex, &self.b1, p);
        let s2 = signed_line_distance(&self.b1, &self.b2, p);
        let s3 = signed_line_distance(&self.b2, &self.apex, p);
        s1.min(s2).min(s3).min(self.signed_arc_distance(p))
    }

    /// Largest disk in `T ∩ T*`, to radius tolerance `1e-9 · h_T*`.
    pub fn inscribed_disk(&self) -> Result<InscribedDisk> {
        let tri = self.straight();
        let inc = incircle(&tri);
        if self.signed_arc_distance(&inc.center) >= inc.radius {
            // the incircle of T* also avoids the arc, so it is maximal
            return Ok(inc);
        }
        let h = diameter(&tri);
        let mut best = inc.center;
        let mut best_val = self.clearance(&best);
        let n = 32;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
                let p = tri[0] * (1.0 - a - b) + tri[1] * a + tri[2] * b;
                let v = self.clearance(&p);
                if v > best_val {
                    best_val = v;
                    best = p;
                }
            }
        }
        let mut step = h / n as f64;
        let dirs: Vec<Point> = (0..8)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_4 * k as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        while step > 1e-11 * h {
            let mut moved = false;
            for d in &dirs {
                let p = best + d * step;
                let v = self.clearance(&p);
                if v > best_val {
                    best_val = v;
                    best = p;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        if best_val <= 0.0 {
            return Err(Error::InvalidMesh(
                "pie triangle has an empty intersection with its straight triangle".into(),
            ));
        }
        Ok(InscribedDisk {
            center: best,
            radius: best_val,
        })
    }
}

impl Mesh {
    pub fn inscribed_disk(&self, t: usize) -> Result<InscribedDisk> {
        match self.pie_geometry(t) {
            Some(g) => g.inscribed_disk().map_err(|e| match e {
                Error::InvalidMesh(m) => Error::InvalidMesh(format!("triangle {t}: {m}")),
                other => other,
            }),
            None => Ok(incircle(&self.triangle_points(t))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::Conic;
    use crate::geometry::pt;

    #[test]
    fn incircle_examples() {
        let s3 = 3f64.sqrt();
        let d = incircle(&[pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, s3)]);
        assert!((d.radius - 1.0 / s3).abs() < 1e-15);
        assert!((d.center - pt(1.0, s3 / 3.0)).norm() < 1e-15);
        let d = incircle(&[pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)]);
        let r = (2.0 - 2f64.sqrt()) / 2.0;
        assert!((d.radius - r).abs() < 1e-15);
        assert!((d.center - pt(r, r)).norm() < 1e-15);
    }

    /// Dense grid oracle for the maximal clearance, independent of the
    /// incircle shortcut and the pattern search.
    fn grid_oracle(g: &PieGeometry, n: usize) -> f64 {
        let tri = g.straight();
        let mut best: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
                let p = tri[0] * (1.0 - a - b) + tri[1] * a + tri[2] * b;
                let s1 = signed_line_distance(&tri[0], &tri[1], &p);
                let s2 = signed_line_distance(&tri[1], &tri[2], &p);
                let s3 = signed_line_distance(&tri[2], &tri[0], &p);
                // arc distance by brute force over 4000 arc samples
                let arc = (0..=4000)
                    .filter_map(|k| g.arc_point_ray(k as f64 / 4000.0))
                    .map(|a| (a - p).norm())
                    .fold(f64::INFINITY, f64::min);
                let sa = if g.conic.eval(&p) >= 0.0 { arc } else { -arc };
                best = best.max(s1.min(s2).min(s3).min(sa));
            }
        }
        best
    }

    #[test]
    fn quarter_circle_pie_matches_oracle() {
        let g = PieGeometry {
            apex: pt(0.0, 0.0),
            b1: pt(1.0, 0.0),
            b2: pt(0.0, 1.0),
            conic: Conic::unit_circle().scaled(0.5),
        };
        let d = g.inscribed_disk().unwrap();
        let oracle = grid_oracle(&g, 300);
        assert!((d.radius - oracle).abs() < 1e-2 * oracle);
        assert!(d.radius >= oracle - 1e-12);
        assert!((d.radius - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-6);
    }

    #[test]
    fn inward_arc_uses_search() {
        // domain outside the circle x² + (y+0.9)² = 1: the arc between
        // (±0.3, y0) bulges into T*
        let q = Conic::new([1.0, 0.0, 1.0, 0.0, 1.8, 0.81 - 1.0]).unwrap();
        let y0 = (1.0f64 - 0.09).sqrt() - 0.9;
        let g = PieGeometry {
            apex: pt(0.0, 0.6),
            b1: pt(-0.3, y0),
            b2: pt(0.3, y0),
            conic: q,
        };
        let d = g.inscribed_disk().unwrap();
        let inc = incircle(&g.straight());
        assert!(d.radius < inc.radius);
        let oracle = grid_oracle(&g, 120);
        assert!(d.radius >= oracle - 1e-9, "{} vs {}", d.radius, oracle);
        assert!(d.radius <= oracle * 1.02);
        for p in d.boundary_points(64) {
            assert!(q.eval(&p) >= -1e-12);
        }
    }
}
