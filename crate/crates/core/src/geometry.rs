//! Small planar geometry helpers shared by the mesh and quadrature code.

use nalgebra::Vector2;

pub type Point = Vector2<f64>;
pub type Vec2 = Vector2<f64>;

#[inline]
pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Rotation by +90 degrees.
#[inline]
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Twice the signed area of `(a, b, c)`, positive for counter-clockwise order.
#[inline]
pub fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    cross(&(b - a), &(c - a))
}

pub fn triangle_area(v: &[Point; 3]) -> f64 {
    0.5 * orient(&v[0], &v[1], &v[2]).abs()
}

pub fn centroid(v: &[Point; 3]) -> Point {
    (v[0] + v[1] + v[2]) / 3.0
}

pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Barycentric coordinates of `p` with respect to `v`.
pub fn barycentric(v: &[Point; 3], p: &Point) -> [f64; 3] {
    let det = orient(&v[0], &v[1], &v[2]);
    let l1 = orient(p, &v[1], &v[2]) / det;
    let l2 = orient(&v[0], p, &v[2]) / det;
    [l1, l2, 1.0 - l1 - l2]
}

/// Signed distance from `p` to the line through `a`, `b`; positive on the left.
pub fn signed_line_distance(a: &Point, b: &Point, p: &Point) -> f64 {
    orient(a, b, p) / (b - a).norm()
}
