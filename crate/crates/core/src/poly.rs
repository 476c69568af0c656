//! Dense bivariate polynomials of total degree at most six.
//!
//! Coefficients are stored in graded lexicographic order: all monomials of
//! total degree `k` follow those of degree `k - 1`, and within a degree the
//! power of `x` decreases,
//!
//! ```text
//! 1, x, y, x², xy, y², x³, x²y, xy², y³, ...
//! ```
//!
//! so `x^i y^j` (with `k = i + j`) lives at index `k(k+1)/2 + j`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};
use crate::tolerances::UNIT_VECTOR_ABS;

pub const MAX_DEGREE: usize = 6;

/// A multi-index `(α_x, α_y)` for partial derivatives `∂x^α_x ∂y^α_y`.
pub type MultiIndex = (usize, usize);

/// Dimension of the space of bivariate polynomials of degree `d`.
pub const fn dim_p(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Position of `x^i y^j` in the graded lexicographic ordering.
#[inline]
pub const fn monomial_index(i: usize, j: usize) -> usize {
    let k = i + j;
    k * (k + 1) / 2 + j
}

/// Exponents `(i, j)` of the monomials of degree `<= d`, in storage order.
pub fn monomial_exponents(d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(dim_p(d));
    for k in 0..=d {
        for j in 0..=k {
            out.push((k - j, j));
        }
    }
    out
}

/// `n! / (n - k)!`, zero when `k > n`.
#[inline]
fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    ((n - k + 1)..=n).fold(1.0, |acc, m| acc * m as f64)
}

/// `∂^α (x^i y^j)` evaluated at `(x, y)`.
pub fn monomial_derivative(i: usize, j: usize, alpha: MultiIndex, x: f64, y: f64) -> f64 {
    let (a, b) = alpha;
    if a > i || b > j {
        return 0.0;
    }
    falling(i, a) * falling(j, b) * x.powi((i - a) as i32) * y.powi((j - b) as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly2 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        Poly2 {
            degree,
            coeffs: vec![0.0; dim_p(degree)],
        }
    }

    pub fn constant(c: f64) -> Self {
        Poly2 {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `c · x^i y^j` as a polynomial of declared degree `i + j`.
    pub fn monomial(i: usize, j: usize, c: f64) -> Self {
        let mut p = Poly2::zero(i + j);
        p.coeffs[monomial_index(i, j)] = c;
        p
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        if coeffs.len() != dim_p(degree) {
            return Err(Error::InvalidInput(format!(
                "degree {degree} needs {} coefficients, got {}",
                dim_p(degree),
                coeffs.len()
            )));
        }
        Ok(Poly2 { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[monomial_index(i, j)]
        }
    }

    /// Same polynomial with a larger declared degree.
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow(degree));
        }
        if degree < self.degree {
            return Err(Error::InvalidInput(format!(
                "cannot lower declared degree {} to {degree}",
                self.degree
            )));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim_p(degree), 0.0);
        Ok(Poly2 { degree, coeffs })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Horner evaluation: outer scheme in `x`, inner in `y`.
    pub fn eval(&self, z: &Point) -> f64 {
        let d = self.degree;
        let mut acc = 0.0;
        for i in (0..=d).rev() {
            let mut inner = 0.0;
            for j in (0..=d - i).rev() {
                inner = inner * z.y + self.coeffs[monomial_index(i, j)];
            }
            acc = acc * z.x + inner;
        }
        acc
    }

    /// Exact partial derivative `∂^α p`; the degree drops by `|α|` (floored at 0).
    pub fn diff(&self, alpha: MultiIndex) -> Poly2 {
        let (a, b) = alpha;
        if a + b > self.degree {
            return Poly2::zero(0);
        }
        let nd = self.degree - a - b;
        let mut out = Poly2::zero(nd);
        for k in 0..=nd {
            for j in 0..=k {
                let i = k - j;
                out.coeffs[monomial_index(i, j)] = self.coeffs[monomial_index(i + a, j + b)]
                    * falling(i + a, a)
                    * falling(j + b, b);
            }
        }
        out
    }

    /// Directional derivative `D_τ p = τx ∂x p + τy ∂y p` as a polynomial.
    pub fn directional(&self, dir: &Vec2) -> Poly2 {
        let dx = self.diff((1, 0));
        let dy = self.diff((0, 1));
        &(&dx * dir.x) + &(&dy * dir.y)
    }

    /// Applies `D_τ` once per listed direction and evaluates at `z`.
    pub fn dir_deriv(&self, dirs: &[Vec2], z: &Point) -> Result<f64> {
        if dirs.len() > MAX_DEGREE {
            return Err(Error::DegreeOverflow(dirs.len()));
        }
        let mut p = self.clone();
        for d in dirs {
            if (d.norm() - 1.0).abs() > UNIT_VECTOR_ABS {
                return Err(Error::NonUnitDirection(d.x, d.y));
            }
            p = p.directional(d);
        }
        Ok(p.eval(z))
    }

    /// Exact product; fails when the degree sum exceeds [`MAX_DEGREE`].
    pub fn multiply(&self, other: &Poly2) -> Result<Poly2> {
        let d = self.degree + other.degree;
        if d > MAX_DEGREE {
            return Err(Error::DegreeOverflow(d));
        }
        let mut out = Poly2::zero(d);
        for (ia, &(i1, j1)) in monomial_exponents(self.degree).iter().enumerate() {
            let ca = self.coeffs[ia];
            if ca == 0.0 {
                continue;
            }
            for (ib, &(i2, j2)) in monomial_exponents(other.degree).iter().enumerate() {
                out.coeffs[monomial_index(i1 + i2, j1 + j2)] += ca * other.coeffs[ib];
            }
        }
        Ok(out)
    }

    /// `g(t) = p(v1 + t (v2 - v1))`.
    pub fn restrict_to_segment(&self, v1: &Point, v2: &Point) -> Result<Poly1> {
        let d = v2 - v1;
        if d.norm() == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let xt = Poly1::new(vec![v1.x, d.x]);
        let yt = Poly1::new(vec![v1.y, d.y]);
        Ok(self.substitute(&xt, &yt))
    }

    fn substitute(&self, xt: &Poly1, yt: &Poly1) -> Poly1 {
        let d = self.degree;
        let mut xp = vec![Poly1::new(vec![1.0])];
        let mut yp = vec![Poly1::new(vec![1.0])];
        for k in 1..=d {
            xp.push(xp[k - 1].mul(xt));
            yp.push(yp[k - 1].mul(yt));
        }
        let mut out = Poly1::new(vec![0.0; d + 1]);
        for (idx, &(i, j)) in monomial_exponents(d).iter().enumerate() {
            let c = self.coeffs[idx];
            if c != 0.0 {
                out.add_scaled(&xp[i].mul(&yp[j]), c);
            }
        }
        out.truncate(d);
        out
    }

    /// Re-expresses `p` in local coordinates: returns `r` with
    /// `r(ξ) = p(origin + scale · ξ)`.
    pub fn compose_affine(&self, origin: &Point, scale: f64) -> Poly2 {
        let d = self.degree;
        // powers of (o + s ξ) as polynomials in ξ (and likewise for η)
        let mut xp = vec![Poly2::constant(1.0)];
        let mut yp = vec![Poly2::constant(1.0)];
        let lx = &Poly2::constant(origin.x) + &Poly2::monomial(1, 0, scale);
        let ly = &Poly2::constant(origin.y) + &Poly2::monomial(0, 1, scale);
        for k in 1..=d {
            xp.push(xp[k - 1].multiply(&lx).expect("degree bounded by input"));
            yp.push(yp[k - 1].multiply(&ly).expect("degree bounded by input"));
        }
        let mut out = Poly2::zero(d);
        for (idx, &(i, j)) in monomial_exponents(d).iter().enumerate() {
            let c = self.coeffs[idx];
            if c != 0.0 {
                let term = xp[i].multiply(&yp[j]).expect("degree bounded by input");
                for (t, &v) in term.coeffs.iter().enumerate() {
                    out.coeffs[t] += c * v;
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a Poly2> for &'a Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let d = self.degree.max(rhs.degree);
        let mut out = Poly2::zero(d);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out.coeffs[i] += c;
        }
        out
    }
}

impl<'a> Sub<&'a Poly2> for &'a Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        self + &(-rhs)
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self * -1.0
    }
}

impl Mul<f64> for &Poly2 {
    type Output = Poly2;
    fn mul(self, s: f64) -> Poly2 {
        Poly2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

/// Univariate polynomial in the segment parameter `t`, coefficients in
/// increasing powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1 {
    coeffs: Vec<f64>,
}

impl Poly1 {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Poly1 { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Poly1 {
        if self.coeffs.len() == 1 {
            return Poly1::new(vec![0.0]);
        }
        Poly1::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly1) -> Poly1 {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly1::new(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn add_scaled(&mut self, other: &Poly1, s: f64) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            self.coeffs[i] += s * c;
        }
    }

    fn truncate(&mut self, degree: usize) {
        self.coeffs.resize(degree + 1, 0.0);
    }
}

impl Sub for &Poly1 {
    type Output = Poly1;
    fn sub(self, rhs: &Poly1) -> Poly1 {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pt;
    use proptest::prelude::*;

    fn x2y() -> Poly2 {
        Poly2::monomial(2, 1, 1.0)
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_p(4), 15);
        assert_eq!(dim_p(5), 21);
        assert_eq!(dim_p(6), 28);
        assert_eq!(Poly2::zero(6).coeffs().len(), 28);
    }

    #[test]
    fn ordering_is_graded_lex() {
        let e = monomial_exponents(2);
        assert_eq!(e, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
        for (k, &(i, j)) in monomial_exponents(6).iter().enumerate() {
            assert_eq!(monomial_index(i, j), k);
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(x2y().eval(&pt(2.0, 3.0)), 12.0);
        assert_eq!(Poly2::constant(1.0).eval(&pt(-7.0, 0.3)), 1.0);
        let p = &Poly2::monomial(5, 0, 1.0) + &Poly2::monomial(0, 5, 1.0);
        assert_eq!(p.eval(&pt(1.0, 1.0)), 2.0);
    }

    #[test]
    fn diff_examples() {
        assert_eq!(x2y().diff((1, 1)), Poly2::monomial(1, 0, 2.0));
        let d = x2y().diff((0, 3));
        assert_eq!(d.degree(), 0);
        assert_eq!(d.coeffs(), &[0.0]);
        let d = Poly2::monomial(4, 0, 1.0).diff((2, 0));
        assert_eq!(d, Poly2::monomial(2, 0, 12.0));
    }

    #[test]
    fn dir_deriv_examples() {
        let xy = Poly2::monomial(1, 1, 1.0);
        assert_eq!(xy.dir_deriv(&[Vec2::new(1.0, 0.0)], &pt(0.0, 2.0)).unwrap(), 2.0);
        let x2 = Poly2::monomial(2, 0, 1.0);
        let e = Vec2::new(1.0, 0.0);
        assert_eq!(x2.dir_deriv(&[e, e], &pt(3.0, -1.0)).unwrap(), 2.0);
        // D_τ² (x²+y²) = 2τ1² + 2τ2² = 2
        let r2 = &Poly2::monomial(2, 0, 1.0) + &Poly2::monomial(0, 2, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = Vec2::new(s, s);
        assert!((r2.dir_deriv(&[t, t], &pt(0.0, 0.0)).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(
            r2.dir_deriv(&[Vec2::new(1.0, 1.0)], &pt(0.0, 0.0)),
            Err(Error::NonUnitDirection(..))
        ));
    }

    #[test]
    fn multiply_examples() {
        let q = Poly2::from_coeffs(2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(Poly2::constant(1.0).multiply(&q).unwrap(), q);
        let xy = Poly2::monomial(1, 0, 1.0)
            .multiply(&Poly2::monomial(0, 1, 1.0))
            .unwrap();
        assert_eq!(xy, Poly2::monomial(1, 1, 1.0));
        let err = Poly2::zero(4).multiply(&Poly2::zero(3));
        assert!(matches!(err, Err(Error::DegreeOverflow(7))));
    }

    #[test]
    fn restrict_examples() {
        let g = Poly2::monomial(2, 0, 1.0)
            .restrict_to_segment(&pt(0.0, 0.0), &pt(1.0, 0.0))
            .unwrap();
        assert_eq!(g.coeffs(), &[0.0, 0.0, 1.0]);
        let g = Poly2::monomial(0, 1, 1.0)
            .restrict_to_segment(&pt(0.0, 0.0), &pt(1.0, 0.0))
            .unwrap();
        assert!(g.coeffs().iter().all(|&c| c == 0.0));
        let xy = &Poly2::monomial(1, 0, 1.0) + &Poly2::monomial(0, 1, 1.0);
        let g = xy.restrict_to_segment(&pt(0.0, 1.0), &pt(1.0, 0.0)).unwrap();
        assert_eq!(g.coeffs(), &[1.0, 0.0]);
        assert!(matches!(
            xy.restrict_to_segment(&pt(1.0, 1.0), &pt(1.0, 1.0)),
            Err(Error::CoincidentPoints)
        ));
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let p = Poly2::from_coeffs(3, (0..10).map(|k| (k as f64).sin()).collect()).unwrap();
        let o = pt(0.7, -0.3);
        let r = p.compose_affine(&o, 0.25);
        for &(a, b) in &[(0.1, 0.2), (-0.4, 0.9), (1.3, -2.0)] {
            let xi = pt(a, b);
            let x = o + xi * 0.25;
            assert!((r.eval(&xi) - p.eval(&x)).abs() < 1e-13);
        }
    }

    fn poly_strategy(d: usize) -> impl Strategy<Value = Poly2> {
        prop::collection::vec(-3.0f64..3.0, dim_p(d))
            .prop_map(move |c| Poly2::from_coeffs(d, c).unwrap())
    }

    proptest! {
        #[test]
        fn diff_commutes(p in poly_strategy(6)) {
            prop_assert_eq!(p.diff((1, 0)).diff((0, 1)), p.diff((1, 1)));
            prop_assert_eq!(p.diff((0, 1)).diff((1, 0)), p.diff((1, 1)));
        }

        #[test]
        fn leibniz_rule(p in poly_strategy(4), q in poly_strategy(2)) {
            let lhs = p.multiply(&q).unwrap().diff((1, 0));
            let rhs = &p.diff((1, 0)).multiply(&q).unwrap() + &p.multiply(&q.diff((1, 0))).unwrap();
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn product_is_pointwise(p in poly_strategy(4), q in poly_strategy(2),
                                x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let z = pt(x, y);
            let prod = p.multiply(&q).unwrap().eval(&z);
            let expect = p.eval(&z) * q.eval(&z);
            prop_assert!((prod - expect).abs() <= 1e-12 * (1.0 + expect.abs()) * 10.0);
        }

        #[test]
        fn axis_direction_is_partial(p in poly_strategy(6), x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let z = pt(x, y);
            let a = p.dir_deriv(&[Vec2::new(1.0, 0.0)], &z).unwrap();
            let b = p.diff((1, 0)).eval(&z);
            prop_assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()) * 10.0);
        }

        #[test]
        fn restriction_of_product(p in poly_strategy(4), q in poly_strategy(2),
                                  ax in -1.0f64..1.0, ay in -1.0f64..1.0, bx in -1.0f64..1.0) {
            let v1 = pt(ax, ay);
            let v2 = pt(bx, 0.5);
            prop_assume!((v2 - v1).norm() > 1e-3);
            let lhs = p.multiply(&q).unwrap().restrict_to_segment(&v1, &v2).unwrap();
            let rhs = p.restrict_to_segment(&v1, &v2).unwrap()
                .mul(&q.restrict_to_segment(&v1, &v2).unwrap());
            let scale = 1.0 + rhs.max_abs_coeff();
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
            prop_assert!((lhs.eval(0.0) - p.multiply(&q).unwrap().eval(&v1)).abs() < 1e-12 * scale);
            prop_assert!((lhs.eval(1.0) - p.multiply(&q).unwrap().eval(&v2)).abs() < 1e-12 * scale);
        }
    }
}
