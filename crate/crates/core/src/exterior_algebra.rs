//! Vectors, 2-vectors and linear maps of R⁴.
//!
//! A [`TwoVector`] stores its six coefficients in the ordered basis
//! `e1∧e2, e1∧e3, e1∧e4, e2∧e3, e2∧e4, e3∧e4`. The norm is the Hilbert
//! norm `sqrt(Σ c_ij²)`, for which the basis is orthonormal and
//! `|x∧y| = |x| |y| sin∠(x, y)`.

use std::ops::{Add, Index, Mul, Neg, Sub};

/// Default relative tolerance of the Plücker simplicity test.
pub const SIMPLE_TOL: f64 = 1e-10;

/// Index pairs `(i, j)` of the 2-vector basis, in storage order.
pub const BASIS_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector4(pub [f64; 4]);

impl Vector4 {
    pub const ZERO: Vector4 = Vector4([0.0; 4]);

    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Vector4([x1, x2, x3, x4])
    }

    /// The `i`-th standard basis vector, zero based.
    pub fn basis(i: usize) -> Self {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        Vector4(v)
    }

    pub fn dot(&self, other: &Vector4) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector4 {
        Vector4(self.0.map(|x| x * s))
    }

    /// Unit vector in the same direction, or `None` for (near) zero input.
    pub fn normalized(&self) -> Option<Vector4> {
        let n = self.norm();
        (n > 1e-300 && n.is_finite()).then(|| self.scale(1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn distance(&self, other: &Vector4) -> f64 {
        (*self - *other).norm()
    }
}

impl Index<usize> for Vector4 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vector4 {
    type Output = Vector4;
    fn add(self, rhs: Vector4) -> Vector4 {
        Vector4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Vector4 {
    type Output = Vector4;
    fn sub(self, rhs: Vector4) -> Vector4 {
        Vector4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Vector4 {
    type Output = Vector4;
    fn neg(self) -> Vector4 {
        Vector4(self.0.map(|x| -x))
    }
}

impl Mul<Vector4> for f64 {
    type Output = Vector4;
    fn mul(self, rhs: Vector4) -> Vector4 {
        rhs.scale(self)
    }
}

/// An element of ∧₂R⁴.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TwoVector(pub [f64; 6]);

impl TwoVector {
    pub const ZERO: TwoVector = TwoVector([0.0; 6]);

    /// Basis element `e_i ∧ e_j` for zero-based `i < j`.
    pub fn basis(i: usize, j: usize) -> Self {
        assert!(i < j && j < 4, "basis 2-vector needs i < j < 4");
        let slot = BASIS_PAIRS.iter().position(|&p| p == (i, j)).unwrap();
        let mut c = [0.0; 6];
        c[slot] = 1.0;
        TwoVector(c)
    }

    /// Coefficient of `e_i ∧ e_j` for zero-based indices, antisymmetric in `(i, j)`.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let slot = BASIS_PAIRS.iter().position(|&p| p == (a, b)).unwrap();
        sign * self.0[slot]
    }

    pub fn norm_squared(&self) -> f64 {
        inner(self, self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, s: f64) -> TwoVector {
        TwoVector(self.0.map(|x| x * s))
    }

    /// `ξ ∧ ξ / 2`, the Plücker quadric: zero exactly on simple 2-vectors.
    pub fn pluecker(&self) -> f64 {
        let c = &self.0;
        c[0] * c[5] - c[1] * c[4] + c[2] * c[3]
    }

    pub fn normalized(&self) -> Option<TwoVector> {
        let n = self.norm();
        (n > 1e-300 && n.is_finite()).then(|| self.scale(1.0 / n))
    }
}

impl Add for TwoVector {
    type Output = TwoVector;
    fn add(self, rhs: TwoVector) -> TwoVector {
        TwoVector(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for TwoVector {
    type Output = TwoVector;
    fn sub(self, rhs: TwoVector) -> TwoVector {
        TwoVector(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for TwoVector {
    type Output = TwoVector;
    fn neg(self) -> TwoVector {
        TwoVector(self.0.map(|x| -x))
    }
}

/// Exterior product `x ∧ y`, with `c_ij = x_i y_j − x_j y_i`.
pub fn wedge(x: &Vector4, y: &Vector4) -> TwoVector {
    TwoVector(BASIS_PAIRS.map(|(i, j)| x.0[i] * y.0[j] - x.0[j] * y.0[i]))
}

/// Inner product making `{e_i ∧ e_j}` orthonormal.
pub fn inner(xi: &TwoVector, zeta: &TwoVector) -> f64 {
    xi.0.iter().zip(zeta.0.iter()).map(|(a, b)| a * b).sum()
}

/// Plücker test `|ξ∧ξ| ≤ tol |ξ|²`. The zero 2-vector counts as simple.
pub fn is_simple(xi: &TwoVector, tol: f64) -> bool {
    debug_assert!(tol > 0.0);
    xi.pluecker().abs() <= tol * xi.norm_squared()
}

/// A linear map of R⁴, stored row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearMap4(pub [[f64; 4]; 4]);

impl LinearMap4 {
    pub fn identity() -> Self {
        Self::diagonal([1.0; 4])
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = d[i];
        }
        LinearMap4(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: [Vector4; 4]) -> Self {
        LinearMap4(std::array::from_fn(|i| std::array::from_fn(|j| cols[j].0[i])))
    }

    pub fn column(&self, j: usize) -> Vector4 {
        Vector4(std::array::from_fn(|i| self.0[i][j]))
    }

    pub fn apply(&self, v: &Vector4) -> Vector4 {
        Vector4(std::array::from_fn(|i| {
            self.0[i].iter().zip(v.0.iter()).map(|(a, b)| a * b).sum()
        }))
    }

    pub fn compose(&self, other: &LinearMap4) -> LinearMap4 {
        LinearMap4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * other.0[k][j]).sum())
        }))
    }

    pub fn transpose(&self) -> LinearMap4 {
        LinearMap4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs_diff(&self, other: &LinearMap4) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }

    /// The 6×6 matrix of `∧₂f` in the basis of [`BASIS_PAIRS`]: the
    /// entry at `(I, J)` is the 2×2 minor of rows `I` and columns `J`.
    pub fn compound(&self) -> [[f64; 6]; 6] {
        let m = &self.0;
        std::array::from_fn(|r| {
            let (i, j) = BASIS_PAIRS[r];
            std::array::from_fn(|c| {
                let (k, l) = BASIS_PAIRS[c];
                m[i][k] * m[j][l] - m[i][l] * m[j][k]
            })
        })
    }
}

/// The induced map `∧₂f`, linear in `ξ` and equal to `f(x) ∧ f(y)` on `x ∧ y`.
pub fn apply_map2(f: &LinearMap4, xi: &TwoVector) -> TwoVector {
    let c = f.compound();
    TwoVector(std::array::from_fn(|r| {
        c[r].iter().zip(xi.0.iter()).map(|(a, b)| a * b).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> Vector4 {
        Vector4::basis(i)
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let w = wedge(&e(0), &e(1));
        assert_eq!(w, TwoVector::basis(0, 1));
        assert_eq!(w.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn wedge_norm_matches_sine_formula() {
        let x = e(0);
        let y = Vector4::new(1.0, 1.0, 0.0, 0.0);
        let w = wedge(&x, &y);
        assert_eq!(w.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let expected = 1.0 * 2f64.sqrt() * (std::f64::consts::FRAC_PI_4).sin();
        assert!((w.norm() - expected).abs() < 1e-15);
    }

    #[test]
    fn self_wedge_vanishes() {
        let x = Vector4::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(wedge(&x, &x), TwoVector::ZERO);
    }

    #[test]
    fn inner_products_of_basis_elements() {
        let e12 = TwoVector::basis(0, 1);
        let e34 = TwoVector::basis(2, 3);
        assert_eq!(inner(&e12, &e12), 1.0);
        assert_eq!(inner(&e12, &e34), 0.0);
        // (e12 + e34)·(e12 − e34) = 1 − 1 componentwise
        let s = e12 + e34;
        let d = e12 - e34;
        let by_components: f64 = (0..6).map(|k| s.0[k] * d.0[k]).sum();
        assert_eq!(by_components, 0.0);
        assert_eq!(inner(&s, &d), 0.0);
    }

    #[test]
    fn simplicity_examples() {
        let e12 = TwoVector::basis(0, 1);
        let e34 = TwoVector::basis(2, 3);
        // (e12 + e34) ∧ (e12 + e34) = 2 e1234, Plücker value 1
        let xi = e12 + e34;
        assert_eq!(xi.pluecker(), 1.0);
        assert!(!is_simple(&xi, SIMPLE_TOL));
        assert!(is_simple(&(e12 + e34.scale(1e-14)), SIMPLE_TOL));
        assert!(is_simple(&TwoVector::ZERO, SIMPLE_TOL));
    }

    #[test]
    fn coefficient_lookup_is_antisymmetric() {
        let w = wedge(&Vector4::new(1.0, 2.0, 3.0, 4.0), &Vector4::new(-1.0, 0.5, 2.0, 1.0));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w.coeff(i, j), -w.coeff(j, i));
            }
        }
    }

    #[test]
    fn induced_map_examples() {
        let xi = wedge(&Vector4::new(1.0, 2.0, 3.0, 4.0), &Vector4::new(0.0, 1.0, -1.0, 2.0));
        assert_eq!(apply_map2(&LinearMap4::identity(), &xi), xi);

        let f = LinearMap4::diagonal([2.0, 3.0, 1.0, 1.0]);
        let image = apply_map2(&f, &TwoVector::basis(0, 1));
        let oracle = wedge(&f.apply(&e(0)), &f.apply(&e(1)));
        assert_eq!(image, oracle);
        assert_eq!(image, TwoVector::basis(0, 1).scale(6.0));

        let p = LinearMap4::diagonal([1.0, 1.0, 0.0, 0.0]);
        assert_eq!(apply_map2(&p, &TwoVector::basis(0, 2)).norm(), 0.0);
    }
}
