//! Planes of R⁴: characteristic angles, the canonical pair with prescribed
//! angles, orthogonal projectors and the equality set Ξ of the orthogonal
//! projection bound.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::exterior_algebra::{inner, is_simple, wedge, LinearMap4, TwoVector, Vector4};
use crate::rng::Stream;

const ORTHONORMAL_TOL: f64 = 1e-12;

/// A 2-plane through the origin, kept as an orthonormal basis together with
/// the unit simple 2-vector `b1 ∧ b2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    basis: [Vector4; 2],
    bivector: TwoVector,
}

impl Plane {
    /// Span of two vectors, orthonormalized by Gram–Schmidt.
    pub fn span(a: &Vector4, b: &Vector4) -> Result<Plane> {
        let b1 = a
            .normalized()
            .ok_or_else(|| Error::input("plane spanned by a zero vector"))?;
        let b2 = (*b - b1.scale(b.dot(&b1)))
            .normalized()
            .ok_or_else(|| Error::input("plane spanned by parallel vectors"))?;
        if b1.norm() < 0.5 || b2.norm() < 0.5 {
            return Err(Error::input("degenerate plane basis"));
        }
        Ok(Plane::from_basis_unchecked(b1, b2))
    }

    /// Plane of an already orthonormal pair; fails outside `1e-12`.
    pub fn from_orthonormal(b1: Vector4, b2: Vector4) -> Result<Plane> {
        check_orthonormal(&b1, &b2)?;
        Ok(Plane::from_basis_unchecked(b1, b2))
    }

    fn from_basis_unchecked(b1: Vector4, b2: Vector4) -> Plane {
        Plane {
            basis: [b1, b2],
            bivector: wedge(&b1, &b2),
        }
    }

    /// `span(e_i, e_j)` for zero-based indices.
    pub fn coordinate(i: usize, j: usize) -> Plane {
        Plane::from_basis_unchecked(Vector4::basis(i), Vector4::basis(j))
    }

    pub fn basis(&self) -> &[Vector4; 2] {
        &self.basis
    }

    pub fn bivector(&self) -> &TwoVector {
        &self.bivector
    }

    /// Coordinates of the orthogonal projection of `v` in the plane's basis.
    pub fn coords(&self, v: &Vector4) -> [f64; 2] {
        [self.basis[0].dot(v), self.basis[1].dot(v)]
    }

    pub fn point(&self, coords: [f64; 2]) -> Vector4 {
        self.basis[0].scale(coords[0]) + self.basis[1].scale(coords[1])
    }

    pub fn project(&self, v: &Vector4) -> Vector4 {
        self.point(self.coords(v))
    }

    /// Distance from `v` to the plane.
    pub fn distance(&self, v: &Vector4) -> f64 {
        (*v - self.project(v)).norm()
    }

    pub fn contains(&self, v: &Vector4, tol: f64) -> bool {
        self.distance(v) <= tol * v.norm().max(1.0)
    }

    /// Planes agree as unoriented subspaces: `|<ξ_P, ξ_Q>| ≥ 1 − 1e−10`.
    pub fn same_as(&self, other: &Plane) -> bool {
        inner(&self.bivector, &other.bivector).abs() >= 1.0 - 1e-10
    }

    /// Image under an orthogonal map.
    pub fn transformed(&self, r: &LinearMap4) -> Result<Plane> {
        Plane::span(&r.apply(&self.basis[0]), &r.apply(&self.basis[1]))
    }
}

fn check_orthonormal(a: &Vector4, b: &Vector4) -> Result<()> {
    let ok = (a.norm() - 1.0).abs() <= ORTHONORMAL_TOL
        && (b.norm() - 1.0).abs() <= ORTHONORMAL_TOL
        && a.dot(b).abs() <= ORTHONORMAL_TOL;
    if ok {
        Ok(())
    } else {
        Err(Error::input("frame is not orthonormal within 1e-12"))
    }
}

/// The pair `(α₁, α₂)`, `0 ≤ α₁ ≤ α₂ ≤ π/2`, of principal angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicAngles {
    pub alpha1: f64,
    pub alpha2: f64,
}

fn symmetric_eigenvalues(p: f64, q: f64, s: f64) -> (f64, f64) {
    let mean = 0.5 * (p + s);
    let half = (0.5 * (p - s)).hypot(q);
    (mean - half, mean + half)
}

/// Principal angles between two planes.
///
/// Cosines come from the singular values of the 2×2 matrix of basis inner
/// products; sines from the residuals of `P`'s basis after projecting onto
/// `Q`, which keeps both ends of the range accurate.
pub fn characteristic_angles(p: &Plane, q: &Plane) -> CharacteristicAngles {
    let [a1, a2] = p.basis;
    let m = [q.coords(&a1), q.coords(&a2)];
    // M Mᵀ, its eigenvalues are the squared cosines
    let mm = (
        m[0][0] * m[0][0] + m[0][1] * m[0][1],
        m[0][0] * m[1][0] + m[0][1] * m[1][1],
        m[1][0] * m[1][0] + m[1][1] * m[1][1],
    );
    let (cos2_small, cos2_large) = symmetric_eigenvalues(mm.0, mm.1, mm.2);
    let r1 = a1 - q.project(&a1);
    let r2 = a2 - q.project(&a2);
    let (sin2_small, sin2_large) =
        symmetric_eigenvalues(r1.norm_squared(), r1.dot(&r2), r2.norm_squared());
    let angle = |s2: f64, c2: f64| s2.clamp(0.0, 1.0).sqrt().atan2(c2.clamp(0.0, 1.0).sqrt());
    CharacteristicAngles {
        alpha1: angle(sin2_small, cos2_large),
        alpha2: angle(sin2_large, cos2_small),
    }
}

fn check_angle_pair(alpha1: f64, alpha2: f64) -> Result<()> {
    let in_range = |a: f64| (0.0..=FRAC_PI_2).contains(&a);
    if !in_range(alpha1) || !in_range(alpha2) {
        return Err(Error::param(format!(
            "characteristic angles ({alpha1}, {alpha2}) outside [0, pi/2]"
        )));
    }
    if alpha1 > alpha2 {
        return Err(Error::param(format!(
            "characteristic angles need alpha1 <= alpha2, got ({alpha1}, {alpha2})"
        )));
    }
    Ok(())
}

/// Two planes with their first plane at `span(e1, e2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePair {
    pub first: Plane,
    pub second: Plane,
}

impl PlanePair {
    pub fn new(first: Plane, second: Plane) -> Self {
        PlanePair { first, second }
    }

    /// `P₀ = span(e1,e2) ∪ span(e3,e4)`.
    pub fn orthogonal() -> Self {
        PlanePair::new(Plane::coordinate(0, 1), Plane::coordinate(2, 3))
    }

    pub fn planes(&self) -> [&Plane; 2] {
        [&self.first, &self.second]
    }

    pub fn angles(&self) -> CharacteristicAngles {
        characteristic_angles(&self.first, &self.second)
    }

    /// Distance to the union of the two planes translated by `offset`.
    pub fn distance(&self, v: &Vector4, offset: &Vector4) -> f64 {
        let d = *v - *offset;
        self.first.distance(&d).min(self.second.distance(&d))
    }
}

/// `P¹ = span(e1, e2)` and `P² = span(cos α₁ e1 + sin α₁ e3, cos α₂ e2 + sin α₂ e4)`.
pub fn canonical_pair(alpha1: f64, alpha2: f64) -> Result<PlanePair> {
    check_angle_pair(alpha1, alpha2)?;
    let first = Plane::coordinate(0, 1);
    let f1 = Vector4::new(alpha1.cos(), 0.0, alpha1.sin(), 0.0);
    let f2 = Vector4::new(0.0, alpha2.cos(), 0.0, alpha2.sin());
    Ok(PlanePair::new(first, Plane::from_basis_unchecked(f1, f2)))
}

/// Orthogonal projector `b1 b1ᵀ + b2 b2ᵀ`.
pub fn projector(p: &Plane) -> LinearMap4 {
    let [b1, b2] = p.basis;
    LinearMap4(std::array::from_fn(|i| {
        std::array::from_fn(|j| b1.0[i] * b1.0[j] + b2.0[i] * b2.0[j])
    }))
}

/// Random element of SO(4) (Gram–Schmidt on Gaussian columns).
pub fn random_rotation(rng: &mut Stream) -> LinearMap4 {
    loop {
        let mut cols: Vec<Vector4> = Vec::with_capacity(4);
        for _ in 0..4 {
            let mut v = rng.gaussian_vector();
            for c in &cols {
                v = v - c.scale(v.dot(c));
            }
            match v.normalized() {
                Some(u) => cols.push(u),
                None => break,
            }
        }
        if cols.len() < 4 {
            continue;
        }
        let mut m = LinearMap4::from_columns([cols[0], cols[1], cols[2], cols[3]]);
        if determinant(&m) < 0.0 {
            for row in m.0.iter_mut() {
                row[3] = -row[3];
            }
        }
        return m;
    }
}

fn determinant(m: &LinearMap4) -> f64 {
    let mut a = m.0;
    let mut det = 1.0;
    for k in 0..4 {
        let pivot = (k..4)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            a.swap(pivot, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..4 {
            let f = a[i][k] / a[k][k];
            for j in k..4 {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Data of one element of Ξ for the orthogonal pair `P₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiElement {
    pub alpha: f64,
    pub v1: Vector4,
    pub v2: Vector4,
    pub u1: Vector4,
    pub u2: Vector4,
}

impl XiElement {
    /// Random element: uniform `α`, uniformly rotated frames of either orientation.
    pub fn random(rng: &mut Stream) -> XiElement {
        let alpha = rng.uniform_in(0.0, FRAC_PI_2);
        let (s, t) = (rng.uniform_in(0.0, std::f64::consts::TAU), rng.uniform_in(0.0, std::f64::consts::TAU));
        let flip_v = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
        let flip_u = if rng.uniform() < 0.5 { 1.0 } else { -1.0 };
        XiElement {
            alpha,
            v1: Vector4::new(s.cos(), s.sin(), 0.0, 0.0),
            v2: Vector4::new(-s.sin() * flip_v, s.cos() * flip_v, 0.0, 0.0),
            u1: Vector4::new(0.0, 0.0, t.cos(), t.sin()),
            u2: Vector4::new(0.0, 0.0, -t.sin() * flip_u, t.cos() * flip_u),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=FRAC_PI_2).contains(&self.alpha) {
            return Err(Error::param(format!("alpha {} outside [0, pi/2]", self.alpha)));
        }
        let p1 = Plane::coordinate(0, 1);
        let p2 = Plane::coordinate(2, 3);
        let inside = |v: &Vector4, p: &Plane| p.distance(v) <= ORTHONORMAL_TOL;
        if !(inside(&self.v1, &p1) && inside(&self.v2, &p1)) {
            return Err(Error::input("v1, v2 must lie in span(e1, e2)"));
        }
        if !(inside(&self.u1, &p2) && inside(&self.u2, &p2)) {
            return Err(Error::input("u1, u2 must lie in span(e3, e4)"));
        }
        check_orthonormal(&self.v1, &self.v2)?;
        check_orthonormal(&self.u1, &self.u2)
    }
}

/// `(cos α v1 + sin α u1) ∧ (cos α v2 + sin α u2)`.
pub fn xi_sample(e: &XiElement) -> Result<TwoVector> {
    e.validate()?;
    let (s, c) = e.alpha.sin_cos();
    let x = e.v1.scale(c) + e.u1.scale(s);
    let y = e.v2.scale(c) + e.u2.scale(s);
    Ok(wedge(&x, &y))
}

/// `[a e1 + b e2 + c e3 + d e4] ∧ [−b e1 + a e2 ± (−d e3 + c e4)]`, the
/// explicit description of Ξ; `holomorphic` selects the `+` branch.
pub fn xi_parametrized(q: [f64; 4], holomorphic: bool) -> TwoVector {
    let [a, b, c, d] = q;
    let s = if holomorphic { 1.0 } else { -1.0 };
    wedge(
        &Vector4::new(a, b, c, d),
        &Vector4::new(-b, a, -s * d, s * c),
    )
}

/// Membership in Ξ: `|<e12, ξ>| + |<e34, ξ>| ≥ 1 − tol` for a unit simple `ξ`.
pub fn xi_membership(xi: &TwoVector, tol: f64) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::param("membership tolerance must be positive"));
    }
    if (xi.norm() - 1.0).abs() > tol {
        return Err(Error::input(format!("2-vector has norm {}, expected 1", xi.norm())));
    }
    if !is_simple(xi, tol) {
        return Err(Error::input("2-vector is not simple"));
    }
    let sum = xi.0[0].abs() + xi.0[5].abs();
    Ok(sum >= 1.0 - tol)
}
