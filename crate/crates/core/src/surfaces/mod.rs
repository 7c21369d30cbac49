//! Triangulated surfaces in R⁴: areas, tangent 2-vectors, projected areas
//! with and without multiplicity, and the graph-area and thin-band estimates.

mod mesh4;
mod raster;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior_algebra::{inner, wedge, TwoVector, Vector4};
use crate::grassmann::{characteristic_angles, Plane};

pub use mesh4::{read_mesh4, write_mesh4};
pub use raster::shadow_area;

/// Smallest admissible face area.
pub const MIN_FACE_AREA: f64 = 1e-14;

const CHUNK: usize = 4096;

/// Sum in fixed-size chunks, chunk totals added in index order, so the result
/// does not depend on the thread count.
pub(crate) fn ordered_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(n)).map(&f).sum())
        .collect();
    partial.iter().sum()
}

/// A triangulated 2-surface in R⁴ with per-vertex fixed flags.
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh4 {
    vertices: Vec<Vector4>,
    faces: Vec<[usize; 3]>,
    fixed: Vec<bool>,
}

impl TriMesh4 {
    /// Checks indices, face areas and that boundary edges close up into loops.
    pub fn new(vertices: Vec<Vector4>, faces: Vec<[usize; 3]>, fixed: Vec<bool>) -> Result<Self> {
        if fixed.len() != vertices.len() {
            return Err(Error::input(format!(
                "{} fixed flags for {} vertices",
                fixed.len(),
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("vertex {i} has a non-finite coordinate")));
        }
        for (k, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::input(format!("face {k} has an index out of range")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::input(format!("face {k} repeats a vertex")));
            }
        }
        let mesh = TriMesh4 {
            vertices,
            faces,
            fixed,
        };
        for k in 0..mesh.faces.len() {
            let a = mesh.face_area(k);
            if !(a >= MIN_FACE_AREA) {
                return Err(Error::input(format!("face {k} is degenerate (area {a:e})")));
            }
        }
        let mut degree = vec![0usize; mesh.vertices.len()];
        for [i, j] in mesh.boundary_edges() {
            degree[i] += 1;
            degree[j] += 1;
        }
        if let Some(v) = degree.iter().position(|d| d % 2 == 1) {
            return Err(Error::input(format!(
                "boundary edges do not form closed loops at vertex {v}"
            )));
        }
        Ok(mesh)
    }

    pub fn empty() -> Self {
        TriMesh4 {
            vertices: Vec::new(),
            faces: Vec::new(),
            fixed: Vec::new(),
        }
    }

    pub fn vertices(&self) -> &[Vector4] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    pub fn fixed_count(&self) -> usize {
        self.fixed.iter().filter(|&&b| b).count()
    }

    /// Same connectivity with new vertex positions. Faces may become
    /// degenerate; callers that move vertices handle that themselves.
    pub(crate) fn with_vertices(&self, vertices: Vec<Vector4>) -> TriMesh4 {
        debug_assert_eq!(vertices.len(), self.vertices.len());
        TriMesh4 {
            vertices,
            faces: self.faces.clone(),
            fixed: self.fixed.clone(),
        }
    }

    /// `(v1 − v0) ∧ (v2 − v0)`, twice the oriented area element.
    pub fn face_wedge(&self, face: usize) -> TwoVector {
        let [a, b, c] = self.faces[face];
        let v0 = self.vertices[a];
        wedge(&(self.vertices[b] - v0), &(self.vertices[c] - v0))
    }

    pub fn face_area(&self, face: usize) -> f64 {
        0.5 * self.face_wedge(face).norm()
    }

    /// Edges used by exactly one face, as sorted vertex pairs in sorted order.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (i, j) = (f[k], f[(k + 1) % 3]);
                *count.entry([i.min(j), i.max(j)]).or_default() += 1;
            }
        }
        let mut edges: Vec<[usize; 2]> = count
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(e, _)| e)
            .collect();
        edges.sort_unstable();
        edges
    }

    /// `V − E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges: Vec<[usize; 2]> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| [f[k].min(f[(k + 1) % 3]), f[k].max(f[(k + 1) % 3])]))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }

    /// Number of connected components of the face graph (isolated vertices ignored).
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in &self.faces {
            for k in 1..3 {
                let (a, b) = (find(&mut parent, f[0]), find(&mut parent, f[k]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut roots: Vec<usize> = self.faces.iter().map(|f| find(&mut parent, f[0])).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Image under a linear map of R⁴.
    pub fn mapped(&self, m: &crate::exterior_algebra::LinearMap4) -> TriMesh4 {
        self.with_vertices(self.vertices.iter().map(|v| m.apply(v)).collect())
    }

    /// Disjoint union; vertex indices of `other` are shifted.
    pub fn union(&self, other: &TriMesh4) -> TriMesh4 {
        let shift = self.vertices.len();
        let mut out = self.clone();
        out.vertices.extend_from_slice(&other.vertices);
        out.fixed.extend_from_slice(&other.fixed);
        out.faces
            .extend(other.faces.iter().map(|f| [f[0] + shift, f[1] + shift, f[2] + shift]));
        out
    }
}

/// Unit tangent 2-vector of a face.
pub fn face_tangent(mesh: &TriMesh4, face: usize) -> Result<TwoVector> {
    if face >= mesh.faces.len() {
        return Err(Error::input(format!("face {face} out of range")));
    }
    let w = mesh.face_wedge(face);
    if 0.5 * w.norm() < MIN_FACE_AREA {
        return Err(Error::degenerate(format!("face {face} is degenerate")));
    }
    Ok(w.scale(1.0 / w.norm()))
}

/// `Σ ½ |(v1 − v0) ∧ (v2 − v0)|`.
pub fn area(mesh: &TriMesh4) -> f64 {
    ordered_sum(mesh.faces.len(), |k| mesh.face_area(k))
}

/// `∫ |∧₂p(T_x F)| dH²`: each face's area weighted by its projection factor.
pub fn projected_area_with_multiplicity(mesh: &TriMesh4, plane: &Plane) -> f64 {
    let xi = plane.bivector();
    ordered_sum(mesh.faces.len(), |k| 0.5 * inner(xi, &mesh.face_wedge(k)).abs())
}

/// Largest projection sum over the faces (0 for an empty mesh).
pub fn max_face_projection_sum(mesh: &TriMesh4, p1: &Plane, p2: &Plane) -> f64 {
    let (b1, b2) = (p1.bivector(), p2.bivector());
    mesh.faces
        .par_iter()
        .enumerate()
        .map(|(k, _)| {
            let w = mesh.face_wedge(k);
            let n = w.norm();
            if 0.5 * n < MIN_FACE_AREA {
                0.0
            } else {
                (inner(b1, &w).abs() + inner(b2, &w).abs()) / n
            }
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionReport {
    pub area: f64,
    pub proj_area_mult: [f64; 2],
    pub shadow_area: [f64; 2],
    pub lambda_used: f64,
    /// `λ·area − (shadow₁ + shadow₂)`.
    pub inequality_slack: f64,
    /// Rasterization tolerance of the two shadows combined.
    pub tolerance: f64,
}

/// Both sides of `H²(p¹F) + H²(p²F) ≤ λ H²(F)` for a mesh.
pub fn projection_inequality_report(
    mesh: &TriMesh4,
    p1: &Plane,
    p2: &Plane,
    resolution: usize,
) -> Result<ProjectionReport> {
    let a = area(mesh);
    let m1 = projected_area_with_multiplicity(mesh, p1);
    let m2 = projected_area_with_multiplicity(mesh, p2);
    let s1 = shadow_area(mesh, p1, resolution)?;
    let s2 = shadow_area(mesh, p2, resolution)?;
    let ceiling = 1.0 + 2.0 * characteristic_angles(p1, p2).alpha1.cos() + 1e-9;
    let lambda = max_face_projection_sum(mesh, p1, p2).min(ceiling);
    Ok(ProjectionReport {
        area: a,
        proj_area_mult: [m1, m2],
        shadow_area: [s1.area, s2.area],
        lambda_used: lambda,
        inequality_slack: lambda * a - (s1.area + s2.area),
        tolerance: s1.tolerance + s2.tolerance,
    })
}

/// Polar grid on the annulus `r_in ≤ r ≤ r_out` of a plane, nodes
/// `(r_i, θ_j)` with `i = 0..=radial`, `j = 0..angular` (θ periodic).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusGrid {
    pub r_in: f64,
    pub r_out: f64,
    pub radial: usize,
    pub angular: usize,
}

impl AnnulusGrid {
    fn validate(&self) -> Result<()> {
        if !(self.r_in >= 0.0 && self.r_out > self.r_in && self.r_out.is_finite()) {
            return Err(Error::param(format!(
                "annulus radii ({}, {}) need 0 <= r_in < r_out",
                self.r_in, self.r_out
            )));
        }
        if self.radial < 1 || self.angular < 3 {
            return Err(Error::param("annulus grid needs at least 1 radial and 3 angular cells"));
        }
        Ok(())
    }

    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        let r = self.radius(i);
        let t = self.angle(j);
        [r * t.cos(), r * t.sin()]
    }

    fn radius(&self, i: usize) -> f64 {
        self.r_in + (self.r_out - self.r_in) * i as f64 / self.radial as f64
    }

    fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.angular as f64
    }

    pub fn node_count(&self) -> usize {
        (self.radial + 1) * self.angular
    }

    /// Exact area of the annulus.
    pub fn base_area(&self) -> f64 {
        PI * (self.r_out * self.r_out - self.r_in * self.r_in)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphAreaReport {
    pub area: f64,
    pub base_area: f64,
    pub dirichlet: f64,
    /// `area − base − ¼ dirichlet`.
    pub slack: f64,
    /// Largest operator norm of the cell Jacobians.
    pub max_gradient: f64,
}

/// Area of the graph of `φ: annulus → R²` (the orthogonal complement of
/// the base plane) against `base + ¼ Σ_c ∫ |∇φ_c|²`.
///
/// `values[i * angular + j]` is `φ` at node `(i, j)`. Each polar cell is
/// split into two triangles and `φ` interpolated linearly, so both sides are
/// integrated exactly for the piecewise-linear graph over the polygonal base.
pub fn graph_area_check(grid: &AnnulusGrid, values: &[[f64; 2]]) -> Result<GraphAreaReport> {
    grid.validate()?;
    if values.len() != grid.node_count() {
        return Err(Error::input(format!(
            "{} samples for a grid of {} nodes",
            values.len(),
            grid.node_count()
        )));
    }
    let (nr, nt) = (grid.radial, grid.angular);
    let node = |i: usize, j: usize| grid.node(i, j % nt);
    let value = |i: usize, j: usize| values[i * nt + j % nt];
    let cells: Vec<(f64, f64, f64, f64)> = (0..nr * nt * 2)
        .into_par_iter()
        .map(|c| {
            let (i, j, upper) = (c / (2 * nt), c / 2 % nt, c % 2 == 1);
            let tri = if upper {
                [(i, j), (i + 1, j + 1), (i, j + 1)]
            } else {
                [(i, j), (i + 1, j), (i + 1, j + 1)]
            };
            let p: [[f64; 2]; 3] = tri.map(|(a, b)| node(a, b));
            let v: [[f64; 2]; 3] = tri.map(|(a, b)| value(a, b));
            let e1 = [p[1][0] - p[0][0], p[1][1] - p[0][1]];
            let e2 = [p[2][0] - p[0][0], p[2][1] - p[0][1]];
            let det = e1[0] * e2[1] - e1[1] * e2[0];
            let base = 0.5 * det.abs();
            // rows: components; columns: d/dx, d/dy
            let mut jac = [[0.0; 2]; 2];
            for k in 0..2 {
                let (d1, d2) = (v[1][k] - v[0][k], v[2][k] - v[0][k]);
                jac[k] = [(d1 * e2[1] - d2 * e1[1]) / det, (d2 * e1[0] - d1 * e2[0]) / det];
            }
            // Gram matrix I + JᵀJ
            let g11 = 1.0 + jac[0][0] * jac[0][0] + jac[1][0] * jac[1][0];
            let g22 = 1.0 + jac[0][1] * jac[0][1] + jac[1][1] * jac[1][1];
            let g12 = jac[0][0] * jac[0][1] + jac[1][0] * jac[1][1];
            let frob = g11 + g22 - 2.0;
            let det_j = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let op_norm = (0.5 * (frob + ((frob * frob - 4.0 * det_j * det_j).max(0.0)).sqrt())).sqrt();
            let area = (g11 * g22 - g12 * g12).sqrt() * base;
            (area, frob * base, op_norm, base)
        })
        .collect();
    let max_gradient = cells.iter().fold(0.0f64, |m, c| m.max(c.2));
    if max_gradient >= 1.0 {
        return Err(Error::input(format!(
            "gradient norm {max_gradient} violates the bound |grad phi| < 1"
        )));
    }
    let area: f64 = cells.iter().map(|c| c.0).sum();
    let dirichlet: f64 = cells.iter().map(|c| c.1).sum();
    let base_area: f64 = cells.iter().map(|c| c.3).sum();
    Ok(GraphAreaReport {
        area,
        base_area,
        dirichlet,
        slack: area - base_area - 0.25 * dirichlet,
        max_gradient,
    })
}

/// Samples `φ` at the grid nodes.
pub fn sample_graph<F: Fn(f64, f64) -> [f64; 2]>(grid: &AnnulusGrid, phi: F) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(grid.node_count());
    for i in 0..=grid.radial {
        for j in 0..grid.angular {
            let [x, y] = grid.node(i, j);
            out.push(phi(x, y));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandReport {
    pub area: f64,
    /// `√2 · 2πρ · ‖h‖∞`, which is `(3√2/2) π ‖h‖∞` at `ρ = ¾`.
    pub bound: f64,
    /// True when `ρ = ¾`, the radius the constant is stated for.
    pub exact_radius: bool,
}

/// Area of the band `{(x, t h(x)) : |x| = ρ, 0 ≤ t ≤ 1}` for `h` sampled at
/// `m` equally spaced points of the circle of radius `rho`.
///
/// On each arc segment `h` is linear in arc length, so the `t`-integral of
/// the area element `√(|h|² + t²(|h'|²|h|² − (h'·h)²))` is taken in closed
/// form at the segment midpoint.
pub fn band_area(h: &[[f64; 2]], rho: f64, check_lip: bool) -> Result<BandReport> {
    let m = h.len();
    if m < 3 {
        return Err(Error::input("band needs at least 3 samples"));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::param(format!("radius {rho} must be positive")));
    }
    let ds = TAU * rho / m as f64;
    let mut area = 0.0;
    let mut sup: f64 = 0.0;
    for j in 0..m {
        let (a, b) = (h[j], h[(j + 1) % m]);
        sup = sup.max(a[0].hypot(a[1]));
        let d = [(b[0] - a[0]) / ds, (b[1] - a[1]) / ds];
        let slope = d[0].hypot(d[1]);
        if check_lip && slope > 1.0 + 1e-12 {
            return Err(Error::input(format!(
                "h has slope {slope} > 1 between samples {j} and {}",
                (j + 1) % m
            )));
        }
        let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let hh = mid[0] * mid[0] + mid[1] * mid[1];
        let dot = d[0] * mid[0] + d[1] * mid[1];
        let cross = (slope * slope * hh - dot * dot).max(0.0);
        area += ds * sqrt_quadratic_integral(hh, cross);
    }
    Ok(BandReport {
        area,
        bound: 2.0f64.sqrt() * TAU * rho * sup,
        exact_radius: rho == 0.75,
    })
}

/// `∫₀¹ √(a + b t²) dt` for `a, b ≥ 0`.
fn sqrt_quadratic_integral(a: f64, b: f64) -> f64 {
    if b <= 1e-300 || b < 1e-14 * a {
        return a.sqrt() * (1.0 + b / (6.0 * a.max(1e-300)));
    }
    if a <= 1e-300 {
        return 0.5 * b.sqrt();
    }
    let sb = b.sqrt();
    0.5 * (a + b).sqrt() + a / (2.0 * sb) * (sb / a.sqrt()).asinh()
}

/// Disk of radius `radius` in `plane`, centered at `center`: `rings` uniform
/// rings of `n` vertices each around a central vertex; boundary ring fixed.
pub fn disk_mesh(plane: &Plane, center: Vector4, radius: f64, n: usize, rings: usize) -> Result<TriMesh4> {
    if n < 3 || rings < 1 {
        return Err(Error::param("disk mesh needs n >= 3 and at least one ring"));
    }
    let radii: Vec<f64> = (1..=rings).map(|k| radius * k as f64 / rings as f64).collect();
    let mut vertices = vec![center];
    let mut fixed = vec![false];
    let mut faces = Vec::new();
    for (k, &r) in radii.iter().enumerate() {
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            vertices.push(center + plane.point([r * t.cos(), r * t.sin()]));
            fixed.push(k + 1 == rings);
        }
    }
    let ring = |k: usize, j: usize| 1 + k * n + j % n;
    for j in 0..n {
        faces.push([0, ring(0, j), ring(0, j + 1)]);
    }
    for k in 0..rings - 1 {
        for j in 0..n {
            faces.push([ring(k, j), ring(k + 1, j), ring(k + 1, j + 1)]);
            faces.push([ring(k, j), ring(k + 1, j + 1), ring(k, j + 1)]);
        }
    }
    TriMesh4::new(vertices, faces, fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{canonical_pair, random_rotation, PlanePair};
    use crate::rng::Stream;

    fn unit_disk(plane: &Plane, n: usize) -> TriMesh4 {
        disk_mesh(plane, Vector4::ZERO, 1.0, n, n / 8).unwrap()
    }

    #[test]
    fn face_tangents() {
        let disk = unit_disk(&Plane::coordinate(0, 1), 32);
        let t = face_tangent(&disk, 0).unwrap();
        assert!((t.coeff(0, 1).abs() - 1.0).abs() < 1e-15);
        let pair = canonical_pair(0.4, 0.9).unwrap();
        let disk = unit_disk(&pair.second, 32);
        for k in [0, 7, 100] {
            let t = face_tangent(&disk, k).unwrap();
            assert!((inner(&t, pair.second.bivector()).abs() - 1.0).abs() < 1e-12);
            assert!(crate::exterior_algebra::is_simple(&t, 1e-10));
        }
        assert!(face_tangent(&disk, 10_000).is_err());
    }

    #[test]
    fn disk_areas() {
        let disk = unit_disk(&Plane::coordinate(0, 1), 256);
        let n = 256.0;
        assert!((area(&disk) - PI).abs() < 5e-3);
        assert!((area(&disk) - 0.5 * n * (TAU / n).sin()).abs() < 1e-12);
        let pair = PlanePair::orthogonal();
        let both = unit_disk(&pair.first, 256).union(&unit_disk(&pair.second, 256));
        assert!((area(&both) - TAU).abs() < 1e-2);
        assert_eq!(area(&TriMesh4::empty()), 0.0);
    }

    #[test]
    fn disk_area_converges_at_second_order() {
        let plane = Plane::coordinate(0, 1);
        let err = |n: usize| PI - area(&unit_disk(&plane, n));
        let order = (err(64) / err(128)).log2();
        assert!(order >= 1.9, "{order}");
    }

    #[test]
    fn projected_areas() {
        let pair = PlanePair::orthogonal();
        let disk = unit_disk(&pair.first, 64);
        let a = area(&disk);
        assert!((projected_area_with_multiplicity(&disk, &pair.first) - a).abs() < 1e-12);
        assert!(projected_area_with_multiplicity(&disk, &pair.second).abs() < 1e-12);
        let (a1, a2) = (0.5, 1.0);
        let pair = canonical_pair(a1, a2).unwrap();
        let disk = unit_disk(&pair.second, 64);
        let v = projected_area_with_multiplicity(&disk, &pair.first);
        assert!((v - a1.cos() * a2.cos() * area(&disk)).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_area() {
        let mut rng = Stream::new(4);
        let pair = canonical_pair(0.3, 1.2).unwrap();
        let mesh = unit_disk(&pair.first, 64).union(&unit_disk(&pair.second, 64));
        for _ in 0..10 {
            let r = random_rotation(&mut rng);
            assert!((area(&mesh.mapped(&r)) - area(&mesh)).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_report_on_orthogonal_disks() {
        let pair = PlanePair::orthogonal();
        let mesh = unit_disk(&pair.first, 128).union(&unit_disk(&pair.second, 128));
        let r = projection_inequality_report(&mesh, &pair.first, &pair.second, 512).unwrap();
        assert!((r.lambda_used - 1.0).abs() < 1e-12);
        assert!(r.inequality_slack.abs() <= r.tolerance, "{r:?}");
        assert!(r.inequality_slack >= -r.tolerance);
    }

    #[test]
    fn projection_report_single_disk_any_pair() {
        let mut rng = Stream::new(8);
        for _ in 0..5 {
            let (a, b) = rng.orthonormal_pair();
            let (c, d) = rng.orthonormal_pair();
            let p1 = Plane::from_orthonormal(a, b).unwrap();
            let p2 = Plane::from_orthonormal(c, d).unwrap();
            let disk = unit_disk(&Plane::coordinate(0, 2), 64);
            let r = projection_inequality_report(&disk, &p1, &p2, 256).unwrap();
            assert!(r.inequality_slack >= -r.tolerance - 1e-6, "{r:?}");
        }
    }

    #[test]
    fn mesh_validation() {
        let v = vec![Vector4::ZERO, Vector4::basis(0), Vector4::basis(1)];
        assert!(TriMesh4::new(v.clone(), vec![[0, 1, 3]], vec![false; 3]).is_err());
        let flat = vec![Vector4::ZERO, Vector4::basis(0), Vector4::basis(0).scale(2.0)];
        assert!(TriMesh4::new(flat, vec![[0, 1, 2]], vec![false; 3]).is_err());
        assert!(TriMesh4::new(v.clone(), vec![[0, 1, 2]], vec![false; 2]).is_err());
        let ok = TriMesh4::new(v, vec![[0, 1, 2]], vec![true; 3]).unwrap();
        assert_eq!(ok.boundary_edges().len(), 3);
        assert_eq!(ok.euler_characteristic(), 1);
    }

    #[test]
    fn graph_area_examples() {
        let grid = AnnulusGrid {
            r_in: 0.25,
            r_out: 1.0,
            radial: 32,
            angular: 128,
        };
        let zero = sample_graph(&grid, |_, _| [0.0, 0.0]);
        let r = graph_area_check(&grid, &zero).unwrap();
        assert_eq!(r.dirichlet, 0.0);
        assert!((r.area - r.base_area).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-12);
        let linear = sample_graph(&grid, |x, _| [0.5 * x, 0.0]);
        let r = graph_area_check(&grid, &linear).unwrap();
        assert!((r.area / r.base_area - 1.25f64.sqrt()).abs() < 1e-12);
        assert!((r.dirichlet / r.base_area - 0.25).abs() < 1e-12);
        assert!(r.slack > 0.0);
        let wave = sample_graph(&grid, |x, _| [0.1 * x.sin(), 0.0]);
        let r = graph_area_check(&grid, &wave).unwrap();
        assert!(r.slack > -1e-4);
        let steep = sample_graph(&grid, |x, y| [1.2 * x, 0.3 * y]);
        assert!(graph_area_check(&grid, &steep).is_err());
    }

    #[test]
    fn band_examples() {
        let m = 512;
        let r = band_area(&vec![[0.01, 0.0]; m], 0.75, true).unwrap();
        assert!((r.area - 1.5 * PI * 0.01).abs() < 1e-12);
        assert!((r.bound - 1.5 * 2.0f64.sqrt() * PI * 0.01).abs() < 1e-15);
        assert!(r.exact_radius);
        assert!(r.area <= r.bound);
        let r = band_area(&vec![[0.0, 0.0]; m], 0.75, true).unwrap();
        assert_eq!(r.area, 0.0);
        let wavy: Vec<[f64; 2]> = (0..m)
            .map(|j| [0.01 * (4.0 * TAU * j as f64 / m as f64).cos(), 0.0])
            .collect();
        let r = band_area(&wavy, 0.75, true).unwrap();
        assert!(r.area < r.bound);
        let steep: Vec<[f64; 2]> = (0..m)
            .map(|j| [(40.0 * TAU * j as f64 / m as f64).cos(), 0.0])
            .collect();
        assert!(band_area(&steep, 0.75, true).is_err());
        assert!(band_area(&steep, 0.75, false).is_ok());
    }

    #[test]
    fn closed_form_t_integral() {
        for (a, b) in [(1.0, 0.0), (0.3, 2.0), (1e-4, 5.0), (2.0, 1e-20)] {
            let steps = 200_000;
            let mid: f64 = (0..steps)
                .map(|k| {
                    let t = (k as f64 + 0.5) / steps as f64;
                    (a + b * t * t).sqrt()
                })
                .sum::<f64>()
                / steps as f64;
            assert!((sqrt_quadratic_integral(a, b) - mid).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn ordered_sum_is_thread_independent() {
        let f = |k: usize| 1.0 / (1.0 + k as f64);
        let a = ordered_sum(100_000, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| ordered_sum(100_000, f));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
