//! Discrete Plateau experiments for two planes: the union of two unit disks,
//! pinched competitors joined by a tube, fixed-boundary area descent and
//! projection certificates.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior_algebra::Vector4;
use crate::grassmann::{canonical_pair, Plane, PlanePair};
use crate::surfaces::{area, max_face_projection_sum, shadow_area, TriMesh4};

pub const MIN_SEGMENTS: usize = 32;

/// Disk-area deficit of the two inscribed `n`-gons: `2π − n sin(2π/n)`.
pub fn mesh_tolerance(n: usize) -> f64 {
    TAU - n as f64 * (TAU / n as f64).sin()
}

fn ring(plane: &Plane, radius: f64, n: usize) -> Vec<Vector4> {
    (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            plane.point([radius * t.cos(), radius * t.sin()])
        })
        .collect()
}

/// Faces joining consecutive rings of `n` vertices starting at `first`.
fn strip_faces(first: usize, rings: usize, n: usize, faces: &mut Vec<[usize; 3]>) {
    for k in 0..rings - 1 {
        let (a, b) = (first + k * n, first + (k + 1) * n);
        for j in 0..n {
            let jn = (j + 1) % n;
            faces.push([a + j, b + j, b + jn]);
            faces.push([a + j, b + jn, a + jn]);
        }
    }
}

/// Two unit disks in the canonical planes, each with `n/8` uniform rings of
/// `n` vertices, fanned to a single shared origin vertex; the `2n` boundary
/// vertices are fixed.
pub fn build_union_mesh(alpha1: f64, alpha2: f64, n: usize) -> Result<TriMesh4> {
    if n < MIN_SEGMENTS {
        return Err(Error::param(format!("need at least {MIN_SEGMENTS} boundary segments, got {n}")));
    }
    let pair = canonical_pair(alpha1, alpha2)?;
    let rings = (n / 8).max(1);
    let mut vertices = vec![Vector4::ZERO];
    let mut fixed = vec![false];
    let mut faces = Vec::new();
    for plane in pair.planes() {
        let first = vertices.len();
        for k in 1..=rings {
            vertices.extend(ring(plane, k as f64 / rings as f64, n));
            fixed.extend(std::iter::repeat_n(k == rings, n));
        }
        for j in 0..n {
            faces.push([0, first + j, first + (j + 1) % n]);
        }
        strip_faces(first, rings, n, &mut faces);
    }
    TriMesh4::new(vertices, faces, fixed)
}

/// The two disks cut at radius `pinch` and joined by the straight tube
/// `(1 − s) C¹(t) + s C²(t)` between the two cut circles.
///
/// The annuli use geometric ring spacing (ratio about `1 + 2π/n`, at most
/// `n/4` rings each) so cells stay roughly square down to the cut; the tube
/// gets as many rings as its length needs at the same spacing.
pub fn build_pinched_competitor(alpha1: f64, alpha2: f64, pinch: f64, n: usize) -> Result<TriMesh4> {
    if pinch == 0.0 {
        return build_union_mesh(alpha1, alpha2, n);
    }
    if n < MIN_SEGMENTS {
        return Err(Error::param(format!("need at least {MIN_SEGMENTS} boundary segments, got {n}")));
    }
    if !(pinch > 0.0 && pinch < 0.5) {
        return Err(Error::param(format!("pinch radius {pinch} outside [0, 0.5)")));
    }
    let spacing = pinch * TAU / n as f64;
    if spacing < 1e-4 {
        return Err(Error::degenerate(format!(
            "pinch radius {pinch} too small for {n} segments (edge {spacing:e})"
        )));
    }
    let pair = canonical_pair(alpha1, alpha2)?;
    let inner1 = ring(&pair.first, pinch, n);
    let inner2 = ring(&pair.second, pinch, n);
    let gap = inner1
        .iter()
        .zip(&inner2)
        .map(|(a, b)| a.distance(b))
        .fold(0.0f64, f64::max);
    if gap < 1e-9 {
        return Err(Error::degenerate("pinch circles coincide; the tube has no length"));
    }

    let span = (1.0 / pinch).ln();
    let annulus_rings = ((span / (1.0 + TAU / n as f64).ln()).ceil() as usize).clamp(2, n / 4);
    let radii: Vec<f64> = (0..=annulus_rings)
        .map(|k| pinch * (span * k as f64 / annulus_rings as f64).exp())
        .collect();
    let tube_rings = ((gap / spacing).ceil() as usize).max(2);

    // one cylinder: boundary of disk 1 inwards, tube, then out to boundary of disk 2
    let mut rings: Vec<(Vec<Vector4>, bool)> = Vec::new();
    for (k, &r) in radii.iter().enumerate().rev() {
        let pts = if k == 0 { inner1.clone() } else { ring(&pair.first, r, n) };
        rings.push((pts, k == annulus_rings));
    }
    for k in 1..tube_rings {
        let s = k as f64 / tube_rings as f64;
        let pts = inner1
            .iter()
            .zip(&inner2)
            .map(|(a, b)| a.scale(1.0 - s) + b.scale(s))
            .collect();
        rings.push((pts, false));
    }
    for (k, &r) in radii.iter().enumerate() {
        let pts = if k == 0 { inner2.clone() } else { ring(&pair.second, r, n) };
        rings.push((pts, k == annulus_rings));
    }
    let count = rings.len();
    let mut vertices = Vec::with_capacity(count * n);
    let mut fixed = Vec::with_capacity(count * n);
    for (pts, is_fixed) in rings {
        vertices.extend(pts);
        fixed.extend(std::iter::repeat_n(is_fixed, n));
    }
    let mut faces = Vec::with_capacity(2 * n * count);
    strip_faces(0, count, n, &mut faces);
    TriMesh4::new(vertices, faces, fixed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Initial line-search step.
    pub step: f64,
    pub tol_grad: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 400,
            step: 1.0,
            tol_grad: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeTrace {
    /// Area before the first step and after every accepted step.
    pub areas: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub line_search_failed: bool,
    pub final_grad_norm: f64,
}

/// Area gradient with respect to every vertex position.
fn area_gradient(mesh: &TriMesh4) -> Vec<Vector4> {
    let v = mesh.vertices();
    let mut grad = vec![Vector4::ZERO; v.len()];
    for &[a, b, c] in mesh.faces() {
        let u = v[b] - v[a];
        let w = v[c] - v[a];
        let (uu, ww, uw) = (u.norm_squared(), w.norm_squared(), u.dot(&w));
        let twice = (uu * ww - uw * uw).max(0.0).sqrt();
        if twice < 1e-300 {
            continue;
        }
        // dA/du = (|w|² u − (u·w) w) / (4A), with 4A = 2·twice
        let gu = (u.scale(ww) - w.scale(uw)).scale(0.5 / twice);
        let gw = (w.scale(uu) - u.scale(uw)).scale(0.5 / twice);
        grad[b] = grad[b] + gu;
        grad[c] = grad[c] + gw;
        grad[a] = grad[a] - gu - gw;
    }
    grad
}

/// One third of the area of the faces around each vertex.
fn vertex_areas(mesh: &TriMesh4) -> Vec<f64> {
    let mut m = vec![0.0; mesh.vertices().len()];
    for (k, f) in mesh.faces().iter().enumerate() {
        let a = mesh.face_area(k) / 3.0;
        for &i in f {
            m[i] += a;
        }
    }
    m
}

fn retract(v: Vector4) -> Vector4 {
    let r = v.norm();
    if r > 1.0 {
        v.scale(1.0 / r)
    } else {
        v
    }
}

/// Fixed-boundary area descent.
///
/// The search direction is the area gradient divided by the lumped vertex
/// area (the gradient for the L² metric of the surface), which keeps small
/// and large cells moving at comparable rates. Steps are accepted by an
/// Armijo backtracking test evaluated after free vertices leaving the unit
/// ball are pulled back radially, so the area never increases.
pub fn minimize_area(mesh: &TriMesh4, opt: &OptimizerConfig) -> Result<(TriMesh4, OptimizeTrace)> {
    if !(opt.step > 0.0) || !(opt.tol_grad >= 0.0) {
        return Err(Error::param("optimizer step must be positive and tol_grad non-negative"));
    }
    if mesh.fixed_count() == 0 && !mesh.faces().is_empty() {
        return Err(Error::input("mesh has no fixed boundary vertices"));
    }
    let free: Vec<usize> = (0..mesh.vertices().len()).filter(|&i| !mesh.fixed()[i]).collect();
    let mut current = mesh.clone();
    let mut value = area(&current);
    let mut trace = OptimizeTrace {
        areas: vec![value],
        iterations: 0,
        converged: false,
        line_search_failed: false,
        final_grad_norm: 0.0,
    };
    let mut t = opt.step;
    loop {
        let grad = area_gradient(&current);
        let grad_norm = free.iter().map(|&i| grad[i].norm_squared()).sum::<f64>().sqrt();
        trace.final_grad_norm = grad_norm;
        if grad_norm < opt.tol_grad {
            trace.converged = true;
            break;
        }
        if trace.iterations >= opt.max_iters {
            break;
        }
        let mass = vertex_areas(&current);
        let dir: Vec<Vector4> = free
            .iter()
            .map(|&i| grad[i].scale(1.0 / mass[i].max(1e-300)))
            .collect();
        let slope: f64 = free.iter().zip(&dir).map(|(&i, d)| grad[i].dot(d)).sum();
        let mut accepted = None;
        for _ in 0..60 {
            let mut verts = current.vertices().to_vec();
            for (&i, d) in free.iter().zip(&dir) {
                verts[i] = retract(verts[i] - d.scale(t));
            }
            let trial = current.with_vertices(verts);
            let a = area(&trial);
            if a <= value - 1e-4 * t * slope {
                accepted = Some((trial, a));
                break;
            }
            t *= 0.5;
        }
        trace.iterations += 1;
        match accepted {
            Some((trial, a)) => {
                current = trial;
                value = a;
                trace.areas.push(a);
                t *= 2.0;
            }
            None => {
                trace.line_search_failed = true;
                break;
            }
        }
    }
    Ok((current, trace))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub bound: f64,
    pub covers: [bool; 2],
    pub shadows: [f64; 2],
    pub lambda: f64,
    /// Rasterization tolerance of the bound.
    pub tolerance: f64,
}

pub const MIN_CERT_RESOLUTION: usize = 128;

/// `(H²(p¹F) + H²(p²F)) / λ` with `λ = min(1 + 2 cos α₁, max-face projection sum)`.
/// A shadow covers its disk when it reaches `(1 − 2/resolution) π`.
pub fn certificate_lower_bound(mesh: &TriMesh4, pair: &PlanePair, resolution: usize) -> Result<Certificate> {
    if resolution < MIN_CERT_RESOLUTION {
        return Err(Error::param(format!(
            "certificate resolution {resolution} below {MIN_CERT_RESOLUTION}"
        )));
    }
    let s1 = shadow_area(mesh, &pair.first, resolution)?;
    let s2 = shadow_area(mesh, &pair.second, resolution)?;
    let ceiling = 1.0 + 2.0 * pair.angles().alpha1.cos();
    let lambda = ceiling.min(max_face_projection_sum(mesh, &pair.first, &pair.second));
    if !(lambda > 0.0) {
        return Err(Error::degenerate("mesh has no face with a non-zero projection"));
    }
    let threshold = (1.0 - 2.0 / resolution as f64) * std::f64::consts::PI;
    Ok(Certificate {
        bound: (s1.area + s2.area) / lambda,
        covers: [s1.area >= threshold, s2.area >= threshold],
        shadows: [s1.area, s2.area],
        lambda,
        tolerance: (s1.tolerance + s2.tolerance) / lambda,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoImprovementFound,
    Improved,
    CertifiedOptimal,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NoImprovementFound => "no-improvement-found",
            Verdict::Improved => "improved",
            Verdict::CertifiedOptimal => "certified-optimal",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub alpha1: f64,
    pub alpha2: f64,
    pub boundary_segments: usize,
    pub pinch_radius: f64,
    pub optimizer: OptimizerConfig,
    /// Recorded in reports; the pipeline itself draws no random numbers.
    pub seed: u64,
    pub resolution: usize,
    pub certificates: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alpha1: FRAC_PI_2,
            alpha2: FRAC_PI_2,
            boundary_segments: 256,
            pinch_radius: 0.0,
            optimizer: OptimizerConfig::default(),
            seed: 0,
            resolution: 512,
            certificates: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 > 0.0 && self.alpha1 <= self.alpha2 && self.alpha2 <= FRAC_PI_2) {
            return Err(Error::param(format!(
                "angles ({}, {}) must satisfy 0 < alpha1 <= alpha2 <= pi/2",
                self.alpha1, self.alpha2
            )));
        }
        if !(self.pinch_radius >= 0.0 && self.pinch_radius < 0.5) {
            return Err(Error::param(format!(
                "pinch radius {} outside [0, 0.5)",
                self.pinch_radius
            )));
        }
        if self.boundary_segments < MIN_SEGMENTS {
            return Err(Error::param(format!(
                "need at least {MIN_SEGMENTS} boundary segments"
            )));
        }
        if self.certificates && self.resolution < MIN_CERT_RESOLUTION {
            return Err(Error::param(format!(
                "certificate resolution below {MIN_CERT_RESOLUTION}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub initial_area: f64,
    pub final_area: f64,
    pub reference_area: f64,
    pub mesh_tolerance: f64,
    pub area_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub line_search_failed: bool,
    pub certificate: Option<Certificate>,
    pub verdict: Verdict,
    pub vertices: usize,
    pub faces: usize,
}

impl ExperimentReport {
    pub fn certificate_bound(&self) -> Option<f64> {
        self.certificate.map(|c| c.bound)
    }

    pub fn shadows_cover(&self) -> [bool; 2] {
        self.certificate.map_or([false, false], |c| c.covers)
    }
}

/// Competitor construction, descent, certificate and verdict. Returns the
/// optimized mesh with the report.
pub fn run_experiment_with_mesh(cfg: &ExperimentConfig) -> Result<(ExperimentReport, TriMesh4)> {
    cfg.validate()?;
    let n = cfg.boundary_segments;
    let mesh = build_pinched_competitor(cfg.alpha1, cfg.alpha2, cfg.pinch_radius, n)?;
    let (optimized, trace) = minimize_area(&mesh, &cfg.optimizer)?;
    let pair = canonical_pair(cfg.alpha1, cfg.alpha2)?;
    let final_area = *trace.areas.last().unwrap();
    let mesh_tol = mesh_tolerance(n);
    let certificate = if cfg.certificates {
        Some(certificate_lower_bound(&optimized, &pair, cfg.resolution)?)
    } else {
        None
    };
    let verdict = if final_area < TAU - 2.0 * mesh_tol {
        Verdict::Improved
    } else {
        match certificate {
            Some(c) if c.covers == [true, true] => {
                let tol = c.tolerance + mesh_tol;
                let floor = TAU / (1.0 + 2.0 * cfg.alpha1.cos());
                if final_area >= c.bound - tol && c.bound >= floor - tol {
                    Verdict::CertifiedOptimal
                } else {
                    Verdict::NoImprovementFound
                }
            }
            _ => Verdict::NoImprovementFound,
        }
    };
    let report = ExperimentReport {
        config: *cfg,
        initial_area: trace.areas[0],
        final_area,
        reference_area: TAU,
        mesh_tolerance: mesh_tol,
        area_trace: trace.areas,
        iterations: trace.iterations,
        converged: trace.converged,
        line_search_failed: trace.line_search_failed,
        certificate,
        verdict,
        vertices: optimized.vertices().len(),
        faces: optimized.faces().len(),
    };
    Ok((report, optimized))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with_mesh(cfg).map(|r| r.0)
}

/// Independent experiments in parallel, reports sorted by
/// `(alpha1, alpha2, boundary_segments, pinch_radius, seed)`.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Result<Vec<ExperimentReport>> {
    let mut reports = configs
        .par_iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| {
        let key = |r: &ExperimentReport| {
            let c = r.config;
            (c.alpha1, c.alpha2, c.boundary_segments, c.pinch_radius, c.seed)
        };
        let (x, y) = (key(a), key(b));
        x.0.total_cmp(&y.0)
            .then(x.1.total_cmp(&y.1))
            .then(x.2.cmp(&y.2))
            .then(x.3.total_cmp(&y.3))
            .then(x.4.cmp(&y.4))
    });
    Ok(reports)
}
