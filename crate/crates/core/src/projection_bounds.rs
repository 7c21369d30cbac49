//! Sums of the projections of a unit simple 2-vector onto two planes, the
//! `1 + 2 cos α₁` ceiling for almost orthogonal pairs, and a grid-then-ascent
//! search for the supremum.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior_algebra::{apply_map2, inner, is_simple, wedge, TwoVector, Vector4};
use crate::grassmann::{characteristic_angles, projector, Plane};
use crate::rng::Stream;

const UNIT_TOL: f64 = 1e-9;

fn check_unit_simple(xi: &TwoVector) -> Result<()> {
    if (xi.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::input(format!("2-vector has norm {}, expected 1", xi.norm())));
    }
    if !is_simple(xi, UNIT_TOL) {
        return Err(Error::input("2-vector is not simple"));
    }
    Ok(())
}

/// `|∧₂p¹(ξ)| + |∧₂p²(ξ)|` for a unit simple `ξ`.
pub fn projection_sum(p1: &Plane, p2: &Plane, xi: &TwoVector) -> Result<f64> {
    check_unit_simple(xi)?;
    let a = apply_map2(&projector(p1), xi).norm();
    let b = apply_map2(&projector(p2), xi).norm();
    Ok(a + b)
}

/// Same quantity through `|∧₂p(ξ)| = |<ξ_P, ξ>|`, valid for unit simple `ξ`.
#[inline]
fn projection_sum_unchecked(b1: &TwoVector, b2: &TwoVector, xi: &TwoVector) -> f64 {
    inner(b1, xi).abs() + inner(b2, xi).abs()
}

/// `1 + 2 cos α₁`.
pub fn wirtinger_bound(alpha1: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&alpha1) {
        return Err(Error::param(format!("alpha1 = {alpha1} outside [0, pi/2]")));
    }
    Ok(1.0 + 2.0 * alpha1.cos())
}

/// Smallest `α₁` with `1 + 2 cos α₁ ≤ 1 + ε`.
pub fn angle_threshold(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::param(format!("eps = {eps} outside (0, 2]")));
    }
    Ok((eps / 2.0).acos())
}

/// `2π / (1 + ε)`.
pub fn area_lower_bound(eps: f64) -> Result<f64> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::param(format!("eps = {eps} must be a finite non-negative number")));
    }
    Ok(TAU / (1.0 + eps))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Grid points per angle coordinate.
    pub grid: usize,
    /// Maximum number of pattern-search iterations per start.
    pub refine_steps: usize,
    /// Number of best grid cells refined.
    pub starts: usize,
    /// Non-zero seeds shift the azimuthal grids by a random fraction of a cell.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: 48,
            refine_steps: 200,
            starts: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub sup_value: f64,
    pub argmax: TwoVector,
    /// `1 + 2 cos α₁` of the pair.
    pub bound: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub samples: u64,
    pub refinement_iters: u64,
}

/// Unit 2-plane `x ∧ y` from four angles.
///
/// Every plane meets `e4^⊥` in a line, so `x` ranges over the unit sphere of
/// `span(e1,e2,e3)` and `y` over the unit sphere of `x^⊥`, written in the
/// frame `(∂θ x, ∂φ x / sin θ, e4)`.
pub fn plane_from_angles(t: [f64; 4]) -> (Vector4, Vector4) {
    let (sx, cx) = t[0].sin_cos();
    let (sp, cp) = t[1].sin_cos();
    let x = Vector4::new(sx * cp, sx * sp, cx, 0.0);
    let e_theta = Vector4::new(cx * cp, cx * sp, -sx, 0.0);
    let e_phi = Vector4::new(-sp, cp, 0.0, 0.0);
    let (sy, cy) = t[2].sin_cos();
    let (sq, cq) = t[3].sin_cos();
    let y = e_theta.scale(sy * cq) + e_phi.scale(sy * sq) + Vector4::basis(3).scale(cy);
    (x, y)
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    value: f64,
    index: [usize; 4],
}

fn better(a: &Candidate, b: &Candidate) -> Ordering {
    b.value
        .total_cmp(&a.value)
        .then_with(|| a.index.cmp(&b.index))
}

fn keep_best(list: &mut Vec<Candidate>, c: Candidate, k: usize) {
    if list.len() == k && better(&c, list.last().unwrap()) != Ordering::Less {
        return;
    }
    let pos = list
        .binary_search_by(|probe| better(probe, &c))
        .unwrap_or_else(|e| e);
    list.insert(pos, c);
    list.truncate(k);
}

/// Supremum of the projection sum over all unit simple 2-vectors.
pub fn sup_projection_sum(p1: &Plane, p2: &Plane, cfg: &SearchConfig) -> Result<BoundReport> {
    if cfg.grid < 16 {
        return Err(Error::param(format!("search grid {} below 16", cfg.grid)));
    }
    if cfg.starts == 0 {
        return Err(Error::param("search needs at least one start"));
    }
    let n = cfg.grid;
    let angles = characteristic_angles(p1, p2);
    let (b1, b2) = (*p1.bivector(), *p2.bivector());
    let (phi_shift, psi_shift) = if cfg.seed == 0 {
        (0.0, 0.0)
    } else {
        let mut rng = Stream::new(cfg.seed);
        (rng.uniform() * TAU / n as f64, rng.uniform() * TAU / n as f64)
    };
    let polar = |i: usize| i as f64 * FRAC_PI_2 / (n - 1) as f64;
    let phi = |j: usize| j as f64 * TAU / n as f64 + phi_shift;
    let psi = |j: usize| j as f64 * TAU / n as f64 + psi_shift;
    let param = |idx: [usize; 4]| [polar(idx[0]), phi(idx[1]), polar(idx[2]), psi(idx[3])];

    // x together with its tangent frame, one entry per (θx, φx) cell
    let frames: Vec<[Vector4; 3]> = (0..n * n)
        .map(|c| {
            let (sx, cx) = polar(c / n).sin_cos();
            let (sp, cp) = phi(c % n).sin_cos();
            [
                Vector4::new(sx * cp, sx * sp, cx, 0.0),
                Vector4::new(cx * cp, cx * sp, -sx, 0.0),
                Vector4::new(-sp, cp, 0.0, 0.0),
            ]
        })
        .collect();
    let y_coeffs: Vec<[f64; 3]> = (0..n * n)
        .map(|c| {
            let (sy, cy) = polar(c / n).sin_cos();
            let (sq, cq) = psi(c % n).sin_cos();
            [sy * cq, sy * sq, cy]
        })
        .collect();

    let k = cfg.starts;
    let per_x: Vec<Vec<Candidate>> = frames
        .par_iter()
        .enumerate()
        .map(|(cx_idx, [x, et, ep])| {
            let mut best = Vec::with_capacity(k + 1);
            for (cy_idx, c) in y_coeffs.iter().enumerate() {
                let y = et.scale(c[0]) + ep.scale(c[1]) + Vector4::basis(3).scale(c[2]);
                let value = projection_sum_unchecked(&b1, &b2, &wedge(x, &y));
                let index = [cx_idx / n, cx_idx % n, cy_idx / n, cy_idx % n];
                keep_best(&mut best, Candidate { value, index }, k);
            }
            best
        })
        .collect();
    let mut top = Vec::with_capacity(k + 1);
    for list in per_x {
        for c in list {
            keep_best(&mut top, c, k);
        }
    }

    let objective = |t: &[f64; 4]| {
        let (x, y) = plane_from_angles(*t);
        projection_sum_unchecked(&b1, &b2, &wedge(&x, &y))
    };
    let initial_step = FRAC_PI_2 / (n - 1) as f64;
    let refined: Vec<(f64, [f64; 4], u64)> = top
        .par_iter()
        .map(|c| pattern_ascent(&objective, param(c.index), c.value, initial_step, cfg.refine_steps))
        .collect();

    let mut best = 0;
    for (i, r) in refined.iter().enumerate() {
        // refined is ordered by grid rank, so ties keep the earlier start
        if r.0 > refined[best].0 {
            best = i;
        }
    }
    let (sup_value, t, _) = refined[best];
    let (x, y) = plane_from_angles(t);
    let argmax = wedge(&x, &y)
        .normalized()
        .ok_or_else(|| Error::degenerate("search returned a degenerate 2-vector"))?;
    Ok(BoundReport {
        sup_value,
        argmax,
        bound: 1.0 + 2.0 * angles.alpha1.cos(),
        alpha1: angles.alpha1,
        alpha2: angles.alpha2,
        samples: (n as u64).pow(4),
        refinement_iters: refined.iter().map(|r| r.2).sum(),
    })
}

/// Hooke–Jeeves pattern search: coordinate probes of size `h`, an
/// extrapolating move after each success, and `h` halved after a failure.
fn pattern_ascent<F: Fn(&[f64; 4]) -> f64>(
    f: &F,
    mut t: [f64; 4],
    mut value: f64,
    mut h: f64,
    max_iters: usize,
) -> (f64, [f64; 4], u64) {
    let explore = |base: [f64; 4], mut v: f64, h: f64| {
        let mut p = base;
        for axis in 0..4 {
            for dir in [1.0, -1.0] {
                let mut trial = p;
                trial[axis] += dir * h;
                let tv = f(&trial);
                if tv > v {
                    v = tv;
                    p = trial;
                    break;
                }
            }
        }
        (p, v)
    };
    let mut iters = 0;
    while iters < max_iters && h > 1e-12 {
        iters += 1;
        let (p, v) = explore(t, value, h);
        if v <= value {
            h *= 0.5;
            continue;
        }
        let mut prev = t;
        t = p;
        value = v;
        // keep moving along the last displacement while it pays off
        while iters < max_iters {
            let jump: [f64; 4] = std::array::from_fn(|i| 2.0 * t[i] - prev[i]);
            let (q, w) = explore(jump, f(&jump), h);
            if w <= value {
                break;
            }
            iters += 1;
            prev = t;
            t = q;
            value = w;
        }
    }
    (value, t, iters as u64)
}

/// Coarse supremum curve of a canonical family, for plotting.
pub fn sup_curve(alpha2: f64, alphas: &[f64], cfg: &SearchConfig) -> Result<Vec<f64>> {
    alphas
        .iter()
        .map(|&a| {
            let pair = crate::grassmann::canonical_pair(a.min(alpha2), alpha2)?;
            Ok(sup_projection_sum(&pair.first, &pair.second, cfg)?.sup_value)
        })
        .collect()
}

/// `1 + cos α₁ cos α₂`, the value at `ξ = e1 ∧ e2` for the canonical pair.
pub fn first_plane_value(alpha1: f64, alpha2: f64) -> f64 {
    1.0 + alpha1.cos() * alpha2.cos()
}
