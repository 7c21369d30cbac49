//! Multiscale flatness scanning against a translated pair of planes.
//!
//! Sets are finite samples with a declared resolution `h`: every point of the
//! underlying set lies within `h` of a sample. Distances *to* a sample are
//! corrected down by `h` so they never overestimate the distance to the set.

use std::fmt;

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior_algebra::{LinearMap4, Vector4};
use crate::grassmann::{random_rotation, Plane, PlanePair};
use crate::rng::Stream;
use crate::surfaces::TriMesh4;

/// Fraction of the scale used as lattice spacing when sampling `P + q`.
pub const PLANE_SAMPLE_FRACTION: f64 = 1.0 / 48.0;

pub struct SetSample {
    points: Vec<Vector4>,
    resolution: f64,
    tree: ImmutableKdTree<f64, 4>,
    // Points go into the tree in a generic frame: samples lying in
    // coordinate planes would otherwise share split values on whole axes.
    frame: LinearMap4,
}

impl fmt::Debug for SetSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetSample")
            .field("points", &self.points.len())
            .field("resolution", &self.resolution)
            .finish()
    }
}

impl SetSample {
    pub fn new(points: Vec<Vector4>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::input("set sample is empty"));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::param(format!("sample resolution {resolution} must be positive")));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::input(format!("sample point {i} is not finite")));
        }
        let frame = random_rotation(&mut Stream::new(0x5ca1ab1e));
        let rotated: Vec<[f64; 4]> = points.iter().map(|p| frame.apply(p).0).collect();
        let tree = ImmutableKdTree::new_from_slice(&rotated)
            .map_err(|e| Error::input(format!("cannot index sample: {e:?}")))?;
        Ok(SetSample {
            points,
            resolution,
            tree,
            frame,
        })
    }

    /// Vertices plus a barycentric lattice on every face fine enough that
    /// lattice neighbours are at most `h` apart.
    pub fn from_mesh(mesh: &TriMesh4, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::param(format!("sample resolution {h} must be positive")));
        }
        let v = mesh.vertices();
        let mut points = Vec::new();
        for &[a, b, c] in mesh.faces() {
            let (pa, pb, pc) = (v[a], v[b], v[c]);
            let edge = pa.distance(&pb).max(pb.distance(&pc)).max(pc.distance(&pa));
            let m = ((edge / h).ceil() as usize).max(1);
            for i in 0..=m {
                for j in 0..=m - i {
                    let (s, t) = (i as f64 / m as f64, j as f64 / m as f64);
                    points.push(pa + (pb - pa).scale(s) + (pc - pa).scale(t));
                }
            }
        }
        if points.is_empty() {
            points.extend_from_slice(v);
        }
        SetSample::new(points, h)
    }

    /// Square lattice of spacing `h` on `(P¹ ∪ P²) + offset`, inside the
    /// ball of `radius` about `offset`.
    pub fn plane_pair(pair: &PlanePair, offset: Vector4, radius: f64, h: f64) -> Result<Self> {
        if !(radius > 0.0 && h > 0.0) {
            return Err(Error::param("radius and resolution must be positive"));
        }
        let mut points = Vec::new();
        for plane in pair.planes() {
            points.extend(disk_lattice(plane, offset, [0.0, 0.0], radius, h));
        }
        SetSample::new(points, h)
    }

    pub fn points(&self) -> &[Vector4] {
        &self.points
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance to the nearest sample point.
    pub fn nearest(&self, y: &Vector4) -> f64 {
        let q = self.frame.apply(y).0;
        let hit = self.tree.query(&q).nearest_one::<SquaredEuclidean<f64>>().execute();
        hit.distance.max(0.0).sqrt()
    }

    /// Lower estimate of the distance to the sampled set: `max(0, nearest − h)`.
    pub fn distance_to(&self, y: &Vector4) -> f64 {
        (self.nearest(y) - self.resolution).max(0.0)
    }
}

/// Points `origin + u`, `u ∈ plane`, with plane coordinates on the lattice of
/// spacing `h` centered at `center` and `|u − center| ≤ radius`.
fn disk_lattice(plane: &Plane, origin: Vector4, center: [f64; 2], radius: f64, h: f64) -> Vec<Vector4> {
    let k = (radius / h).floor() as i64;
    let mut out = Vec::new();
    for a in -k..=k {
        for b in -k..=k {
            let (u, w) = (a as f64 * h, b as f64 * h);
            if u * u + w * w <= radius * radius {
                out.push(origin + plane.point([center[0] + u, center[1] + w]));
            }
        }
    }
    out
}

fn planar_norm(plane: &Plane, v: &Vector4) -> f64 {
    let c = plane.coords(v);
    c[0].hypot(c[1])
}

/// Whether `y` lies in the closed bi-cylinder `D(x, r)` of the pair.
pub fn in_bicylinder(pair: &PlanePair, x: &Vector4, r: f64, y: &Vector4) -> bool {
    let d = *y - *x;
    planar_norm(&pair.first, &d) <= r && planar_norm(&pair.second, &d) <= r
}

/// The points of `points` in the closed bi-cylinder `D(x, r)`, order kept.
pub fn bicylinder_clip(points: &[Vector4], pair: &PlanePair, x: &Vector4, r: f64) -> Vec<Vector4> {
    points
        .iter()
        .filter(|y| in_bicylinder(pair, x, r, y))
        .copied()
        .collect()
}

fn check_scale(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("scale {r} must be positive")))
    }
}

fn sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// `(1/r) max(sup_{E ∩ D} d(·, F), sup_{F ∩ D} d(·, E))`, each clipped side
/// measured against the whole other set. An empty clip contributes 0.
pub fn relative_distance(e: &SetSample, f: &SetSample, pair: &PlanePair, x: &Vector4, r: f64) -> Result<f64> {
    check_scale(r)?;
    let ef = sup(bicylinder_clip(&e.points, pair, x, r).iter().map(|y| f.distance_to(y)));
    let fe = sup(bicylinder_clip(&f.points, pair, x, r).iter().map(|y| e.distance_to(y)));
    Ok(ef.max(fe) / r)
}

/// `(1/r) d_H(E ∩ D, F ∩ D)`, infinite when exactly one clip is empty.
pub fn clipped_hausdorff(e: &SetSample, f: &SetSample, pair: &PlanePair, x: &Vector4, r: f64) -> Result<f64> {
    check_scale(r)?;
    let ce = bicylinder_clip(&e.points, pair, x, r);
    let cf = bicylinder_clip(&f.points, pair, x, r);
    match (ce.is_empty(), cf.is_empty()) {
        (true, true) => Ok(0.0),
        (true, false) | (false, true) => Ok(f64::INFINITY),
        _ => {
            let se = SetSample::new(ce, e.resolution)?;
            let sf = SetSample::new(cf, f.resolution)?;
            let a = sup(se.points.iter().map(|y| sf.distance_to(y)));
            let b = sup(sf.points.iter().map(|y| se.distance_to(y)));
            Ok(a.max(b) / r)
        }
    }
}

/// Lattice sample of `(P + q) ∩ D(x, r)` at spacing `max(h, r·PLANE_SAMPLE_FRACTION)`.
fn translate_sample(pair: &PlanePair, q: &Vector4, x: &Vector4, r: f64, spacing: f64) -> Vec<Vector4> {
    let mut out = Vec::new();
    for (i, plane) in pair.planes().into_iter().enumerate() {
        let other = if i == 0 { &pair.second } else { &pair.first };
        // y = q + u lies in C^i(x, r) iff |u − p^i(x − q)| ≤ r
        let center = plane.coords(&(*x - *q));
        for y in disk_lattice(plane, *q, center, r, spacing) {
            if planar_norm(other, &(y - *x)) <= r {
                out.push(y);
            }
        }
    }
    out
}

/// Relative distance between a sample and the exact translate `P + q` in
/// `D(x, r)`. The sample side uses exact point-to-plane distances; the plane
/// side is sampled on a lattice.
fn translate_distance(e: &SetSample, clip: &[Vector4], pair: &PlanePair, q: &Vector4, x: &Vector4, r: f64) -> f64 {
    translate_distance_capped(e, clip, pair, q, x, r, f64::INFINITY)
}

/// As `translate_distance`, but gives up as soon as the value is known to
/// exceed `cap`; the returned value is then some number `> cap`.
fn translate_distance_capped(
    e: &SetSample,
    clip: &[Vector4],
    pair: &PlanePair,
    q: &Vector4,
    x: &Vector4,
    r: f64,
    cap: f64,
) -> f64 {
    let limit = cap * r;
    let mut worst = 0.0f64;
    for y in clip {
        worst = worst.max(pair.distance(y, q));
        if worst > limit {
            return worst / r;
        }
    }
    let spacing = e.resolution.max(r * PLANE_SAMPLE_FRACTION);
    let mut samples = translate_sample(pair, q, x, r, spacing);
    // the far side of a pinch sits near the center: look there first
    samples.sort_by(|a, b| (*a - *x).norm_squared().total_cmp(&(*b - *x).norm_squared()));
    for y in &samples {
        worst = worst.max(e.distance_to(y));
        if worst > limit {
            break;
        }
    }
    worst / r
}

/// Relative distance from the sample to `P + q` in `D(x, r)`.
pub fn distance_to_translate(e: &SetSample, pair: &PlanePair, q: &Vector4, x: &Vector4, r: f64) -> Result<f64> {
    check_scale(r)?;
    let clip = bicylinder_clip(&e.points, pair, x, r);
    Ok(translate_distance(e, &clip, pair, q, x, r))
}

/// Sampling tolerance of a relative distance at scale `r`.
pub fn scale_tolerance(h: f64, r: f64) -> f64 {
    let spacing = h.max(r * PLANE_SAMPLE_FRACTION);
    (2.0 * h + spacing / std::f64::consts::SQRT_2) / r
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranslationSearch {
    /// Grid points per axis over the box `|q − x|_∞ ≤ r/2`; only points with
    /// `|q − x| ≤ r/2` are evaluated.
    pub grid: usize,
    /// Refinement ends once a sweep gains less than `1e-4 · eps`.
    pub eps: f64,
    /// Skip the coordinate-descent stage.
    pub grid_only: bool,
    pub max_sweeps: usize,
}

impl Default for TranslationSearch {
    fn default() -> Self {
        TranslationSearch {
            grid: 5,
            eps: 0.1,
            grid_only: false,
            max_sweeps: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub q: Vector4,
    pub dist: f64,
    pub evaluations: usize,
}

/// Translation `q` with `|q − x| ≤ r/2` minimizing the relative distance
/// between the sample and `P + q` in `D(x, r)`.
///
/// Grid candidates are visited in lexicographic order of their grid
/// coordinates and the first minimum wins. The best grid point is then
/// refined by coordinate descent with step halving. A sample with no points
/// in `D(x, r)` still has to account for the translate's points there, so a
/// hole is measured rather than scored as a perfect fit.
pub fn best_translation(e: &SetSample, pair: &PlanePair, x: &Vector4, r: f64, cfg: &TranslationSearch) -> Result<Fit> {
    check_scale(r)?;
    if cfg.grid < 2 {
        return Err(Error::param("translation grid needs at least 2 points per axis"));
    }
    let clip = bicylinder_clip(&e.points, pair, x, r);
    let g = cfg.grid;
    let half = 0.5 * r;
    let inside = |q: &Vector4| (*q - *x).norm() <= half * (1.0 + 1e-12);
    let mut candidates = Vec::new();
    for k in 0..g.pow(4) {
        let mut c = [0.0; 4];
        let mut rest = k;
        for axis in (0..4).rev() {
            c[axis] = x[axis] - half + r * (rest % g) as f64 / (g - 1) as f64;
            rest /= g;
        }
        let q = Vector4(c);
        if inside(&q) {
            candidates.push(q);
        }
    }
    // Candidates nearest x go first so the running best prunes the rest
    // early. Chunks run in parallel against the best of the earlier chunks
    // and pruned values exceed that best, so the winner, the least value with
    // ties to the lowest grid index, does not depend on the thread count.
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        let da = (candidates[a] - *x).norm_squared();
        let db = (candidates[b] - *x).norm_squared();
        da.total_cmp(&db).then(a.cmp(&b))
    });
    let mut best = usize::MAX;
    let mut best_value = f64::INFINITY;
    let (head, rest) = order.split_at(1);
    for chunk in std::iter::once(head).chain(rest.chunks(32)) {
        let values: Vec<f64> = chunk
            .par_iter()
            .map(|&i| translate_distance_capped(e, &clip, pair, &candidates[i], x, r, best_value))
            .collect();
        for (&i, v) in chunk.iter().zip(values) {
            if v < best_value || (v == best_value && i < best) {
                best = i;
                best_value = v;
            }
        }
    }
    let mut q = candidates[best];
    let mut value = best_value;
    let mut evaluations = candidates.len();
    if cfg.grid_only {
        return Ok(Fit { q, dist: value, evaluations });
    }

    let mut step = r / (g - 1) as f64 / 2.0;
    let min_step = r * 1e-3;
    for _ in 0..cfg.max_sweeps {
        let start = value;
        for axis in 0..4 {
            for sign in [1.0, -1.0] {
                let mut trial = q;
                trial.0[axis] += sign * step;
                if !inside(&trial) {
                    continue;
                }
                let v = translate_distance_capped(e, &clip, pair, &trial, x, r, value);
                evaluations += 1;
                if v < value {
                    q = trial;
                    value = v;
                    break;
                }
            }
        }
        let gain = start - value;
        if gain == 0.0 {
            step *= 0.5;
            if step < min_step {
                break;
            }
        } else if gain < 1e-4 * cfg.eps {
            break;
        }
    }
    Ok(Fit { q, dist: value, evaluations })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanStep {
    pub n: usize,
    pub scale: f64,
    /// `q_n`, center of the bi-cylinder examined at this step.
    pub center: Vector4,
    /// Best translation found in `D(q_n, s_n)`.
    pub fitted: Vector4,
    pub distance: f64,
    /// Distance to `P + q_n` in `D(q_n, s_n)`, the carried-over fit.
    pub carry: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub eps: f64,
    pub floor: f64,
    pub resolution: f64,
    pub steps: Vec<ScanStep>,
    /// `q_0, q_1, …`, with `q_0 = q_1 = 0`.
    pub centers: Vec<Vector4>,
    /// `s_0, s_1, …` matching `centers`.
    pub scales: Vec<f64>,
    pub stopped: bool,
    pub floor_hit: bool,
    pub o_k: Vector4,
    pub r_k: f64,
    /// Distance to `P + o_k` in `D(o_k, 2 r_k (1 − 12 eps))`; `None` when the
    /// radius is not positive or the process did not stop.
    pub shrunk_distance: Option<f64>,
    /// Distance to `P + o_k` in `D(o_k, 2 r_k)`.
    pub outer_distance: Option<f64>,
}

impl ScanReport {
    /// Descriptions of every violated invariant, empty when all hold.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let eps = self.eps;
        let tol = |i: usize| scale_tolerance(self.resolution, self.scales[i.max(1)]) * self.scales[i.max(1)];
        for i in 0..self.centers.len().saturating_sub(1) {
            let d = self.centers[i].distance(&self.centers[i + 1]);
            if d > 12.0 * self.scales[i] * eps + tol(i) {
                out.push(format!("consecutive drift {i}: {d}"));
            }
        }
        for i in 0..self.centers.len() {
            for j in i + 1..self.centers.len() {
                let d = self.centers[i].distance(&self.centers[j]);
                if d > 24.0 * eps * self.scales[i] + tol(i) {
                    out.push(format!("drift ({i},{j}): {d}"));
                }
            }
        }
        for s in &self.steps {
            if s.n >= 2 && s.carry > 2.0 * eps + 2.0 * s.tolerance {
                out.push(format!("carry-over at step {}: {}", s.n, s.carry));
            }
        }
        if self.stopped {
            let last = self.steps.last().expect("stopped scan has steps");
            if !(last.distance > eps) {
                out.push("stopped without exceeding eps".into());
            }
            if self.o_k.norm() > 12.0 * eps + tol(1) {
                out.push(format!("final center too far: {}", self.o_k.norm()));
            }
        }
        out
    }
}

/// The dyadic stopping-time process.
///
/// Step `n ≥ 1` examines `D(q_n, s_n)` with `s_n = 2^{-n}`. If no translate of
/// the pair is within `eps · s_n` there, the process stops with `o_k = q_n`,
/// `r_k = s_n`; otherwise the best translate becomes `q_{n+1}`. Scales below
/// `floor` end the scan with `floor_hit`.
pub fn epsilon_process(e: &SetSample, pair: &PlanePair, eps: f64, floor: f64, search: &TranslationSearch) -> Result<ScanReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("eps {eps} outside (0, 0.5)")));
    }
    if !(floor >= 2.0 * e.resolution) {
        return Err(Error::param(format!(
            "floor {floor} below twice the sample resolution {}",
            e.resolution
        )));
    }
    let cfg = TranslationSearch { eps, ..*search };
    let origin = Vector4::ZERO;
    let mut report = ScanReport {
        eps,
        floor,
        resolution: e.resolution,
        steps: Vec::new(),
        centers: vec![origin, origin],
        scales: vec![1.0, 0.5],
        stopped: false,
        floor_hit: false,
        o_k: origin,
        r_k: 0.0,
        shrunk_distance: None,
        outer_distance: None,
    };
    let mut n = 1;
    loop {
        let s = report.scales[n];
        if s < floor {
            report.floor_hit = true;
            // the unexamined center and scale are not part of the trace
            report.centers.pop();
            report.scales.pop();
            break;
        }
        let q = report.centers[n];
        let fit = best_translation(e, pair, &q, s, &cfg)?;
        let carry = distance_to_translate(e, pair, &q, &q, s)?;
        report.steps.push(ScanStep {
            n,
            scale: s,
            center: q,
            fitted: fit.q,
            distance: fit.dist,
            carry,
            tolerance: scale_tolerance(e.resolution, s),
        });
        if fit.dist > eps {
            report.stopped = true;
            report.o_k = q;
            report.r_k = s;
            let shrunk = 2.0 * s * (1.0 - 12.0 * eps);
            if shrunk > 0.0 {
                report.shrunk_distance = Some(distance_to_translate(e, pair, &q, &q, shrunk)?);
            }
            report.outer_distance = Some(distance_to_translate(e, pair, &q, &q, 2.0 * s)?);
            break;
        }
        report.centers.push(fit.q);
        report.scales.push(s * 0.5);
        n += 1;
    }
    Ok(report)
}
