//! Dirichlet energies of harmonic functions on planar annuli: closed forms
//! from Fourier data, the reflection and logarithmic lower bounds, and a
//! finite-difference solver used to check them.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Truncated Fourier series `mean + Σ (a_n cos nθ + b_n sin nθ)`, `n = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierBoundary {
    pub mean: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl FourierBoundary {
    pub fn new(mean: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::input(format!(
                "cosine and sine coefficient lists differ in length ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        Ok(FourierBoundary { mean, a, b })
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.mean;
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let (s, c) = ((k + 1) as f64 * theta).sin_cos();
            v += a * c + b * s;
        }
        v
    }

    /// Values at `m` equally spaced angles starting from 0.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        (0..m).map(|j| self.eval(j as f64 * TAU / m as f64)).collect()
    }

    /// `Σ (a_n² + b_n²)`.
    pub fn oscillation(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|c| c * c).sum()
    }

    pub fn scaled(&self, s: f64) -> FourierBoundary {
        FourierBoundary {
            mean: s * self.mean,
            a: self.a.iter().map(|c| s * c).collect(),
            b: self.b.iter().map(|c| s * c).collect(),
        }
    }
}

/// Trapezoidal Fourier coefficients up to order `order`.
///
/// Needs at least `4·order + 1` samples at equally spaced angles covering one
/// period.
pub fn fourier_decompose(samples: &[(f64, f64)], order: usize) -> Result<FourierBoundary> {
    let m = samples.len();
    if m < 4 * order + 1 || m < 2 {
        return Err(Error::input(format!(
            "{m} samples are too few for order {order} (need {})",
            (4 * order + 1).max(2)
        )));
    }
    let step = TAU / m as f64;
    let theta0 = samples[0].0;
    for (j, &(theta, v)) in samples.iter().enumerate() {
        if !theta.is_finite() || !v.is_finite() {
            return Err(Error::input("non-finite boundary sample"));
        }
        if (theta - theta0 - j as f64 * step).abs() > 1e-9 {
            return Err(Error::input(format!(
                "sample {j} at angle {theta} is not on the uniform grid of step {step}"
            )));
        }
    }
    let mean = samples.iter().map(|s| s.1).sum::<f64>() / m as f64;
    let mut a = Vec::with_capacity(order);
    let mut b = Vec::with_capacity(order);
    for n in 1..=order {
        let (mut sc, mut ss) = (0.0, 0.0);
        for &(theta, v) in samples {
            let (s, c) = (n as f64 * theta).sin_cos();
            sc += v * c;
            ss += v * s;
        }
        a.push(2.0 * sc / m as f64);
        b.push(2.0 * ss / m as f64);
    }
    Ok(FourierBoundary { mean, a, b })
}

fn check_r0(r0: f64) -> Result<()> {
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::param(format!("r0 = {r0} outside (0, 1)")));
    }
    Ok(())
}

/// Energy on `B(0, 1/r0) \ B(0, r0)` of the harmonic function equal to the
/// boundary data on both circles:
/// `2π Σ n (A_n² + B_n²)(r0⁻ⁿ − r0ⁿ)/(r0ⁿ + r0⁻ⁿ)`.
pub fn annulus_energy_exact(fb: &FourierBoundary, r0: f64) -> Result<f64> {
    check_r0(r0)?;
    let mut total = 0.0;
    let r2 = r0 * r0;
    let mut p = 1.0;
    for (k, (a, b)) in fb.a.iter().zip(&fb.b).enumerate() {
        p *= r2; // r0^{2n}
        let n = (k + 1) as f64;
        total += n * (a * a + b * b) * (1.0 - p) / (1.0 + p);
    }
    Ok(TAU * total)
}

/// Disk `B(center, r0)` removed from `B(0, outer)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSpec {
    pub r0: f64,
    pub center: [f64; 2],
    pub outer: f64,
}

impl AnnulusSpec {
    pub fn centered(r0: f64) -> Self {
        AnnulusSpec {
            r0,
            center: [0.0, 0.0],
            outer: 1.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.outer > 0.0 && self.outer.is_finite()) {
            return Err(Error::param(format!("outer radius {} must be positive", self.outer)));
        }
        if !(self.r0 > 0.0 && self.r0 < self.outer) {
            return Err(Error::param(format!(
                "inner radius {} outside (0, {})",
                self.r0, self.outer
            )));
        }
        Ok(())
    }

    fn center_distance(&self) -> f64 {
        self.center[0].hypot(self.center[1])
    }
}

/// `¼ r0⁻¹ ∫_{∂B(q, r0)} |u₀ − m(u₀)|² = (π/4) Σ (A_n² + B_n²)`.
///
/// Requires `r0 < ½ d(q, ∂B(0, outer))`, which for a centered annulus is
/// `r0 < outer/2`.
pub fn reflection_lower_bound(fb: &FourierBoundary, spec: &AnnulusSpec) -> Result<f64> {
    spec.validate()?;
    let room = spec.outer - spec.center_distance();
    if !(spec.r0 < 0.5 * room) {
        return Err(Error::param(format!(
            "inner radius {} is not below half the distance {} to the outer circle",
            spec.r0, room
        )));
    }
    Ok(0.25 / spec.r0 * (PI * spec.r0 * fb.oscillation()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBound {
    pub value: f64,
    /// `C(ε)` when a fraction `ε` was requested.
    pub constant: Option<f64>,
}

/// `max(101, 2/(1 − √ε))`, so that `(1 − 2/C)² ≥ ε`.
pub fn level_constant(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps = {eps} outside (0, 1)")));
    }
    Ok(101f64.max(2.0 / (1.0 - eps.sqrt())))
}

/// `2π δ² r0² / |ln r0|`, optionally scaled by `ε` together with `C(ε)`.
pub fn log_annulus_bound(delta: f64, r0: f64, eps: Option<f64>) -> Result<LogBound> {
    check_r0(r0)?;
    if !delta.is_finite() {
        return Err(Error::param("delta must be finite"));
    }
    let base = TAU * delta * delta * r0 * r0 / r0.ln().abs();
    match eps {
        None => Ok(LogBound {
            value: base,
            constant: None,
        }),
        Some(e) => {
            let c = level_constant(e)?;
            Ok(LogBound {
                value: e * base,
                constant: Some(c),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdResult {
    pub energy: f64,
    /// Largest stencil residual of the solution.
    pub residual: f64,
    /// Richardson estimate `|E_h − E_2h| / 3` of the discretization error.
    pub tolerance: f64,
}

const MIN_RADIAL: usize = 64;
const MIN_ANGULAR: usize = 256;
const RESIDUAL_LIMIT: f64 = 1e-8;

/// Dirichlet energy of the discrete harmonic function on the annulus
/// `r0 < |x − q| < outer` with the given samples on the inner and outer
/// circles (equal counts, angles `2πj/m`). The annulus must be concentric.
///
/// The grid is uniform in `(ln r, θ)`, i.e. geometric in `r`. The Dirichlet
/// integral and the Laplacian keep their flat form in these coordinates, so
/// the 5-point stencil is exact up to O(h²). The linear system is diagonalized
/// by a DFT in `θ` and then solved mode by mode.
pub fn fd_oracle(inner: &[f64], outer: &[f64], spec: &AnnulusSpec, radial: usize) -> Result<FdResult> {
    spec.validate()?;
    if spec.center != [0.0, 0.0] {
        return Err(Error::param("the finite-difference solver handles concentric annuli only"));
    }
    let m = inner.len();
    if outer.len() != m {
        return Err(Error::input(format!(
            "inner and outer sample counts differ ({m} vs {})",
            outer.len()
        )));
    }
    if radial < MIN_RADIAL || m < MIN_ANGULAR {
        return Err(Error::param(format!(
            "grid {radial}x{m} is below {MIN_RADIAL} radial x {MIN_ANGULAR} angular"
        )));
    }
    if !m.is_multiple_of(2) || !radial.is_multiple_of(2) {
        return Err(Error::param("grid sizes must be even for the error estimate"));
    }
    if inner.iter().chain(outer).any(|v| !v.is_finite()) {
        return Err(Error::input("non-finite boundary sample"));
    }
    let length = (spec.outer / spec.r0).ln();
    let fine = solve_log_polar(inner, outer, length, radial)?;
    let coarse_inner: Vec<f64> = inner.iter().step_by(2).copied().collect();
    let coarse_outer: Vec<f64> = outer.iter().step_by(2).copied().collect();
    let coarse = solve_log_polar(&coarse_inner, &coarse_outer, length, radial / 2)?;
    Ok(FdResult {
        energy: fine.0,
        residual: fine.1,
        tolerance: (fine.0 - coarse.0).abs() / 3.0,
    })
}

/// Returns (energy, residual) on `[0, length] × S¹` with `radial` intervals.
fn solve_log_polar(inner: &[f64], outer: &[f64], length: f64, radial: usize) -> Result<(f64, f64)> {
    let m = inner.len();
    let h_rho = length / radial as f64;
    let h_theta = TAU / m as f64;
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(m);
    let inverse = planner.plan_fft_inverse(m);

    let to_spectrum = |v: &[f64]| {
        let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        forward.process(&mut buf);
        buf
    };
    let lo = to_spectrum(inner);
    let hi = to_spectrum(outer);

    // modes[k][i], i = 0..=radial
    let ratio = (h_rho / h_theta).powi(2);
    let mut modes = vec![vec![Complex::new(0.0, 0.0); radial + 1]; m];
    let mut cp = vec![0.0; radial + 1];
    let mut dp = vec![Complex::new(0.0, 0.0); radial + 1];
    for k in 0..m {
        let lambda = (2.0 - 2.0 * (TAU * k as f64 / m as f64).cos()) * ratio;
        let col = &mut modes[k];
        col[0] = lo[k];
        col[radial] = hi[k];
        // u_{i-1} − (2 + λ) u_i + u_{i+1} = 0 for 0 < i < radial
        let diag = -(2.0 + lambda);
        let n = radial - 1;
        for j in 0..n {
            let i = j + 1;
            let mut rhs = Complex::new(0.0, 0.0);
            if i == 1 {
                rhs -= col[0];
            }
            if i == radial - 1 {
                rhs -= col[radial];
            }
            if j == 0 {
                cp[j] = 1.0 / diag;
                dp[j] = rhs / diag;
            } else {
                let denom = diag - cp[j - 1];
                cp[j] = 1.0 / denom;
                dp[j] = (rhs - dp[j - 1]) / denom;
            }
        }
        col[n] = dp[n - 1];
        for j in (0..n - 1).rev() {
            col[j + 1] = dp[j] - cp[j] * col[j + 2];
        }
    }

    let scale = 1.0 / m as f64;
    let mut grid = vec![vec![0.0; m]; radial + 1];
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    for i in 0..=radial {
        for k in 0..m {
            buf[k] = modes[k][i];
        }
        inverse.process(&mut buf);
        for j in 0..m {
            grid[i][j] = buf[j].re * scale;
        }
    }
    grid[0].copy_from_slice(inner);
    grid[radial].copy_from_slice(outer);

    let mut residual: f64 = 0.0;
    let size = grid.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    for i in 1..radial {
        for j in 0..m {
            let (jm, jp) = ((j + m - 1) % m, (j + 1) % m);
            let lap = (grid[i + 1][j] - 2.0 * grid[i][j] + grid[i - 1][j]) / (h_rho * h_rho)
                + (grid[i][jp] - 2.0 * grid[i][j] + grid[i][jm]) / (h_theta * h_theta);
            residual = residual.max((lap * h_rho * h_rho).abs() / size);
        }
    }
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::NonConvergence {
            residual,
            limit: RESIDUAL_LIMIT,
        });
    }

    let mut radial_sum = 0.0;
    let mut angular_sum = 0.0;
    for i in 0..=radial {
        let w = if i == 0 || i == radial { 0.5 } else { 1.0 };
        for j in 0..m {
            let d = grid[i][(j + 1) % m] - grid[i][j];
            angular_sum += w * d * d;
            if i < radial {
                let d = grid[i + 1][j] - grid[i][j];
                radial_sum += d * d;
            }
        }
    }
    let energy = h_theta / h_rho * radial_sum + h_rho / h_theta * angular_sum;
    Ok((energy, residual))
}
