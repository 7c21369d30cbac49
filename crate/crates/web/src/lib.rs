//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export wraps a plain Rust function returning `Result<_, String>`
//! so the numerics can be tested natively; JS only sees flat `Float64Array`s.

use std::f64::consts::FRAC_PI_2;

use wasm_bindgen::prelude::*;

use planes4::grassmann::canonical_pair;
use planes4::harmonic_annulus::{annulus_energy_exact, reflection_lower_bound, AnnulusSpec, FourierBoundary};
use planes4::plateau_lab::{run_experiment_with_mesh, ExperimentConfig, OptimizerConfig};
use planes4::projection_bounds::{sup_curve, SearchConfig};

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// `[α₁, sup, 1 + 2cos α₁]` triples for `steps` angles α₁ in `[0, α₂]`.
pub fn bound_curve_rows(alpha2: f64, steps: usize, grid: usize) -> Result<Vec<f64>, String> {
    if !(0.0..=FRAC_PI_2).contains(&alpha2) {
        return Err(format!("alpha2 = {alpha2} outside [0, pi/2]"));
    }
    if steps < 2 {
        return Err("need at least two angles".into());
    }
    let alphas: Vec<f64> = (0..steps).map(|i| alpha2 * i as f64 / (steps - 1) as f64).collect();
    let cfg = SearchConfig {
        grid,
        starts: 4,
        ..SearchConfig::default()
    };
    let sups = sup_curve(alpha2, &alphas, &cfg).map_err(|e| e.to_string())?;
    Ok(alphas
        .iter()
        .zip(&sups)
        .flat_map(|(&a, &s)| [a, s, 1.0 + 2.0 * a.cos()])
        .collect())
}

#[wasm_bindgen]
pub fn bound_curve(alpha2: f64, steps: usize, grid: usize) -> Result<Vec<f64>, JsError> {
    bound_curve_rows(alpha2, steps, grid).map_err(js)
}

/// `[r0, energy, reflection bound]` triples for the harmonic extension of
/// `mean + Σ A_n cos nθ + B_n sin nθ`; the bound is NaN where it does not
/// apply (`r0 ≥ ½`).
pub fn annulus_curve_rows(a: &[f64], b: &[f64], r0_min: f64, r0_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(r0_min > 0.0 && r0_min < r0_max && r0_max < 1.0) || steps < 2 {
        return Err("need 0 < r0_min < r0_max < 1 and at least two radii".into());
    }
    let n = a.len().max(b.len());
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    let fb = FourierBoundary::new(0.0, a, b).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * steps);
    for i in 0..steps {
        let r0 = r0_min + (r0_max - r0_min) * i as f64 / (steps - 1) as f64;
        let e = annulus_energy_exact(&fb, r0).map_err(|e| e.to_string())?;
        let bound = reflection_lower_bound(&fb, &AnnulusSpec::centered(r0)).unwrap_or(f64::NAN);
        out.extend([r0, e, bound]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn annulus_curve(a: Vec<f64>, b: Vec<f64>, r0_min: f64, r0_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    annulus_curve_rows(&a, &b, r0_min, r0_max, steps).map_err(js)
}

/// One area descent with its certificate.
#[wasm_bindgen]
pub struct PlateauRun {
    initial: f64,
    fin: f64,
    certificate: f64,
    verdict: String,
    trace: Vec<f64>,
    shadows: [Vec<f64>; 2],
}

#[wasm_bindgen]
impl PlateauRun {
    #[wasm_bindgen(getter)]
    pub fn initial_area(&self) -> f64 {
        self.initial
    }

    #[wasm_bindgen(getter)]
    pub fn final_area(&self) -> f64 {
        self.fin
    }

    /// NaN when the certificate was skipped.
    #[wasm_bindgen(getter)]
    pub fn certificate(&self) -> f64 {
        self.certificate
    }

    #[wasm_bindgen(getter)]
    pub fn verdict(&self) -> String {
        self.verdict.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn trace(&self) -> Vec<f64> {
        self.trace.clone()
    }

    /// Triangles of the final mesh projected to plane `k` (0 or 1), six
    /// coordinates per face.
    pub fn shadow(&self, k: usize) -> Vec<f64> {
        self.shadows.get(k).cloned().unwrap_or_default()
    }
}

pub fn plateau_rows(alpha1: f64, alpha2: f64, pinch: f64, segments: usize) -> Result<PlateauRun, String> {
    let cfg = ExperimentConfig {
        alpha1,
        alpha2,
        boundary_segments: segments,
        pinch_radius: pinch,
        optimizer: OptimizerConfig {
            max_iters: 150,
            ..OptimizerConfig::default()
        },
        resolution: 256,
        certificates: segments >= 128,
        ..ExperimentConfig::default()
    };
    let (r, mesh) = run_experiment_with_mesh(&cfg).map_err(|e| e.to_string())?;
    let pair = canonical_pair(alpha1, alpha2).map_err(|e| e.to_string())?;
    let v = mesh.vertices();
    let shadows = [&pair.first, &pair.second].map(|p| {
        mesh.faces()
            .iter()
            .flat_map(|f| f.iter().flat_map(|&i| p.coords(&v[i])))
            .collect()
    });
    Ok(PlateauRun {
        initial: r.initial_area,
        fin: r.final_area,
        certificate: r.certificate_bound().unwrap_or(f64::NAN),
        verdict: r.verdict.to_string(),
        trace: r.area_trace.clone(),
        shadows,
    })
}

#[wasm_bindgen]
pub fn plateau(alpha1: f64, alpha2: f64, pinch: f64, segments: usize) -> Result<PlateauRun, JsError> {
    plateau_rows(alpha1, alpha2, pinch, segments).map_err(js)
}
