use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs::File;
use std::io::BufReader;

use rayon::prelude::*;

use planes4::grassmann::{canonical_pair, xi_membership, xi_sample, XiElement};
use planes4::harmonic_annulus::{
    annulus_energy_exact, fd_oracle, log_annulus_bound, reflection_lower_bound, AnnulusSpec, FourierBoundary,
};
use planes4::multiscale_scanner::{epsilon_process, SetSample, TranslationSearch};
use planes4::plateau_lab::{run_experiment_with_mesh, ExperimentConfig, OptimizerConfig, Verdict};
use planes4::projection_bounds::{first_plane_value, projection_sum, sup_projection_sum, SearchConfig};
use planes4::rng::Stream;
use planes4::surfaces::{read_mesh4, write_mesh4};

use crate::output::{flag, num, Params, Record, RunOutput, Table};
use crate::{AnnulusArgs, AnnulusMode, BoundsArgs, Command, Failure, PlateauArgs, ScanArgs, WirtingerArgs};

type Columns = &'static [(&'static str, &'static str)];

const BOUNDS_COLUMNS: Columns = &[
    ("alpha1", "smaller characteristic angle"),
    ("alpha2", "larger characteristic angle"),
    ("sup_value", "largest projection sum found over unit simple 2-vectors"),
    ("ceiling", "1 + 2 cos(alpha1), the proven upper bound"),
    ("first_plane_value", "projection sum of the first plane itself, 1 + cos(alpha1) cos(alpha2)"),
    ("argmax_12", "Pluecker coordinate 12 of the maximizing plane"),
    ("argmax_13", "Pluecker coordinate 13"),
    ("argmax_14", "Pluecker coordinate 14"),
    ("argmax_23", "Pluecker coordinate 23"),
    ("argmax_24", "Pluecker coordinate 24"),
    ("argmax_34", "Pluecker coordinate 34"),
    ("samples", "projection sums evaluated"),
    ("refinement_iters", "pattern-search iterations"),
];

const WIRTINGER_COLUMNS: Columns = &[
    ("kind", "`random` for a uniform unit simple 2-vector, `xi` for an equality-set sample"),
    ("index", "draw number within its kind"),
    ("projection_sum", "projection sum for the orthogonal pair"),
    ("member", "1 if the membership test accepts the 2-vector, else 0"),
];

const ANNULUS_COLUMNS: Columns = &[
    ("quantity", "closed_form, fd_energy, fd_radial, level_constant, log_bound, reflection_bound or scaled_bound"),
    ("value", "value of the quantity"),
    ("tolerance", "discretization error estimate (0 for closed forms)"),
];

const SCAN_COLUMNS: Columns = &[
    ("step", "step n of the process"),
    ("scale", "s_n = 2^-n"),
    ("center_1", "center q_n, coordinate 1"),
    ("center_2", "center q_n, coordinate 2"),
    ("center_3", "center q_n, coordinate 3"),
    ("center_4", "center q_n, coordinate 4"),
    ("fitted_1", "best translation in D(q_n, s_n), coordinate 1"),
    ("fitted_2", "best translation, coordinate 2"),
    ("fitted_3", "best translation, coordinate 3"),
    ("fitted_4", "best translation, coordinate 4"),
    ("distance", "relative distance to the best translate"),
    ("carry", "relative distance to P + q_n in D(q_n, s_n)"),
    ("tolerance", "sampling tolerance at this scale"),
];

const PLATEAU_COLUMNS: Columns = &[
    ("alpha1", "smaller characteristic angle"),
    ("alpha2", "larger characteristic angle"),
    ("segments", "boundary segments per circle"),
    ("pinch", "pinch radius (0 for the union of disks)"),
    ("initial_area", "area of the competitor before descent"),
    ("final_area", "area after descent"),
    ("certificate_bound", "projection lower bound (shadow areas over lambda), empty if skipped"),
    ("certificate_tolerance", "rasterization tolerance of the bound, empty if skipped"),
    ("mesh_tolerance", "2 pi - n sin(2 pi / n)"),
    ("shadow1", "shadow area on the first plane, empty if skipped"),
    ("shadow2", "shadow area on the second plane, empty if skipped"),
    ("covers1", "shadow on the first plane covers its disk"),
    ("covers2", "shadow on the second plane covers its disk"),
    ("iterations", "descent iterations"),
    ("converged", "gradient tolerance reached"),
    ("line_search_failed", "backtracking found no decrease"),
    ("verdict", "certified-optimal, improved or no-improvement-found"),
];

pub fn columns(command: &str) -> Columns {
    match command {
        "bounds" => BOUNDS_COLUMNS,
        "wirtinger" => WIRTINGER_COLUMNS,
        "annulus" => ANNULUS_COLUMNS,
        "scan" => SCAN_COLUMNS,
        "plateau" => PLATEAU_COLUMNS,
        _ => &[],
    }
}

pub fn run(cmd: &Command) -> Result<(), Failure> {
    match cmd {
        Command::Bounds(a) => bounds(a),
        Command::Wirtinger(a) => wirtinger(a),
        Command::Annulus(a) => annulus(a),
        Command::Scan(a) => scan(a),
        Command::Plateau(a) => plateau(a),
    }
}

/// Angles typed to a few digits (`1.5708`) land just above π/2.
fn angle(x: f64) -> f64 {
    if x > FRAC_PI_2 && x <= FRAC_PI_2 + 1e-4 {
        FRAC_PI_2
    } else {
        x
    }
}

fn violation(msg: String) -> Failure {
    Failure::Numerical(format!("invariant violated: {msg}"))
}

fn bounds(a: &BoundsArgs) -> Result<(), Failure> {
    let alpha2 = angle(a.alpha2);
    let alphas: Vec<f64> = match (a.alpha1_max, a.steps) {
        (_, 0) => return Err(Failure::Config("--steps must be at least 1".into())),
        (None, 1) => vec![angle(a.alpha1)],
        (Some(hi), k) if k > 1 => {
            let (lo, hi) = (angle(a.alpha1), angle(hi));
            (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
        }
        _ => return Err(Failure::Config("a sweep needs both --alpha1-max and --steps > 1".into())),
    };
    let cfg = SearchConfig {
        grid: a.grid,
        refine_steps: a.refine_steps,
        starts: a.starts,
        seed: a.common.seed,
    };
    let mut params = Params::default();
    params.set("alpha1", alphas.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"));
    params.float("alpha2", alpha2);
    params.set("grid", a.grid.to_string());
    params.set("starts", a.starts.to_string());
    params.set("refine-steps", a.refine_steps.to_string());
    params.set("seed", a.common.seed.to_string());
    let out = RunOutput::create(&a.common.out, "bounds", params, a.common.seed)?;

    let mut rows = Vec::new();
    for &a1 in &alphas {
        let pair = canonical_pair(a1, alpha2)?;
        let r = sup_projection_sum(&pair.first, &pair.second, &cfg)?;
        if r.sup_value > r.bound + 1e-9 {
            return Err(violation(format!("sup {} above 1 + 2 cos alpha1 = {}", r.sup_value, r.bound)));
        }
        rows.push(r);
    }
    rows.sort_by(|x, y| x.alpha1.total_cmp(&y.alpha1));
    let mut table = Table::new(BOUNDS_COLUMNS);
    let mut report = Record::new();
    for (i, r) in rows.iter().enumerate() {
        let mut row = vec![
            num(r.alpha1),
            num(r.alpha2),
            num(r.sup_value),
            num(r.bound),
            num(first_plane_value(r.alpha1, r.alpha2)),
        ];
        row.extend(r.argmax.0.iter().map(|c| num(*c)));
        row.push(r.samples.to_string());
        row.push(r.refinement_iters.to_string());
        table.push(row);
        let mut rec = Record::new();
        rec.float("alpha1", r.alpha1)
            .float("sup_value", r.sup_value)
            .float("ceiling", r.bound)
            .float("margin", r.bound - r.sup_value);
        report.nested(&format!("run_{i}"), &rec);
    }
    out.finish(&table, &report)?;
    Ok(())
}

fn wirtinger(a: &WirtingerArgs) -> Result<(), Failure> {
    if a.samples == 0 {
        return Err(Failure::Config("--samples must be positive".into()));
    }
    let mut params = Params::default();
    params.set("samples", a.samples.to_string());
    params.float("tol", a.tol);
    params.float("threshold", a.threshold);
    params.set("seed", a.common.seed.to_string());
    let out = RunOutput::create(&a.common.out, "wirtinger", params, a.common.seed)?;

    let p0 = canonical_pair(FRAC_PI_2, FRAC_PI_2)?;
    let mut rng = Stream::new(a.common.seed);
    let mut table = Table::new(WIRTINGER_COLUMNS);
    let mut random_rows = Vec::new();
    let mut xi_rows = Vec::new();
    let (mut xi_members, mut xi_gap) = (0usize, 0.0f64);
    for i in 0..a.samples {
        let xi = xi_sample(&XiElement::random(&mut rng))?;
        let s = projection_sum(&p0.first, &p0.second, &xi)?;
        let member = xi_membership(&xi, a.tol)?;
        xi_members += member as usize;
        xi_gap = xi_gap.max((s - 1.0).abs());
        xi_rows.push(vec!["xi".into(), i.to_string(), num(s), (member as u8).to_string()]);
    }
    let (mut below, mut below_members) = (0usize, 0usize);
    for i in 0..a.samples {
        let xi = rng.unit_simple();
        let s = projection_sum(&p0.first, &p0.second, &xi)?;
        let member = xi_membership(&xi, a.tol)?;
        if s < a.threshold {
            below += 1;
            below_members += member as usize;
        }
        random_rows.push(vec!["random".into(), i.to_string(), num(s), (member as u8).to_string()]);
    }
    for row in random_rows.into_iter().chain(xi_rows) {
        table.push(row);
    }
    let mut report = Record::new();
    report
        .field("xi_draws", a.samples.to_string())
        .field("xi_members", xi_members.to_string())
        .float("xi_max_deviation", xi_gap)
        .field("random_draws", a.samples.to_string())
        .field("random_below_threshold", below.to_string())
        .field("random_below_threshold_members", below_members.to_string());
    out.finish(&table, &report)?;
    if xi_members != a.samples || xi_gap > a.tol {
        return Err(violation(format!(
            "{} of {} equality-set samples failed (max deviation {xi_gap:e})",
            a.samples - xi_members,
            a.samples
        )));
    }
    if below_members > 0 {
        return Err(violation(format!("{below_members} random 2-vectors below threshold accepted")));
    }
    Ok(())
}

fn annulus(a: &AnnulusArgs) -> Result<(), Failure> {
    let mut params = Params::default();
    params.set("mode", format!("{:?}", a.mode).to_lowercase());
    params.float("r0", a.r0);
    params.set("fd", flag(a.fd));
    if a.fd {
        params.set("radial", a.radial.to_string());
        params.set("angular", a.angular.to_string());
    }
    let mut rows: Vec<(&str, f64, f64)> = Vec::new();
    let mut report = Record::new();
    match a.mode {
        AnnulusMode::Log => {
            params.float("delta", a.delta);
            if let Some(e) = a.eps {
                params.float("eps", e);
            }
            let base = log_annulus_bound(a.delta, a.r0, None)?;
            rows.push(("log_bound", base.value, 0.0));
            if let Some(e) = a.eps {
                let scaled = log_annulus_bound(a.delta, a.r0, Some(e))?;
                rows.push(("scaled_bound", scaled.value, 0.0));
                rows.push(("level_constant", scaled.constant.unwrap_or(f64::NAN), 0.0));
            }
            if a.fd {
                let inner = vec![a.delta * a.r0; a.angular];
                let outer = vec![0.0; a.angular];
                let fd = fd_oracle(&inner, &outer, &AnnulusSpec::centered(a.r0), a.radial)?;
                rows.push(("fd_radial", fd.energy, fd.tolerance));
                report.float("fd_relative_error", (fd.energy / base.value - 1.0).abs());
            }
        }
        AnnulusMode::Fourier => {
            params.float("mean", a.mean);
            params.set("a", a.a.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"));
            params.set("b", a.b.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"));
            let mut b = a.b.clone();
            b.resize(a.a.len().max(b.len()), 0.0);
            let mut ac = a.a.clone();
            ac.resize(b.len(), 0.0);
            let fb = FourierBoundary::new(a.mean, ac, b)?;
            let exact = annulus_energy_exact(&fb, a.r0)?;
            rows.push(("closed_form", exact, 0.0));
            match reflection_lower_bound(&fb, &AnnulusSpec::centered(a.r0)) {
                Ok(v) => rows.push(("reflection_bound", v, 0.0)),
                Err(e) => {
                    report.field("reflection_bound", format!("not applicable: {e}"));
                }
            }
            if a.fd {
                let data = fb.sample(a.angular);
                let spec = AnnulusSpec {
                    r0: a.r0,
                    center: [0.0, 0.0],
                    outer: 1.0 / a.r0,
                };
                let fd = fd_oracle(&data, &data, &spec, a.radial)?;
                rows.push(("fd_energy", fd.energy, fd.tolerance));
                if exact > 0.0 {
                    report.float("fd_relative_error", (fd.energy / exact - 1.0).abs());
                }
            }
        }
    }
    rows.sort_by(|x, y| x.0.cmp(y.0));
    let out = RunOutput::create(&a.common.out, "annulus", params, a.common.seed)?;
    let mut table = Table::new(ANNULUS_COLUMNS);
    for (q, v, t) in &rows {
        table.push(vec![q.to_string(), num(*v), num(*t)]);
        report.float(q, *v);
    }
    out.finish(&table, &report)?;
    Ok(())
}

fn scan(a: &ScanArgs) -> Result<(), Failure> {
    let file = File::open(&a.mesh).map_err(|e| Failure::Config(format!("cannot open {}: {e}", a.mesh.display())))?;
    let mesh = read_mesh4(BufReader::new(file))?;
    let floor = a.floor.unwrap_or(2.0 * a.resolution);
    let pair = canonical_pair(angle(a.alpha1), angle(a.alpha2))?;
    let mut params = Params::default();
    // the mesh enters the digest through its content, not its path
    let mut mesh_bytes = Vec::new();
    write_mesh4(&mesh, &mut mesh_bytes)?;
    params.set("mesh", Params::content_digest(&mesh_bytes));
    params.float("eps", a.eps);
    params.float("floor", floor);
    params.float("resolution", a.resolution);
    params.float("alpha1", angle(a.alpha1));
    params.float("alpha2", angle(a.alpha2));
    params.set("grid", a.grid.to_string());
    let out = RunOutput::create(&a.common.out, "scan", params, a.common.seed)?;

    let sample = SetSample::from_mesh(&mesh, a.resolution)?;
    let search = TranslationSearch {
        grid: a.grid,
        ..TranslationSearch::default()
    };
    let r = epsilon_process(&sample, &pair, a.eps, floor, &search)?;
    let mut table = Table::new(SCAN_COLUMNS);
    for s in &r.steps {
        let mut row = vec![s.n.to_string(), num(s.scale)];
        row.extend(s.center.0.iter().map(|c| num(*c)));
        row.extend(s.fitted.0.iter().map(|c| num(*c)));
        row.extend([num(s.distance), num(s.carry), num(s.tolerance)]);
        table.push(row);
    }
    let violations = r.invariant_violations();
    let mut report = Record::new();
    report
        .field("samples", sample.len().to_string())
        .field("stopped", flag(r.stopped))
        .field("floor_hit", flag(r.floor_hit))
        .field("o_k", r.o_k.0.iter().map(|c| num(*c)).collect::<Vec<_>>().join(" "))
        .float("r_k", r.r_k)
        .field("shrunk_distance", r.shrunk_distance.map_or("none".into(), num))
        .field("outer_distance", r.outer_distance.map_or("none".into(), num))
        .field("invariant_violations", violations.len().to_string());
    for (i, v) in violations.iter().enumerate() {
        report.field(&format!("violation_{i}"), v);
    }
    out.finish(&table, &report)?;
    if !violations.is_empty() {
        return Err(violation(violations.join("; ")));
    }
    Ok(())
}

fn plateau(a: &PlateauArgs) -> Result<(), Failure> {
    let (alpha1, alpha2) = (angle(a.alpha1), angle(a.alpha2));
    if a.pinch.is_empty() {
        return Err(Failure::Config("--pinch needs at least one radius".into()));
    }
    let mut pinches = a.pinch.clone();
    pinches.sort_by(f64::total_cmp);
    pinches.dedup();
    let mut params = Params::default();
    params.float("alpha1", alpha1);
    params.float("alpha2", alpha2);
    params.set("segments", a.segments.to_string());
    params.set("pinch", pinches.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"));
    params.set("max-iters", a.max_iters.to_string());
    params.float("step", a.step);
    params.float("tol-grad", a.tol_grad);
    params.set("resolution", a.resolution.to_string());
    params.set("certificate", flag(!a.no_certificate));
    params.set("seed", a.common.seed.to_string());
    let mut out = RunOutput::create(&a.common.out, "plateau", params, a.common.seed)?;

    let configs: Vec<ExperimentConfig> = pinches
        .iter()
        .map(|&p| ExperimentConfig {
            alpha1,
            alpha2,
            boundary_segments: a.segments,
            pinch_radius: p,
            optimizer: OptimizerConfig {
                max_iters: a.max_iters,
                step: a.step,
                tol_grad: a.tol_grad,
            },
            seed: a.common.seed,
            resolution: a.resolution,
            certificates: !a.no_certificate,
        })
        .collect();
    let runs = configs
        .par_iter()
        .map(run_experiment_with_mesh)
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = Table::new(PLATEAU_COLUMNS);
    let mut report = Record::new();
    let mut problems = Vec::new();
    let orthogonal = (alpha1 - FRAC_PI_2).abs() < 1e-12 && (alpha2 - FRAC_PI_2).abs() < 1e-12;
    for (i, (r, mesh)) in runs.iter().enumerate() {
        let c = r.certificate;
        let opt = |f: &dyn Fn(&planes4::plateau_lab::Certificate) -> f64| c.as_ref().map_or(String::new(), |c| num(f(c)));
        let covers = r.shadows_cover();
        table.push(vec![
            num(alpha1),
            num(alpha2),
            a.segments.to_string(),
            num(r.config.pinch_radius),
            num(r.initial_area),
            num(r.final_area),
            opt(&|c| c.bound),
            opt(&|c| c.tolerance),
            num(r.mesh_tolerance),
            opt(&|c| c.shadows[0]),
            opt(&|c| c.shadows[1]),
            flag(covers[0]).into(),
            flag(covers[1]).into(),
            r.iterations.to_string(),
            flag(r.converged).into(),
            flag(r.line_search_failed).into(),
            r.verdict.to_string(),
        ]);
        let mut rec = Record::new();
        rec.float("pinch", r.config.pinch_radius)
            .field("verdict", r.verdict.to_string())
            .float("reference_area", r.reference_area)
            .float("final_area", r.final_area)
            .field("vertices", r.vertices.to_string())
            .field("faces", r.faces.to_string());
        let mut trace = Record::new();
        for (k, v) in r.area_trace.iter().enumerate() {
            trace.float(&k.to_string(), *v);
        }
        rec.nested("area_trace", &trace);
        if a.write_mesh {
            let name = format!("plateau_{i}.mesh4");
            let mut buf = Vec::new();
            write_mesh4(mesh, &mut buf)?;
            out.write(&name, &buf)?;
            rec.field("mesh", &name);
        }
        report.nested(&format!("run_{i}"), &rec);

        if orthogonal && r.verdict == Verdict::Improved {
            problems.push(format!("orthogonal run with pinch {} reported an improvement", r.config.pinch_radius));
        }
        if let Some(c) = c {
            if c.covers == [true, true] && r.final_area < c.bound - c.tolerance - r.mesh_tolerance {
                problems.push(format!(
                    "final area {} below certified bound {} at pinch {}",
                    r.final_area, c.bound, r.config.pinch_radius
                ));
            }
        }
    }
    report.float("two_pi", TAU).float("pi", PI);
    out.finish(&table, &report)?;
    if !problems.is_empty() {
        return Err(violation(problems.join("; ")));
    }
    Ok(())
}
