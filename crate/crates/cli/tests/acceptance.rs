//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Runs that go through the CLI are repeated at the
//! end and their results.csv files compared byte for byte.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_1_SQRT_2, PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use planes4::exterior_algebra::{TwoVector, Vector4};
use planes4::grassmann::{canonical_pair, PlanePair};
use planes4::harmonic_annulus::{annulus_energy_exact, fd_oracle, reflection_lower_bound, AnnulusSpec, FourierBoundary};
use planes4::multiscale_scanner::{best_translation, SetSample, TranslationSearch};
use planes4::plateau_lab::{build_pinched_competitor, build_union_mesh};
use planes4::projection_bounds::{first_plane_value, projection_sum, sup_projection_sum, SearchConfig};
use planes4::rng::Stream;
use planes4::surfaces::{band_area, graph_area_check, sample_graph, write_mesh4, AnnulusGrid};

type Outcome = Result<String, String>;

struct Suite {
    root: PathBuf,
    runs: Mutex<Vec<(String, Vec<String>)>>,
}

impl Suite {
    /// Runs the CLI into `<root>/run1/<tag>` and remembers the invocation.
    fn cli(&self, tag: &str, args: &[&str]) -> Result<PathBuf, String> {
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let out = self.invoke(&self.root.join("run1"), tag, &args)?;
        self.runs.lock().unwrap().push((tag.to_string(), args));
        Ok(out)
    }

    fn invoke(&self, base: &Path, tag: &str, args: &[String]) -> Result<PathBuf, String> {
        let out = base.join(tag);
        let _ = fs::remove_dir_all(&out);
        let mut argv = vec!["planes4".to_string()];
        argv.extend(args.iter().cloned());
        argv.push("--out".into());
        argv.push(out.display().to_string());
        match planes4_cli::run_command(&argv) {
            0 => Ok(out),
            code => Err(format!("`{}` exited with {code}", args.join(" "))),
        }
    }

    fn input(&self, name: &str) -> PathBuf {
        let dir = self.root.join("inputs");
        fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(dir: &Path) -> Result<Csv, String> {
        let text = fs::read_to_string(dir.join("results.csv")).map_err(|e| e.to_string())?;
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header = lines.next().ok_or("empty csv")?.split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Ok(Csv { header, rows })
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    fn get(&self, row: usize, name: &str) -> &str {
        &self.rows[row][self.col(name)]
    }

    fn float(&self, row: usize, name: &str) -> f64 {
        self.get(row, name).parse().unwrap_or(f64::NAN)
    }
}

fn report_fields(dir: &Path) -> HashMap<String, String> {
    fs::read_to_string(dir.join("report.txt"))
        .unwrap_or_default()
        .lines()
        .filter(|l| !l.starts_with(' '))
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Unit simple 2-vectors as `(u + v)` with `u` self-dual and `v`
/// anti-self-dual, both of length `1/√2`; an S² × S² chart independent of
/// the search's orthonormal-pair angles.
fn split_chart(u: [f64; 3], v: [f64; 3]) -> TwoVector {
    let s = FRAC_1_SQRT_2;
    TwoVector([
        s * (u[0] + v[0]),
        s * (u[1] + v[1]),
        s * (u[2] + v[2]),
        s * (u[2] - v[2]),
        s * (v[1] - u[1]),
        s * (u[0] - v[0]),
    ])
}

fn sphere(theta: f64, phi: f64) -> [f64; 3] {
    let r = FRAC_1_SQRT_2;
    [r * theta.cos(), r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin()]
}

fn orthogonal_bound(s: &Suite) -> Outcome {
    let out = s.cli("bounds", &["bounds", "--alpha1", "pi/2", "--alpha2", "pi/2"])?;
    let sup = Csv::read(&out)?.float(0, "sup_value");
    ensure((sup - 1.0).abs() <= 1e-6, || format!("sup_value {sup}"))?;

    let pair = canonical_pair(FRAC_PI_2, FRAC_PI_2).unwrap();
    let n = 96;
    let theta = |i: usize| PI * i as f64 / (n - 1) as f64;
    let phi = |j: usize| TAU * j as f64 / n as f64;
    let oracle = (0..n * n)
        .into_par_iter()
        .map(|a| {
            let u = sphere(theta(a / n), phi(a % n));
            let mut best = f64::NEG_INFINITY;
            for b in 0..n * n {
                let xi = split_chart(u, sphere(theta(b / n), phi(b % n)));
                best = best.max(projection_sum(&pair.first, &pair.second, &xi).unwrap());
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    ensure((oracle - sup).abs() <= 1e-5, || format!("oracle {oracle} vs search {sup}"))?;
    Ok(format!("sup {sup:.9}, grid oracle {oracle:.9}"))
}

fn equality_set(s: &Suite) -> Outcome {
    let out = s.cli("wirtinger", &["wirtinger", "--samples", "1000", "--seed", "2"])?;
    let csv = Csv::read(&out)?;
    let (mut xi, mut low) = (0, 0);
    for i in 0..csv.rows.len() {
        let sum = csv.float(i, "projection_sum");
        let member = csv.get(i, "member") == "1";
        match csv.get(i, "kind") {
            "xi" => {
                xi += 1;
                ensure((sum - 1.0).abs() <= 1e-8 && member, || format!("xi draw {i}: sum {sum}, member {member}"))?;
            }
            _ if sum < 0.99 => {
                low += 1;
                ensure(!member, || format!("random draw {i} with sum {sum} accepted"))?;
            }
            _ => {}
        }
    }
    ensure(xi == 1000, || format!("{xi} xi draws"))?;
    Ok(format!("1000 xi draws on the set, {low} low random draws rejected"))
}

fn almost_orthogonal(_: &Suite) -> Outcome {
    let mut rng = Stream::new(3);
    let pairs: Vec<(f64, f64)> = (0..200)
        .map(|_| {
            let (a, b) = (rng.uniform_in(0.0, FRAC_PI_2), rng.uniform_in(0.0, FRAC_PI_2));
            (a.min(b), a.max(b))
        })
        .collect();
    let mut violations = 0;
    let mut worst_gap = f64::INFINITY;
    for &(a1, a2) in &pairs {
        let pair = canonical_pair(a1, a2).unwrap();
        let ceiling = 1.0 + 2.0 * a1.cos();
        for _ in 0..500 {
            let xi = rng.unit_simple();
            if projection_sum(&pair.first, &pair.second, &xi).unwrap() > ceiling + 1e-9 {
                violations += 1;
            }
        }
    }
    let cfg = SearchConfig::default();
    let sups: Vec<f64> = pairs
        .par_iter()
        .map(|&(a1, a2)| {
            let pair = canonical_pair(a1, a2).unwrap();
            sup_projection_sum(&pair.first, &pair.second, &cfg).unwrap().sup_value
        })
        .collect();
    for (&(a1, a2), sup) in pairs.iter().zip(&sups) {
        let gap = sup - first_plane_value(a1, a2);
        worst_gap = worst_gap.min(gap);
        if gap < -1e-6 || *sup > 1.0 + 2.0 * a1.cos() + 1e-9 {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("100000 draws under the ceiling, sup - witness >= {worst_gap:.2e}"))
}

fn annulus_energies(s: &Suite) -> Outcome {
    let out = s.cli(
        "annulus_fourier",
        &["annulus", "--mode", "fourier", "--a", "1", "--r0", "0.5", "--fd", "--radial", "128", "--angular", "512"],
    )?;
    let r = report_fields(&out);
    let get = |r: &HashMap<String, String>, k: &str| r.get(k).and_then(|v| v.parse::<f64>().ok()).unwrap_or(f64::NAN);
    let exact = get(&r, "closed_form");
    let fd = get(&r, "fd_energy");
    ensure((exact - 1.2 * PI).abs() <= 1e-12, || format!("closed form {exact}"))?;
    ensure((fd / exact - 1.0).abs() <= 0.01, || format!("fd {fd} vs {exact}"))?;

    let out = s.cli("annulus_log", &["annulus", "--mode", "log", "--delta", "1", "--r0", "0.1", "--fd"])?;
    let r = report_fields(&out);
    let bound = get(&r, "log_bound");
    let radial = get(&r, "fd_radial");
    // 2π·0.01/ln 10; see README on the printed literal
    ensure((bound - 0.0272875).abs() <= 1e-6, || format!("log bound {bound}"))?;
    ensure((radial / bound - 1.0).abs() <= 0.01, || format!("radial fd {radial} vs {bound}"))?;

    let mut rng = Stream::new(4);
    let mut violations = 0;
    for _ in 0..100 {
        let order = 1 + (rng.uniform() * 8.0) as usize;
        let a = (0..order).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let b = (0..order).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let fb = FourierBoundary::new(rng.uniform_in(-1.0, 1.0), a, b).unwrap();
        let r0 = rng.uniform_in(0.01, 0.49);
        let e = annulus_energy_exact(&fb, r0).unwrap();
        if reflection_lower_bound(&fb, &AnnulusSpec::centered(r0)).unwrap() > e {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} reflection violations"))?;
    Ok(format!(
        "fourier fd err {:.1e}, radial fd err {:.1e}, 100 reflection bounds below energy",
        (fd / exact - 1.0).abs(),
        (radial / bound - 1.0).abs()
    ))
}

fn smooth_periodic(rng: &mut Stream, m: usize, order: usize) -> Vec<f64> {
    let coeffs: Vec<(f64, f64)> = (0..order).map(|_| (rng.uniform_in(-1.0, 1.0), rng.uniform_in(0.0, TAU))).collect();
    (0..m)
        .map(|j| {
            let t = TAU * j as f64 / m as f64;
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, c))| a * ((k + 1) as f64 * t + c).cos() / (k + 1) as f64)
                .sum()
        })
        .collect()
}

fn energy_comparison(_: &Suite) -> Outcome {
    let (m, radial) = (256, 128);
    let mut rng = Stream::new(5);
    let mut violations = Vec::new();
    let mut least = f64::INFINITY;
    for case in 0..50 {
        let r0 = rng.uniform_in(0.05, 0.5);
        let lo = rng.uniform_in(-1.0, 1.0);
        let hi = lo + rng.uniform_in(0.1, 2.0);
        let spec = AnnulusSpec::centered(r0);
        // g: constant lo outside, hi inside; f: below g outside, above it inside
        let g = fd_oracle(&vec![hi; m], &vec![lo; m], &spec, radial).unwrap();
        let wiggle_in = smooth_periodic(&mut rng, m, 6);
        let wiggle_out = smooth_periodic(&mut rng, m, 6);
        // small amplitudes keep E(f) close to E(g)
        let amp = rng.uniform_in(0.0, 0.05);
        let inner: Vec<f64> = wiggle_in.iter().map(|w| hi + amp * w * w).collect();
        let outer: Vec<f64> = wiggle_out.iter().map(|w| lo - amp * w * w).collect();
        let f = fd_oracle(&inner, &outer, &spec, radial).unwrap();
        let tol = 10.0 * f.tolerance.max(g.tolerance);
        least = least.min(f.energy - g.energy);
        if f.energy < g.energy - tol {
            violations.push(format!("case {case}: {} < {}", f.energy, g.energy));
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    Ok(format!("50 cases, min E(f) - E(g) = {least:.3e}"))
}

fn graph_area(_: &Suite) -> Outcome {
    let grid = AnnulusGrid {
        r_in: 0.25,
        r_out: 1.0,
        radial: 24,
        angular: 96,
    };
    let mut rng = Stream::new(6);
    let mut worst = f64::INFINITY;
    for case in 0..100 {
        // three plane waves per component; Σ|a||w| ≤ 0.9/√2 bounds the gradient
        let mut waves = Vec::new();
        for _ in 0..2 {
            let mut comp = Vec::new();
            for _ in 0..3 {
                let w = [rng.uniform_in(-4.0, 4.0), rng.uniform_in(-4.0, 4.0)];
                comp.push((w, rng.uniform(), rng.uniform_in(0.0, TAU)));
            }
            let total: f64 = comp.iter().map(|(w, a, _)| a * w[0].hypot(w[1])).sum();
            let k = 0.9 * FRAC_1_SQRT_2 / total.max(1e-12);
            waves.push(comp.into_iter().map(|(w, a, c)| (w, a * k, c)).collect::<Vec<_>>());
        }
        let eval = |c: &[([f64; 2], f64, f64)], x: f64, y: f64| c.iter().map(|(w, a, p)| a * (w[0] * x + w[1] * y + p).sin()).sum::<f64>();
        let values = sample_graph(&grid, |x, y| [eval(&waves[0], x, y), eval(&waves[1], x, y)]);
        let r = graph_area_check(&grid, &values).map_err(|e| format!("case {case}: {e}"))?;
        worst = worst.min(r.slack);
    }
    ensure(worst >= -1e-4, || format!("slack {worst}"))?;

    let (m, rho) = (512, 0.75);
    let mut excess = f64::NEG_INFINITY;
    for case in 0..100 {
        // |dh/ds| ≤ Σ k|a_k|/ρ ≤ 1/√2 per component
        let mut comps = Vec::new();
        for _ in 0..2 {
            let raw = smooth_periodic(&mut rng, m, 5);
            let slope = raw
                .iter()
                .zip(raw.iter().cycle().skip(1))
                .map(|(a, b)| (b - a).abs() / (TAU * rho / m as f64))
                .fold(0.0, f64::max);
            let k = rng.uniform_in(0.1, 1.0) * 0.99 * FRAC_1_SQRT_2 / slope.max(1e-12);
            comps.push(raw.into_iter().map(|v| v * k).collect::<Vec<_>>());
        }
        let h: Vec<[f64; 2]> = (0..m).map(|j| [comps[0][j], comps[1][j]]).collect();
        let b = band_area(&h, rho, true).map_err(|e| format!("band {case}: {e}"))?;
        excess = excess.max(b.area - b.bound);
    }
    ensure(excess <= 0.0, || format!("band area exceeds bound by {excess}"))?;
    Ok(format!("min slack {worst:.3e}, max band excess {excess:.3e}"))
}

fn scanner(s: &Suite) -> Outcome {
    let (n, h, eps) = (128, 1.0 / 128.0, 0.1);
    let pair = PlanePair::orthogonal();
    let oracle = TranslationSearch {
        grid: 7,
        eps,
        grid_only: true,
        ..TranslationSearch::default()
    };
    let mut lines = Vec::new();
    for (k, pinch) in [0.02, 0.04, 0.08, 0.16, 0.3].into_iter().enumerate() {
        let mesh = build_pinched_competitor(FRAC_PI_2, FRAC_PI_2, pinch, n).unwrap();
        let path = s.input(&format!("pinch_{k}.mesh4"));
        let mut buf = Vec::new();
        write_mesh4(&mesh, &mut buf).unwrap();
        fs::write(&path, buf).unwrap();
        let out = s.cli(&format!("scan_{k}"), &["scan", "--mesh", path.to_str().unwrap(), "--eps", "0.1"])?;
        let r = report_fields(&out);
        ensure(r.get("stopped").map(String::as_str) == Some("true"), || format!("pinch {pinch}: no stop"))?;
        ensure(r.get("invariant_violations").map(String::as_str) == Some("0"), || format!("pinch {pinch}: drift"))?;
        let r_k: f64 = r["r_k"].parse().unwrap();

        // brute force: first dyadic scale at which no translate is eps-close
        let e = SetSample::from_mesh(&mesh, h).unwrap();
        let mut critical = None;
        let mut scale = 0.5;
        while scale >= 2.0 * h {
            let fit = best_translation(&e, &pair, &Vector4::ZERO, scale, &oracle).unwrap();
            if fit.dist > eps {
                critical = Some(scale);
                break;
            }
            scale /= 2.0;
        }
        let critical = critical.ok_or_else(|| format!("pinch {pinch}: brute force never exceeds eps"))?;
        let off = (r_k.log2() - critical.log2()).abs();
        ensure(off <= 1.0 + 1e-12, || format!("pinch {pinch}: r_k {r_k} vs brute force {critical}"))?;
        lines.push(format!("{pinch}:{r_k}/{critical}"));
    }

    let mesh = build_union_mesh(FRAC_PI_2, FRAC_PI_2, n).unwrap();
    let path = s.input("union.mesh4");
    let mut buf = Vec::new();
    write_mesh4(&mesh, &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    let out = s.cli("scan_exact", &["scan", "--mesh", path.to_str().unwrap(), "--eps", "0.1"])?;
    let r = report_fields(&out);
    ensure(r.get("floor_hit").map(String::as_str) == Some("true"), || "exact pair did not reach the floor".into())?;
    ensure(r.get("invariant_violations").map(String::as_str) == Some("0"), || "exact pair: drift".into())?;
    Ok(format!("r_k/brute force {}; exact pair hits the floor", lines.join(", ")))
}

fn plateau(s: &Suite) -> Outcome {
    let sweep = "0.05,0.1,0.2,0.3";
    let out = s.cli("plateau_orthogonal", &["plateau", "--segments", "256", "--pinch", sweep])?;
    let csv = Csv::read(&out)?;
    ensure(csv.rows.len() == 4, || format!("{} rows", csv.rows.len()))?;
    let mut least_cert = f64::INFINITY;
    for i in 0..csv.rows.len() {
        let fin = csv.float(i, "final_area");
        let cert = csv.float(i, "certificate_bound");
        let tol = csv.float(i, "certificate_tolerance") + csv.float(i, "mesh_tolerance");
        ensure(fin >= cert - tol, || format!("row {i}: final {fin} < cert {cert} - {tol}"))?;
        ensure(cert >= TAU - 2e-2, || format!("row {i}: certificate {cert}"))?;
        least_cert = least_cert.min(cert);
    }

    let out = s.cli(
        "plateau_small_angle",
        &["plateau", "--alpha1", "pi/6", "--alpha2", "pi/6", "--segments", "256", "--pinch", sweep],
    )?;
    let csv = Csv::read(&out)?;
    let best = (0..csv.rows.len()).map(|i| csv.float(i, "final_area")).fold(f64::INFINITY, f64::min);
    ensure(best < TAU - 5e-2, || format!("best small-angle area {best}"))?;
    Ok(format!("orthogonal certificates >= {least_cert:.5}, small-angle best {best:.5}"))
}

fn reproducibility(s: &Suite) -> Outcome {
    let runs = s.runs.lock().unwrap().clone();
    ensure(!runs.is_empty(), || "no CLI runs recorded".into())?;
    let base = s.root.join("run2");
    for (tag, args) in &runs {
        let second = s.invoke(&base, tag, args)?;
        let a = fs::read(s.root.join("run1").join(tag).join("results.csv")).map_err(|e| e.to_string())?;
        let b = fs::read(second.join("results.csv")).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{tag}: results.csv differs"))?;
    }
    Ok(format!("{} results.csv files identical", runs.len()))
}

type Criterion = (&'static str, f64, fn(&Suite) -> Outcome);

fn main() {
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    let _ = fs::remove_dir_all(&root);
    let suite = Suite {
        root,
        runs: Mutex::new(Vec::new()),
    };
    let criteria: [Criterion; 9] = [
        ("orthogonal projection bound", 60.0, orthogonal_bound),
        ("equality set", 10.0, equality_set),
        ("almost-orthogonal bound", 300.0, almost_orthogonal),
        ("annulus energies", 120.0, annulus_energies),
        ("energy comparison", 120.0, energy_comparison),
        ("graph area and band", 60.0, graph_area),
        ("scanner ground truth", 120.0, scanner),
        ("plateau floor and ceiling", 1200.0, plateau),
        ("reproducibility", f64::INFINITY, reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check(&suite);
        let secs = t.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(msg) if secs > *limit => Err(format!("{msg}; took {secs:.1} s, limit {limit} s")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} ({secs:.1} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} ({secs:.1} s)", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
