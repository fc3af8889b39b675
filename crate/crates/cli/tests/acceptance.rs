//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Reference values are closed forms computed here, not library output.

use std::f64::consts::{E, PI, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use shrinker_cli::run_command;
use shrinker_core::geometry::{make_shape, sample_points, shrinker_residual, ProductShape};
use shrinker_core::measure::{build_grid, f_functional, QuadratureGrid};
use shrinker_core::potential::{CoordinatePolynomial, Potential};
use shrinker_core::spectral::{
    analyze_spectrum, assemble_galerkin, solve_spectrum, subspace_angle, BasisSpec, EigResult,
    GalerkinMatrices,
};
use shrinker_core::variations::{
    hamiltonian_field, optimize_translation_dilation, sample_field, second_variation,
    second_variation_hamiltonian, stability_verdict, FrameCombination, Mode, StabilityOutcome,
    VariationContext,
};

const SEED: u64 = 20240101;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn grid(name: &str, n: usize, k: usize, res: &[usize]) -> QuadratureGrid {
    build_grid(&make_shape(name, n, k).unwrap(), res).unwrap()
}

fn spectrum(g: &QuadratureGrid, spec: BasisSpec, count: usize) -> (GalerkinMatrices, EigResult) {
    let mats = assemble_galerkin(g, spec).unwrap();
    let eig = solve_spectrum(&mats, count).unwrap();
    (mats, eig)
}

fn cluster_samples(mats: &GalerkinMatrices, eig: &EigResult, i: usize) -> Vec<Vec<f64>> {
    eig.cluster_samples(&mats.basis, &eig.clusters[i])
}

fn node_samples(g: &QuadratureGrid, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    g.nodes().iter().map(|u| f(u)).collect()
}

fn cli(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["shrinker"];
    argv.extend_from_slice(args);
    let out = run_command(argv);
    let report = out.report_json().unwrap_or(Value::Null);
    (out.exit_code, report)
}

fn shrinker_equation() -> Check {
    let cases: [(&str, usize, usize); 7] = [
        ("clifford-torus", 2, 2),
        ("clifford-torus", 3, 3),
        ("cylinder", 2, 1),
        ("cylinder", 3, 1),
        ("cylinder", 3, 2),
        ("circle-product", 1, 1),
        ("plane", 2, 0),
    ];
    let mut worst: f64 = 0.0;
    for (name, n, k) in cases {
        let c = make_shape(name, n, k).unwrap();
        let r = shrinker_residual(&c, &sample_points(&c, 9)).unwrap();
        ensure(r <= 1e-10, format!("{name} n={n} k={k}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    let unit = ProductShape { n: 2, k: 2, radius: 1.0 }.chart("unit-torus");
    let r = shrinker_residual(&unit, &sample_points(&unit, 9)).unwrap();
    ensure(r > 0.1, format!("radius-1 torus residual {r}"))?;
    Ok(format!("max residual {worst:.1e}, radius-1 torus {r:.3}"))
}

fn circle_spectrum() -> Check {
    let g = grid("circle-product", 1, 1, &[32]);
    let (_, eig) = spectrum(&g, BasisSpec { fourier: 6, hermite: 2 }, 13);
    let mut worst: f64 = 0.0;
    for k in 0..=4usize {
        let c = &eig.clusters[k];
        let want = (k * k) as f64 / 2.0;
        worst = worst.max((c.value - want).abs());
        ensure((c.value - want).abs() <= 1e-8, format!("k={k}: {} vs {want}", c.value))?;
        let mult = if k == 0 { 1 } else { 2 };
        ensure(c.multiplicity == mult, format!("k={k}: multiplicity {}", c.multiplicity))?;
    }
    Ok(format!("max |mu - k^2/2| = {worst:.1e}"))
}

fn line_spectrum() -> Check {
    let g = grid("plane", 1, 0, &[48]);
    let (mats, eig) = spectrum(&g, BasisSpec { fourier: 2, hermite: 8 }, 9);
    let mut worst: f64 = 0.0;
    for k in 0..=6usize {
        let v = eig.values[k];
        worst = worst.max((v - k as f64 / 2.0).abs());
        ensure((v - k as f64 / 2.0).abs() <= 1e-8, format!("k={k}: {v}"))?;
    }
    let psi = mats.basis.synthesize(&eig.coefficients(2));
    let oracle = node_samples(&g, |u| u[0] * u[0] - 2.0);
    let angle = subspace_angle(&g, &[psi], &[oracle]);
    ensure(angle < 1e-6, format!("angle to t^2 - 2: {angle:e}"))?;
    Ok(format!("max |mu - k/2| = {worst:.1e}, angle(t^2-2) = {angle:.1e}"))
}

fn cylinder_spectrum() -> Check {
    let g = grid("cylinder", 2, 1, &[32, 24]);
    let (mats, eig) = spectrum(&g, BasisSpec::default(), 12);
    let want = [(0.0, 1), (0.5, 3), (1.0, 3)];
    for (i, (value, mult)) in want.iter().enumerate() {
        let c = &eig.clusters[i];
        ensure(
            (c.value - value).abs() <= 1e-8 && c.multiplicity == *mult,
            format!("cluster {i}: {} x{}", c.value, c.multiplicity),
        )?;
    }
    let half = vec![
        node_samples(&g, |u| u[0].cos()),
        node_samples(&g, |u| u[0].sin()),
        node_samples(&g, |u| u[1]),
    ];
    let one = vec![
        node_samples(&g, |u| u[1] * u[0].cos()),
        node_samples(&g, |u| u[1] * u[0].sin()),
        node_samples(&g, |u| u[1] * u[1] - 2.0),
    ];
    let a1 = subspace_angle(&g, &cluster_samples(&mats, &eig, 1), &half);
    let a2 = subspace_angle(&g, &cluster_samples(&mats, &eig, 2), &one);
    ensure(a1 < 1e-5 && a2 < 1e-5, format!("angles {a1:e}, {a2:e}"))?;
    Ok(format!("multiplicities (1,3,3), angles {a1:.1e}, {a2:.1e}"))
}

fn torus_spectrum() -> Check {
    let g = grid("clifford-torus", 2, 2, &[32, 32]);
    let a = analyze_spectrum(&g, BasisSpec::default(), 12).unwrap();
    let l1 = a.eig.lambda(1).unwrap();
    let l2 = a.eig.lambda(2).unwrap();
    let m1 = a.eig.clusters[1].multiplicity;
    ensure((l1 - 0.5).abs() <= 1e-6 && m1 == 4, format!("lambda_1 = {l1} x{m1}"))?;
    ensure((l2 - 1.0).abs() <= 1e-6, format!("lambda_2 = {l2}"))?;
    ensure(a.span.pass, format!("span angle {:e}", a.span.max_angle))?;
    let oracle = vec![
        node_samples(&g, |u| u[0].cos()),
        node_samples(&g, |u| u[0].sin()),
        node_samples(&g, |u| u[1].cos()),
        node_samples(&g, |u| u[1].sin()),
    ];
    let angle = subspace_angle(&g, &cluster_samples(&a.mats, &a.eig, 1), &oracle);
    ensure(angle < 1e-5, format!("angle to coordinates {angle:e}"))?;
    ensure(a.verdict.verdict.id() == "hamiltonian_f_stable", a.verdict.reason.clone())?;
    Ok(format!("lambda_1 = {l1:.9} x4, lambda_2 = {l2:.9}, verdict {}", a.verdict.verdict))
}

fn cylinder_verdict() -> Check {
    let g = grid("cylinder", 2, 1, &[32, 24]);
    let a = analyze_spectrum(&g, BasisSpec::default(), 12).unwrap();
    ensure(a.verdict.verdict.id() == "hamiltonian_f_stable", a.verdict.reason.clone())?;
    ensure(a.growth.pass, "growth check failed")?;
    // |A|² = 1/r² for one circle factor of radius √2.
    let a2 = 1.0 / (SQRT_2 * SQRT_2);
    let worst = g
        .frames()
        .iter()
        .map(|f| (f.second_fundamental_norm2() - a2).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-12, format!("|A|^2 deviates by {worst:e}"))?;
    let (c0, eps) = a.growth.fitted.unwrap();
    ensure((c0 - a2).abs() <= 1e-12 && eps == 0.0, format!("fitted ({c0}, {eps})"))?;
    Ok(format!("verdict {}, |A|^2 = 1/2 (dev {worst:.1e}), C0 = {c0}", a.verdict.verdict))
}

fn torus_lagrangian_instability() -> Check {
    let g = grid("clifford-torus", 2, 2, &[32, 32]);
    let ctx = VariationContext::new(&g, 3).unwrap();
    let v = sample_field(&ctx, &FrameCombination::new(2, vec![(1.0, 0), (-1.0, 1)])).unwrap();
    let opt = optimize_translation_dilation(&ctx, &v).unwrap();
    let want = -4.0 * PI / E;
    ensure((opt.sup - want).abs() <= 1e-6, format!("sup {} vs {want}", opt.sup))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let r = stability_verdict(&ctx, None, Mode::Lagrangian, 10, &mut rng).unwrap();
    ensure(r.outcome == StabilityOutcome::Unstable, format!("search outcome {}", r.outcome))?;
    let w = r.witness.unwrap();
    ensure(w.sup < 0.0, format!("witness sup {}", w.sup))?;
    Ok(format!("sup F'' = {:.10} (-4pi/e = {want:.10}), witness {} in 10 trials", opt.sup, w.label))
}

fn cylinder_lagrangian_stability() -> Check {
    let g = grid("cylinder", 2, 1, &[32, 24]);
    let ctx = VariationContext::new(&g, 3).unwrap();
    let mass: f64 = g.weights().iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let r = stability_verdict(&ctx, None, Mode::Lagrangian, 200, &mut rng).unwrap();
    ensure(r.reports.len() == 200, format!("{} candidates", r.reports.len()))?;
    let floor = -1e-8 * mass;
    let bad = r.reports.iter().filter(|c| c.sup < floor).count();
    ensure(bad == 0, format!("{bad} candidates below {floor:e}"))?;
    ensure(r.max_lagrangian_residual <= 1e-8, format!("closedness {:e}", r.max_lagrangian_residual))?;
    Ok(format!("200 variations, min sup {:.2e}", r.min_sup))
}

fn identity_suite() -> Check {
    let mut lines = Vec::new();
    for (shape, res) in [("clifford-torus", ["1=32", "2=32"]), ("cylinder", ["1=32", "2=24"])] {
        let (code, report) = cli(&["identities", "--shape", shape, "--res", res[0], "--res", res[1]]);
        let rows = report["result"]["residuals"].as_array().cloned().unwrap_or_default();
        ensure(rows.len() == 8, format!("{shape}: {} rows", rows.len()))?;
        let mut worst: f64 = 0.0;
        for r in &rows {
            let name = r["name"].as_str().unwrap_or("");
            let value = r["value"].as_f64().unwrap_or(f64::INFINITY);
            let tol = if name == "self_adjointness" { 1e-8 } else { 1e-7 };
            ensure(value <= tol, format!("{shape} {name}: {value:e}"))?;
            worst = worst.max(value);
        }
        ensure(code == 0, format!("{shape}: exit {code}"))?;
        lines.push(format!("{shape} max {worst:.1e}"));
    }
    Ok(lines.join(", "))
}

fn f_functional_values() -> Check {
    let cases = [
        ("plane", 2, 0, vec![48, 48], 1.0),
        ("clifford-torus", 2, 2, vec![64, 64], 2.0 * PI / E),
        ("cylinder", 2, 1, vec![64, 48], (2.0 * PI).sqrt() * (-0.5f64).exp()),
    ];
    let mut out = Vec::new();
    for (name, n, k, res, want) in cases {
        let g = grid(name, n, k, &res);
        let f = f_functional(&g, &[0.0; 4], 1.0).unwrap();
        ensure((f - want).abs() <= 1e-9, format!("{name}: {f} vs {want}"))?;
        out.push(format!("{name} {f:.10}"));
    }
    Ok(out.join(", "))
}

fn finite_differences() -> Check {
    let (code, report) = cli(&["fd-validate", "--shape", "clifford-torus", "--res", "1=32", "--res", "2=32"]);
    let trials = report["result"]["trials"].as_array().cloned().unwrap_or_default();
    ensure(trials.len() == 10, format!("{} trials", trials.len()))?;
    let labels: Vec<&str> = trials.iter().filter_map(|t| t["field"].as_str()).collect();
    ensure(labels.iter().any(|l| l.contains("cos")), "no J grad cos(theta) trial")?;
    ensure(labels.iter().any(|l| l.contains("nu3 - nu4")), "no nu3 - nu4 trial")?;
    let (mut w1, mut w2) = (0.0f64, 0.0f64);
    for t in &trials {
        let e1 = t["first"]["rel_err"]["value"].as_f64().unwrap_or(f64::INFINITY);
        let e2 = t["second"]["rel_err"]["value"].as_f64().unwrap_or(f64::INFINITY);
        ensure(e1 <= 1e-5 && e2 <= 1e-4, format!("{}: {e1:e}, {e2:e}", t["field"]))?;
        w1 = w1.max(e1);
        w2 = w2.max(e2);
    }
    ensure(code == 0, format!("exit {code}"))?;
    Ok(format!("max rel err first {w1:.1e}, second {w2:.1e}"))
}

fn spectral_direct_agreement() -> Check {
    let mut worst: f64 = 0.0;
    for (name, k, res) in [("clifford-torus", 2, [32, 32]), ("cylinder", 1, [32, 24])] {
        let g = grid(name, 2, k, &res);
        let ctx = VariationContext::new(&g, 3).unwrap();
        let mats = assemble_galerkin(&g, BasisSpec::default()).unwrap();
        let eig = solve_spectrum(&mats, mats.basis.len()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..20 {
            let f: Arc<dyn Potential> = Arc::new(CoordinatePolynomial::random(4, 4, &mut rng));
            let h: f64 = rng.gen_range(-1.0..=1.0);
            let y: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let spectral = second_variation_hamiltonian(&ctx, &mats, &eig, f.clone(), h, &y).unwrap();
            let v = hamiltonian_field(&ctx, f).unwrap();
            let direct = second_variation(&ctx, &v, h, &y).unwrap();
            let rel = (spectral - direct).abs() / direct.abs().max(1.0);
            ensure(rel <= 1e-7, format!("{name}: {spectral} vs {direct}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("40 potentials, max relative gap {worst:.1e}"))
}

fn hamiltonian_sampling() -> Check {
    let mut out = Vec::new();
    for (name, k, res) in [("clifford-torus", 2, [32, 32]), ("cylinder", 1, [32, 24])] {
        let g = grid(name, 2, k, &res);
        let ctx = VariationContext::new(&g, 3).unwrap();
        let a = analyze_spectrum(&g, BasisSpec::default(), 12).unwrap();
        let mass: f64 = g.weights().iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let r = stability_verdict(&ctx, Some(&a), Mode::Hamiltonian, 100, &mut rng).unwrap();
        ensure(r.reports.len() == 100, format!("{name}: {} candidates", r.reports.len()))?;
        let floor = -1e-8 * mass;
        ensure(r.min_sup >= floor, format!("{name}: min sup {}", r.min_sup))?;
        ensure(r.outcome == StabilityOutcome::Stable, format!("{name}: {}", r.outcome))?;
        out.push(format!("{name} min sup {:.2e}", r.min_sup));
    }
    Ok(out.join(", "))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 3] = [
        &["stability", "--shape", "clifford-torus", "--mode", "lagrangian", "--res", "1=24", "--res", "2=24", "--trials", "12"],
        &["fd-validate", "--shape", "cylinder", "--res", "1=24", "--res", "2=24", "--trials", "4"],
        &["spectrum", "--shape", "cylinder", "--count", "12"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("r{i}_{rep}.json"));
            let mut argv = vec!["shrinker"];
            argv.extend_from_slice(args);
            let p = path.to_str().unwrap().to_string();
            argv.extend_from_slice(&["--json", &p]);
            run_command(argv);
            bytes.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(!bytes[0].is_empty() && bytes[0] == bytes[1], format!("{} reports differ", args[0]))?;
    }
    Ok("stability, fd-validate and spectrum reports byte-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("shrinker equation", shrinker_equation),
        ("circle spectrum", circle_spectrum),
        ("line spectrum", line_spectrum),
        ("cylinder spectrum", cylinder_spectrum),
        ("torus spectrum and verdict", torus_spectrum),
        ("cylinder verdict and growth", cylinder_verdict),
        ("torus lagrangian instability", torus_lagrangian_instability),
        ("cylinder lagrangian stability (sampled)", cylinder_lagrangian_stability),
        ("identity suite", identity_suite),
        ("F-functional values", f_functional_values),
        ("finite-difference validation", finite_differences),
        ("spectral vs direct F''", spectral_direct_agreement),
        ("hamiltonian stability sampling", hamiltonian_sampling),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
