use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use shrinker_core::geometry::{
    growth_condition_check, lagrangian_check, sample_points, shrinker_residual, default_epsilon_grid,
    GrowthReport,
};
use shrinker_core::measure::{bracket, build_grid, f_functional, QuadratureGrid};
use shrinker_core::potential::{CoordinatePolynomial, ParametricPotential, Potential};
use shrinker_core::spectral::{analyze_spectrum, scalar_identity_suite, SpectrumAnalysis};
use shrinker_core::variations::{
    fd_validate, lagrangian_residual, optimize_translation_dilation, sample_field,
    second_variation, stability_verdict, vector_identity_suite, FdOrder, FrameCombination,
    HamiltonianField, Mode, NormalField, StabilityOutcome, SumField, VariationContext,
    VectorField, FIELD_ORDER, OPERATOR_ORDER,
};
use shrinker_core::{tolerances, Error};

use crate::config::RunConfig;
use crate::fieldspec::parse_field;
use crate::json::{checked, checked_with};

/// Points per axis for the pointwise geometry checks.
pub const CHECK_SAMPLES: usize = 16;
/// Random polynomial pairs for the self-adjointness check.
pub const SELF_ADJOINT_PAIRS: usize = 10;
/// Random translations for `Ly⊥ = ½y⊥`.
pub const TRANSLATION_TRIALS: usize = 10;
/// Random potentials for the Hamiltonian commutation identities.
pub const POTENTIAL_TRIALS: usize = 20;
/// Degree of the random potentials in fd-validate.
pub const FD_POTENTIAL_DEGREE: usize = 3;

#[derive(Debug)]
pub enum CommandError {
    /// Bad flags or a configuration the library refuses; exit 2.
    Usage(String),
    /// The pipeline ran but a numerical step failed; exit 1.
    Numeric(String),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownShape(_)
            | Error::ShapeParams { .. }
            | Error::InvalidArgument(_)
            | Error::MissingHarmonicBasis(_)
            | Error::LengthMismatch { .. }
            | Error::Aliasing { .. }
            | Error::StepUnderflow(_) => CommandError::Usage(e.to_string()),
            other => CommandError::Numeric(other.to_string()),
        }
    }
}

/// Rows of a CSV dump.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

pub fn fmt_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.14e}")
}

/// Result of one command: payload, pass flag and optional CSV table.
pub struct CommandOutput {
    pub result: Value,
    pub pass: bool,
    pub table: Option<Table>,
}

pub fn execute(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    match cfg.command {
        "check" => check(cfg),
        "spectrum" => spectrum(cfg),
        "identities" => identities(cfg),
        "second-variation" => second_variation_cmd(cfg),
        "stability" => stability(cfg),
        "fd-validate" => fd_validate_cmd(cfg),
        other => Err(CommandError::Usage(format!("unknown command `{other}`"))),
    }
}

fn grid(cfg: &RunConfig) -> Result<QuadratureGrid, CommandError> {
    Ok(build_grid(&cfg.chart(), &cfg.resolution)?)
}

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn growth_json(g: &GrowthReport) -> Value {
    json!({
        "max_a_squared": g.max_a_squared,
        "table": g.table.iter().map(|(eps, c0)| json!({"epsilon": eps, "c0": c0})).collect::<Vec<_>>(),
        "fitted": g.fitted.map(|(c0, eps)| json!({"c0": c0, "epsilon": eps})),
        "epsilon_threshold": g.threshold,
        "pass": g.pass,
    })
}

fn check(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let chart = cfg.chart();
    let points = sample_points(&chart, CHECK_SAMPLES);
    let t = &cfg.tolerances;
    let shrinker = shrinker_residual(&chart, &points)?;
    let lagrangian = lagrangian_check(&chart, &points);
    let growth = growth_condition_check(&chart, &points, &default_epsilon_grid(chart.n()))?;
    let g = grid(cfg)?;
    let f = f_functional(&g, &vec![0.0; chart.ambient_dim()], 1.0)?;
    let pass = shrinker <= t.shrinker_residual && lagrangian <= t.lagrangian && growth.pass;
    Ok(CommandOutput {
        result: json!({
            "samples": points.len(),
            "shrinker_residual": checked(shrinker, t.shrinker_residual),
            "lagrangian_residual": checked(lagrangian, t.lagrangian),
            "growth": growth_json(&growth),
            "f_functional": f,
        }),
        pass,
        table: None,
    })
}

fn spectrum_json(a: &SpectrumAnalysis, t: &crate::config::Tolerances) -> (Value, bool) {
    let eig = &a.eig;
    let l1 = eig.lambda(1);
    let rayleigh_value = l1.map_or(f64::NAN, |l| l - 0.5);
    let rayleigh_pass = l1.is_some_and(|l| l <= 0.5 + t.rayleigh);
    let solver_pass = eig.max_residual <= t.eigen_residual;
    let v = &a.verdict;
    let value = json!({
        "basis_size": a.mats.basis.len(),
        "eigenvalues": eig.values,
        "clusters": eig.clusters.iter().map(|c| json!({"value": c.value, "multiplicity": c.multiplicity})).collect::<Vec<_>>(),
        "lambda_0": eig.lambda(0),
        "lambda_1": l1,
        "lambda_2": eig.lambda(2),
        "lambda_1_multiplicity": v.lambda1_multiplicity,
        "solver_residual": checked(eig.max_residual, t.eigen_residual),
        "rayleigh_bound": checked_with(rayleigh_value, t.rayleigh, rayleigh_pass),
        "span": {
            "pass": a.span.pass,
            "max_angle": checked_with(a.span.max_angle, tolerances::SPAN_ANGLE, a.span.pass),
            "eigenspace_dim": a.span.eigenspace_dim,
            "coordinate_rank": a.span.coordinate_rank,
        },
        "growth": growth_json(&a.growth),
        "verdict": {
            "id": v.verdict.id(),
            "hamiltonian_f_stable": v.verdict == shrinker_core::spectral::Verdict::HamiltonianFStable,
            "reason": v.reason,
            "tol": tolerances::VERDICT,
        },
    });
    (value, solver_pass && rayleigh_pass)
}

fn spectrum(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let g = grid(cfg)?;
    let a = analyze_spectrum(&g, cfg.basis, cfg.count)?;
    let (result, pass) = spectrum_json(&a, &cfg.tolerances);
    let mut table = Table::new(&["index", "eigenvalue", "cluster"]);
    for (ci, c) in a.eig.clusters.iter().enumerate() {
        for &m in &c.members {
            table.rows.push(vec![m.to_string(), fmt_float(a.eig.values[m]), ci.to_string()]);
        }
    }
    table.rows.sort_by_key(|r| r[0].parse::<usize>().unwrap_or(usize::MAX));
    Ok(CommandOutput {
        result,
        pass,
        table: Some(table),
    })
}

fn identities(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let g = grid(cfg)?;
    let mut rng = rng(cfg);
    let t = &cfg.tolerances;
    let mut rows = scalar_identity_suite(&g, SELF_ADJOINT_PAIRS, &mut rng);
    let ctx = VariationContext::new(&g, OPERATOR_ORDER)?;
    rows.extend(vector_identity_suite(&ctx, TRANSLATION_TRIALS, POTENTIAL_TRIALS, &mut rng)?);
    let mut table = Table::new(&["name", "value", "tol", "pass"]);
    let mut entries = Vec::new();
    let mut pass = true;
    for r in &rows {
        let tol = if r.name == "self_adjointness" { t.self_adjoint } else { t.identity };
        let ok = r.value <= tol;
        pass &= ok;
        entries.push(json!({"name": r.name, "value": r.value, "tol": tol, "pass": ok}));
        table.rows.push(vec![r.name.clone(), fmt_float(r.value), fmt_float(tol), ok.to_string()]);
    }
    Ok(CommandOutput {
        result: json!({ "residuals": entries }),
        pass,
        table: Some(table),
    })
}

fn field_from_config(cfg: &RunConfig) -> Result<Arc<dyn VectorField>, CommandError> {
    let spec = cfg
        .field
        .as_deref()
        .ok_or_else(|| CommandError::Usage(format!("{} needs --field", cfg.command)))?;
    parse_field(spec, cfg.n).map_err(CommandError::Usage)
}

fn translation(cfg: &RunConfig) -> Vec<f64> {
    cfg.y.clone().unwrap_or_else(|| vec![0.0; 2 * cfg.n])
}

fn second_variation_cmd(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let field = field_from_config(cfg)?;
    let g = grid(cfg)?;
    let ctx = VariationContext::new(&g, FIELD_ORDER)?;
    let v = sample_field(&ctx, field.as_ref())?;
    let y = translation(cfg);
    let raw = second_variation(&ctx, &v, cfg.h, &y)?;
    let opt = optimize_translation_dilation(&ctx, &v)?;
    let threshold = -tolerances::UNSTABLE * ctx.mass();
    let unstable = opt.sup < threshold;
    let residual = lagrangian_residual(&g, &v);
    Ok(CommandOutput {
        result: json!({
            "field": v.label,
            "h": cfg.h,
            "y": y,
            "value": raw,
            "optimum": {
                "h_star": opt.h_star,
                "y_star": opt.y_star,
                "sup": opt.sup,
                "range_defect": checked(opt.range_defect, tolerances::RANGE_DEFECT),
            },
            "unstable_threshold": threshold,
            "unstable": unstable,
            "lagrangian_residual": checked(residual, cfg.tolerances.lagrangian_variation),
            "mass": ctx.mass(),
        }),
        pass: !unstable,
        table: None,
    })
}

fn witness_table(g: &QuadratureGrid, field: Option<&NormalField>) -> Table {
    let n = g.chart().n();
    let dim = g.chart().ambient_dim();
    let mut header = vec!["node".to_string(), "weight".to_string()];
    header.extend(g.chart().axes().iter().map(|a| a.label.clone()));
    header.extend((1..=dim).map(|a| format!("x{a}")));
    header.extend((1..=dim).map(|a| format!("v{a}")));
    let mut table = Table { header, rows: Vec::new() };
    let Some(field) = field else {
        return table;
    };
    for q in 0..g.len() {
        let mut row = vec![q.to_string(), fmt_float(g.weights()[q])];
        row.extend(g.nodes()[q].iter().take(n).map(|u| fmt_float(*u)));
        row.extend(g.frames()[q].x.iter().map(|x| fmt_float(*x)));
        row.extend(field.values[q].iter().map(|v| fmt_float(*v)));
        table.rows.push(row);
    }
    table
}

fn stability(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let g = grid(cfg)?;
    let ctx = VariationContext::new(&g, FIELD_ORDER)?;
    let mut rng = rng(cfg);
    let analysis = match cfg.mode {
        Mode::Hamiltonian => Some(analyze_spectrum(&g, cfg.basis, cfg.count)?),
        Mode::Lagrangian => None,
    };
    let r = stability_verdict(&ctx, analysis.as_ref(), cfg.mode, cfg.trials, &mut rng)?;
    let lag_tol = cfg.tolerances.lagrangian_variation;
    let witness = r.witness.as_ref().map(|w| {
        json!({
            "label": w.label,
            "value": w.raw,
            "sup": w.sup,
            "h_star": w.h_star,
            "y_star": w.y_star,
        })
    });
    let characterization = analysis.as_ref().map(|a| spectrum_json(a, &cfg.tolerances).0);
    let candidates: Vec<Value> = r
        .reports
        .iter()
        .map(|c| json!({"label": c.label, "value": c.raw, "sup": c.sup, "unstable": c.unstable}))
        .collect();
    let pass = matches!(
        r.outcome,
        StabilityOutcome::Stable | StabilityOutcome::StableOnSampledFamily
    );
    let table = Some(witness_table(&g, r.witness_field.as_ref()));
    Ok(CommandOutput {
        result: json!({
            "mode": r.mode.id(),
            "outcome": r.outcome.id(),
            "witness": witness,
            "min_sup": r.min_sup,
            "unstable_threshold": r.threshold,
            "candidates": candidates,
            "lagrangian_residual": checked(r.max_lagrangian_residual, lag_tol),
            "spectrum": characterization,
        }),
        pass,
        table,
    })
}

fn fd_order_json(o: &FdOrder, tol: f64) -> Value {
    json!({
        "analytic": o.analytic,
        "extrapolated": o.extrapolated,
        "differences": o.differences.iter().map(|(s, d)| json!({"step": s, "value": d})).collect::<Vec<_>>(),
        "rel_err": checked(o.rel_err, tol),
    })
}

/// Scales a field so that `[|V|²] = [1]`.
fn normalized(ctx: &VariationContext, field: Arc<dyn VectorField>) -> Result<Arc<dyn VectorField>, CommandError> {
    let v = sample_field(ctx, field.as_ref())?;
    let norms: Vec<f64> = v.values.iter().map(|x| x.iter().map(|c| c * c).sum()).collect();
    let v2 = bracket(ctx.grid(), &norms)?;
    if !(v2 > 0.0) {
        return Ok(field);
    }
    let c = (ctx.mass() / v2).sqrt();
    Ok(Arc::new(SumField { terms: vec![(c, field)] }))
}

fn default_fd_fields(ctx: &VariationContext, rng: &mut ChaCha8Rng, trials: usize) -> Vec<Arc<dyn VectorField>> {
    let chart = ctx.grid().chart();
    let n = chart.n();
    let dim = chart.ambient_dim();
    let mut out: Vec<Arc<dyn VectorField>> = Vec::new();
    let first: Arc<dyn Potential> = if chart.axes()[0].is_periodic() {
        Arc::new(ParametricPotential::cos(0, 1.0))
    } else {
        Arc::new(CoordinatePolynomial::coordinate(dim, 0, 1.0))
    };
    out.push(Arc::new(HamiltonianField { potential: first }));
    let harmonic = chart.harmonic_normal_basis();
    match harmonic.len() {
        0 => {}
        1 => out.push(Arc::new(FrameCombination::single(n, harmonic[0].normal_index))),
        _ => out.push(Arc::new(FrameCombination::new(
            n,
            vec![(1.0, harmonic[0].normal_index), (-1.0, harmonic[1].normal_index)],
        ))),
    }
    while out.len() < trials {
        let f = CoordinatePolynomial::random(dim, FD_POTENTIAL_DEGREE, rng);
        out.push(Arc::new(HamiltonianField { potential: Arc::new(f) }));
    }
    out.truncate(trials);
    out
}

fn fd_validate_cmd(cfg: &RunConfig) -> Result<CommandOutput, CommandError> {
    let g = grid(cfg)?;
    let ctx = VariationContext::new(&g, FIELD_ORDER)?;
    let t = &cfg.tolerances;
    let dim = 2 * cfg.n;
    let mut rng = rng(cfg);
    let triples: Vec<(Arc<dyn VectorField>, f64, Vec<f64>)> = if cfg.field.is_some() {
        vec![(field_from_config(cfg)?, cfg.h, translation(cfg))]
    } else {
        default_fd_fields(&ctx, &mut rng, cfg.trials)
            .into_iter()
            .map(|f| {
                let h = rng.gen_range(-0.5..=0.5);
                let y = (0..dim).map(|_| rng.gen_range(-0.5..=0.5)).collect();
                Ok((normalized(&ctx, f)?, h, y))
            })
            .collect::<Result<_, CommandError>>()?
    };

    let mut table = Table::new(&["trial", "field", "order", "analytic", "extrapolated", "rel_err"]);
    let mut entries = Vec::new();
    let (mut worst1, mut worst2) = (0.0f64, 0.0f64);
    for (i, (field, h, y)) in triples.iter().enumerate() {
        let r = fd_validate(&ctx, field.as_ref(), y, *h)?;
        worst1 = worst1.max(r.first.rel_err);
        worst2 = worst2.max(r.second.rel_err);
        for o in [&r.first, &r.second] {
            table.rows.push(vec![
                i.to_string(),
                r.label.clone(),
                o.order.to_string(),
                fmt_float(o.analytic),
                fmt_float(o.extrapolated),
                fmt_float(o.rel_err),
            ]);
        }
        entries.push(json!({
            "field": r.label,
            "h": h,
            "y": y,
            "first": fd_order_json(&r.first, t.fd_first),
            "second": fd_order_json(&r.second, t.fd_second),
        }));
    }
    let pass = worst1 <= t.fd_first && worst2 <= t.fd_second;
    Ok(CommandOutput {
        result: json!({
            "trials": entries,
            "max_rel_err_first": checked(worst1, t.fd_first),
            "max_rel_err_second": checked(worst2, t.fd_second),
        }),
        pass,
        table: Some(table),
    })
}
