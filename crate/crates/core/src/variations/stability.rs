use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::fields::{hamiltonian_field, lagrangian_residual, sample_field, FrameCombination, NormalField};
use super::second::{optimize_translation_dilation, SecondVariationReport};
use super::VariationContext;
use crate::error::{Error, Result};
use crate::potential::{CoordinatePolynomial, Potential};
use crate::spectral::{CharacterizationVerdict, SpectrumAnalysis, Verdict};
use crate::tolerances;

/// Degree of the random polynomial potentials.
pub const POTENTIAL_DEGREE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Hamiltonian,
    Lagrangian,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hamiltonian" => Ok(Mode::Hamiltonian),
            "lagrangian" => Ok(Mode::Lagrangian),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode `{other}` (expected hamiltonian or lagrangian)"
            ))),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Mode::Hamiltonian => "hamiltonian",
            Mode::Lagrangian => "lagrangian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityOutcome {
    Stable,
    Unstable,
    /// No negative direction among the sampled Lagrangian variations.
    StableOnSampledFamily,
    Inconclusive,
}

impl StabilityOutcome {
    pub fn id(self) -> &'static str {
        match self {
            StabilityOutcome::Stable => "stable",
            StabilityOutcome::Unstable => "unstable",
            StabilityOutcome::StableOnSampledFamily => "stable_on_sampled_family",
            StabilityOutcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for StabilityOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub mode: Mode,
    pub outcome: StabilityOutcome,
    pub reports: Vec<SecondVariationReport>,
    /// Most negative unstable variation, if any.
    pub witness: Option<SecondVariationReport>,
    /// Node samples of the witness variation.
    pub witness_field: Option<NormalField>,
    pub min_sup: f64,
    /// `-UNSTABLE · [1]`.
    pub threshold: f64,
    pub characterization: Option<CharacterizationVerdict>,
    /// Largest closedness residual among the sampled Lagrangian fields.
    pub max_lagrangian_residual: f64,
}

fn harmonic_fields(ctx: &VariationContext) -> Result<Vec<NormalField>> {
    let chart = ctx.grid().chart();
    chart
        .harmonic_normal_basis()
        .iter()
        .map(|h| {
            let mut f = sample_field(ctx, &FrameCombination::single(chart.n(), h.normal_index))?;
            f.label = h.label.clone();
            Ok(f)
        })
        .collect()
}

fn combination_label(terms: &[(f64, &NormalField)]) -> String {
    let mut s = String::new();
    for (k, (c, f)) in terms.iter().enumerate() {
        let mag = c.abs();
        let body = if mag == 1.0 { f.label.clone() } else { format!("{mag}*{}", f.label) };
        match (k, *c < 0.0) {
            (0, false) => s.push_str(&body),
            (0, true) => s.push_str(&format!("-{body}")),
            (_, false) => s.push_str(&format!(" + {body}")),
            (_, true) => s.push_str(&format!(" - {body}")),
        }
    }
    s
}

/// Samples variations of the given class and reports the optimal `F''`
/// of each.
///
/// Hamiltonian mode combines the characterization verdict of `analysis`
/// with `trials` random potentials. Lagrangian mode first tries the
/// harmonic fields `W_a`, `W_a ± W_b`, then random `J∇f + Σ c_m W_m`, for
/// `trials` candidates in total.
pub fn stability_verdict<R: Rng + ?Sized>(
    ctx: &VariationContext,
    analysis: Option<&SpectrumAnalysis>,
    mode: Mode,
    trials: usize,
    rng: &mut R,
) -> Result<StabilityReport> {
    let grid = ctx.grid();
    let chart = grid.chart();
    let dim = chart.ambient_dim();
    let threshold = -tolerances::UNSTABLE * ctx.mass();
    let mut reports = Vec::with_capacity(trials);
    let mut max_lagrangian_residual: f64 = 0.0;
    let mut witness_field: Option<(f64, NormalField)> = None;

    let mut evaluate = |field: NormalField, reports: &mut Vec<SecondVariationReport>| -> Result<()> {
        max_lagrangian_residual = max_lagrangian_residual.max(lagrangian_residual(grid, &field));
        let opt = optimize_translation_dilation(ctx, &field)?;
        let report = SecondVariationReport::from_optimum(ctx, field.label.clone(), mode.id(), opt);
        if report.unstable && witness_field.as_ref().is_none_or(|(s, _)| report.sup < *s) {
            witness_field = Some((report.sup, field));
        }
        reports.push(report);
        Ok(())
    };

    let characterization = match mode {
        Mode::Hamiltonian => {
            let a = analysis.ok_or_else(|| {
                Error::InvalidArgument("hamiltonian mode needs the spectral analysis".into())
            })?;
            for _ in 0..trials {
                let f: Arc<dyn Potential> = Arc::new(CoordinatePolynomial::random(dim, POTENTIAL_DEGREE, rng));
                evaluate(hamiltonian_field(ctx, f)?, &mut reports)?;
            }
            Some(a.verdict.clone())
        }
        Mode::Lagrangian => {
            let w = harmonic_fields(ctx)?;
            if w.is_empty() {
                return Err(Error::MissingHarmonicBasis(chart.name().to_string()));
            }
            let mut structured: Vec<Vec<(f64, &NormalField)>> = Vec::new();
            for a in 0..w.len() {
                structured.push(vec![(1.0, &w[a])]);
            }
            for a in 0..w.len() {
                for b in (a + 1)..w.len() {
                    structured.push(vec![(1.0, &w[a]), (-1.0, &w[b])]);
                    structured.push(vec![(1.0, &w[a]), (1.0, &w[b])]);
                }
            }
            for terms in structured.iter().take(trials) {
                evaluate(NormalField::combine(combination_label(terms), terms), &mut reports)?;
            }
            for _ in structured.len().min(trials)..trials {
                let f: Arc<dyn Potential> = Arc::new(CoordinatePolynomial::random(dim, POTENTIAL_DEGREE, rng));
                let hf = hamiltonian_field(ctx, f)?;
                let coeffs: Vec<f64> = w.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
                let mut terms: Vec<(f64, &NormalField)> = vec![(1.0, &hf)];
                terms.extend(coeffs.iter().zip(&w).map(|(c, f)| (*c, f)));
                evaluate(NormalField::combine(combination_label(&terms), &terms), &mut reports)?;
            }
            None
        }
    };

    let witness = reports
        .iter()
        .filter(|r| r.unstable)
        .min_by(|a, b| a.sup.total_cmp(&b.sup))
        .cloned();
    let min_sup = reports.iter().map(|r| r.sup).fold(f64::INFINITY, f64::min);
    let outcome = match (mode, &witness, &characterization) {
        (_, Some(_), _) => StabilityOutcome::Unstable,
        (Mode::Lagrangian, None, _) => StabilityOutcome::StableOnSampledFamily,
        (Mode::Hamiltonian, None, Some(c)) => match c.verdict {
            Verdict::HamiltonianFStable => StabilityOutcome::Stable,
            Verdict::HamiltonianFUnstable => StabilityOutcome::Unstable,
            Verdict::Inconclusive => StabilityOutcome::Inconclusive,
        },
        (Mode::Hamiltonian, None, None) => StabilityOutcome::Inconclusive,
    };
    Ok(StabilityReport {
        mode,
        outcome,
        reports,
        witness,
        witness_field: witness_field.map(|(_, f)| f),
        min_sup,
        threshold,
        characterization,
        max_lagrangian_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_shape;
    use crate::measure::build_grid;
    use crate::spectral::{analyze_spectrum, BasisSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, PI};

    #[test]
    fn torus_is_lagrangian_unstable() {
        let g = build_grid(&make_shape("clifford-torus", 2, 2).unwrap(), &[24, 24]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(20240101);
        let r = stability_verdict(&ctx, None, Mode::Lagrangian, 10, &mut rng).unwrap();
        assert_eq!(r.outcome, StabilityOutcome::Unstable);
        let w = r.witness.unwrap();
        assert_eq!(w.label, "nu3 - nu4");
        assert_eq!(r.witness_field.unwrap().label, "nu3 - nu4");
        assert!((w.sup + 4.0 * PI / E).abs() < 1e-9);
        assert_eq!(r.reports.len(), 10);
        assert!(r.max_lagrangian_residual < 1e-8);
    }

    #[test]
    fn cylinder_sampled_families_are_stable() {
        let g = build_grid(&make_shape("cylinder", 2, 1).unwrap(), &[24, 24]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lag = stability_verdict(&ctx, None, Mode::Lagrangian, 12, &mut rng).unwrap();
        assert_eq!(lag.outcome, StabilityOutcome::StableOnSampledFamily, "{}", lag.min_sup);
        let a = analyze_spectrum(&g, BasisSpec::default(), 10).unwrap();
        let ham = stability_verdict(&ctx, Some(&a), Mode::Hamiltonian, 8, &mut rng).unwrap();
        assert_eq!(ham.outcome, StabilityOutcome::Stable);
    }

    #[test]
    fn mode_requirements() {
        let g = build_grid(&make_shape("plane", 2, 0).unwrap(), &[8, 8]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            stability_verdict(&ctx, None, Mode::Lagrangian, 3, &mut rng),
            Err(Error::MissingHarmonicBasis(_))
        ));
        assert!(stability_verdict(&ctx, None, Mode::Hamiltonian, 3, &mut rng).is_err());
        assert!(Mode::parse("normal").is_err());
    }
}
