use std::fmt;

use super::galerkin::EigResult;
use super::span::SpanTest;
use crate::geometry::GrowthReport;
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    HamiltonianFStable,
    HamiltonianFUnstable,
    Inconclusive,
}

impl Verdict {
    pub fn id(self) -> &'static str {
        match self {
            Verdict::HamiltonianFStable => "hamiltonian_f_stable",
            Verdict::HamiltonianFUnstable => "hamiltonian_f_unstable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationVerdict {
    pub verdict: Verdict,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub lambda1_multiplicity: usize,
    pub span_pass: bool,
    pub growth_pass: bool,
    pub reason: String,
}

/// Verdict from `λ₁ = ½`, `λ₂ ≥ 1` (`= 1` when `n = 2`) and the coordinate
/// span of the `λ₁` eigenspace.
///
/// Values within `VERDICT` of a threshold count as on it. Values between
/// `VERDICT` and `VERDICT_GUARD · VERDICT` away are too close to call.
pub fn characterization_verdict(
    eig: &EigResult,
    span: &SpanTest,
    growth: &GrowthReport,
    n: usize,
) -> CharacterizationVerdict {
    let tol = tolerances::VERDICT;
    let guard = tolerances::VERDICT_GUARD * tol;
    let lambda1 = eig.lambda(1);
    let lambda2 = eig.lambda(2);
    let lambda1_multiplicity = eig.clusters.get(1).map_or(0, |c| c.multiplicity);
    let make = |verdict: Verdict, reason: String| CharacterizationVerdict {
        verdict,
        lambda1,
        lambda2,
        lambda1_multiplicity,
        span_pass: span.pass,
        growth_pass: growth.pass,
        reason,
    };

    if !growth.pass {
        return make(Verdict::Inconclusive, "growth condition not certified".into());
    }
    let ground_ok = eig.clusters.first().is_some_and(|c| c.value.abs() <= tol && c.multiplicity == 1);
    if !ground_ok {
        return make(Verdict::Inconclusive, "ground state is not a simple zero eigenvalue".into());
    }
    let (Some(l1), Some(l2)) = (lambda1, lambda2) else {
        return make(Verdict::Inconclusive, "fewer than three distinct eigenvalues computed".into());
    };

    if (l1 - 0.5).abs() <= tol && span.pass && l2 >= 1.0 - tol {
        if n == 2 && (l2 - 1.0).abs() > tol {
            return make(
                Verdict::Inconclusive,
                format!("n = 2 requires lambda_2 = 1, got {l2}"),
            );
        }
        return make(Verdict::HamiltonianFStable, "lambda_1 = 1/2 on the coordinate span, lambda_2 >= 1".into());
    }
    if l1 < 0.5 - guard {
        return make(Verdict::HamiltonianFUnstable, format!("lambda_1 = {l1} < 1/2"));
    }
    if (l1 - 0.5).abs() <= tol && !span.pass {
        return make(
            Verdict::HamiltonianFUnstable,
            format!("lambda_1 eigenspace is not the coordinate span (angle {})", span.max_angle),
        );
    }
    if (l1 - 0.5).abs() <= tol && l2 < 1.0 - guard {
        return make(Verdict::HamiltonianFUnstable, format!("lambda_2 = {l2} < 1"));
    }
    make(
        Verdict::Inconclusive,
        format!("eigenvalues near thresholds or outside the admissible range (lambda_1 = {l1}, lambda_2 = {l2})"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn growth(pass: bool) -> GrowthReport {
        GrowthReport {
            max_a_squared: 1.0,
            table: vec![(0.0, 1.0)],
            fitted: pass.then_some((1.0, 0.0)),
            threshold: 1.0 / 32.0,
            pass,
        }
    }

    fn span(pass: bool) -> SpanTest {
        SpanTest {
            pass,
            max_angle: if pass { 1e-12 } else { 1.5 },
            eigenspace_dim: 4,
            coordinate_rank: 4,
        }
    }

    #[test]
    fn torus_like_spectrum_is_stable() {
        let e = EigResult::from_values(vec![0.0, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0]);
        let v = characterization_verdict(&e, &span(true), &growth(true), 2);
        assert_eq!(v.verdict, Verdict::HamiltonianFStable);
        assert_eq!(v.lambda1_multiplicity, 4);
    }

    #[test]
    fn small_lambda_one_is_unstable() {
        let e = EigResult::from_values(vec![0.0, 0.3, 0.5, 1.0]);
        let v = characterization_verdict(&e, &span(true), &growth(true), 3);
        assert_eq!(v.verdict, Verdict::HamiltonianFUnstable);
    }

    #[test]
    fn borderline_and_failed_growth_are_inconclusive() {
        let e = EigResult::from_values(vec![0.0, 0.5 - 3e-6, 1.0]);
        assert_eq!(
            characterization_verdict(&e, &span(true), &growth(true), 3).verdict,
            Verdict::Inconclusive
        );
        let e = EigResult::from_values(vec![0.0, 0.5, 1.0]);
        assert_eq!(
            characterization_verdict(&e, &span(true), &growth(false), 3).verdict,
            Verdict::Inconclusive
        );
    }

    #[test]
    fn n_two_needs_lambda_two_equal_one() {
        let e = EigResult::from_values(vec![0.0, 0.5, 1.2]);
        assert_eq!(
            characterization_verdict(&e, &span(true), &growth(true), 2).verdict,
            Verdict::Inconclusive
        );
        assert_eq!(
            characterization_verdict(&e, &span(true), &growth(true), 3).verdict,
            Verdict::HamiltonianFStable
        );
    }

    #[test]
    fn wrong_eigenspace_is_unstable() {
        let e = EigResult::from_values(vec![0.0, 0.5, 1.0]);
        assert_eq!(
            characterization_verdict(&e, &span(false), &growth(true), 2).verdict,
            Verdict::HamiltonianFUnstable
        );
    }
}
