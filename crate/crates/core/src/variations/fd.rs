use super::fields::{sample_field, NormalField, VectorField};
use super::second::second_variation;
use super::VariationContext;
use crate::error::{Error, Result};
use crate::measure::{first_variation, TranslationDilation};

/// Centered-difference steps; the pair is combined by Richardson
/// extrapolation.
pub const DEFAULT_FD_STEPS: [f64; 2] = [1e-3, 1e-4];

#[derive(Debug, Clone, PartialEq)]
pub struct FdOrder {
    pub order: u8,
    pub analytic: f64,
    /// `(s, centered difference at s)`.
    pub differences: Vec<(f64, f64)>,
    pub extrapolated: f64,
    /// `|analytic - extrapolated| / max(|extrapolated|, 1)`.
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub label: String,
    pub first: FdOrder,
    pub second: FdOrder,
}

fn family_value(ctx: &VariationContext, v: &NormalField, y: &[f64], h: f64, s: f64) -> Result<f64> {
    let grid = ctx.grid();
    let positions: Vec<Vec<f64>> = grid
        .frames()
        .iter()
        .zip(&v.values)
        .map(|(f, vq)| f.x.iter().zip(vq).map(|(x, d)| x + s * d).collect())
        .collect();
    let tangents: Vec<Vec<Vec<f64>>> = grid
        .frames()
        .iter()
        .zip(&v.derivatives)
        .map(|(f, dq)| {
            f.e.iter()
                .zip(dq)
                .map(|(e, d)| e.iter().zip(d).map(|(a, b)| a + s * b).collect())
                .collect()
        })
        .collect();
    let x0: Vec<f64> = y.iter().map(|c| s * c).collect();
    grid.f_functional_deformed(&positions, &tangents, &x0, 1.0 + s * h)
}

fn extrapolate(diffs: &[(f64, f64)]) -> f64 {
    match diffs {
        [(s1, d1), (s2, d2), ..] => (s1 * s1 * d2 - s2 * s2 * d1) / (s1 * s1 - s2 * s2),
        [(_, d)] => *d,
        [] => f64::NAN,
    }
}

fn finish(order: u8, analytic: f64, differences: Vec<(f64, f64)>) -> FdOrder {
    let extrapolated = extrapolate(&differences);
    FdOrder {
        order,
        analytic,
        rel_err: (analytic - extrapolated).abs() / extrapolated.abs().max(1.0),
        differences,
        extrapolated,
    }
}

/// Compares the analytic first and second variation of
/// `s ↦ F_{sy, 1+sh}(x + sV)` with centered differences.
pub fn fd_validate(ctx: &VariationContext, field: &dyn VectorField, y: &[f64], h: f64) -> Result<FdReport> {
    fd_validate_with_steps(ctx, field, y, h, &DEFAULT_FD_STEPS)
}

pub fn fd_validate_with_steps(
    ctx: &VariationContext,
    field: &dyn VectorField,
    y: &[f64],
    h: f64,
    steps: &[f64],
) -> Result<FdReport> {
    if steps.is_empty() {
        return Err(Error::InvalidArgument("no finite-difference steps".into()));
    }
    // s² must stay well above rounding of F for the second difference.
    let floor = (1e3 * f64::EPSILON).sqrt();
    if let Some(&s) = steps.iter().find(|&&s| !(s >= floor)) {
        return Err(Error::StepUnderflow(s));
    }
    let dim = ctx.grid().chart().ambient_dim();
    if y.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: y.len(),
        });
    }
    let v = sample_field(ctx, field)?;
    let f0 = family_value(ctx, &v, y, h, 0.0)?;
    let mut d1 = Vec::with_capacity(steps.len());
    let mut d2 = Vec::with_capacity(steps.len());
    for &s in steps {
        let fp = family_value(ctx, &v, y, h, s)?;
        let fm = family_value(ctx, &v, y, h, -s)?;
        d1.push((s, (fp - fm) / (2.0 * s)));
        d2.push((s, (fp - 2.0 * f0 + fm) / (s * s)));
    }
    let motion = TranslationDilation { h, y: y.to_vec() };
    let first = first_variation(ctx.grid(), &v.values, &motion, &vec![0.0; dim], 1.0)?;
    let second = second_variation(ctx, &v, h, y)?;
    Ok(FdReport {
        label: v.label.clone(),
        first: finish(1, first, d1),
        second: finish(2, second, d2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_shape;
    use crate::measure::build_grid;
    use crate::potential::ParametricPotential;
    use crate::variations::{FrameCombination, HamiltonianField};
    use std::f64::consts::{E, PI};
    use std::sync::Arc;

    #[test]
    fn torus_fd_agrees() {
        let g = build_grid(&make_shape("clifford-torus", 2, 2).unwrap(), &[32, 32]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let v = FrameCombination::new(2, vec![(1.0, 0), (-1.0, 1)]);
        let r = fd_validate(&ctx, &v, &[0.0; 4], 0.0).unwrap();
        assert!((r.second.extrapolated + 4.0 * PI / E).abs() < 1e-5, "{r:?}");
        assert!(r.second.rel_err < 1e-4 && r.first.rel_err < 1e-5);

        let v = HamiltonianField {
            potential: Arc::new(ParametricPotential::cos(0, 1.0)),
        };
        let r = fd_validate(&ctx, &v, &[0.1, -0.2, 0.3, 0.05], 0.4).unwrap();
        assert!(r.second.rel_err < 1e-4 && r.first.rel_err < 1e-5, "{r:?}");
        assert!(r.first.analytic.abs() < 1e-10);
    }

    #[test]
    fn tiny_steps_are_refused() {
        let g = build_grid(&make_shape("clifford-torus", 2, 2).unwrap(), &[8, 8]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let v = FrameCombination::single(2, 0);
        assert!(matches!(
            fd_validate_with_steps(&ctx, &v, &[0.0; 4], 0.0, &[1e-9]),
            Err(Error::StepUnderflow(_))
        ));
    }
}
