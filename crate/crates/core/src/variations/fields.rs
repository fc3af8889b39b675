use std::sync::Arc;

use rayon::prelude::*;

use super::VariationContext;
use crate::error::{Error, Result};
use crate::geometry::{apply_j, apply_j_taylor, LocalJet};
use crate::measure::{check_normal, QuadratureGrid};
use crate::potential::Potential;
use crate::taylor::Taylor;
use crate::tolerances;

/// An ambient vector field along the chart, evaluated in Taylor arithmetic.
pub trait VectorField: Send + Sync {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor>;

    fn label(&self) -> String;
}

fn term_label(first: bool, c: f64, name: &str) -> String {
    let sign = if c < 0.0 { "-" } else { "+" };
    let mag = c.abs();
    let body = if mag == 1.0 { name.to_string() } else { format!("{mag}*{name}") };
    match (first, c < 0.0) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, _) => format!(" {sign} {body}"),
    }
}

/// `Σ c_α ν_α` over the normal frame (`index` 0 is `ν_{n+1}`).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCombination {
    pub n: usize,
    pub terms: Vec<(f64, usize)>,
}

impl FrameCombination {
    pub fn new(n: usize, terms: Vec<(f64, usize)>) -> Self {
        FrameCombination { n, terms }
    }

    pub fn single(n: usize, index: usize) -> Self {
        Self::new(n, vec![(1.0, index)])
    }
}

impl VectorField for FrameCombination {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
        let nu = jet.normal_frame();
        let mut out = vec![jet.constant(0.0); jet.ambient_dim()];
        for &(c, idx) in &self.terms {
            for (o, v) in out.iter_mut().zip(&nu[idx]) {
                o.axpy(c, v);
            }
        }
        out
    }

    fn label(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .enumerate()
            .map(|(k, &(c, idx))| term_label(k == 0, c, &format!("nu{}", self.n + idx + 1)))
            .collect()
    }
}

/// `f ν_α`.
#[derive(Clone)]
pub struct ModulatedFrameField {
    pub n: usize,
    pub index: usize,
    pub potential: Arc<dyn Potential>,
}

impl VectorField for ModulatedFrameField {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
        let f = self.potential.at(jet);
        jet.normal_frame()[self.index].iter().map(|v| v * &f).collect()
    }

    fn label(&self) -> String {
        format!("({})*nu{}", self.potential.label(), self.n + self.index + 1)
    }
}

/// `J∇f`.
#[derive(Clone)]
pub struct HamiltonianField {
    pub potential: Arc<dyn Potential>,
}

impl VectorField for HamiltonianField {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
        apply_j_taylor(&jet.gradient(&self.potential.at(jet)))
    }

    fn label(&self) -> String {
        format!("J grad({})", self.potential.label())
    }
}

/// The mean curvature vector `H`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanCurvatureField;

impl VectorField for MeanCurvatureField {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
        jet.mean_curvature()
    }

    fn label(&self) -> String {
        "H".to_string()
    }
}

/// `y⊥` for a constant ambient vector `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalPartField {
    pub y: Vec<f64>,
}

impl VectorField for NormalPartField {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
        let y: Vec<Taylor> = self.y.iter().map(|&c| jet.constant(c)).collect();
        jet.normal_part(&y)
    }

    fn label(&self) -> String {
        format!("perp{:?}", self.y)
    }
}

/// `Σ c_m V_m`.
#[derive(Clone, Default)]
pub struct SumField {
    pub terms: Vec<(f64, Arc<dyn VectorField>)>,
}

impl VectorField for SumField {
    fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
        let mut out = vec![jet.constant(0.0); jet.ambient_dim()];
        for (c, f) in &self.terms {
            for (o, v) in out.iter_mut().zip(f.eval(jet)) {
                o.axpy(*c, &v);
            }
        }
        out
    }

    fn label(&self) -> String {
        self.terms
            .iter()
            .enumerate()
            .map(|(k, (c, f))| term_label(k == 0, *c, &f.label()))
            .collect()
    }
}

/// Node samples of a normal field and of its parameter derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    pub label: String,
    /// `values[q]` = `V(u_q)`.
    pub values: Vec<Vec<f64>>,
    /// `derivatives[q][i]` = `∂ᵢV(u_q)`.
    pub derivatives: Vec<Vec<Vec<f64>>>,
}

impl NormalField {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∇⊥_{e_i}V = (∂ᵢV)⊥` at node `q`, one ambient vector per `i`.
    pub fn covariant(&self, grid: &QuadratureGrid, q: usize) -> Vec<Vec<f64>> {
        let f = &grid.frames()[q];
        self.derivatives[q].iter().map(|d| f.normal_part(d)).collect()
    }

    /// `Σ c_m V_m` of already sampled fields.
    pub fn combine(label: impl Into<String>, terms: &[(f64, &NormalField)]) -> NormalField {
        let (_, first) = terms[0];
        let mut values = vec![vec![0.0; first.values[0].len()]; first.len()];
        let mut derivatives =
            vec![vec![vec![0.0; first.values[0].len()]; first.derivatives[0].len()]; first.len()];
        for (c, f) in terms {
            for q in 0..first.len() {
                for (o, v) in values[q].iter_mut().zip(&f.values[q]) {
                    *o += c * v;
                }
                for (od, fd) in derivatives[q].iter_mut().zip(&f.derivatives[q]) {
                    for (o, v) in od.iter_mut().zip(fd) {
                        *o += c * v;
                    }
                }
            }
        }
        NormalField {
            label: label.into(),
            values,
            derivatives,
        }
    }
}

/// Samples a field at the context nodes, checking that it is normal.
pub fn sample_field(ctx: &VariationContext, field: &dyn VectorField) -> Result<NormalField> {
    let n = ctx.grid().chart().n();
    let (values, derivatives): (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) = ctx
        .jets()
        .par_iter()
        .map(|jet| {
            let v = field.eval(jet);
            let val: Vec<f64> = v.iter().map(Taylor::value).collect();
            let der: Vec<Vec<f64>> = (0..n).map(|i| v.iter().map(|c| c.d1(i)).collect()).collect();
            (val, der)
        })
        .unzip();
    check_normal(ctx.grid(), &values)?;
    Ok(NormalField {
        label: field.label(),
        values,
        derivatives,
    })
}

/// `V = J∇f`; refuses charts that are not Lagrangian at every node.
pub fn hamiltonian_field(ctx: &VariationContext, potential: Arc<dyn Potential>) -> Result<NormalField> {
    if let Some((node, f)) = ctx.grid().frames().iter().enumerate().find(|(_, f)| !f.lagrangian) {
        return Err(Error::NonLagrangian {
            node,
            deviation: f.lagrangian_defect(),
        });
    }
    sample_field(ctx, &HamiltonianField { potential })
}

/// `max |<∇⊥_{e_i}V, Je_j> - <∇⊥_{e_j}V, Je_i>|` over nodes and pairs.
pub fn lagrangian_residual(grid: &QuadratureGrid, field: &NormalField) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|q| {
            let f = &grid.frames()[q];
            let cov = field.covariant(grid, q);
            let je: Vec<Vec<f64>> = f.e.iter().map(|e| apply_j(e)).collect();
            let mut worst: f64 = 0.0;
            for i in 0..f.n() {
                for j in (i + 1)..f.n() {
                    let a: f64 = cov[i].iter().zip(&je[j]).map(|(x, y)| x * y).sum();
                    let b: f64 = cov[j].iter().zip(&je[i]).map(|(x, y)| x * y).sum();
                    worst = worst.max((a - b).abs());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Whether a residual certifies a Lagrangian variation.
pub fn is_lagrangian_variation(residual: f64) -> bool {
    residual <= tolerances::LAGRANGIAN_VARIATION
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_shape;
    use crate::measure::build_grid;
    use crate::potential::{CoordinatePolynomial, ParametricPotential};
    use std::f64::consts::SQRT_2;

    #[test]
    fn labels() {
        let f = FrameCombination::new(2, vec![(1.0, 0), (-1.0, 1)]);
        assert_eq!(f.label(), "nu3 - nu4");
        let f = FrameCombination::new(2, vec![(-0.5, 0), (2.0, 1)]);
        assert_eq!(f.label(), "-0.5*nu3 + 2*nu4");
    }

    #[test]
    fn hamiltonian_field_of_cos_theta_on_torus() {
        let c = make_shape("clifford-torus", 2, 2).unwrap();
        let g = build_grid(&c, &[8, 8]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let v = hamiltonian_field(&ctx, Arc::new(ParametricPotential::cos(0, 1.0))).unwrap();
        for (q, f) in g.frames().iter().enumerate() {
            // √2 J∇f = f_θ ν₃ = -sin θ ν₃.
            let theta = g.nodes()[q][0];
            for (a, b) in v.values[q].iter().zip(&f.nu[0]) {
                assert!((SQRT_2 * a + theta.sin() * b).abs() < 1e-14);
            }
        }
        assert!(lagrangian_residual(&g, &v) < 1e-13);
    }

    #[test]
    fn hamiltonian_field_of_t_on_cylinder() {
        let c = make_shape("cylinder", 2, 1).unwrap();
        let g = build_grid(&c, &[8, 8]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let v = hamiltonian_field(&ctx, Arc::new(CoordinatePolynomial::coordinate(4, 2, 1.0))).unwrap();
        for vals in &v.values {
            assert!((vals[3] - 1.0).abs() < 1e-14);
            assert!(vals[..3].iter().all(|c| c.abs() < 1e-14));
        }
        let zero = hamiltonian_field(&ctx, Arc::new(CoordinatePolynomial::constant(4, 3.0))).unwrap();
        assert!(zero.values.iter().flatten().all(|c| *c == 0.0));
    }

    #[test]
    fn lagrangian_residuals_on_torus() {
        let c = make_shape("clifford-torus", 2, 2).unwrap();
        let g = build_grid(&c, &[16, 16]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let v = sample_field(&ctx, &FrameCombination::new(2, vec![(1.0, 0), (-1.0, 1)])).unwrap();
        assert!(lagrangian_residual(&g, &v) < 1e-12);
        let m = ModulatedFrameField {
            n: 2,
            index: 0,
            potential: Arc::new(ParametricPotential::cos(1, 1.0)),
        };
        let v = sample_field(&ctx, &m).unwrap();
        // |<∇⊥_2 V, Je_1>| = √2 |sin φ|, maximal at φ = π/2 (a grid node).
        assert!((lagrangian_residual(&g, &v) - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn non_lagrangian_chart_is_refused() {
        let c = crate::geometry::graph_chart();
        let g = build_grid(&c, &[6, 6]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        let r = hamiltonian_field(&ctx, Arc::new(CoordinatePolynomial::coordinate(4, 0, 1.0)));
        assert!(matches!(r, Err(Error::NonLagrangian { .. })));
    }

    #[test]
    fn tangential_field_is_rejected() {
        struct Position;
        impl VectorField for Position {
            fn eval(&self, jet: &LocalJet) -> Vec<Taylor> {
                jet.x.clone()
            }
            fn label(&self) -> String {
                "x".into()
            }
        }
        let c = make_shape("cylinder", 2, 1).unwrap();
        let g = build_grid(&c, &[8, 8]).unwrap();
        let ctx = VariationContext::new(&g, 3).unwrap();
        assert!(matches!(sample_field(&ctx, &Position), Err(Error::NonNormalField { .. })));
    }
}
