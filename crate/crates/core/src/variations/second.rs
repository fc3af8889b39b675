use std::sync::Arc;

use nalgebra::DMatrix;

use super::fields::{hamiltonian_field, NormalField};
use super::VariationContext;
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::check_normal;
use crate::potential::Potential;
use crate::spectral::{EigResult, GalerkinMatrices};
use crate::tolerances;

/// The field-dependent brackets of `F''(h, y)`:
/// `F''(h,y) = f0 + b·y - ½yᵀQy - a h² - 2 c h`.
struct Parts {
    f0: f64,
    c: f64,
    b: Vec<f64>,
}

fn parts(ctx: &VariationContext, field: &NormalField) -> Result<Parts> {
    let grid = ctx.grid();
    check_normal(grid, &field.values)?;
    let dim = grid.chart().ambient_dim();
    let mut f0 = 0.0;
    let mut c = 0.0;
    let mut b = vec![0.0; dim];
    for (q, (fr, w)) in grid.frames().iter().zip(grid.weights()).enumerate() {
        let n = fr.n();
        let v = &field.values[q];
        let cov = field.covariant(grid, q);
        let mut grad2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d: f64 = cov[i].iter().zip(&cov[j]).map(|(x, y)| x * y).sum();
                grad2 += fr.g_inv[i][j] * d;
            }
        }
        let av: Vec<Vec<f64>> = fr
            .a
            .iter()
            .map(|row| row.iter().map(|aij| aij.iter().zip(v).map(|(p, q)| p * q).sum()).collect())
            .collect();
        let mut a2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        a2 += fr.g_inv[i][k] * fr.g_inv[j][l] * av[i][j] * av[k][l];
                    }
                }
            }
        }
        let v2: f64 = v.iter().map(|x| x * x).sum();
        f0 += w * (grad2 - a2 - 0.5 * v2);
        c += w * fr.mean_curvature.iter().zip(v).map(|(h, x)| h * x).sum::<f64>();
        for (bb, x) in b.iter_mut().zip(v) {
            *bb += w * x;
        }
    }
    Ok(Parts { f0, c, b })
}

fn quadratic(ctx: &VariationContext, p: &Parts, h: f64, y: &[f64]) -> f64 {
    let q = ctx.normal_gram();
    let dim = y.len();
    let by: f64 = p.b.iter().zip(y).map(|(a, b)| a * b).sum();
    let mut yqy = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            yqy += y[a] * q[(a, b)] * y[b];
        }
    }
    p.f0 + by - 0.5 * yqy - ctx.mean_curvature_norm2() * h * h - 2.0 * h * p.c
}

/// `F''` of the variation `(V, x₀' = y, t₀' = h)` at `(0, 1)`, with
/// `-[<V, LV>]` integrated by parts.
pub fn second_variation(ctx: &VariationContext, field: &NormalField, h: f64, y: &[f64]) -> Result<f64> {
    let dim = ctx.grid().chart().ambient_dim();
    if y.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: y.len(),
        });
    }
    let p = parts(ctx, field)?;
    Ok(quadratic(ctx, &p, h, y))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// `F''(0, 0)`.
    pub raw: f64,
    pub h_star: f64,
    pub y_star: Vec<f64>,
    /// `sup_{h,y} F''`.
    pub sup: f64,
    /// Component of `b` outside `range(Q)`.
    pub range_defect: f64,
}

/// Exact maximizer of the quadratic `F''(h, y)` for a fixed normal field.
pub fn optimize_translation_dilation(ctx: &VariationContext, field: &NormalField) -> Result<Optimum> {
    let p = parts(ctx, field)?;
    let a = ctx.mean_curvature_norm2();
    let h_star = if a > tolerances::RANK * ctx.mass() { -p.c / a } else { 0.0 };

    let q: &DMatrix<f64> = ctx.normal_gram();
    let dim = p.b.len();
    let (vals, vecs) = linalg::jacobi_eigen(q)?;
    let top = vals.iter().copied().fold(0.0, f64::max);
    let mut y_star = vec![0.0; dim];
    let mut null = vec![0.0; dim];
    for (k, &lam) in vals.iter().enumerate() {
        let proj: f64 = (0..dim).map(|r| vecs[(r, k)] * p.b[r]).sum();
        let target = if lam > tolerances::RANK * top { &mut y_star } else { &mut null };
        let scale = if lam > tolerances::RANK * top { proj / lam } else { proj };
        for r in 0..dim {
            target[r] += scale * vecs[(r, k)];
        }
    }
    let range_defect = null.iter().map(|x| x * x).sum::<f64>().sqrt();
    let bnorm = p.b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if range_defect > tolerances::RANGE_DEFECT * bnorm.max(1.0) {
        return Err(Error::UnboundedAbove { defect: range_defect });
    }
    let raw = p.f0;
    let sup = quadratic(ctx, &p, h_star, &y_star);
    Ok(Optimum {
        raw,
        h_star,
        y_star,
        sup,
        range_defect,
    })
}

/// One evaluated variation with its optimal translation and dilation.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondVariationReport {
    pub label: String,
    pub mode: String,
    pub raw: f64,
    pub h_star: f64,
    pub y_star: Vec<f64>,
    pub sup: f64,
    /// `sup < -UNSTABLE · [1]`.
    pub unstable: bool,
}

impl SecondVariationReport {
    pub fn from_optimum(ctx: &VariationContext, label: impl Into<String>, mode: &str, opt: Optimum) -> Self {
        SecondVariationReport {
            label: label.into(),
            mode: mode.to_string(),
            raw: opt.raw,
            h_star: opt.h_star,
            unstable: opt.sup < -tolerances::UNSTABLE * ctx.mass(),
            y_star: opt.y_star,
            sup: opt.sup,
        }
    }
}

/// A potential expanded in the eigenbasis of `𝓛`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianExpansion {
    pub label: String,
    /// `c_i = [f ψ_i]` for the `B`-orthonormal eigenfunctions `ψ_i`.
    pub coefficients: Vec<f64>,
    /// `μ_i`, with `𝓛ψ_i = -μ_i ψ_i`.
    pub eigenvalues: Vec<f64>,
    /// `‖f - Σ c_i ψ_i‖ / max(1, ‖f‖)` in the weighted norm.
    pub residual: f64,
}

impl HamiltonianExpansion {
    pub fn new(
        ctx: &VariationContext,
        mats: &GalerkinMatrices,
        eig: &EigResult,
        potential: &dyn Potential,
    ) -> Result<Self> {
        let grid = ctx.grid();
        let w = grid.weights();
        let f: Vec<f64> = ctx.jets().iter().map(|j| potential.at(j).value()).collect();
        let psi = &mats.basis.values * &eig.vectors;
        let m = psi.ncols();
        let coefficients: Vec<f64> = (0..m)
            .map(|i| (0..f.len()).map(|q| w[q] * f[q] * psi[(q, i)]).sum())
            .collect();
        let mut r2 = 0.0;
        let mut f2 = 0.0;
        for q in 0..f.len() {
            let approx: f64 = (0..m).map(|i| coefficients[i] * psi[(q, i)]).sum();
            r2 += w[q] * (f[q] - approx).powi(2);
            f2 += w[q] * f[q] * f[q];
        }
        let residual = r2.sqrt() / f2.sqrt().max(1.0);
        if residual > tolerances::EXPANSION {
            return Err(Error::PoorExpansion {
                residual,
                tolerance: tolerances::EXPANSION,
            });
        }
        Ok(HamiltonianExpansion {
            label: potential.label(),
            coefficients,
            eigenvalues: eig.values.clone(),
            residual,
        })
    }

    /// `-[<∇f, ∇(𝓛f + f)>] = Σ c_i² μ_i (μ_i - 1)`.
    pub fn spectral_energy(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.eigenvalues)
            .map(|(c, mu)| c * c * mu * (mu - 1.0))
            .sum()
    }
}

/// `F''` of `V = J∇f` with the gradient term evaluated from the
/// eigen-expansion of `f`; `eig` should hold the full Galerkin spectrum.
pub fn second_variation_hamiltonian(
    ctx: &VariationContext,
    mats: &GalerkinMatrices,
    eig: &EigResult,
    potential: Arc<dyn Potential>,
    h: f64,
    y: &[f64],
) -> Result<f64> {
    let dim = ctx.grid().chart().ambient_dim();
    if y.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            got: y.len(),
        });
    }
    let expansion = HamiltonianExpansion::new(ctx, mats, eig, potential.as_ref())?;
    let field = hamiltonian_field(ctx, potential)?;
    let w = ctx.grid().weights();
    let vy: f64 = field
        .values
        .iter()
        .zip(w)
        .map(|(v, wq)| wq * v.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
        .sum();
    let q = ctx.normal_gram();
    let mut yqy = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            yqy += y[a] * q[(a, b)] * y[b];
        }
    }
    Ok(expansion.spectral_energy() + vy - h * h * ctx.mean_curvature_norm2() - 0.5 * yqy)
}
