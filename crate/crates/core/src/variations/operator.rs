use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::fields::{MeanCurvatureField, NormalPartField, VectorField};
use super::{VariationContext, OPERATOR_ORDER};
use crate::error::Result;
use crate::geometry::{apply_j_taylor, FramePoint, LocalJet};
use crate::potential::{CoordinatePolynomial, Potential};
use crate::spectral::Residual;
use crate::taylor::Taylor;
use crate::tolerances;

/// `LV = Δ⊥V - ½∇⊥_{xᵀ}V + <<A,V>,A> + ½V` at one node.
fn apply_l(jet: &LocalJet, frame: &FramePoint, v: &[Taylor]) -> Vec<f64> {
    let n = jet.n();
    let dim = jet.ambient_dim();
    // W_j = ∇⊥_j V, kept as a jet so it can be differentiated once more.
    let w: Vec<Vec<Taylor>> = (0..n)
        .map(|j| {
            let dv: Vec<Taylor> = v.iter().map(|c| c.deriv(j)).collect();
            jet.normal_part(&dv)
        })
        .collect();
    let w0: Vec<Vec<f64>> = w.iter().map(|wj| wj.iter().map(Taylor::value).collect()).collect();
    let v0: Vec<f64> = v.iter().map(Taylor::value).collect();

    let mut out = vec![0.0; dim];
    for i in 0..n {
        for j in 0..n {
            let gij = frame.g_inv[i][j];
            if gij == 0.0 {
                continue;
            }
            let dw: Vec<f64> = w[j].iter().map(|c| c.d1(i)).collect();
            let mut t = frame.normal_part(&dw);
            for k in 0..n {
                let gamma = frame.christoffel[k][i][j];
                for (a, b) in t.iter_mut().zip(&w0[k]) {
                    *a -= gamma * b;
                }
            }
            for (o, a) in out.iter_mut().zip(&t) {
                *o += gij * a;
            }
        }
    }

    let xt = frame.tangent_coords(&frame.x);
    for k in 0..n {
        for (o, b) in out.iter_mut().zip(&w0[k]) {
            *o -= 0.5 * xt[k] * b;
        }
    }

    let av: Vec<Vec<f64>> = frame
        .a
        .iter()
        .map(|row| row.iter().map(|aij| aij.iter().zip(&v0).map(|(p, q)| p * q).sum()).collect())
        .collect();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c = frame.g_inv[i][k] * frame.g_inv[j][l] * av[i][j];
                    if c != 0.0 {
                        for (o, a) in out.iter_mut().zip(&frame.a[k][l]) {
                            *o += c * a;
                        }
                    }
                }
            }
        }
    }

    for (o, b) in out.iter_mut().zip(&v0) {
        *o += 0.5 * b;
    }
    out
}

/// `LV` at every node.
pub fn normal_stability_operator(ctx: &VariationContext, field: &dyn VectorField) -> Result<Vec<Vec<f64>>> {
    ctx.require_order(OPERATOR_ORDER, "stability operator")?;
    let frames = ctx.grid().frames();
    Ok(ctx
        .jets()
        .par_iter()
        .zip(frames)
        .map(|(jet, f)| apply_l(jet, f, &field.eval(jet)))
        .collect())
}

fn max_distance(a: &[Vec<f64>], b: &[Vec<f64>], scale: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            x.iter()
                .zip(y)
                .map(|(p, q)| (p - scale * q).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

/// Residuals of `LH = H`, `Ly⊥ = ½y⊥` (random `y`), `LJ∇f = J∇(𝓛f + f)`
/// and `[<H, J∇f>] = 0` (random polynomial `f`).
pub fn vector_identity_suite<R: Rng + ?Sized>(
    ctx: &VariationContext,
    y_trials: usize,
    f_trials: usize,
    rng: &mut R,
) -> Result<Vec<Residual>> {
    ctx.require_order(OPERATOR_ORDER, "vector identity suite")?;
    let grid = ctx.grid();
    let dim = grid.chart().ambient_dim();
    let frames = grid.frames();
    let mut out = Vec::new();

    let h: Vec<Vec<f64>> = frames.iter().map(|f| f.mean_curvature.clone()).collect();
    let lh = normal_stability_operator(ctx, &MeanCurvatureField)?;
    out.push(Residual::new("L_mean_curvature", max_distance(&lh, &h, 1.0), tolerances::IDENTITY));

    let mut worst = 0.0f64;
    for _ in 0..y_trials {
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let yp: Vec<Vec<f64>> = frames.iter().map(|f| f.normal_part(&y)).collect();
        let ly = normal_stability_operator(ctx, &NormalPartField { y })?;
        worst = worst.max(max_distance(&ly, &yp, 0.5));
    }
    out.push(Residual::new("L_normal_translation", worst, tolerances::IDENTITY));

    let mut commute = 0.0f64;
    let mut orth = 0.0f64;
    let w = grid.weights();
    for _ in 0..f_trials {
        let f = Arc::new(CoordinatePolynomial::random(dim, 4, rng));
        let rows: Vec<(Vec<f64>, Vec<f64>, f64)> = ctx
            .jets()
            .par_iter()
            .zip(frames)
            .map(|(jet, fr)| {
                let ft = f.at(jet);
                let v = apply_j_taylor(&jet.gradient(&ft));
                let lhs = apply_l(jet, fr, &v);
                let g = &jet.drift_laplacian(&ft) + &ft;
                let rhs: Vec<f64> = apply_j_taylor(&jet.gradient(&g)).iter().map(Taylor::value).collect();
                let hv: f64 = fr.mean_curvature.iter().zip(&v).map(|(a, b)| a * b.value()).sum();
                (lhs, rhs, hv)
            })
            .collect();
        let lhs: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
        let rhs: Vec<Vec<f64>> = rows.iter().map(|r| r.1.clone()).collect();
        let hv: Vec<f64> = rows.iter().map(|r| r.2).collect();
        commute = commute.max(max_distance(&lhs, &rhs, 1.0));
        let bracket: f64 = w.iter().zip(&hv).map(|(a, b)| a * b).sum();
        orth = orth.max(bracket.abs());
    }
    out.push(Residual::new("L_hamiltonian_commutation", commute, tolerances::IDENTITY));
    out.push(Residual::new("mean_curvature_hamiltonian_orthogonality", orth, tolerances::IDENTITY));
    Ok(out)
}
