use nalgebra::DMatrix;

use super::{apply_j, dot, Chart, LocalJet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::taylor::values;
use crate::tolerances;

/// Pointwise geometric state of a chart.
#[derive(Debug, Clone)]
pub struct FramePoint {
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    /// Coordinate tangent vectors `∂ᵢx`.
    pub e: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub g_inv: Vec<Vec<f64>>,
    pub sqrt_det_g: f64,
    /// Orthonormal normal frame; `nu[k]` is `ν_{n+k+1}` in ambient numbering.
    pub nu: Vec<Vec<f64>>,
    /// `h[α][i][j] = <∂ᵢ∂ⱼx, ν_α>`.
    pub h: Vec<Vec<Vec<f64>>>,
    /// Second fundamental form as ambient vectors, `a[i][j] = (∂ᵢ∂ⱼx)⊥`.
    pub a: Vec<Vec<Vec<f64>>>,
    /// Christoffel symbols `[k][i][j]`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    pub mean_curvature: Vec<f64>,
    pub x_tan: Vec<f64>,
    pub x_perp: Vec<f64>,
    /// Normal connection `conn[i][α][β] = <∂ᵢν_α, ν_β>`.
    pub conn: Vec<Vec<Vec<f64>>>,
    /// Whether `J` maps the tangent plane onto the normal plane here.
    pub lagrangian: bool,
}

impl FramePoint {
    pub fn n(&self) -> usize {
        self.e.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    /// Tangential coordinates `g^{ij}<v, e_j>`.
    pub fn tangent_coords(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let proj: Vec<f64> = self.e.iter().map(|e| dot(v, e)).collect();
        (0..n)
            .map(|i| (0..n).map(|j| self.g_inv[i][j] * proj[j]).sum())
            .collect()
    }

    pub fn tangent_part(&self, v: &[f64]) -> Vec<f64> {
        let c = self.tangent_coords(v);
        let mut out = vec![0.0; v.len()];
        for (ci, ei) in c.iter().zip(&self.e) {
            for (o, e) in out.iter_mut().zip(ei) {
                *o += ci * e;
            }
        }
        out
    }

    pub fn normal_part(&self, v: &[f64]) -> Vec<f64> {
        let t = self.tangent_part(v);
        v.iter().zip(&t).map(|(a, b)| a - b).collect()
    }

    /// `|A|² = g^{ik} g^{jl} <A_ij, A_kl>`.
    pub fn second_fundamental_norm2(&self) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s += self.g_inv[i][k] * self.g_inv[j][l] * dot(&self.a[i][j], &self.a[k][l]);
                    }
                }
            }
        }
        s
    }

    /// `H + ½x⊥`.
    pub fn shrinker_defect(&self) -> Vec<f64> {
        self.mean_curvature
            .iter()
            .zip(&self.x_perp)
            .map(|(h, p)| h + 0.5 * p)
            .collect()
    }

    /// `max |<Je_i, e_j>|` over coordinate tangent vectors.
    pub fn lagrangian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ei in &self.e {
            let jei = apply_j(ei);
            for ej in &self.e {
                worst = worst.max(dot(&jei, ej).abs());
            }
        }
        worst
    }
}

/// Condition number of the metric at a jet.
fn metric_condition(g: &[Vec<f64>]) -> f64 {
    let n = g.len();
    let m = DMatrix::from_fn(n, n, |i, j| g[i][j]);
    match linalg::jacobi_eigen(&m) {
        Ok((vals, _)) => {
            let lo = vals[0];
            let hi = vals[n - 1];
            if lo <= 0.0 {
                f64::INFINITY
            } else {
                hi / lo
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Evaluates every pointwise quantity of the chart at `u`.
pub fn frame_at(chart: &Chart, u: &[f64]) -> Result<FramePoint> {
    if u.len() != chart.n() {
        return Err(Error::LengthMismatch {
            expected: chart.n(),
            got: u.len(),
        });
    }
    let u = chart.canonicalize(u);
    let jet = LocalJet::new(chart, &u, 2);

    let g: Vec<Vec<f64>> = jet.g.iter().map(|r| values(r)).collect();
    let condition = metric_condition(&g);
    if !(condition <= tolerances::METRIC_CONDITION_MAX) {
        return Err(Error::DegenerateMetric { u, condition });
    }
    Ok(frame_from_jet(&jet))
}

pub(crate) fn frame_from_jet(jet: &LocalJet) -> FramePoint {
    let n = jet.n();
    let x = values(&jet.x);
    let e: Vec<Vec<f64>> = jet.e.iter().map(|v| values(v)).collect();
    let g: Vec<Vec<f64>> = jet.g.iter().map(|r| values(r)).collect();
    let g_inv: Vec<Vec<f64>> = jet.g_inv.iter().map(|r| values(r)).collect();
    let sqrt_det_g = jet.volume_density().value();

    let normals_t = jet.normal_frame();
    let nu: Vec<Vec<f64>> = normals_t.iter().map(|v| values(v)).collect();

    let second: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| (0..n).map(|j| values(&jet.second(i, j))).collect())
        .collect();
    let h: Vec<Vec<Vec<f64>>> = nu
        .iter()
        .map(|na| {
            (0..n)
                .map(|i| (0..n).map(|j| dot(&second[i][j], na)).collect())
                .collect()
        })
        .collect();
    let dim = x.len();
    let a: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = vec![0.0; dim];
                    for (alpha, na) in nu.iter().enumerate() {
                        for (c, nb) in v.iter_mut().zip(na) {
                            *c += h[alpha][i][j] * nb;
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let christoffel: Vec<Vec<Vec<f64>>> = jet
        .christoffel()
        .iter()
        .map(|k| k.iter().map(|r| values(r)).collect())
        .collect();

    let mut mean_curvature = vec![0.0; dim];
    for i in 0..n {
        for j in 0..n {
            for (c, v) in mean_curvature.iter_mut().zip(&a[i][j]) {
                *c += g_inv[i][j] * v;
            }
        }
    }

    let conn: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            let dnu: Vec<Vec<f64>> = normals_t
                .iter()
                .map(|v| v.iter().map(|c| c.deriv(i).value()).collect())
                .collect();
            let raw: Vec<Vec<f64>> = dnu
                .iter()
                .map(|da| nu.iter().map(|nb| dot(da, nb)).collect())
                .collect();
            let m = raw.len();
            (0..m)
                .map(|p| (0..m).map(|q| 0.5 * (raw[p][q] - raw[q][p])).collect())
                .collect()
        })
        .collect();

    let mut fp = FramePoint {
        u: jet.u.clone(),
        x: x.clone(),
        e,
        g,
        g_inv,
        sqrt_det_g,
        nu,
        h,
        a,
        christoffel,
        mean_curvature,
        x_tan: Vec::new(),
        x_perp: Vec::new(),
        conn,
        lagrangian: false,
    };
    fp.x_tan = fp.tangent_part(&x);
    fp.x_perp = x.iter().zip(&fp.x_tan).map(|(a, b)| a - b).collect();
    fp.lagrangian = fp.lagrangian_defect()
        <= tolerances::LAGRANGIAN * fp.g.iter().enumerate().map(|(i, r)| r[i]).fold(1.0, f64::max);
    fp
}
