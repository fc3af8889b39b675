use std::sync::Arc;

use super::{apply_j_taylor, Chart};
use crate::taylor::{self, dot, Layout, Taylor};

/// Taylor expansion of a chart around one parameter point, with the
/// intrinsic calculus (gradient, Laplacian, projections) carried out in
/// Taylor arithmetic.
///
/// Each differentiation consumes one order: quantities built from `∂ᵢx`
/// are exact through `order - 1`, curvature through `order - 2`.
#[derive(Debug, Clone)]
pub struct LocalJet {
    pub u: Vec<f64>,
    pub layout: Arc<Layout>,
    /// Position `x`, ambient components.
    pub x: Vec<Taylor>,
    /// Coordinate tangent vectors `e_i = ∂ᵢx`.
    pub e: Vec<Vec<Taylor>>,
    pub g: Vec<Vec<Taylor>>,
    pub g_inv: Vec<Vec<Taylor>>,
}

impl LocalJet {
    pub fn new(chart: &Chart, u: &[f64], order: usize) -> Self {
        let n = chart.n();
        let layout = Layout::shared(n, order);
        let vars: Vec<Taylor> = u
            .iter()
            .enumerate()
            .map(|(i, &v)| Taylor::variable(&layout, i, v))
            .collect();
        let x = chart.map().position(&vars);
        let e: Vec<Vec<Taylor>> = (0..n)
            .map(|i| x.iter().map(|c| c.deriv(i)).collect())
            .collect();
        let g: Vec<Vec<Taylor>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&e[i], &e[j])).collect())
            .collect();
        let g_inv = taylor::spd_inverse(&g);
        LocalJet {
            u: u.to_vec(),
            layout,
            x,
            e,
            g,
            g_inv,
        }
    }

    pub fn n(&self) -> usize {
        self.e.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    pub fn constant(&self, v: f64) -> Taylor {
        Taylor::constant(&self.layout, v)
    }

    /// The Taylor variable of axis `i`.
    pub fn variable(&self, i: usize) -> Taylor {
        Taylor::variable(&self.layout, i, self.u[i])
    }

    pub fn variables(&self) -> Vec<Taylor> {
        (0..self.n()).map(|i| self.variable(i)).collect()
    }

    /// `∂ᵢ∂ⱼx`.
    pub fn second(&self, i: usize, j: usize) -> Vec<Taylor> {
        self.e[j].iter().map(|c| c.deriv(i)).collect()
    }

    /// `√det g`.
    pub fn volume_density(&self) -> Taylor {
        let n = self.n();
        // Cholesky in Taylor arithmetic; det = Π L_ii².
        let mut l: Vec<Vec<Taylor>> = vec![vec![self.constant(0.0); n]; n];
        let mut det_sqrt = self.constant(1.0);
        for j in 0..n {
            let mut d = self.g[j][j].clone();
            for k in 0..j {
                d = &d - &(&l[j][k] * &l[j][k]);
            }
            let djj = d.sqrt();
            let inv = djj.recip();
            for i in (j + 1)..n {
                let mut s = self.g[i][j].clone();
                for k in 0..j {
                    s = &s - &(&l[i][k] * &l[j][k]);
                }
                l[i][j] = &s * &inv;
            }
            det_sqrt = &det_sqrt * &djj;
            l[j][j] = djj;
        }
        det_sqrt
    }

    /// Components `g^{ij} <v, e_j>` of the tangential part of `v`.
    pub fn tangent_coords(&self, v: &[Taylor]) -> Vec<Taylor> {
        let n = self.n();
        let proj: Vec<Taylor> = (0..n).map(|j| dot(v, &self.e[j])).collect();
        (0..n)
            .map(|i| {
                let mut acc = self.constant(0.0);
                for j in 0..n {
                    acc = acc + &self.g_inv[i][j] * &proj[j];
                }
                acc
            })
            .collect()
    }

    pub fn tangent_part(&self, v: &[Taylor]) -> Vec<Taylor> {
        let coords = self.tangent_coords(v);
        taylor::combine(&coords, &self.e)
    }

    pub fn normal_part(&self, v: &[Taylor]) -> Vec<Taylor> {
        let t = self.tangent_part(v);
        v.iter().zip(&t).map(|(a, b)| a - b).collect()
    }

    /// Intrinsic gradient `g^{ij} ∂ⱼf e_i` as an ambient vector.
    pub fn gradient(&self, f: &Taylor) -> Vec<Taylor> {
        let n = self.n();
        let df: Vec<Taylor> = (0..n).map(|j| f.deriv(j)).collect();
        let coords: Vec<Taylor> = (0..n)
            .map(|i| {
                let mut acc = self.constant(0.0);
                for j in 0..n {
                    acc = acc + &self.g_inv[i][j] * &df[j];
                }
                acc
            })
            .collect();
        taylor::combine(&coords, &self.e)
    }

    /// `⟨∇u, ∇v⟩ = g^{ij} ∂ᵢu ∂ⱼv`.
    pub fn gradient_dot(&self, u: &Taylor, v: &Taylor) -> Taylor {
        let n = self.n();
        let mut acc = self.constant(0.0);
        for i in 0..n {
            let du = u.deriv(i);
            for j in 0..n {
                acc = acc + &(&self.g_inv[i][j] * &du) * &v.deriv(j);
            }
        }
        acc
    }

    /// Christoffel symbols `Γ^k_ij = g^{kl} <∂ᵢ∂ⱼx, e_l>`, indexed `[k][i][j]`.
    pub fn christoffel(&self) -> Vec<Vec<Vec<Taylor>>> {
        let n = self.n();
        let mut lowered = vec![vec![vec![self.constant(0.0); n]; n]; n];
        for i in 0..n {
            for j in i..n {
                let xij = self.second(i, j);
                for l in 0..n {
                    let v = dot(&xij, &self.e[l]);
                    lowered[l][i][j] = v.clone();
                    lowered[l][j][i] = v;
                }
            }
        }
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let mut acc = self.constant(0.0);
                                for l in 0..n {
                                    acc = acc + &self.g_inv[k][l] * &lowered[l][i][j];
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// Laplace–Beltrami `Δf = g^{ij}(∂ᵢ∂ⱼf - Γ^k_ij ∂_k f)`.
    pub fn laplacian(&self, f: &Taylor) -> Taylor {
        let n = self.n();
        let gamma = self.christoffel();
        let df: Vec<Taylor> = (0..n).map(|k| f.deriv(k)).collect();
        let mut acc = self.constant(0.0);
        for i in 0..n {
            for j in 0..n {
                let mut hess = df[j].deriv(i);
                for k in 0..n {
                    hess = &hess - &(&gamma[k][i][j] * &df[k]);
                }
                acc = acc + &self.g_inv[i][j] * &hess;
            }
        }
        acc
    }

    /// Drifted Laplacian `𝓛f = Δf - ½<x, ∇f>`.
    pub fn drift_laplacian(&self, f: &Taylor) -> Taylor {
        let grad = self.gradient(f);
        &self.laplacian(f) - &dot(&self.x, &grad).scale(0.5)
    }

    /// Mean curvature vector `H = g^{ij} (∂ᵢ∂ⱼx)⊥`.
    pub fn mean_curvature(&self) -> Vec<Taylor> {
        let n = self.n();
        let dim = self.ambient_dim();
        let mut trace = vec![self.constant(0.0); dim];
        for i in 0..n {
            for j in 0..n {
                let xij = self.second(i, j);
                for a in 0..dim {
                    trace[a] = &trace[a] + &(&self.g_inv[i][j] * &xij[a]);
                }
            }
        }
        self.normal_part(&trace)
    }

    /// Gram–Schmidt orthonormalization of `e_1, …, e_n` in index order.
    pub fn orthonormal_tangent(&self) -> Vec<Vec<Taylor>> {
        let mut out: Vec<Vec<Taylor>> = Vec::with_capacity(self.n());
        for ei in &self.e {
            let mut r = ei.clone();
            for q in &out {
                let c = dot(&r, q);
                r = r.iter().zip(q).map(|(a, b)| a - &(&c * b)).collect();
            }
            let inv = dot(&r, &r).sqrt().recip();
            out.push(r.iter().map(|a| a * &inv).collect());
        }
        out
    }

    /// Orthonormal normal frame.
    ///
    /// Candidates are `Jẽ_1, …, Jẽ_n` followed by the ambient basis; each is
    /// projected off the tangent space and the accepted normals and kept
    /// when at least half of its length survives. On Lagrangian charts this
    /// returns exactly `ν_{n+i} = Jẽ_i`.
    pub fn normal_frame(&self) -> Vec<Vec<Taylor>> {
        let tangent = self.orthonormal_tangent();
        let dim = self.ambient_dim();
        let n = self.n();
        let mut candidates: Vec<Vec<Taylor>> =
            tangent.iter().map(|t| apply_j_taylor(t)).collect();
        for a in 0..dim {
            candidates.push(
                (0..dim)
                    .map(|b| self.constant(if a == b { 1.0 } else { 0.0 }))
                    .collect(),
            );
        }
        let mut normals: Vec<Vec<Taylor>> = Vec::with_capacity(dim - n);
        for c in candidates {
            if normals.len() == dim - n {
                break;
            }
            let mut r = c;
            for q in tangent.iter().chain(normals.iter()) {
                let coef = dot(&r, q);
                r = r.iter().zip(q).map(|(a, b)| a - &(&coef * b)).collect();
            }
            let len2 = dot(&r, &r);
            if len2.value() < 0.25 {
                continue;
            }
            let inv = len2.sqrt().recip();
            normals.push(r.iter().map(|a| a * &inv).collect());
        }
        normals
    }
}
