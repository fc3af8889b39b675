//! Gaussian-weighted integration over charts.
//!
//! The bracket `[f] = (4π)^{-n/2} ∫_Σ f e^{-|x|²/4} dμ` is realized by a
//! tensor-product rule: trapezoid on periodic axes, Gauss–Hermite on line
//! axes under `t = 2s`, so the factor `e^{-t²/4}` of the parameter is
//! integrated exactly and only the remainder `e^{-(|x|² - Σt²)/4}` is
//! sampled.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{frame_at, AxisKind, Chart, FramePoint, LocalJet};
use crate::quadrature;
use crate::tolerances;

/// Nodes per periodic axis when no resolution is given.
pub const DEFAULT_PERIODIC_NODES: usize = 64;
/// Nodes per line axis when no resolution is given.
pub const DEFAULT_LINE_NODES: usize = 48;
/// Smallest accepted resolution per axis.
pub const MIN_NODES: usize = 4;

/// Variation of the center and scale: `x₀' = y`, `t₀' = h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationDilation {
    pub h: f64,
    pub y: Vec<f64>,
}

impl TranslationDilation {
    pub fn zero(ambient_dim: usize) -> Self {
        TranslationDilation {
            h: 0.0,
            y: vec![0.0; ambient_dim],
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    chart: Chart,
    resolution: Vec<usize>,
    axis_nodes: Vec<Vec<f64>>,
    nodes: Vec<Vec<f64>>,
    multi_index: Vec<Vec<usize>>,
    base_weights: Vec<f64>,
    line_sq: Vec<f64>,
    frames: Vec<FramePoint>,
    weights: Vec<f64>,
}

/// Default per-axis resolution for a chart.
pub fn default_resolution(chart: &Chart) -> Vec<usize> {
    chart
        .axes()
        .iter()
        .map(|a| {
            if a.is_periodic() {
                DEFAULT_PERIODIC_NODES
            } else {
                DEFAULT_LINE_NODES
            }
        })
        .collect()
}

/// Builds the tensor-product quadrature grid of a chart.
pub fn build_grid(chart: &Chart, resolution: &[usize]) -> Result<QuadratureGrid> {
    let n = chart.n();
    if resolution.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: resolution.len(),
        });
    }
    if let Some(&bad) = resolution.iter().find(|&&r| r < MIN_NODES) {
        return Err(Error::InvalidArgument(format!(
            "resolution {bad} below minimum {MIN_NODES}"
        )));
    }

    let mut axis_nodes = Vec::with_capacity(n);
    let mut axis_weights = Vec::with_capacity(n);
    for (axis, &count) in chart.axes().iter().zip(resolution) {
        match axis.kind {
            AxisKind::Periodic { period } => {
                let (x, w) = quadrature::periodic_trapezoid(count, period);
                axis_nodes.push(x);
                axis_weights.push(w);
            }
            AxisKind::Line => {
                let (s, w) = quadrature::gauss_hermite(count);
                axis_nodes.push(s.iter().map(|v| 2.0 * v).collect());
                axis_weights.push(w.iter().map(|v| 2.0 * v).collect());
            }
        }
    }

    let mut multi_index: Vec<Vec<usize>> = vec![Vec::new()];
    for &count in resolution {
        let mut next = Vec::with_capacity(multi_index.len() * count);
        for m in &multi_index {
            for k in 0..count {
                let mut mm = m.clone();
                mm.push(k);
                next.push(mm);
            }
        }
        multi_index = next;
    }

    let nodes: Vec<Vec<f64>> = multi_index
        .iter()
        .map(|m| m.iter().enumerate().map(|(d, &k)| axis_nodes[d][k]).collect())
        .collect();
    let base_weights: Vec<f64> = multi_index
        .iter()
        .map(|m| m.iter().enumerate().map(|(d, &k)| axis_weights[d][k]).product())
        .collect();
    let line_sq: Vec<f64> = nodes
        .iter()
        .map(|u| {
            u.iter()
                .zip(chart.axes())
                .filter(|(_, a)| !a.is_periodic())
                .map(|(v, _)| v * v)
                .sum()
        })
        .collect();

    let frames: Vec<FramePoint> = nodes
        .par_iter()
        .map(|u| frame_at(chart, u))
        .collect::<Result<_>>()?;

    let mut grid = QuadratureGrid {
        chart: chart.clone(),
        resolution: resolution.to_vec(),
        axis_nodes,
        nodes,
        multi_index,
        base_weights,
        line_sq,
        frames,
        weights: Vec::new(),
    };
    let zero = vec![0.0; chart.ambient_dim()];
    grid.weights = (0..grid.len())
        .map(|q| grid.gaussian_weight(q, &zero, 1.0))
        .collect();
    if let Some((node, &weight)) = grid
        .weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(**w > 0.0))
    {
        return Err(Error::NonPositiveWeight { node, weight });
    }
    Ok(grid)
}

impl QuadratureGrid {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    /// Parameter values of axis `d`.
    pub fn axis_nodes(&self, d: usize) -> &[f64] {
        &self.axis_nodes[d]
    }

    /// Per-axis node indices of node `q`.
    pub fn multi_index(&self, q: usize) -> &[usize] {
        &self.multi_index[q]
    }

    pub fn frames(&self) -> &[FramePoint] {
        &self.frames
    }

    /// Taylor jets of the chart at every node, exact through `order`.
    pub fn jets(&self, order: usize) -> Vec<LocalJet> {
        self.nodes
            .par_iter()
            .map(|u| LocalJet::new(&self.chart, u, order))
            .collect()
    }

    /// Combined weights realizing `[·]`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of node `q` for `(4πt₀)^{-n/2} ∫ · e^{-|x-x₀|²/(4t₀)} dμ`.
    pub fn gaussian_weight(&self, q: usize, x0: &[f64], t0: f64) -> f64 {
        let f = &self.frames[q];
        self.deformed_weight(q, &f.x, f.sqrt_det_g, x0, t0)
    }

    fn deformed_weight(&self, q: usize, x: &[f64], sqrt_det_g: f64, x0: &[f64], t0: f64) -> f64 {
        let n = self.chart.n() as f64;
        let d2: f64 = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
        let exponent = self.line_sq[q] / 4.0 - d2 / (4.0 * t0);
        self.base_weights[q] * sqrt_det_g * exponent.exp() * (4.0 * PI * t0).powf(-n / 2.0)
    }

    /// `(4πt₀)^{-n/2} ∫ e^{-|x-x₀|²/(4t₀)}` for the immersion whose positions
    /// and coordinate tangent vectors at the grid nodes are supplied.
    pub fn f_functional_deformed(
        &self,
        positions: &[Vec<f64>],
        tangents: &[Vec<Vec<f64>>],
        x0: &[f64],
        t0: f64,
    ) -> Result<f64> {
        if t0 <= 0.0 {
            return Err(Error::InvalidArgument(format!("t0 = {t0} must be positive")));
        }
        if positions.len() != self.len() || tangents.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: positions.len().min(tangents.len()),
            });
        }
        let mut total = 0.0;
        for q in 0..self.len() {
            let e = &tangents[q];
            let n = e.len();
            let g = nalgebra::DMatrix::from_fn(n, n, |i, j| {
                e[i].iter().zip(&e[j]).map(|(a, b)| a * b).sum::<f64>()
            });
            let det = g.determinant();
            if !(det > 0.0) {
                return Err(Error::DegenerateMetric {
                    u: self.nodes[q].clone(),
                    condition: f64::INFINITY,
                });
            }
            total += self.deformed_weight(q, &positions[q], det.sqrt(), x0, t0);
        }
        Ok(total)
    }
}

/// `[f] = Σ_q w_q f(u_q)`.
pub fn bracket(grid: &QuadratureGrid, samples: &[f64]) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: samples.len(),
        });
    }
    Ok(grid.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
}

/// `F_{x₀,t₀}(Σ)`.
pub fn f_functional(grid: &QuadratureGrid, x0: &[f64], t0: f64) -> Result<f64> {
    if t0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("t0 = {t0} must be positive")));
    }
    if x0.len() != grid.chart.ambient_dim() {
        return Err(Error::LengthMismatch {
            expected: grid.chart.ambient_dim(),
            got: x0.len(),
        });
    }
    Ok((0..grid.len()).map(|q| grid.gaussian_weight(q, x0, t0)).sum())
}

/// Checks that every sample is normal to the chart within tolerance.
pub fn check_normal(grid: &QuadratureGrid, field: &[Vec<f64>]) -> Result<()> {
    if field.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: field.len(),
        });
    }
    for (node, (v, f)) in field.iter().zip(&grid.frames).enumerate() {
        let t = f.tangent_part(v);
        let dev = t.iter().map(|c| c * c).sum::<f64>().sqrt();
        let scale = v.iter().map(|c| c * c).sum::<f64>().sqrt().max(1.0);
        if dev > tolerances::NORMALITY * scale {
            return Err(Error::NonNormalField {
                node,
                deviation: dev,
            });
        }
    }
    Ok(())
}

/// First variation of `F_{x_s,t_s}(Σ_s)` for a normal field `V` (node
/// samples) and center/scale velocities `(y, h)`.
pub fn first_variation(
    grid: &QuadratureGrid,
    field: &[Vec<f64>],
    motion: &TranslationDilation,
    x0: &[f64],
    t0: f64,
) -> Result<f64> {
    if t0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("t0 = {t0} must be positive")));
    }
    check_normal(grid, field)?;
    let n = grid.chart.n() as f64;
    let mut total = 0.0;
    for (q, (f, v)) in grid.frames.iter().zip(field).enumerate() {
        let d: Vec<f64> = f.x.iter().zip(x0).map(|(a, b)| a - b).collect();
        let d_perp = f.normal_part(&d);
        let d2: f64 = d.iter().map(|c| c * c).sum();
        let normal_term: f64 = f
            .mean_curvature
            .iter()
            .zip(&d_perp)
            .zip(v)
            .map(|((h, p), vv)| (h + p / (2.0 * t0)) * vv)
            .sum();
        let dilation = motion.h * (d2 / (4.0 * t0 * t0) - n / (2.0 * t0));
        let translation: f64 =
            d.iter().zip(&motion.y).map(|(a, b)| a * b).sum::<f64>() / (2.0 * t0);
        total += grid.gaussian_weight(q, x0, t0) * (normal_term + dilation + translation);
    }
    Ok(total)
}
