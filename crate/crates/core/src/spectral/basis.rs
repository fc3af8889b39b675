use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{AxisKind, AxisSpec};
use crate::measure::QuadratureGrid;

/// Truncation of the tensor-product Galerkin basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    /// Fourier modes `1, cos kθ, sin kθ` for `k ≤ fourier` on periodic axes.
    pub fourier: usize,
    /// Hermite polynomials `H_k`, `k ≤ hermite`, on line axes.
    pub hermite: usize,
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec {
            fourier: 6,
            hermite: 8,
        }
    }
}

impl BasisSpec {
    pub fn validate(&self) -> Result<()> {
        if self.fourier < 2 || self.hermite < 2 {
            return Err(Error::InvalidArgument(format!(
                "basis truncation K = {}, M = {} must both be at least 2",
                self.fourier, self.hermite
            )));
        }
        Ok(())
    }

    pub fn axis_size(&self, axis: &AxisSpec) -> usize {
        match axis.kind {
            AxisKind::Periodic { .. } => 2 * self.fourier + 1,
            AxisKind::Line => self.hermite + 1,
        }
    }

    /// Minimal quadrature resolution on an axis for exact mass and stiffness.
    pub fn required_resolution(&self, axis: &AxisSpec) -> usize {
        match axis.kind {
            AxisKind::Periodic { .. } => 2 * self.fourier + 1,
            AxisKind::Line => 2 * self.hermite,
        }
    }
}

/// Hermite polynomials for the weight `e^{-t²/4}`:
/// `H₀ = 1, H₁ = t, H_{k+1} = t H_k - 2k H_{k-1}`.
pub fn hermite(k_max: usize, t: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(k_max + 1);
    h.push(1.0);
    if k_max >= 1 {
        h.push(t);
    }
    for k in 1..k_max {
        h.push(t * h[k] - 2.0 * k as f64 * h[k - 1]);
    }
    h
}

/// One-dimensional basis functions and parameter derivatives on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisMode {
    Constant,
    Cos(usize),
    Sin(usize),
    Hermite(usize),
}

impl AxisMode {
    pub fn label(&self) -> String {
        match self {
            AxisMode::Constant => "1".to_string(),
            AxisMode::Cos(k) => format!("cos{k}"),
            AxisMode::Sin(k) => format!("sin{k}"),
            AxisMode::Hermite(k) => format!("H{k}"),
        }
    }
}

fn axis_modes(spec: &BasisSpec, axis: &AxisSpec) -> Vec<AxisMode> {
    match axis.kind {
        AxisKind::Periodic { .. } => {
            let mut m = vec![AxisMode::Constant];
            for k in 1..=spec.fourier {
                m.push(AxisMode::Cos(k));
                m.push(AxisMode::Sin(k));
            }
            m
        }
        AxisKind::Line => (0..=spec.hermite).map(AxisMode::Hermite).collect(),
    }
}

/// Value and derivative of a (normalized) axis mode at parameter `u`.
fn eval_mode(mode: AxisMode, axis: &AxisSpec, u: f64) -> (f64, f64) {
    match (mode, axis.kind) {
        (AxisMode::Constant, _) => (1.0, 0.0),
        (AxisMode::Cos(k), AxisKind::Periodic { period }) => {
            let w = TAU * k as f64 / period;
            ((w * u).cos(), -w * (w * u).sin())
        }
        (AxisMode::Sin(k), AxisKind::Periodic { period }) => {
            let w = TAU * k as f64 / period;
            ((w * u).sin(), w * (w * u).cos())
        }
        (AxisMode::Hermite(k), _) => {
            let h = hermite(k, u);
            // ‖H_k‖² = 2^k k! √(4π) under e^{-t²/4}; drop the common √(4π).
            let norm = (2f64.powi(k as i32) * (1..=k).map(|j| j as f64).product::<f64>()).sqrt();
            let dh = if k == 0 { 0.0 } else { k as f64 * h[k - 1] };
            (h[k] / norm, dh / norm)
        }
        _ => unreachable!("trigonometric mode on a line axis"),
    }
}

/// Tensor-product basis tabulated at the nodes of a grid.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    pub spec: BasisSpec,
    /// Per basis function, the mode of every axis.
    pub modes: Vec<Vec<AxisMode>>,
    /// `values[(q, a)] = φ_a(u_q)`.
    pub values: DMatrix<f64>,
    /// `derivatives[i][(q, a)] = ∂ᵢφ_a(u_q)`.
    pub derivatives: Vec<DMatrix<f64>>,
}

impl TensorBasis {
    pub fn tabulate(grid: &QuadratureGrid, spec: BasisSpec) -> Result<Self> {
        spec.validate()?;
        let chart = grid.chart();
        let n = chart.n();
        for (d, axis) in chart.axes().iter().enumerate() {
            let required = spec.required_resolution(axis);
            if grid.resolution()[d] < required {
                return Err(Error::Aliasing {
                    axis: d,
                    resolution: grid.resolution()[d],
                    required,
                });
            }
        }
        let per_axis: Vec<Vec<AxisMode>> =
            chart.axes().iter().map(|a| axis_modes(&spec, a)).collect();
        let mut modes: Vec<Vec<AxisMode>> = vec![Vec::new()];
        for m in &per_axis {
            let mut next = Vec::with_capacity(modes.len() * m.len());
            for prefix in &modes {
                for &mode in m {
                    let mut p = prefix.clone();
                    p.push(mode);
                    next.push(p);
                }
            }
            modes = next;
        }

        // 1-D tables: axis → (node index, mode index) → (value, derivative).
        let tables: Vec<Vec<Vec<(f64, f64)>>> = chart
            .axes()
            .iter()
            .enumerate()
            .map(|(d, axis)| {
                grid.axis_nodes(d)
                    .iter()
                    .map(|&u| per_axis[d].iter().map(|&m| eval_mode(m, axis, u)).collect())
                    .collect()
            })
            .collect();
        let mode_index: Vec<Vec<usize>> = modes
            .iter()
            .map(|ms| {
                ms.iter()
                    .enumerate()
                    .map(|(d, m)| per_axis[d].iter().position(|x| x == m).unwrap())
                    .collect()
            })
            .collect();

        let size = modes.len();
        let nodes = grid.len();
        let mut values = DMatrix::<f64>::zeros(nodes, size);
        let mut derivatives = vec![DMatrix::<f64>::zeros(nodes, size); n];
        for q in 0..nodes {
            let mi = grid.multi_index(q);
            for (a, idx) in mode_index.iter().enumerate() {
                let entries: Vec<(f64, f64)> =
                    (0..n).map(|d| tables[d][mi[d]][idx[d]]).collect();
                values[(q, a)] = entries.iter().map(|e| e.0).product();
                for (i, der) in derivatives.iter_mut().enumerate() {
                    der[(q, a)] = entries
                        .iter()
                        .enumerate()
                        .map(|(d, e)| if d == i { e.1 } else { e.0 })
                        .product();
                }
            }
        }
        Ok(TensorBasis {
            spec,
            modes,
            values,
            derivatives,
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn label(&self, a: usize) -> String {
        self.modes[a]
            .iter()
            .map(AxisMode::label)
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Node samples of `Σ_a c_a φ_a`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let c = nalgebra::DVector::from_column_slice(coeffs);
        (&self.values * c).iter().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_recurrence_matches_closed_forms() {
        let t = 0.7;
        let h = hermite(4, t);
        assert_eq!(h[0], 1.0);
        assert_eq!(h[1], t);
        assert!((h[2] - (t * t - 2.0)).abs() < 1e-15);
        assert!((h[3] - (t.powi(3) - 6.0 * t)).abs() < 1e-14);
        assert!((h[4] - (t.powi(4) - 12.0 * t * t + 12.0)).abs() < 1e-13);
    }

    #[test]
    fn hermite_rodrigues_form() {
        // H_k(t) = (-1)^k e^{t²/4} d^k/dt^k e^{-t²/4}; check k = 3 by
        // differentiating the Gaussian by hand: d³/dt³ e^{-t²/4} =
        // (-t³/8 + 3t/4) e^{-t²/4}.
        let t: f64 = -1.3;
        let rodrigues = -(-t.powi(3) / 8.0 + 3.0 * t / 4.0);
        // H_3 in the recurrence normalization carries a factor 2^3 relative
        // to the Rodrigues form with the 1/4 exponent.
        assert!((hermite(3, t)[3] - 8.0 * rodrigues).abs() < 1e-13);
    }

    #[test]
    fn spec_validation() {
        assert!(BasisSpec { fourier: 1, hermite: 4 }.validate().is_err());
        assert!(BasisSpec::default().validate().is_ok());
    }
}
