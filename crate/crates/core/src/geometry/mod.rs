//! Immersed charts in `R^{2n} = C^n` and their pointwise geometry.

mod checks;
mod frame;
mod jet;
mod shapes;

use std::fmt;
use std::sync::Arc;

use crate::taylor::{Layout, Taylor};

pub use checks::{
    default_epsilon_grid, growth_condition_check, lagrangian_check, sample_points,
    shrinker_residual, GrowthReport, LINE_SAMPLE_EXTENT,
};
pub use frame::{frame_at, FramePoint};
pub use jet::LocalJet;
pub use shapes::{graph_chart, make_shape, ProductShape, ShapeKind, SHRINKER_RADIUS};

/// Kind of a parameter axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisKind {
    Periodic { period: f64 },
    Line,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub kind: AxisKind,
    pub label: String,
}

impl AxisSpec {
    pub fn periodic(period: f64, label: impl Into<String>) -> Self {
        assert!(period > 0.0, "period must be positive");
        AxisSpec {
            kind: AxisKind::Periodic { period },
            label: label.into(),
        }
    }

    pub fn line(label: impl Into<String>) -> Self {
        AxisSpec {
            kind: AxisKind::Line,
            label: label.into(),
        }
    }

    /// Length scale used for stencils: `period / 2π` or 1.
    pub fn scale(&self) -> f64 {
        match self.kind {
            AxisKind::Periodic { period } => period / std::f64::consts::TAU,
            AxisKind::Line => 1.0,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, AxisKind::Periodic { .. })
    }
}

/// A parametrized immersion evaluated in Taylor arithmetic, so every
/// derivative of the position is exact.
pub trait Parametrization: Send + Sync {
    fn ambient_dim(&self) -> usize;

    /// Position `x(u)`; `u[i]` is the Taylor variable of axis `i`.
    fn position(&self, u: &[Taylor]) -> Vec<Taylor>;
}

/// A normal field spanning a harmonic (closed, non-exact) Lagrangian direction:
/// the `normal_index`-th vector of the normal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicField {
    pub normal_index: usize,
    pub label: String,
}

#[derive(Clone)]
pub struct Chart {
    name: String,
    axes: Vec<AxisSpec>,
    map: Arc<dyn Parametrization>,
    harmonic: Vec<HarmonicField>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("axes", &self.axes)
            .field("harmonic", &self.harmonic)
            .finish()
    }
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        axes: Vec<AxisSpec>,
        map: Arc<dyn Parametrization>,
        harmonic: Vec<HarmonicField>,
    ) -> Self {
        Chart {
            name: name.into(),
            axes,
            map,
            harmonic,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Intrinsic dimension.
    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.ambient_dim()
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    pub fn harmonic_normal_basis(&self) -> &[HarmonicField] {
        &self.harmonic
    }

    pub fn has_line_axes(&self) -> bool {
        self.axes.iter().any(|a| !a.is_periodic())
    }

    /// Reduces periodic coordinates into `[0, period)`.
    pub fn canonicalize(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.axes)
            .map(|(&v, axis)| match axis.kind {
                AxisKind::Periodic { period } => {
                    let r = v.rem_euclid(period);
                    if r >= period {
                        0.0
                    } else {
                        r
                    }
                }
                AxisKind::Line => v,
            })
            .collect()
    }

    /// Position only.
    pub fn position(&self, u: &[f64]) -> Vec<f64> {
        let layout = Layout::shared(self.n(), 0);
        let vars: Vec<Taylor> = u.iter().map(|&v| Taylor::constant(&layout, v)).collect();
        self.map.position(&vars).iter().map(Taylor::value).collect()
    }

    /// Taylor expansion of the immersion around `u`, truncated at `order`.
    pub fn jet(&self, u: &[f64], order: usize) -> LocalJet {
        LocalJet::new(self, u, order)
    }

    pub(crate) fn map(&self) -> &dyn Parametrization {
        self.map.as_ref()
    }
}

/// The standard complex structure on `R^{2n}`: each pair `(a, b)` of
/// coordinates maps to `(-b, a)`.
pub fn apply_j(v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

/// [`apply_j`] on Taylor-valued vectors.
pub fn apply_j_taylor(v: &[Taylor]) -> Vec<Taylor> {
    let mut out = v.to_vec();
    for k in 0..v.len() / 2 {
        out[2 * k] = -&v[2 * k + 1];
        out[2 * k + 1] = v[2 * k].clone();
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn j_maps_first_basis_vector() {
        assert_eq!(apply_j(&[1.0, 0.0, 0.0, 0.0]), vec![0.0, 1.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn j_squares_to_minus_identity(v in proptest::collection::vec(-10.0f64..10.0, 6),
                                       w in proptest::collection::vec(-10.0f64..10.0, 6)) {
            let jj = apply_j(&apply_j(&v));
            for (a, b) in jj.iter().zip(&v) {
                prop_assert_eq!(*a, -*b);
            }
            let lhs = dot(&apply_j(&v), &apply_j(&w));
            prop_assert!((lhs - dot(&v, &w)).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn periodic_coordinates_are_canonicalized() {
        let chart = make_shape("cylinder", 2, 1).unwrap();
        let u = chart.canonicalize(&[-0.5, -3.0]);
        assert!((u[0] - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
        assert_eq!(u[1], -3.0);
        let u = chart.canonicalize(&[std::f64::consts::TAU * 3.0, 1.0]);
        assert!(u[0] >= 0.0 && u[0] < std::f64::consts::TAU);
    }
}
