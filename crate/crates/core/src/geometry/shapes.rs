use std::f64::consts::{SQRT_2, TAU};
use std::sync::Arc;

use super::{AxisSpec, Chart, HarmonicField, Parametrization};
use crate::error::{Error, Result};
use crate::taylor::Taylor;

/// Radius of the circle factor of every built-in self-shrinker.
pub const SHRINKER_RADIUS: f64 = SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Plane,
    CircleProduct,
    CliffordTorus,
    Cylinder,
}

impl ShapeKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "plane" => Ok(ShapeKind::Plane),
            "circle-product" => Ok(ShapeKind::CircleProduct),
            "clifford-torus" => Ok(ShapeKind::CliffordTorus),
            "cylinder" => Ok(ShapeKind::Cylinder),
            other => Err(Error::UnknownShape(other.to_string())),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            ShapeKind::Plane => "plane",
            ShapeKind::CircleProduct => "circle-product",
            ShapeKind::CliffordTorus => "clifford-torus",
            ShapeKind::Cylinder => "cylinder",
        }
    }

    /// Number of circle factors used when none is requested explicitly.
    pub fn default_k(self, n: usize) -> usize {
        match self {
            ShapeKind::Plane => 0,
            ShapeKind::CircleProduct | ShapeKind::CliffordTorus => n,
            ShapeKind::Cylinder => 1,
        }
    }

    fn accepts(self, n: usize, k: usize) -> bool {
        n >= 1
            && k <= n
            && match self {
                ShapeKind::Plane => k == 0,
                ShapeKind::CircleProduct => true,
                ShapeKind::CliffordTorus => k == n,
                ShapeKind::Cylinder => k >= 1 && k < n,
            }
    }
}

/// `S¹(r)^k × R^{n-k} ⊂ C^n`: circle factor `i` lives in the `i`-th complex
/// line as `(r cos θ, r sin θ)`, line factor `j` as `(t, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductShape {
    pub n: usize,
    pub k: usize,
    pub radius: f64,
}

impl Parametrization for ProductShape {
    fn ambient_dim(&self) -> usize {
        2 * self.n
    }

    fn position(&self, u: &[Taylor]) -> Vec<Taylor> {
        let layout = u[0].layout();
        let mut x = Vec::with_capacity(2 * self.n);
        for (i, ui) in u.iter().enumerate() {
            if i < self.k {
                x.push(ui.cos().scale(self.radius));
                x.push(ui.sin().scale(self.radius));
            } else {
                x.push(ui.clone());
                x.push(Taylor::zero(layout));
            }
        }
        x
    }
}

impl ProductShape {
    pub fn chart(self, name: impl Into<String>) -> Chart {
        let axes = (0..self.n)
            .map(|i| {
                if i < self.k {
                    AxisSpec::periodic(TAU, format!("theta{}", i + 1))
                } else {
                    AxisSpec::line(format!("t{}", i + 1))
                }
            })
            .collect();
        let harmonic = (0..self.k)
            .map(|i| HarmonicField {
                normal_index: i,
                label: format!("nu{}", self.n + i + 1),
            })
            .collect();
        Chart::new(name, axes, Arc::new(self), harmonic)
    }
}

/// Builds a registered shape with circle radius `√2`.
pub fn make_shape(name: &str, n: usize, k: usize) -> Result<Chart> {
    let kind = ShapeKind::parse(name)?;
    if !kind.accepts(n, k) {
        return Err(Error::ShapeParams {
            shape: name.to_string(),
            n,
            k,
        });
    }
    Ok(ProductShape {
        n,
        k,
        radius: SHRINKER_RADIUS,
    }
    .chart(kind.id()))
}

#[derive(Debug, Clone, Copy)]
struct Graph;

impl Parametrization for Graph {
    fn ambient_dim(&self) -> usize {
        4
    }

    fn position(&self, u: &[Taylor]) -> Vec<Taylor> {
        vec![
            u[0].clone(),
            u[1].clone(),
            &u[0] * &u[0],
            Taylor::zero(u[0].layout()),
        ]
    }
}

/// The non-Lagrangian graph `(u, v, u², 0)` over `R²`.
pub fn graph_chart() -> Chart {
    Chart::new(
        "graph",
        vec![AxisSpec::line("u"), AxisSpec::line("v")],
        Arc::new(Graph),
        Vec::new(),
    )
}
