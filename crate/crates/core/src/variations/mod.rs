//! Normal variations, the stability operator `L` and the second variation
//! of the F-functional.

mod fd;
mod fields;
mod operator;
mod second;
mod stability;

pub use fd::{fd_validate, fd_validate_with_steps, FdOrder, FdReport, DEFAULT_FD_STEPS};
pub use fields::{
    hamiltonian_field, is_lagrangian_variation, lagrangian_residual, sample_field, FrameCombination,
    HamiltonianField, MeanCurvatureField, ModulatedFrameField, NormalField, NormalPartField,
    SumField, VectorField,
};
pub use operator::{normal_stability_operator, vector_identity_suite};
pub use second::{
    optimize_translation_dilation, second_variation, second_variation_hamiltonian,
    HamiltonianExpansion, Optimum, SecondVariationReport,
};
pub use stability::{stability_verdict, Mode, StabilityOutcome, StabilityReport};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::LocalJet;
use crate::measure::QuadratureGrid;

/// Jet order needed to sample a field and its first derivatives.
pub const FIELD_ORDER: usize = 3;
/// Jet order needed to apply `L`.
pub const OPERATOR_ORDER: usize = 4;

/// A grid together with its per-node Taylor jets and the field-independent
/// brackets entering the second variation.
#[derive(Debug, Clone)]
pub struct VariationContext<'g> {
    grid: &'g QuadratureGrid,
    jets: Vec<LocalJet>,
    mass: f64,
    mean_curvature_norm2: f64,
    normal_gram: DMatrix<f64>,
}

impl<'g> VariationContext<'g> {
    pub fn new(grid: &'g QuadratureGrid, order: usize) -> Result<Self> {
        if order < FIELD_ORDER {
            return Err(Error::InvalidArgument(format!(
                "jet order {order} below the minimum {FIELD_ORDER}"
            )));
        }
        let jets = grid.jets(order);
        let w = grid.weights();
        let dim = grid.chart().ambient_dim();
        let mut mass = 0.0;
        let mut h2 = 0.0;
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        for (f, wq) in grid.frames().iter().zip(w) {
            mass += wq;
            h2 += wq * f.mean_curvature.iter().map(|c| c * c).sum::<f64>();
            for a in 0..dim {
                let mut ea = vec![0.0; dim];
                ea[a] = 1.0;
                let pa = f.normal_part(&ea);
                for b in 0..=a {
                    // <P⊥ε_a, P⊥ε_b> = (P⊥)_{ab}
                    q[(a, b)] += wq * pa[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                q[(b, a)] = q[(a, b)];
            }
        }
        Ok(VariationContext {
            grid,
            jets,
            mass,
            mean_curvature_norm2: h2,
            normal_gram: q,
        })
    }

    pub fn grid(&self) -> &'g QuadratureGrid {
        self.grid
    }

    pub fn jets(&self) -> &[LocalJet] {
        &self.jets
    }

    pub fn order(&self) -> usize {
        self.jets.first().map_or(0, |j| j.order())
    }

    /// `[1]`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `[|H|²]`.
    pub fn mean_curvature_norm2(&self) -> f64 {
        self.mean_curvature_norm2
    }

    /// `Q_AB = [<P⊥ε_A, P⊥ε_B>]`.
    pub fn normal_gram(&self) -> &DMatrix<f64> {
        &self.normal_gram
    }

    pub(crate) fn require_order(&self, needed: usize, what: &str) -> Result<()> {
        if self.order() < needed {
            return Err(Error::MissingJet(format!("{what} (jet order {} < {needed})", self.order())));
        }
        Ok(())
    }
}
