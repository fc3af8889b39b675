//! Galerkin eigenproblem for the drifted Laplacian and the
//! characterization verdict built on it.

pub mod basis;
pub mod galerkin;
pub mod identities;
pub mod span;
pub mod verdict;

pub use basis::{hermite, AxisMode, BasisSpec, TensorBasis};
pub use galerkin::{
    assemble_galerkin, cluster_values, drift_laplacian_coefficients, solve_spectrum, Cluster,
    EigResult, GalerkinMatrices,
};
pub use identities::{drift_laplacian_apply, scalar_identity_suite, Residual};
pub use span::{coordinate_span_test, subspace_angle, SpanTest};
pub use verdict::{characterization_verdict, CharacterizationVerdict, Verdict};

use crate::error::Result;
use crate::geometry::{default_epsilon_grid, growth_condition_check, GrowthReport};
use crate::measure::QuadratureGrid;

/// Everything the Hamiltonian characterization needs, computed once.
#[derive(Debug, Clone)]
pub struct SpectrumAnalysis {
    pub mats: GalerkinMatrices,
    pub eig: EigResult,
    pub span: SpanTest,
    pub growth: GrowthReport,
    pub verdict: CharacterizationVerdict,
}

/// Assembles and solves the eigenproblem, runs the coordinate span test on
/// the first nonzero cluster and the growth check on the grid nodes.
pub fn analyze_spectrum(grid: &QuadratureGrid, spec: BasisSpec, count: usize) -> Result<SpectrumAnalysis> {
    let mats = assemble_galerkin(grid, spec)?;
    let eig = solve_spectrum(&mats, count)?;
    let samples = match eig.clusters.get(1) {
        Some(c) => eig.cluster_samples(&mats.basis, c),
        None => Vec::new(),
    };
    let span = coordinate_span_test(grid, &samples);
    let chart = grid.chart();
    let growth = growth_condition_check(chart, grid.nodes(), &default_epsilon_grid(chart.n()))?;
    let verdict = characterization_verdict(&eig, &span, &growth, chart.n());
    Ok(SpectrumAnalysis {
        mats,
        eig,
        span,
        growth,
        verdict,
    })
}
