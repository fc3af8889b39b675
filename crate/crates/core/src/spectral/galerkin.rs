use nalgebra::{DMatrix, DVector};

use super::basis::{BasisSpec, TensorBasis};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::QuadratureGrid;
use crate::tolerances;

/// Weighted stiffness `S_ab = [<∇φ_a, ∇φ_b>]` and mass `B_ab = [φ_a φ_b]`.
#[derive(Debug, Clone)]
pub struct GalerkinMatrices {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub basis: TensorBasis,
    /// `max |S - Sᵀ|` before symmetrization.
    pub stiffness_asymmetry: f64,
    /// `max |B - Bᵀ|` before symmetrization.
    pub mass_asymmetry: f64,
}

pub fn assemble_galerkin(grid: &QuadratureGrid, spec: BasisSpec) -> Result<GalerkinMatrices> {
    let basis = TensorBasis::tabulate(grid, spec)?;
    let n = grid.chart().n();
    let w = grid.weights();

    let weighted = |m: &DMatrix<f64>, scale: &dyn Fn(usize) -> f64| -> DMatrix<f64> {
        let mut out = m.clone();
        for (q, mut row) in out.row_iter_mut().enumerate() {
            row *= scale(q);
        }
        out
    };

    let mass_raw = basis.values.transpose() * weighted(&basis.values, &|q| w[q]);
    let mut stiff_raw = DMatrix::<f64>::zeros(basis.len(), basis.len());
    let frames = grid.frames();
    for i in 0..n {
        for j in 0..n {
            let rhs = weighted(&basis.derivatives[j], &|q| w[q] * frames[q].g_inv[i][j]);
            stiff_raw += basis.derivatives[i].transpose() * rhs;
        }
    }
    let (mass, mass_asymmetry) = linalg::symmetrize(&mass_raw);
    let (stiffness, stiffness_asymmetry) = linalg::symmetrize(&stiff_raw);
    linalg::cholesky(&mass)?;
    Ok(GalerkinMatrices {
        stiffness,
        mass,
        basis,
        stiffness_asymmetry,
        mass_asymmetry,
    })
}

/// A distinct eigenvalue with its multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub value: f64,
    pub multiplicity: usize,
    /// Indices into [`EigResult::values`].
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EigResult {
    /// Ascending eigenvalues `μ_a` of `-𝓛`.
    pub values: Vec<f64>,
    /// `B`-orthonormal coefficient vectors as columns.
    pub vectors: DMatrix<f64>,
    pub clusters: Vec<Cluster>,
    /// `max_a ‖S c_a - μ_a B c_a‖∞`.
    pub max_residual: f64,
}

/// Groups sorted values with `|μ_a - μ_b| < CLUSTER · max(1, μ)`.
pub fn cluster_values(values: &[f64]) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    for (idx, &v) in values.iter().enumerate() {
        if let Some(last) = clusters.last_mut() {
            let anchor = values[last.members[0]];
            if (v - anchor).abs() < tolerances::CLUSTER * anchor.abs().max(1.0) {
                last.members.push(idx);
                last.multiplicity += 1;
                last.value = last.members.iter().map(|&m| values[m]).sum::<f64>()
                    / last.multiplicity as f64;
                continue;
            }
        }
        clusters.push(Cluster {
            value: v,
            multiplicity: 1,
            members: vec![idx],
        });
    }
    clusters
}

impl EigResult {
    /// Builds a result from eigenvalues alone (e.g. synthetic spectra).
    pub fn from_values(values: Vec<f64>) -> Self {
        let clusters = cluster_values(&values);
        EigResult {
            vectors: DMatrix::zeros(0, values.len()),
            values,
            clusters,
            max_residual: 0.0,
        }
    }

    /// `λ_i`: the `i`-th distinct eigenvalue (`λ₀ = 0`).
    pub fn lambda(&self, i: usize) -> Option<f64> {
        self.clusters.get(i).map(|c| c.value)
    }

    pub fn cluster_near(&self, target: f64, tol: f64) -> Option<&Cluster> {
        self.clusters.iter().find(|c| (c.value - target).abs() <= tol)
    }

    pub fn coefficients(&self, a: usize) -> Vec<f64> {
        self.vectors.column(a).iter().copied().collect()
    }

    /// Node samples of every member eigenfunction of a cluster.
    pub fn cluster_samples(&self, basis: &TensorBasis, cluster: &Cluster) -> Vec<Vec<f64>> {
        cluster
            .members
            .iter()
            .map(|&a| basis.synthesize(&self.coefficients(a)))
            .collect()
    }
}

/// Solves `S c = μ B c` and keeps the lowest `count` pairs.
pub fn solve_spectrum(mats: &GalerkinMatrices, count: usize) -> Result<EigResult> {
    let size = mats.mass.nrows();
    if count == 0 || count > size {
        return Err(Error::InvalidArgument(format!(
            "requested {count} eigenpairs from a basis of size {size}"
        )));
    }
    let (values, vectors) = linalg::generalized_eigen(&mats.stiffness, &mats.mass)?;
    let values: Vec<f64> = values.into_iter().take(count).collect();
    let vectors = vectors.columns(0, count).into_owned();
    let mut max_residual: f64 = 0.0;
    for (a, mu) in values.iter().enumerate() {
        let c: DVector<f64> = vectors.column(a).into_owned();
        let r = &mats.stiffness * &c - (&mats.mass * &c) * *mu;
        max_residual = max_residual.max(r.amax());
    }
    Ok(EigResult {
        clusters: cluster_values(&values),
        values,
        vectors,
        max_residual,
    })
}

/// Coefficients of `𝓛f` for `f = Σ c_a φ_a` in the weak sense: `-B⁻¹ S c`.
pub fn drift_laplacian_coefficients(mats: &GalerkinMatrices, coeffs: &[f64]) -> Result<Vec<f64>> {
    let c = DVector::from_column_slice(coeffs);
    let rhs = -(&mats.stiffness * c);
    let l = linalg::cholesky(&mats.mass)?;
    let y = linalg::solve_lower(&l, &DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()));
    let x = linalg::solve_upper_transposed(&l, &y);
    Ok(x.iter().copied().collect())
}
