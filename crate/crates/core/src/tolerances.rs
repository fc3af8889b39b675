//! Named numerical thresholds.
//!
//! Every comparison in the library and its tests goes through one of these
//! constants, so the acceptance suite and the CLI report the same numbers.

/// Degenerate-metric cutoff on the condition number of `g_ij`.
pub const METRIC_CONDITION_MAX: f64 = 1e8;

/// Relative parameter step for stencils, scaled by the axis length scale.
pub const STENCIL_STEP: f64 = 1e-4;

/// `sup |H + x⊥/2|` certifying the shrinker equation.
pub const SHRINKER_RESIDUAL: f64 = 1e-10;

/// `max |<Je_i, e_j>|` certifying a Lagrangian chart.
pub const LAGRANGIAN: f64 = 1e-10;

/// Tangential component allowed in a "normal" field.
pub const NORMALITY: f64 = 1e-8;

/// Lemma-type closedness residual of a Lagrangian variation.
pub const LAGRANGIAN_VARIATION: f64 = 1e-8;

/// Off-diagonal stopping threshold of the cyclic Jacobi sweeps (relative
/// to the Frobenius norm).
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-13;

/// Multiplicity clustering: `|μ_a - μ_b| < CLUSTER * max(1, μ)`.
pub const CLUSTER: f64 = 1e-6;

/// Maximal principal angle (radians) for the coordinate span test.
pub const SPAN_ANGLE: f64 = 1e-5;

/// Verdict band around `λ₁ = 1/2` and below `λ₂ = 1`.
pub const VERDICT: f64 = 1e-6;

/// Guard band (in units of [`VERDICT`]) separating a clear violation
/// from an inconclusive borderline value.
pub const VERDICT_GUARD: f64 = 10.0;

/// Pointwise residual of the scalar and vector identity suites.
pub const IDENTITY: f64 = 1e-7;

/// Weighted self-adjointness residual `|[u𝓛v] + [<∇u,∇v>]|`.
pub const SELF_ADJOINT: f64 = 1e-8;

/// Relative tolerance for eigen-expansions of potentials.
pub const EXPANSION: f64 = 1e-8;

/// "Unstable" threshold for sampled searches, in units of `[1]`.
pub const UNSTABLE: f64 = 1e-8;

/// Relative range defect that flags `b ∉ range(Q)` in the y-optimizer.
pub const RANGE_DEFECT: f64 = 1e-8;

/// Eigenvalue cutoff (relative to the largest) for numerical rank.
pub const RANK: f64 = 1e-10;

/// Growth threshold: some `ε < GROWTH_EPSILON_FACTOR / n` must work.
pub const GROWTH_EPSILON_FACTOR: f64 = 1.0 / 16.0;

/// Relative error of the first variation against finite differences.
pub const FD_FIRST_ORDER: f64 = 1e-5;

/// Relative error of the second variation against finite differences.
pub const FD_SECOND_ORDER: f64 = 1e-4;

/// Slack in the bound `λ₁ ≤ 1/2` on computed spectra.
pub const RAYLEIGH_BOUND: f64 = 1e-8;

/// `max ‖S c - μ B c‖∞` accepted from the eigensolver.
pub const EIGEN_RESIDUAL: f64 = 1e-9;
