use nalgebra::DMatrix;

use crate::linalg;
use crate::measure::QuadratureGrid;
use crate::tolerances;

/// Orthonormal basis (under `Σ_q w_q f g`) of the span of the samples,
/// dropping numerically dependent directions.
pub fn weighted_orthonormal_basis(weights: &[f64], vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = vectors.len();
    if m == 0 {
        return Vec::new();
    }
    let gram = DMatrix::from_fn(m, m, |a, b| {
        weights
            .iter()
            .zip(&vectors[a])
            .zip(&vectors[b])
            .map(|((w, x), y)| w * x * y)
            .sum()
    });
    let (vals, vecs) = linalg::jacobi_eigen(&gram).expect("small Gram matrix");
    let top = vals.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for (k, &lam) in vals.iter().enumerate() {
        if top <= 0.0 || lam <= tolerances::RANK * top {
            continue;
        }
        let scale = 1.0 / lam.sqrt();
        let mut v = vec![0.0; weights.len()];
        for (a, src) in vectors.iter().enumerate() {
            let c = vecs[(a, k)] * scale;
            for (o, s) in v.iter_mut().zip(src) {
                *o += c * s;
            }
        }
        out.push(v);
    }
    // One Gram–Schmidt pass to clean up rounding.
    let mut clean: Vec<Vec<f64>> = Vec::with_capacity(out.len());
    for mut v in out {
        for q in &clean {
            let c = weighted_dot(weights, &v, q);
            for (a, b) in v.iter_mut().zip(q) {
                *a -= c * b;
            }
        }
        let nrm = weighted_dot(weights, &v, &v).sqrt();
        v.iter_mut().for_each(|a| *a /= nrm);
        clean.push(v);
    }
    clean
}

pub fn weighted_dot(weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    weights
        .iter()
        .zip(a)
        .zip(b)
        .map(|((w, x), y)| w * x * y)
        .sum()
}

/// Largest principal angle of `span(b)` relative to `span(a)` (both given
/// as weighted-orthonormal bases), computed from the residual of projecting
/// `b` onto `a` so that small angles keep full relative accuracy.
pub fn max_principal_angle(weights: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    if a.is_empty() {
        return std::f64::consts::FRAC_PI_2;
    }
    let residuals: Vec<Vec<f64>> = b
        .iter()
        .map(|v| {
            let mut r = v.clone();
            for q in a {
                let c = weighted_dot(weights, v, q);
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
            r
        })
        .collect();
    let m = residuals.len();
    let gram = DMatrix::from_fn(m, m, |i, j| weighted_dot(weights, &residuals[i], &residuals[j]));
    let (vals, _) = linalg::jacobi_eigen(&gram).expect("small Gram matrix");
    let s2 = vals.last().copied().unwrap_or(0.0).max(0.0);
    s2.sqrt().min(1.0).asin()
}

/// Largest principal angle between the spans of two sample sets.
pub fn subspace_angle(grid: &QuadratureGrid, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let w = grid.weights();
    let qa = weighted_orthonormal_basis(w, a);
    let qb = weighted_orthonormal_basis(w, b);
    let (small, large) = if qa.len() <= qb.len() { (qa, qb) } else { (qb, qa) };
    max_principal_angle(w, &large, &small)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanTest {
    pub pass: bool,
    pub max_angle: f64,
    pub eigenspace_dim: usize,
    /// Rank of the centered coordinate functions on the chart.
    pub coordinate_rank: usize,
}

/// Compares an eigenspace (node samples) with the span of the centered
/// coordinate functions `x^A - [x^A]/[1]`.
pub fn coordinate_span_test(grid: &QuadratureGrid, eigenvectors: &[Vec<f64>]) -> SpanTest {
    let w = grid.weights();
    let mass: f64 = w.iter().sum();
    let dim = grid.chart().ambient_dim();
    let coords: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            let raw: Vec<f64> = grid.frames().iter().map(|f| f.x[a]).collect();
            let mean = w.iter().zip(&raw).map(|(w, x)| w * x).sum::<f64>() / mass;
            raw.iter().map(|x| x - mean).collect()
        })
        .collect();
    let qc = weighted_orthonormal_basis(w, &coords);
    let qe = weighted_orthonormal_basis(w, eigenvectors);
    let (small, large) = if qe.len() <= qc.len() { (&qe, &qc) } else { (&qc, &qe) };
    let max_angle = max_principal_angle(w, large, small);
    SpanTest {
        pass: qc.len() == qe.len() && max_angle < tolerances::SPAN_ANGLE,
        max_angle,
        eigenspace_dim: qe.len(),
        coordinate_rank: qc.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_shape;
    use crate::measure::build_grid;

    #[test]
    fn orthogonal_function_fails_span_test() {
        let c = make_shape("clifford-torus", 2, 2).unwrap();
        let g = build_grid(&c, &[16, 16]).unwrap();
        let coords: Vec<Vec<f64>> = (0..4)
            .map(|a| g.frames().iter().map(|f| f.x[a]).collect())
            .collect();
        let ok = coordinate_span_test(&g, &coords);
        assert!(ok.pass && ok.max_angle < 1e-12);
        let mut bad = coords.clone();
        bad[3] = g.nodes().iter().map(|u| u[0].cos() * u[1].cos()).collect();
        let t = coordinate_span_test(&g, &bad);
        assert!(!t.pass);
        assert!((t.max_angle - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn plane_coordinate_rank_is_n() {
        let c = make_shape("plane", 2, 0).unwrap();
        let g = build_grid(&c, &[8, 8]).unwrap();
        let t = coordinate_span_test(&g, &[g.nodes().iter().map(|u| u[0]).collect()]);
        assert_eq!(t.coordinate_rank, 2);
        assert!(!t.pass);
    }
}
