use super::{frame_at, norm, AxisKind, Chart, LocalJet};
use crate::error::Result;
use crate::tolerances;

/// Half-width of the sampled window on line axes.
pub const LINE_SAMPLE_EXTENT: f64 = 6.0;

/// Tensor grid of `per_axis` points per axis: equispaced on periodic axes,
/// uniform on `[-LINE_SAMPLE_EXTENT, LINE_SAMPLE_EXTENT]` on line axes.
pub fn sample_points(chart: &Chart, per_axis: usize) -> Vec<Vec<f64>> {
    let per_axis = per_axis.max(2);
    let axes: Vec<Vec<f64>> = chart
        .axes()
        .iter()
        .map(|axis| match axis.kind {
            AxisKind::Periodic { period } => (0..per_axis)
                .map(|k| period * k as f64 / per_axis as f64)
                .collect(),
            AxisKind::Line => (0..per_axis)
                .map(|k| {
                    -LINE_SAMPLE_EXTENT
                        + 2.0 * LINE_SAMPLE_EXTENT * k as f64 / (per_axis - 1) as f64
                })
                .collect(),
        })
        .collect();
    let mut points = vec![Vec::new()];
    for values in &axes {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for &v in values {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

/// `sup |H + ½x⊥|` over the sample points.
pub fn shrinker_residual(chart: &Chart, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for u in points {
        let f = frame_at(chart, u)?;
        worst = worst.max(norm(&f.shrinker_defect()));
    }
    Ok(worst)
}

/// `max |<Je_i, e_j>|` over the sample points and coordinate tangent pairs.
pub fn lagrangian_check(chart: &Chart, points: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for u in points {
        let jet = LocalJet::new(chart, &chart.canonicalize(u), 1);
        let e: Vec<Vec<f64>> = jet.e.iter().map(|v| crate::taylor::values(v)).collect();
        for ei in &e {
            let jei = super::apply_j(ei);
            for ej in &e {
                worst = worst.max(super::dot(&jei, ej).abs());
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// Sampled `max |A|²`.
    pub max_a_squared: f64,
    /// `(ε, minimal C₀)` for every ε of the grid.
    pub table: Vec<(f64, f64)>,
    /// Smallest admissible ε with its `C₀`, as `(C₀, ε)`.
    pub fitted: Option<(f64, f64)>,
    /// `1/(16n)`.
    pub threshold: f64,
    pub pass: bool,
}

/// `{0, 1/(64n), 1/(32n), 1/(17n)}`.
pub fn default_epsilon_grid(n: usize) -> Vec<f64> {
    let n = n as f64;
    vec![0.0, 1.0 / (64.0 * n), 1.0 / (32.0 * n), 1.0 / (17.0 * n)]
}

/// Checks `|A|² ≤ C₀ + ε|x|²` on the samples for each ε of the grid.
pub fn growth_condition_check(
    chart: &Chart,
    points: &[Vec<f64>],
    epsilon_grid: &[f64],
) -> Result<GrowthReport> {
    let mut samples = Vec::with_capacity(points.len());
    for u in points {
        let f = frame_at(chart, u)?;
        samples.push((f.second_fundamental_norm2(), super::dot(&f.x, &f.x)));
    }
    let max_a_squared = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let threshold = tolerances::GROWTH_EPSILON_FACTOR / chart.n() as f64;
    let table: Vec<(f64, f64)> = epsilon_grid
        .iter()
        .map(|&eps| {
            let c0 = samples
                .iter()
                .map(|(a2, x2)| a2 - eps * x2)
                .fold(f64::NEG_INFINITY, f64::max);
            (eps, c0)
        })
        .collect();
    let fitted = table
        .iter()
        .filter(|(eps, c0)| *eps < threshold && c0.is_finite())
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|&(eps, c0)| (c0.max(0.0), eps));
    Ok(GrowthReport {
        max_a_squared,
        table,
        fitted,
        threshold,
        pass: fitted.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{graph_chart, make_shape, ProductShape};

    #[test]
    fn built_in_shrinkers_satisfy_the_equation() {
        for (name, n, k) in [("clifford-torus", 2, 2), ("cylinder", 2, 1), ("plane", 2, 0)] {
            let c = make_shape(name, n, k).unwrap();
            let r = shrinker_residual(&c, &sample_points(&c, 9)).unwrap();
            assert!(r <= 1e-12, "{name}: {r}");
        }
    }

    #[test]
    fn unit_radius_torus_is_not_a_shrinker() {
        let c = ProductShape { n: 2, k: 2, radius: 1.0 }.chart("unit-torus");
        let r = shrinker_residual(&c, &sample_points(&c, 5)).unwrap();
        // (1/r - r/2) per factor, two orthogonal factors.
        assert!((r - 0.5 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lagrangian_check_separates_graph() {
        let torus = make_shape("clifford-torus", 2, 2).unwrap();
        assert!(lagrangian_check(&torus, &sample_points(&torus, 7)) < 1e-14);
        let cyl = make_shape("cylinder", 2, 1).unwrap();
        assert!(lagrangian_check(&cyl, &sample_points(&cyl, 7)) < 1e-14);
        let g = graph_chart();
        assert!(lagrangian_check(&g, &sample_points(&g, 5)) > 0.5);
    }

    #[test]
    fn growth_of_built_ins() {
        let torus = make_shape("clifford-torus", 2, 2).unwrap();
        let r = growth_condition_check(&torus, &sample_points(&torus, 8), &default_epsilon_grid(2)).unwrap();
        assert!((r.max_a_squared - 1.0).abs() < 1e-13);
        let (c0, eps) = r.fitted.unwrap();
        assert!((c0 - 1.0).abs() < 1e-13 && eps == 0.0);
        assert!(r.pass);

        let cyl = make_shape("cylinder", 2, 1).unwrap();
        let r = growth_condition_check(&cyl, &sample_points(&cyl, 8), &default_epsilon_grid(2)).unwrap();
        assert!((r.max_a_squared - 0.5).abs() < 1e-13 && r.pass);

        let plane = make_shape("plane", 2, 0).unwrap();
        let r = growth_condition_check(&plane, &sample_points(&plane, 8), &default_epsilon_grid(2)).unwrap();
        assert_eq!(r.max_a_squared, 0.0);
    }

    #[test]
    fn epsilon_grid_stays_below_threshold() {
        for n in 1..5 {
            let t = 1.0 / (16.0 * n as f64);
            assert!(default_epsilon_grid(n).iter().all(|&e| e < t));
        }
    }
}
