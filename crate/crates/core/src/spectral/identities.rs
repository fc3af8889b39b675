use rand::Rng;

use crate::geometry::LocalJet;
use crate::measure::QuadratureGrid;
use crate::potential::{CoordinatePolynomial, Potential};
use crate::taylor::dot;
use crate::tolerances;

/// One row of an identity table.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Residual {
    pub fn new(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Residual {
            name: name.into(),
            value,
            tol,
            pass: value <= tol,
        }
    }
}

/// `𝓛f` at every node, from the analytic jet of `f`.
pub fn drift_laplacian_apply(jets: &[LocalJet], potential: &dyn Potential) -> Vec<f64> {
    jets.iter()
        .map(|j| j.drift_laplacian(&potential.at(j)).value())
        .collect()
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Pointwise scalar identities of shrinkers plus the weak self-adjointness
/// of `𝓛` on `pairs` random polynomial pairs.
pub fn scalar_identity_suite<R: Rng + ?Sized>(
    grid: &QuadratureGrid,
    pairs: usize,
    rng: &mut R,
) -> Vec<Residual> {
    let jets = grid.jets(2);
    let dim = grid.chart().ambient_dim();
    let n = grid.chart().n() as f64;
    let mut out = Vec::new();

    let mut coord = 0.0f64;
    for a in 0..dim {
        let xa = CoordinatePolynomial::coordinate(dim, a, 1.0);
        let lx = drift_laplacian_apply(&jets, &xa);
        coord = coord.max(max_abs(
            lx.iter().zip(&jets).map(|(l, j)| l + 0.5 * j.x[a].value()),
        ));
    }
    out.push(Residual::new("drift_laplacian_coordinates", coord, tolerances::IDENTITY));

    let r2 = CoordinatePolynomial::norm_squared(dim);
    let frames = grid.frames();
    let lap = max_abs(jets.iter().zip(frames).map(|(j, f)| {
        let perp2: f64 = f.x_perp.iter().map(|c| c * c).sum();
        j.laplacian(&r2.at(j)).value() - (2.0 * n - perp2)
    }));
    out.push(Residual::new("laplacian_norm_squared", lap, tolerances::IDENTITY));

    let drift = max_abs(jets.iter().map(|j| {
        let x2 = dot(&j.x, &j.x).value();
        j.drift_laplacian(&r2.at(j)).value() - (2.0 * n - x2)
    }));
    out.push(Residual::new("drift_laplacian_norm_squared", drift, tolerances::IDENTITY));

    let w = grid.weights();
    let mut adj = 0.0f64;
    for _ in 0..pairs {
        let u = CoordinatePolynomial::random(dim, 4, rng);
        let v = CoordinatePolynomial::random(dim, 4, rng);
        let s: f64 = jets
            .iter()
            .zip(w)
            .map(|(j, wq)| {
                let ut = u.at(j);
                let vt = v.at(j);
                wq * (ut.value() * j.drift_laplacian(&vt).value() + j.gradient_dot(&ut, &vt).value())
            })
            .sum();
        adj = adj.max(s.abs());
    }
    out.push(Residual::new("self_adjointness", adj, tolerances::SELF_ADJOINT));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_shape;
    use crate::measure::build_grid;
    use crate::potential::ParametricPotential;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coordinate_is_an_eigenfunction_on_torus() {
        let c = make_shape("clifford-torus", 2, 2).unwrap();
        let g = build_grid(&c, &[16, 16]).unwrap();
        let jets = g.jets(2);
        let lx = drift_laplacian_apply(&jets, &CoordinatePolynomial::coordinate(4, 0, 1.0));
        for (l, f) in lx.iter().zip(g.frames()) {
            assert!((l + 0.5 * f.x[0]).abs() < 1e-12);
        }
        let one = drift_laplacian_apply(&jets, &CoordinatePolynomial::constant(4, 1.0));
        assert!(one.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cos_two_theta_on_circle() {
        // On S¹(√2) the arc length is √2θ, so 𝓛 cos 2θ = -(4/2) cos 2θ.
        let c = make_shape("circle-product", 1, 1).unwrap();
        let g = build_grid(&c, &[12]).unwrap();
        let l = drift_laplacian_apply(&g.jets(2), &ParametricPotential::cos(0, 2.0));
        for (v, u) in l.iter().zip(g.nodes()) {
            assert!((v + 2.0 * (2.0 * u[0]).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn suite_passes_on_plane_and_cylinder() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (name, k, res) in [("plane", 0, [24, 24]), ("cylinder", 1, [32, 32])] {
            let c = make_shape(name, 2, k).unwrap();
            let g = build_grid(&c, &res).unwrap();
            for r in scalar_identity_suite(&g, 3, &mut rng) {
                assert!(r.pass, "{name} {}: {}", r.name, r.value);
            }
        }
    }
}
