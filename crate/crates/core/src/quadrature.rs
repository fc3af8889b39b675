//! One-dimensional quadrature rules used by tensor-product grids.

use std::f64::consts::PI;

/// Gauss–Hermite nodes and weights for `∫ f(s) e^{-s²} ds`, ascending.
///
/// Newton iteration on the orthonormal Hermite recurrence with the usual
/// asymptotic starting guesses.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    // Recurrence produces descending roots; flip to ascending.
    x.reverse();
    w.reverse();
    (x, w)
}

/// Equispaced trapezoid nodes on `[0, period)` with uniform weights.
pub fn periodic_trapezoid(n: usize, period: f64) -> (Vec<f64>, Vec<f64>) {
    let h = period / n as f64;
    ((0..n).map(|k| k as f64 * h).collect(), vec![h; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_moments_are_exact() {
        // ∫ s^{2k} e^{-s²} ds = Γ(k + 1/2)
        let (x, w) = gauss_hermite(20);
        let gamma_half = [PI.sqrt(), PI.sqrt() / 2.0, 3.0 * PI.sqrt() / 4.0, 15.0 * PI.sqrt() / 8.0];
        for (k, g) in gamma_half.iter().enumerate() {
            let q: f64 = x.iter().zip(&w).map(|(s, w)| w * s.powi(2 * k as i32)).sum();
            assert_relative_eq!(q, *g, max_relative = 1e-13);
        }
        let odd: f64 = x.iter().zip(&w).map(|(s, w)| w * s.powi(3)).sum();
        assert!(odd.abs() < 1e-13);
    }

    #[test]
    fn hermite_large_rule_is_sorted_and_positive() {
        let (x, w) = gauss_hermite(48);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(w.iter().all(|&v| v > 0.0));
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn trapezoid_integrates_trig_polynomials() {
        let (x, w) = periodic_trapezoid(16, 2.0 * PI);
        let q: f64 = x.iter().zip(&w).map(|(t, w)| w * (3.0 * t).cos().powi(2)).sum();
        assert_relative_eq!(q, PI, max_relative = 1e-14);
    }
}
