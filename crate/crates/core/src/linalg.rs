//! Dense symmetric eigensolvers: Cholesky factorization and cyclic Jacobi.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tolerances;

const MAX_SWEEPS: usize = 100;

/// Lower-triangular `L` with `B = L Lᵀ`.
pub fn cholesky(b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = b.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = b[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `L X = M` for lower-triangular `L`.
pub fn solve_lower(l: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = m.clone();
    for c in 0..m.ncols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `Lᵀ X = M` for lower-triangular `L`.
pub fn solve_upper_transposed(l: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut x = m.clone();
    for c in 0..m.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = a.norm().max(f64::MIN_POSITIVE);

    let off_norm = |a: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };

    let mut sweep = 0;
    loop {
        let off = off_norm(&a);
        if off <= tolerances::JACOBI_OFF_DIAGONAL * frob {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: sweep, off });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                if sweep > 4 && app.abs() + 100.0 * apq.abs() == app.abs()
                    && aqq.abs() + 100.0 * apq.abs() == aqq.abs()
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Generalized symmetric-definite eigenproblem `S c = μ B c`.
///
/// Eigenvectors are returned as columns, `B`-orthonormal, eigenvalues
/// ascending.
pub fn generalized_eigen(s: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let l = cholesky(b)?;
    let y = solve_lower(&l, s);
    let c = solve_lower(&l, &y.transpose());
    let c = (&c + c.transpose()) * 0.5;
    let (values, q) = jacobi_eigen(&c)?;
    let vectors = solve_upper_transposed(&l, &q);
    Ok((values, vectors))
}

/// Symmetrized copy `(M + Mᵀ)/2` and the asymmetry `max |M - Mᵀ|`.
pub fn symmetrize(m: &DMatrix<f64>) -> (DMatrix<f64>, f64) {
    let asym = (m - m.transpose()).amax();
    ((m + m.transpose()) * 0.5, asym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &m * m.transpose() + DMatrix::identity(n, n) * (n as f64)
    }

    #[test]
    fn cholesky_reconstructs() {
        let b = random_spd(12, 3);
        let l = cholesky(&b).unwrap();
        assert!((&l * l.transpose() - &b).amax() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut b = DMatrix::identity(3, 3);
        b[(2, 2)] = -1.0;
        assert!(matches!(
            cholesky(&b),
            Err(Error::NotPositiveDefinite { pivot: 2, .. })
        ));
    }

    #[test]
    fn jacobi_matches_nalgebra_symmetric_eigen() {
        let a = random_spd(30, 7) - DMatrix::identity(30, 30) * 20.0;
        let (vals, vecs) = jacobi_eigen(&a).unwrap();
        let mut reference: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (x, y) in vals.iter().zip(&reference) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-11);
        }
        let recon = &vecs * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals)) * vecs.transpose();
        assert!((recon - a).amax() < 1e-11);
    }

    #[test]
    fn generalized_vectors_are_b_orthonormal() {
        let s = random_spd(15, 11);
        let b = random_spd(15, 12);
        let (vals, c) = generalized_eigen(&s, &b).unwrap();
        let gram = c.transpose() * &b * &c;
        assert!((gram - DMatrix::identity(15, 15)).amax() < 1e-11);
        for (k, mu) in vals.iter().enumerate() {
            let col = c.column(k);
            let r = &s * col - (&b * col) * *mu;
            assert!(r.amax() < 1e-10);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
