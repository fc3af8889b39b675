//! Scalar functions on charts (Hamiltonian potentials, test functions).

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::geometry::LocalJet;
use crate::taylor::Taylor;

/// A smooth function on the chart, evaluated in Taylor arithmetic from the
/// parameters `u` and the ambient position `x`.
pub trait Potential: Send + Sync {
    fn eval(&self, u: &[Taylor], x: &[Taylor]) -> Taylor;

    fn label(&self) -> String;

    /// Expansion at a local jet.
    fn at(&self, jet: &LocalJet) -> Taylor {
        self.eval(&jet.variables(), &jet.x)
    }
}

/// Polynomial in the ambient coordinates `x¹, …, x^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinatePolynomial {
    dim: usize,
    terms: Vec<(f64, Vec<u8>)>,
}

impl CoordinatePolynomial {
    pub fn new(dim: usize, terms: Vec<(f64, Vec<u8>)>) -> Self {
        assert!(terms.iter().all(|(_, e)| e.len() == dim));
        CoordinatePolynomial { dim, terms }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, vec![(c, vec![0; dim])])
    }

    /// `c · x^A` (`axis` is zero-based).
    pub fn coordinate(dim: usize, axis: usize, c: f64) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::new(dim, vec![(c, e)])
    }

    /// `|x|²`.
    pub fn norm_squared(dim: usize) -> Self {
        let terms = (0..dim)
            .map(|a| {
                let mut e = vec![0; dim];
                e[a] = 2;
                (1.0, e)
            })
            .collect();
        Self::new(dim, terms)
    }

    /// Every monomial of total degree `≤ degree` with a coefficient drawn
    /// uniformly from `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(dim: usize, degree: usize, rng: &mut R) -> Self {
        let mut exps = Vec::new();
        let mut current = vec![0u8; dim];
        monomials_up_to(&mut exps, &mut current, 0, degree);
        let terms = exps
            .into_iter()
            .map(|e| (rng.gen_range(-1.0..=1.0), e))
            .collect();
        Self::new(dim, terms)
    }

    pub fn terms(&self) -> &[(f64, Vec<u8>)] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().map(|&k| k as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Plain evaluation at a point.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().zip(x).map(|(&k, v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }
}

fn monomials_up_to(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: usize) {
    if var == current.len() {
        out.push(current.clone());
        return;
    }
    for k in 0..=remaining {
        current[var] = k as u8;
        monomials_up_to(out, current, var + 1, remaining - k);
    }
    current[var] = 0;
}

impl Potential for CoordinatePolynomial {
    fn eval(&self, _u: &[Taylor], x: &[Taylor]) -> Taylor {
        let layout = x[0].layout();
        let max_pow = self
            .terms
            .iter()
            .flat_map(|(_, e)| e.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let powers: Vec<Vec<Taylor>> = x
            .iter()
            .map(|xa| {
                let mut p = vec![Taylor::constant(layout, 1.0)];
                for k in 1..=max_pow {
                    p.push(&p[k - 1] * xa);
                }
                p
            })
            .collect();
        let mut acc = Taylor::zero(layout);
        for (c, e) in &self.terms {
            let mut m = Taylor::constant(layout, *c);
            for (a, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = &m * &powers[a][k as usize];
                }
            }
            acc = acc + m;
        }
        acc
    }

    fn label(&self) -> String {
        if self.terms.len() > 4 {
            return format!("poly(dim={}, degree={}, terms={})", self.dim, self.degree(), self.terms.len());
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, e)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(a, &k)| {
                        if k == 1 {
                            format!("x{}", a + 1)
                        } else {
                            format!("x{}^{}", a + 1, k)
                        }
                    })
                    .collect();
                if mono.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// A potential given by a closure over the parameters.
#[derive(Clone)]
pub struct ParametricPotential {
    label: String,
    f: Arc<dyn Fn(&[Taylor]) -> Taylor + Send + Sync>,
}

impl ParametricPotential {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(&[Taylor]) -> Taylor + Send + Sync + 'static,
    ) -> Self {
        ParametricPotential {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// `cos(k u_axis)`.
    pub fn cos(axis: usize, k: f64) -> Self {
        Self::new(format!("cos({k}*u{})", axis + 1), move |u| u[axis].scale(k).cos())
    }

    /// `sin(k u_axis)`.
    pub fn sin(axis: usize, k: f64) -> Self {
        Self::new(format!("sin({k}*u{})", axis + 1), move |u| u[axis].scale(k).sin())
    }
}

impl fmt::Debug for ParametricPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricPotential").field("label", &self.label).finish()
    }
}

impl Potential for ParametricPotential {
    fn eval(&self, u: &[Taylor], _x: &[Taylor]) -> Taylor {
        (self.f)(u)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Samples a potential at the given jets (values only).
pub fn sample(potential: &dyn Potential, jets: &[LocalJet]) -> Vec<f64> {
    jets.iter().map(|j| potential.at(j).value()).collect()
}
