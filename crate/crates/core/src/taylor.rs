//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Taylor`] value stores the coefficients of a polynomial in the
//! displacements `δ = u - u₀` of `nvars` parameters, truncated at a fixed
//! total degree. Arithmetic on these values propagates exact derivatives
//! through arbitrary compositions, which is how charts, potentials and
//! normal fields expose their parameter jets without finite differences.
//!
//! Coefficients are Taylor coefficients, not derivatives: the coefficient of
//! `δ^α` equals `∂^α f / α!`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial bookkeeping shared by all values of a given `(nvars, order)`.
#[derive(Debug)]
pub struct Layout {
    nvars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degrees: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// `(a, b, c)` with `monomial[a] * monomial[b] = monomial[c]`.
    products: Vec<(u32, u32, u32)>,
    /// Per variable: `(src, dst, factor)` with `∂_i δ^src = factor δ^dst`.
    derivatives: Vec<Vec<(u32, u32, f64)>>,
}

impl Layout {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exponents: Vec<Vec<u8>> = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; nvars];
            push_monomials(&mut exponents, &mut current, 0, degree);
        }
        let degrees: Vec<usize> = exponents
            .iter()
            .map(|e| e.iter().map(|&k| k as usize).sum())
            .collect();
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();

        let mut products = Vec::new();
        for (a, ea) in exponents.iter().enumerate() {
            for (b, eb) in exponents.iter().enumerate() {
                if degrees[a] + degrees[b] > order {
                    continue;
                }
                let sum: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                products.push((a as u32, b as u32, index[&sum] as u32));
            }
        }

        let mut derivatives = vec![Vec::new(); nvars];
        for (var, table) in derivatives.iter_mut().enumerate() {
            for (src, e) in exponents.iter().enumerate() {
                if e[var] == 0 {
                    continue;
                }
                let mut lowered = e.clone();
                lowered[var] -= 1;
                table.push((src as u32, index[&lowered] as u32, e[var] as f64));
            }
        }

        Layout {
            nvars,
            order,
            exponents,
            degrees,
            index,
            products,
            derivatives,
        }
    }

    /// Returns the process-wide layout for `(nvars, order)`.
    pub fn shared(nvars: usize, order: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(Layout::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    fn monomial(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }
}

fn push_monomials(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, var: usize, remaining: usize) {
    if var + 1 == current.len() {
        current[var] = remaining as u8;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    if current.is_empty() {
        out.push(Vec::new());
        return;
    }
    for k in (0..=remaining).rev() {
        current[var] = k as u8;
        push_monomials(out, current, var + 1, remaining - k);
    }
    current[var] = 0;
}

/// A truncated multivariate Taylor series.
#[derive(Clone)]
pub struct Taylor {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Taylor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taylor")
            .field("nvars", &self.layout.nvars)
            .field("order", &self.layout.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Taylor {
    pub fn constant(layout: &Arc<Layout>, value: f64) -> Self {
        let mut coeffs = vec![0.0; layout.len()];
        coeffs[0] = value;
        Taylor {
            layout: layout.clone(),
            coeffs,
        }
    }

    pub fn zero(layout: &Arc<Layout>) -> Self {
        Self::constant(layout, 0.0)
    }

    /// The coordinate function `u_var` expanded around `value`.
    pub fn variable(layout: &Arc<Layout>, var: usize, value: f64) -> Self {
        let mut t = Self::constant(layout, value);
        if layout.order >= 1 {
            let mut e = vec![0u8; layout.nvars];
            e[var] = 1;
            let idx = layout.monomial(&e).expect("linear monomial");
            t.coeffs[idx] = 1.0;
        }
        t
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `∂_i f` at the expansion point.
    pub fn d1(&self, i: usize) -> f64 {
        let mut e = vec![0u8; self.layout.nvars];
        e[i] = 1;
        self.layout
            .monomial(&e)
            .map_or(0.0, |idx| self.coeffs[idx])
    }

    /// `∂_i ∂_j f` at the expansion point.
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut e = vec![0u8; self.layout.nvars];
        e[i] += 1;
        e[j] += 1;
        let factor = if i == j { 2.0 } else { 1.0 };
        self.layout
            .monomial(&e)
            .map_or(0.0, |idx| factor * self.coeffs[idx])
    }

    /// The series of `∂_var f`; its top-degree coefficients are zero, so the
    /// result is exact only through `order - 1`.
    pub fn deriv(&self, var: usize) -> Taylor {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(src, dst, factor) in &self.layout.derivatives[var] {
            coeffs[dst as usize] += factor * self.coeffs[src as usize];
        }
        Taylor {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Taylor {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Taylor) {
        for (c, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += a * o;
        }
    }

    fn mul_ref(&self, other: &Taylor) -> Taylor {
        debug_assert!(Arc::ptr_eq(&self.layout, &other.layout));
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for &(a, b, c) in &self.layout.products {
            coeffs[c as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
        }
        Taylor {
            layout: self.layout.clone(),
            coeffs,
        }
    }

    /// Evaluates `g(self)` from the derivatives `g^(k)(a)` at `a = self.value()`.
    pub fn compose(&self, derivs: &[f64]) -> Taylor {
        let order = self.layout.order;
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let mut out = Taylor::constant(&self.layout, derivs[0]);
        let mut power = Taylor::constant(&self.layout, 1.0);
        let mut factorial = 1.0;
        for k in 1..=order.min(derivs.len() - 1) {
            power = power.mul_ref(&delta);
            factorial *= k as f64;
            out.axpy(derivs[k] / factorial, &power);
        }
        out
    }

    pub fn recip(&self) -> Taylor {
        let a = self.value();
        let mut derivs = Vec::with_capacity(self.layout.order + 1);
        let mut d = 1.0 / a;
        for k in 0..=self.layout.order {
            derivs.push(d);
            d *= -((k + 1) as f64) / a;
        }
        self.compose(&derivs)
    }

    pub fn sqrt(&self) -> Taylor {
        let a = self.value();
        let mut derivs = Vec::with_capacity(self.layout.order + 1);
        // d^k/da^k a^{1/2} = (1/2)(1/2 - 1)...(1/2 - k + 1) a^{1/2 - k}
        let mut coef = 1.0;
        for k in 0..=self.layout.order {
            derivs.push(coef * a.powf(0.5 - k as f64));
            coef *= 0.5 - k as f64;
        }
        self.compose(&derivs)
    }

    pub fn exp(&self) -> Taylor {
        let e = self.value().exp();
        self.compose(&vec![e; self.layout.order + 1])
    }

    pub fn sin(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let derivs: Vec<f64> = (0..=self.layout.order).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn cos(&self) -> Taylor {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let derivs: Vec<f64> = (0..=self.layout.order).map(|k| cycle[k % 4]).collect();
        self.compose(&derivs)
    }

    pub fn powi(&self, k: u32) -> Taylor {
        let mut out = Taylor::constant(&self.layout, 1.0);
        for _ in 0..k {
            out = out.mul_ref(self);
        }
        out
    }

    /// Highest total degree carrying a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, _)| self.layout.degrees[i])
            .max()
            .unwrap_or(0)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Taylor> for &Taylor {
            type Output = Taylor;
            fn $method(self, rhs: &Taylor) -> Taylor {
                let f: fn(&Taylor, &Taylor) -> Taylor = $body;
                f(self, rhs)
            }
        }
        impl $trait<Taylor> for Taylor {
            type Output = Taylor;
            fn $method(self, rhs: Taylor) -> Taylor {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Taylor> for Taylor {
            type Output = Taylor;
            fn $method(self, rhs: &Taylor) -> Taylor {
                (&self).$method(rhs)
            }
        }
        impl $trait<Taylor> for &Taylor {
            type Output = Taylor;
            fn $method(self, rhs: Taylor) -> Taylor {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let mut out = a.clone();
    out.axpy(1.0, b);
    out
});
binop!(Sub, sub, |a, b| {
    let mut out = a.clone();
    out.axpy(-1.0, b);
    out
});
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.recip()));

impl Mul<f64> for &Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}

impl Mul<f64> for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: f64) -> Taylor {
        self.scale(rhs)
    }
}

impl Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

/// Euclidean inner product of two Taylor-valued vectors.
pub fn dot(a: &[Taylor], b: &[Taylor]) -> Taylor {
    let mut out = Taylor::zero(a[0].layout());
    for (x, y) in a.iter().zip(b) {
        out = out + x * y;
    }
    out
}

/// `Σ_k c_k v_k` for Taylor coefficients and Taylor vectors.
pub fn combine(coeffs: &[Taylor], vectors: &[Vec<Taylor>]) -> Vec<Taylor> {
    let dim = vectors[0].len();
    (0..dim)
        .map(|a| {
            let mut acc = Taylor::zero(coeffs[0].layout());
            for (c, v) in coeffs.iter().zip(vectors) {
                acc = acc + c * &v[a];
            }
            acc
        })
        .collect()
}

/// Values of a Taylor vector at the expansion point.
pub fn values(v: &[Taylor]) -> Vec<f64> {
    v.iter().map(Taylor::value).collect()
}

/// Inverse of a symmetric positive definite Taylor matrix (Gauss–Jordan
/// without pivoting).
pub fn spd_inverse(m: &[Vec<Taylor>]) -> Vec<Vec<Taylor>> {
    let n = m.len();
    let layout = m[0][0].layout().clone();
    let mut a: Vec<Vec<Taylor>> = m.to_vec();
    let mut inv: Vec<Vec<Taylor>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Taylor::constant(&layout, if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_inv = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &pivot_inv;
            inv[col][j] = &inv[col][j] * &pivot_inv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col].clone();
            for j in 0..n {
                a[row][j] = &a[row][j] - &(&factor * &a[col][j]);
                inv[row][j] = &inv[row][j] - &(&factor * &inv[col][j]);
            }
        }
    }
    inv
}
