//! Parsing of `--field` expressions into normal fields.
//!
//! Accepted forms:
//! - `H`: mean curvature vector
//! - `perp:y1,..,y2n`: normal part of a constant vector
//! - `jgrad:cosA`, `jgrad:sinA`, `jgrad:xA`, `jgrad:norm2`: `J∇f`
//! - `cosA*nuK`, `sinA*nuK`: a normal frame vector times `cos u_A`
//! - linear frame combinations such as `nu3-nu4`, `2*nu3 + 0.5*nu4`

use std::sync::Arc;

use shrinker_core::potential::{CoordinatePolynomial, ParametricPotential, Potential};
use shrinker_core::variations::{
    FrameCombination, HamiltonianField, MeanCurvatureField, ModulatedFrameField, NormalPartField,
    VectorField,
};

fn parse_index(s: &str, what: &str, lo: usize, hi: usize) -> Result<usize, String> {
    let i: usize = s
        .parse()
        .map_err(|_| format!("`{s}` is not a {what} index"))?;
    if i < lo || i > hi {
        return Err(format!("{what} index {i} outside {lo}..={hi}"));
    }
    Ok(i)
}

/// `cosA` / `sinA` over the chart parameter `u_A` (1-based).
fn parse_trig(s: &str, n: usize) -> Result<Option<ParametricPotential>, String> {
    if let Some(a) = s.strip_prefix("cos") {
        return Ok(Some(ParametricPotential::cos(parse_index(a, "parameter", 1, n)? - 1, 1.0)));
    }
    if let Some(a) = s.strip_prefix("sin") {
        return Ok(Some(ParametricPotential::sin(parse_index(a, "parameter", 1, n)? - 1, 1.0)));
    }
    Ok(None)
}

fn parse_potential(s: &str, n: usize) -> Result<Arc<dyn Potential>, String> {
    let dim = 2 * n;
    if let Some(p) = parse_trig(s, n)? {
        return Ok(Arc::new(p));
    }
    if s == "norm2" {
        return Ok(Arc::new(CoordinatePolynomial::norm_squared(dim)));
    }
    if let Some(a) = s.strip_prefix('x') {
        let a = parse_index(a, "coordinate", 1, dim)?;
        return Ok(Arc::new(CoordinatePolynomial::coordinate(dim, a - 1, 1.0)));
    }
    Err(format!("unknown potential `{s}` (expected cosA, sinA, xA or norm2)"))
}

/// `nuK` with `n < K ≤ 2n`, returned as a 0-based normal index.
fn parse_nu(s: &str, n: usize) -> Result<usize, String> {
    let k = s
        .strip_prefix("nu")
        .ok_or_else(|| format!("expected a frame vector nuK, got `{s}`"))?;
    Ok(parse_index(k, "normal frame", n + 1, 2 * n)? - n - 1)
}

fn parse_combination(s: &str, n: usize) -> Result<FrameCombination, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1.0, &rest[1..]),
            b'+' => (1.0, &rest[1..]),
            _ if terms.is_empty() => (1.0, rest),
            _ => return Err(format!("cannot parse field `{s}`")),
        };
        let bytes = body.as_bytes();
        let end = (1..bytes.len())
            .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'))
            .unwrap_or(bytes.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coef, nu) = match term.split_once('*') {
            Some((c, v)) => (
                c.parse::<f64>()
                    .map_err(|_| format!("`{c}` is not a coefficient"))?,
                v,
            ),
            None => (1.0, term),
        };
        terms.push((sign * coef, parse_nu(nu, n)?));
    }
    if terms.is_empty() {
        return Err("empty field expression".into());
    }
    Ok(FrameCombination::new(n, terms))
}

/// Parses a field expression for a chart of dimension `n`.
pub fn parse_field(s: &str, n: usize) -> Result<Arc<dyn VectorField>, String> {
    let s = s.trim();
    if s == "H" {
        return Ok(Arc::new(MeanCurvatureField));
    }
    if let Some(rest) = s.strip_prefix("perp:") {
        let y: Result<Vec<f64>, _> = rest.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let y = y.map_err(|_| format!("`{rest}` is not a comma-separated vector"))?;
        if y.len() != 2 * n {
            return Err(format!("perp: needs {} components, got {}", 2 * n, y.len()));
        }
        return Ok(Arc::new(NormalPartField { y }));
    }
    if let Some(rest) = s.strip_prefix("jgrad:") {
        return Ok(Arc::new(HamiltonianField {
            potential: parse_potential(rest.trim(), n)?,
        }));
    }
    if let Some((f, nu)) = s.split_once('*') {
        if let Some(p) = parse_trig(f.trim(), n)? {
            return Ok(Arc::new(ModulatedFrameField {
                n,
                index: parse_nu(nu.trim(), n)?,
                potential: Arc::new(p),
            }));
        }
    }
    Ok(Arc::new(parse_combination(s, n)?))
}
