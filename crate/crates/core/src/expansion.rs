//! Coefficients of the free CLT expansion and the expansion densities.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{moment, semicircle_density, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltCoefficients {
    pub n: usize,
    pub m3: f64,
    pub m4: f64,
    pub a_n: f64,
    pub b_n: f64,
    pub d_n: f64,
    pub e_n: f64,
}

impl CltCoefficients {
    /// `a_n = m₃/√n`, `b_n = (m₄ − m₃² − 1)/n`, `d_n = (m₄ − m₃²)/n`,
    /// `e_n = (1 − b_n)/√(1 − d_n)`.
    pub fn new(m3: f64, m4: f64, n: usize) -> Result<Self> {
        coefficients(m3, m4, n)
    }

    /// Coefficients from the third and fourth moments of a standardized law.
    pub fn from_measure(m: &Measure, n: usize) -> Result<Self> {
        coefficients(moment(m, 3)?, moment(m, 4)?, n)
    }

    /// Half-width `2/e_n` of the support of the leading term.
    pub fn half_width(&self) -> f64 {
        2.0 / self.e_n
    }
}

pub fn coefficients(m3: f64, m4: f64, n: usize) -> Result<CltCoefficients> {
    if n == 0 {
        return Err(Error::CoefficientRange { n, reason: "n must be at least 1".into() });
    }
    let bound = 1.0 + m3 * m3;
    // Allow for rounding in moments computed from standardized atoms.
    if m4 < bound - 1e-12 * bound {
        return Err(Error::MomentInconsistency { m4, bound });
    }
    let nf = n as f64;
    let a_n = m3 / nf.sqrt();
    let b_n = (m4 - m3 * m3 - 1.0) / nf;
    let d_n = (m4 - m3 * m3) / nf;
    if !(d_n < 1.0 && b_n < 1.0) {
        return Err(Error::CoefficientRange { n, reason: format!("d_n = {d_n}, b_n = {b_n}") });
    }
    let e_n = (1.0 - b_n) / (1.0 - d_n).sqrt();
    Ok(CltCoefficients { n, m3, m4, a_n, b_n, d_n, e_n })
}

fn leading_polynomial(c: &CltCoefficients, x: f64, x2_coeff: f64) -> f64 {
    let nf = c.n as f64;
    1.0 + 0.5 * c.d_n - c.a_n * c.a_n - 1.0 / nf - c.a_n * x - x2_coeff * x * x
}

/// `v_n(x) = (1 + d_n/2 − a_n² − 1/n − a_n x − (b_n − a_n² − 1/n) x²) p_w(e_n x)`.
///
/// Approximates `p_n(x + a_n)`; callers shift by `a_n` for absolute positions.
pub fn v_n_density(c: &CltCoefficients, x: f64) -> f64 {
    let nf = c.n as f64;
    leading_polynomial(c, x, c.b_n - c.a_n * c.a_n - 1.0 / nf) * semicircle_density(c.e_n * x)
}

/// Same main term with `x²` coefficient `b_n − 1/n`.
pub fn th7_density(c: &CltCoefficients, x: f64) -> f64 {
    let nf = c.n as f64;
    leading_polynomial(c, x, c.b_n - 1.0 / nf) * semicircle_density(c.e_n * x)
}

/// Leading term of `∫|p_n − p_w|`: `2|m₃|/(π√n)` if `m₃ ≠ 0`, else `2|m₄ − 2|/(πn)`.
pub fn l1_leading_term(m3: f64, m4: f64, n: usize) -> f64 {
    let nf = n as f64;
    if m3 != 0.0 {
        2.0 * m3.abs() / (PI * nf.sqrt())
    } else {
        2.0 * (m4 - 2.0).abs() / (PI * nf)
    }
}

/// Leading term of `χ(w) − χ(μ_n)`.
pub fn chi_deficit_leading(m3: f64, n: usize) -> f64 {
    m3 * m3 / (6.0 * n as f64)
}

/// Leading term of `Φ(μ_n) − 1`.
pub fn fisher_excess_leading(m3: f64, n: usize) -> f64 {
    m3 * m3 / n as f64
}

/// Unweighted least squares of `log value` on `log n`: returns `(α, C)` with
/// `value ≈ C n^{−α}`.
pub fn fit_rate(ns: &[usize], values: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(&n, &v)| ((n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((-slope, (my - slope * mx).exp()))
}
