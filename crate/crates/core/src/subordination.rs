//! Subordination for the n-fold free self-convolution.
//!
//! The subordination function `Z` solves `z = nZ - (n-1)F_μ(Z)` and gives
//! `F_{μ^{⊞n}} = F_μ ∘ Z`. For the normalized sum `μ_n` (scaled by `1/√n`),
//! `F_{μ_n}(z) = F_μ(√n S_n(z))/√n` with `S_n(z) = Z(√n z)/√n`.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::CltCoefficients;
use crate::measure::Measure;
use crate::transforms::{meixner_reciprocal_unchecked, reciprocal_with_derivative};

pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Relative residual below which Newton steps are attempted.
pub const NEWTON_SWITCH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Absolute residual target; `None` means `1e-12 · max(1, |z|)`.
    pub tol: Option<f64>,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: None, max_iter: DEFAULT_MAX_ITER }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol: Some(tol), ..Default::default() }
    }

    fn tol_at(&self, z: C64) -> f64 {
        self.tol.unwrap_or(1e-12 * z.norm().max(1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinationSolution {
    /// Point at which the equation was solved.
    pub z: C64,
    pub n: usize,
    /// `Z(z)`.
    pub value: C64,
    /// `Z(√n w)/√n` when the solve was made at `z = √n w`.
    pub scaled: Option<C64>,
    pub iterations: usize,
    pub residual: f64,
}

fn residual(m: &Measure, n: usize, z: C64, w: C64) -> f64 {
    let nf = n as f64;
    let (f, _) = reciprocal_with_derivative(m, w);
    (nf * w - (nf - 1.0) * f - z).norm()
}

/// Solve `z = nZ - (n-1)F_μ(Z)` from `Z₀ = z` by damped Newton steps guarded by
/// the Picard map `w ↦ (z + (n-1)F_μ(w))/n`.
///
/// If half the iteration budget is spent without convergence (typically just
/// above the support), the rest is used on a continuation in `Im z` from height
/// `max(1, |z|)` down to `Im z`.
pub fn solve_z(m: &Measure, n: usize, z: C64, opts: SolveOptions) -> Result<SubordinationSolution> {
    solve_z_observed(m, n, z, opts, |_| {})
}

struct Outcome {
    w: C64,
    iterations: usize,
    residual: f64,
    converged: bool,
}

fn iterate(m: &Measure, n: usize, z: C64, w0: C64, tol: f64, budget: usize, observe: &mut impl FnMut(C64)) -> Outcome {
    let nf = n as f64;
    let floor = z.im / nf;
    let switch = NEWTON_SWITCH * z.norm().max(1.0);
    let mut w = w0;
    let mut best = f64::INFINITY;
    for it in 0..budget {
        let (f, df) = reciprocal_with_derivative(m, w);
        let g = nf * w - (nf - 1.0) * f - z;
        let r = g.norm();
        best = best.min(r);
        if r <= tol {
            return Outcome { w, iterations: it, residual: r, converged: true };
        }
        // Any solution with Im ≥ Im z/n is the fixed point, so a step is safe
        // whenever it stays there and lowers the residual.
        let step = g / (nf - (nf - 1.0) * df);
        let min_t = if r < switch { 1.0 / 64.0 } else { 1.0 / 8.0 };
        let mut t = 1.0;
        let mut accepted = false;
        while t >= min_t {
            let cand = w - step * t;
            if cand.im >= floor && cand.re.is_finite() && residual(m, n, z, cand) < (1.0 - 0.25 * t) * r {
                w = cand;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            w = (z + (nf - 1.0) * f) / nf;
        }
        observe(w);
    }
    let r = residual(m, n, z, w);
    Outcome { w, iterations: budget, residual: best.min(r), converged: r <= tol }
}

/// [`solve_z`] reporting every iterate to `observe`.
pub fn solve_z_observed(
    m: &Measure,
    n: usize,
    z: C64,
    opts: SolveOptions,
    mut observe: impl FnMut(C64),
) -> Result<SubordinationSolution> {
    if !(z.im > 0.0) {
        return Err(Error::LowerHalfPlane { re: z.re, im: z.im });
    }
    if n == 0 {
        return Err(Error::InvalidMeasure("n must be at least 1".into()));
    }
    if n == 1 {
        return Ok(SubordinationSolution { z, n, value: z, scaled: None, iterations: 0, residual: 0.0 });
    }
    let tol = opts.tol_at(z);
    let done = |o: &Outcome, its: usize| SubordinationSolution {
        z,
        n,
        value: o.w,
        scaled: None,
        iterations: its,
        residual: o.residual,
    };
    let first = iterate(m, n, z, z, tol, opts.max_iter.div_ceil(2), &mut observe);
    if first.converged {
        return Ok(done(&first, first.iterations));
    }
    let mut used = first.iterations;
    let top = z.norm().max(1.0);
    let mut heights = vec![z.im];
    while *heights.last().unwrap() < top {
        let y = 4.0 * heights.last().unwrap();
        heights.push(y);
    }
    let mut w = C64::new(z.re, *heights.last().unwrap());
    let mut best = first.residual;
    for (k, &y) in heights.iter().enumerate().rev() {
        let zk = C64::new(z.re, y);
        let level_tol = if k == 0 { tol } else { 1e-8 * zk.norm().max(1.0) };
        let o = iterate(m, n, zk, w, level_tol, opts.max_iter.saturating_sub(used), &mut observe);
        used += o.iterations;
        w = o.w;
        if !o.converged {
            best = best.min(if k == 0 { o.residual } else { residual(m, n, z, w) });
            break;
        }
        if k == 0 {
            return Ok(done(&o, used));
        }
    }
    Err(Error::NoConvergence { iterations: used, residual: best })
}

/// `S_n(w) = Z(√n w)/√n`.
pub fn solve_scaled(m: &Measure, n: usize, w: C64, opts: SolveOptions) -> Result<SubordinationSolution> {
    let rn = (n as f64).sqrt();
    let mut sol = solve_z(m, n, w * rn, opts)?;
    sol.scaled = Some(sol.value / rn);
    Ok(sol)
}

/// `G_{μ_n}(z)` for the normalized sum `μ_n`.
pub fn cauchy_mu_n(m: &Measure, n: usize, z: C64) -> Result<C64> {
    cauchy_mu_n_with(m, n, z, SolveOptions::default()).map(|(g, _)| g)
}

pub fn cauchy_mu_n_with(m: &Measure, n: usize, z: C64, opts: SolveOptions) -> Result<(C64, SubordinationSolution)> {
    let sol = solve_scaled(m, n, z, opts)?;
    let (f, _) = reciprocal_with_derivative(m, sol.value);
    Ok(((n as f64).sqrt() / f, sol))
}

/// Coefficients of `G_μ = P/Q` for an atomic law, lowest degree first.
fn numerator_denominator(atoms: &[crate::measure::Atom]) -> (Vec<C64>, Vec<C64>) {
    let mul_linear = |poly: &[C64], root: f64| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            out[i + 1] += c;
            out[i] -= c * root;
        }
        out
    };
    let mut q = vec![C64::new(1.0, 0.0)];
    for a in atoms {
        q = mul_linear(&q, a.position);
    }
    let mut p = vec![C64::new(0.0, 0.0); atoms.len()];
    for (j, aj) in atoms.iter().enumerate() {
        let mut term = vec![C64::new(aj.weight, 0.0)];
        for (i, ai) in atoms.iter().enumerate() {
            if i != j {
                term = mul_linear(&term, ai.position);
            }
        }
        for (c, t) in p.iter_mut().zip(term) {
            *c += t;
        }
    }
    (p, q)
}

/// All roots of a polynomial (coefficients lowest degree first) from the
/// eigenvalues of its companion matrix, polished by Newton.
fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if deg == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut comp = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let eig = Schur::new(comp).eigenvalues().expect("complex Schur form is triangular");
    eig.iter().map(|&r| polish(coeffs, r)).collect()
}

fn horner(coeffs: &[C64], x: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn polish(coeffs: &[C64], mut x: C64) -> C64 {
    for _ in 0..8 {
        let (p, dp) = horner(coeffs, x);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        x -= step;
        if step.norm() <= 1e-16 * x.norm().max(1.0) {
            break;
        }
    }
    x
}

/// Independent check of [`solve_z`] for atomic laws.
///
/// Clearing denominators turns the subordination equation into the degree-`k`
/// polynomial `nZ·P(Z) − (n−1)Q(Z) − z·P(Z)`, where `G_μ = P/Q`. Its upper
/// half-plane roots are followed from `z₀ = 10³i`, where the wanted root is
/// `≈ z₀`, down to `z`.
pub fn polynomial_oracle(m: &Measure, n: usize, z: C64) -> Result<C64> {
    let Measure::Atomic(atoms) = m else {
        return Err(Error::InvalidMeasure("polynomial oracle needs an atomic measure".into()));
    };
    if !(z.im > 0.0) {
        return Err(Error::LowerHalfPlane { re: z.re, im: z.im });
    }
    if n == 1 {
        return Ok(z);
    }
    let nf = n as f64;
    let (p, q) = numerator_denominator(atoms);
    let build = |zz: C64| -> Vec<C64> {
        let mut r = vec![C64::new(0.0, 0.0); q.len()];
        for (i, &c) in p.iter().enumerate() {
            r[i + 1] += nf * c;
            r[i] -= zz * c;
        }
        for (i, &c) in q.iter().enumerate() {
            r[i] -= (nf - 1.0) * c;
        }
        r
    };
    let z0 = C64::new(0.0, 1e3);
    let path = |s: f64| z + (z0 - z) * s;
    let roots0 = polynomial_roots(&build(z0));
    let mut cur = *roots0
        .iter()
        .min_by(|a, b| (**a - z0).norm().total_cmp(&(**b - z0).norm()))
        .expect("at least one root");
    let mut prev = cur;
    let mut s: f64 = 1.0;
    let mut h: f64 = 0.05;
    let mut h_prev = 0.0;
    while s > 0.0 {
        let s_new = (s - h).max(0.0);
        let zz = path(s_new);
        let predicted = if h_prev > 0.0 { cur + (cur - prev) * ((s - s_new) / h_prev) } else { cur + (zz - path(s)) };
        // Only the upper half-plane holds a solution, so roots below the axis
        // are never candidates.
        let roots = polynomial_roots(&build(zz));
        let mut dists: Vec<(f64, C64)> =
            roots.iter().filter(|r| r.im > 0.0).map(|&r| ((r - predicted).norm(), r)).collect();
        if dists.is_empty() {
            return Err(Error::PathAmbiguity { re: zz.re, im: zz.im });
        }
        dists.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (d1, r1) = dists[0];
        let d2 = dists.get(1).map_or(f64::INFINITY, |d| d.0);
        let gap = dists.get(1).map_or(f64::INFINITY, |d| (d.1 - r1).norm());
        if gap <= 1e-12 {
            return Err(Error::PathAmbiguity { re: zz.re, im: zz.im });
        }
        if d1 < 0.25 * d2 {
            prev = cur;
            cur = r1;
            h_prev = s - s_new;
            s = s_new;
            h = (h * 1.5).min(0.1);
        } else {
            h *= 0.5;
            if h < 1e-10 {
                return Err(Error::PathAmbiguity { re: zz.re, im: zz.im });
            }
        }
    }
    Ok(polish(&build(z), cur))
}

/// `max_x |S_n(x+iε) − M_n(x+iε)| · √|4 − (e_n(x−a_n))²| · n^{3/2}` with
/// `ε = 10⁻⁷`, where `M_n` is the reciprocal Cauchy transform of the free
/// Meixner law with the CLT coefficients of `m`.
pub fn meixner_closeness(m: &Measure, n: usize, grid: &[f64]) -> Result<f64> {
    const EPS: f64 = 1e-7;
    let c = CltCoefficients::from_measure(m, n)?;
    let nf = n as f64;
    let mut worst: f64 = 0.0;
    for &x in grid {
        let w = C64::new(x, EPS);
        let s = solve_scaled(m, n, w, SolveOptions::default())?.scaled.expect("scaled solve");
        let mn = meixner_reciprocal_unchecked(c.a_n, c.b_n, c.d_n, w);
        let weight = (4.0 - (c.e_n * (x - c.a_n)).powi(2)).abs().sqrt();
        worst = worst.max((s - mn).norm() * weight * nf.powf(1.5));
    }
    Ok(worst)
}
