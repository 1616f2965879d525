//! Cauchy and reciprocal Cauchy transforms, the Nevanlinna representation of
//! `F_μ` for centered atomic laws, and moment recovery.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{moment, Atom, DensityProfile, Measure};
use crate::quad;

/// Default height for moment recovery along the imaginary axis.
pub const DEFAULT_MOMENT_HEIGHT: f64 = 1e4;

/// Largest order accepted by [`moments_from_tau`].
pub const TAU_MOMENT_CAP: usize = 16;

fn check_upper(z: C64) -> Result<()> {
    if z.im > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::LowerHalfPlane { re: z.re, im: z.im })
    }
}

/// `√(w - r) √(w + r)`: analytic off `[-r, r]`, asymptotic to `w` at infinity
/// and mapping the upper half-plane into itself.
pub(crate) fn edge_sqrt(w: C64, r: f64) -> C64 {
    (w - r).sqrt() * (w + r).sqrt()
}

/// `log(1 + w)` without cancellation for small `|w|`.
fn ln_1p(w: C64) -> C64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    C64::new(re, im)
}

/// `G_μ(z) = ∫ μ(du) / (z - u)` for `Im z > 0`.
pub fn cauchy(m: &Measure, z: C64) -> Result<C64> {
    check_upper(z)?;
    Ok(cauchy_unchecked(m, z))
}

pub(crate) fn cauchy_unchecked(m: &Measure, z: C64) -> C64 {
    match m {
        Measure::Atomic(atoms) => atoms.iter().map(|a| a.weight / (z - a.position)).sum(),
        Measure::Semicircle => 2.0 / (z + edge_sqrt(z, 2.0)),
        Measure::Arcsine { center, halfwidth } => 1.0 / edge_sqrt(z - center, *halfwidth),
        Measure::FreeMeixner { a, b, d } => 1.0 / meixner_reciprocal_unchecked(*a, *b, *d, z),
        Measure::Grid(p) => grid_cauchy(p, z).0,
    }
}

/// Cauchy transform and its derivative for a piecewise-linear density,
/// integrated exactly cell by cell.
fn grid_cauchy(p: &DensityProfile, z: C64) -> (C64, C64) {
    let mut g = C64::new(0.0, 0.0);
    let mut dg = C64::new(0.0, 0.0);
    for k in p.cells() {
        let (a, b) = (p.x(k), p.x(k + 1));
        let (pa, pb) = (p.values[k], p.values[k + 1]);
        if pa == 0.0 && pb == 0.0 {
            continue;
        }
        let slope = (pb - pa) / p.dx;
        // p(u) = p(z) - slope (z - u) with p(z) the linear extension.
        let pz = pa + slope * (z - a);
        // ∫_a^b du / (z - u) = log((z - a)/(z - b)) = log(1 + dx/(z - b))
        let l = ln_1p(p.dx / (z - b));
        g += pz * l - slope * p.dx;
        // ∫_a^b p(u) / (z - u)² du
        let inv = 1.0 / (z - b) - 1.0 / (z - a);
        dg -= pz * inv - slope * l;
    }
    (g, dg)
}

/// `F_μ(z) = 1 / G_μ(z)`.
pub fn reciprocal_cauchy(m: &Measure, z: C64) -> Result<C64> {
    check_upper(z)?;
    Ok(reciprocal_with_derivative(m, z).0)
}

/// `F_μ(z)` and `F_μ'(z)`; no domain check.
pub(crate) fn reciprocal_with_derivative(m: &Measure, z: C64) -> (C64, C64) {
    match m {
        Measure::Atomic(atoms) => {
            let mut g = C64::new(0.0, 0.0);
            let mut dg = C64::new(0.0, 0.0);
            for a in atoms {
                let inv = 1.0 / (z - a.position);
                g += a.weight * inv;
                dg -= a.weight * inv * inv;
            }
            let f = 1.0 / g;
            (f, -dg * f * f)
        }
        Measure::Semicircle => {
            let s = edge_sqrt(z, 2.0);
            (0.5 * (z + s), 0.5 * (1.0 + z / s))
        }
        Measure::Arcsine { center, halfwidth } => {
            let w = z - center;
            let s = edge_sqrt(w, *halfwidth);
            (s, w / s)
        }
        Measure::FreeMeixner { a, b, d } => {
            let (_, s) = meixner_parts(*a, *b, *d, z);
            let f = a + 0.5 * ((1.0 + b) * (z - a) + s);
            let ds = (1.0 - b) * (1.0 - b) * (z - a) / s;
            (f, 0.5 * ((1.0 + b) + ds))
        }
        Measure::Grid(p) => {
            let (g, dg) = grid_cauchy(p, z);
            let f = 1.0 / g;
            (f, -dg * f * f)
        }
    }
}

fn meixner_parts(a: f64, b: f64, d: f64, z: C64) -> (f64, C64) {
    // (1-b)²(z-a)² - 4(1-d) = (1-b)² ((z-a) - r)((z-a) + r)
    let r = 2.0 * (1.0 - d).sqrt() / (1.0 - b);
    (r, (1.0 - b) * edge_sqrt(z - a, r))
}

/// Reciprocal Cauchy transform of the free Meixner law `μ_{a,b,d}`.
///
/// The square root is the branch analytic off the support interval and
/// asymptotic to `(1-b)(z-a)` at infinity, which is the branch with
/// `Im M(z) ≥ 0` on the upper half-plane.
pub fn meixner_reciprocal(a: f64, b: f64, d: f64, z: C64) -> Result<C64> {
    check_upper(z)?;
    if !(b < 1.0 && d < 1.0) {
        return Err(Error::InvalidMeasure(format!("meixner({a}, {b}, {d}) needs b < 1, d < 1")));
    }
    Ok(meixner_reciprocal_unchecked(a, b, d, z))
}

pub(crate) fn meixner_reciprocal_unchecked(a: f64, b: f64, d: f64, z: C64) -> C64 {
    let (_, s) = meixner_parts(a, b, d, z);
    a + 0.5 * ((1.0 + b) * (z - a) + s)
}

/// `∫ g(u) μ(du)` for a complex integrand, by a rule suited to each variant.
pub(crate) fn integrate_against(m: &Measure, g: impl Fn(f64) -> C64) -> C64 {
    const NODES: usize = 400;
    match m {
        Measure::Atomic(atoms) => atoms.iter().map(|a| a.weight * g(a.position)).sum(),
        Measure::Semicircle => {
            // u = 2t: p_w(u) du = (2/π) √(1-t²) dt
            let (t, w) = quad::gauss_chebyshev_u(NODES);
            t.iter().zip(&w).map(|(&t, &w)| w * g(2.0 * t)).sum::<C64>() * (2.0 / PI)
        }
        Measure::Arcsine { center, halfwidth } => {
            let (t, w) = quad::gauss_chebyshev_t(NODES);
            t.iter().zip(&w).map(|(&t, &w)| w * g(center + halfwidth * t)).sum::<C64>() / PI
        }
        Measure::FreeMeixner { a, b, d } => {
            let r = 2.0 * (1.0 - d).sqrt() / (1.0 - b);
            let f = |x: f64| b * x * x + a * (1.0 - b) * x + 1.0 - d;
            let scale = (1.0 - b) * r * r / (2.0 * PI);
            let (t, w) = quad::gauss_chebyshev_u(NODES);
            t.iter()
                .zip(&w)
                .map(|(&t, &w)| {
                    let x = a + r * t;
                    w * g(x) / f(x)
                })
                .sum::<C64>()
                * scale
        }
        Measure::Grid(p) => {
            let rule = quad::gauss_legendre(12);
            p.cells()
                .map(|k| {
                    let (a, b) = (p.x(k), p.x(k + 1));
                    let (pa, pb) = (p.values[k], p.values[k + 1]);
                    let half = 0.5 * p.dx;
                    rule.0
                        .iter()
                        .zip(&rule.1)
                        .map(|(&t, &w)| {
                            let s = 0.5 * (1.0 + t);
                            w * half * (pa * (1.0 - s) + pb * s) * g(a + (b - a) * s)
                        })
                        .sum::<C64>()
                })
                .sum()
        }
    }
}

/// Moment `m_k` read off the Cauchy transform at `z = iy`:
/// `Re[(iy)^{k+1} (G(iy) - Σ_{j<k} m_j (iy)^{-j-1})]`.
///
/// The bracket equals `z^{-k} ∫ u^k μ(du)/(z - u)`; that form is evaluated
/// instead of the difference, which in double precision cancels about `y^k`
/// ulps and is useless beyond `k = 3` at `y = 10⁴`.
pub fn moments_from_cauchy(m: &Measure, k: usize, y: f64) -> Result<f64> {
    if k > crate::measure::MOMENT_CAP {
        return Err(Error::UnsupportedMoment { k, cap: crate::measure::MOMENT_CAP });
    }
    if !(y > 0.0) {
        return Err(Error::LowerHalfPlane { re: 0.0, im: y });
    }
    let z = C64::new(0.0, y);
    // (iy)^{k+1} z^{-k} / (z - u) = z / (z - u)
    let est = integrate_against(m, |u| u.powi(k as i32) * z / (z - u)).re;
    // Overflow of u^k z or a vanishing denominator means the order and the
    // height cannot be combined.
    if !est.is_finite() {
        return Err(Error::PrecisionLoss { k, y });
    }
    Ok(est)
}

/// Ulps lost when forming `G(iy) - Σ_{j<k} m_j (iy)^{-j-1}` directly in f64.
pub fn laurent_cancellation_ulps(m: &Measure, k: usize, y: f64, known: &[f64]) -> Result<f64> {
    let z = C64::new(0.0, y);
    let g = cauchy(m, z)?;
    let mut acc = g;
    let mut zp = 1.0 / z;
    for mj in known.iter().take(k) {
        acc -= mj * zp;
        zp /= z;
    }
    let scale = g.norm();
    let rem = acc.norm();
    Ok(if rem == 0.0 { f64::INFINITY } else { scale / rem })
}

/// Atoms of `τ` in `F_μ(z) = z + ∫ τ(du) / (u - z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauRepresentation {
    pub atoms: Vec<Atom>,
    /// `m_2 .. m_8` of the originating measure.
    pub source_moments: [f64; 7],
    /// Atoms of the originating measure, when known.
    pub source: Option<Vec<Atom>>,
}

impl TauRepresentation {
    /// τ given directly by its atoms; source moments follow from the moment formula.
    pub fn from_atoms(mut atoms: Vec<Atom>) -> Self {
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        let seq = tau_moment_sequence(&atoms, TAU_MOMENT_CAP);
        let mut source_moments = [0.0; 7];
        for (i, k) in (2..=8).enumerate() {
            source_moments[i] = moments_from_tau_sequence(&seq, k);
        }
        TauRepresentation { atoms, source_moments, source: None }
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn moment(&self, s: usize) -> f64 {
        self.atoms.iter().map(|a| a.weight * a.position.powi(s as i32)).sum()
    }

    /// `z + Σ τᵢ / (vᵢ - z)`.
    pub fn reciprocal(&self, z: C64) -> C64 {
        z + self.atoms.iter().map(|a| a.weight / (a.position - z)).sum::<C64>()
    }
}

fn tau_moment_sequence(atoms: &[Atom], len: usize) -> Vec<f64> {
    (0..=len)
        .map(|s| atoms.iter().map(|a| a.weight * a.position.powi(s as i32)).sum())
        .collect()
}

/// Bisection for a sign change of `f` on `(lo, hi)`; `f(lo+) < 0 < f(hi-)` or
/// the reverse.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo_sign = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Nevanlinna data of a centered atomic law.
///
/// The `k - 1` atoms of τ are the zeros of `G_μ`, one in each gap between
/// consecutive atoms of μ, and their weights are `-1 / G_μ'`.
pub fn tau_from_atomic(m: &Measure) -> Result<TauRepresentation> {
    let Measure::Atomic(atoms) = m else {
        return Err(Error::InvalidMeasure("tau_from_atomic needs an atomic measure".into()));
    };
    if atoms.len() < 2 {
        return Err(Error::DegenerateMeasure("a single atom has no tau measure".into()));
    }
    let scale = atoms.iter().map(|a| a.position.abs()).fold(1.0, f64::max);
    let m1 = moment(m, 1)?;
    if m1.abs() > 1e-12 * scale {
        return Err(Error::NotCentered(m1));
    }
    let g = |x: f64| atoms.iter().map(|a| a.weight / (x - a.position)).sum::<f64>();
    let tau_atoms: Vec<Atom> = atoms
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0].position, w[1].position);
            // G runs from +∞ at lo+ to -∞ at hi-.
            let v = bisect(g, lo + (hi - lo) * 1e-15 + f64::EPSILON * lo.abs(), hi - (hi - lo) * 1e-15 - f64::EPSILON * hi.abs());
            let dg: f64 = atoms.iter().map(|a| a.weight / (v - a.position).powi(2)).sum();
            Atom::new(v, 1.0 / dg)
        })
        .collect();
    let mut source_moments = [0.0; 7];
    for (i, k) in (2..=8).enumerate() {
        source_moments[i] = moment(m, k)?;
    }
    Ok(TauRepresentation { atoms: tau_atoms, source_moments, source: Some(atoms.clone()) })
}

/// `m_k(μ) = Σ_{l=1}^{⌊k/2⌋} Σ_{s₁+…+s_l = k-2l} m_{s₁}(τ)…m_{s_l}(τ)` from a
/// τ-moment sequence `seq[s] = m_s(τ)`.
pub fn moments_from_tau_sequence(seq: &[f64], k: usize) -> f64 {
    assert!(k <= TAU_MOMENT_CAP);
    if k < 2 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    // conv[s] = Σ over compositions of s into l parts; start with l = 1.
    let top = k - 2;
    let at = |s: usize| seq.get(s).copied().unwrap_or(0.0);
    let mut conv: Vec<f64> = (0..=top).map(at).collect();
    let mut total = 0.0;
    for l in 1..=k / 2 {
        total += conv[k - 2 * l];
        let next: Vec<f64> = (0..=top)
            .map(|s| (0..=s).map(|i| conv[i] * at(s - i)).sum())
            .collect();
        conv = next;
    }
    total
}

pub fn moments_from_tau(t: &TauRepresentation, k: usize) -> f64 {
    let seq = tau_moment_sequence(&t.atoms, k);
    moments_from_tau_sequence(&seq, k)
}

/// Keep the τ-atoms with `|u| ≤ √(n-1)/π` and build the law whose reciprocal
/// Cauchy transform is `z + Σ_kept τᵢ / (vᵢ - z)`.
pub fn truncate_tau(t: &TauRepresentation, n: usize) -> Result<(TauRepresentation, Measure)> {
    if n < 2 {
        return Err(Error::InvalidMeasure("truncation needs n >= 2".into()));
    }
    let cutoff = ((n - 1) as f64).sqrt() / PI;
    let kept: Vec<Atom> = t.atoms.iter().copied().filter(|a| a.position.abs() <= cutoff).collect();
    if kept.len() == t.atoms.len() {
        let measure = match &t.source {
            Some(src) => Measure::Atomic(src.clone()),
            None => measure_from_tau(&kept)?,
        };
        return Ok((t.clone(), measure));
    }
    if kept.is_empty() {
        return Err(Error::EmptyTau);
    }
    let measure = measure_from_tau(&kept)?;
    let truncated = TauRepresentation::from_atoms(kept);
    Ok((truncated, measure))
}

/// Poles of `1/F` for `F(x) = x + Σ τᵢ/(vᵢ - x)`: one zero of `F` left of the
/// first pole, one between consecutive poles, one right of the last.
fn measure_from_tau(tau: &[Atom]) -> Result<Measure> {
    if tau.is_empty() {
        return Err(Error::EmptyTau);
    }
    let f = |x: f64| x + tau.iter().map(|a| a.weight / (a.position - x)).sum::<f64>();
    let df = |x: f64| 1.0 + tau.iter().map(|a| a.weight / (a.position - x).powi(2)).sum::<f64>();
    let total: f64 = tau.iter().map(|a| a.weight).sum();
    let first = tau[0].position;
    let last = tau[tau.len() - 1].position;
    let nudge = |x: f64, toward: f64| x + (toward - x) * 1e-15 + (toward - x).signum() * f64::EPSILON * x.abs();
    let mut brackets = vec![(first.min(0.0) - 1.0 - total, nudge(first, first - 1.0))];
    for w in tau.windows(2) {
        brackets.push((nudge(w[0].position, w[1].position), nudge(w[1].position, w[0].position)));
    }
    brackets.push((nudge(last, last + 1.0), last.max(0.0) + 1.0 + total));
    let pairs: Vec<(f64, f64)> = brackets
        .into_iter()
        .map(|(lo, hi)| {
            let x = bisect(f, lo, hi);
            (x, 1.0 / df(x))
        })
        .collect();
    let mass: f64 = pairs.iter().map(|p| p.1).sum();
    Measure::atomic(&pairs.iter().map(|&(x, w)| (x, w / mass)).collect::<Vec<_>>())
}
