//! Stieltjes inversion of `G_{μ_n}` onto uniform grids, L1 distances and the
//! support window of the expansion.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::CltCoefficients;
use crate::measure::{DensityProfile, Measure};
use crate::subordination::{cauchy_mu_n_with, SolveOptions};

pub const DEFAULT_EPS: f64 = 1e-5;
pub const MIN_POINTS: usize = 201;
/// Largest admissible jump between adjacent samples.
pub const JUMP_LIMIT: f64 = 0.5;
/// Values below this are treated as outside the support.
const SUPPORT_FLOOR: f64 = 1e-10;
/// Extrapolated-to-raw ratio below which a point is taken to be off the support.
const OUTSIDE_RATIO: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsPolicy {
    /// `2p(ε/2) − p(ε)`.
    Richardson(f64),
    Fixed(f64),
}

impl Default for EpsPolicy {
    fn default() -> Self {
        EpsPolicy::Richardson(DEFAULT_EPS)
    }
}

impl EpsPolicy {
    pub fn eps(&self) -> f64 {
        match *self {
            EpsPolicy::Richardson(e) | EpsPolicy::Fixed(e) => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("{points} points, need at least {MIN_POINTS}")));
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("need lo < hi, got {lo}:{hi}")));
        }
        Ok(Grid { lo, hi, points })
    }

    pub fn dx(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.lo + self.dx() * i as f64
    }
}

fn raw_density(m: &Measure, n: usize, x: f64, eps: f64, opts: SolveOptions) -> Result<f64> {
    let (g, _) = cauchy_mu_n_with(m, n, C64::new(x, eps), opts)?;
    Ok(-g.im / std::f64::consts::PI)
}

/// Returns the density estimate and whether the point lies outside the support.
fn point_density(m: &Measure, n: usize, x: f64, policy: EpsPolicy, opts: SolveOptions) -> Result<(f64, bool)> {
    match policy {
        EpsPolicy::Fixed(e) => {
            let v = raw_density(m, n, x, e, opts)?;
            Ok((v, v <= SUPPORT_FLOOR))
        }
        EpsPolicy::Richardson(e) => {
            let coarse = raw_density(m, n, x, e, opts)?;
            let fine = raw_density(m, n, x, 0.5 * e, opts)?;
            let v = 2.0 * fine - coarse;
            // Off the support -Im G/π is linear in ε and the extrapolation cancels it.
            Ok((v, v <= SUPPORT_FLOOR || v < OUTSIDE_RATIO * coarse))
        }
    }
}

/// Density of `μ_n` by Stieltjes inversion, `p(x) = −Im G_{μ_n}(x + iε)/π`.
///
/// Negative values are clipped to zero and their mass is added to
/// `mass_tol`. Points are evaluated in parallel and assembled in grid order.
pub fn invert_density(m: &Measure, n: usize, grid: Grid, policy: EpsPolicy) -> Result<DensityProfile> {
    invert_density_with(m, n, grid, policy, SolveOptions::default())
}

pub fn invert_density_with(
    m: &Measure,
    n: usize,
    grid: Grid,
    policy: EpsPolicy,
    opts: SolveOptions,
) -> Result<DensityProfile> {
    let grid = Grid::new(grid.lo, grid.hi, grid.points)?;
    let eps = policy.eps();
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidGrid(format!("eps must be positive, got {eps}")));
    }
    let evaluated: Vec<(f64, bool)> = (0..grid.points)
        .into_par_iter()
        .map(|i| point_density(m, n, grid.x(i), policy, opts))
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = evaluated.iter().map(|e| e.0).collect();
    check_spikes(m, n, &grid, &raw, eps, opts)?;

    let dx = grid.dx();
    let mut clipped = 0.0;
    let values: Vec<f64> = raw
        .iter()
        .zip(&evaluated)
        .map(|(&v, &(_, outside))| {
            if v < 0.0 {
                clipped += -v * dx;
            }
            if outside {
                0.0
            } else {
                v.max(0.0)
            }
        })
        .collect();
    let first = values.iter().position(|&v| v > 0.0);
    let last = values.iter().rposition(|&v| v > 0.0);
    let (Some(first), Some(last)) = (first, last) else {
        return Err(Error::InvalidGrid("no density mass on the grid".into()));
    };
    if first == last {
        return Err(Error::GridTooCoarse { x: grid.x(first) });
    }
    // The support ends at the outermost positive nodes; the partial edge cells
    // beyond them carry O(dx^{3/2}) mass at square-root edges.
    let mut profile = DensityProfile::new(grid.lo, dx, values, (grid.x(first), grid.x(last)))?;
    profile.mass_tol += clipped;
    Ok(profile)
}

/// A jump larger than [`JUMP_LIMIT`] is a resolution failure when the larger
/// side grows like `1/ε` under halving of `ε`, which is how mass concentrated
/// below the grid spacing shows up. Square-root edge singularities grow at
/// most like `ε^{−1/2}` and are accepted.
fn check_spikes(m: &Measure, n: usize, grid: &Grid, raw: &[f64], eps: f64, opts: SolveOptions) -> Result<()> {
    for i in 1..raw.len() {
        if (raw[i] - raw[i - 1]).abs() <= JUMP_LIMIT {
            continue;
        }
        let k = if raw[i] > raw[i - 1] { i } else { i - 1 };
        let x = grid.x(k);
        let a = raw_density(m, n, x, eps, opts)?;
        let b = raw_density(m, n, x, 0.25 * eps, opts)?;
        // Atom: ratio 4. Square-root edge: ratio at most 2.
        if a > 0.0 && b / a > 3.0 {
            return Err(Error::GridTooCoarse { x });
        }
    }
    Ok(())
}

fn cell_abs_integral(a: f64, b: f64, h: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * h * (a.abs() + b.abs())
    } else {
        0.5 * h * (a * a + b * b) / (a.abs() + b.abs())
    }
}

/// `∫|p − q|` for the piecewise-linear interpolants, with both resampled onto
/// the lattice of the finer grid extended over the union of the supports.
pub fn l1_distance(p: &DensityProfile, q: &DensityProfile) -> Result<f64> {
    let lo = p.support.0.max(q.support.0);
    let hi = p.support.1.min(q.support.1);
    if !(lo < hi) {
        return Err(Error::DisjointGrids);
    }
    let fine = if p.dx <= q.dx { p } else { q };
    let lo = p.support.0.min(q.support.0);
    let hi = p.support.1.max(q.support.1);
    let h = fine.dx;
    let k0 = ((lo - fine.x0) / h).floor() as i64;
    let k1 = ((hi - fine.x0) / h).ceil() as i64;
    let diff = |k: i64| {
        let x = fine.x0 + h * k as f64;
        p.value_at(x) - q.value_at(x)
    };
    let mut total = 0.0;
    let mut prev = diff(k0);
    for k in k0 + 1..=k1 {
        let cur = diff(k);
        total += cell_abs_integral(prev, cur, h);
        prev = cur;
    }
    Ok(total)
}

/// Default margin `c₁ n^{−6/5}`.
pub fn default_margin(n: usize, c1: f64) -> f64 {
    c1 * (n as f64).powf(-1.2)
}

/// `[a_n − 2/e_n + margin, a_n + 2/e_n − margin]`.
pub fn support_window(c: &CltCoefficients, margin: f64) -> Result<(f64, f64)> {
    let half = c.half_width();
    if !(margin >= 0.0) || margin >= half {
        return Err(Error::EmptyWindow { margin, half_width: half });
    }
    Ok((c.a_n - half + margin, c.a_n + half - margin))
}

/// Profile of the semicircle density on `grid`.
pub fn semicircle_profile(grid: Grid) -> Result<DensityProfile> {
    let lo = grid.lo.max(-2.0);
    let hi = grid.hi.min(2.0);
    if !(lo < hi) {
        return Err(Error::InvalidGrid("grid does not meet [-2, 2]".into()));
    }
    DensityProfile::sample(crate::measure::semicircle_density, grid.lo, grid.hi, grid.points, (lo, hi))
}
