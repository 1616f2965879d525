//! Logarithmic energy, free entropy and free Fisher information of density
//! profiles.
//!
//! Profiles are piecewise linear, so every log-kernel integral is reduced to
//! the one-cell integrals `L_j(c) = ∫₀¹ s^j log|c − s| ds`, which are done in
//! closed form next to the singularity and by Gauss–Legendre elsewhere.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{invert_density, EpsPolicy, Grid};
use crate::error::{Error, Result};
use crate::expansion::{chi_deficit_leading, fisher_excess_leading, fit_rate};
use crate::measure::{fmt17, moment, DensityProfile, Measure};

/// `χ(w) = ½ log(2πe)`.
pub fn semicircle_chi() -> f64 {
    0.5 * (2.0 * PI * std::f64::consts::E).ln()
}

const CHI_OFFSET: f64 = 0.75;
/// Entropies below this are reported as nonphysical.
pub const NONPHYSICAL_CHI: f64 = -10.0;
/// Fraction of the support width used to probe the edge exponent.
const EDGE_FRACTION: f64 = 0.05;

fn gl10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = crate::quad::gauss_legendre(10);
        // Map to [0, 1].
        (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
    })
}

/// `∫ v^i log|v| dv` antiderivative, continuous through 0.
fn log_antiderivative(i: usize, v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let k = (i + 1) as f64;
    v.powi(i as i32 + 1) / k * (v.abs().ln() - 1.0 / k)
}

/// `[L_0(c), .., L_3(c)]` with `L_j(c) = ∫₀¹ s^j log|c − s| ds`.
fn cell_log_moments(c: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    if (c - 0.5).abs() >= 1.5 {
        let (x, w) = gl10();
        for (s, wt) in x.iter().zip(w) {
            let l = (c - s).abs().ln() * wt;
            let mut p = 1.0;
            for o in out.iter_mut() {
                *o += p * l;
                p *= s;
            }
        }
        return out;
    }
    // s = c − v, v from c − 1 to c.
    let prim: Vec<f64> = (0..4).map(|i| log_antiderivative(i, c) - log_antiderivative(i, c - 1.0)).collect();
    const BINOM: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    for (j, o) in out.iter_mut().enumerate() {
        *o = (0..=j).map(|i| BINOM[j][i] * c.powi((j - i) as i32) * (-1f64).powi(i as i32) * prim[i]).sum();
    }
    out
}

/// Coefficients of `q_ab(u) = ∫ψ_a(s)ψ_b(s − u) ds` on `u ∈ [0, 1]`, with
/// `ψ₀ = 1 − s`, `ψ₁ = s`.
const Q_PLUS: [[[f64; 4]; 2]; 2] = [
    [[1.0 / 3.0, -0.5, 0.0, 1.0 / 6.0], [1.0 / 6.0, -0.5, 0.5, -1.0 / 6.0]],
    [[1.0 / 6.0, 0.5, -0.5, -1.0 / 6.0], [1.0 / 3.0, -0.5, 0.0, 1.0 / 6.0]],
];

/// `J_ab(m) = ∫₀¹∫₀¹ log|m + s − t| ψ_a(s) ψ_b(t) ds dt`.
fn cell_pair_kernel(m: i64) -> [[f64; 2]; 2] {
    let neg = cell_log_moments(-(m as f64));
    let pos = cell_log_moments(m as f64);
    let mut j = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            j[a][b] = (0..4).map(|i| Q_PLUS[a][b][i] * neg[i] + Q_PLUS[b][a][i] * pos[i]).sum();
        }
    }
    j
}

fn check_bounded(p: &DensityProfile) -> Result<()> {
    let cells = p.cells();
    if cells.is_empty() {
        return Err(Error::InvalidGrid("profile has no support cells".into()));
    }
    let peak = p.values.iter().cloned().fold(0.0, f64::max);
    let last = p.len() - 1;
    let open = |i: usize| p.values[i] > 1e-8 * peak;
    if (cells.start == 0 && open(0)) || (cells.end == last && open(last)) {
        return Err(Error::UnboundedSupport);
    }
    Ok(())
}

fn renormalized(p: &DensityProfile) -> Result<DensityProfile> {
    check_bounded(p)?;
    let mass = p.mass();
    if !(mass > 0.0) {
        return Err(Error::InvalidGrid("profile has zero mass".into()));
    }
    if (mass - 1.0).abs() > 0.01 {
        log::warn!("profile mass {mass} differs from 1 by more than 0.01");
    }
    Ok(p.normalized())
}

/// `∬ log|x − y| p(x) p(y) dx dy` (the negative of the logarithmic energy),
/// exact for the piecewise-linear profile after renormalization to unit mass.
pub fn log_energy(p: &DensityProfile) -> Result<f64> {
    let p = renormalized(p)?;
    let cells = p.cells();
    let (k0, k1) = (cells.start, cells.end);
    let width = (k1 - k0) as i64;
    let kernel: Vec<[[f64; 2]; 2]> = (-width..=width).map(cell_pair_kernel).collect();
    let v = &p.values;
    let rows: Vec<f64> = (k0..k1)
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for l in k0..k1 {
                let j = &kernel[(k as i64 - l as i64 + width) as usize];
                let (pk0, pk1, pl0, pl1) = (v[k], v[k + 1], v[l], v[l + 1]);
                acc += pk0 * (pl0 * j[0][0] + pl1 * j[0][1]) + pk1 * (pl0 * j[1][0] + pl1 * j[1][1]);
            }
            acc
        })
        .collect();
    let mass = p.mass();
    Ok(p.dx.ln() * mass * mass + p.dx * p.dx * rows.iter().sum::<f64>())
}

/// `χ = ∬ log|x − y| p p + 3/4 + ½ log 2π`.
pub fn free_entropy(p: &DensityProfile) -> Result<f64> {
    let chi = chi_from_energy(log_energy(p)?);
    if chi < NONPHYSICAL_CHI {
        log::warn!("NonphysicalProfile: free entropy {chi} is below {NONPHYSICAL_CHI}");
    }
    Ok(chi)
}

fn chi_from_energy(e: f64) -> f64 {
    e + CHI_OFFSET + 0.5 * (2.0 * PI).ln()
}

/// `∫ u^k p(u) log|x − u| du` for `k ∈ {0, 1}`, exact for the profile.
pub fn profile_log_potential(p: &DensityProfile, x: f64, k: usize) -> f64 {
    assert!(k <= 1, "only k = 0, 1 are supported");
    let h = p.dx;
    let xi = (x - p.x0) / h;
    let mut total = 0.0;
    let mut mass = 0.0;
    for c in p.cells() {
        let (a, b) = (p.values[c], p.values[c + 1]);
        let l = cell_log_moments(xi - c as f64);
        // p on the cell is a + (b − a)s; u = x_c + h s.
        let (q0, q1) = (a, b - a);
        let base = p.x(c);
        let (m0, m1, m2) = if k == 0 { (q0, q1, 0.0) } else { (base * q0, base * q1 + h * q0, h * q1) };
        total += h * (m0 * l[0] + m1 * l[1] + m2 * l[2]);
        mass += h * (m0 + 0.5 * m1 + m2 / 3.0);
    }
    total + h.ln() * mass
}

/// `∫ p_w(u) log|x − u| du = x²/4 − ½` on `[−2, 2]`.
pub fn semicircle_log_potential(x: f64) -> Result<f64> {
    if !(x.abs() <= 2.0) {
        return Err(Error::OutsideSupport(x));
    }
    Ok(0.25 * x * x - 0.5)
}

/// `∫ u p_w(u) log|x − u| du = −x + x³/6` on `[−2, 2]`.
pub fn odd_log_potential(x: f64) -> Result<f64> {
    if !(x.abs() <= 2.0) {
        return Err(Error::OutsideSupport(x));
    }
    Ok(-x + x * x * x / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    alpha: f64,
    /// Tail mass of `p³` beyond the outermost node, for square-root edges.
    tail: f64,
}

/// Fit `p ~ C dist^α` over the outer part of the support at one end.
fn probe_edge(p: &DensityProfile, left: bool) -> Edge {
    let cells = p.cells();
    let (first, last) = (cells.start, cells.end);
    let span = last - first;
    let depth = ((EDGE_FRACTION * span as f64).round() as usize).clamp(4, span.max(4));
    // Distance is measured to half a cell beyond the outermost node.
    let edge_node = if left { first } else { last };
    let pts: Vec<(f64, f64)> = (1..depth.min(span))
        .map(|j| if left { first + j } else { last - j })
        .filter(|&i| p.values[i] > 0.0)
        .map(|i| {
            let d = (i as f64 - edge_node as f64).abs() + 0.5;
            (d.ln(), p.values[i].ln())
        })
        .collect();
    let alpha = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|q| q.0).sum::<f64>() / k;
        let my = pts.iter().map(|q| q.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let mut tail = 0.0;
    if (0.3..0.7).contains(&alpha) {
        // p² linear near the edge: ∫₀^δ (p_L²(1 − t/δ))^{3/2} dt = (2/5) p_L³ δ.
        let inner = if left { edge_node + 1 } else { edge_node - 1 };
        let (pl, pi) = (p.values[edge_node], p.values[inner]);
        let slope = pi * pi - pl * pl;
        if pl > 0.0 && slope > 0.0 {
            let delta = (pl * pl / slope).min(1.0) * p.dx;
            tail = 0.4 * pl.powi(3) * delta;
        }
    }
    Edge { alpha, tail }
}

/// Fitted edge exponents `(left, right)` of `p ~ C dist^α`.
pub fn edge_exponents(p: &DensityProfile) -> (f64, f64) {
    (probe_edge(p, true).alpha, probe_edge(p, false).alpha)
}

/// `Φ = (4π²/3) ∫ p³`.
///
/// The profile is not renormalized: at square-root edges the trapezoid mass
/// deficit is `O(dx^{3/2})` and rescaling would triple it in `Φ`.
///
/// Square-root edges get the cube integrated up to the edge extrapolated from
/// the last two nodes. `NonIntegrableCube` when an edge behaves like
/// `dist^α` with `3α ≤ −1`.
pub fn fisher_information(p: &DensityProfile) -> Result<f64> {
    check_bounded(p)?;
    let left = probe_edge(p, true);
    let right = probe_edge(p, false);
    for e in [left, right] {
        if 3.0 * e.alpha <= -1.0 {
            return Err(Error::NonIntegrableCube { alpha: e.alpha });
        }
    }
    let cube: f64 = p.cells().map(|k| 0.5 * (p.values[k].powi(3) + p.values[k + 1].powi(3))).sum::<f64>() * p.dx;
    Ok(4.0 * PI * PI / 3.0 * (cube + left.tail + right.tail))
}

/// Entropy and Fisher information of `μ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntropyReport {
    pub n: usize,
    pub chi: f64,
    pub fisher: f64,
    pub log_energy: f64,
    pub chi_deficit: f64,
    pub fisher_excess: f64,
}

impl EntropyReport {
    pub fn from_profile(n: usize, p: &DensityProfile) -> Result<Self> {
        let log_energy = log_energy(p)?;
        let chi = chi_from_energy(log_energy);
        if chi < NONPHYSICAL_CHI {
            log::warn!("NonphysicalProfile: free entropy {chi} is below {NONPHYSICAL_CHI}");
        }
        let fisher = fisher_information(p)?;
        Ok(EntropyReport {
            n,
            chi,
            fisher,
            log_energy,
            chi_deficit: semicircle_chi() - chi,
            fisher_excess: fisher - 1.0,
        })
    }

    /// JSON object with 17 significant digits.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"n\":{},\"chi\":{},\"fisher\":{},\"logEnergy\":{},\"chiDeficit\":{},\"fisherExcess\":{}}}",
            self.n,
            fmt17(self.chi),
            fmt17(self.fisher),
            fmt17(self.log_energy),
            fmt17(self.chi_deficit),
            fmt17(self.fisher_excess)
        )
    }
}

/// Per-n reports and the fitted rates of the entropy deficit and Fisher excess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub reports: Vec<EntropyReport>,
    pub m3: f64,
    /// `n · chiDeficit` at the largest `n`, against its limit `m₃²/6`.
    pub chi_scaled: f64,
    pub chi_target: f64,
    /// `n · fisherExcess` at the largest `n`, against its limit `m₃²`.
    pub fisher_scaled: f64,
    pub fisher_target: f64,
    /// `(exponent, constant)` of the power-law fits, when the values are positive.
    pub chi_fit: Option<(f64, f64)>,
    pub fisher_fit: Option<(f64, f64)>,
}

/// Entropy reports for `μ_n` over `n_list`, in ascending `n`.
pub fn rate_report(m: &Measure, n_list: &[usize], grid: Grid, policy: EpsPolicy) -> Result<RateReport> {
    if n_list.len() < 3 {
        return Err(Error::InvalidGrid("rate report needs at least three values of n".into()));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let reports: Vec<EntropyReport> = ns
        .iter()
        .map(|&n| EntropyReport::from_profile(n, &invert_density(m, n, grid, policy)?))
        .collect::<Result<_>>()?;
    let m3 = moment(m, 3)?;
    let last = reports.last().expect("nonempty");
    let nl = last.n as f64;
    let chi_vals: Vec<f64> = reports.iter().map(|r| r.chi_deficit).collect();
    let fisher_vals: Vec<f64> = reports.iter().map(|r| r.fisher_excess).collect();
    Ok(RateReport {
        m3,
        chi_scaled: nl * last.chi_deficit,
        chi_target: chi_deficit_leading(m3, 1),
        fisher_scaled: nl * last.fisher_excess,
        fisher_target: fisher_excess_leading(m3, 1),
        chi_fit: fit_rate(&ns, &chi_vals),
        fisher_fit: fit_rate(&ns, &fisher_vals),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::semicircle_density;

    fn semicircle(points: usize) -> DensityProfile {
        DensityProfile::sample(semicircle_density, -2.5, 2.5, points, (-2.0, 2.0)).unwrap()
    }

    fn brute_kernel(m: i64, a: usize, b: usize) -> f64 {
        // Oracle: tensor Gauss–Legendre on sub-squares away from the diagonal,
        // which is only reached for m = 0, ±1 and is excluded here.
        let (x, w) = crate::quad::gauss_legendre(40);
        let psi = |i: usize, s: f64| if i == 0 { 1.0 - s } else { s };
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            for (yj, wj) in x.iter().zip(&w) {
                let s = 0.5 * (xi + 1.0);
                let t = 0.5 * (yj + 1.0);
                acc += 0.25 * wi * wj * (m as f64 + s - t).abs().ln() * psi(a, s) * psi(b, t);
            }
        }
        acc
    }

    #[test]
    fn diagonal_kernel_sums_to_known_integral() {
        // ∫₀¹∫₀¹ log|s − t| ds dt = −3/2.
        let j = cell_pair_kernel(0);
        assert!((j[0][0] + j[0][1] + j[1][0] + j[1][1] + 1.5).abs() < 1e-14);
        assert!((j[0][1] - j[1][0]).abs() < 1e-15);
    }

    #[test]
    fn kernel_matches_tensor_quadrature() {
        for m in [-7i64, -3, -2, 2, 3, 12] {
            let j = cell_pair_kernel(m);
            for a in 0..2 {
                for b in 0..2 {
                    assert!((j[a][b] - brute_kernel(m, a, b)).abs() < 1e-13, "m={m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn cell_moments_at_endpoints_are_exact() {
        // ∫₀¹ s^j log s = −1/(j+1)², ∫₀¹ s^j log(1 − s) = −H_{j+1}/(j+1).
        let l0 = cell_log_moments(0.0);
        let l1 = cell_log_moments(1.0);
        for j in 0..4 {
            let k = (j + 1) as f64;
            let harmonic: f64 = (1..=j + 1).map(|i| 1.0 / i as f64).sum();
            assert!((l0[j] + 1.0 / (k * k)).abs() < 1e-15);
            assert!((l1[j] + harmonic / k).abs() < 1e-14);
        }
    }

    #[test]
    fn cell_moments_match_quadrature_at_close_range() {
        // Oracle: split at the singularity and substitute |c − s| = r⁶ on each
        // side, which leaves a smooth enough integrand for Gauss–Legendre.
        let (x, w) = crate::quad::gauss_legendre(80);
        for &c in &[0.3, 1.7, -0.8, 0.5, 1.2] {
            let l = cell_log_moments(c);
            for (j, lj) in l.iter().enumerate() {
                let piece = |lo: f64, hi: f64| -> f64 {
                    if hi <= lo {
                        return 0.0;
                    }
                    let sign = if hi <= c { -1.0 } else { 1.0 };
                    let (r0, r1) = ((lo - c).abs().powf(1.0 / 6.0), (hi - c).abs().powf(1.0 / 6.0));
                    let (ra, rb) = (r0.min(r1), r0.max(r1));
                    let mut acc = 0.0;
                    for (xi, wi) in x.iter().zip(&w) {
                        let r = 0.5 * (rb - ra) * xi + 0.5 * (rb + ra);
                        let s = c + sign * r.powi(6);
                        acc += 0.5 * (rb - ra) * wi * 6.0 * r.powi(5) * s.powi(j as i32) * 6.0 * r.ln();
                    }
                    acc
                };
                let mid = c.clamp(0.0, 1.0);
                let want = piece(0.0, mid) + piece(mid, 1.0);
                assert!((lj - want).abs() < 1e-12, "c={c} j={j}: {lj} vs {want}");
            }
        }
    }

    #[test]
    fn semicircle_closed_forms() {
        let p = semicircle(2001);
        assert!((log_energy(&p).unwrap() + 0.25).abs() < 1e-4);
        assert!((free_entropy(&p).unwrap() - semicircle_chi()).abs() < 1e-4);
        assert!((fisher_information(&p).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(free_entropy(&p).unwrap(), log_energy(&p).unwrap() + 0.75 + 0.5 * (2.0 * PI).ln());
    }

    #[test]
    fn uniform_energy() {
        let p = DensityProfile::sample(|x| if x.abs() <= 1.0 { 0.5 } else { 0.0 }, -1.0, 1.0, 2001, (-1.0, 1.0));
        // A step at the grid end is an open boundary.
        assert!(matches!(log_energy(&p.unwrap()), Err(Error::UnboundedSupport)));
        let p = DensityProfile::sample(|x| if x.abs() <= 1.0 { 0.5 } else { 0.0 }, -2.0, 2.0, 2001, (-1.0, 1.0))
            .unwrap();
        assert!((log_energy(&p).unwrap() - (2f64.ln() - 1.5)).abs() < 1e-5);
    }

    #[test]
    fn dilation_adds_log_lambda() {
        let p = semicircle(1001);
        let e = log_energy(&p).unwrap();
        for lambda in [0.5, 2.0, 3.7] {
            let d = log_energy(&p.dilate(lambda)).unwrap();
            assert!((d - e - lambda.ln()).abs() < 1e-12);
        }
    }

    fn arcsine_profile(cells: usize) -> DensityProfile {
        // Nodes at ±h; the edge nodes carry the exact edge-cell mass so the
        // interpolant does not lose the integrable singularity.
        let h = 2f64.sqrt();
        let dx = 2.0 * h / cells as f64;
        let pts = cells + 21;
        let lo = -h - 10.0 * dx;
        let dens = move |x: f64| if x.abs() < h - 1e-12 { 1.0 / (PI * (h * h - x * x).sqrt()) } else { 0.0 };
        let mut p = DensityProfile::sample(dens, lo, lo + dx * (pts - 1) as f64, pts, (-h, h)).unwrap();
        let edge_mass = (-1.0 + dx / h).asin() / PI + 0.5;
        p.values[10] = 2.0 * edge_mass / dx - p.values[11];
        p.values[pts - 11] = p.values[10];
        p
    }

    #[test]
    fn arcsine_entropy_and_fisher() {
        // Equilibrium measure of [−h, h]: ∬log|x − y| = log(h/2) = −½ log 2.
        let p = arcsine_profile(2000);
        let want = -0.5 * 2f64.ln() + 0.75 + 0.5 * (2.0 * PI).ln();
        assert!((free_entropy(&p).unwrap() - want).abs() < 1e-4);
        match fisher_information(&p) {
            Err(Error::NonIntegrableCube { alpha }) => assert!((alpha + 0.5).abs() < 0.1, "{alpha}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dilated_semicircle_fisher() {
        let p = semicircle(2001);
        for lambda in [0.5, 2.0] {
            let f = fisher_information(&p.dilate(lambda)).unwrap();
            assert!((f - 1.0 / (lambda * lambda)).abs() < 1e-6, "{f}");
        }
    }

    #[test]
    fn potentials_match_closed_forms() {
        let p = DensityProfile::sample(semicircle_density, -2.0, 2.0, 40001, (-2.0, 2.0)).unwrap();
        for i in 0..50 {
            let x = -1.96 + 0.08 * i as f64;
            let v0 = profile_log_potential(&p, x, 0);
            let v1 = profile_log_potential(&p, x, 1);
            assert!((v0 - semicircle_log_potential(x).unwrap()).abs() < 1e-6, "x={x}: {v0}");
            assert!((v1 - odd_log_potential(x).unwrap()).abs() < 1e-6, "x={x}: {v1}");
        }
    }

    #[test]
    fn potential_examples() {
        assert_eq!(semicircle_log_potential(0.0).unwrap(), -0.5);
        assert_eq!(semicircle_log_potential(2.0).unwrap(), 0.5);
        assert_eq!(semicircle_log_potential(1.0).unwrap(), -0.25);
        assert_eq!(odd_log_potential(0.0).unwrap(), 0.0);
        assert!((odd_log_potential(2.0).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        assert!((odd_log_potential(1.0).unwrap() + 5.0 / 6.0).abs() < 1e-15);
        assert!(matches!(odd_log_potential(2.5), Err(Error::OutsideSupport(_))));
    }

    #[test]
    fn spike_is_very_negative() {
        let p = DensityProfile::sample(|x| (1e4 * (1e-4 - x.abs())).max(0.0), -1.0, 1.0, 20001, (-1e-4, 1e-4))
            .unwrap();
        assert!(free_entropy(&p).unwrap() < -5.0);
    }

    #[test]
    fn report_json_keys() {
        let r = EntropyReport::from_profile(4, &semicircle(2001)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["n", "chi", "fisher", "logEnergy", "chiDeficit", "fisherExcess"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert!(r.chi_deficit.abs() < 1e-4 && r.fisher_excess.abs() < 1e-4);
    }
}
