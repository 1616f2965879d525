//! Probability measures on the real line: atomic, semicircle, free Meixner,
//! arcsine, and sampled densities.

mod parse;
mod profile;

pub use parse::parse_measure;
pub use profile::{fmt17, DensityProfile};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Largest supported moment order.
pub const MOMENT_CAP: usize = 16;

/// Atoms closer than this are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Nodes of the Gauss–Chebyshev rule used on square-root edges.
const EDGE_RULE_NODES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(position: f64, weight: f64) -> Self {
        Atom { position, weight }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Measure {
    Atomic(Vec<Atom>),
    Semicircle,
    FreeMeixner { a: f64, b: f64, d: f64 },
    Arcsine { center: f64, halfwidth: f64 },
    Grid(DensityProfile),
}

impl Measure {
    /// Atomic measure from `(position, weight)` pairs.
    ///
    /// Atoms are sorted and merged when closer than [`ATOM_MERGE_TOL`]. Weights
    /// must be positive and sum to one within `1e-9`; the sum is then
    /// renormalized exactly.
    pub fn atomic(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        for &(u, w) in pairs {
            if !u.is_finite() || !w.is_finite() || !(w > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom ({u}, {w}) needs finite position and positive weight")));
            }
        }
        let mut sorted: Vec<(f64, f64)> = pairs.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<Atom> = Vec::with_capacity(sorted.len());
        for (u, w) in sorted {
            match atoms.last_mut() {
                Some(last) if u - last.position < ATOM_MERGE_TOL => last.weight += w,
                _ => atoms.push(Atom::new(u, w)),
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        atoms.iter_mut().for_each(|a| a.weight /= total);
        Ok(Measure::Atomic(atoms))
    }

    /// Free Meixner law with parameters in the absolutely continuous regime.
    pub fn free_meixner(a: f64, b: f64, d: f64) -> Result<Self> {
        if !(a.is_finite() && b < 1.0 && d < 1.0) {
            return Err(Error::InvalidMeasure(format!("meixner({a}, {b}, {d}) needs b < 1, d < 1")));
        }
        let m = Measure::FreeMeixner { a, b, d };
        let (lo, hi) = m.support();
        let f = |x: f64| b * x * x + a * (1.0 - b) * x + 1.0 - d;
        // f is quadratic, so positivity on the interval is decided by the
        // endpoints and the vertex.
        let mut probes = vec![lo, hi];
        if b != 0.0 {
            let vertex = -a * (1.0 - b) / (2.0 * b);
            if vertex > lo && vertex < hi {
                probes.push(vertex);
            }
        }
        if probes.iter().any(|&x| !(f(x) > 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "meixner({a}, {b}, {d}): f vanishes on the support, the law has atoms"
            )));
        }
        let mass = m.edge_integral(|_| 1.0);
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidMeasure(format!(
                "meixner({a}, {b}, {d}): absolutely continuous part has mass {mass}"
            )));
        }
        Ok(m)
    }

    pub fn arcsine(center: f64, halfwidth: f64) -> Result<Self> {
        if !center.is_finite() || !(halfwidth > 0.0) || !halfwidth.is_finite() {
            return Err(Error::InvalidMeasure(format!("arcsine({center}, {halfwidth})")));
        }
        Ok(Measure::Arcsine { center, halfwidth })
    }

    pub fn grid(profile: DensityProfile) -> Result<Self> {
        let mass = profile.mass();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMeasure(format!("grid density has mass {mass}")));
        }
        Ok(Measure::Grid(profile))
    }

    /// Symmetric two-point law on `±1`.
    pub fn bernoulli() -> Self {
        Measure::Atomic(vec![Atom::new(-1.0, 0.5), Atom::new(1.0, 0.5)])
    }

    /// `N`-point Gauss quadrature of the semicircle law: matches its moments
    /// up to order `2N - 1`.
    pub fn semicircle_atoms(count: usize) -> Self {
        let np1 = (count + 1) as f64;
        let atoms = (1..=count)
            .rev()
            .map(|j| {
                let theta = j as f64 * PI / np1;
                Atom::new(2.0 * theta.cos(), 2.0 / np1 * theta.sin().powi(2))
            })
            .collect();
        Measure::Atomic(atoms)
    }

    pub fn atoms(&self) -> Option<&[Atom]> {
        match self {
            Measure::Atomic(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Measure::Atomic(atoms) => {
                let k = atoms.len();
                (0..k).all(|i| {
                    let (p, q) = (atoms[i], atoms[k - 1 - i]);
                    (p.position + q.position).abs() < 1e-12 && (p.weight - q.weight).abs() < 1e-12
                })
            }
            Measure::Semicircle => true,
            Measure::FreeMeixner { a, .. } => *a == 0.0,
            Measure::Arcsine { center, .. } => *center == 0.0,
            Measure::Grid(_) => false,
        }
    }

    /// Closed interval carrying all the mass.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Measure::Atomic(a) => (a[0].position, a[a.len() - 1].position),
            Measure::Semicircle => (-2.0, 2.0),
            Measure::FreeMeixner { a, b, d } => {
                let r = 2.0 * (1.0 - d).sqrt() / (1.0 - b);
                (a - r, a + r)
            }
            Measure::Arcsine { center, halfwidth } => (center - halfwidth, center + halfwidth),
            Measure::Grid(p) => p.support,
        }
    }

    /// `∫ g(x) p(x) dx` for the Meixner law via `x = a + r t`, exact on the
    /// square-root edges.
    fn edge_integral(&self, g: impl Fn(f64) -> f64) -> f64 {
        let Measure::FreeMeixner { a, b, d } = *self else {
            unreachable!("edge_integral is only used for free Meixner laws")
        };
        let r = 2.0 * (1.0 - d).sqrt() / (1.0 - b);
        let f = |x: f64| b * x * x + a * (1.0 - b) * x + 1.0 - d;
        // p(x) dx = (1-b) r² √(1-t²) / (2π f(x)) dt
        let scale = (1.0 - b) * r * r / (2.0 * PI);
        let (t, w) = quad::gauss_chebyshev_u(EDGE_RULE_NODES);
        t.iter()
            .zip(&w)
            .map(|(&t, &w)| {
                let x = a + r * t;
                w * g(x) / f(x)
            })
            .sum::<f64>()
            * scale
    }
}

/// `∫ u^k μ(du)`.
pub fn moment(m: &Measure, k: usize) -> Result<f64> {
    if k > MOMENT_CAP {
        return Err(Error::UnsupportedMoment { k, cap: MOMENT_CAP });
    }
    Ok(match m {
        Measure::Atomic(atoms) => atoms.iter().map(|a| a.weight * a.position.powi(k as i32)).sum(),
        Measure::Semicircle => {
            if k % 2 == 1 {
                0.0
            } else {
                catalan(k / 2)
            }
        }
        Measure::Arcsine { center, halfwidth } => (0..=k)
            .step_by(2)
            .map(|j| binomial(k, j) * center.powi((k - j) as i32) * halfwidth.powi(j as i32) * binomial(j, j / 2) / 2f64.powi(j as i32))
            .sum(),
        Measure::FreeMeixner { .. } => m.edge_integral(|x| x.powi(k as i32)),
        Measure::Grid(p) => {
            let (x0, x1) = (p.x0, p.x_max());
            let cells = p.cells();
            let open_lo = cells.start == 0 && p.values[0] > 1e-12 && p.support.0 <= x0;
            let open_hi = cells.end == p.len() - 1 && p.values[p.len() - 1] > 1e-12 && p.support.1 >= x1;
            if open_lo || open_hi {
                return Err(Error::NonIntegrable);
            }
            p.moment(k)
        }
    })
}

pub fn catalan(k: usize) -> f64 {
    // C_{j+1} = C_j · 2(2j+1)/(j+2)
    (0..k).fold(1.0, |c, j| c * 2.0 * (2 * j + 1) as f64 / (j + 2) as f64)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Affine image of an atomic measure with mean 0 and variance 1.
pub fn standardize(m: &Measure) -> Result<Measure> {
    let Measure::Atomic(atoms) = m else {
        return Err(Error::InvalidMeasure("standardize applies to atomic measures".into()));
    };
    let mean: f64 = atoms.iter().map(|a| a.weight * a.position).sum();
    let var: f64 = atoms.iter().map(|a| a.weight * (a.position - mean).powi(2)).sum();
    if !(var > 0.0) || atoms.len() < 2 {
        return Err(Error::DegenerateMeasure("variance is zero".into()));
    }
    let sd = var.sqrt();
    let mut out: Vec<Atom> = atoms
        .iter()
        .map(|a| Atom::new((a.position - mean) / sd, a.weight))
        .collect();
    // One correction pass removes the rounding left by the first one.
    let mean2: f64 = out.iter().map(|a| a.weight * a.position).sum();
    out.iter_mut().for_each(|a| a.position -= mean2);
    let var2: f64 = out.iter().map(|a| a.weight * a.position * a.position).sum();
    let sd2 = var2.sqrt();
    out.iter_mut().for_each(|a| a.position /= sd2);
    Ok(Measure::Atomic(out))
}

/// Semicircle density `√((4 - x²)₊) / 2π`.
pub fn semicircle_density(x: f64) -> f64 {
    (4.0 - x * x).max(0.0).sqrt() / (2.0 * PI)
}

pub fn density_at(m: &Measure, x: f64) -> Result<f64> {
    Ok(match m {
        Measure::Atomic(_) => return Err(Error::AtomicDensity),
        Measure::Semicircle => semicircle_density(x),
        Measure::FreeMeixner { a, b, d } => {
            let s = 4.0 * (1.0 - d) - (1.0 - b).powi(2) * (x - a).powi(2);
            if s <= 0.0 {
                0.0
            } else {
                let f = b * x * x + a * (1.0 - b) * x + 1.0 - d;
                s.sqrt() / (2.0 * PI * f)
            }
        }
        Measure::Arcsine { center, halfwidth } => {
            let s = halfwidth * halfwidth - (x - center).powi(2);
            if s <= 0.0 {
                0.0
            } else {
                1.0 / (PI * s.sqrt())
            }
        }
        Measure::Grid(p) => p.value_at(x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_moments_are_catalan() {
        let want = [1.0, 1.0, 2.0, 5.0, 14.0];
        for (j, w) in want.iter().enumerate() {
            assert_eq!(moment(&Measure::Semicircle, 2 * j).unwrap(), *w);
        }
        assert_eq!(moment(&Measure::Semicircle, 3).unwrap(), 0.0);
    }

    #[test]
    fn semicircle_moments_match_chebyshev_oracle() {
        // x = 2 cos θ turns the density into (2/π) sin²θ dθ.
        let (t, w) = quad::gauss_chebyshev_u(64);
        for k in 0..=16 {
            let oracle: f64 = t.iter().zip(&w).map(|(t, w)| w * (2.0 * t).powi(k as i32)).sum::<f64>() * 2.0 / PI;
            let got = moment(&Measure::Semicircle, k).unwrap();
            assert!((oracle - got).abs() < 1e-9 * got.max(1.0), "k={k}");
        }
    }

    #[test]
    fn bernoulli_fourth_moment() {
        let m = Measure::atomic(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        assert_eq!(moment(&m, 4).unwrap(), 1.0);
    }

    #[test]
    fn moment_cap() {
        assert_eq!(
            moment(&Measure::Semicircle, 17),
            Err(Error::UnsupportedMoment { k: 17, cap: 16 })
        );
    }

    #[test]
    fn arcsine_moments() {
        let m = Measure::arcsine(0.0, 2f64.sqrt()).unwrap();
        assert!((moment(&m, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((moment(&m, 4).unwrap() - 1.5).abs() < 1e-14);
        let shifted = Measure::arcsine(1.0, 1.0).unwrap();
        // mean 1, variance 1/2
        assert!((moment(&shifted, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((moment(&shifted, 2).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn standardize_examples() {
        let m = Measure::atomic(&[(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let s = standardize(&m).unwrap();
        let a = s.atoms().unwrap();
        assert!((a[0].position + 1.0).abs() < 1e-15 && (a[1].position - 1.0).abs() < 1e-15);

        let skew = standardize(&Measure::atomic(&[(0.0, 0.75), (1.0, 0.25)]).unwrap()).unwrap();
        let a = skew.atoms().unwrap();
        assert!((a[0].position + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((a[1].position - 3f64.sqrt()).abs() < 1e-14);
        assert_eq!(a[0].weight, 0.75);
    }

    #[test]
    fn standardize_dirac_is_degenerate() {
        let m = Measure::atomic(&[(3.0, 1.0)]).unwrap();
        assert!(matches!(standardize(&m), Err(Error::DegenerateMeasure(_))));
    }

    #[test]
    fn atoms_merge_and_sort() {
        let m = Measure::atomic(&[(1.0, 0.25), (-1.0, 0.5), (1.0 + 1e-14, 0.25)]).unwrap();
        let a = m.atoms().unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].position, -1.0);
        assert_eq!(a[1].weight, 0.5);
        assert!(Measure::atomic(&[(0.0, 0.5)]).is_err());
        assert!(Measure::atomic(&[(0.0, 1.5), (1.0, -0.5)]).is_err());
    }

    #[test]
    fn density_examples() {
        assert!((density_at(&Measure::Semicircle, 0.0).unwrap() - 1.0 / PI).abs() < 1e-16);
        assert_eq!(density_at(&Measure::bernoulli(), 0.0), Err(Error::AtomicDensity));
        let mx = Measure::free_meixner(0.0, 0.0, 0.0).unwrap();
        for i in 0..1001 {
            let x = -3.0 + 6.0 * i as f64 / 1000.0;
            let d = density_at(&mx, x).unwrap() - density_at(&Measure::Semicircle, x).unwrap();
            assert!(d.abs() <= 1e-15, "x={x}");
        }
    }

    #[test]
    fn meixner_mass_by_independent_substitution() {
        // Oracle: x = a + r sin θ with a plain midpoint rule in θ, which is
        // spectrally accurate for the periodic integrand.
        let (a, b, d) = (0.1, 0.02, 0.05);
        let m = Measure::free_meixner(a, b, d).unwrap();
        let r = 2.0 * (1.0 - d).sqrt() / (1.0 - b);
        let steps = 4000;
        let h = PI / steps as f64;
        let mass: f64 = (0..steps)
            .map(|i| {
                let th = -PI / 2.0 + (i as f64 + 0.5) * h;
                density_at(&m, a + r * th.sin()).unwrap() * r * th.cos() * h
            })
            .sum();
        assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
        assert!((moment(&m, 0).unwrap() - 1.0).abs() < 1e-8);
        // F(z) = z - v/(z - a) + ..., v = (1-d)/(1-b): mean 0, variance v, m3 = v a.
        let v = (1.0 - d) / (1.0 - b);
        assert!(moment(&m, 1).unwrap().abs() < 1e-9);
        assert!((moment(&m, 2).unwrap() - v).abs() < 1e-9);
        assert!((moment(&m, 3).unwrap() - v * a).abs() < 1e-9);
    }

    #[test]
    fn meixner_rejects_atomic_regime() {
        assert!(Measure::free_meixner(0.0, 1.5, 0.0).is_err());
        assert!(Measure::free_meixner(3.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn semicircle_atoms_match_moments() {
        let m = Measure::semicircle_atoms(50);
        for k in 0..=16 {
            let got = moment(&m, k).unwrap();
            let want = moment(&Measure::Semicircle, k).unwrap();
            assert!((got - want).abs() < 1e-10 * want.max(1.0), "k={k}");
        }
    }
}
