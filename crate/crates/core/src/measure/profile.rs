use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise-linear density sampled on a uniform grid.
///
/// The density is taken to vanish outside `support`; grid cells that do not
/// overlap `support` with positive length contribute nothing to integrals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
    pub support: (f64, f64),
    /// Accumulated bookkeeping error: mass deficit plus clipped negative mass.
    pub mass_tol: f64,
}

impl DensityProfile {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>, support: (f64, f64)) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("x0 = {x0}, dx = {dx}")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid("fewer than two grid points".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("density value {v} is not finite and non-negative")));
        }
        let hi = x0 + dx * (values.len() - 1) as f64;
        let slack = 1e-9 * dx;
        if !(support.0 < support.1) || support.0 < x0 - slack || support.1 > hi + slack {
            return Err(Error::InvalidGrid(format!(
                "support ({}, {}) not inside grid [{x0}, {hi}]",
                support.0, support.1
            )));
        }
        let support = (support.0.max(x0), support.1.min(hi));
        let mut p = DensityProfile { x0, dx, values, support, mass_tol: 0.0 };
        p.mass_tol = (p.mass() - 1.0).abs();
        Ok(p)
    }

    /// Sample `f` at `points` equally spaced nodes on `[lo, hi]`.
    pub fn sample(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize, support: (f64, f64)) -> Result<Self> {
        if points < 2 || !(lo < hi) {
            return Err(Error::InvalidGrid(format!("{lo}:{hi}:{points}")));
        }
        let dx = (hi - lo) / (points - 1) as f64;
        let values = (0..points).map(|i| f(lo + dx * i as f64)).collect();
        Self::new(lo, dx, values, support)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.x(i))
    }

    /// Index range `k0..k1` of grid cells `[x_k, x_{k+1}]` overlapping the support.
    pub fn cells(&self) -> std::ops::Range<usize> {
        let tol = 1e-9;
        let k0 = ((self.support.0 - self.x0) / self.dx + tol).floor().max(0.0) as usize;
        let k1 = ((self.support.1 - self.x0) / self.dx - tol).ceil().max(0.0) as usize;
        k0.min(self.len() - 1)..k1.min(self.len() - 1)
    }

    /// Trapezoid mass over the support cells.
    pub fn mass(&self) -> f64 {
        self.cells()
            .map(|k| 0.5 * (self.values[k] + self.values[k + 1]))
            .sum::<f64>()
            * self.dx
    }

    /// Integral of the piecewise-linear density over `[a, b]`.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        for k in self.cells() {
            let (x0, x1) = (self.x(k), self.x(k + 1));
            let (lo, hi) = (a.max(x0), b.min(x1));
            if lo < hi {
                total += 0.5 * (hi - lo) * (self.value_at_cell(k, lo) + self.value_at_cell(k, hi));
            }
        }
        total
    }

    fn value_at_cell(&self, k: usize, x: f64) -> f64 {
        let s = (x - self.x(k)) / self.dx;
        self.values[k] * (1.0 - s) + self.values[k + 1] * s
    }

    /// Linear interpolation, zero outside the support cells.
    pub fn value_at(&self, x: f64) -> f64 {
        let cells = self.cells();
        let t = (x - self.x0) / self.dx;
        if t < cells.start as f64 || t > cells.end as f64 {
            return 0.0;
        }
        let k = (t.floor() as usize).min(self.len() - 2);
        let s = t - k as f64;
        self.values[k] * (1.0 - s) + self.values[k + 1] * s
    }

    /// Profile rescaled to unit mass.
    pub fn normalized(&self) -> Self {
        let m = self.mass();
        let mut p = self.clone();
        if m > 0.0 {
            p.values.iter_mut().for_each(|v| *v /= m);
        }
        p
    }

    /// Image density under `x ↦ λx`, `λ > 0`.
    pub fn dilate(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        DensityProfile {
            x0: self.x0 * lambda,
            dx: self.dx * lambda,
            values: self.values.iter().map(|v| v / lambda).collect(),
            support: (self.support.0 * lambda, self.support.1 * lambda),
            mass_tol: self.mass_tol,
        }
    }

    /// `∫ x^k p(x) dx`, exact for the piecewise-linear density.
    pub fn moment(&self, k: usize) -> f64 {
        // k + 1 <= 17, so a 10-point rule is exact on every cell.
        let rule = crate::quad::gauss_legendre(10);
        self.cells()
            .map(|c| {
                let (a, b) = (self.x(c), self.x(c + 1));
                let (pa, pb) = (self.values[c], self.values[c + 1]);
                crate::quad::integrate_gl(
                    |x| {
                        let s = (x - a) / self.dx;
                        (pa * (1.0 - s) + pb * s) * x.powi(k as i32)
                    },
                    a,
                    b,
                    &rule,
                )
            })
            .sum()
    }

    /// CSV with header `x,p`, 17 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", fmt17(self.x(i)), fmt17(*v)));
        }
        out
    }

    /// Parse the CSV written by [`DensityProfile::to_csv`]. The support is
    /// taken to be the whole grid.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,p" => {}
            _ => return Err(Error::InvalidGrid("missing `x,p` header".into())),
        }
        let mut xs = Vec::new();
        let mut ps = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::InvalidGrid(format!("bad row `{line}`")))
            };
            xs.push(parse(it.next())?);
            ps.push(parse(it.next())?);
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGrid("fewer than two rows".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        let support = (xs[0], xs[xs.len() - 1]);
        Self::new(xs[0], dx, ps, support)
    }
}

/// Format with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> DensityProfile {
        // Triangle density on [-1, 1].
        DensityProfile::sample(|x| (1.0 - x.abs()).max(0.0), -2.0, 2.0, 401, (-1.0, 1.0)).unwrap()
    }

    #[test]
    fn partial_mass_of_triangle() {
        let p = tent();
        assert!((p.mass_between(-5.0, 0.0) - 0.5).abs() < 1e-13);
        assert!((p.mass_between(0.5, 5.0) - 0.125).abs() < 1e-13);
        assert!((p.mass_between(-0.123, 0.777) + p.mass_between(-5.0, -0.123) + p.mass_between(0.777, 5.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn triangle_mass_and_moments_are_exact() {
        let p = tent();
        assert!((p.mass() - 1.0).abs() < 1e-13);
        assert!(p.moment(1).abs() < 1e-14);
        assert!((p.moment(2) - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn uniform_with_nodes_on_the_support_edge_is_exact() {
        let p = DensityProfile::sample(|x| if x.abs() <= 1.0 { 0.5 } else { 0.0 }, -2.0, 2.0, 2001, (-1.0, 1.0))
            .unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-12);
        assert_eq!(p.value_at(1.5), 0.0);
        assert_eq!(p.value_at(0.3), 0.5);
    }

    #[test]
    fn rejects_negative_values_and_bad_support() {
        assert!(DensityProfile::new(0.0, 0.1, vec![0.0, -1.0, 0.0], (0.0, 0.2)).is_err());
        assert!(DensityProfile::new(0.0, 0.1, vec![0.0, 1.0, 0.0], (-1.0, 0.2)).is_err());
        assert!(DensityProfile::new(0.0, 0.0, vec![0.0, 1.0], (0.0, 0.0)).is_err());
    }

    #[test]
    fn dilation_preserves_mass() {
        let p = tent().dilate(2.5);
        assert!((p.mass() - 1.0).abs() < 1e-13);
        assert!((p.moment(2) - 6.25 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let p = tent();
        let q = DensityProfile::from_csv(&p.to_csv()).unwrap();
        assert_eq!(q.len(), p.len());
        for (a, b) in p.values.iter().zip(&q.values) {
            assert_eq!(a, b);
        }
        assert!(p.to_csv().lines().nth(1).unwrap().contains("e"));
        assert!(!p.to_csv().contains('\r'));
    }
}
