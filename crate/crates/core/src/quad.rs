//! Quadrature rules shared by the measure and entropy modules.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]` with an `n`-point Gauss–Legendre rule.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(&t, &w)| w * f(mid + half * t))
        .sum::<f64>()
        * half
}

/// Gauss–Chebyshev rule of the second kind: `∫_{-1}^{1} h(t) √(1-t²) dt ≈ Σ wⱼ h(tⱼ)`.
///
/// Exact for polynomials `h` of degree `≤ 2n - 1`; converges geometrically for
/// analytic `h`, which is what makes it the right tool for square-root edges.
pub fn gauss_chebyshev_u(n: usize) -> (Vec<f64>, Vec<f64>) {
    let np1 = (n + 1) as f64;
    (1..=n)
        .map(|j| {
            let theta = j as f64 * PI / np1;
            (theta.cos(), PI / np1 * theta.sin().powi(2))
        })
        .unzip()
}

/// Gauss–Chebyshev rule of the first kind: `∫_{-1}^{1} h(t) / √(1-t²) dt`.
pub fn gauss_chebyshev_t(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    (0..n)
        .map(|j| ((PI * (j as f64 + 0.5) / nf).cos(), PI / nf))
        .unzip()
}
