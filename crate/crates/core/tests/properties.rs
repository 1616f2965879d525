mod common;

use common::{random_atomic, rng};
use freeclt::density::{invert_density, l1_distance, EpsPolicy, Grid};
use freeclt::entropy::{free_entropy, log_energy, semicircle_chi};
use freeclt::expansion::coefficients;
use freeclt::measure::{moment, standardize};
use freeclt::subordination::{cauchy_mu_n, solve_z, SolveOptions};
use freeclt::transforms::{cauchy, moments_from_tau, reciprocal_cauchy, tau_from_atomic};
use freeclt::{Complex64, DensityProfile, Measure};
use proptest::prelude::*;

fn atomic() -> impl Strategy<Value = Measure> {
    (2usize..6, any::<u64>()).prop_map(|(k, seed)| random_atomic(&mut rng(seed), k, 0.1))
}

fn upper() -> impl Strategy<Value = Complex64> {
    (-4.0..4.0f64, 1e-2..5.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn tent(center: f64, half: f64) -> DensityProfile {
    let f = move |x: f64| ((1.0 - ((x - center) / half).abs()) / half).max(0.0);
    DensityProfile::sample(f, -4.0, 4.0, 1601, (center - half, center + half)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn cauchy_maps_upper_to_lower(m in atomic(), z in upper()) {
        let g = cauchy(&m, z).unwrap();
        prop_assert!(g.im < 0.0);
        prop_assert!(reciprocal_cauchy(&m, z).unwrap().im >= z.im - 1e-12);
    }

    #[test]
    fn subordination_stays_above_floor(m in atomic(), n in 2usize..40, z in upper()) {
        let s = solve_z(&m, n, z, SolveOptions::default()).unwrap();
        prop_assert!(s.value.im >= z.im / n as f64 * (1.0 - 1e-9));
        let nf = n as f64;
        let f = reciprocal_cauchy(&m, s.value).unwrap();
        let res = (s.value * nf - f * (nf - 1.0) - z).norm();
        prop_assert!(res <= 1e-9 * z.norm().max(1.0), "residual {:e}", res);
    }

    #[test]
    fn mu_n_has_unit_mass(m in atomic(), n in 1usize..20) {
        let y = 1e6;
        let g = cauchy_mu_n(&m, n, Complex64::new(0.0, y)).unwrap();
        prop_assert!((Complex64::new(0.0, y) * g - 1.0).norm() < 1e-6);
    }

    #[test]
    fn symmetric_laws_give_symmetric_transforms(x in 0.1..2.0f64, w in 0.1..0.9f64, n in 2usize..20, z in upper()) {
        let m = standardize(&Measure::atomic(&[(-x, w / 2.0), (0.0, 1.0 - w), (x, w / 2.0)]).unwrap()).unwrap();
        let g = cauchy_mu_n(&m, n, z).unwrap();
        let h = cauchy_mu_n(&m, n, Complex64::new(-z.re, z.im)).unwrap();
        prop_assert!((g + h.conj()).norm() <= 1e-9 * g.norm().max(1.0));
    }

    #[test]
    fn tau_reproduces_moments(m in atomic()) {
        let t = tau_from_atomic(&m).unwrap();
        for k in 2..=6 {
            let want = moment(&m, k).unwrap();
            prop_assert!((moments_from_tau(&t, k) - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn coefficient_relations(m3 in -2.0..2.0f64, excess in 0.0..3.0f64, n in 4usize..1000) {
        let m4 = 1.0 + m3 * m3 + excess;
        if let Ok(c) = coefficients(m3, m4, n) {
            prop_assert!((c.d_n - c.b_n - 1.0 / n as f64).abs() < 1e-12);
            prop_assert!(c.half_width() > 0.0);
        }
    }

    #[test]
    fn coefficients_reject_inconsistent_moments(m3 in -2.0..2.0f64, gap in 0.01..1.0f64) {
        prop_assert!(coefficients(m3, 1.0 + m3 * m3 - gap, 16).is_err());
    }

    #[test]
    fn l1_is_a_metric(a in -0.25..0.25f64, b in -0.25..0.25f64, c in -0.25..0.25f64, h in 0.3..1.5f64) {
        let (p, q, r) = (tent(a, h), tent(b, h), tent(c, h));
        let pq = l1_distance(&p, &q).unwrap();
        prop_assert!((pq - l1_distance(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!(l1_distance(&p, &p).unwrap() < 1e-12);
        prop_assert!(pq <= l1_distance(&p, &r).unwrap() + l1_distance(&r, &q).unwrap() + 1e-9);
        prop_assert!(pq <= 2.0 + 1e-9);
    }

    #[test]
    fn log_energy_dilation(h in 0.3..1.5f64, lambda in 0.5..2.0f64) {
        let p = tent(0.0, h);
        let d = log_energy(&p.dilate(lambda)).unwrap() - log_energy(&p).unwrap();
        prop_assert!((d - lambda.ln()).abs() < 1e-6);
    }

    #[test]
    fn unit_variance_tent_is_below_semicircle(shift in -0.5..0.5f64) {
        // Unit variance tent has half-width √6.
        let p = tent(shift, 6f64.sqrt());
        prop_assert!(free_entropy(&p).unwrap() < semicircle_chi());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn density_is_nonnegative_with_unit_mass(m in atomic(), n in 8usize..64) {
        let p = invert_density(&m, n, Grid::new(-4.0, 4.0, 1001).unwrap(), EpsPolicy::default()).unwrap();
        prop_assert!(p.values.iter().all(|&v| v >= 0.0));
        prop_assert!((p.mass() - 1.0).abs() < 1e-2, "mass {}", p.mass());
        prop_assert!(p.moment(1).abs() < 1e-2, "mean {}", p.moment(1));
        prop_assert!((p.moment(2) - 1.0).abs() < 2e-2, "variance {}", p.moment(2));
    }

    #[test]
    fn refinement_is_stable(m in atomic(), n in 16usize..64) {
        let coarse = invert_density(&m, n, Grid::new(-4.0, 4.0, 1001).unwrap(), EpsPolicy::default()).unwrap();
        let fine = invert_density(&m, n, Grid::new(-4.0, 4.0, 2001).unwrap(), EpsPolicy::default()).unwrap();
        prop_assert!(l1_distance(&coarse, &fine).unwrap() < 1e-2);
    }
}
