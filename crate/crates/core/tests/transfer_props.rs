use std::f64::consts::PI;

use bsfwm::dispersion::{nonlinear_mismatch, DispersionProfile, FrequencyGrid, MismatchReport};
use bsfwm::linalg::max_norm;
use bsfwm::transfer::{general_transfer, ideal_transfer, lossy_transfer, PumpConfig};
use proptest::prelude::*;

fn random_profile_and_grid() -> impl Strategy<Value = (DispersionProfile, FrequencyGrid, PumpConfig)> {
    (2usize..=5)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(-3e-27f64..3e-27, 1..=1),
                prop::collection::vec(-2e-40f64..2e-40, 1..=1),
                prop::collection::vec(0.1f64..3.0, n),
                prop::collection::vec(-PI..PI, n),
                prop::collection::vec(-4e12f64..4e12, n),
            )
        })
        .prop_map(|(n, b2, b3, powers, phases, jitter)| {
            let omega0 = 1.3e15;
            let profile = DispersionProfile::new(omega0, vec![0.0, 0.0, b2[0], b3[0]], 2e-3, 100.0, 0.0).unwrap();
            let pumps_f: Vec<f64> = (0..n)
                .map(|k| omega0 + 1.2e14 + 3e12 * k as f64 + jitter[k] * 0.1)
                .collect();
            let weak_f: Vec<f64> = (0..n).map(|k| omega0 - 1.2e14 - 3e12 * k as f64 + jitter[k]).collect();
            let grid = FrequencyGrid::new(pumps_f, weak_f).unwrap();
            (profile, grid, PumpConfig::new(powers, phases).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ideal_is_unitary(n in 2usize..=16, phi in -20.0f64..20.0) {
        let u = ideal_transfer(n, phi).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-12);
    }

    #[test]
    fn ideal_is_symmetric_and_periodic(n in 2usize..=16, phi in -5.0f64..5.0) {
        let u = ideal_transfer(n, phi).unwrap();
        prop_assert!(max_norm(&(&u.entries - u.entries.transpose())) == 0.0);
        let shifted = ideal_transfer(n, phi + 2.0 * PI / n as f64).unwrap();
        prop_assert!(max_norm(&(&u.entries - &shifted.entries)) < 1e-12);
    }

    #[test]
    fn ideal_rows_redistribute_all_power(n in 2usize..=16, phi in 0.0f64..7.0) {
        let u = ideal_transfer(n, phi).unwrap();
        for i in 0..n {
            let row: f64 = (0..n).map(|j| u.entry(i, j).norm_sqr()).sum();
            prop_assert!((row - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn general_is_unitary((profile, grid, pumps) in random_profile_and_grid()) {
        let report = nonlinear_mismatch(&profile, &grid, &pumps.powers).unwrap();
        let u = general_transfer(&profile, &pumps, &report).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-10, "residual {}", u.unitarity_residual());
        let lab = u.rotating_to_lab(&profile, &pumps, &report).unwrap();
        prop_assert!(lab.unitarity_residual() < 1e-10);
    }

    #[test]
    fn general_reduces_to_ideal(n in 2usize..=8, power in 0.0f64..5.0) {
        let profile = DispersionProfile::new(1.3e15, vec![0.0], 2e-3, 100.0, 0.0).unwrap();
        let pumps = PumpConfig::equal(n, power).unwrap();
        let report = MismatchReport::phase_matched(&profile, &pumps.powers).unwrap();
        let u = general_transfer(&profile, &pumps, &report).unwrap();
        let ideal = ideal_transfer(n, profile.nonlinear_phase(power)).unwrap();
        prop_assert!(max_norm(&(&u.entries - &ideal.entries)) < 1e-10);
    }

    #[test]
    fn lossy_scales_uniformly(n in 2usize..=8, power in 0.0f64..5.0, alpha in 0.0f64..5e-3) {
        let profile = DispersionProfile::new(1.3e15, vec![0.0], 2e-3, 100.0, alpha).unwrap();
        let pumps = PumpConfig::equal(n, power).unwrap();
        let u = lossy_transfer(&profile, &pumps, profile.length, None).unwrap();
        let s2 = (-2.0 * alpha * profile.length).exp();
        let gram = u.entries.adjoint() * &u.entries;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { s2 } else { 0.0 };
                prop_assert!((gram[(i, j)].re - expected).abs() < 1e-12 && gram[(i, j)].im.abs() < 1e-12);
            }
        }
    }
}
