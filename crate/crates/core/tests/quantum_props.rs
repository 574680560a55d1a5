use std::f64::consts::PI;

use bsfwm::oracle::wick_correlations;
use bsfwm::quantum::{correlations, g2_dual_coherent, g2_multiphoton, g2_photon_pair, InputKind, InputState};
use bsfwm::transfer::ideal_transfer;
use bsfwm::C64;
use proptest::prelude::*;

fn pair_modes() -> impl Strategy<Value = (usize, (usize, usize))> {
    (3usize..=6).prop_flat_map(|n| (Just(n), (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lossless_pair_conserves_photon_number((n, modes) in pair_modes(), phi in 0.0f64..3.0) {
        let state = InputState::lossless(InputKind::PhotonPair { modes }, n).unwrap();
        let c = correlations(&state, &ideal_transfer(n, phi).unwrap()).unwrap();
        let total: f64 = c.singles.iter().sum();
        prop_assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn g2_is_symmetric((n, modes) in pair_modes(), phi in 0.0f64..3.0, zeta in 0.05f64..1.0) {
        let state = InputState::lossless(InputKind::SqueezedVacuum { zeta: C64::new(zeta, 0.0), modes }, n).unwrap();
        let c = correlations(&state, &ideal_transfer(n, phi).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    prop_assert_eq!(c.g2(i, j), c.g2(j, i));
                }
            }
        }
    }

    #[test]
    fn detection_loss_cancels_in_g2(
        (n, modes) in pair_modes(),
        phi in 0.0f64..3.0,
        zeta in 0.05f64..1.0,
        post in prop::collection::vec(0.05f64..1.0, 6),
        pre in prop::collection::vec(0.2f64..1.0, 6),
    ) {
        let u = ideal_transfer(n, phi).unwrap();
        let kind = InputKind::SqueezedVacuum { zeta: C64::new(zeta, 0.0), modes };
        let reference = correlations(&InputState::new(kind.clone(), pre[..n].to_vec(), vec![1.0; n]).unwrap(), &u).unwrap();
        let lossy = correlations(&InputState::new(kind, pre[..n].to_vec(), post[..n].to_vec()).unwrap(), &u).unwrap();
        // ports normalized by their own zero-phase coincidences: the input pair
        let (i, j) = (modes.0.min(modes.1), modes.0.max(modes.1));
        let (x, y) = (reference.g2(i, j).unwrap(), lossy.g2(i, j).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
    }

    #[test]
    fn squeezed_closed_form_matches_wick(
        (n, modes) in pair_modes(),
        phi in 0.0f64..3.0,
        zeta in 0.0f64..1.2,
        arg in -PI..PI,
        pre in prop::collection::vec(0.2f64..1.0, 6),
    ) {
        let u = ideal_transfer(n, phi).unwrap();
        let state = InputState::new(
            InputKind::SqueezedVacuum { zeta: C64::from_polar(zeta, arg), modes },
            pre[..n].to_vec(),
            vec![1.0; n],
        ).unwrap();
        let closed = correlations(&state, &u).unwrap();
        let wick = wick_correlations(&state, &u).unwrap();
        for (a, b) in closed.singles.iter().zip(&wick.singles) {
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
        }
        for (a, b) in closed.pairs.iter().zip(&wick.pairs) {
            prop_assert!((a.raw - b.raw).abs() <= 1e-10 * a.raw.abs().max(1e-300), "{} vs {}", a.raw, b.raw);
        }
    }

    #[test]
    fn multiphoton_never_below_pair(phi in 0.0f64..3.0, zeta in 0.0f64..1.5, t1 in 0.1f64..1.0, t3 in 0.1f64..1.0) {
        let pair = g2_photon_pair(3, phi).unwrap().inputs;
        let multi = g2_multiphoton(3, phi, C64::new(zeta, 0.0), t1, t3).unwrap();
        prop_assert!(multi >= pair - 1e-15);
    }

    #[test]
    fn phase_averaged_dual_coherent_matches_closed_form(n in 3usize..=6, phi in 0.0f64..3.0) {
        let state = InputState::lossless(
            InputKind::DualCoherent { amplitude: 0.7, modes: (0, n - 1), phase_averaged: true, relative_phase: 0.0 },
            n,
        ).unwrap();
        let c = correlations(&state, &ideal_transfer(n, phi).unwrap()).unwrap();
        let expected = g2_dual_coherent(n, phi).unwrap();
        prop_assert!((c.g2(0, n - 1).unwrap() - expected).abs() < 1e-12);
    }
}
