//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Reference values are computed here from first principles (hand-written
//! p/q coefficients, Taylor-free closed forms, independent scans) and
//! compared against the library routes.

use std::f64::consts::{LN_10, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use bsfwm::dispersion::{nonlinear_mismatch, symmetric_grid, DispersionProfile, FrequencyGrid, MismatchReport};
use bsfwm::fitting::{
    fit_phase_scale, fit_zeta, generate_ratio_curve, generate_synthetic, normalize_singles, PhaseModel, SyntheticModel,
    ZetaFit,
};
use bsfwm::oracle::{fock_evolve, wick_correlations, FockState, DEFAULT_CUTOFF};
use bsfwm::propagation::{integrate_weak, IntegratorSettings};
use bsfwm::quantum::{
    coincidence, correlations, g2_dual_coherent, g2_multiphoton, g2_photon_pair, multiphoton_scaling_curve, InputKind,
    InputState,
};
use bsfwm::transfer::{general_transfer, ideal_transfer, lossy_transfer, NonlinearPhase, PumpConfig};
use bsfwm::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Time attributed to the criterion's runtime bound; whole run when `None`.
    timed: Option<Duration>,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        timed: None,
    }
}

/// `q = (e^{iNφ} − 1)/N` evaluated directly.
fn q_ref(n: usize, phi: f64) -> C64 {
    ((C64::i() * (n as f64 * phi)).exp() - 1.0) / n as f64
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let u = ideal_transfer(3, 2.0 * PI / 9.0).unwrap();
    let elapsed = start.elapsed();
    let dev = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (u.entry(i, j).norm_sqr() - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: dev <= 1e-12,
        detail: format!("max ||U_ij|² − 1/3| = {dev:.1e}"),
        timed: Some(elapsed),
    }
}

fn ac2() -> Outcome {
    let dual = InputState::lossless(
        InputKind::DualCoherent {
            amplitude: 1.0,
            modes: (0, 2),
            phase_averaged: true,
            relative_phase: 0.0,
        },
        3,
    )
    .unwrap();
    let pair = InputState::lossless(InputKind::PhotonPair { modes: (0, 2) }, 3).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let phi = 2.0 * PI / 3.0 * k as f64 / 199.0;
        let q = q_ref(3, phi);
        let p = q + 1.0;
        let u = ideal_transfer(3, phi).unwrap();
        let d = correlations(&dual, &u).unwrap();
        let expected = [1.0 - q.norm_sqr(), 2.0 * q.norm_sqr(), 1.0 - q.norm_sqr()];
        for (a, b) in d.singles.iter().zip(expected) {
            worst = worst.max((a - b).abs());
        }
        let c = correlations(&pair, &u).unwrap();
        worst = worst.max((c.g2(0, 2).unwrap() - (p * p + q * q).norm_sqr()).abs());
        worst = worst.max((c.g2(0, 1).unwrap() - (p * q + q * q).norm_sqr()).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max deviation from closed forms {worst:.1e} over 200 φ"),
    )
}

fn ac3() -> Outcome {
    let start = Instant::now();
    let state = InputState::lossless(InputKind::PhotonPair { modes: (0, 1) }, 2).unwrap();
    let u = ideal_transfer(2, PI / 4.0).unwrap();
    let p = coincidence(&state, &u, 0, 1).unwrap();
    let elapsed = start.elapsed();
    let fock = fock_evolve(&FockState::number(&[1, 1], DEFAULT_CUTOFF).unwrap(), &u).unwrap();
    let amp = fock.amplitude(&[1, 1]).norm_sqr();
    Outcome {
        pass: p < 1e-24 && amp < 1e-24,
        detail: format!("P(1,1) = {p:.1e} closed form, {amp:.1e} Fock"),
        timed: Some(elapsed),
    }
}

fn ac4() -> Outcome {
    let g13 = |phi: f64| {
        let q = q_ref(3, phi);
        let p = q + 1.0;
        (p * p + q * q).norm_sqr()
    };
    // dense scan, then ternary refinement around the best sample
    let m = 20_000;
    let h = 2.0 * PI / 3.0 / m as f64;
    let k = (0..=m)
        .min_by(|&a, &b| g13(a as f64 * h).total_cmp(&g13(b as f64 * h)))
        .unwrap();
    let (mut lo, mut hi) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
    for _ in 0..200 {
        let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if g13(a) < g13(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let phi_min = 0.5 * (lo + hi);
    let lib_min = g2_photon_pair(3, phi_min).unwrap().inputs;
    let cos3 = (3.0 * phi_min).cos();
    let tritter = g2_dual_coherent(3, 2.0 * PI / 9.0).unwrap();

    let mut violations = 0;
    let mut touches = Vec::new();
    for k in 1..5000 {
        let phi = 2.0 * PI / 3.0 * k as f64 / 5000.0;
        let quantum = g2_photon_pair(3, phi).unwrap().inputs;
        let classical = g2_dual_coherent(3, phi).unwrap();
        if quantum > classical + 1e-14 {
            violations += 1;
        } else if classical - quantum < 1e-9 {
            touches.push(phi);
        }
    }
    // the curves only meet at the isolated point φ = π/3
    let isolated = touches.iter().all(|t| (t - PI / 3.0).abs() < 2e-3);
    outcome(
        (lib_min - 0.1).abs() <= 1e-6 && (cos3 + 0.35).abs() <= 1e-6 && (tritter - 4.0 / 9.0).abs() < 1e-12 && violations == 0 && isolated,
        format!(
            "min g2_13 = {lib_min:.9} at cos3φ = {cos3:.9}; dual coherent at tritter {tritter:.12}; quantum > classical at {violations} points"
        ),
    )
}

struct ClassicalCase {
    profile: DispersionProfile,
    grid: FrequencyGrid,
    pumps: PumpConfig,
    seed: Vec<C64>,
}

fn random_case(rng: &mut ChaCha8Rng, index: usize) -> ClassicalCase {
    let n = 2 + index % 3;
    let omega0 = 1.3e15;
    let lossy = index % 4 == 3;
    let (profile, grid, pumps) = if lossy {
        let alpha = rng.random_range(1e-5..5e-4);
        let profile = DispersionProfile::new(omega0, vec![0.0, 0.0, 0.0, 1.2e-40], 2e-3, 100.0, alpha).unwrap();
        let offsets: Vec<f64> = (0..n).map(|k| 1.1e14 + 2.5e12 * k as f64).collect();
        let power = rng.random_range(0.2..4.0);
        let phases = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        (
            profile,
            symmetric_grid(omega0, &offsets).unwrap(),
            PumpConfig::new(vec![power; n], phases).unwrap(),
        )
    } else {
        let b2 = rng.random_range(-2e-27..2e-27);
        let b3 = rng.random_range(0.5e-40..2e-40);
        let profile = DispersionProfile::new(omega0, vec![0.0, 0.0, b2, b3], 2e-3, 100.0, 0.0).unwrap();
        let pumps_f = (0..n)
            .map(|k| omega0 + 1.1e14 + 2.5e12 * k as f64 + rng.random_range(-5e10..5e10))
            .collect();
        let weak_f = (0..n)
            .map(|k| omega0 - 1.1e14 - 2.5e12 * k as f64 + rng.random_range(-5e10..5e10))
            .collect();
        let powers = (0..n).map(|_| rng.random_range(0.2..4.0)).collect();
        let phases = (0..n).map(|_| rng.random_range(-PI..PI)).collect();
        (
            profile,
            FrequencyGrid::new(pumps_f, weak_f).unwrap(),
            PumpConfig::new(powers, phases).unwrap(),
        )
    };
    let p_min = pumps.powers.iter().cloned().fold(f64::INFINITY, f64::min);
    let amp = (1e-6 * p_min / n as f64).sqrt();
    let seed = (0..n)
        .map(|_| C64::from_polar(amp, rng.random_range(-PI..PI)))
        .collect();
    ClassicalCase {
        profile,
        grid,
        pumps,
        seed,
    }
}

fn closed_form(case: &ClassicalCase) -> Vec<C64> {
    let report = nonlinear_mismatch(&case.profile, &case.grid, &case.pumps.powers).unwrap();
    if case.profile.alpha > 0.0 {
        lossy_transfer(&case.profile, &case.pumps, case.profile.length, Some(&report))
            .unwrap()
            .apply(&case.seed)
            .unwrap()
    } else {
        general_transfer(&case.profile, &case.pumps, &report)
            .unwrap()
            .rotating_to_lab(&case.profile, &case.pumps, &report)
            .unwrap()
            .apply(&case.seed)
            .unwrap()
    }
}

fn max_rel(a: &[C64], b: &[C64], scale: &[C64]) -> f64 {
    let s = scale.iter().map(|z| z.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / s
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut first = None;
    for index in 0..20 {
        let case = random_case(&mut rng, index);
        let settings = IntegratorSettings::with_steps(case.profile.length, 2000);
        let numeric = integrate_weak(&case.profile, &case.grid, &case.pumps, &case.seed, &settings).unwrap();
        worst = worst.max(max_rel(&numeric, &closed_form(&case), &case.seed));
        first.get_or_insert(case);
    }
    let case = first.unwrap();
    let expected = closed_form(&case);
    let coarse = |steps: usize| {
        let settings = IntegratorSettings {
            richardson_check: false,
            ..IntegratorSettings::with_steps(case.profile.length, steps)
        };
        let b = integrate_weak(&case.profile, &case.grid, &case.pumps, &case.seed, &settings).unwrap();
        max_rel(&b, &expected, &case.seed)
    };
    let order = (coarse(100) / coarse(200)).log2();
    outcome(
        worst < 1e-6 && order >= 3.8,
        format!("max relative error {worst:.1e} over 20 configurations; observed order {order:.2}"),
    )
}

fn ac6() -> Outcome {
    let zgvd = 1.34e15;
    let length = 100.0;
    let grid = symmetric_grid(zgvd, &[1.1e14, 1.125e14, 1.15e14]).unwrap();
    let mut worst: f64 = 0.0;
    for alpha_l in [0.005, 0.05] {
        let alpha = alpha_l / length;
        let profile = DispersionProfile::new(zgvd, vec![0.0, 0.0, 0.0, 1.2e-40], 2e-3, length, alpha).unwrap();
        let l_eff = (1.0 - (-2.0 * alpha * length).exp()) / (2.0 * alpha);
        for k in 1..=8 {
            let power = 0.5 * k as f64;
            let pumps = PumpConfig::equal(3, power).unwrap();
            let b0 = (1e-6 * power).sqrt();
            let seed = [C64::new(b0, 0.0), C64::default(), C64::default()];
            let settings = IntegratorSettings::with_steps(length, 4000);
            let b = integrate_weak(&profile, &grid, &pumps, &seed, &settings).unwrap();
            let phi_alpha = 2.0 * profile.gamma * power * l_eff;
            let q = q_ref(3, phi_alpha);
            for (n, bn) in b.iter().enumerate() {
                let lossless = if n == 0 { (q + 1.0).norm_sqr() } else { q.norm_sqr() };
                let rescaled = (2.0 * alpha * length).exp() * bn.norm_sqr() / (b0 * b0);
                worst = worst.max((rescaled - lossless).abs());
            }
        }
    }

    let alpha = 0.43 * LN_10 / 10.0 / 1000.0 / 2.0;
    let length = 100.0;
    let vertical_ref = 1.0 - (-2.0 * alpha * length).exp();
    let horizontal_ref = 1.0 - (1.0 - (-2.0 * alpha * length).exp()) / (2.0 * alpha * length);
    let profile = DispersionProfile::new(zgvd, vec![0.0], 2e-3, length, alpha).unwrap();
    let pumps = PumpConfig::equal(3, 1.0).unwrap();
    let report = MismatchReport::phase_matched(&profile, &pumps.powers).unwrap();
    let u = lossy_transfer(&profile, &pumps, length, Some(&report)).unwrap();
    let vertical = 1.0 - u.lossy_scale.powi(2);
    let phase = NonlinearPhase::new(&profile, 1.0, length);
    let horizontal = 1.0 - phase.phi_alpha / phase.phi;
    let three_figures = |a: f64, b: f64| (a / b - 1.0).abs() < 5e-4;
    let quoted_rounding = (vertical * 100.0).round() == 1.0 && (horizontal * 200.0).round() == 1.0;
    outcome(
        worst < 1e-9
            && three_figures(vertical, vertical_ref)
            && three_figures(horizontal, horizontal_ref)
            && quoted_rounding,
        format!(
            "rescaled intensity error {worst:.1e}; at 0.43 dB/km × 100 m vertical {:.3}% horizontal {:.3}%",
            100.0 * vertical,
            100.0 * horizontal
        ),
    )
}

fn ac7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_post: f64 = 0.0;
    let transmissions = [0.3, 0.6, 1.0];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for zeta in [0.0, 0.1, 0.4, 1.0] {
        for t1 in transmissions {
            for t3 in transmissions {
                for k in 0..50 {
                    let phi = 2.0 * PI / 3.0 * k as f64 / 49.0;
                    let u = ideal_transfer(3, phi).unwrap();
                    let closed = g2_multiphoton(3, phi, C64::new(zeta, 0.0), t1, t3).unwrap();
                    let oracle = if zeta == 0.0 {
                        // no squeezing: normalized moments are 0/0, use the single pair in Fock space
                        let pair = FockState::number(&[1, 0, 1], DEFAULT_CUTOFF).unwrap();
                        fock_evolve(&pair, &u).unwrap().coincidence(0, 2)
                    } else {
                        let state = InputState::new(
                            InputKind::SqueezedVacuum {
                                zeta: C64::new(zeta, 0.0),
                                modes: (0, 2),
                            },
                            vec![t1, 1.0, t3],
                            vec![1.0; 3],
                        )
                        .unwrap();
                        let base = wick_correlations(&state, &u).unwrap().g2(0, 2).unwrap();
                        let post: Vec<f64> = (0..3).map(|_| rng.random_range(0.3..1.0)).collect();
                        let detected = InputState::new(state.kind.clone(), state.pre_loss.clone(), post).unwrap();
                        let with_post = wick_correlations(&detected, &u).unwrap().g2(0, 2).unwrap();
                        worst_post = worst_post.max((with_post - base).abs() / base.abs());
                        base
                    };
                    let err = if closed == oracle {
                        0.0
                    } else {
                        (closed - oracle).abs() / closed.abs().max(oracle.abs())
                    };
                    worst = worst.max(err);
                }
            }
        }
    }
    outcome(
        worst < 1e-10 && worst_post < 1e-12,
        format!("max relative error {worst:.1e} over 1800 points; post-loss change {worst_post:.1e}"),
    )
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

fn ac8() -> Outcome {
    let zetas: Vec<f64> = (0..25).map(|k| 0.05 * 4f64.powf(k as f64 / 24.0)).collect();
    let curve = multiphoton_scaling_curve(&zetas, 0.1, 0.1).unwrap();
    let ls: Vec<f64> = curve.iter().map(|p| p.singles.ln()).collect();
    let lp: Vec<f64> = curve.iter().map(|p| p.pair.ln()).collect();
    let lm: Vec<f64> = curve.iter().map(|p| p.multi.ln()).collect();
    let (s_pair, s_multi) = (slope(&ls, &lp), slope(&ls, &lm));
    outcome(
        (s_pair - 1.0).abs() <= 0.02 && (s_multi - 2.0).abs() <= 0.05,
        format!("log-log slopes: pairs {s_pair:.4}, multiphoton {s_multi:.4}"),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}

fn ac9() -> Outcome {
    let profile = DispersionProfile::new(1.34e15, vec![0.0], 2e-3, 100.0, 0.0).unwrap();
    let kappa = profile.phase_per_watt();
    let state = InputState::lossless(InputKind::PhotonPair { modes: (0, 2) }, 3).unwrap();
    let model = SyntheticModel {
        state,
        profile,
        pumps: PumpConfig::equal(3, 1.0).unwrap(),
        channel_scales: vec![1.0, 0.8, 1.1],
        base_rate: 1e4,
    };
    let powers: Vec<f64> = (0..31).map(|k| 2.0 * PI / 3.0 / kappa * k as f64 / 30.0).collect();
    let kappa_errors: Vec<f64> = (0..100)
        .map(|seed| {
            let records = generate_synthetic(&model, &powers, 0.01, seed).unwrap();
            let curve = normalize_singles(&records, 0).unwrap();
            let fit = fit_phase_scale(&curve, PhaseModel::DualInputDepletion, 3).unwrap();
            (fit.phase_scale.unwrap() / kappa - 1.0).abs()
        })
        .collect();

    let zetas: Vec<f64> = (0..12).map(|k| 0.4 * (2.5 + 0.75 * k as f64) / 10.75).collect();
    let zeta_errors: Vec<f64> = (0..100)
        .map(|seed| {
            let points = generate_ratio_curve(&zetas, 0.1, 0.1, 0.05, seed).unwrap();
            let fit = fit_zeta(&points, ZetaFit::Efficiency).unwrap();
            (fit.zeta.unwrap() / 0.4 - 1.0).abs()
        })
        .collect();
    let (mk, mz) = (median(kappa_errors), median(zeta_errors));
    outcome(
        mk < 0.01 && mz < 0.05,
        format!(
            "median |Δκ/κ| = {:.3}% (1% noise), median |Δζ/ζ| = {:.2}% (5% noise), 100 seeds each",
            100.0 * mk,
            100.0 * mz
        ),
    )
}

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_bsfwm");
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().unwrap();
        assert!(out.status.success(), "{args:?}");
    };
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    for k in 0..2 {
        run(&[
            "sweep",
            "--input",
            "pair",
            "--seed",
            "11",
            "--out",
            &path(&format!("sweep{k}.csv")),
        ]);
        run(&[
            "synth",
            "--model",
            "pair",
            "--seed",
            "11",
            "--out",
            &path(&format!("synth{k}.csv")),
        ]);
        run(&[
            "fit",
            "--data",
            &path(&format!("synth{k}.csv")),
            "--model",
            "pair",
            "--out",
            &path(&format!("fit{k}.txt")),
        ]);
        run(&[
            "synth",
            "--model",
            "multiphoton",
            "--seed",
            "11",
            "--out",
            &path(&format!("ratio{k}.csv")),
        ]);
        run(&[
            "fit",
            "--data",
            &path(&format!("ratio{k}.csv")),
            "--model",
            "multiphoton",
            "--out",
            &path(&format!("zfit{k}.txt")),
        ]);
    }
    let same = |stem: &str| {
        std::fs::read(path(&format!("{stem}0.{}", ext(stem)))).unwrap()
            == std::fs::read(path(&format!("{stem}1.{}", ext(stem)))).unwrap()
    };
    fn ext(stem: &str) -> &'static str {
        if stem.ends_with("fit") {
            "txt"
        } else {
            "csv"
        }
    }
    let stems = ["sweep", "synth", "fit", "ratio", "zfit"];
    let differing: Vec<&str> = stems.iter().copied().filter(|s| !same(s)).collect();
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            "sweep, synth and fit outputs byte-identical across reruns".into()
        } else {
            format!("outputs differ: {differing:?}")
        },
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1", "tritter split", ac1, Duration::from_millis(1)),
        (
            "AC2",
            "two-photon and dual coherent statistics",
            ac2,
            Duration::from_millis(100),
        ),
        ("AC3", "two-mode HOM null", ac3, Duration::from_millis(1)),
        ("AC4", "quantum vs classical contrast", ac4, Duration::from_millis(100)),
        ("AC5", "classical oracle", ac5, Duration::from_secs(30)),
        ("AC6", "loss rescaling", ac6, Duration::from_secs(1)),
        ("AC7", "quantum oracle", ac7, Duration::from_secs(10)),
        ("AC8", "multiphoton scaling", ac8, Duration::from_secs(1)),
        ("AC9", "fit closed loop", ac9, Duration::from_secs(60)),
        ("AC10", "determinism", ac10, Duration::from_secs(60)),
    ];
    let mut failures = 0;
    for (id, title, check, limit) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check);
        let total = start.elapsed();
        let (pass, detail, elapsed) = match result {
            Ok(o) => {
                let elapsed = o.timed.unwrap_or(total);
                (o.pass && elapsed < limit, o.detail, elapsed)
            }
            Err(_) => (false, "panicked".to_string(), total),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{id:<4} {} {title}: {detail} [{:.3} ms, limit {} ms]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64() * 1e3,
            limit.as_millis()
        );
    }
    println!("{} of 10 acceptance criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
