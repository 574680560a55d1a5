//! Fiber dispersion, wavevector mismatch and phase-matched frequency grids.
//!
//! All frequencies are angular (rad/s). The dispersion relation is the Taylor
//! polynomial `β(ω) = Σ_m β_m/m! (ω − ω0)^m` with at most seven coefficients
//! (`m = 0..=6`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Highest supported Taylor order of the dispersion relation.
pub const MAX_BETA_ORDER: usize = 6;

/// Default negligibility threshold for `|Δk_n|·L`.
pub const DEFAULT_NEGLIGIBLE_PHASE: f64 = 0.01 * PI;

/// Vacuum wavelength in nm to angular frequency in rad/s.
pub fn lambda_nm_to_omega(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (lambda_nm * 1e-9)
}

/// Angular frequency in rad/s to vacuum wavelength in nm.
pub fn omega_to_lambda_nm(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

pub fn thz_to_omega(f_thz: f64) -> f64 {
    2.0 * PI * f_thz * 1e12
}

/// Fiber dispersion and nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionProfile {
    /// Carrier angular frequency ω0 (rad/s).
    #[serde(rename = "omega0_rad_s")]
    pub omega0: f64,
    /// Taylor coefficients β_m (s^m/m), starting at m = 0.
    #[serde(rename = "beta_coeffs_si")]
    pub beta_coeffs: Vec<f64>,
    /// Effective nonlinearity γ (W⁻¹m⁻¹).
    #[serde(rename = "gamma_per_w_m")]
    pub gamma: f64,
    /// Fiber length L (m).
    #[serde(rename = "length_m")]
    pub length: f64,
    /// Field attenuation α (m⁻¹); power decays as e^{−2αz}.
    #[serde(rename = "alpha_per_m")]
    pub alpha: f64,
}

impl DispersionProfile {
    pub fn new(omega0: f64, beta_coeffs: Vec<f64>, gamma: f64, length: f64, alpha: f64) -> Result<Self> {
        let profile = Self {
            omega0,
            beta_coeffs,
            gamma,
            length,
            alpha,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::invalid("omega0", "must be finite and positive"));
        }
        if self.beta_coeffs.is_empty() {
            return Err(Error::invalid("beta_coeffs", "at least β_0 is required"));
        }
        if self.beta_coeffs.len() > MAX_BETA_ORDER + 1 {
            return Err(Error::invalid(
                "beta_coeffs",
                format!(
                    "Taylor order {} exceeds the supported maximum {MAX_BETA_ORDER}",
                    self.beta_coeffs.len() - 1
                ),
            ));
        }
        if self.beta_coeffs.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("beta_coeffs", "coefficients must be finite"));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid("gamma", "must be finite and ≥ 0"));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid("length", "must be finite and > 0"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid("alpha", "must be finite and ≥ 0"));
        }
        Ok(())
    }

    fn require_phase_matching_order(&self) -> Result<()> {
        if self.beta_coeffs.len() < 3 {
            return Err(Error::invalid(
                "beta_coeffs",
                "phase-matching needs coefficients up to at least β_2",
            ));
        }
        Ok(())
    }

    /// Wavevector β(ω) in m⁻¹.
    pub fn beta(&self, omega: f64) -> f64 {
        taylor_eval(&self.beta_coeffs, omega - self.omega0)
    }

    /// Group-velocity dispersion β₂(ω) = d²β/dω², the analytic second derivative
    /// of the Taylor polynomial.
    pub fn beta2(&self, omega: f64) -> f64 {
        if self.beta_coeffs.len() < 3 {
            return 0.0;
        }
        taylor_eval(&self.beta_coeffs[2..], omega - self.omega0)
    }

    /// Nonlinear phase φ = 2γLP for per-pump power `power`.
    pub fn nonlinear_phase(&self, power: f64) -> f64 {
        2.0 * self.gamma * self.length * power
    }

    /// Power-to-phase conversion factor κ = 2γL (rad/W).
    pub fn phase_per_watt(&self) -> f64 {
        2.0 * self.gamma * self.length
    }

    /// The same fiber with its Taylor expansion re-centered at `omega`.
    ///
    /// Coefficients are the derivatives of the original polynomial at `omega`,
    /// so `beta` evaluates identically (up to rounding).
    pub fn recentered(&self, omega: f64) -> Self {
        let x = omega - self.omega0;
        let coeffs = (0..self.beta_coeffs.len())
            .map(|k| taylor_eval(&self.beta_coeffs[k..], x))
            .collect();
        Self {
            omega0: omega,
            beta_coeffs: coeffs,
            ..self.clone()
        }
    }
}

/// `Σ_m c_m x^m / m!`, Horner form.
fn taylor_eval(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (m, c) in coeffs.iter().enumerate().rev() {
        acc = acc * x / ((m + 1) as f64) + c;
    }
    acc
}

/// Pump frequencies Ω_i and weak-field frequencies ω_i sharing index i.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub pump_freqs: Vec<f64>,
    pub weak_freqs: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(pump_freqs: Vec<f64>, weak_freqs: Vec<f64>) -> Result<Self> {
        let grid = Self { pump_freqs, weak_freqs };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        Error::check_len("weak frequencies", self.pump_freqs.len(), self.weak_freqs.len())?;
        if self.pump_freqs.len() < 2 {
            return Err(Error::invalid("grid", "at least two pump/weak pairs are required"));
        }
        for (name, list) in [("pump_freqs", &self.pump_freqs), ("weak_freqs", &self.weak_freqs)] {
            if list.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(Error::invalid(name, "frequencies must be finite and positive"));
            }
            for (i, a) in list.iter().enumerate() {
                if list[i + 1..].contains(a) {
                    return Err(Error::invalid(name, "frequencies must be pairwise distinct"));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pump_freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pump_freqs.is_empty()
    }
}

/// Per-mode mismatch figures for a grid, all relative to mode 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchReport {
    /// Δβ^n_0 (m⁻¹).
    pub delta_beta: Vec<f64>,
    /// Δk_n = Δβ^n_0 + γ(P_0 − P_n) (m⁻¹); `delta_k[0]` is exactly zero.
    pub delta_k: Vec<f64>,
    /// `|Δk_n|·L < threshold`.
    pub negligible: Vec<bool>,
    pub length: f64,
    pub threshold: f64,
}

impl MismatchReport {
    /// Report for a perfectly phase-matched grid (Δβ = 0) where only pump-power
    /// imbalance contributes to Δk.
    pub fn phase_matched(profile: &DispersionProfile, pump_powers: &[f64]) -> Result<Self> {
        validate_powers(pump_powers)?;
        let delta_beta = vec![0.0; pump_powers.len()];
        Ok(Self::assemble(
            profile,
            delta_beta,
            pump_powers,
            DEFAULT_NEGLIGIBLE_PHASE,
        ))
    }

    fn assemble(profile: &DispersionProfile, delta_beta: Vec<f64>, powers: &[f64], threshold: f64) -> Self {
        let p0 = powers[0];
        let delta_k: Vec<f64> = delta_beta
            .iter()
            .zip(powers)
            .enumerate()
            .map(|(n, (db, pn))| if n == 0 { 0.0 } else { db + profile.gamma * (p0 - pn) })
            .collect();
        let negligible = delta_k.iter().map(|dk| dk.abs() * profile.length < threshold).collect();
        Self {
            delta_beta,
            delta_k,
            negligible,
            length: profile.length,
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.delta_k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta_k.is_empty()
    }

    pub fn all_negligible(&self) -> bool {
        self.negligible.iter().all(|&b| b)
    }
}

fn validate_powers(powers: &[f64]) -> Result<()> {
    if powers.is_empty() {
        return Err(Error::invalid("pump_powers", "empty"));
    }
    if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::invalid("pump_powers", "powers must be finite and ≥ 0"));
    }
    Ok(())
}

/// Δβ^n_m = β(Ω_n) + β(ω_n) − β(Ω_m) − β(ω_m).
///
/// Evaluated as `(β(Ω_n) − β(Ω_m)) + (β(ω_n) − β(ω_m))`, which is exactly zero
/// for `n == m` and exactly antisymmetric under `n ↔ m`.
pub fn delta_beta_pair(profile: &DispersionProfile, grid: &FrequencyGrid, n: usize, m: usize) -> Result<f64> {
    profile.require_phase_matching_order()?;
    let modes = grid.len();
    for index in [n, m] {
        if index >= modes {
            return Err(Error::IndexOutOfRange { index, modes });
        }
    }
    let pumps = profile.beta(grid.pump_freqs[n]) - profile.beta(grid.pump_freqs[m]);
    let weak = profile.beta(grid.weak_freqs[n]) - profile.beta(grid.weak_freqs[m]);
    Ok(pumps + weak)
}

/// Full antisymmetric matrix of Δβ^n_m.
pub fn delta_beta_matrix(profile: &DispersionProfile, grid: &FrequencyGrid) -> Result<Vec<Vec<f64>>> {
    let n = grid.len();
    (0..n)
        .map(|i| (0..n).map(|j| delta_beta_pair(profile, grid, i, j)).collect())
        .collect()
}

pub fn nonlinear_mismatch(
    profile: &DispersionProfile,
    grid: &FrequencyGrid,
    pump_powers: &[f64],
) -> Result<MismatchReport> {
    nonlinear_mismatch_with_threshold(profile, grid, pump_powers, DEFAULT_NEGLIGIBLE_PHASE)
}

/// Δk_n and negligibility flags with a caller-chosen threshold on `|Δk_n|·L`.
pub fn nonlinear_mismatch_with_threshold(
    profile: &DispersionProfile,
    grid: &FrequencyGrid,
    pump_powers: &[f64],
    threshold: f64,
) -> Result<MismatchReport> {
    grid.validate()?;
    Error::check_len("pump powers", grid.len(), pump_powers.len())?;
    validate_powers(pump_powers)?;
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::invalid("threshold", "must be positive"));
    }
    let delta_beta = (0..grid.len())
        .map(|n| delta_beta_pair(profile, grid, n, 0))
        .collect::<Result<Vec<_>>>()?;
    Ok(MismatchReport::assemble(profile, delta_beta, pump_powers, threshold))
}

/// Search window and stopping rule for [`find_zgvd_with`].
#[derive(Debug, Clone, Copy)]
pub struct ZgvdSearch {
    /// Half-width of the window around ω0 (rad/s).
    pub half_width: f64,
    /// Bisection stops once the bracket is narrower than this (rad/s). Zero runs
    /// the bisection to floating-point resolution.
    pub tolerance: f64,
    /// Points in the coarse sign-change scan that picks the bracket.
    pub scan_points: usize,
}

impl Default for ZgvdSearch {
    fn default() -> Self {
        Self {
            half_width: 2.0 * PI * 50e12,
            tolerance: 0.0,
            scan_points: 4001,
        }
    }
}

/// Zero-GVD frequency: the root of β₂(ω) closest to ω0 within ±50 THz.
pub fn find_zgvd(profile: &DispersionProfile) -> Result<f64> {
    find_zgvd_with(profile, ZgvdSearch::default())
}

pub fn find_zgvd_with(profile: &DispersionProfile, search: ZgvdSearch) -> Result<f64> {
    profile.require_phase_matching_order()?;
    let center = profile.omega0;
    if profile.beta2(center) == 0.0 {
        return Ok(center);
    }
    let lo = center - search.half_width;
    let hi = center + search.half_width;
    let points = search.scan_points.max(3) | 1;
    let step = (hi - lo) / (points - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..points)
        .map(|k| {
            let w = lo + step * k as f64;
            (w, profile.beta2(w))
        })
        .collect();

    // Sign-change bracket nearest to ω0.
    let mut best: Option<(f64, f64, f64)> = None;
    for pair in samples.windows(2) {
        let (a, fa) = pair[0];
        let (b, fb) = pair[1];
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.signum() != fb.signum() || fb == 0.0 {
            let dist = ((a + b) / 2.0 - center).abs();
            if best.is_none_or(|(_, _, d)| dist < d) {
                best = Some((a, b, dist));
            }
        }
    }
    let (mut a, mut b, _) = best.ok_or(Error::NoRootInBracket { lo, hi })?;
    let mut fa = profile.beta2(a);
    if profile.beta2(b) == 0.0 {
        return Ok(b);
    }
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || (b - a) <= search.tolerance {
            break;
        }
        let fm = profile.beta2(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Pumps at `zgvd + o_i` and weak fields at `zgvd − o_i`.
pub fn symmetric_grid(zgvd: f64, pump_offsets: &[f64]) -> Result<FrequencyGrid> {
    if pump_offsets.iter().any(|o| *o == 0.0 || !o.is_finite()) {
        return Err(Error::invalid("pump_offsets", "offsets must be finite and nonzero"));
    }
    for (i, a) in pump_offsets.iter().enumerate() {
        if pump_offsets[i + 1..].contains(a) {
            return Err(Error::invalid("pump_offsets", "duplicate offset"));
        }
    }
    FrequencyGrid::new(
        pump_offsets.iter().map(|o| zgvd + o).collect(),
        pump_offsets.iter().map(|o| zgvd - o).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const W0: f64 = 1.4e15;

    fn profile(coeffs: Vec<f64>) -> DispersionProfile {
        DispersionProfile::new(W0, coeffs, 2e-3, 100.0, 0.0).unwrap()
    }

    /// Term-by-term sum with explicit factorials and powers.
    fn brute_beta(coeffs: &[f64], omega0: f64, omega: f64) -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for (m, c) in coeffs.iter().enumerate() {
            if m > 0 {
                fact *= m as f64;
            }
            sum += c / fact * (omega - omega0).powi(m as i32);
        }
        sum
    }

    #[test]
    fn beta_constant_and_linear_terms() {
        let p = profile(vec![5e6]);
        assert_eq!(p.beta(1.0e15), 5e6);
        assert_eq!(p.beta(2.0e15), 5e6);
        let p = profile(vec![0.0, 5e-9]);
        assert!((p.beta(W0 + 2e12) - 1e4).abs() < 1e-9);
    }

    #[test]
    fn beta2_only_is_even() {
        let b2 = -2e-27;
        let p = profile(vec![0.0, 0.0, b2]);
        let d = 3e13;
        let expected = b2 * d * d / 2.0;
        assert!((p.beta(W0 + d) - expected).abs() < 1e-12 * expected.abs());
        assert_eq!(p.beta(W0 + d), p.beta(W0 - d));
    }

    #[test]
    fn beta_matches_brute_force_sum() {
        let coeffs = vec![5.8e6, 4.9e-9, -2e-28, 1.1e-40, -3e-56, 2e-70, -1e-85];
        let p = profile(coeffs.clone());
        for k in -5..=5 {
            let w = W0 + k as f64 * 1.3e13;
            let brute = brute_beta(&coeffs, W0, w);
            assert!((p.beta(w) - brute).abs() <= 1e-13 * brute.abs());
        }
    }

    #[test]
    fn rejects_invalid_profiles() {
        assert!(DispersionProfile::new(W0, vec![], 1.0, 1.0, 0.0).is_err());
        assert!(DispersionProfile::new(W0, vec![0.0; 8], 1.0, 1.0, 0.0).is_err());
        assert!(DispersionProfile::new(W0, vec![0.0; 7], 1.0, 1.0, 0.0).is_ok());
        assert!(DispersionProfile::new(W0, vec![0.0], -1.0, 1.0, 0.0).is_err());
        assert!(DispersionProfile::new(W0, vec![0.0], 1.0, 0.0, 0.0).is_err());
        assert!(DispersionProfile::new(W0, vec![0.0], 1.0, 1.0, -1e-3).is_err());
    }

    #[test]
    fn delta_beta_diagonal_is_zero_and_range_checked() {
        let p = profile(vec![0.0, 4.9e-9, -1e-28, 1e-40]);
        let grid = FrequencyGrid::new(vec![1.2e15, 1.21e15], vec![1.6e15, 1.59e15]).unwrap();
        assert_eq!(delta_beta_pair(&p, &grid, 1, 1).unwrap(), 0.0);
        assert!(matches!(
            delta_beta_pair(&p, &grid, 2, 0),
            Err(Error::IndexOutOfRange { index: 2, modes: 2 })
        ));
    }

    #[test]
    fn delta_beta_cubic_profile_brute_force() {
        // Odd profile about ω0 with pairs placed asymmetrically.
        let b3 = 1.2e-40;
        let coeffs = vec![0.0, 0.0, 0.0, b3];
        let p = profile(coeffs.clone());
        let grid = FrequencyGrid::new(vec![W0 + 1.0e14, W0 + 1.1e14], vec![W0 - 0.95e14, W0 - 1.12e14]).unwrap();
        let brute = brute_beta(&coeffs, W0, grid.pump_freqs[1]) + brute_beta(&coeffs, W0, grid.weak_freqs[1])
            - brute_beta(&coeffs, W0, grid.pump_freqs[0])
            - brute_beta(&coeffs, W0, grid.weak_freqs[0]);
        let got = delta_beta_pair(&p, &grid, 1, 0).unwrap();
        assert!(brute.abs() > 1.0);
        assert!((got - brute).abs() < 1e-12 * brute.abs());
    }

    #[test]
    fn delta_beta_quadratic_profile_symmetric_pairs() {
        // A pure β2 profile has no zero-GVD point; symmetric pairs about ω0
        // leave Δβ^n_m = β2 (o_n² − o_m²).
        let b2 = -1.5e-28;
        let p = profile(vec![0.0, 0.0, b2]);
        let offsets = [9e13, 1.0e14];
        let grid = symmetric_grid(W0, &offsets).unwrap();
        let expected = b2 * (offsets[1] * offsets[1] - offsets[0] * offsets[0]);
        let got = delta_beta_pair(&p, &grid, 1, 0).unwrap();
        assert!((got - expected).abs() < 1e-9 * expected.abs());
    }

    #[test]
    fn mismatch_power_term() {
        let p = DispersionProfile::new(W0, vec![0.0, 0.0, 0.0, 1e-40], 2e-3, 100.0, 0.0).unwrap();
        let grid = symmetric_grid(W0, &[1e14, 1.05e14]).unwrap();
        let report = nonlinear_mismatch(&p, &grid, &[1.0, 2.0]).unwrap();
        assert_eq!(report.delta_k[0], 0.0);
        assert!((report.delta_k[1] - (-2e-3)).abs() < 1e-12);
        // |Δk|·L = 0.2 > 0.01π
        assert!(!report.negligible[1]);
        assert!(report.negligible[0]);
    }

    #[test]
    fn mismatch_equal_powers_reduce_to_delta_beta() {
        let p = profile(vec![0.0, 4.9e-9, -1e-28, 1e-40]);
        let grid = FrequencyGrid::new(vec![1.2e15, 1.21e15, 1.22e15], vec![1.6e15, 1.59e15, 1.58e15]).unwrap();
        let report = nonlinear_mismatch(&p, &grid, &[0.5; 3]).unwrap();
        for n in 0..3 {
            assert_eq!(report.delta_k[n], delta_beta_pair(&p, &grid, n, 0).unwrap());
        }
        assert!(nonlinear_mismatch(&p, &grid, &[0.5; 2]).is_err());
        assert!(nonlinear_mismatch(&p, &grid, &[0.5, -1.0, 0.5]).is_err());
    }

    #[test]
    fn zgvd_linear_beta2() {
        let (b2, b3) = (-2e-28, 1.1e-40);
        let p = profile(vec![0.0, 0.0, b2, b3]);
        let root = find_zgvd(&p).unwrap();
        let expected = W0 - b2 / b3;
        assert!((root - expected).abs() < 1.0);
        assert!(p.beta2(root).abs() < 1e-12 * (b3 * 2.0 * PI * 50e12));
    }

    #[test]
    fn zgvd_zero_beta2_is_carrier() {
        let p = profile(vec![0.0, 0.0, 0.0, 1e-40]);
        assert_eq!(find_zgvd(&p).unwrap(), W0);
    }

    #[test]
    fn zgvd_cubic_beta2_matches_grid_scan() {
        // β₂(ω) = β2 + β3 x + β4 x²/2 + β5 x³/6 with a single root near ω0.
        let p = profile(vec![0.0, 0.0, 3e-28, 1e-40, 2e-55, 1e-69]);
        let root = find_zgvd(&p).unwrap();
        // Independent dense scan for the sign change closest to ω0.
        let n = 2_000_001;
        let lo = W0 - 2.0 * PI * 50e12;
        let step = 4.0 * PI * 50e12 / (n - 1) as f64;
        let mut scan_root = f64::NAN;
        let mut best = f64::INFINITY;
        let mut prev = p.beta2(lo);
        for k in 1..n {
            let w = lo + step * k as f64;
            let f = p.beta2(w);
            if f.signum() != prev.signum() && (w - W0).abs() < best {
                best = (w - W0).abs();
                scan_root = w - step / 2.0;
            }
            prev = f;
        }
        assert!((root - scan_root).abs() <= step);
    }

    #[test]
    fn zgvd_no_root_errors() {
        let p = profile(vec![0.0, 0.0, 1e-27]);
        assert!(matches!(find_zgvd(&p), Err(Error::NoRootInBracket { .. })));
    }

    #[test]
    fn symmetric_grid_mirror_and_errors() {
        let z = 1.35e15;
        let o = 1e13;
        let grid = symmetric_grid(z, &[-o, o]).unwrap();
        assert_eq!(grid.pump_freqs, vec![z - o, z + o]);
        assert_eq!(grid.weak_freqs, vec![z + o, z - o]);
        assert!(symmetric_grid(z, &[o, o]).is_err());
        assert!(symmetric_grid(z, &[0.0, o]).is_err());
    }

    #[test]
    fn recentered_profile_evaluates_identically() {
        let p = profile(vec![5.8e6, 4.9e-9, -2e-28, 1.1e-40, -3e-56]);
        let q = p.recentered(W0 + 4e13);
        for k in -3..=3 {
            let w = W0 + k as f64 * 2e13;
            assert!((p.beta(w) - q.beta(w)).abs() < 1e-14 * p.beta(w).abs());
        }
    }

    #[test]
    fn unit_conversions() {
        let w = lambda_nm_to_omega(1550.0);
        assert!((omega_to_lambda_nm(w) - 1550.0).abs() < 1e-9);
        assert!((thz_to_omega(193.4) - 2.0 * PI * 193.4e12).abs() < 1.0);
    }
}
