//! Weak-field transfer matrices.
//!
//! Three routes produce an N×N map from input to output weak-field amplitudes:
//!
//! * [`ideal_transfer`]: the closed form for equal pumps and perfect phase
//!   matching, diagonal `p_N(φ)` and off-diagonal `q_N(φ)` with
//!   `q_N(φ) = (e^{iNφ} − 1)/N`, `p_N = q_N + 1`.
//! * [`general_transfer`]: `exp(iL·M)` for the Hermitian coupling matrix with
//!   off-diagonals `2γ A_i* A_j` and diagonal `(0, Δk_2, …, Δk_N)`, computed by
//!   eigendecomposition.
//! * [`lossy_transfer`]: the analytic solution with field attenuation α, where
//!   the nonlinear phase is replaced by `φ_α(z) = 2γPz e^{−αz} sinhc(αz)`.
//!
//! Global phase convention: the ideal form carries no prefactor. The generator of
//! [`general_transfer`] is shifted by `2γ·mean(P)·I`, which removes the
//! `e^{−iφ}` prefactor so that equal pumps reproduce [`ideal_transfer`] exactly.
//! Observables never depend on this choice.

use serde::{Deserialize, Serialize};

use crate::dispersion::{DispersionProfile, MismatchReport};
use crate::error::{Error, Result};
use crate::linalg::{expm_i_hermitian, unitarity_residual, CMatrix};
use crate::C64;

/// Pump powers and phases; `A_n(0) = √P_n e^{iθ_n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    #[serde(rename = "powers_w")]
    pub powers: Vec<f64>,
    #[serde(rename = "phases_rad")]
    pub phases: Vec<f64>,
}

impl PumpConfig {
    pub fn new(powers: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let pumps = Self { powers, phases };
        pumps.validate()?;
        Ok(pumps)
    }

    /// `n` pumps of equal power and zero phase.
    pub fn equal(n: usize, power: f64) -> Result<Self> {
        Self::new(vec![power; n], vec![0.0; n])
    }

    pub fn validate(&self) -> Result<()> {
        Error::check_len("pump phases", self.powers.len(), self.phases.len())?;
        if self.powers.is_empty() {
            return Err(Error::invalid("pumps", "at least one pump is required"));
        }
        if self.powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::invalid("powers", "must be finite and ≥ 0"));
        }
        if self.phases.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("phases", "must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.powers.is_empty()
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        C64::from_polar(self.powers[n].sqrt(), self.phases[n].rem_euclid(std::f64::consts::TAU))
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        (0..self.len()).map(|n| self.amplitude(n)).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.powers.iter().sum()
    }

    pub fn mean_power(&self) -> f64 {
        self.total_power() / self.len() as f64
    }

    /// True when all powers agree to 1e-12 relative.
    pub fn has_equal_powers(&self) -> bool {
        let p0 = self.powers[0];
        self.powers
            .iter()
            .all(|p| (p - p0).abs() <= 1e-12 * p0.abs().max(f64::MIN_POSITIVE))
    }
}

/// How a [`TransferMatrix`] was produced, which fixes its phase frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferKind {
    /// Closed form, rotating frame, pump phases factored out.
    Ideal,
    /// Matrix exponential, rotating frame `b̄_n`.
    General,
    /// Lossy closed form, lab frame `b_n` including the global phase.
    Lossy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub entries: CMatrix,
    /// Nonlinear phase φ the matrix was evaluated at (rad).
    pub phi: f64,
    /// Amplitude factor e^{−αz}; 1 for lossless matrices.
    pub lossy_scale: f64,
    pub kind: TransferKind,
}

impl TransferMatrix {
    pub fn n_modes(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    /// `‖V†V − I‖_max` with `V = entries / lossy_scale`.
    pub fn unitarity_residual(&self) -> f64 {
        let v = self.entries.map(|z| z / self.lossy_scale);
        unitarity_residual(&v)
    }

    /// Applies the matrix to a vector of input amplitudes.
    pub fn apply(&self, input: &[C64]) -> Result<Vec<C64>> {
        Error::check_len("input amplitudes", self.n_modes(), input.len())?;
        Ok((0..self.n_modes())
            .map(|i| (0..self.n_modes()).map(|j| self.entries[(i, j)] * input[j]).sum())
            .collect())
    }

    /// Same physical map multiplied by a unit-modulus global phase.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let f = C64::from_polar(1.0, phase);
        Self {
            entries: self.entries.map(|z| z * f),
            ..self.clone()
        }
    }

    /// Converts a rotating-frame matrix from [`general_transfer`] (or an
    /// [`ideal_transfer`] for the same equal pumps) to lab-frame amplitudes
    /// `b_n(L) = e^{−iϕ_n L} b̄_n(L)`, with
    /// `ϕ_n = Δβ^n_0 + γ(P_0 − P_n − 2ΣP)`.
    ///
    /// Lab-frame amplitudes are what the coupled-mode integrator produces.
    pub fn rotating_to_lab(
        &self,
        profile: &DispersionProfile,
        pumps: &PumpConfig,
        mismatch: &MismatchReport,
    ) -> Result<Self> {
        let n = self.n_modes();
        if self.kind == TransferKind::Lossy {
            return Ok(self.clone());
        }
        Error::check_len("pumps", n, pumps.len())?;
        Error::check_len("mismatch report", n, mismatch.len())?;
        let total = pumps.total_power();
        let p0 = pumps.powers[0];
        let l = profile.length;
        let shift = canonical_shift(profile, pumps);
        let mut entries = self.entries.clone();
        for r in 0..n {
            let frame = mismatch.delta_beta[r] + profile.gamma * (p0 - pumps.powers[r] - 2.0 * total);
            let f = C64::from_polar(1.0, -(frame + shift) * l);
            for c in 0..n {
                entries[(r, c)] *= f;
            }
        }
        Ok(Self {
            entries,
            ..self.clone()
        })
    }
}

/// `q_N(φ) = (e^{iNφ} − 1)/N`.
pub fn q_coeff(n_modes: usize, phi: f64) -> C64 {
    let n = n_modes as f64;
    // e^{ix} − 1 = 2i sin(x/2) e^{ix/2}, no cancellation near x = 0.
    let half = 0.5 * n * phi;
    C64::from_polar(2.0 * half.sin() / n, half + std::f64::consts::FRAC_PI_2)
}

/// `p_N(φ) = q_N(φ) + 1`.
pub fn p_coeff(n_modes: usize, phi: f64) -> C64 {
    q_coeff(n_modes, phi) + 1.0
}

/// Equal-pump, perfectly phase-matched transfer matrix at nonlinear phase `phi`.
pub fn ideal_transfer(n_modes: usize, phi: f64) -> Result<TransferMatrix> {
    if n_modes < 2 {
        return Err(Error::invalid("n_modes", "at least two modes are required"));
    }
    if !phi.is_finite() {
        return Err(Error::invalid("phi", "must be finite"));
    }
    let q = q_coeff(n_modes, phi);
    let p = q + 1.0;
    let entries = CMatrix::from_fn(n_modes, n_modes, |i, j| if i == j { p } else { q });
    Ok(TransferMatrix {
        entries,
        phi,
        lossy_scale: 1.0,
        kind: TransferKind::Ideal,
    })
}

fn canonical_shift(profile: &DispersionProfile, pumps: &PumpConfig) -> f64 {
    2.0 * profile.gamma * pumps.mean_power()
}

/// Hermitian coupling matrix: off-diagonals `2γ A_i* A_j`, diagonal `Δk_i`.
pub fn coupling_matrix(profile: &DispersionProfile, pumps: &PumpConfig, mismatch: &MismatchReport) -> Result<CMatrix> {
    pumps.validate()?;
    let n = pumps.len();
    if n < 2 {
        return Err(Error::invalid("pumps", "at least two pumps are required"));
    }
    Error::check_len("mismatch report", n, mismatch.len())?;
    let amps = pumps.amplitudes();
    let g2 = 2.0 * profile.gamma;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(mismatch.delta_k[i], 0.0)
        } else {
            amps[i].conj() * amps[j] * g2
        }
    }))
}

/// `exp(iL·(M + 2γ·mean(P)·I))` in the rotating frame.
pub fn general_transfer(
    profile: &DispersionProfile,
    pumps: &PumpConfig,
    mismatch: &MismatchReport,
) -> Result<TransferMatrix> {
    let mut m = coupling_matrix(profile, pumps, mismatch)?;
    let shift = canonical_shift(profile, pumps);
    for i in 0..m.nrows() {
        m[(i, i)] += shift;
    }
    let entries = expm_i_hermitian(&m, profile.length)?;
    Ok(TransferMatrix {
        entries,
        phi: profile.nonlinear_phase(pumps.mean_power()),
        lossy_scale: 1.0,
        kind: TransferKind::General,
    })
}

/// `sinh(x)/x`, series branch for small |x|.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// Lossless and loss-modified nonlinear phases at position `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearPhase {
    /// φ = 2γPz.
    pub phi: f64,
    /// φ_α(z) = 2γPz e^{−αz} sinhc(αz).
    pub phi_alpha: f64,
}

impl NonlinearPhase {
    pub fn new(profile: &DispersionProfile, power: f64, z: f64) -> Self {
        let phi = 2.0 * profile.gamma * power * z;
        Self {
            phi,
            phi_alpha: phi * effective_length_ratio(profile.alpha * z),
        }
    }
}

/// `e^{−x} sinhc(x)`, the ratio of effective to physical length for field
/// attenuation `x = αz`.
pub fn effective_length_ratio(x: f64) -> f64 {
    (-x).exp() * sinhc(x)
}

/// Analytic lossy solution for equal pumps at position `z`, in the lab frame:
/// `U_nl = e^{−αz} e^{iφ_α(N−1)} (δ_nl + q_N(φ_α)) e^{i(θ_l − θ_n)}`.
pub fn lossy_transfer(
    profile: &DispersionProfile,
    pumps: &PumpConfig,
    z: f64,
    mismatch: Option<&MismatchReport>,
) -> Result<TransferMatrix> {
    pumps.validate()?;
    let n = pumps.len();
    if n < 2 {
        return Err(Error::invalid("pumps", "at least two pumps are required"));
    }
    if !pumps.has_equal_powers() {
        return Err(Error::invalid("pumps", "lossy solution requires equal pump powers"));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::invalid("z", "must be finite and ≥ 0"));
    }
    if let Some(report) = mismatch {
        Error::check_len("mismatch report", n, report.len())?;
        if !report.all_negligible() {
            return Err(Error::invalid("mismatch", "lossy solution requires phase matching"));
        }
    }
    let phase = NonlinearPhase::new(profile, pumps.powers[0], z);
    let scale = (-profile.alpha * z).exp();
    let q = q_coeff(n, phase.phi_alpha);
    let global = C64::from_polar(scale, phase.phi_alpha * (n as f64 - 1.0));
    let entries = CMatrix::from_fn(n, n, |r, c| {
        let base = if r == c { q + 1.0 } else { q };
        global * base * C64::from_polar(1.0, pumps.phases[c] - pumps.phases[r])
    });
    Ok(TransferMatrix {
        entries,
        phi: phase.phi,
        lossy_scale: scale,
        kind: TransferKind::Lossy,
    })
}

/// Closed-form pump amplitudes at `z` under self- and cross-phase modulation
/// with attenuation: `A_n(z) = A_n(0) e^{−αz} e^{iΓ_n z_eff}`, where
/// `Γ_n = γ(P_n + 2Σ_{p≠n} P_p)` and `z_eff = z e^{−αz} sinhc(αz)`.
pub fn pump_evolution(pumps: &PumpConfig, profile: &DispersionProfile, z: f64) -> Result<Vec<C64>> {
    pumps.validate()?;
    if !(z.is_finite() && z >= 0.0 && z <= profile.length * (1.0 + 1e-12)) {
        return Err(Error::invalid("z", "must lie in [0, L]"));
    }
    let total = pumps.total_power();
    let decay = (-profile.alpha * z).exp();
    let z_eff = z * effective_length_ratio(profile.alpha * z);
    Ok((0..pumps.len())
        .map(|n| {
            let gamma_n = profile.gamma * (2.0 * total - pumps.powers[n]);
            pumps.amplitude(n) * C64::from_polar(decay, gamma_n * z_eff)
        })
        .collect())
}
