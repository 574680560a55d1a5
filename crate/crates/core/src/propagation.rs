//! Fixed-step RK4 integration of the discrete coupled-mode equations.
//!
//! Three levels of approximation are available:
//!
//! * [`integrate_pumps`]: pump self- and cross-phase modulation with loss.
//! * [`integrate_weak`]: pumps plus weak fields in the undepleted-pump limit,
//!   keeping cross-phase and Bragg-scattering terms for the weak fields.
//! * [`full_fwm_reference`]: the complete four-wave-mixing sum over every
//!   energy-conserving index triple of a small discrete set of fields.
//!
//! All amplitudes are lab-frame slowly varying envelopes in W^{1/2}; linear
//! propagation phases are carried by explicit `e^{iΔβ z}` phasors.

use crate::dispersion::{delta_beta_matrix, DispersionProfile, FrequencyGrid};
use crate::error::{Error, Result};
use crate::transfer::PumpConfig;
use crate::C64;

/// Weak fields must stay below this fraction of the weakest pump power.
pub const UNDEPLETED_RATIO: f64 = 1e-6;

/// Largest field count accepted by [`full_fwm_reference`].
pub const MAX_REFERENCE_FIELDS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationState {
    pub z: f64,
    pub pump_amps: Vec<C64>,
    pub weak_amps: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Requested step (m); rounded down so that an integer number of steps spans the fiber.
    pub step: f64,
    /// Repeat the run at half step and compare.
    pub richardson_check: bool,
    /// Largest accepted half-step discrepancy, relative to the input scale.
    pub richardson_tol: f64,
}

impl IntegratorSettings {
    /// `steps` equal steps over `length`, Richardson check on at 1e-8.
    pub fn with_steps(length: f64, steps: usize) -> Self {
        Self {
            step: length / steps.max(1) as f64,
            richardson_check: true,
            richardson_tol: 1e-8,
        }
    }

    pub fn validate(&self, length: f64) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::invalid("step", "must be finite and > 0"));
        }
        if self.step > length / 100.0 * (1.0 + 1e-12) {
            return Err(Error::invalid("step", "must not exceed L/100"));
        }
        if !(self.richardson_tol.is_finite() && self.richardson_tol > 0.0) {
            return Err(Error::invalid("richardson_tol", "must be finite and > 0"));
        }
        Ok(())
    }

    fn steps_for(&self, length: f64) -> usize {
        ((length / self.step) - 1e-9).ceil().max(1.0) as usize
    }
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            step: 0.05,
            richardson_check: true,
            richardson_tol: 1e-8,
        }
    }
}

fn axpy(y: &[C64], k: &[C64], h: f64) -> Vec<C64> {
    y.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

/// Classical RK4 over `[0, length]` in `steps` steps; returns every sample when
/// `record` is set, otherwise just the end point.
fn rk4<F>(rhs: &F, y0: &[C64], length: f64, steps: usize, record: bool) -> Vec<(f64, Vec<C64>)>
where
    F: Fn(f64, &[C64]) -> Vec<C64>,
{
    let h = length / steps as f64;
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(if record { steps + 1 } else { 1 });
    if record {
        out.push((0.0, y.clone()));
    }
    for s in 0..steps {
        let z = s as f64 * h;
        let k1 = rhs(z, &y);
        let k2 = rhs(z + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = rhs(z + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = rhs(z + h, &axpy(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if record {
            out.push(((s + 1) as f64 * h, y.clone()));
        }
    }
    if !record {
        out.push((length, y));
    }
    out
}

/// Runs at the requested step and, if enabled, at half step. Returns the
/// finer trajectory. The discrepancy is measured on components `check` only,
/// relative to `scale`.
fn run_checked<F>(
    rhs: &F,
    y0: &[C64],
    length: f64,
    settings: &IntegratorSettings,
    check: std::ops::Range<usize>,
    scale: f64,
    record: bool,
) -> Result<Vec<(f64, Vec<C64>)>>
where
    F: Fn(f64, &[C64]) -> Vec<C64>,
{
    let steps = settings.steps_for(length);
    let coarse = rk4(rhs, y0, length, steps, record);
    if !settings.richardson_check {
        return Ok(coarse);
    }
    let fine = rk4(rhs, y0, length, 2 * steps, record);
    let a = &coarse.last().expect("non-empty").1;
    let b = &fine.last().expect("non-empty").1;
    let discrepancy = check.map(|i| (a[i] - b[i]).norm()).fold(0.0_f64, f64::max) / scale.max(f64::MIN_POSITIVE);
    if discrepancy.is_nan() || discrepancy > settings.richardson_tol {
        return Err(Error::Convergence {
            discrepancy,
            tolerance: settings.richardson_tol,
        });
    }
    if record {
        // Keep the sampling of the requested step.
        Ok(fine.into_iter().step_by(2).collect())
    } else {
        Ok(fine)
    }
}

fn pump_rhs(gamma: f64, alpha: f64, a: &[C64], out: &mut [C64]) {
    let total: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    for (n, an) in a.iter().enumerate() {
        let xpm = 2.0 * total - an.norm_sqr();
        out[n] = an * C64::new(-alpha, gamma * xpm);
    }
}

/// Integrates `∂_z A_n = (−α + iγ(|A_n|² + 2Σ_{p≠n}|A_p|²)) A_n` over the fiber.
pub fn integrate_pumps(
    profile: &DispersionProfile,
    pumps: &PumpConfig,
    settings: &IntegratorSettings,
) -> Result<Vec<PropagationState>> {
    pumps.validate()?;
    settings.validate(profile.length)?;
    let (gamma, alpha) = (profile.gamma, profile.alpha);
    let rhs = |_z: f64, y: &[C64]| {
        let mut out = vec![C64::default(); y.len()];
        pump_rhs(gamma, alpha, y, &mut out);
        out
    };
    let y0 = pumps.amplitudes();
    let scale = pumps.powers.iter().cloned().fold(0.0, f64::max).sqrt();
    let traj = run_checked(&rhs, &y0, profile.length, settings, 0..y0.len(), scale, true)?;
    Ok(traj
        .into_iter()
        .map(|(z, y)| PropagationState {
            z,
            pump_amps: y,
            weak_amps: Vec::new(),
        })
        .collect())
}

fn check_undepleted(pumps: &PumpConfig, weak: &[C64]) -> Result<()> {
    let min_pump = pumps
        .powers
        .iter()
        .cloned()
        .filter(|p| *p > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_pump.is_finite() {
        return Ok(());
    }
    let limit = UNDEPLETED_RATIO * min_pump;
    let weak_max = weak.iter().map(|b| b.norm_sqr()).fold(0.0, f64::max);
    if weak_max > limit * (1.0 + 1e-9) {
        return Err(Error::UndepletedRegime { weak: weak_max, limit });
    }
    Ok(())
}

/// Full trajectory of [`integrate_weak`], sampled at the requested step.
pub fn integrate_weak_trajectory(
    profile: &DispersionProfile,
    grid: &FrequencyGrid,
    pumps: &PumpConfig,
    initial_weak: &[C64],
    settings: &IntegratorSettings,
) -> Result<Vec<PropagationState>> {
    pumps.validate()?;
    grid.validate()?;
    settings.validate(profile.length)?;
    let n = pumps.len();
    Error::check_len("frequency grid", n, grid.len())?;
    Error::check_len("initial weak amplitudes", n, initial_weak.len())?;
    if initial_weak.iter().any(|b| !(b.re.is_finite() && b.im.is_finite())) {
        return Err(Error::invalid("initial_weak", "must be finite"));
    }
    check_undepleted(pumps, initial_weak)?;

    // dbeta[l][m] = Δβ^l_m, the phase mismatch of the A_l A_m* b_l → b_m process.
    let dbeta = delta_beta_matrix(profile, grid)?;
    let (gamma, alpha) = (profile.gamma, profile.alpha);
    let rhs = |z: f64, y: &[C64]| {
        let (a, b) = y.split_at(n);
        let mut out = vec![C64::default(); 2 * n];
        pump_rhs(gamma, alpha, a, &mut out[..n]);
        let total: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        for m in 0..n {
            let mut acc = b[m] * C64::new(-alpha, 2.0 * gamma * total);
            let am_conj = a[m].conj();
            for l in (0..n).filter(|&l| l != m) {
                let phasor = C64::from_polar(1.0, dbeta[l][m] * z);
                acc += C64::new(0.0, 2.0 * gamma) * phasor * a[l] * am_conj * b[l];
            }
            out[n + m] = acc;
        }
        out
    };

    let mut y0 = pumps.amplitudes();
    y0.extend_from_slice(initial_weak);
    let scale = initial_weak.iter().map(|b| b.norm()).fold(0.0, f64::max);
    let traj = run_checked(&rhs, &y0, profile.length, settings, n..2 * n, scale, true)?;
    Ok(traj
        .into_iter()
        .map(|(z, y)| PropagationState {
            z,
            pump_amps: y[..n].to_vec(),
            weak_amps: y[n..].to_vec(),
        })
        .collect())
}

/// Lab-frame weak amplitudes at `z = L` in the undepleted-pump approximation.
pub fn integrate_weak(
    profile: &DispersionProfile,
    grid: &FrequencyGrid,
    pumps: &PumpConfig,
    initial_weak: &[C64],
    settings: &IntegratorSettings,
) -> Result<Vec<C64>> {
    let traj = integrate_weak_trajectory(profile, grid, pumps, initial_weak, settings)?;
    Ok(traj.last().expect("non-empty trajectory").weak_amps.clone())
}

/// One field of the unapproximated model: angular frequency (rad/s) and amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Field {
    pub omega: f64,
    pub amplitude: C64,
}

/// Pumps followed by weak fields, in grid order.
pub fn combined_fields(grid: &FrequencyGrid, pumps: &PumpConfig, weak: &[C64]) -> Result<Vec<Field>> {
    Error::check_len("pumps", grid.len(), pumps.len())?;
    Error::check_len("weak amplitudes", grid.len(), weak.len())?;
    let mut fields: Vec<Field> = grid
        .pump_freqs
        .iter()
        .zip(pumps.amplitudes())
        .map(|(&omega, amplitude)| Field { omega, amplitude })
        .collect();
    fields.extend(
        grid.weak_freqs
            .iter()
            .zip(weak)
            .map(|(&omega, &amplitude)| Field { omega, amplitude }),
    );
    Ok(fields)
}

/// Energy-conserving term `(k, l, m)` feeding field `n`, with its mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    k: usize,
    l: usize,
    m: usize,
    dbeta: f64,
}

fn closure_terms(profile: &DispersionProfile, omegas: &[f64]) -> Vec<Vec<Term>> {
    let scale = omegas.iter().fold(0.0_f64, |acc, w| acc.max(w.abs()));
    let tol = 1e-9 * scale;
    let betas: Vec<f64> = omegas.iter().map(|&w| profile.beta(w)).collect();
    let count = omegas.len();
    (0..count)
        .map(|n| {
            let mut terms = Vec::new();
            for k in 0..count {
                for l in 0..count {
                    for m in 0..count {
                        if (omegas[k] + omegas[l] - omegas[m] - omegas[n]).abs() <= tol {
                            let dbeta = (betas[k] - betas[m]) + (betas[l] - betas[n]);
                            terms.push(Term { k, l, m, dbeta });
                        }
                    }
                }
            }
            terms
        })
        .collect()
}

/// Integrates `∂_z A_n = −α A_n + iγ Σ e^{iΔβ z} A_k A_l A_m*` over all ordered
/// triples with `ω_k + ω_l = ω_m + ω_n`, and returns the amplitudes at `z = L`.
pub fn full_fwm_reference(
    profile: &DispersionProfile,
    fields: &[Field],
    settings: &IntegratorSettings,
) -> Result<Vec<C64>> {
    settings.validate(profile.length)?;
    if fields.is_empty() {
        return Err(Error::NoEnergyClosure);
    }
    if fields.len() > MAX_REFERENCE_FIELDS {
        return Err(Error::invalid(
            "fields",
            format!("at most {MAX_REFERENCE_FIELDS} fields are supported"),
        ));
    }
    if fields.iter().any(|f| !(f.omega.is_finite() && f.omega > 0.0)) {
        return Err(Error::invalid("fields", "frequencies must be finite and > 0"));
    }
    let omegas: Vec<f64> = fields.iter().map(|f| f.omega).collect();
    let terms = closure_terms(profile, &omegas);
    if terms.iter().all(Vec::is_empty) {
        return Err(Error::NoEnergyClosure);
    }
    let (gamma, alpha) = (profile.gamma, profile.alpha);
    let rhs = |z: f64, y: &[C64]| {
        terms
            .iter()
            .enumerate()
            .map(|(n, list)| {
                let sum: C64 = list
                    .iter()
                    .map(|t| C64::from_polar(1.0, t.dbeta * z) * y[t.k] * y[t.l] * y[t.m].conj())
                    .sum();
                y[n] * (-alpha) + C64::new(0.0, gamma) * sum
            })
            .collect()
    };
    let y0: Vec<C64> = fields.iter().map(|f| f.amplitude).collect();
    let scale = y0.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let traj = run_checked(&rhs, &y0, profile.length, settings, 0..y0.len(), scale, false)?;
    Ok(traj.into_iter().last().expect("non-empty").1)
}
