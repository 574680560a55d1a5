//! Least-squares analysis of count data.
//!
//! The pipeline mirrors how the measured curves are reduced:
//!
//! 1. [`normalize_coincidences`] / [`normalize_singles`] turn raw rates into
//!    curves equal to 1 with the pumps off.
//! 2. [`fit_phase_scale`] finds κ in `φ = κ·P` from a depletion curve.
//! 3. [`fit_channel_scales`] fixes one multiplicative factor per generated
//!    channel given κ.
//! 4. [`fit_zeta`] extracts the squeezing parameter from the ratio of
//!    multiphoton to pair coincidences.
//!
//! [`generate_synthetic`] and [`generate_ratio_curve`] produce data from the
//! forward model for closed-loop checks. All routines are deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dispersion::{DispersionProfile, MismatchReport};
use crate::error::{Error, Result};
use crate::quantum::{correlations, multiphoton_ratio, multiphoton_scaling_curve, InputState};
use crate::transfer::{general_transfer, lossy_transfer, p_coeff, q_coeff, PumpConfig};

pub const MAX_ITERATIONS: usize = 10_000;
pub const PARAM_TOL: f64 = 1e-10;

/// Measured rates at one pump power.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    /// Peak power per pump (W).
    pub pump_power: f64,
    /// Singles rate per channel (counts/s).
    pub singles: Vec<f64>,
    /// Coincidence rates for pairs `i < j` in lexicographic order (counts/s).
    pub coincidences: Vec<f64>,
    /// Singles per channel with the pumps delayed out of the interaction (counts/s).
    pub accidental_singles: Vec<f64>,
}

/// Position of pair `(i, j)`, `i < j`, in lexicographic order over `n` channels.
pub fn pair_index(n: usize, i: usize, j: usize) -> Result<usize> {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, modes: n });
    }
    if i == j {
        return Err(Error::invalid("ports", "pair needs two distinct channels"));
    }
    Ok(i * (2 * n - i - 1) / 2 + (j - i - 1))
}

impl CountRecord {
    pub fn n_channels(&self) -> usize {
        self.singles.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.singles.len();
        Error::check_len("accidental singles", n, self.accidental_singles.len())?;
        Error::check_len("coincidences", n * n.saturating_sub(1) / 2, self.coincidences.len())?;
        if !(self.pump_power.is_finite() && self.pump_power >= 0.0) {
            return Err(Error::invalid("pump_power", "must be finite and ≥ 0"));
        }
        let rates = self
            .singles
            .iter()
            .chain(&self.coincidences)
            .chain(&self.accidental_singles);
        if rates.into_iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::invalid("rates", "must be finite and ≥ 0"));
        }
        Ok(())
    }

    pub fn coincidence(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.coincidences[pair_index(self.n_channels(), i, j)?])
    }
}

/// `(power, value)` sample of a normalized curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub power: f64,
    pub value: f64,
}

fn zero_power_record(records: &[CountRecord]) -> Result<&CountRecord> {
    records
        .iter()
        .find(|r| r.pump_power == 0.0)
        .ok_or_else(|| Error::MissingData("no record at zero pump power".into()))
}

/// `R = C_ij / (A_i A_j)` with the record's own accidental singles, then
/// divided by `R` at zero pump power.
pub fn normalize_coincidences(records: &[CountRecord], i: usize, j: usize) -> Result<Vec<CurvePoint>> {
    for r in records {
        r.validate()?;
    }
    let raw = |r: &CountRecord| -> Result<f64> {
        let (ai, aj) = (r.accidental_singles[i], r.accidental_singles[j]);
        if ai == 0.0 || aj == 0.0 {
            return Err(Error::ZeroDivision(format!(
                "zero accidental singles on channel {} or {} at {} W",
                i + 1,
                j + 1,
                r.pump_power
            )));
        }
        Ok(r.coincidence(i, j)? / (ai * aj))
    };
    let reference = raw(zero_power_record(records)?)?;
    if reference == 0.0 {
        return Err(Error::ZeroDivision("zero coincidences at zero pump power".into()));
    }
    records
        .iter()
        .map(|r| {
            Ok(CurvePoint {
                power: r.pump_power,
                value: raw(r)? / reference,
            })
        })
        .collect()
}

/// Singles of `channel` divided by their zero-power value.
pub fn normalize_singles(records: &[CountRecord], channel: usize) -> Result<Vec<CurvePoint>> {
    for r in records {
        r.validate()?;
        if channel >= r.n_channels() {
            return Err(Error::IndexOutOfRange {
                index: channel,
                modes: r.n_channels(),
            });
        }
    }
    let reference = zero_power_record(records)?.singles[channel];
    if reference == 0.0 {
        return Err(Error::ZeroDivision(format!(
            "zero singles on channel {} at zero pump power",
            channel + 1
        )));
    }
    Ok(records
        .iter()
        .map(|r| CurvePoint {
            power: r.pump_power,
            value: r.singles[channel] / reference,
        })
        .collect())
}

/// Closed-form curve against which κ is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseModel {
    /// Input channel of a single input: `|p_N(φ)|²`.
    SingleInputDepletion,
    /// Input channel of a phase-averaged dual input: `|p_N|² + |q_N|²`.
    DualInputDepletion,
    /// Photon-pair `g(2)` between the input ports: `|p_N² + q_N²|²`.
    PairCoincidence,
}

impl PhaseModel {
    pub fn eval(self, n_modes: usize, phi: f64) -> f64 {
        let p = p_coeff(n_modes, phi);
        let q = q_coeff(n_modes, phi);
        match self {
            PhaseModel::SingleInputDepletion => p.norm_sqr(),
            PhaseModel::DualInputDepletion => p.norm_sqr() + q.norm_sqr(),
            PhaseModel::PairCoincidence => (p * p + q * q).norm_sqr(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitResult {
    /// κ in rad/W.
    pub phase_scale: Option<f64>,
    pub channel_scales: Vec<f64>,
    /// |ζ| at the reference point.
    pub zeta: Option<f64>,
    /// Euclidean norm of the residual vector at the optimum.
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Outcome of a bounded scalar minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent's bounded minimizer: golden-section steps with parabolic
/// interpolation when it stays inside the bracket and shrinks fast enough.
/// Stops when the bracket half-width falls below `rel_tol·|x| + abs_tol`.
pub fn brent_minimize<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Minimum {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = a + GOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0_f64, 0.0_f64);
    for iter in 1..=max_iter {
        let m = 0.5 * (a + b);
        let tol = rel_tol * x.abs() + abs_tol;
        let tol2 = 2.0 * tol;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Minimum {
                x,
                fx,
                iterations: iter - 1,
                converged: true,
            };
        }
        let mut golden = true;
        if e.abs() > tol {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol } else { -tol };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol { x + d } else { x + tol.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum {
        x,
        fx,
        iterations: max_iter,
        converged: false,
    }
}

/// Evaluates `f` on `points` equally spaced abscissae in `[lo, hi]`, then
/// refines around the best one (lowest abscissa on ties) with Brent.
fn scan_then_refine<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, points: usize) -> Minimum {
    let step = (hi - lo) / (points - 1) as f64;
    let mut best = (0, f64::INFINITY);
    for k in 0..points {
        let val = f(lo + step * k as f64);
        if val < best.1 {
            best = (k, val);
        }
    }
    let left = lo + step * best.0.saturating_sub(1) as f64;
    let right = lo + step * (best.0 + 1).min(points - 1) as f64;
    let mut min = brent_minimize(f, left, right, PARAM_TOL, 1e-300, MAX_ITERATIONS);
    // Brent never evaluates the bracket ends; keep the scan point if it wins.
    let scan_x = lo + step * best.0 as f64;
    if best.1 < min.fx {
        min.x = scan_x;
        min.fx = best.1;
    }
    min.iterations += points;
    min
}

fn check_curve(points: &[CurvePoint], min_points: usize) -> Result<()> {
    if points.len() < min_points {
        return Err(Error::invalid(
            "points",
            format!("at least {min_points} points are required"),
        ));
    }
    if points
        .iter()
        .any(|p| !(p.power.is_finite() && p.power >= 0.0 && p.value.is_finite()))
    {
        return Err(Error::invalid("points", "powers must be finite and ≥ 0, values finite"));
    }
    Ok(())
}

/// Number of scan points used before Brent refinement.
const KAPPA_SCAN: usize = 4001;

/// Fits `φ = κ·P` by least squares against `model`.
///
/// κ is searched in `(0, π/(N·δP)]`, where `δP` is the smallest gap between
/// distinct powers; beyond that the sampled curve aliases.
pub fn fit_phase_scale(points: &[CurvePoint], model: PhaseModel, n_modes: usize) -> Result<FitResult> {
    check_curve(points, 5)?;
    if n_modes < 2 {
        return Err(Error::invalid("n_modes", "at least two modes are required"));
    }
    let (vmin, vmax) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.value), hi.max(p.value))
    });
    if vmax - vmin <= 1e-12 * vmax.abs().max(1.0) {
        return Err(Error::DegenerateData("curve is constant".into()));
    }
    let mut powers: Vec<f64> = points.iter().map(|p| p.power).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    let gap = powers.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let p_max = *powers.last().expect("non-empty");
    if !(gap.is_finite() && gap > 0.0 && p_max > 0.0) {
        return Err(Error::DegenerateData("need at least two distinct powers".into()));
    }
    let n = n_modes as f64;
    let hi = std::f64::consts::PI / (n * gap);
    let lo = hi / KAPPA_SCAN as f64 * 1e-3;

    let objective = |kappa: f64| -> f64 {
        points
            .iter()
            .map(|p| (p.value - model.eval(n_modes, kappa * p.power)).powi(2))
            .sum()
    };
    let min = scan_then_refine(&objective, lo, hi, KAPPA_SCAN);
    let mut warnings = Vec::new();
    if n * min.x * p_max < std::f64::consts::PI {
        warnings.push("data span less than half an oscillation of the model".into());
    }
    if !min.converged {
        return Err(Error::FitNonConvergence {
            iterations: min.iterations,
        });
    }
    Ok(FitResult {
        phase_scale: Some(min.x),
        residual_norm: min.fx.sqrt(),
        converged: true,
        iterations: min.iterations,
        warnings,
        ..FitResult::default()
    })
}

/// Per-channel factor `s = Σ d·m / Σ m²` against `|q_N(κP)|²`.
pub fn fit_channel_scales(curves: &[Vec<CurvePoint>], phase_scale: f64, n_modes: usize) -> Result<FitResult> {
    if !(phase_scale.is_finite() && phase_scale > 0.0) {
        return Err(Error::invalid("phase_scale", "must be finite and > 0"));
    }
    let mut scales = Vec::with_capacity(curves.len());
    let mut warnings = Vec::new();
    let mut residual = 0.0;
    for (k, curve) in curves.iter().enumerate() {
        check_curve(curve, 1)?;
        let model: Vec<f64> = curve
            .iter()
            .map(|p| q_coeff(n_modes, phase_scale * p.power).norm_sqr())
            .collect();
        let mm: f64 = model.iter().map(|m| m * m).sum();
        if mm == 0.0 {
            return Err(Error::ZeroDivision(format!(
                "model for channel curve {} vanishes",
                k + 1
            )));
        }
        if curve.iter().all(|p| p.value == 0.0) {
            warnings.push(format!("channel curve {} has all-zero data", k + 1));
        }
        let s = curve.iter().zip(&model).map(|(p, m)| p.value * m).sum::<f64>() / mm;
        residual += curve
            .iter()
            .zip(&model)
            .map(|(p, m)| (p.value - s * m).powi(2))
            .sum::<f64>();
        scales.push(s);
    }
    Ok(FitResult {
        phase_scale: Some(phase_scale),
        channel_scales: scales,
        residual_norm: residual.sqrt(),
        converged: true,
        iterations: 1,
        warnings,
        ..FitResult::default()
    })
}

/// `(singles rate, multiphoton/pair ratio)` sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioPoint {
    pub singles: f64,
    pub ratio: f64,
}

/// Free parameters of [`fit_zeta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZetaFit {
    /// Efficiency scale η only, balanced arms (`c = 1`).
    #[default]
    Efficiency,
    /// η and the arm balance `c ∈ [0.5, 2]`.
    EfficiencyAndBalance,
}

const BALANCE_RANGE: (f64, f64) = (0.5, 2.0);

/// Fits the ratio model `c·S/(4(1 + S))` with `S = singles/η`, and reports
/// `|ζ| = asinh(√(S))` at the point with the highest singles rate.
pub fn fit_zeta(points: &[RatioPoint], mode: ZetaFit) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::invalid("points", "at least 3 points are required"));
    }
    if points
        .iter()
        .any(|p| !(p.singles.is_finite() && p.singles > 0.0 && p.ratio.is_finite()))
    {
        return Err(Error::invalid(
            "points",
            "singles must be finite and > 0, ratios finite",
        ));
    }
    let ceiling = BALANCE_RANGE.1 / 4.0;
    if let Some(bad) = points.iter().find(|p| p.ratio < 0.0 || p.ratio >= ceiling) {
        return Err(Error::OutOfModelRange(format!(
            "ratio {} is outside [0, {ceiling})",
            bad.ratio
        )));
    }
    if points.iter().all(|p| p.ratio == 0.0) {
        return Ok(FitResult {
            zeta: Some(0.0),
            converged: true,
            warnings: vec!["all ratios are zero: pure pair source".into()],
            ..FitResult::default()
        });
    }
    let reference = points.iter().map(|p| p.singles).fold(0.0, f64::max);

    // For fixed η, the best balance is a clamped linear least-squares solution.
    let balance_for = |eta: f64| -> f64 {
        match mode {
            ZetaFit::Efficiency => 1.0,
            ZetaFit::EfficiencyAndBalance => {
                let (num, den) = points.iter().fold((0.0, 0.0), |(n, d), p| {
                    let s = p.singles / eta;
                    let m = s / (4.0 * (1.0 + s));
                    (n + p.ratio * m, d + m * m)
                });
                (num / den).clamp(BALANCE_RANGE.0, BALANCE_RANGE.1)
            }
        }
    };
    let objective = |log_eta: f64| -> f64 {
        let eta = log_eta.exp();
        let c = balance_for(eta);
        points
            .iter()
            .map(|p| {
                let s = p.singles / eta;
                (p.ratio - c * s / (4.0 * (1.0 + s))).powi(2)
            })
            .sum()
    };
    // S at the reference point spans [1e-4, 1e2], i.e. |ζ| from 0.01 to 3.
    let lo = (reference / 1e2).ln();
    let hi = (reference / 1e-4).ln();
    let min = scan_then_refine(&objective, lo, hi, 2001);
    if !min.converged {
        return Err(Error::FitNonConvergence {
            iterations: min.iterations,
        });
    }
    let eta = min.x.exp();
    let mut warnings = Vec::new();
    if (min.x - lo).abs() < 1e-9 * lo.abs().max(1.0) || (min.x - hi).abs() < 1e-9 * hi.abs().max(1.0) {
        warnings.push("efficiency scale at the edge of the search range".into());
    }
    let c = balance_for(eta);
    let mut channel_scales = vec![eta];
    if mode == ZetaFit::EfficiencyAndBalance {
        channel_scales.push(c);
        if c == BALANCE_RANGE.0 || c == BALANCE_RANGE.1 {
            warnings.push("arm balance at the edge of its range".into());
        }
    }
    Ok(FitResult {
        zeta: Some((reference / eta).sqrt().asinh()),
        channel_scales,
        residual_norm: min.fx.sqrt(),
        converged: true,
        iterations: min.iterations,
        warnings,
        ..FitResult::default()
    })
}

/// Forward model for [`generate_synthetic`].
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticModel {
    pub state: InputState,
    pub profile: DispersionProfile,
    /// Relative pump powers; scaled so their mean equals each sweep power.
    pub pumps: PumpConfig,
    /// Multiplicative detection factor per channel.
    pub channel_scales: Vec<f64>,
    /// Counts/s per unit of `G(1)` and per unit of `G(2)`.
    pub base_rate: f64,
}

fn noisy(rate: f64, sigma: f64, normal: &Normal<f64>, rng: &mut ChaCha8Rng) -> f64 {
    if sigma == 0.0 {
        rate
    } else {
        (rate * (1.0 + sigma * normal.sample(rng))).max(0.0)
    }
}

/// Evaluates the quantum closed forms at `φ = 2γL·P` for each per-pump power
/// `P`, applies channel scales and multiplicative Gaussian noise of relative
/// width `sigma`. Pumps-off singles go into `accidental_singles`.
pub fn generate_synthetic(model: &SyntheticModel, powers: &[f64], sigma: f64, seed: u64) -> Result<Vec<CountRecord>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid("sigma", "must be finite and ≥ 0"));
    }
    model.state.validate()?;
    model.pumps.validate()?;
    let n = model.state.n_modes();
    Error::check_len("pumps", n, model.pumps.len())?;
    Error::check_len("channel scales", n, model.channel_scales.len())?;
    let mean = model.pumps.mean_power();
    if mean <= 0.0 {
        return Err(Error::invalid("pumps", "relative powers must not all be zero"));
    }
    let scaled = |p: f64| PumpConfig {
        powers: model.pumps.powers.iter().map(|w| w * p / mean).collect(),
        phases: model.pumps.phases.clone(),
    };
    let evaluate = |p: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let pumps = scaled(p);
        let transfer = if model.profile.alpha > 0.0 && pumps.has_equal_powers() {
            lossy_transfer(&model.profile, &pumps, model.profile.length, None)?
        } else {
            let report = MismatchReport::phase_matched(&model.profile, &pumps.powers)?;
            general_transfer(&model.profile, &pumps, &report)?
        };
        let c = correlations(&model.state, &transfer)?;
        Ok((c.singles, c.pairs.iter().map(|p| p.raw).collect()))
    };
    let (acc_singles, _) = evaluate(0.0)?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(powers.len());
    for &p in powers {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::invalid("powers", "must be finite and ≥ 0"));
        }
        let (g1, g2) = evaluate(p)?;
        let scale = &model.channel_scales;
        let singles = (0..n)
            .map(|i| noisy(model.base_rate * scale[i] * g1[i], sigma, &normal, &mut rng))
            .collect();
        let mut coincidences = Vec::with_capacity(g2.len());
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                coincidences.push(noisy(
                    model.base_rate * scale[i] * scale[j] * g2[idx],
                    sigma,
                    &normal,
                    &mut rng,
                ));
                idx += 1;
            }
        }
        let accidental_singles = (0..n)
            .map(|i| noisy(model.base_rate * scale[i] * acc_singles[i], sigma, &normal, &mut rng))
            .collect();
        records.push(CountRecord {
            pump_power: p,
            singles,
            coincidences,
            accidental_singles,
        });
    }
    Ok(records)
}

/// Source-characterization sweep: singles and multiphoton/pair ratio at each
/// `|ζ|`, with multiplicative Gaussian noise of width `sigma` on the ratio.
pub fn generate_ratio_curve(zetas: &[f64], eta_b: f64, eta_r: f64, sigma: f64, seed: u64) -> Result<Vec<RatioPoint>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid("sigma", "must be finite and ≥ 0"));
    }
    let curve = multiphoton_scaling_curve(zetas, eta_b, eta_r)?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(curve
        .iter()
        .map(|pt| RatioPoint {
            singles: pt.singles,
            ratio: noisy(multiphoton_ratio(pt.zeta, eta_r / eta_b), sigma, &normal, &mut rng),
        })
        .collect())
}
