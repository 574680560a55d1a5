//! Command-line front end: JSON experiment configs in, CSV out.
//!
//! Subcommands: `transfer`, `sweep`, `phasematch`, `oracle`, `fit`, `synth`.
//! Every output starts with `#` comment lines recording the tool version, the
//! SHA-256 of the effective configuration and the seed, so identical inputs
//! give byte-identical files.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 numerical failure,
//! 3 fit failure, 4 oracle tolerance exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dispersion::{
    lambda_nm_to_omega, nonlinear_mismatch, thz_to_omega, DispersionProfile, FrequencyGrid, MismatchReport,
};
use crate::error::Error;
use crate::fitting::{
    fit_channel_scales, fit_phase_scale, fit_zeta, generate_ratio_curve, generate_synthetic, normalize_singles,
    CountRecord, CurvePoint, FitResult, PhaseModel, RatioPoint, SyntheticModel, ZetaFit,
};
use crate::oracle::{fock_evolve, wick_correlations, FockState, DEFAULT_CUTOFF};
use crate::propagation::{integrate_weak, IntegratorSettings, UNDEPLETED_RATIO};
use crate::quantum::{correlations, InputKind, InputState};
use crate::transfer::{general_transfer, ideal_transfer, lossy_transfer, NonlinearPhase, PumpConfig, TransferMatrix};
use crate::C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::FitNonConvergence { .. }
            | Error::DegenerateData(_)
            | Error::OutOfModelRange(_)
            | Error::ZeroDivision(_) => 3,
            Error::Convergence { .. }
            | Error::Numerical(_)
            | Error::Symplectic { .. }
            | Error::TruncationTail { .. }
            | Error::CutoffOverflow { .. }
            | Error::NoRootInBracket { .. }
            | Error::NoEnergyClosure => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

// ---------------------------------------------------------------------------
// Configuration

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum TransferChoice {
    #[default]
    Ideal,
    General,
    Lossy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InputChoice {
    Single,
    Dual,
    Pair,
    Squeezed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyUnit {
    RadS,
    Nm,
    Thz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub unit: FrequencyUnit,
    pub pumps: Vec<f64>,
    pub weak: Vec<f64>,
}

impl GridSpec {
    pub fn to_grid(&self) -> crate::Result<FrequencyGrid> {
        let convert = |x: f64| match self.unit {
            FrequencyUnit::RadS => x,
            FrequencyUnit::Nm => lambda_nm_to_omega(x),
            FrequencyUnit::Thz => thz_to_omega(x),
        };
        FrequencyGrid::new(
            self.pumps.iter().map(|&x| convert(x)).collect(),
            self.weak.iter().map(|&x| convert(x)).collect(),
        )
    }
}

/// Input light. Mode labels are one-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub kind: InputChoice,
    /// Single coherent input mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    /// Input modes of two-mode inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<[usize; 2]>,
    /// Coherent amplitude ν (real part for single inputs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_averaged: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_arg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pre_loss: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_loss: Option<Vec<f64>>,
}

impl InputSpec {
    pub fn of_kind(kind: InputChoice) -> Self {
        Self {
            kind,
            mode: None,
            modes: None,
            amplitude: None,
            amplitude_im: None,
            phase_averaged: None,
            relative_phase: None,
            zeta_abs: None,
            zeta_arg: None,
            pre_loss: None,
            post_loss: None,
        }
    }

    /// Same losses and modes, different input class; class-specific fields are dropped.
    pub fn with_kind(&self, kind: InputChoice) -> Self {
        if kind == self.kind {
            return self.clone();
        }
        Self {
            mode: self.mode.or(self.modes.map(|m| m[0])),
            modes: self.modes,
            pre_loss: self.pre_loss.clone(),
            post_loss: self.post_loss.clone(),
            ..Self::of_kind(kind)
        }
    }

    pub fn to_state(&self, n: usize) -> crate::Result<InputState> {
        let zero_based = |label: usize| -> crate::Result<usize> {
            if label == 0 || label > n {
                Err(Error::IndexOutOfRange { index: label, modes: n })
            } else {
                Ok(label - 1)
            }
        };
        let pair = || -> crate::Result<(usize, usize)> {
            let [a, b] = self.modes.unwrap_or([1, n]);
            Ok((zero_based(a)?, zero_based(b)?))
        };
        let kind = match self.kind {
            InputChoice::Single => InputKind::SingleCoherent {
                amplitude: C64::new(self.amplitude.unwrap_or(1.0), self.amplitude_im.unwrap_or(0.0)),
                mode: zero_based(self.mode.unwrap_or(1))?,
            },
            InputChoice::Dual => InputKind::DualCoherent {
                amplitude: self.amplitude.unwrap_or(1.0),
                modes: pair()?,
                phase_averaged: self.phase_averaged.unwrap_or(true),
                relative_phase: self.relative_phase.unwrap_or(0.0),
            },
            InputChoice::Pair => InputKind::PhotonPair { modes: pair()? },
            InputChoice::Squeezed => InputKind::SqueezedVacuum {
                zeta: C64::from_polar(self.zeta_abs.unwrap_or(0.4), self.zeta_arg.unwrap_or(0.0)),
                modes: pair()?,
            },
        };
        InputState::new(
            kind,
            self.pre_loss.clone().unwrap_or_else(|| vec![1.0; n]),
            self.post_loss.clone().unwrap_or_else(|| vec![1.0; n]),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSweep {
    pub phi_min: f64,
    pub phi_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSweep {
    pub powers_w: Vec<f64>,
    /// κ in `φ = κP`; defaults to `2γL`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_scale_rad_per_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSpec {
    Phi(PhiSweep),
    Power(PowerSweep),
}

/// Synthetic-data settings; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    /// Per-pump powers (W); default 31 points spanning `φ ∈ [0, 2π/3]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers_w: Option<Vec<f64>>,
    /// Relative Gaussian noise; default 0.01.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel_scales: Option<Vec<f64>>,
    /// Counts/s per unit expectation; default 1e4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_rate: Option<f64>,
    /// |ζ| values of the source sweep; default 12 points rising linearly to 0.4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zetas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub profile: DispersionProfile,
    pub grid: GridSpec,
    pub pumps: PumpConfig,
    pub input: InputSpec,
    pub sweep: SweepSpec,
    pub seed: u64,
    #[serde(default)]
    pub transfer_kind: TransferChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthSpec>,
    /// Default output path when `--out` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentConfig {
    /// Three O-band signals (1280.6, 1282.8, 1285.0 nm) mirrored about a
    /// GVD zero near 1404 nm into the C band, 100 m of fiber with
    /// γ = 2 W⁻¹km⁻¹ and 0.43 dB/km, pumps at the tritter point.
    pub fn builtin() -> Self {
        let weak_nm = [1280.6, 1282.8, 1285.0];
        let zgvd = lambda_nm_to_omega(1404.0);
        let pumps_nm: Vec<f64> = weak_nm
            .iter()
            .map(|&nm| crate::dispersion::omega_to_lambda_nm(2.0 * zgvd - lambda_nm_to_omega(nm)))
            .collect();
        let (gamma, length) = (2e-3, 100.0);
        let alpha = 0.43 * std::f64::consts::LN_10 / 10.0 / 1000.0 / 2.0;
        let power = 2.0 * std::f64::consts::PI / 9.0 / (2.0 * gamma * length);
        Self {
            profile: DispersionProfile {
                omega0: zgvd,
                beta_coeffs: vec![0.0, 0.0, 0.0, 1.2e-40],
                gamma,
                length,
                alpha,
            },
            grid: GridSpec {
                unit: FrequencyUnit::Nm,
                pumps: pumps_nm,
                weak: weak_nm.to_vec(),
            },
            pumps: PumpConfig {
                powers: vec![power; 3],
                phases: vec![0.0; 3],
            },
            input: InputSpec {
                modes: Some([1, 3]),
                ..InputSpec::of_kind(InputChoice::Pair)
            },
            sweep: SweepSpec::Phi(PhiSweep {
                phi_min: 0.0,
                phi_max: 2.0 * std::f64::consts::PI / 3.0,
                steps: 201,
            }),
            seed: 1,
            transfer_kind: TransferChoice::Ideal,
            synth: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn n_modes(&self) -> usize {
        self.grid.weak.len()
    }

    pub fn validate(&self) -> CliResult<()> {
        self.profile.validate()?;
        let grid = self.grid.to_grid()?;
        self.pumps.validate()?;
        Error::check_len("pumps", grid.len(), self.pumps.len())?;
        self.input.to_state(grid.len())?;
        match &self.sweep {
            SweepSpec::Phi(s) => {
                if s.steps < 2 {
                    return Err(CliError::config("sweep.phi.steps must be ≥ 2"));
                }
                if !(s.phi_min.is_finite() && s.phi_max.is_finite() && s.phi_min < s.phi_max) {
                    return Err(CliError::config("sweep.phi needs finite phi_min < phi_max"));
                }
            }
            SweepSpec::Power(s) => {
                if s.powers_w.is_empty() || s.powers_w.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(CliError::config(
                        "sweep.power.powers_w must be non-empty, finite and ≥ 0",
                    ));
                }
                if let Some(k) = s.phase_scale_rad_per_w {
                    if !(k.is_finite() && k > 0.0) {
                        return Err(CliError::config("sweep.power.phase_scale_rad_per_w must be > 0"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(power, φ)` pairs of the sweep; power is `None` for φ sweeps.
    pub fn sweep_points(&self) -> Vec<(Option<f64>, f64)> {
        match &self.sweep {
            SweepSpec::Phi(s) => (0..s.steps)
                .map(|k| {
                    (
                        None,
                        s.phi_min + (s.phi_max - s.phi_min) * k as f64 / (s.steps - 1) as f64,
                    )
                })
                .collect(),
            SweepSpec::Power(s) => {
                let kappa = s.phase_scale_rad_per_w.unwrap_or_else(|| self.profile.phase_per_watt());
                s.powers_w.iter().map(|&p| (Some(p), kappa * p)).collect()
            }
        }
    }

    /// Pumps rescaled so that `2γL·mean(P) = phi`.
    fn pumps_at(&self, phi: f64) -> crate::Result<PumpConfig> {
        let mean = self.pumps.mean_power();
        let target = phi / self.profile.phase_per_watt();
        if !(target.is_finite() && target >= 0.0) {
            return Err(Error::invalid("phi", "needs γL > 0 and φ ≥ 0"));
        }
        let powers = if mean > 0.0 {
            self.pumps.powers.iter().map(|p| p * target / mean).collect()
        } else if target == 0.0 {
            self.pumps.powers.clone()
        } else {
            vec![target; self.pumps.len()]
        };
        PumpConfig::new(powers, self.pumps.phases.clone())
    }

    /// Transfer matrix of the configured kind at nonlinear phase `phi`
    /// (the configured pumps when `None`).
    pub fn transfer_at(&self, kind: TransferChoice, phi: Option<f64>) -> crate::Result<TransferMatrix> {
        let grid = self.grid.to_grid()?;
        let pumps = match phi {
            Some(phi) if kind != TransferChoice::Ideal => self.pumps_at(phi)?,
            _ => self.pumps.clone(),
        };
        match kind {
            TransferChoice::Ideal => {
                let phi = phi.unwrap_or_else(|| self.profile.nonlinear_phase(self.pumps.mean_power()));
                ideal_transfer(grid.len(), phi)
            }
            TransferChoice::General => {
                let report = nonlinear_mismatch(&self.profile, &grid, &pumps.powers)?;
                general_transfer(&self.profile, &pumps, &report)
            }
            TransferChoice::Lossy => {
                let report = nonlinear_mismatch(&self.profile, &grid, &pumps.powers)?;
                let u = lossy_transfer(&self.profile, &pumps, self.profile.length, Some(&report))?;
                // drop the lab-frame SPM/XPM phase so α = 0 reproduces the ideal matrix
                let phi_alpha = NonlinearPhase::new(&self.profile, pumps.powers[0], self.profile.length).phi_alpha;
                Ok(u.with_global_phase(-phi_alpha * (grid.len() as f64 - 1.0)))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Parser)]
#[command(
    name = "bsfwm",
    version,
    about = "N-mode Bragg-scattering frequency beamsplitter toolkit"
)]
pub struct Cli {
    /// Experiment configuration (JSON); built-in default when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps and sampling.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckChoice {
    Classical,
    Quantum,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    Pair,
    Coherent,
    Multiphoton,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the transfer matrix as CSV (`i,j,re_ij,im_ij`, one-based).
    Transfer {
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        #[arg(long)]
        kind: Option<TransferChoice>,
    },
    /// Singles and normalized coincidences along the configured sweep.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        phi_min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        phi_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        input: Option<InputChoice>,
        #[arg(long)]
        kind: Option<TransferChoice>,
    },
    /// Phase-mismatch table of the configured grid and pumps.
    Phasematch,
    /// Compare closed forms against the numerical oracles.
    Oracle {
        #[arg(long, value_enum, default_value_t = CheckChoice::All)]
        check: CheckChoice,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Fit model parameters to a CSV data file.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        model: FitModel,
    },
    /// Generate synthetic data from the forward model.
    Synth {
        #[arg(long, value_enum, default_value_t = FitModel::Pair)]
        model: FitModel,
    },
}

/// Runs the parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(CliError::config(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::builtin(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli.out.clone().or_else(|| cfg.output.clone().map(PathBuf::from));
    let text = match &cli.command {
        Command::Transfer { phi, kind } => {
            if let Some(kind) = kind {
                cfg.transfer_kind = *kind;
            }
            let (csv, residual) = cmd_transfer(&cfg, *phi)?;
            if out.is_some() {
                println!("unitarity_residual {residual:.3e}");
            }
            csv
        }
        Command::Sweep {
            phi_min,
            phi_max,
            steps,
            input,
            kind,
        } => {
            if phi_min.is_some() || phi_max.is_some() || steps.is_some() {
                let base = match &cfg.sweep {
                    SweepSpec::Phi(s) => s.clone(),
                    SweepSpec::Power(_) => match ExperimentConfig::builtin().sweep {
                        SweepSpec::Phi(s) => s,
                        SweepSpec::Power(_) => unreachable!("default sweep is over φ"),
                    },
                };
                cfg.sweep = SweepSpec::Phi(PhiSweep {
                    phi_min: phi_min.unwrap_or(base.phi_min),
                    phi_max: phi_max.unwrap_or(base.phi_max),
                    steps: steps.unwrap_or(base.steps),
                });
            }
            if let Some(choice) = input {
                cfg.input = cfg.input.with_kind(*choice);
            }
            if let Some(kind) = kind {
                cfg.transfer_kind = *kind;
            }
            cfg.validate()?;
            cmd_sweep(&cfg)?
        }
        Command::Phasematch => cmd_phasematch(&cfg)?,
        Command::Oracle { check, tol } => {
            let (csv, passed, worst) = cmd_oracle(&cfg, *check, *tol)?;
            write_output(out.as_deref(), &csv)?;
            if !passed {
                return Err(CliError {
                    code: 4,
                    message: format!("oracle check failed: max error {worst:.3e} exceeds tolerance {tol:.3e}"),
                });
            }
            if out.is_some() {
                println!("oracle check passed: max error {worst:.3e} ≤ {tol:.3e}");
            }
            return Ok(());
        }
        Command::Fit { data, model } => {
            let (text, summary) = cmd_fit(&cfg, data, *model)?;
            if out.is_some() {
                println!("{summary}");
            }
            text
        }
        Command::Synth { model } => cmd_synth(&cfg, *model)?,
    };
    write_output(out.as_deref(), &text)
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 17 significant digits, scientific notation.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_else(|| "NA".into())
}

fn header(cfg: &ExperimentConfig, extra: &[(&str, String)]) -> String {
    let mut h = format!(
        "# bsfwm {VERSION}\n# config_sha256 {}\n# seed {}\n",
        cfg.sha256(),
        cfg.seed
    );
    for (k, v) in extra {
        let _ = writeln!(h, "# {k} {v}");
    }
    h
}

// ---------------------------------------------------------------------------
// Subcommands

/// Transfer-matrix CSV and its unitarity residual.
pub fn cmd_transfer(cfg: &ExperimentConfig, phi: Option<f64>) -> CliResult<(String, f64)> {
    let u = cfg.transfer_at(cfg.transfer_kind, phi)?;
    let residual = u.unitarity_residual();
    let kind = serde_json::to_string(&cfg.transfer_kind).expect("enum serializes");
    let mut s = header(
        cfg,
        &[
            ("kind", kind.trim_matches('"').to_string()),
            ("phi", fmt_num(u.phi)),
            ("lossy_scale", fmt_num(u.lossy_scale)),
            ("unitarity_residual", format!("{residual:.3e}")),
        ],
    );
    s.push_str("i,j,re_ij,im_ij\n");
    let n = u.n_modes();
    for i in 0..n {
        for j in 0..n {
            let z = u.entry(i, j);
            let _ = writeln!(s, "{},{},{},{}", i + 1, j + 1, fmt_num(z.re), fmt_num(z.im));
        }
    }
    Ok((s, residual))
}

/// Correlation curve CSV: `[power_w,]phi,g1_1..g1_N,g2_ij...` with `NA`
/// where a normalized value is undefined.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> CliResult<String> {
    let n = cfg.n_modes();
    let state = cfg.input.to_state(n)?;
    let points = cfg.sweep_points();
    let power_column = matches!(cfg.sweep, SweepSpec::Power(_));
    let rows: Vec<CliResult<String>> = points
        .par_iter()
        .map(|&(power, phi)| {
            let u = cfg.transfer_at(cfg.transfer_kind, Some(phi))?;
            let c = correlations(&state, &u)?;
            let mut row = String::new();
            if power_column {
                let _ = write!(row, "{},", fmt_opt(power));
            }
            row.push_str(&fmt_num(phi));
            for g in &c.singles {
                let _ = write!(row, ",{}", fmt_num(*g));
            }
            for p in &c.pairs {
                let _ = write!(row, ",{}", fmt_opt(p.normalized));
            }
            row.push('\n');
            Ok(row)
        })
        .collect();
    let mut s = header(cfg, &[]);
    if power_column {
        s.push_str("power_w,");
    }
    s.push_str("phi");
    for i in 1..=n {
        let _ = write!(s, ",g1_{i}");
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let _ = write!(s, ",g2_{i}{j}");
        }
    }
    s.push('\n');
    for row in rows {
        s.push_str(&row?);
    }
    Ok(s)
}

pub fn cmd_phasematch(cfg: &ExperimentConfig) -> CliResult<String> {
    let grid = cfg.grid.to_grid()?;
    let report = nonlinear_mismatch(&cfg.profile, &grid, &cfg.pumps.powers)?;
    let mut s = header(cfg, &[("threshold_rad", fmt_num(report.threshold))]);
    s.push_str("mode,delta_beta_per_m,delta_k_per_m,delta_k_l_over_pi,negligible\n");
    for n in 0..report.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            n + 1,
            fmt_num(report.delta_beta[n]),
            fmt_num(report.delta_k[n]),
            fmt_num(report.delta_k[n] * report.length / std::f64::consts::PI),
            report.negligible[n]
        );
    }
    Ok(s)
}

struct CheckRow {
    check: &'static str,
    case: String,
    quantity: String,
    closed: C64,
    oracle: C64,
    error: f64,
}

fn relative_error(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn classical_rows(cfg: &ExperimentConfig) -> CliResult<Vec<CheckRow>> {
    let grid = cfg.grid.to_grid()?;
    let n = grid.len();
    let settings = IntegratorSettings::with_steps(cfg.profile.length, 2000);
    let mut phis = vec![None];
    phis.extend(
        [
            std::f64::consts::PI / 9.0,
            2.0 * std::f64::consts::PI / 9.0,
            std::f64::consts::PI / 3.0,
        ]
        .map(Some),
    );
    let mut rows = Vec::new();
    for phi in phis {
        let pumps = match phi {
            Some(phi) => cfg.pumps_at(phi)?,
            None => cfg.pumps.clone(),
        };
        let min_pump = pumps
            .powers
            .iter()
            .cloned()
            .filter(|p| *p > 0.0)
            .fold(f64::INFINITY, f64::min);
        let seed_power = if min_pump.is_finite() {
            UNDEPLETED_RATIO * min_pump
        } else {
            1e-6
        };
        let b0: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(seed_power.sqrt() * (1.0 - 0.2 * k as f64 / n as f64), 0.7 * k as f64))
            .collect();
        let report = nonlinear_mismatch(&cfg.profile, &grid, &pumps.powers)?;
        let expected = if cfg.profile.alpha > 0.0 {
            lossy_transfer(&cfg.profile, &pumps, cfg.profile.length, Some(&report))?.apply(&b0)?
        } else {
            general_transfer(&cfg.profile, &pumps, &report)?
                .rotating_to_lab(&cfg.profile, &pumps, &report)?
                .apply(&b0)?
        };
        let numeric = integrate_weak(&cfg.profile, &grid, &pumps, &b0, &settings)?;
        let scale = b0.iter().map(|b| b.norm()).fold(0.0, f64::max);
        let case = format!("phi={}", fmt_num(cfg.profile.nonlinear_phase(pumps.mean_power())));
        for k in 0..n {
            rows.push(CheckRow {
                check: "classical",
                case: case.clone(),
                quantity: format!("b_{}", k + 1),
                closed: expected[k],
                oracle: numeric[k],
                error: (expected[k] - numeric[k]).norm() / scale,
            });
        }
    }
    Ok(rows)
}

fn quantum_rows(cfg: &ExperimentConfig) -> CliResult<Vec<CheckRow>> {
    let n = cfg.n_modes();
    let squeezed_spec = if cfg.input.kind == InputChoice::Squeezed {
        cfg.input.clone()
    } else {
        cfg.input.with_kind(InputChoice::Squeezed)
    };
    let squeezed = squeezed_spec.to_state(n)?;
    let pair_state = cfg.input.with_kind(InputChoice::Pair).to_state(n)?;
    let InputKind::PhotonPair { modes: (a, b) } = pair_state.kind else {
        unreachable!("pair spec yields a pair state")
    };
    let mut rows = Vec::new();
    let steps = 50;
    for k in 0..steps {
        let phi = 2.0 * std::f64::consts::PI / 3.0 * k as f64 / (steps - 1) as f64;
        let u = ideal_transfer(n, phi)?;
        let case = format!("phi={}", fmt_num(phi));
        let closed = correlations(&squeezed, &u)?;
        let wick = wick_correlations(&squeezed, &u)?;
        for i in 0..n {
            let (x, y) = (C64::new(closed.singles[i], 0.0), C64::new(wick.singles[i], 0.0));
            rows.push(CheckRow {
                check: "quantum_wick",
                case: case.clone(),
                quantity: format!("g1_{}", i + 1),
                closed: x,
                oracle: y,
                error: relative_error(x, y),
            });
        }
        for (p, q) in closed.pairs.iter().zip(&wick.pairs) {
            if let (Some(x), Some(y)) = (p.normalized, q.normalized) {
                rows.push(CheckRow {
                    check: "quantum_wick",
                    case: case.clone(),
                    quantity: format!("g2_{}{}", p.i + 1, p.j + 1),
                    closed: C64::new(x, 0.0),
                    oracle: C64::new(y, 0.0),
                    error: relative_error(C64::new(x, 0.0), C64::new(y, 0.0)),
                });
            }
        }
        let lossless_pair = InputState::lossless(pair_state.kind.clone(), n)?;
        let closed = correlations(&lossless_pair, &u)?;
        let mut occupation = vec![0; n];
        occupation[a] = 1;
        occupation[b] = 1;
        let fock = fock_evolve(&FockState::number(&occupation, DEFAULT_CUTOFF)?, &u)?;
        let reference = FockState::number(&occupation, DEFAULT_CUTOFF)?.coincidence(a.min(b), a.max(b));
        for p in &closed.pairs {
            let x = p.normalized.unwrap_or(f64::NAN);
            let y = fock.coincidence(p.i, p.j) / reference;
            rows.push(CheckRow {
                check: "quantum_fock",
                case: case.clone(),
                quantity: format!("g2_{}{}", p.i + 1, p.j + 1),
                closed: C64::new(x, 0.0),
                oracle: C64::new(y, 0.0),
                error: relative_error(C64::new(x, 0.0), C64::new(y, 0.0)),
            });
        }
    }
    Ok(rows)
}

/// Comparison CSV, whether every error is within `tol`, and the worst error.
pub fn cmd_oracle(cfg: &ExperimentConfig, check: CheckChoice, tol: f64) -> CliResult<(String, bool, f64)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::config("--tol must be finite and > 0"));
    }
    let mut rows = Vec::new();
    if matches!(check, CheckChoice::Classical | CheckChoice::All) {
        rows.extend(classical_rows(cfg)?);
    }
    if matches!(check, CheckChoice::Quantum | CheckChoice::All) {
        rows.extend(quantum_rows(cfg)?);
    }
    let worst = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let passed = rows.iter().all(|r| r.error <= tol);
    let mut s = header(cfg, &[("tolerance", fmt_num(tol)), ("max_error", fmt_num(worst))]);
    s.push_str("check,case,quantity,closed_form_re,closed_form_im,oracle_re,oracle_im,error,pass\n");
    for r in &rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.check,
            r.case,
            r.quantity,
            fmt_num(r.closed.re),
            fmt_num(r.closed.im),
            fmt_num(r.oracle.re),
            fmt_num(r.oracle.im),
            fmt_num(r.error),
            r.error <= tol
        );
    }
    Ok((s, passed, worst))
}

/// Comment-free CSV table: header names and numeric rows.
pub fn read_csv(text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::config("data file has no header row"))?
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| CliError::config(format!("data row {}: {e}", k + 1)))?;
        if row.len() != header.len() {
            return Err(CliError::config(format!(
                "data row {} has {} fields, header has {}",
                k + 1,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::config("data file has no rows"));
    }
    Ok((header, rows))
}

/// CSV of count records: `power_w,s_1..s_N,c_ij..,a_1..a_N`.
pub fn records_to_csv(records: &[CountRecord]) -> String {
    let n = records.first().map_or(0, |r| r.n_channels());
    let mut s = String::from("power_w");
    for i in 1..=n {
        let _ = write!(s, ",s_{i}");
    }
    for i in 1..=n {
        for j in (i + 1)..=n {
            let _ = write!(s, ",c_{i}{j}");
        }
    }
    for i in 1..=n {
        let _ = write!(s, ",a_{i}");
    }
    s.push('\n');
    for r in records {
        s.push_str(&fmt_num(r.pump_power));
        for v in r.singles.iter().chain(&r.coincidences).chain(&r.accidental_singles) {
            let _ = write!(s, ",{}", fmt_num(*v));
        }
        s.push('\n');
    }
    s
}

fn records_from_table(header: &[String], rows: &[Vec<f64>]) -> CliResult<Vec<CountRecord>> {
    let n = header.iter().filter(|h| h.starts_with("s_")).count();
    let pairs = n * n.saturating_sub(1) / 2;
    if n < 2 || header.len() != 1 + 2 * n + pairs || header[0] != "power_w" {
        return Err(CliError::config(
            "expected columns power_w,s_1..s_N,c_ij..,a_1..a_N or a two-column curve",
        ));
    }
    rows.iter()
        .map(|row| {
            let r = CountRecord {
                pump_power: row[0],
                singles: row[1..1 + n].to_vec(),
                coincidences: row[1 + n..1 + n + pairs].to_vec(),
                accidental_singles: row[1 + n + pairs..].to_vec(),
            };
            r.validate()?;
            Ok(r)
        })
        .collect()
}

fn fit_to_text(cfg: &ExperimentConfig, data_hash: &str, fit: &FitResult, scale_labels: &[usize]) -> String {
    let mut s = header(cfg, &[("data_sha256", data_hash.to_string())]);
    for w in &fit.warnings {
        let _ = writeln!(s, "# warning {w}");
    }
    let _ = writeln!(s, "phase_scale_rad_per_w={}", fmt_opt(fit.phase_scale));
    let _ = writeln!(s, "zeta={}", fmt_opt(fit.zeta));
    for (label, v) in scale_labels.iter().zip(&fit.channel_scales) {
        let _ = writeln!(s, "channel_scale_{label}={}", fmt_num(*v));
    }
    let _ = writeln!(s, "residual_norm={}", fmt_num(fit.residual_norm));
    let _ = writeln!(s, "converged={}", fit.converged);
    let _ = writeln!(s, "iterations={}", fit.iterations);
    let _ = writeln!(s, "seed={}", cfg.seed);
    s
}

/// Fit report (`key=value` lines) and a one-line summary.
pub fn cmd_fit(cfg: &ExperimentConfig, data: &Path, model: FitModel) -> CliResult<(String, String)> {
    let bytes = std::fs::read(data).map_err(|e| CliError::config(format!("cannot read {}: {e}", data.display())))?;
    let data_hash = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError::config("data file is not UTF-8"))?;
    let (header_row, rows) = read_csv(&text)?;
    let mut cfg = cfg.clone();
    if let Some(seed) = text
        .lines()
        .find_map(|l| l.strip_prefix("# seed ")?.trim().parse().ok())
    {
        cfg.seed = seed;
    }
    let cfg = &cfg;
    let names: Vec<&str> = header_row.iter().map(String::as_str).collect();
    let n_modes = cfg.n_modes();

    let (fit, labels) = match (model, names.as_slice()) {
        (FitModel::Multiphoton, ["singles", "ratio"]) => {
            let points: Vec<RatioPoint> = rows
                .iter()
                .map(|r| RatioPoint {
                    singles: r[0],
                    ratio: r[1],
                })
                .collect();
            (fit_zeta(&points, ZetaFit::Efficiency)?, vec![])
        }
        (FitModel::Multiphoton, _) => return Err(CliError::config("multiphoton fits need columns singles,ratio")),
        (_, ["power_w", "value"]) => {
            let curve: Vec<CurvePoint> = rows
                .iter()
                .map(|r| CurvePoint {
                    power: r[0],
                    value: r[1],
                })
                .collect();
            (
                fit_phase_scale(&curve, PhaseModel::DualInputDepletion, n_modes)?,
                vec![],
            )
        }
        _ => {
            let records = records_from_table(&header_row, &rows)?;
            let n = records[0].n_channels();
            let state = cfg.input.with_kind(InputChoice::Pair).to_state(n)?;
            let input = state.kind.input_modes()[0];
            let depletion = normalize_singles(&records, input)?;
            let mut fit = fit_phase_scale(&depletion, PhaseModel::DualInputDepletion, n)?;
            let kappa = fit.phase_scale.expect("phase fit sets κ");
            let zero = records
                .iter()
                .find(|r| r.pump_power == 0.0)
                .ok_or_else(|| CliError::from(Error::MissingData("no record at zero pump power".into())))?;
            let generated: Vec<usize> = (0..n).filter(|&k| zero.singles[k] == 0.0).collect();
            let reference = zero.singles[input];
            let curves: Vec<Vec<CurvePoint>> = generated
                .iter()
                .map(|&k| {
                    records
                        .iter()
                        .map(|r| CurvePoint {
                            power: r.pump_power,
                            value: r.singles[k] / reference,
                        })
                        .collect()
                })
                .collect();
            if !curves.is_empty() {
                // both inputs feed each generated channel: 2|q|² per unit scale
                let scales = fit_channel_scales(&curves, kappa, n)?;
                fit.channel_scales = scales.channel_scales.iter().map(|v| v / 2.0).collect();
                fit.warnings.extend(scales.warnings);
            }
            (fit, generated.iter().map(|k| k + 1).collect())
        }
    };
    let summary = format!(
        "phase_scale_rad_per_w={} zeta={} converged={}",
        fmt_opt(fit.phase_scale),
        fmt_opt(fit.zeta),
        fit.converged
    );
    Ok((fit_to_text(cfg, &data_hash, &fit, &labels), summary))
}

pub fn cmd_synth(cfg: &ExperimentConfig, model: FitModel) -> CliResult<String> {
    let spec = cfg.synth.clone().unwrap_or_default();
    let noise = spec.noise.unwrap_or(0.01);
    let n = cfg.n_modes();
    let mut s = header(cfg, &[("noise", fmt_num(noise))]);
    match model {
        FitModel::Multiphoton => {
            let zetas = spec
                .zetas
                .unwrap_or_else(|| (0..12).map(|k| 0.4 * (2.5 + 0.75 * k as f64) / 10.75).collect());
            let points = generate_ratio_curve(
                &zetas,
                spec.eta_b.unwrap_or(0.1),
                spec.eta_r.unwrap_or(0.1),
                noise,
                cfg.seed,
            )?;
            s.push_str("singles,ratio\n");
            for p in points {
                let _ = writeln!(s, "{},{}", fmt_num(p.singles), fmt_num(p.ratio));
            }
        }
        FitModel::Pair | FitModel::Coherent => {
            let choice = if model == FitModel::Pair {
                InputChoice::Pair
            } else {
                InputChoice::Dual
            };
            let state = cfg.input.with_kind(choice).to_state(n)?;
            let kappa = cfg.profile.phase_per_watt();
            let powers = spec.powers_w.unwrap_or_else(|| {
                (0..31)
                    .map(|k| 2.0 * std::f64::consts::PI / 3.0 / kappa * k as f64 / 30.0)
                    .collect()
            });
            let synth = SyntheticModel {
                state,
                profile: cfg.profile.clone(),
                pumps: cfg.pumps.clone(),
                channel_scales: spec.channel_scales.unwrap_or_else(|| vec![1.0; n]),
                base_rate: spec.base_rate.unwrap_or(1e4),
            };
            s.push_str(&records_to_csv(&generate_synthetic(&synth, &powers, noise, cfg.seed)?));
        }
    }
    Ok(s)
}

/// Mismatch report of the configured grid and pumps.
pub fn mismatch_report(cfg: &ExperimentConfig) -> crate::Result<MismatchReport> {
    nonlinear_mismatch(&cfg.profile, &cfg.grid.to_grid()?, &cfg.pumps.powers)
}
