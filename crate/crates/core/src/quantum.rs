//! Closed-form detection statistics behind an N-mode frequency beamsplitter.
//!
//! Every input class is propagated through the effective matrix
//! `V = diag(T(μ)) · U · diag(T(α))`, where `T(α)` are amplitude transmissions
//! between the source and the fiber and `T(μ)` those between the fiber and the
//! detectors. Singles are `G(1)_i = ⟨a_i† a_i⟩` and coincidences are
//! `G(2)_ij = ⟨a_i† a_j† a_j a_i⟩`, both per detection window.
//!
//! Normalized coincidences are `g(2)_ij(φ) = G(2)_ij(φ)/G(2)_ij(0)`, the
//! reference being the same input through the fiber with the pumps off. Port
//! pairs whose reference vanishes (for example a generated mode paired with an
//! input mode) are normalized by the reference of the two input ports instead.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::transfer::{ideal_transfer, p_coeff, q_coeff, TransferMatrix};
use crate::C64;

/// Input light. Mode indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub enum InputKind {
    /// Coherent state `|ν⟩` in one mode.
    SingleCoherent { amplitude: C64, mode: usize },
    /// Coherent states of equal magnitude `ν` in two modes. With
    /// `phase_averaged`, the relative phase is uniformly random and
    /// independent between the two detection events; otherwise the second
    /// mode carries `ν e^{iϑ}` with `ϑ = relative_phase`.
    DualCoherent {
        amplitude: f64,
        modes: (usize, usize),
        phase_averaged: bool,
        relative_phase: f64,
    },
    /// One photon in each of two modes, `|1, 1⟩`.
    PhotonPair { modes: (usize, usize) },
    /// Two-mode squeezed vacuum `exp(ζ a_a† a_b† − h.c.)|0⟩`.
    SqueezedVacuum { zeta: C64, modes: (usize, usize) },
}

impl InputKind {
    /// Modes populated at the source.
    pub fn input_modes(&self) -> Vec<usize> {
        match *self {
            InputKind::SingleCoherent { mode, .. } => vec![mode],
            InputKind::DualCoherent { modes, .. }
            | InputKind::PhotonPair { modes }
            | InputKind::SqueezedVacuum { modes, .. } => vec![modes.0, modes.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputState {
    pub kind: InputKind,
    /// Amplitude transmissions `T_i(α)` before the fiber.
    pub pre_loss: Vec<f64>,
    /// Amplitude transmissions `T_i(μ)` after the fiber, detection efficiency included.
    pub post_loss: Vec<f64>,
}

impl InputState {
    /// Lossless input over `n_modes` modes.
    pub fn lossless(kind: InputKind, n_modes: usize) -> Result<Self> {
        Self::new(kind, vec![1.0; n_modes], vec![1.0; n_modes])
    }

    pub fn new(kind: InputKind, pre_loss: Vec<f64>, post_loss: Vec<f64>) -> Result<Self> {
        let state = Self {
            kind,
            pre_loss,
            post_loss,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn n_modes(&self) -> usize {
        self.pre_loss.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.pre_loss.len();
        Error::check_len("post-loss transmissions", n, self.post_loss.len())?;
        for t in self.pre_loss.iter().chain(&self.post_loss) {
            if !(t.is_finite() && *t > 0.0 && *t <= 1.0) {
                return Err(Error::invalid("transmission", format!("{t} is outside (0, 1]")));
            }
        }
        let modes = self.kind.input_modes();
        for &m in &modes {
            if m >= n {
                return Err(Error::IndexOutOfRange { index: m, modes: n });
            }
        }
        if modes.len() == 2 && modes[0] == modes[1] {
            return Err(Error::invalid("modes", "input modes must be distinct"));
        }
        match self.kind {
            InputKind::SingleCoherent { amplitude, .. } if !(amplitude.re.is_finite() && amplitude.im.is_finite()) => {
                Err(Error::invalid("amplitude", "must be finite"))
            }
            InputKind::DualCoherent {
                amplitude,
                relative_phase,
                ..
            } if !(amplitude.is_finite() && amplitude >= 0.0 && relative_phase.is_finite()) => {
                Err(Error::invalid("amplitude", "must be finite and ≥ 0"))
            }
            InputKind::SqueezedVacuum { zeta, .. } if !(zeta.re.is_finite() && zeta.im.is_finite()) => {
                Err(Error::invalid("zeta", "must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// `diag(T(μ)) · U · diag(T(α))`.
    pub fn effective_matrix(&self, transfer: &TransferMatrix) -> Result<CMatrix> {
        self.validate()?;
        Error::check_len("transfer matrix", self.n_modes(), transfer.n_modes())?;
        Ok(dress(&transfer.entries, &self.pre_loss, &self.post_loss))
    }
}

fn dress(u: &CMatrix, pre: &[f64], post: &[f64]) -> CMatrix {
    CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * (post[i] * pre[j]))
}

/// Raw squeezed-vacuum coincidences between outputs `i` and `j`:
/// `K{|X|²(S + 2S²) + 2S²(|U_ia U_ja|² r + |U_ib U_jb|²/r)}` with `S = sinh²|ζ|`,
/// `X = U_ia U_jb + U_ib U_ja`, `r = |T_a(α)/T_b(α)|²` and
/// `K = |T_i(μ) T_j(μ) T_a(α) T_b(α)|²`.
fn squeezed_g2(u: &CMatrix, pre: &[f64], post: &[f64], (a, b): (usize, usize), s: f64, i: usize, j: usize) -> f64 {
    let k = (post[i] * post[j] * pre[a] * pre[b]).powi(2);
    let r = (pre[a] / pre[b]).powi(2);
    let x = u[(i, a)] * u[(j, b)] + u[(i, b)] * u[(j, a)];
    let same_a = (u[(i, a)] * u[(j, a)]).norm_sqr();
    let same_b = (u[(i, b)] * u[(j, b)]).norm_sqr();
    k * (x.norm_sqr() * (s + 2.0 * s * s) + 2.0 * s * s * (same_a * r + same_b / r))
}

fn raw_singles(state: &InputState, u: &CMatrix) -> Vec<f64> {
    let v = dress(u, &state.pre_loss, &state.post_loss);
    let n = v.nrows();
    match state.kind {
        InputKind::SingleCoherent { amplitude, mode } => {
            (0..n).map(|i| (v[(i, mode)] * amplitude).norm_sqr()).collect()
        }
        InputKind::DualCoherent {
            amplitude,
            modes: (a, b),
            phase_averaged,
            relative_phase,
        } => {
            let nu2 = amplitude * amplitude;
            if phase_averaged {
                (0..n)
                    .map(|i| nu2 * (v[(i, a)].norm_sqr() + v[(i, b)].norm_sqr()))
                    .collect()
            } else {
                let rel = C64::from_polar(1.0, relative_phase);
                (0..n).map(|i| nu2 * (v[(i, a)] + v[(i, b)] * rel).norm_sqr()).collect()
            }
        }
        InputKind::PhotonPair { modes: (a, b) } => {
            (0..n).map(|i| v[(i, a)].norm_sqr() + v[(i, b)].norm_sqr()).collect()
        }
        InputKind::SqueezedVacuum { zeta, modes: (a, b) } => {
            let s = zeta.norm().sinh().powi(2);
            (0..n)
                .map(|i| s * (v[(i, a)].norm_sqr() + v[(i, b)].norm_sqr()))
                .collect()
        }
    }
}

fn raw_coincidence(state: &InputState, u: &CMatrix, singles: &[f64], i: usize, j: usize) -> f64 {
    match state.kind {
        InputKind::SingleCoherent { .. } | InputKind::DualCoherent { .. } => singles[i] * singles[j],
        InputKind::PhotonPair { modes: (a, b) } => {
            let v = dress(u, &state.pre_loss, &state.post_loss);
            (v[(i, a)] * v[(j, b)] + v[(i, b)] * v[(j, a)]).norm_sqr()
        }
        InputKind::SqueezedVacuum { zeta, modes } => {
            let s = zeta.norm().sinh().powi(2);
            squeezed_g2(u, &state.pre_loss, &state.post_loss, modes, s, i, j)
        }
    }
}

/// Expected counts per window at every output mode.
pub fn singles(state: &InputState, transfer: &TransferMatrix) -> Result<Vec<f64>> {
    state.effective_matrix(transfer)?;
    Ok(raw_singles(state, &transfer.entries))
}

/// Unnormalized `G(2)_ij` for outputs `i ≠ j`.
pub fn coincidence(state: &InputState, transfer: &TransferMatrix, i: usize, j: usize) -> Result<f64> {
    state.effective_matrix(transfer)?;
    let n = state.n_modes();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, modes: n });
        }
    }
    if i == j {
        return Err(Error::invalid("ports", "coincidences need two distinct outputs"));
    }
    let s = raw_singles(state, &transfer.entries);
    Ok(raw_coincidence(state, &transfer.entries, &s, i, j))
}

/// Coincidence statistics of one output port pair (`i < j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelation {
    pub i: usize,
    pub j: usize,
    /// `G(2)_ij`.
    pub raw: f64,
    /// `g(2)_ij`; `None` when no nonzero reference exists.
    pub normalized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub singles: Vec<f64>,
    /// All pairs `i < j` in lexicographic order.
    pub pairs: Vec<PairCorrelation>,
}

impl CorrelationResult {
    pub fn pair(&self, i: usize, j: usize) -> Option<&PairCorrelation> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }

    pub fn g2(&self, i: usize, j: usize) -> Option<f64> {
        self.pair(i, j).and_then(|p| p.normalized)
    }
}

/// References below this are treated as zero.
const REFERENCE_FLOOR: f64 = 1e-300;

/// Singles, raw and normalized coincidences for every output pair.
pub fn correlations(state: &InputState, transfer: &TransferMatrix) -> Result<CorrelationResult> {
    state.effective_matrix(transfer)?;
    let n = state.n_modes();
    let u = &transfer.entries;
    let singles = raw_singles(state, u);

    let reference_u = CMatrix::identity(n, n).map(|z| z * transfer.lossy_scale);
    let reference_singles = raw_singles(state, &reference_u);
    let inputs = state.kind.input_modes();
    let fallback = if inputs.len() == 2 {
        let (a, b) = (inputs[0].min(inputs[1]), inputs[0].max(inputs[1]));
        Some(raw_coincidence(state, &reference_u, &reference_singles, a, b))
    } else {
        None
    }
    .filter(|r| *r > REFERENCE_FLOOR);

    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let raw = raw_coincidence(state, u, &singles, i, j);
            let own = raw_coincidence(state, &reference_u, &reference_singles, i, j);
            let reference = if own > REFERENCE_FLOOR { Some(own) } else { fallback };
            pairs.push(PairCorrelation {
                i,
                j,
                raw,
                normalized: reference.map(|r| raw / r),
            });
        }
    }
    Ok(CorrelationResult { singles, pairs })
}

/// Phase-averaged dual coherent input into the first and last of `n_modes`
/// equal-pump modes: `g(2)` between the two input ports.
pub fn g2_dual_coherent(n_modes: usize, phi: f64) -> Result<f64> {
    ideal_transfer(n_modes, phi)?;
    let q2 = q_coeff(n_modes, phi).norm_sqr();
    // |p|² + |q|² = 1 − (N − 2)|q|² by row normalization.
    Ok((1.0 - (n_modes as f64 - 2.0) * q2).powi(2))
}

/// Photon-pair `g(2)` values for equal pumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairG2 {
    /// Between the two input ports: `|p² + q²|²`.
    pub inputs: f64,
    /// Between an input port and any other port: `|pq + q²|²`. `None` for N = 2.
    pub cross: Option<f64>,
}

pub fn g2_photon_pair(n_modes: usize, phi: f64) -> Result<PairG2> {
    ideal_transfer(n_modes, phi)?;
    let p = p_coeff(n_modes, phi);
    let q = q_coeff(n_modes, phi);
    Ok(PairG2 {
        inputs: (p * p + q * q).norm_sqr(),
        cross: (n_modes > 2).then(|| (p * q + q * q).norm_sqr()),
    })
}

/// Two-mode squeezed input with pre-fiber amplitude transmissions `t1`, `t3`
/// on the two input modes, `g(2)` between the input ports:
/// `|p² + q²|² + 2|p|²|q|²(|t1/t3|² + |t3/t1|²)·S/(1 + 2S)`, `S = sinh²|ζ|`.
pub fn g2_multiphoton(n_modes: usize, phi: f64, zeta: C64, t1: f64, t3: f64) -> Result<f64> {
    ideal_transfer(n_modes, phi)?;
    for t in [t1, t3] {
        if !(t.is_finite() && t > 0.0 && t <= 1.0) {
            return Err(Error::invalid("transmission", format!("{t} is outside (0, 1]")));
        }
    }
    let p = p_coeff(n_modes, phi);
    let q = q_coeff(n_modes, phi);
    let s = zeta.norm().sinh().powi(2);
    let r = (t1 / t3).powi(2);
    Ok((p * p + q * q).norm_sqr() + 2.0 * p.norm_sqr() * q.norm_sqr() * (r + 1.0 / r) * s / (1.0 + 2.0 * s))
}

/// Normalized squeezed-vacuum coincidences between outputs `i` and `j`, both
/// loss stages included.
pub fn g2_squeezed_full(state: &InputState, transfer: &TransferMatrix, i: usize, j: usize) -> Result<f64> {
    if !matches!(state.kind, InputKind::SqueezedVacuum { .. }) {
        return Err(Error::invalid("state", "expected a squeezed-vacuum input"));
    }
    coincidence(state, transfer, i, j)?;
    correlations(state, transfer)?
        .g2(i, j)
        .ok_or_else(|| Error::ZeroDivision(format!("no reference coincidences for ports ({i}, {j})")))
}

/// One point of the source characterization: blue arm B, red arm R split
/// 50:50 into R1 and R2, accidental coincidences subtracted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub zeta: f64,
    /// `√(r_B (r_R1 + r_R2))`.
    pub singles: f64,
    /// `r_{B,R1} + r_{B,R2}`.
    pub pair: f64,
    /// `r_{R1,R2}`.
    pub multi: f64,
    /// `multi / pair`.
    pub ratio: f64,
}

/// Source rates per window for arm efficiencies `eta_b`, `eta_r`, with
/// `S = sinh²ζ`: singles `√(η_B η_R)·S`, pairs `η_B η_R S(1 + S)`,
/// multiphoton `η_R² S²/4`.
pub fn multiphoton_scaling_curve(zeta_grid: &[f64], eta_b: f64, eta_r: f64) -> Result<Vec<ScalingPoint>> {
    for eta in [eta_b, eta_r] {
        if !(eta.is_finite() && eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid("efficiency", format!("{eta} is outside (0, 1]")));
        }
    }
    zeta_grid
        .iter()
        .map(|&zeta| {
            if !(zeta.is_finite() && zeta > 0.0) {
                return Err(Error::invalid("zeta", "grid values must be finite and > 0"));
            }
            let s = zeta.sinh().powi(2);
            let pair = eta_b * eta_r * s * (1.0 + s);
            let multi = eta_r * eta_r * s * s / 4.0;
            Ok(ScalingPoint {
                zeta,
                singles: (eta_b * eta_r).sqrt() * s,
                pair,
                multi,
                ratio: multi / pair,
            })
        })
        .collect()
}

/// Multiphoton-to-pair coincidence ratio `c·S/(4(1 + S))`, `S = sinh²ζ`,
/// where `c = η_R/η_B` is the arm balance.
pub fn multiphoton_ratio(zeta: f64, balance: f64) -> f64 {
    let s = zeta.sinh().powi(2);
    balance * s / (4.0 * (1.0 + s))
}
