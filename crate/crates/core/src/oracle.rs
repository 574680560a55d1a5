//! Independent quantum reference calculations.
//!
//! Two routes that share no code with [`crate::quantum`]:
//!
//! * Gaussian: every stage (two-mode squeezer, beamsplitter losses with explicit
//!   vacuum ancillas, the passive fiber transformation) is a Bogoliubov map on
//!   `[a; a†]`. Composed maps act on vacuum, and moments follow from Wick's
//!   theorem.
//! * Fock: few-photon states are stored as sparse occupation-number vectors and
//!   pushed through the linear transformation by expanding creation-operator
//!   products.
//!
//! A Monte Carlo estimator for phase-averaged coherent inputs completes the set.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{max_norm, unitarity_residual, CMatrix};
use crate::quantum::{correlations, CorrelationResult, InputKind, InputState, PairCorrelation};
use crate::transfer::TransferMatrix;
use crate::C64;

/// Largest accepted `‖S J S† − J‖_max` after composition.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Linear map `[a_out; a_out†] = S [a_in; a_in†]` over `M` modes, with
/// `S = [[A, B], [B̄, Ā]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMap {
    modes: usize,
    a_coeff: CMatrix,
}

impl BogoliubovMap {
    /// Builds `S` from its annihilation-part blocks `A` and `B`.
    pub fn from_blocks(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        let m = a.nrows();
        if !a.is_square() || b.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                what: "Bogoliubov blocks",
                expected: m,
                got: b.nrows().max(a.ncols()),
            });
        }
        let mut s = CMatrix::zeros(2 * m, 2 * m);
        s.view_mut((0, 0), (m, m)).copy_from(a);
        s.view_mut((0, m), (m, m)).copy_from(b);
        s.view_mut((m, 0), (m, m)).copy_from(&b.map(|z| z.conj()));
        s.view_mut((m, m), (m, m)).copy_from(&a.map(|z| z.conj()));
        Ok(Self { modes: m, a_coeff: s })
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            modes,
            a_coeff: CMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// `a_a → cosh|ζ| a_a + e^{i arg ζ} sinh|ζ| a_b†` and symmetrically for `a_b`.
    pub fn squeezer(modes: usize, zeta: C64, pair: (usize, usize)) -> Result<Self> {
        check_mode(pair.0, modes)?;
        check_mode(pair.1, modes)?;
        if pair.0 == pair.1 {
            return Err(Error::invalid("pair", "squeezer needs two distinct modes"));
        }
        let r = zeta.norm();
        let e = if r > 0.0 { zeta / r } else { C64::new(1.0, 0.0) };
        let mut a = CMatrix::identity(modes, modes);
        let mut b = CMatrix::zeros(modes, modes);
        a[(pair.0, pair.0)] = C64::new(r.cosh(), 0.0);
        a[(pair.1, pair.1)] = C64::new(r.cosh(), 0.0);
        b[(pair.0, pair.1)] = e * r.sinh();
        b[(pair.1, pair.0)] = e * r.sinh();
        Self::from_blocks(&a, &b)
    }

    /// Beamsplitter loss between `mode` and a vacuum `ancilla`:
    /// `a → T a + R r`, `r → −R* a + T r`, `R = √(1 − T²)`.
    pub fn loss(modes: usize, mode: usize, ancilla: usize, transmission: f64) -> Result<Self> {
        Self::loss_stage(modes, &[(mode, ancilla, transmission)])
    }

    /// Several independent losses `(mode, ancilla, T)` in one map.
    pub fn loss_stage(modes: usize, channels: &[(usize, usize, f64)]) -> Result<Self> {
        let mut a = CMatrix::identity(modes, modes);
        for &(mode, ancilla, t) in channels {
            check_mode(mode, modes)?;
            check_mode(ancilla, modes)?;
            if mode == ancilla {
                return Err(Error::invalid("ancilla", "must differ from the lossy mode"));
            }
            if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
                return Err(Error::invalid("transmission", format!("{t} is outside [0, 1]")));
            }
            let r = (1.0 - t * t).sqrt();
            a[(mode, mode)] = C64::new(t, 0.0);
            a[(mode, ancilla)] = C64::new(r, 0.0);
            a[(ancilla, mode)] = C64::new(-r, 0.0);
            a[(ancilla, ancilla)] = C64::new(t, 0.0);
        }
        Self::from_blocks(&a, &CMatrix::zeros(modes, modes))
    }

    /// Unitary `u` acting on the first `u.nrows()` modes.
    pub fn passive(modes: usize, u: &CMatrix) -> Result<Self> {
        let n = u.nrows();
        if !u.is_square() || n > modes {
            return Err(Error::DimensionMismatch {
                what: "passive block",
                expected: modes,
                got: n,
            });
        }
        let mut a = CMatrix::identity(modes, modes);
        a.view_mut((0, 0), (n, n)).copy_from(u);
        Self::from_blocks(&a, &CMatrix::zeros(modes, modes))
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.a_coeff
    }

    fn a_block(&self) -> CMatrix {
        self.a_coeff.view((0, 0), (self.modes, self.modes)).into_owned()
    }

    fn b_block(&self) -> CMatrix {
        self.a_coeff
            .view((0, self.modes), (self.modes, self.modes))
            .into_owned()
    }

    /// `‖S J S† − J‖_max`, `J = diag(I, −I)`.
    pub fn symplectic_residual(&self) -> f64 {
        let m = self.modes;
        let j = CMatrix::from_fn(2 * m, 2 * m, |r, c| match (r == c, r < m) {
            (true, true) => C64::new(1.0, 0.0),
            (true, false) => C64::new(-1.0, 0.0),
            _ => C64::default(),
        });
        max_norm(&(&self.a_coeff * &j * self.a_coeff.adjoint() - j))
    }

    /// Zero-mean Gaussian moments on vacuum input:
    /// `N_ij = ⟨a_i† a_j⟩ = (B̄ Bᵀ)_ij` and `M_ij = ⟨a_i a_j⟩ = (A Bᵀ)_ij`.
    pub fn vacuum_moments(&self) -> (CMatrix, CMatrix) {
        let a = self.a_block();
        let b = self.b_block();
        let bt = b.transpose();
        (b.map(|z| z.conj()) * &bt, a * bt)
    }
}

fn check_mode(mode: usize, modes: usize) -> Result<()> {
    if mode >= modes {
        Err(Error::IndexOutOfRange { index: mode, modes })
    } else {
        Ok(())
    }
}

/// Composes maps given in application order (first applied first).
pub fn compose(maps: &[BogoliubovMap]) -> Result<BogoliubovMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::invalid("maps", "nothing to compose"))?;
    let modes = first.modes;
    let mut acc = BogoliubovMap::identity(modes);
    for map in maps {
        Error::check_len("Bogoliubov map modes", modes, map.modes)?;
        acc.a_coeff = &map.a_coeff * &acc.a_coeff;
        let residual = acc.symplectic_residual();
        if residual > SYMPLECTIC_TOL {
            return Err(Error::Symplectic { residual });
        }
    }
    Ok(acc)
}

/// Singles and coincidences of one port pair on vacuum input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickMoments {
    pub g1_i: f64,
    pub g1_j: f64,
    /// `⟨a_i† a_j† a_j a_i⟩ = N_ii N_jj + |N_ij|² + |M_ij|²`.
    pub g2: f64,
}

pub fn wick_moments(map: &BogoliubovMap, i: usize, j: usize) -> Result<WickMoments> {
    check_mode(i, map.modes)?;
    check_mode(j, map.modes)?;
    let (n, m) = map.vacuum_moments();
    // Three pairings of ⟨a_i† a_j† a_j a_i⟩.
    let g2 = n[(i, i)].re * n[(j, j)].re + n[(i, j)].norm_sqr() + m[(i, j)].norm_sqr();
    Ok(WickMoments {
        g1_i: n[(i, i)].re,
        g1_j: n[(j, j)].re,
        g2,
    })
}

/// Squeezer, pre-fiber loss, fiber (passive part then uniform loss),
/// post-fiber loss, over `4N` modes: signals `0..N` and one ancilla block per
/// loss stage.
pub fn squeezed_chain(state: &InputState, transfer: &TransferMatrix) -> Result<BogoliubovMap> {
    let InputKind::SqueezedVacuum { zeta, modes } = state.kind else {
        return Err(Error::invalid("state", "expected a squeezed-vacuum input"));
    };
    state.validate()?;
    let n = state.n_modes();
    Error::check_len("transfer matrix", n, transfer.n_modes())?;
    let m = 4 * n;
    let stage = |offset: usize, t: &dyn Fn(usize) -> f64| {
        let channels: Vec<_> = (0..n).map(|i| (i, offset + i, t(i))).collect();
        BogoliubovMap::loss_stage(m, &channels)
    };
    let unitary = transfer.entries.map(|z| z / transfer.lossy_scale);
    compose(&[
        BogoliubovMap::squeezer(m, zeta, modes)?,
        stage(n, &|i| state.pre_loss[i])?,
        BogoliubovMap::passive(m, &unitary)?,
        stage(2 * n, &|_| transfer.lossy_scale)?,
        stage(3 * n, &|i| state.post_loss[i])?,
    ])
}

/// Wick-evaluated counterpart of [`crate::quantum::correlations`] for a
/// squeezed-vacuum input, with the same normalization rule.
pub fn wick_correlations(state: &InputState, transfer: &TransferMatrix) -> Result<CorrelationResult> {
    let n = state.n_modes();
    let map = squeezed_chain(state, transfer)?;
    let reference = TransferMatrix {
        entries: CMatrix::identity(n, n).map(|z| z * transfer.lossy_scale),
        ..transfer.clone()
    };
    let reference_map = squeezed_chain(state, &reference)?;
    let (nm, _) = map.vacuum_moments();
    let singles = (0..n).map(|i| nm[(i, i)].re).collect();

    let inputs = state.kind.input_modes();
    let (a, b) = (inputs[0].min(inputs[1]), inputs[0].max(inputs[1]));
    let fallback = Some(wick_moments(&reference_map, a, b)?.g2).filter(|g| *g > 0.0);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let raw = wick_moments(&map, i, j)?.g2;
            let own = wick_moments(&reference_map, i, j)?.g2;
            let denom = if own > 0.0 { Some(own) } else { fallback };
            pairs.push(PairCorrelation {
                i,
                j,
                raw,
                normalized: denom.map(|d| raw / d),
            });
        }
    }
    Ok(CorrelationResult { singles, pairs })
}

/// Default Fock-space photon-number cutoff.
pub const DEFAULT_CUTOFF: usize = 6;

/// Sparse truncated Fock-space state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub modes: usize,
    pub cutoff: usize,
    pub amplitudes: BTreeMap<Vec<usize>, C64>,
    /// Probability discarded by truncation.
    pub tail: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl FockState {
    /// Number state `|occupation⟩`.
    pub fn number(occupation: &[usize], cutoff: usize) -> Result<Self> {
        let photons: usize = occupation.iter().sum();
        if photons > cutoff {
            return Err(Error::CutoffOverflow { photons, cutoff });
        }
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occupation.to_vec(), C64::new(1.0, 0.0));
        Ok(Self {
            modes: occupation.len(),
            cutoff,
            amplitudes,
            tail: 0.0,
        })
    }

    /// `sech|ζ| Σ_n (e^{i arg ζ} tanh|ζ|)^n |n, n⟩` on `pair`, truncated at
    /// `2n ≤ cutoff`. Fails if the discarded probability
    /// `tanh^{2(n_max+1)}|ζ|` exceeds `tail_bound`.
    pub fn two_mode_squeezed(
        modes: usize,
        zeta: C64,
        pair: (usize, usize),
        cutoff: usize,
        tail_bound: f64,
    ) -> Result<Self> {
        check_mode(pair.0, modes)?;
        check_mode(pair.1, modes)?;
        if pair.0 == pair.1 {
            return Err(Error::invalid("pair", "needs two distinct modes"));
        }
        let r = zeta.norm();
        let e = if r > 0.0 { zeta / r } else { C64::new(1.0, 0.0) };
        let n_max = cutoff / 2;
        let tail = r.tanh().powi(2 * (n_max as i32 + 1));
        if tail > tail_bound {
            return Err(Error::TruncationTail {
                tail,
                bound: tail_bound,
            });
        }
        let mut amplitudes = BTreeMap::new();
        for k in 0..=n_max {
            let mut occ = vec![0; modes];
            occ[pair.0] = k;
            occ[pair.1] = k;
            amplitudes.insert(occ, (e * r.tanh()).powu(k as u32) / r.cosh());
        }
        Ok(Self {
            modes,
            cutoff,
            amplitudes,
            tail,
        })
    }

    pub fn amplitude(&self, occupation: &[usize]) -> C64 {
        self.amplitudes.get(occupation).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨a_i† a_i⟩`.
    pub fn mean_photons(&self, i: usize) -> f64 {
        self.amplitudes
            .iter()
            .map(|(occ, c)| c.norm_sqr() * occ[i] as f64)
            .sum()
    }

    /// `⟨a_i† a_j† a_j a_i⟩` for `i ≠ j`.
    pub fn coincidence(&self, i: usize, j: usize) -> f64 {
        self.amplitudes
            .iter()
            .map(|(occ, c)| c.norm_sqr() * (occ[i] * occ[j]) as f64)
            .sum()
    }
}

/// Applies `a_j† → Σ_i U_ij a_i†` to every basis state.
pub fn fock_evolve(state: &FockState, transfer: &TransferMatrix) -> Result<FockState> {
    let u = &transfer.entries;
    Error::check_len("transfer matrix", state.modes, u.nrows())?;
    let residual = unitarity_residual(u);
    if residual > 1e-10 {
        return Err(Error::invalid(
            "transfer",
            format!("not unitary (residual {residual:e})"),
        ));
    }
    let n = state.modes;
    let mut out: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
    for (occ, &amp) in &state.amplitudes {
        let photons: usize = occ.iter().sum();
        if photons > state.cutoff {
            return Err(Error::CutoffOverflow {
                photons,
                cutoff: state.cutoff,
            });
        }
        // Polynomial in output creation operators, keyed by occupation.
        let mut poly: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        poly.insert(
            vec![0; n],
            amp / occ.iter().map(|&k| factorial(k)).product::<f64>().sqrt(),
        );
        for (j, &count) in occ.iter().enumerate() {
            for _ in 0..count {
                let mut next = BTreeMap::new();
                for (key, coeff) in &poly {
                    for i in 0..n {
                        let uij = u[(i, j)];
                        if uij == C64::default() {
                            continue;
                        }
                        let mut k = key.clone();
                        k[i] += 1;
                        *next.entry(k).or_default() += coeff * uij;
                    }
                }
                poly = next;
            }
        }
        for (key, coeff) in poly {
            let weight = key.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
            *out.entry(key).or_default() += coeff * weight;
        }
    }
    out.retain(|_, c| c.norm_sqr() > 0.0);
    Ok(FockState {
        modes: n,
        cutoff: state.cutoff,
        amplitudes: out,
        tail: state.tail,
    })
}

/// Monte Carlo estimate with one standard error per quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub result: CorrelationResult,
    pub singles_se: Vec<f64>,
    /// Standard errors of the raw coincidences, aligned with `result.pairs`.
    pub coincidence_se: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

/// Running sums of one Monte Carlo shard.
struct ShardSums {
    singles: Vec<f64>,
    singles_sq: Vec<f64>,
    pairs: Vec<f64>,
    pairs_sq: Vec<f64>,
}

impl ShardSums {
    fn new(n: usize, n_pairs: usize) -> Self {
        Self {
            singles: vec![0.0; n],
            singles_sq: vec![0.0; n],
            pairs: vec![0.0; n_pairs],
            pairs_sq: vec![0.0; n_pairs],
        }
    }

    fn add(&mut self, singles: &[f64], pairs: &[f64]) {
        for (k, x) in singles.iter().enumerate() {
            self.singles[k] += x;
            self.singles_sq[k] += x * x;
        }
        for (k, x) in pairs.iter().enumerate() {
            self.pairs[k] += x;
            self.pairs_sq[k] += x * x;
        }
    }

    fn merge(mut self, other: Self) -> Self {
        let pairs = [
            (&mut self.singles, other.singles),
            (&mut self.singles_sq, other.singles_sq),
            (&mut self.pairs, other.pairs),
            (&mut self.pairs_sq, other.pairs_sq),
        ];
        for (acc, add) in pairs {
            for (a, b) in acc.iter_mut().zip(add) {
                *a += b;
            }
        }
        self
    }
}

/// Number of independent random streams; fixed so results do not depend on
/// the thread count.
const MC_SHARDS: u64 = 16;

/// Estimates phase-averaged dual-coherent statistics by sampling. Each sample
/// draws independent relative phases and pump phases for the two detection
/// events of a coincidence. Shard `k` uses stream `k` of a ChaCha8 generator
/// seeded with `seed`.
pub fn mc_phase_average(
    state: &InputState,
    transfer: &TransferMatrix,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    let InputKind::DualCoherent {
        amplitude,
        modes: (a, b),
        ..
    } = state.kind
    else {
        return Err(Error::invalid("state", "expected a dual coherent input"));
    };
    if samples == 0 {
        return Err(Error::invalid("samples", "must be ≥ 1"));
    }
    let v = state.effective_matrix(transfer)?;
    let n = v.nrows();
    let n_pairs = n * (n - 1) / 2;

    // Output intensities for relative phase ϑ and pump phases θ:
    // U → D† U D with D = diag(e^{iθ}).
    let intensities = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let rel = rng.random_range(0.0..std::f64::consts::TAU);
        let ina = C64::from_polar(amplitude, theta[a]);
        let inb = C64::from_polar(amplitude, theta[b] + rel);
        (0..n)
            .map(|i| ((v[(i, a)] * ina + v[(i, b)] * inb) * C64::from_polar(1.0, -theta[i])).norm_sqr())
            .collect()
    };

    let shard_sizes: Vec<usize> = (0..MC_SHARDS as usize)
        .map(|k| samples / MC_SHARDS as usize + usize::from(k < samples % MC_SHARDS as usize))
        .collect();
    let sums = shard_sizes
        .par_iter()
        .enumerate()
        .map(|(k, &count)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut acc = ShardSums::new(n, n_pairs);
            let mut products = vec![0.0; n_pairs];
            for _ in 0..count {
                let first = intensities(&mut rng);
                let second = intensities(&mut rng);
                let mut idx = 0;
                for (i, fi) in first.iter().enumerate() {
                    for sj in &second[i + 1..] {
                        products[idx] = fi * sj;
                        idx += 1;
                    }
                }
                acc.add(&first, &products);
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ShardSums::new(n, n_pairs), ShardSums::merge);

    let count = samples as f64;
    let stats = |sum: Vec<f64>, sumsq: Vec<f64>| -> (Vec<f64>, Vec<f64>) {
        sum.iter()
            .zip(&sumsq)
            .map(|(s, sq)| {
                let mean = s / count;
                let var = if samples > 1 {
                    ((sq - count * mean * mean) / (count - 1.0)).max(0.0)
                } else {
                    0.0
                };
                (mean, (var / count).sqrt())
            })
            .unzip()
    };
    let (singles, singles_se) = stats(sums.singles, sums.singles_sq);
    let (raw, coincidence_se) = stats(sums.pairs, sums.pairs_sq);

    // Normalize against the closed-form pumps-off reference.
    let reference = correlations(
        state,
        &TransferMatrix {
            entries: CMatrix::identity(n, n).map(|z| z * transfer.lossy_scale),
            ..transfer.clone()
        },
    )?;
    let fallback = reference.pair(a, b).map(|p| p.raw).filter(|r| *r > 0.0);
    let pairs = reference
        .pairs
        .iter()
        .zip(&raw)
        .map(|(r, &g)| {
            let denom = if r.raw > 0.0 { Some(r.raw) } else { fallback };
            PairCorrelation {
                i: r.i,
                j: r.j,
                raw: g,
                normalized: denom.map(|d| g / d),
            }
        })
        .collect();
    Ok(McEstimate {
        result: CorrelationResult { singles, pairs },
        singles_se,
        coincidence_se,
        samples,
        seed,
    })
}
