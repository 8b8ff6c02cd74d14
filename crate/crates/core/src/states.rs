//! Fock-diagonal density operators and their evolution in the thermal channel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode;

/// Default construction tolerance for truncated weight families.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Evolved weights between `-NEGATIVE_CLAMP` and zero are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

const SUM_SLACK: f64 = 1e-12;
const MAX_CUTOFF: usize = 1 << 20;
const MAX_EVOLVED_CUTOFF: usize = 8192;

/// A density operator `ρ = Σ p_l |l⟩⟨l|` truncated at a cutoff `L`.
///
/// The total weight lies in `[1 - tail_tol, 1]`: the retained populations
/// may omit a tail of mass at most `tail_tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDiagonalState {
    weights: Vec<f64>,
    tail_tol: f64,
}

impl FockDiagonalState {
    /// Validates and wraps a weight vector `p_0..=p_L`.
    pub fn from_weights(weights: Vec<f64>, tail_tol: f64) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::domain("cutoff must be at least 1"));
        }
        if !(0.0..1.0).contains(&tail_tol) {
            return Err(Error::domain(format!("tail tolerance {tail_tol} outside [0, 1)")));
        }
        if let Some((l, p)) = weights.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::domain(format!("weight p_{l} = {p} is not a probability")));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + SUM_SLACK || total < 1.0 - tail_tol - SUM_SLACK {
            return Err(Error::domain(format!(
                "total weight {total} outside [1 - {tail_tol:e}, 1]"
            )));
        }
        Ok(Self { weights, tail_tol })
    }

    /// The number state `|l⟩`.
    pub fn fock(l: usize) -> Self {
        let mut weights = vec![0.0; l.max(1) + 1];
        weights[l] = 1.0;
        Self { weights, tail_tol: 0.0 }
    }

    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest retained Fock index.
    pub fn cutoff(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Thermal channel: bath mean photon number `n` and decay time `γt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    n: f64,
    gamma_t: f64,
}

impl ChannelParams {
    pub fn new(n: f64, gamma_t: f64) -> Result<Self> {
        if !(n.is_finite() && n >= 0.0) {
            return Err(Error::domain(format!(
                "channel photon number {n} must be finite and >= 0"
            )));
        }
        if !(gamma_t.is_finite() && gamma_t >= 0.0) {
            return Err(Error::domain(format!("decay time {gamma_t} must be finite and >= 0")));
        }
        Ok(Self { n, gamma_t })
    }

    /// Photon-loss channel (`n = 0`).
    pub fn loss(gamma_t: f64) -> Result<Self> {
        Self::new(0.0, gamma_t)
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn gamma_t(&self) -> f64 {
        self.gamma_t
    }

    pub fn with_gamma_t(&self, gamma_t: f64) -> Result<Self> {
        Self::new(self.n, gamma_t)
    }
}

fn check_mean(value: f64, what: &str) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} = {value} must be finite and >= 0")))
    }
}

fn check_tail_tol(tail_tol: f64) -> Result<()> {
    if tail_tol > 0.0 && tail_tol <= 1e-6 {
        Ok(())
    } else {
        Err(Error::domain(format!("tail tolerance {tail_tol} outside (0, 1e-6]")))
    }
}

/// Builds weights `p_l = weight(l)` for `l = 0, 1, ...` until both the
/// analytic tail mass and the tail of the first moment drop below `tail_tol`.
fn truncated_family(
    weight: impl Fn(usize) -> f64,
    tail_mass: impl Fn(usize) -> f64,
    total_mean: f64,
    tail_tol: f64,
) -> Result<Vec<f64>> {
    let mut weights = Vec::new();
    let mut partial_mean = 0.0;
    for l in 0..MAX_CUTOFF {
        let p = weight(l);
        weights.push(p);
        partial_mean += l as f64 * p;
        if l >= 1 && tail_mass(l) < tail_tol && total_mean - partial_mean < tail_tol {
            return Ok(weights);
        }
    }
    Err(Error::domain(format!(
        "weight family needs a cutoff above {MAX_CUTOFF} for tail tolerance {tail_tol:e}"
    )))
}

/// Single photon-added thermal state built on a thermal seed of mean `bar_n`.
///
/// With `x = n̄/(1+n̄)` the weights are `p_l = l x^(l-1) (1-x)^2`, which is
/// finite at `n̄ = 0` where the state reduces to `|1⟩`.
pub fn spats_weights(bar_n: f64, tail_tol: f64) -> Result<FockDiagonalState> {
    check_mean(bar_n, "seed mean photon number")?;
    check_tail_tol(tail_tol)?;
    let x = bar_n / (1.0 + bar_n);
    let one_minus = 1.0 / (1.0 + bar_n);
    let weight = |l: usize| {
        if l == 0 {
            0.0
        } else {
            l as f64 * x.powi(l as i32 - 1) * one_minus * one_minus
        }
    };
    // Σ_{l>L} l x^(l-1) (1-x)^2 = x^L [(L+1) - L x]
    let tail = |l: usize| x.powi(l as i32) * ((l + 1) as f64 - l as f64 * x);
    let weights = truncated_family(weight, tail, 2.0 * bar_n + 1.0, tail_tol)?;
    FockDiagonalState::from_weights(weights, tail_tol)
}

/// Bose–Einstein populations `p_l = n^l / (1+n)^(l+1)`.
pub fn thermal_weights(n_mean: f64, tail_tol: f64) -> Result<FockDiagonalState> {
    check_mean(n_mean, "thermal mean photon number")?;
    check_tail_tol(tail_tol)?;
    let x = n_mean / (1.0 + n_mean);
    let weight = |l: usize| x.powi(l as i32) / (1.0 + n_mean);
    let tail = |l: usize| x.powi(l as i32 + 1);
    let weights = truncated_family(weight, tail, n_mean, tail_tol)?;
    FockDiagonalState::from_weights(weights, tail_tol)
}

pub fn mean_photon(state: &FockDiagonalState) -> f64 {
    state.weights.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
}

/// `⟨0|ρ|0⟩`.
pub fn vacuum_population(state: &FockDiagonalState) -> f64 {
    state.weights[0]
}

/// Random state with empty vacuum: squared standard-normal draws on
/// `|1⟩..|L⟩`, normalized. Deterministic in `rng_seed`.
pub fn random_zero_vacuum_state(rng_seed: u64, cutoff: usize) -> Result<FockDiagonalState> {
    if cutoff < 1 {
        return Err(Error::domain("cutoff must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut weights = vec![0.0; cutoff + 1];
    for w in weights.iter_mut().skip(1) {
        let g: f64 = StandardNormal.sample(&mut rng);
        *w = g * g;
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::numerical("degenerate random draw", Some(total)));
    }
    weights.iter_mut().for_each(|w| *w /= total);
    FockDiagonalState::from_weights(weights, DEFAULT_TAIL_TOL)
}

/// Right-hand side of the diagonal rate equations in units of `γt`, with
/// the population flowing above the last retained level dropped.
fn rate_rhs(n: f64, p: &[f64], dp: &mut [f64]) {
    let top = p.len() - 1;
    for l in 0..=top {
        let lf = l as f64;
        let mut rate = -((n + 1.0) * lf + n * (lf + 1.0)) * p[l];
        if l < top {
            rate += (n + 1.0) * (lf + 1.0) * p[l + 1];
        }
        if l > 0 {
            rate += n * lf * p[l - 1];
        }
        dp[l] = rate;
    }
}

/// Evolves the populations through the thermal channel by integrating
///
/// `dp_l/d(γt) = (n+1)[(l+1) p_{l+1} - l p_l] + n[l p_{l-1} - (l+1) p_l]`
///
/// from `0` to `γt`. The working cutoff starts `ceil(5(n+1))` above the
/// input cutoff and doubles its margin until the population lost through
/// the top level stays below `step_tol`.
pub fn evolve_fock_diagonal(
    state: &FockDiagonalState,
    channel: &ChannelParams,
    step_tol: f64,
) -> Result<FockDiagonalState> {
    if !(step_tol > 0.0 && step_tol < 1e-3) {
        return Err(Error::domain(format!("step tolerance {step_tol} outside (0, 1e-3)")));
    }
    if channel.gamma_t() == 0.0 {
        return Ok(state.clone());
    }
    let n = channel.n();
    let initial_total = state.total_weight();
    let mut margin = (5.0 * (n + 1.0)).ceil() as usize;

    loop {
        let work_cutoff = state.cutoff() + margin;
        if work_cutoff > MAX_EVOLVED_CUTOFF {
            return Err(Error::numerical(
                format!("evolved cutoff would exceed {MAX_EVOLVED_CUTOFF}"),
                None,
            ));
        }
        let mut p = state.weights.clone();
        p.resize(work_cutoff + 1, 0.0);
        // The embedded estimate bounds the lower-order solution; a tenth of
        // `step_tol` keeps round-off negatives inside the clamp window.
        let stats = ode::dopri5(
            |y, dy| rate_rhs(n, y, dy),
            &mut p,
            channel.gamma_t(),
            0.1 * step_tol,
            1_000_000,
        )?;

        let leaked = initial_total - p.iter().sum::<f64>();
        if leaked >= step_tol {
            log::debug!("cutoff {work_cutoff} leaked {leaked:e} >= {step_tol:e}; doubling margin {margin}");
            margin *= 2;
            continue;
        }

        let mut clamped = 0usize;
        for (l, w) in p.iter_mut().enumerate() {
            if *w < 0.0 {
                if *w < -NEGATIVE_CLAMP {
                    return Err(Error::numerical(
                        format!("evolved population p_{l} = {w:e} below -{NEGATIVE_CLAMP:e}"),
                        Some(*w),
                    ));
                }
                *w = 0.0;
                clamped += 1;
            }
        }
        if clamped > 0 {
            log::debug!("clamped {clamped} slightly negative evolved populations to zero");
        }
        log::trace!(
            "evolved to γt = {} with cutoff {work_cutoff}: {} accepted, {} rejected steps",
            channel.gamma_t(),
            stats.accepted,
            stats.rejected
        );
        return FockDiagonalState::from_weights(p, state.tail_tol + step_tol);
    }
}
