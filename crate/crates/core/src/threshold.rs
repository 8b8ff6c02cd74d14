//! Threshold decay times and the zero-vacuum-population check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::negativity::pnw_numeric;
use crate::states::{
    evolve_fock_diagonal, random_zero_vacuum_state, vacuum_population, ChannelParams, FockDiagonalState,
};
use crate::wigner::{
    eval_fock_diagonal_wigner, eval_q_function, eval_spats_wigner_evolved, sample_grid, try_sample_grid, GridSpec,
    PhasePoint,
};

/// `ln((2+2n)/(1+2n))`: the decay time at which the single photon-added
/// thermal state (and every state with empty vacuum) loses its negativity.
pub fn threshold_spats(n: f64) -> f64 {
    (1.0 / (1.0 + 2.0 * n)).ln_1p()
}

/// Maps a photon-loss threshold onto a bath of mean `n`:
/// `ln((e^{γt_c(0)} + 2n)/(1+2n))`.
pub fn threshold_general(gamma_tc_loss: f64, n: f64) -> f64 {
    ((gamma_tc_loss.exp() + 2.0 * n) / (1.0 + 2.0 * n)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMethod {
    /// Sign change of the closed-form Wigner value at the origin.
    OriginSignRoot,
    /// Vanishing of the numerically integrated negative volume.
    PnwVanishing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: f64,
    pub bar_n: f64,
    pub gamma_t_c_analytic: f64,
    pub gamma_t_c_numeric: f64,
    pub method: ThresholdMethod,
    /// `|analytic - numeric|`.
    pub residual: f64,
}

const BRACKET: (f64, f64) = (0.0, 2.0);
const MAX_BISECTIONS: usize = 60;

/// Bisection for the first `γt` in `[0, 2]` where `negative(γt)` turns false.
fn bisect_threshold<P: FnMut(f64) -> Result<bool>>(mut negative: P, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = BRACKET;
    if !negative(lo)? || negative(hi)? {
        return Err(Error::numerical(
            format!("no sign change of the threshold indicator on [{lo}, {hi}]"),
            None,
        ));
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if negative(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_threshold_args(n: f64, bar_n: f64, tol: f64) -> Result<()> {
    if !(1e-12..=1e-3).contains(&tol) {
        return Err(Error::domain(format!("tolerance {tol} outside [1e-12, 1e-3]")));
    }
    ChannelParams::new(n, 0.0)?;
    if !(bar_n.is_finite() && bar_n >= 0.0) {
        return Err(Error::domain(format!("seed mean photon number {bar_n} must be >= 0")));
    }
    Ok(())
}

/// Threshold from the sign of `W(0, 0, γt)` of the evolved single
/// photon-added thermal state.
pub fn threshold_numeric_spats(n: f64, bar_n: f64, tol: f64) -> Result<ThresholdReport> {
    check_threshold_args(n, bar_n, tol)?;
    let root = bisect_threshold(
        |gt| Ok(eval_spats_wigner_evolved(PhasePoint::ORIGIN, &ChannelParams::new(n, gt)?, bar_n) < 0.0),
        tol,
    )?;
    Ok(report(n, bar_n, root, ThresholdMethod::OriginSignRoot))
}

/// Threshold from the vanishing of the numerically integrated negative
/// volume of the closed-form evolved Wigner function.
pub fn threshold_numeric_spats_pnw(n: f64, bar_n: f64, tol: f64) -> Result<ThresholdReport> {
    check_threshold_args(n, bar_n, tol)?;
    let extent = crate::wigner::default_extent(bar_n, n);
    let root = bisect_threshold(
        |gt| {
            let channel = ChannelParams::new(n, gt)?;
            let f = |pt| eval_spats_wigner_evolved(pt, &channel, bar_n);
            Ok(pnw_numeric(&f, extent, 64, 1e-9)?.volume > 0.0)
        },
        tol,
    )?;
    Ok(report(n, bar_n, root, ThresholdMethod::PnwVanishing))
}

fn report(n: f64, bar_n: f64, numeric: f64, method: ThresholdMethod) -> ThresholdReport {
    let analytic = threshold_spats(n);
    ThresholdReport {
        n,
        bar_n,
        gamma_t_c_analytic: analytic,
        gamma_t_c_numeric: numeric,
        method,
        residual: (analytic - numeric).abs(),
    }
}

/// Tolerances and lattice for [`verify_zero_vacuum_theorem`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConfig {
    pub grid: GridSpec,
    pub tol_origin: f64,
    pub tol_min: f64,
    pub tol_q: f64,
    /// Per-step tolerance of the Fock-basis evolution.
    pub step_tol: f64,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::square(6.0, 201).expect("static grid"),
            tol_origin: 1e-9,
            tol_min: 1e-9,
            tol_q: 1e-9,
            step_tol: 1e-13,
        }
    }
}

/// Loss-channel proportionality between `W(q, p, ln 2)` and `Q_0(√2 q, √2 p)`.
pub const Q_IDENTITY_CONSTANT: f64 = 2.0;

/// Only Fock-diagonal states are checked; coherences are never generated.
pub const THEOREM_SCOPE_NOTE: &str = "checked on Fock-diagonal representatives only";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub state_id: String,
    pub n: f64,
    pub gamma_t_c: f64,
    pub w_origin_at_threshold: f64,
    pub min_w_at_threshold: f64,
    /// `max |W(q,p,ln 2) - c Q_0(√2q, √2p)|` over the lattice (loss channel only).
    pub q_identity_residual: Option<f64>,
    /// `c` forced by normalization: `1 / ∬ Q_0(√2q, √2p) dq dp` (loss channel only).
    pub q_identity_constant: Option<f64>,
    pub passed: bool,
    pub scope: String,
}

/// Evolves a state with `⟨0|ρ|0⟩ = 0` to `γt_c = ln((2+2n)/(1+2n))` in the
/// Fock basis and checks that the Wigner function vanishes at the origin and
/// is non-negative on the lattice. In the loss channel it additionally
/// compares `W(q, p, ln 2)` with `2 Q_0(√2q, √2p)` of the initial state.
pub fn verify_zero_vacuum_theorem(
    state_id: &str,
    state: &FockDiagonalState,
    n: f64,
    config: &TheoremConfig,
) -> Result<TheoremReport> {
    if vacuum_population(state) != 0.0 {
        return Err(Error::domain(format!(
            "state {state_id} has vacuum population {}",
            vacuum_population(state)
        )));
    }
    let gamma_t_c = threshold_spats(n);
    let evolved = evolve_fock_diagonal(state, &ChannelParams::new(n, gamma_t_c)?, config.step_tol)?;
    let w_origin = eval_fock_diagonal_wigner(PhasePoint::ORIGIN, &evolved)?;
    let w_grid = try_sample_grid(|pt| eval_fock_diagonal_wigner(pt, &evolved), &config.grid)?;
    let min_w = w_grid.min();

    let (residual, constant) = if n == 0.0 {
        let smoothed = sample_grid(|pt| eval_q_function(pt.scaled(2f64.sqrt()), state), &config.grid)?;
        let constant = 1.0 / smoothed.integral();
        let residual = w_grid
            .values()
            .iter()
            .zip(smoothed.values())
            .map(|(w, q)| (w - Q_IDENTITY_CONSTANT * q).abs())
            .fold(0.0, f64::max);
        (Some(residual), Some(constant))
    } else {
        (None, None)
    };

    let passed = w_origin.abs() < config.tol_origin
        && min_w > -config.tol_min
        && residual.is_none_or(|r| r < config.tol_q)
        && constant.is_none_or(|c| (c - Q_IDENTITY_CONSTANT).abs() < 1e-6);

    Ok(TheoremReport {
        state_id: state_id.to_string(),
        n,
        gamma_t_c,
        w_origin_at_threshold: w_origin,
        min_w_at_threshold: min_w,
        q_identity_residual: residual,
        q_identity_constant: constant,
        passed,
        scope: THEOREM_SCOPE_NOTE.to_string(),
    })
}

/// Runs the check on `count` random zero-vacuum states (seeds `base_seed..`)
/// for every bath in `channel_ns`. Reports are ordered by seed, then by the
/// position of `n` in `channel_ns`.
pub fn verify_theorem_batch(
    base_seed: u64,
    count: usize,
    cutoff: usize,
    channel_ns: &[f64],
    config: &TheoremConfig,
) -> Result<Vec<TheoremReport>> {
    let cases: Vec<(u64, f64)> = (0..count as u64)
        .flat_map(|k| channel_ns.iter().map(move |&n| (base_seed + k, n)))
        .collect();
    cases
        .par_iter()
        .map(|&(seed, n)| {
            let state = random_zero_vacuum_state(seed, cutoff)?;
            verify_zero_vacuum_theorem(&format!("random-seed{seed}-cutoff{cutoff}"), &state, n, config)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{spats_weights, DEFAULT_TAIL_TOL};
    use std::f64::consts::LN_2;

    #[test]
    fn closed_form_thresholds() {
        assert!((threshold_spats(0.0) - LN_2).abs() < 1e-15);
        assert!((threshold_spats(0.5) - 1.5f64.ln()).abs() < 1e-15);
        assert!((threshold_spats(2.0) - 1.2f64.ln()).abs() < 1e-15);
        assert!(threshold_spats(100.0) < threshold_spats(10.0));
        assert!(threshold_spats(1e6) > 0.0);
    }

    #[test]
    fn general_threshold_identities() {
        for n in [0.0, 0.25, 0.5, 1.0, 5.0] {
            assert!((threshold_general(threshold_spats(0.0), n) - threshold_spats(n)).abs() < 1e-14);
            assert_eq!(threshold_general(0.0, n), 0.0);
        }
        assert!((threshold_general(0.3, 0.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn numeric_thresholds() {
        for bar_n in [0.0, 3.0 / 7.0, 1.0] {
            let r = threshold_numeric_spats(0.5, bar_n, 1e-10).unwrap();
            assert!((r.gamma_t_c_numeric - 1.5f64.ln()).abs() < 1e-10);
            assert!(r.residual < 1e-10);
        }
        let r = threshold_numeric_spats(0.0, 1.0, 1e-10).unwrap();
        assert!((r.gamma_t_c_numeric - LN_2).abs() < 1e-10);
        let r = threshold_numeric_spats(2.0, 1.0, 1e-10).unwrap();
        assert!((r.gamma_t_c_numeric - 1.2f64.ln()).abs() < 1e-10);
        assert!(threshold_numeric_spats(0.5, 1.0, 1e-2).is_err());
    }

    #[test]
    fn pnw_route_agrees() {
        let r = threshold_numeric_spats_pnw(0.5, 1.0, 1e-8).unwrap();
        assert_eq!(r.method, ThresholdMethod::PnwVanishing);
        assert!(r.residual < 1e-8);
    }

    #[test]
    fn origin_is_negative_before_threshold() {
        for n in [0.0, 0.5, 1.0, 2.0] {
            for bar_n in [0.0, 3.0 / 7.0, 1.0, 10.0] {
                let c = ChannelParams::new(n, 0.99 * threshold_spats(n)).unwrap();
                assert!(eval_spats_wigner_evolved(PhasePoint::ORIGIN, &c, bar_n) < 0.0);
            }
        }
    }

    #[test]
    fn spats_passes_in_loss_channel() {
        let state = spats_weights(1.0, DEFAULT_TAIL_TOL).unwrap();
        let config = TheoremConfig {
            grid: GridSpec::square(6.0, 61).unwrap(),
            ..TheoremConfig::default()
        };
        let r = verify_zero_vacuum_theorem("spats-1", &state, 0.0, &config).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.w_origin_at_threshold.abs() < 1e-9);
    }

    #[test]
    fn vacuum_population_is_rejected() {
        let state = FockDiagonalState::vacuum();
        assert!(matches!(
            verify_zero_vacuum_theorem("vac", &state, 0.0, &TheoremConfig::default()),
            Err(Error::Domain(_))
        ));
    }
}
