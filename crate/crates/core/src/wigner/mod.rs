//! Quasiprobability functions on phase space.
//!
//! All evaluators use the convention `W(β) = (2/π) Tr[Π D(β) ρ D†(β)]` with
//! `β = q + ip`, so a thermal state of mean `n` has
//! `W = 2/(π(1+2n)) exp(-2|β|²/(1+2n))`. Every function here depends on the
//! phase point only through `q² + p²`.

mod grid;
mod laguerre;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use grid::{default_extent, sample_grid, try_sample_grid, GridSpec, WignerGrid, DEFAULT_RESOLUTION};
pub use laguerre::{laguerre_weighted, MAX_LAGUERRE_INDEX};

use crate::error::Result;
use crate::states::{ChannelParams, FockDiagonalState};

/// A point `β = q + ip` in phase space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { q: 0.0, p: 0.0 };

    pub const fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    #[inline]
    pub fn r2(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.q * factor, self.p * factor)
    }
}

/// Thermal state of mean photon number `n_mean`.
pub fn eval_thermal_wigner(pt: PhasePoint, n_mean: f64) -> f64 {
    let width = 1.0 + 2.0 * n_mean;
    2.0 / (PI * width) * (-2.0 * pt.r2() / width).exp()
}

/// Single photon-added thermal state with seed mean `bar_n`, before any loss.
pub fn eval_spats_wigner_initial(pt: PhasePoint, bar_n: f64) -> f64 {
    let r2 = pt.r2();
    let width = 1.0 + 2.0 * bar_n;
    let bracket = 4.0 * (1.0 + bar_n) * r2 / width.powi(3) - 1.0 / (width * width);
    2.0 / PI * bracket * (-2.0 * r2 / width).exp()
}

/// The `ξ, ζ, κ` coefficients of the evolved single photon-added thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolvedSpatsCoefficients {
    pub xi: f64,
    pub zeta: f64,
    pub kappa: f64,
}

pub fn evolved_coefficients(channel: &ChannelParams, bar_n: f64) -> EvolvedSpatsCoefficients {
    let n = channel.n();
    let gt = channel.gamma_t();
    let e = gt.exp();
    let bath = 1.0 + 2.0 * n;
    let excess = bar_n - n;
    EvolvedSpatsCoefficients {
        xi: 2.0 * excess + bath * e,
        zeta: 2.0 * excess * gt + bath * gt * e,
        kappa: -8.0 * excess * (1.0 + n) + 2.0 * bath * bath * e * e + 4.0 * (bar_n * bath - bath * bath) * e,
    }
}

/// Closed-form Wigner function of the single photon-added thermal state after
/// decay time `γt` in a bath of mean `n`.
pub fn eval_spats_wigner_evolved(pt: PhasePoint, channel: &ChannelParams, bar_n: f64) -> f64 {
    let EvolvedSpatsCoefficients { xi, zeta, kappa } = evolved_coefficients(channel, bar_n);
    let e = channel.gamma_t().exp();
    let r2 = pt.r2();
    (kappa + 8.0 * (1.0 + bar_n) * e * r2) / (PI * xi.powi(3)) * ((zeta - 2.0 * e * r2) / xi).exp()
}

/// Number state `|l⟩`: `(2/π)(-1)^l L_l(4r²) e^{-2r²}`.
pub fn eval_fock_wigner(pt: PhasePoint, l: usize) -> Result<f64> {
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(2.0 / PI * sign * laguerre_weighted(l, 4.0 * pt.r2())?)
}

/// `Σ_l p_l W_l(pt)`, summed in a single Laguerre recurrence pass.
pub fn eval_fock_diagonal_wigner(pt: PhasePoint, state: &FockDiagonalState) -> Result<f64> {
    let signed: Vec<f64> = state
        .weights()
        .iter()
        .enumerate()
        .map(|(l, &p)| if l % 2 == 0 { p } else { -p })
        .collect();
    Ok(2.0 / PI * laguerre::weighted_series(&signed, 4.0 * pt.r2())?)
}

/// Husimi function `Q(α) = ⟨α|ρ|α⟩/π` with `α = q + ip`.
pub fn eval_q_function(pt: PhasePoint, state: &FockDiagonalState) -> f64 {
    let r2 = pt.r2();
    let weights = state.weights();
    if r2 == 0.0 {
        return weights[0] / PI;
    }
    let ln_r2 = r2.ln();
    let mut log_term = -r2;
    let mut sum = 0.0;
    for (l, &p) in weights.iter().enumerate() {
        if l > 0 {
            log_term += ln_r2 - (l as f64).ln();
        }
        sum += p * log_term.exp();
    }
    sum / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{spats_weights, thermal_weights, DEFAULT_TAIL_TOL};

    fn ch(n: f64, gt: f64) -> ChannelParams {
        ChannelParams::new(n, gt).unwrap()
    }

    fn probe_points() -> Vec<PhasePoint> {
        let mut pts = vec![PhasePoint::ORIGIN];
        for i in 0..40 {
            let t = i as f64 * 0.37;
            pts.push(PhasePoint::new(2.5 * t.sin() * (0.3 * t).cos(), 1.7 * (1.3 * t).cos()));
        }
        pts
    }

    #[test]
    fn thermal_values() {
        assert!((eval_thermal_wigner(PhasePoint::ORIGIN, 0.0) - 2.0 / PI).abs() < 1e-15);
        assert!((eval_thermal_wigner(PhasePoint::ORIGIN, 0.5) - 1.0 / PI).abs() < 1e-15);
        for pt in probe_points() {
            assert!(eval_thermal_wigner(pt, 1.3) > 0.0);
        }
    }

    #[test]
    fn spats_initial_values() {
        assert!((eval_spats_wigner_initial(PhasePoint::ORIGIN, 0.0) + 2.0 / PI).abs() < 1e-15);
        assert!(eval_spats_wigner_initial(PhasePoint::new(0.5, 0.0), 0.0).abs() < 1e-16);
        assert!(eval_spats_wigner_initial(PhasePoint::new(0.3, 0.4), 0.0).abs() < 1e-16);
        let want = -2.0 / (9.0 * PI);
        assert!((eval_spats_wigner_initial(PhasePoint::ORIGIN, 1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn coefficients_at_zero_time() {
        for n in [0.0, 0.5, 2.0] {
            for bar_n in [0.0, 3.0 / 7.0, 1.0, 5.0] {
                let c = evolved_coefficients(&ch(n, 0.0), bar_n);
                assert!((c.xi - (1.0 + 2.0 * bar_n)).abs() < 1e-12);
                assert_eq!(c.zeta, 0.0);
                assert!((c.kappa + 4.0 * bar_n + 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kappa_vanishes_at_threshold() {
        for n in [0.0f64, 0.5, 1.0, 2.0] {
            let gt: f64 = ((2.0 + 2.0 * n) / (1.0 + 2.0 * n)).ln();
            for bar_n in [0.0, 1.0, 10.0] {
                let c = evolved_coefficients(&ch(n, gt), bar_n);
                assert!(
                    c.kappa.abs() < 1e-12 * (1.0 + bar_n) * 10.0,
                    "n = {n}, n̄ = {bar_n}: {}",
                    c.kappa
                );
                let w0 = eval_spats_wigner_evolved(PhasePoint::ORIGIN, &ch(n, gt), bar_n);
                assert!(w0.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zeta_is_gamma_t_times_xi() {
        for (n, gt, bar_n) in [(0.0, 0.3, 1.0), (0.5, 1.7, 3.0), (2.0, 0.01, 0.0), (1.0, 5.0, 10.0)] {
            let c = evolved_coefficients(&ch(n, gt), bar_n);
            assert!((c.zeta - gt * c.xi).abs() <= 1e-12 * c.zeta.abs().max(1.0));
            assert!(c.xi >= 1.0 + 2.0 * bar_n - 1e-12);
        }
    }

    #[test]
    fn evolved_origin_value_at_zero_time() {
        // ξ = 3, κ = -6
        let got = eval_spats_wigner_evolved(PhasePoint::ORIGIN, &ch(0.5, 0.0), 1.0);
        assert!((got + 6.0 / (27.0 * PI)).abs() < 1e-15);
        assert!((got - eval_spats_wigner_initial(PhasePoint::ORIGIN, 1.0)).abs() < 1e-15);
    }

    #[test]
    fn fock_parity_at_origin() {
        for l in 0..20 {
            let v = eval_fock_wigner(PhasePoint::ORIGIN, l).unwrap();
            let want = if l % 2 == 0 { 2.0 / PI } else { -2.0 / PI };
            assert!((v - want).abs() < 1e-12);
        }
        assert!(eval_fock_wigner(PhasePoint::ORIGIN, 501).is_err());
    }

    #[test]
    fn low_fock_states_match_closed_forms() {
        for pt in probe_points() {
            let one = eval_fock_wigner(pt, 1).unwrap();
            assert!((one - eval_spats_wigner_initial(pt, 0.0)).abs() < 1e-12);
            let zero = eval_fock_wigner(pt, 0).unwrap();
            assert!((zero - eval_thermal_wigner(pt, 0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fock_series_matches_closed_forms() {
        let spats = spats_weights(1.0, DEFAULT_TAIL_TOL).unwrap();
        let thermal = thermal_weights(0.5, DEFAULT_TAIL_TOL).unwrap();
        for pt in probe_points() {
            let a = eval_fock_diagonal_wigner(pt, &spats).unwrap();
            assert!((a - eval_spats_wigner_initial(pt, 1.0)).abs() < 1e-9);
            let b = eval_fock_diagonal_wigner(pt, &thermal).unwrap();
            assert!((b - eval_thermal_wigner(pt, 0.5)).abs() < 1e-9);
        }
        let vac = eval_fock_diagonal_wigner(PhasePoint::ORIGIN, &FockDiagonalState::vacuum()).unwrap();
        assert!((vac - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn q_function_values() {
        let vac = FockDiagonalState::vacuum();
        assert!((eval_q_function(PhasePoint::ORIGIN, &vac) - 1.0 / PI).abs() < 1e-15);
        let spats = spats_weights(1.0, DEFAULT_TAIL_TOL).unwrap();
        assert_eq!(eval_q_function(PhasePoint::ORIGIN, &spats), 0.0);
        // |1⟩: Q = r² e^{-r²} / π
        let one = FockDiagonalState::fock(1);
        let pt = PhasePoint::new(0.7, -1.1);
        let want = pt.r2() * (-pt.r2()).exp() / PI;
        assert!((eval_q_function(pt, &one) - want).abs() < 1e-15);
        for pt in probe_points() {
            assert!(eval_q_function(pt, &spats) >= 0.0);
        }
        // far out the series must not overflow
        assert!(eval_q_function(PhasePoint::new(40.0, 0.0), &spats).is_finite());
    }

    #[test]
    fn long_time_limit_is_bath_thermal() {
        for (n, bar_n) in [(0.0, 1.0), (0.5, 3.0 / 7.0), (2.0, 5.0)] {
            let c = ch(n, 20.0);
            for i in 0..=20 {
                for j in 0..=20 {
                    let pt = PhasePoint::new(-5.0 + 0.5 * i as f64, -5.0 + 0.5 * j as f64);
                    let d = eval_spats_wigner_evolved(pt, &c, bar_n) - eval_thermal_wigner(pt, n);
                    assert!(d.abs() < 1e-6);
                }
            }
        }
    }
}
