//! Volume of the negative part of a Wigner function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_integrate, GaussLegendre};
use crate::states::ChannelParams;
use crate::threshold::threshold_spats;
use crate::wigner::{evolved_coefficients, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativityMethod {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityResult {
    /// `|∬_{W<0} W dq dp|`.
    pub volume: f64,
    /// Radius of the negative disk, when the negative region is a single
    /// disk centred on the origin.
    pub region_radius: Option<f64>,
    pub method: NegativityMethod,
}

impl NegativityResult {
    fn none(method: NegativityMethod) -> Self {
        Self {
            volume: 0.0,
            region_radius: None,
            method,
        }
    }
}

/// Radius of the disk on which the evolved single photon-added thermal
/// state is negative: `r² = -κ e^{-γt} / (8(1+n̄))` while `κ < 0`.
pub fn negative_region_radius_spats(channel: &ChannelParams, bar_n: f64) -> Option<f64> {
    let kappa = evolved_coefficients(channel, bar_n).kappa;
    if kappa < 0.0 {
        Some((-kappa * (-channel.gamma_t()).exp() / (8.0 * (1.0 + bar_n))).sqrt())
    } else {
        None
    }
}

/// Closed-form negativity volume of the evolved single photon-added thermal
/// state, zero from the threshold decay time on.
///
/// The prefactor `e^{-γt} e^{ζ/ξ}` is kept as written even though `ζ = γt ξ`
/// makes it one.
pub fn pnw_spats_analytic(channel: &ChannelParams, bar_n: f64) -> NegativityResult {
    let gt = channel.gamma_t();
    let c = evolved_coefficients(channel, bar_n);
    if gt >= threshold_spats(channel.n()) || c.kappa >= 0.0 {
        return NegativityResult::none(NegativityMethod::Analytic);
    }
    let (xi, zeta, kappa) = (c.xi, c.zeta, c.kappa);
    let seed = 1.0 + bar_n;
    let bracket = kappa / (2.0 * xi) + 2.0 * seed * (1.0 - (kappa / (4.0 * seed * xi)).exp());
    let volume = -bracket * (-gt).exp() * (zeta / xi).exp() / xi;
    NegativityResult {
        volume: volume.max(0.0),
        region_radius: negative_region_radius_spats(channel, bar_n),
        method: NegativityMethod::Analytic,
    }
}

const SYMMETRY_PROBES: usize = 8;
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_REFINEMENTS: usize = 8;
const MAX_CELL_DEPTH: usize = 6;

/// Whether `f` looks invariant under rotations about the origin: eight
/// probe pairs at equal radius must agree within `1e-12`.
pub fn is_radially_symmetric<F: Fn(PhasePoint) -> f64>(f: &F, extent: f64) -> bool {
    (0..SYMMETRY_PROBES).all(|k| {
        let r = extent * (k as f64 + 0.37) / (SYMMETRY_PROBES as f64 + 1.0);
        let theta = 0.41 + 0.73 * k as f64;
        let a = f(PhasePoint::new(r, 0.0));
        let b = f(PhasePoint::new(r * theta.cos(), r * theta.sin()));
        (a - b).abs() <= SYMMETRY_TOL * a.abs().max(1.0)
    })
}

/// Negative volume of `evaluator` on `[-extent, extent]²`.
///
/// Radially symmetric inputs are reduced to `2π ∫ r W(r) dr` over the
/// intervals between sign changes along the radius; anything else goes
/// through sign-masked cell quadrature with recursive splitting of cells
/// that straddle the nodal curve. Either way the resolution doubles until
/// two successive estimates differ by less than `abs_tol`.
pub fn pnw_numeric<F>(evaluator: &F, extent: f64, base_resolution: usize, abs_tol: f64) -> Result<NegativityResult>
where
    F: Fn(PhasePoint) -> f64 + Sync,
{
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::domain(format!("extent {extent} must be positive")));
    }
    if base_resolution < 2 {
        return Err(Error::domain("base resolution must be at least 2"));
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::domain("abs_tol must be positive"));
    }
    if is_radially_symmetric(evaluator, extent) {
        radial_negativity(evaluator, extent, base_resolution, abs_tol)
    } else {
        cell_negativity(evaluator, extent, base_resolution, abs_tol)
    }
}

fn bisect_root<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = g(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Intervals of `[0, extent]` on which `g < 0`, from a scan with `samples` points.
fn negative_intervals<G: Fn(f64) -> f64>(g: &G, extent: f64, samples: usize) -> Vec<(f64, f64)> {
    let step = extent / (samples - 1) as f64;
    let mut intervals = Vec::new();
    let mut start = if g(0.0) < 0.0 { Some(0.0) } else { None };
    let mut prev_r = 0.0;
    let mut prev_neg = start.is_some();
    for k in 1..samples {
        let r = if k + 1 == samples { extent } else { k as f64 * step };
        let neg = g(r) < 0.0;
        if neg != prev_neg {
            let root = bisect_root(g, prev_r, r);
            if neg {
                start = Some(root);
            } else if let Some(s) = start.take() {
                intervals.push((s, root));
            }
        }
        prev_r = r;
        prev_neg = neg;
    }
    if let Some(s) = start {
        intervals.push((s, extent));
    }
    intervals
}

fn radial_negativity<F: Fn(PhasePoint) -> f64>(
    f: &F,
    extent: f64,
    base_resolution: usize,
    abs_tol: f64,
) -> Result<NegativityResult> {
    let g = |r: f64| f(PhasePoint::new(r, 0.0));
    let estimate = |samples: usize| -> Result<(f64, Vec<(f64, f64)>)> {
        let intervals = negative_intervals(&g, extent, samples);
        let mut volume = 0.0;
        for &(a, b) in &intervals {
            volume += adaptive_integrate(|r| 2.0 * std::f64::consts::PI * r * g(r), a, b, 0.01 * abs_tol)?;
        }
        Ok((-volume, intervals))
    };

    let mut samples = base_resolution;
    let (mut previous, _) = estimate(samples)?;
    let mut diff = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        samples = 2 * samples - 1;
        let (current, intervals) = estimate(samples)?;
        diff = (current - previous).abs();
        if diff < abs_tol {
            let region_radius = match intervals.as_slice() {
                [(a, b)] if *a == 0.0 => Some(*b),
                _ => None,
            };
            return Ok(NegativityResult {
                volume: current.max(0.0),
                region_radius,
                method: NegativityMethod::Quadrature,
            });
        }
        previous = current;
    }
    Err(Error::numerical(
        format!("radial negativity did not converge; last estimate {previous:e}"),
        Some(diff),
    ))
}

struct CellRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn negative_part_of_cell<F: Fn(PhasePoint) -> f64>(
    f: &F,
    rule: &CellRule,
    q0: f64,
    p0: f64,
    h: f64,
    depth: usize,
) -> f64 {
    let center = f(PhasePoint::new(q0 + 0.5 * h, p0 + 0.5 * h));
    let corners = [
        f(PhasePoint::new(q0, p0)),
        f(PhasePoint::new(q0 + h, p0)),
        f(PhasePoint::new(q0, p0 + h)),
        f(PhasePoint::new(q0 + h, p0 + h)),
    ];
    let negatives = corners.iter().filter(|v| **v < 0.0).count() + usize::from(center < 0.0);
    if negatives == 0 {
        return 0.0;
    }
    if negatives == 5 {
        let mut sum = 0.0;
        for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
            for (y, wy) in rule.nodes.iter().zip(&rule.weights) {
                let v = f(PhasePoint::new(q0 + 0.5 * h * (1.0 + x), p0 + 0.5 * h * (1.0 + y)));
                sum += wx * wy * v.min(0.0);
            }
        }
        return sum * 0.25 * h * h;
    }
    if depth >= MAX_CELL_DEPTH {
        return center.min(0.0) * h * h;
    }
    let half = 0.5 * h;
    negative_part_of_cell(f, rule, q0, p0, half, depth + 1)
        + negative_part_of_cell(f, rule, q0 + half, p0, half, depth + 1)
        + negative_part_of_cell(f, rule, q0, p0 + half, half, depth + 1)
        + negative_part_of_cell(f, rule, q0 + half, p0 + half, half, depth + 1)
}

fn cell_negativity<F>(f: &F, extent: f64, base_resolution: usize, abs_tol: f64) -> Result<NegativityResult>
where
    F: Fn(PhasePoint) -> f64 + Sync,
{
    let gl = GaussLegendre::new(4);
    let rule = CellRule {
        nodes: gl.nodes,
        weights: gl.weights,
    };
    let estimate = |cells: usize| -> f64 {
        let h = 2.0 * extent / cells as f64;
        let total: f64 = (0..cells)
            .into_par_iter()
            .map(|i| {
                (0..cells)
                    .map(|j| negative_part_of_cell(f, &rule, -extent + i as f64 * h, -extent + j as f64 * h, h, 0))
                    .sum::<f64>()
            })
            .collect::<Vec<_>>()
            .iter()
            .sum();
        -total
    };

    let mut cells = base_resolution;
    let mut previous = estimate(cells);
    let mut diff = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        cells *= 2;
        let current = estimate(cells);
        diff = (current - previous).abs();
        if diff < abs_tol {
            return Ok(NegativityResult {
                volume: current.max(0.0),
                region_radius: None,
                method: NegativityMethod::Quadrature,
            });
        }
        previous = current;
    }
    Err(Error::numerical(
        format!("cell negativity did not converge; last estimate {previous:e}"),
        Some(diff),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::{eval_fock_wigner, eval_spats_wigner_evolved, eval_spats_wigner_initial, eval_thermal_wigner};

    fn ch(n: f64, gt: f64) -> ChannelParams {
        ChannelParams::new(n, gt).unwrap()
    }

    #[test]
    fn radius_values() {
        let r = negative_region_radius_spats(&ch(0.0, 0.0), 0.0).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
        let r = negative_region_radius_spats(&ch(0.5, 0.0), 1.0).unwrap();
        assert!((r * r - 6.0 / 16.0).abs() < 1e-14);
        // sign change of the closed form along the q axis
        let c = ch(0.5, 0.0);
        assert!(eval_spats_wigner_evolved(PhasePoint::new(r - 1e-6, 0.0), &c, 1.0) < 0.0);
        assert!(eval_spats_wigner_evolved(PhasePoint::new(r + 1e-6, 0.0), &c, 1.0) > 0.0);
        for n in [0.0, 0.5, 2.0] {
            let gt = threshold_spats(n);
            assert_eq!(negative_region_radius_spats(&ch(n, gt * 1.001), 1.0), None);
        }
    }

    #[test]
    fn analytic_golden_values() {
        let v = pnw_spats_analytic(&ch(0.0, 0.0), 0.0);
        assert!((v.volume - (2.0 * (-0.5f64).exp() - 1.0)).abs() < 1e-12);
        assert_eq!(v.method, NegativityMethod::Analytic);
        let v = pnw_spats_analytic(&ch(0.5, 0.0), 1.0);
        assert!((v.volume - 0.038401044095206505).abs() < 1e-12);
        for n in [0.0, 0.5, 1.0] {
            let v = pnw_spats_analytic(&ch(n, threshold_spats(n)), 1.0);
            assert_eq!(v.volume, 0.0);
            assert_eq!(v.region_radius, None);
        }
    }

    #[test]
    fn printed_prefactor_is_one() {
        for (n, gt, bar_n) in [(0.0, 0.2, 1.0), (0.5, 0.35, 3.0 / 7.0), (1.0, 0.1, 10.0)] {
            let c = evolved_coefficients(&ch(n, gt), bar_n);
            let factor = (-gt).exp() * (c.zeta / c.xi).exp();
            assert!((factor - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_on_positive_function_is_zero() {
        let v = pnw_numeric(&|pt| eval_thermal_wigner(pt, 1.0), 8.0, 64, 1e-9).unwrap();
        assert_eq!(v.volume, 0.0);
        assert_eq!(v.region_radius, None);
    }

    #[test]
    fn numeric_single_photon() {
        let v = pnw_numeric(&|pt| eval_spats_wigner_initial(pt, 0.0), 6.0, 64, 1e-9).unwrap();
        assert!((v.volume - (2.0 * (-0.5f64).exp() - 1.0)).abs() < 1e-6);
        assert!((v.region_radius.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn numeric_two_photon_annulus() {
        // Independent value: ½ ∫ L_2(x) e^{-x/2} dx between the roots 2 ± √2.
        let want = 0.36449462889356704;
        let v = pnw_numeric(&|pt| eval_fock_wigner(pt, 2).unwrap(), 6.0, 64, 1e-9).unwrap();
        assert!((v.volume - want).abs() < 1e-8, "{}", v.volume);
        assert_eq!(v.region_radius, None);
    }

    #[test]
    fn generic_path_agrees_with_radial_path() {
        // Displaced single-photon state: not radially symmetric, same volume.
        let shifted = |pt: PhasePoint| eval_spats_wigner_initial(PhasePoint::new(pt.q - 0.8, pt.p + 0.3), 0.0);
        assert!(!is_radially_symmetric(&shifted, 6.0));
        let v = pnw_numeric(&shifted, 4.0, 32, 1e-6).unwrap();
        assert!((v.volume - (2.0 * (-0.5f64).exp() - 1.0)).abs() < 2e-6, "{}", v.volume);
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = |pt| eval_thermal_wigner(pt, 0.0);
        assert!(pnw_numeric(&f, 0.0, 64, 1e-6).is_err());
        assert!(pnw_numeric(&f, 5.0, 1, 1e-6).is_err());
        assert!(pnw_numeric(&f, 5.0, 64, 0.0).is_err());
    }
}
