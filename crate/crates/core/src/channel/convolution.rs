use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::states::ChannelParams;
use crate::wigner::{eval_thermal_wigner, try_sample_grid, GridSpec, PhasePoint, WignerGrid};

const PANELS: usize = 4;
const MAX_ORDER: usize = 256;

/// Quadrature settings for the kernel integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionSpec {
    /// Starting Gauss–Legendre order per panel (four panels per axis).
    pub quad_order: usize,
    /// Half-width of the integration square; `None` uses `6 sqrt((1+2n)/4)`,
    /// six standard deviations of the bath kernel.
    pub domain_radius: Option<f64>,
    pub abs_tol: f64,
}

impl Default for ConvolutionSpec {
    fn default() -> Self {
        Self {
            quad_order: 16,
            domain_radius: None,
            abs_tol: 1e-9,
        }
    }
}

impl ConvolutionSpec {
    fn validate(&self) -> Result<()> {
        if self.quad_order < 8 || self.quad_order > MAX_ORDER {
            return Err(Error::Config(format!(
                "quadrature order {} outside [8, {MAX_ORDER}]",
                self.quad_order
            )));
        }
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(Error::Config("abs_tol must be positive".into()));
        }
        if let Some(r) = self.domain_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(format!("domain radius {r} must be positive")));
            }
        }
        Ok(())
    }

    fn radius(&self, n: f64) -> f64 {
        self.domain_radius
            .unwrap_or_else(|| 6.0 * ((1.0 + 2.0 * n) / 4.0).sqrt())
    }
}

/// Composite rule: `PANELS` equal panels on `[-radius, radius]`.
fn panel_rule(order: usize, radius: f64) -> (Vec<f64>, Vec<f64>) {
    let base = GaussLegendre::new(order);
    let width = 2.0 * radius / PANELS as f64;
    let mut nodes = Vec::with_capacity(order * PANELS);
    let mut weights = Vec::with_capacity(order * PANELS);
    for k in 0..PANELS {
        let mid = -radius + (k as f64 + 0.5) * width;
        for (x, w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + 0.5 * width * x);
            weights.push(0.5 * width * w);
        }
    }
    (nodes, weights)
}

fn kernel_integral<F>(initial: &F, pt: PhasePoint, n: f64, gamma_t: f64, nodes: &[f64], weights: &[f64]) -> f64
where
    F: Fn(PhasePoint) -> f64,
{
    let decay = (-gamma_t).exp();
    let noise = (-(-gamma_t).exp_m1()).sqrt();
    let inv_scale = 1.0 / decay.sqrt();
    let mut total = 0.0;
    for (x, wx) in nodes.iter().zip(weights) {
        let q0 = (pt.q - noise * x) * inv_scale;
        let mut row = 0.0;
        for (y, wy) in nodes.iter().zip(weights) {
            let kernel = eval_thermal_wigner(PhasePoint::new(*x, *y), n);
            let p0 = (pt.p - noise * y) * inv_scale;
            row += wy * kernel * initial(PhasePoint::new(q0, p0));
        }
        total += wx * row;
    }
    gamma_t.exp() * total
}

/// Value at `pt` after decay time `γt` of a function that starts as `initial`:
///
/// `e^{γt} ∬ W_T(x, y) W_0((q - s x)/c, (p - s y)/c) dx dy`
///
/// with `s = sqrt(1 - e^{-γt})`, `c = sqrt(e^{-γt})` and `W_T` the thermal
/// Wigner function of the bath. The panel order doubles until two successive
/// estimates differ by less than `abs_tol`.
pub fn convolve_evolve<F>(initial: &F, channel: &ChannelParams, pt: PhasePoint, spec: &ConvolutionSpec) -> Result<f64>
where
    F: Fn(PhasePoint) -> f64,
{
    spec.validate()?;
    let gt = channel.gamma_t();
    if gt == 0.0 {
        return Ok(initial(pt));
    }
    let radius = spec.radius(channel.n());
    let mut order = spec.quad_order;
    let (nodes, weights) = panel_rule(order, radius);
    let mut previous = kernel_integral(initial, pt, channel.n(), gt, &nodes, &weights);
    let mut diff = f64::INFINITY;
    while order * 2 <= MAX_ORDER {
        order *= 2;
        let (nodes, weights) = panel_rule(order, radius);
        let current = kernel_integral(initial, pt, channel.n(), gt, &nodes, &weights);
        diff = (current - previous).abs();
        if diff < spec.abs_tol {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::numerical(
        format!(
            "kernel quadrature at ({}, {}) did not reach {:e} by order {MAX_ORDER}",
            pt.q, pt.p, spec.abs_tol
        ),
        Some(diff),
    ))
}

/// [`convolve_evolve`] at every point of a lattice, in parallel over rows.
pub fn convolve_grid<F>(
    initial: &F,
    channel: &ChannelParams,
    grid: &GridSpec,
    spec: &ConvolutionSpec,
) -> Result<WignerGrid>
where
    F: Fn(PhasePoint) -> f64 + Sync,
{
    spec.validate()?;
    try_sample_grid(|pt| convolve_evolve(initial, channel, pt, spec), grid)
}
