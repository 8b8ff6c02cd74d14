use serde::{Deserialize, Serialize};

use super::diffusion_coefficient;
use crate::error::{Error, Result};
use crate::states::ChannelParams;
use crate::wigner::{GridSpec, WignerGrid};

/// Explicit schemes must satisfy `dt <= STABILITY_C Δ² / D` in two dimensions.
pub const STABILITY_C: f64 = 0.25;

/// Mass lost through the Dirichlet edges above this is logged as a warning.
pub const MASS_LOSS_WARN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpScheme {
    /// Forward Euler with centered differences for drift and diffusion.
    ForwardEuler,
    /// Peaceman–Rachford alternating-direction implicit steps.
    Adi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FokkerPlanckSpec {
    /// Largest time step in units of `γt`; the run uses `γt / ceil(γt / dt)`.
    pub dt: f64,
    pub scheme: FpScheme,
}

impl FokkerPlanckSpec {
    /// Largest explicit step allowed on `grid` for a bath of mean `n`.
    pub fn stable_dt(grid: &GridSpec, n: f64) -> f64 {
        let h = grid.dq().min(grid.dp());
        STABILITY_C * h * h / diffusion_coefficient(n)
    }

    /// ADI run with the explicit stability step.
    pub fn adi_for(grid: &GridSpec, n: f64) -> Self {
        Self {
            dt: Self::stable_dt(grid, n),
            scheme: FpScheme::Adi,
        }
    }
}

/// Outcome of a finite-difference run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FokkerPlanckRun {
    pub grid: WignerGrid,
    pub steps: usize,
    pub dt: f64,
    pub mass_initial: f64,
    pub mass_final: f64,
}

impl FokkerPlanckRun {
    pub fn mass_drift(&self) -> f64 {
        self.mass_final - self.mass_initial
    }
}

/// Finite-difference operator `½ ∂_x(x ·) + D ∂²_x` along one axis.
#[derive(Debug, Clone)]
struct AxisOperator {
    lower: Vec<f64>,
    diag: f64,
    upper: Vec<f64>,
}

impl AxisOperator {
    fn new(coords: &[f64], h: f64, diffusion: f64) -> Self {
        let len = coords.len();
        let d = diffusion / (h * h);
        let drift = 0.25 / h;
        let mut lower = vec![0.0; len];
        let mut upper = vec![0.0; len];
        for i in 1..len - 1 {
            lower[i] = d - drift * coords[i - 1];
            upper[i] = d + drift * coords[i + 1];
        }
        Self {
            lower,
            diag: -2.0 * d,
            upper,
        }
    }

    /// `out[i] = base[i] + scale (A v)[i]` on interior nodes; edges stay zero.
    fn apply(&self, v: &[f64], base: &[f64], scale: f64, out: &mut [f64]) {
        let len = v.len();
        out[0] = 0.0;
        out[len - 1] = 0.0;
        for i in 1..len - 1 {
            out[i] = base[i] + scale * (self.lower[i] * v[i - 1] + self.diag * v[i] + self.upper[i] * v[i + 1]);
        }
    }

    /// Solves `(I - scale A) x = rhs` on interior nodes with zero edges.
    fn solve(&self, rhs: &[f64], scale: f64, x: &mut [f64], work: &mut [f64]) {
        let len = rhs.len();
        x[0] = 0.0;
        x[len - 1] = 0.0;
        if len <= 2 {
            return;
        }
        // Thomas algorithm over indices 1..len-1.
        let b = 1.0 - scale * self.diag;
        let mut denom = b;
        x[1] = rhs[1] / denom;
        for i in 2..len - 1 {
            work[i] = -scale * self.upper[i - 1] / denom;
            let a = -scale * self.lower[i];
            denom = b - a * work[i];
            x[i] = (rhs[i] - a * x[i - 1]) / denom;
        }
        for i in (1..len - 2).rev() {
            x[i] -= work[i + 1] * x[i + 1];
        }
    }
}

fn check_finite(values: &[f64], step: usize) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::numerical(format!("non-finite value after step {step}"), None))
    }
}

/// Integrates the drift–diffusion equation from `0` to `γt` on the lattice
/// of `initial`, with zero Dirichlet edges.
pub fn fokker_planck_evolve(
    initial: &WignerGrid,
    channel: &ChannelParams,
    spec: &FokkerPlanckSpec,
) -> Result<FokkerPlanckRun> {
    let grid = *initial.spec();
    let mass_initial = initial.integral();
    let gamma_t = channel.gamma_t();
    if gamma_t == 0.0 {
        return Ok(FokkerPlanckRun {
            grid: initial.clone(),
            steps: 0,
            dt: 0.0,
            mass_initial,
            mass_final: mass_initial,
        });
    }
    if !(spec.dt.is_finite() && spec.dt > 0.0) {
        return Err(Error::Config(format!("time step {} must be positive", spec.dt)));
    }
    let bound = FokkerPlanckSpec::stable_dt(&grid, channel.n());
    if spec.scheme == FpScheme::ForwardEuler && spec.dt > bound {
        return Err(Error::Config(format!(
            "explicit step {} exceeds stability bound {bound}",
            spec.dt
        )));
    }
    if !initial.is_normalized() {
        return Err(Error::Config(format!(
            "initial grid integrates to {}, not 1 within {:e}",
            mass_initial,
            initial.norm_tol()
        )));
    }

    let steps = (gamma_t / spec.dt).ceil() as usize;
    let dt = gamma_t / steps as f64;
    let (nq, np) = (grid.nq, grid.np);
    let diffusion = diffusion_coefficient(channel.n());
    let q_coords: Vec<f64> = (0..nq).map(|i| grid.q_at(i)).collect();
    let p_coords: Vec<f64> = (0..np).map(|j| grid.p_at(j)).collect();
    let op_q = AxisOperator::new(&q_coords, grid.dq(), diffusion);
    let op_p = AxisOperator::new(&p_coords, grid.dp(), diffusion);

    let mut w = initial.values().to_vec();
    for i in 0..nq {
        for j in 0..np {
            if i == 0 || j == 0 || i + 1 == nq || j + 1 == np {
                w[i * np + j] = 0.0;
            }
        }
    }

    match spec.scheme {
        FpScheme::ForwardEuler => {
            let mut next = vec![0.0; nq * np];
            let mut col = vec![0.0; nq];
            let mut col_out = vec![0.0; nq];
            let zeros = vec![0.0; nq];
            for step in 1..=steps {
                // p-direction along contiguous rows
                for i in 0..nq {
                    let row = &w[i * np..(i + 1) * np];
                    op_p.apply(row, row, dt, &mut next[i * np..(i + 1) * np]);
                }
                // add the q-direction contribution
                for j in 0..np {
                    for i in 0..nq {
                        col[i] = w[i * np + j];
                    }
                    op_q.apply(&col, &zeros, dt, &mut col_out);
                    for i in 1..nq - 1 {
                        next[i * np + j] += col_out[i];
                    }
                }
                for i in 0..nq {
                    if i == 0 || i + 1 == nq {
                        next[i * np..(i + 1) * np].fill(0.0);
                    }
                }
                std::mem::swap(&mut w, &mut next);
                check_finite(&w, step)?;
            }
        }
        FpScheme::Adi => {
            let half = 0.5 * dt;
            let mut star = vec![0.0; nq * np];
            let mut rhs_row = vec![0.0; np];
            let mut col = vec![0.0; nq];
            let mut rhs_col = vec![0.0; nq];
            let mut sol_col = vec![0.0; nq];
            let mut work = vec![0.0; nq.max(np)];
            for step in 1..=steps {
                // (I - h/2 A_q) W* = (I + h/2 A_p) W
                for i in 0..nq {
                    let row = &w[i * np..(i + 1) * np];
                    op_p.apply(row, row, half, &mut rhs_row);
                    star[i * np..(i + 1) * np].copy_from_slice(&rhs_row);
                }
                for j in 0..np {
                    for i in 0..nq {
                        rhs_col[i] = star[i * np + j];
                    }
                    op_q.solve(&rhs_col, half, &mut sol_col, &mut work);
                    for i in 0..nq {
                        star[i * np + j] = sol_col[i];
                    }
                }
                // (I - h/2 A_p) W = (I + h/2 A_q) W*
                for j in 0..np {
                    for i in 0..nq {
                        col[i] = star[i * np + j];
                    }
                    op_q.apply(&col, &col, half, &mut rhs_col);
                    for i in 0..nq {
                        star[i * np + j] = rhs_col[i];
                    }
                }
                for i in 0..nq {
                    let row = &mut w[i * np..(i + 1) * np];
                    if i == 0 || i + 1 == nq {
                        row.fill(0.0);
                        continue;
                    }
                    op_p.solve(&star[i * np..(i + 1) * np], half, row, &mut work);
                }
                check_finite(&w, step)?;
            }
        }
    }

    let out = WignerGrid::from_values(grid, w)?.with_norm_tol(initial.norm_tol());
    let mass_final = out.integral();
    if (mass_initial - mass_final).abs() > MASS_LOSS_WARN {
        log::warn!(
            "finite-difference mass changed by {:e} over γt = {gamma_t}",
            mass_final - mass_initial
        );
    }
    Ok(FokkerPlanckRun {
        grid: out,
        steps,
        dt,
        mass_initial,
        mass_final,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::{eval_spats_wigner_evolved, eval_spats_wigner_initial, eval_thermal_wigner, sample_grid};

    fn ch(n: f64, gt: f64) -> ChannelParams {
        ChannelParams::new(n, gt).unwrap()
    }

    #[test]
    fn zero_time_returns_input() {
        let spec = GridSpec::square(5.0, 41).unwrap();
        let g = sample_grid(|pt| eval_thermal_wigner(pt, 0.3), &spec).unwrap();
        let run = fokker_planck_evolve(&g, &ch(0.5, 0.0), &FokkerPlanckSpec::adi_for(&spec, 0.5)).unwrap();
        assert_eq!(run.grid, g);
        assert_eq!(run.steps, 0);
    }

    #[test]
    fn explicit_step_above_bound_is_rejected() {
        let spec = GridSpec::square(5.0, 101).unwrap();
        let g = sample_grid(|pt| eval_thermal_wigner(pt, 0.0), &spec).unwrap();
        let fp = FokkerPlanckSpec {
            dt: 2.0 * FokkerPlanckSpec::stable_dt(&spec, 0.0),
            scheme: FpScheme::ForwardEuler,
        };
        assert!(matches!(
            fokker_planck_evolve(&g, &ch(0.0, 0.1), &fp),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let spec = GridSpec::square(5.0, 41).unwrap();
        let g = sample_grid(|pt| 2.0 * eval_thermal_wigner(pt, 0.0), &spec).unwrap();
        let fp = FokkerPlanckSpec::adi_for(&spec, 0.0);
        assert!(matches!(
            fokker_planck_evolve(&g, &ch(0.0, 0.1), &fp),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn both_schemes_track_thermal_relaxation() {
        // thermal n̄ = 1 in the loss channel stays thermal with mean e^{-γt}
        let spec = GridSpec::square(6.0, 241).unwrap();
        let g = sample_grid(|pt| eval_thermal_wigner(pt, 1.0), &spec).unwrap();
        let c = ch(0.0, 1.0);
        let want = sample_grid(|pt| eval_thermal_wigner(pt, (-1.0f64).exp()), &spec).unwrap();
        for scheme in [FpScheme::ForwardEuler, FpScheme::Adi] {
            let fp = FokkerPlanckSpec {
                dt: FokkerPlanckSpec::stable_dt(&spec, 0.0),
                scheme,
            };
            let run = fokker_planck_evolve(&g, &c, &fp).unwrap();
            let err = run.grid.max_abs_diff(&want).unwrap();
            assert!(err < 1e-3, "{scheme:?}: {err}");
            assert!(run.mass_drift().abs() < 1e-3);
        }
    }

    #[test]
    fn adi_tracks_spats_closed_form() {
        let spec = GridSpec::square(6.0, 121).unwrap();
        let g = sample_grid(|pt| eval_spats_wigner_initial(pt, 1.0), &spec).unwrap();
        let c = ch(0.5, 0.3);
        let run = fokker_planck_evolve(&g, &c, &FokkerPlanckSpec::adi_for(&spec, 0.5)).unwrap();
        let want = sample_grid(|pt| eval_spats_wigner_evolved(pt, &c, 1.0), &spec).unwrap();
        assert!(run.grid.max_abs_diff(&want).unwrap() < 1e-3);
    }
}
