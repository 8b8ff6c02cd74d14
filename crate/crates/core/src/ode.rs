//! Embedded Dormand–Prince 5(4) integrator with absolute error control.
//!
//! Only autonomous systems are needed here, so the stage times are not tracked.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order weights equal the last row of A (FSAL).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Counters from a finished integration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates the autonomous system `dy/dt = rhs(y)` from `0` to `t_end` in place.
///
/// Each accepted step keeps the max-norm of the embedded error estimate
/// below `tol`.
pub fn dopri5<F>(rhs: F, y: &mut [f64], t_end: f64, tol: f64, max_steps: usize) -> Result<OdeStats>
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = y.len();
    let mut stats = OdeStats::default();
    if t_end <= 0.0 || dim == 0 {
        return Ok(stats);
    }

    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    rhs(y, &mut k[0]);
    let max_rate = k[0].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut h = if max_rate > 0.0 {
        (0.01 * tol.powf(0.2) / max_rate).clamp(1e-10, t_end)
    } else {
        t_end
    };
    let mut t = 0.0;

    while t < t_end {
        if stats.accepted + stats.rejected >= max_steps {
            return Err(Error::numerical(
                format!(
                    "step control did not converge: t = {t:.6e} of {t_end:.6e}, h = {h:.3e}, \
                     {} accepted / {} rejected steps",
                    stats.accepted, stats.rejected
                ),
                Some(h),
            ));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            rhs(&stage, &mut k[s]);
        }

        let mut err = 0.0_f64;
        for i in 0..dim {
            let mut hi5 = 0.0;
            let mut hi4 = 0.0;
            for s in 0..7 {
                hi5 += B5[s] * k[s][i];
                hi4 += B4[s] * k[s][i];
            }
            y_new[i] = y[i] + h * hi5;
            err = err.max((h * (hi5 - hi4)).abs());
        }

        if !err.is_finite() {
            return Err(Error::numerical(
                format!("non-finite error estimate at t = {t:.6e}"),
                None,
            ));
        }

        if err <= tol {
            t = if last { t_end } else { t + h };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(stats)
}
