//! Laguerre polynomials weighted by `e^{-x/2}`.
//!
//! `|L_l(x)| e^{-x/2} <= 1` for `x >= 0`, but the unweighted three-term
//! recurrence grows quickly for large `x`, so the pair of running values is
//! renormalized whenever it gets large and the exponent is tracked separately.

use crate::error::{Error, Result};

/// Largest Fock index accepted by the recurrence.
pub const MAX_LAGUERRE_INDEX: usize = 500;

const RESCALE_AT: f64 = 1e150;

pub(crate) fn check_index(l: usize) -> Result<()> {
    if l > MAX_LAGUERRE_INDEX {
        Err(Error::domain(format!(
            "Laguerre index {l} exceeds recurrence bound {MAX_LAGUERRE_INDEX}"
        )))
    } else {
        Ok(())
    }
}

/// `Σ_l c_l L_l(x) e^{-x/2}` for coefficients `c_0..=c_L`.
pub(crate) fn weighted_series(coeffs: &[f64], x: f64) -> Result<f64> {
    if coeffs.is_empty() {
        return Ok(0.0);
    }
    check_index(coeffs.len() - 1)?;

    let mut prev = 1.0;
    let mut acc = coeffs[0];
    let mut log_scale = 0.0;
    if coeffs.len() > 1 {
        let mut cur = 1.0 - x;
        acc += coeffs[1] * cur;
        for (k, &c) in coeffs.iter().enumerate().skip(2) {
            let m = (k - 1) as f64;
            let next = ((2.0 * m + 1.0 - x) * cur - m * prev) / (m + 1.0);
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_AT {
                prev /= RESCALE_AT;
                cur /= RESCALE_AT;
                acc /= RESCALE_AT;
                log_scale += RESCALE_AT.ln();
            }
            acc += c * cur;
        }
    }
    if acc == 0.0 {
        return Ok(0.0);
    }
    Ok(acc.signum() * (acc.abs().ln() + log_scale - 0.5 * x).exp())
}

/// `L_l(x) e^{-x/2}`.
pub fn laguerre_weighted(l: usize, x: f64) -> Result<f64> {
    check_index(l)?;
    let mut coeffs = vec![0.0; l + 1];
    coeffs[l] = 1.0;
    weighted_series(&coeffs, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit(l: usize, x: f64) -> f64 {
        // Σ_k C(l,k) (-x)^k / k!
        let mut sum = 0.0;
        let mut binom = 1.0;
        let mut fact = 1.0;
        for k in 0..=l {
            if k > 0 {
                binom *= (l - k + 1) as f64 / k as f64;
                fact *= k as f64;
            }
            sum += binom * (-x).powi(k as i32) / fact;
        }
        sum
    }

    #[test]
    fn matches_explicit_sum_for_low_orders() {
        for l in 0..=8 {
            for x in [0.0, 0.3, 1.0, 2.5, 6.0] {
                let got = laguerre_weighted(l, x).unwrap();
                let want = explicit(l, x) * (-0.5 * x).exp();
                assert!((got - want).abs() < 1e-12, "l = {l}, x = {x}");
            }
        }
    }

    #[test]
    fn value_at_origin_is_one() {
        for l in [0, 1, 7, 100, 500] {
            assert!((laguerre_weighted(l, 0.0).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stays_bounded_at_high_order() {
        for x in [10.0, 500.0, 1800.0, 2500.0] {
            let v = laguerre_weighted(500, x).unwrap();
            assert!(v.is_finite() && v.abs() <= 1.0 + 1e-9, "x = {x}: {v}");
        }
    }

    #[test]
    fn refuses_index_beyond_bound() {
        assert!(matches!(laguerre_weighted(501, 1.0), Err(Error::Domain(_))));
    }
}
