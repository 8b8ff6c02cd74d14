use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PhasePoint;
use crate::error::{Error, Result};

/// Default points per axis.
pub const DEFAULT_RESOLUTION: usize = 201;

/// Uniform tensor-product lattice on `[q_min, q_max] × [p_min, p_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64, nq: usize, np: usize) -> Result<Self> {
        let spec = Self {
            q_min,
            q_max,
            p_min,
            p_max,
            nq,
            np,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `[-extent, extent]²` with `resolution` points per axis.
    pub fn square(extent: f64, resolution: usize) -> Result<Self> {
        Self::new(-extent, extent, -extent, extent, resolution, resolution)
    }

    /// Square grid wide enough for a seed of mean `bar_n` in a bath of mean `n`:
    /// half-width `max(5, 5 sqrt(1 + 2 max(n̄, n)))`, 201 points per axis.
    pub fn default_for(bar_n: f64, n: f64) -> Result<Self> {
        Self::square(default_extent(bar_n, n), DEFAULT_RESOLUTION)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.q_min, self.q_max, self.p_min, self.p_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("grid extents must be finite"));
        }
        if self.q_min >= self.q_max || self.p_min >= self.p_max {
            return Err(Error::domain("grid extents must be strictly ordered"));
        }
        if self.nq < 2 || self.np < 2 {
            return Err(Error::domain("grid needs at least 2 points per axis"));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.nq - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn q_at(&self, i: usize) -> f64 {
        if i + 1 == self.nq {
            self.q_max
        } else {
            self.q_min + i as f64 * self.dq()
        }
    }

    pub fn p_at(&self, j: usize) -> f64 {
        if j + 1 == self.np {
            self.p_max
        } else {
            self.p_min + j as f64 * self.dp()
        }
    }

    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint::new(self.q_at(i), self.p_at(j))
    }
}

pub fn default_extent(bar_n: f64, n: f64) -> f64 {
    (5.0 * (1.0 + 2.0 * bar_n.max(n)).sqrt()).max(5.0)
}

/// Samples of a phase-space function on a [`GridSpec`], row-major in `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    spec: GridSpec,
    values: Vec<f64>,
    norm_tol: f64,
}

impl WignerGrid {
    /// Normalization tolerance attached to freshly sampled grids.
    pub const DEFAULT_NORM_TOL: f64 = 1e-6;

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.nq * spec.np {
            return Err(Error::domain(format!(
                "expected {} grid values, got {}",
                spec.nq * spec.np,
                values.len()
            )));
        }
        Ok(Self {
            spec,
            values,
            norm_tol: Self::DEFAULT_NORM_TOL,
        })
    }

    pub fn with_norm_tol(mut self, norm_tol: f64) -> Self {
        self.norm_tol = norm_tol;
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_tol(&self) -> f64 {
        self.norm_tol
    }

    pub fn cell_area(&self) -> f64 {
        self.spec.cell_area()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.np + j]
    }

    /// Composite trapezoidal rule over the full lattice.
    pub fn integral(&self) -> f64 {
        let (nq, np) = (self.spec.nq, self.spec.np);
        let mut total = 0.0;
        for i in 0..nq {
            let wi = if i == 0 || i + 1 == nq { 0.5 } else { 1.0 };
            let row = &self.values[i * np..(i + 1) * np];
            let mut row_sum = 0.0;
            for (j, v) in row.iter().enumerate() {
                let wj = if j == 0 || j + 1 == np { 0.5 } else { 1.0 };
                row_sum += wj * v;
            }
            total += wi * row_sum;
        }
        total * self.cell_area()
    }

    /// Whether the integral lies within `norm_tol` of one.
    pub fn is_normalized(&self) -> bool {
        (self.integral() - 1.0).abs() <= self.norm_tol
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute pointwise difference to a grid on the same lattice.
    pub fn max_abs_diff(&self, other: &WignerGrid) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::domain("grids are sampled on different lattices"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `q,p,w` rows with 17 significant digits and LF line endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(b"q,p,w\n")?;
        for i in 0..self.spec.nq {
            let q = self.spec.q_at(i);
            for j in 0..self.spec.np {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", q, self.spec.p_at(j), self.value(i, j))?;
            }
        }
        Ok(())
    }
}

/// Samples `evaluator` at every lattice point. Rows are filled in parallel;
/// each value depends only on its own point, so the result does not depend
/// on scheduling.
pub fn sample_grid<F>(evaluator: F, spec: &GridSpec) -> Result<WignerGrid>
where
    F: Fn(PhasePoint) -> f64 + Sync,
{
    spec.validate()?;
    let mut values = vec![0.0; spec.nq * spec.np];
    values.par_chunks_mut(spec.np).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = evaluator(spec.point(i, j));
        }
    });
    WignerGrid::from_values(*spec, values)
}

/// Fallible variant of [`sample_grid`]; the first error in lattice order wins.
pub fn try_sample_grid<F>(evaluator: F, spec: &GridSpec) -> Result<WignerGrid>
where
    F: Fn(PhasePoint) -> Result<f64> + Sync,
{
    spec.validate()?;
    let rows: Vec<Result<Vec<f64>>> = (0..spec.nq)
        .into_par_iter()
        .map(|i| (0..spec.np).map(|j| evaluator(spec.point(i, j))).collect())
        .collect();
    let mut values = Vec::with_capacity(spec.nq * spec.np);
    for row in rows {
        values.extend(row?);
    }
    WignerGrid::from_values(*spec, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::{eval_spats_wigner_initial, eval_thermal_wigner};

    #[test]
    fn constant_on_unit_square_integrates_to_one() {
        for n in [2, 3, 17] {
            let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, n, n + 1).unwrap();
            let g = sample_grid(|_| 1.0, &spec).unwrap();
            assert!((g.integral() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_normalization() {
        let g = sample_grid(|pt| eval_thermal_wigner(pt, 0.0), &GridSpec::square(5.0, 201).unwrap()).unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-6);
        assert!(g.is_normalized());
        let g = sample_grid(
            |pt| eval_spats_wigner_initial(pt, 1.0),
            &GridSpec::square(6.0, 241).unwrap(),
        )
        .unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_degenerate_specs() {
        assert!(GridSpec::square(1.0, 1).is_err());
        assert!(GridSpec::new(1.0, 0.0, 0.0, 1.0, 3, 3).is_err());
        assert!(GridSpec::new(0.0, f64::INFINITY, 0.0, 1.0, 3, 3).is_err());
    }

    #[test]
    fn lattice_ends_exactly_on_extents() {
        let spec = GridSpec::square(6.0, 241).unwrap();
        assert_eq!(spec.q_at(0), -6.0);
        assert_eq!(spec.q_at(240), 6.0);
        assert_eq!(spec.p_at(120), 0.0);
    }

    #[test]
    fn csv_layout() {
        let spec = GridSpec::square(1.0, 2).unwrap();
        let g = sample_grid(|pt| pt.q + 10.0 * pt.p, &spec).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "q,p,w");
        assert_eq!(
            lines[2],
            "-1.0000000000000000e0,1.0000000000000000e0,9.0000000000000000e0"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn default_extent_rule() {
        assert_eq!(default_extent(0.0, 0.0), 5.0);
        assert!((default_extent(1.0, 0.5) - 5.0 * 3f64.sqrt()).abs() < 1e-15);
    }
}
