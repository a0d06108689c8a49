//! Two-dimensional landscape grids of a combined problem, log10-scaled.

use crate::combine::CombinedProblem;
use crate::error::{Error, Result};
use crate::Objective;
use std::fmt::Write as _;

pub const DEFAULT_RESOLUTION: usize = 201;
pub const BOUNDS: (f64, f64) = (-5.0, 5.0);

#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeGrid {
    pub resolution: usize,
    /// Axis coordinates, shared by x and y.
    pub axis: Vec<f64>,
    /// `values[iy * resolution + ix]` is `log10 C(axis[ix], axis[iy])`.
    pub values: Vec<f64>,
    pub optimum: [f64; 2],
    pub overlay: Vec<[f64; 2]>,
}

impl LandscapeGrid {
    pub fn compute(problem: &CombinedProblem, resolution: usize) -> Result<Self> {
        if problem.dimension() != 2 {
            return Err(Error::Config(format!(
                "landscapes need dimension 2, got {}",
                problem.dimension()
            )));
        }
        if resolution < 2 {
            return Err(Error::Config(format!("resolution must be at least 2, got {resolution}")));
        }
        let (lo, hi) = BOUNDS;
        let axis: Vec<f64> = (0..resolution)
            .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
            .collect();
        let mut values = Vec::with_capacity(resolution * resolution);
        for &y in &axis {
            for &x in &axis {
                values.push(problem.value(&[x, y]).log10());
            }
        }
        let o = problem.optimum_location();
        Ok(Self {
            resolution,
            axis,
            values,
            optimum: [o[0], o[1]],
            overlay: Vec::new(),
        })
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.resolution + ix]
    }

    /// Grid indices `(ix, iy)` of the smallest value.
    pub fn argmin(&self) -> (usize, usize) {
        let idx = self
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        (idx % self.resolution, idx / self.resolution)
    }

    /// Grid indices of the point closest to `p`.
    pub fn nearest_cell(&self, p: [f64; 2]) -> (usize, usize) {
        let nearest = |v: f64| {
            let (lo, hi) = BOUNDS;
            let step = (hi - lo) / (self.resolution - 1) as f64;
            (((v - lo) / step).round().max(0.0) as usize).min(self.resolution - 1)
        };
        (nearest(p[0]), nearest(p[1]))
    }

    /// CSV with `# optimum:` and `# best:` comment lines, then `x,y,log10_value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# optimum: {:.16e} {:.16e}\n", self.optimum[0], self.optimum[1]);
        for p in &self.overlay {
            let _ = writeln!(out, "# best: {:.16e} {:.16e}", p[0], p[1]);
        }
        out.push_str("x,y,log10_value\n");
        for (iy, &y) in self.axis.iter().enumerate() {
            for (ix, &x) in self.axis.iter().enumerate() {
                let _ = writeln!(out, "{x:.16e},{y:.16e},{:.16e}", self.value_at(ix, iy));
            }
        }
        out
    }
}
