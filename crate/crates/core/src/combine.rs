//! Log-space affine combination of two problem instances.
//!
//! `C(x) = exp(α ln d1(x) + (1 - α) ln d2(x))` with
//! `d1 = max(F1(x) - F1(O1), ε)` and `d2 = max(F2(x - O1 + O2) - F2(O2), ε)`.
//! The second function is translated so both optima coincide at `O1`; the
//! floor `ε` keeps the logarithm finite at the optimum.

use crate::error::{Error, Result};
use crate::suite::ProblemInstance;
use crate::Objective;

pub const DEFAULT_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CombinedProblem {
    pub first: ProblemInstance,
    pub second: ProblemInstance,
    pub alpha: f64,
    pub floor_eps: f64,
    /// `O2 - O1`, added to `x` before evaluating the second function.
    translation: Vec<f64>,
    first_at_optimum: f64,
    second_at_optimum: f64,
}

pub fn combine(first: ProblemInstance, second: ProblemInstance, alpha: f64) -> Result<CombinedProblem> {
    CombinedProblem::with_floor(first, second, alpha, DEFAULT_FLOOR)
}

impl CombinedProblem {
    pub fn with_floor(
        first: ProblemInstance,
        second: ProblemInstance,
        alpha: f64,
        floor_eps: f64,
    ) -> Result<Self> {
        if first.dimension() != second.dimension() {
            return Err(Error::DimensionMismatch {
                expected: first.dimension(),
                got: second.dimension(),
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(floor_eps > 0.0 && floor_eps.is_finite()) {
            return Err(Error::Config(format!("floor must be positive, got {floor_eps}")));
        }
        let translation = second
            .optimum_location
            .iter()
            .zip(&first.optimum_location)
            .map(|(o2, o1)| o2 - o1)
            .collect();
        let first_at_optimum = first.value(&first.optimum_location);
        let second_at_optimum = second.value(&second.optimum_location);
        Ok(Self {
            first,
            second,
            alpha,
            floor_eps,
            translation,
            first_at_optimum,
            second_at_optimum,
        })
    }

    pub fn dimension(&self) -> usize {
        self.first.dimension()
    }

    /// Location of the combined optimum (`O1`).
    pub fn optimum_location(&self) -> &[f64] {
        &self.first.optimum_location
    }

    /// The two floored, optimum-subtracted terms `(d1, d2)`.
    pub fn terms(&self, x: &[f64]) -> (f64, f64) {
        let moved: Vec<f64> = x.iter().zip(&self.translation).map(|(a, t)| a + t).collect();
        let d1 = (self.first.value(x) - self.first_at_optimum).max(self.floor_eps);
        let d2 = (self.second.value(&moved) - self.second_at_optimum).max(self.floor_eps);
        (d1, d2)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        let v = self.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(v))
        }
    }
}

impl Objective for CombinedProblem {
    fn dimension(&self) -> usize {
        self.first.dimension()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (d1, d2) = self.terms(x);
        // f64::max drops NaN operands, so a NaN base value would be hidden by the floor.
        if d1.is_nan() || d2.is_nan() {
            return f64::NAN;
        }
        // exp(ln d) does not round-trip exactly, so keep the endpoints and the floored optimum exact.
        if self.alpha == 1.0 || d1 == d2 {
            return d1;
        }
        if self.alpha == 0.0 {
            return d2;
        }
        (self.alpha * d1.ln() + (1.0 - self.alpha) * d2.ln()).exp()
    }
}
