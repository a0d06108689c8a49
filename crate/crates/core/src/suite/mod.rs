//! Instantiated BBOB-style test functions.
//!
//! Implemented: F1 sphere, F2 separable ellipsoid, F3 Rastrigin, F9 rotated
//! Rosenbrock, F10 rotated ellipsoid, F11 discus, F16 Weierstrass and F21
//! Gallagher with 101 peaks. Every instance is shifted so that its optimum
//! has value exactly zero.

mod transforms;

pub use transforms::{f_pen, lambda_alpha, random_rotation, tasy, tosz, tosz_scalar, Rotation};

use crate::error::{Error, Result};
use crate::rng::InstanceStream;
use crate::Objective;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use transforms::{dot, tasy_in_place, tosz_in_place};

pub const SUPPORTED_FUNCTIONS: [u32; 8] = [1, 2, 3, 9, 10, 11, 16, 21];

const TAG_OPTIMUM: u64 = 0;
const TAG_ROTATION_R: u64 = 1;
const TAG_ROTATION_Q: u64 = 2;
const TAG_PEAKS: u64 = 3;
const TAG_SANITY: u64 = 99;

const WEIERSTRASS_TERMS: i32 = 12;
const GALLAGHER_PEAKS: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProblemId {
    pub function_id: u32,
    pub instance_id: u32,
    pub dimension: usize,
}

impl ProblemId {
    pub fn new(function_id: u32, instance_id: u32, dimension: usize) -> Result<Self> {
        if !SUPPORTED_FUNCTIONS.contains(&function_id) {
            return Err(Error::UnsupportedFunction(function_id));
        }
        if instance_id == 0 {
            return Err(Error::InvalidProblem("instance id must be positive".into()));
        }
        if dimension < 2 {
            return Err(Error::InvalidProblem(format!(
                "dimension must be at least 2, got {dimension}"
            )));
        }
        Ok(Self {
            function_id,
            instance_id,
            dimension,
        })
    }
}

/// Where the optimum of a freely placed function goes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PlacementPolicy {
    /// Uniform in `[-4, 4]^D`.
    #[default]
    Uniform,
    /// Uniformly random direction at a fixed Euclidean distance from the origin.
    FixedNorm { norm: f64 },
}

impl PlacementPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PlacementPolicy::Uniform => Ok(()),
            PlacementPolicy::FixedNorm { norm } if norm > 0.0 && norm <= 4.0 => Ok(()),
            PlacementPolicy::FixedNorm { norm } => Err(Error::Config(format!(
                "fixed_norm placement needs 0 < norm <= 4, got {norm}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Sphere,
    SeparableEllipsoid,
    Rastrigin,
    Rosenbrock,
    RotatedEllipsoid,
    Discus,
    Weierstrass,
    Gallagher,
}

impl Family {
    fn of(function_id: u32) -> Result<Self> {
        Ok(match function_id {
            1 => Family::Sphere,
            2 => Family::SeparableEllipsoid,
            3 => Family::Rastrigin,
            9 => Family::Rosenbrock,
            10 => Family::RotatedEllipsoid,
            11 => Family::Discus,
            16 => Family::Weierstrass,
            21 => Family::Gallagher,
            other => return Err(Error::UnsupportedFunction(other)),
        })
    }
}

/// Gallagher peak set. Peak 0 is the global optimum.
#[derive(Clone, Debug, PartialEq)]
pub struct Peaks {
    pub locations: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub conditioning: Vec<f64>,
    /// Diagonal of each peak's (permuted, normalized) conditioning matrix.
    pub scales: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub id: ProblemId,
    pub optimum_location: Vec<f64>,
    pub optimum_value: f64,
    pub rotation_r: Rotation,
    pub rotation_q: Rotation,
    pub peaks: Option<Peaks>,
    family: Family,
    /// Per-coordinate multipliers (ellipsoid weights, Rastrigin conditioning, ...).
    coefficients: Vec<f64>,
    rosenbrock_scale: f64,
    weierstrass_f0: f64,
    raw_at_optimum: f64,
}

/// Builds a deterministic instance of a test function.
pub fn make_problem(id: ProblemId, policy: PlacementPolicy) -> Result<ProblemInstance> {
    let id = ProblemId::new(id.function_id, id.instance_id, id.dimension)?;
    policy.validate()?;
    let family = Family::of(id.function_id)?;
    let dim = id.dimension;
    let denom = (dim - 1) as f64;

    let mut placement = InstanceStream::for_instance(id.function_id, id.instance_id, TAG_OPTIMUM);
    let mut optimum = match policy {
        PlacementPolicy::Uniform => (0..dim).map(|_| placement.uniform_in(-4.0, 4.0)).collect(),
        PlacementPolicy::FixedNorm { norm } => {
            let dir: Vec<f64> = (0..dim).map(|_| placement.normal()).collect();
            let len = dot(&dir, &dir).sqrt();
            dir.iter().map(|v| v / len * norm).collect::<Vec<f64>>()
        }
    };

    let rotated = matches!(
        family,
        Family::Rosenbrock
            | Family::RotatedEllipsoid
            | Family::Discus
            | Family::Weierstrass
            | Family::Gallagher
    );
    let rotation_r = if rotated {
        Rotation::random(
            &mut InstanceStream::for_instance(id.function_id, id.instance_id, TAG_ROTATION_R),
            dim,
        )?
    } else {
        Rotation::identity(dim)
    };
    let rotation_q = if family == Family::Weierstrass {
        Rotation::random(
            &mut InstanceStream::for_instance(id.function_id, id.instance_id, TAG_ROTATION_Q),
            dim,
        )?
    } else {
        Rotation::identity(dim)
    };

    let mut coefficients = Vec::new();
    let mut rosenbrock_scale = 1.0;
    let mut weierstrass_f0 = 0.0;
    let mut peaks = None;
    match family {
        Family::Sphere | Family::Discus => {}
        Family::SeparableEllipsoid | Family::RotatedEllipsoid => {
            coefficients = (0..dim)
                .map(|i| 10f64.powf(6.0 * i as f64 / denom))
                .collect();
        }
        Family::Rastrigin => coefficients = lambda_alpha(10.0, dim),
        Family::Rosenbrock => {
            rosenbrock_scale = 1f64.max((dim as f64).sqrt() / 8.0);
            // R x* = 0.5 / c pins z(x*) to the all-ones vector.
            let target = vec![0.5 / rosenbrock_scale; dim];
            optimum = rotation_r.apply_transpose(&target);
        }
        Family::Weierstrass => {
            coefficients = lambda_alpha(0.01, dim);
            weierstrass_f0 = (0..WEIERSTRASS_TERMS)
                .map(|k| 0.5f64.powi(k) * (PI * 3f64.powi(k)).cos())
                .sum();
        }
        Family::Gallagher => peaks = Some(gallagher_peaks(id, &optimum)),
    }

    let mut instance = ProblemInstance {
        id,
        optimum_location: optimum,
        optimum_value: 0.0,
        rotation_r,
        rotation_q,
        peaks,
        family,
        coefficients,
        rosenbrock_scale,
        weierstrass_f0,
        raw_at_optimum: 0.0,
    };
    instance.raw_at_optimum = instance.raw(&instance.optimum_location);
    debug_assert!(
        instance.sampled_minimum(10_000) >= -1e-9,
        "{:?} evaluates below its optimum",
        instance.id
    );
    Ok(instance)
}

fn gallagher_peaks(id: ProblemId, optimum: &[f64]) -> Peaks {
    let dim = id.dimension;
    let mut stream = InstanceStream::for_instance(id.function_id, id.instance_id, TAG_PEAKS);

    let mut locations = Vec::with_capacity(GALLAGHER_PEAKS);
    locations.push(optimum.to_vec());
    for _ in 1..GALLAGHER_PEAKS {
        locations.push((0..dim).map(|_| stream.uniform_in(-4.9, 4.3)).collect());
    }

    let mut weights = vec![10.0];
    weights.extend((2..=GALLAGHER_PEAKS).map(|k| 1.1 + 8.0 * (k - 2) as f64 / 99.0));

    let mut others: Vec<f64> = (2..=GALLAGHER_PEAKS)
        .map(|k| 1000f64.powf((k - 1) as f64 / 99.0))
        .collect();
    stream.shuffle(&mut others);
    let mut conditioning = vec![1000.0];
    conditioning.extend(others);

    let scales = conditioning
        .iter()
        .map(|&c| {
            let mut diag: Vec<f64> = lambda_alpha(c, dim)
                .into_iter()
                .map(|v| v / c.powf(0.25))
                .collect();
            stream.shuffle(&mut diag);
            diag
        })
        .collect();

    Peaks {
        locations,
        weights,
        conditioning,
        scales,
    }
}

impl ProblemInstance {
    pub fn dimension(&self) -> usize {
        self.id.dimension
    }

    pub fn function_id(&self) -> u32 {
        self.id.function_id
    }

    /// Objective value, zero at [`Self::optimum_location`].
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: &[f64]) -> f64 {
        self.raw(x) - self.raw_at_optimum
    }

    fn raw(&self, x: &[f64]) -> f64 {
        let dim = x.len();
        let o = &self.optimum_location;
        let shifted = || -> Vec<f64> { x.iter().zip(o).map(|(a, b)| a - b).collect() };
        let rotated_shift = || -> Vec<f64> { self.rotation_r.apply(&shifted()) };
        match self.family {
            Family::Sphere => x.iter().zip(o).map(|(a, b)| (a - b) * (a - b)).sum(),
            Family::SeparableEllipsoid => {
                let mut z = shifted();
                tosz_in_place(&mut z);
                weighted_squares(&self.coefficients, &z)
            }
            Family::Rastrigin => {
                let mut z = shifted();
                tosz_in_place(&mut z);
                tasy_in_place(&mut z, 0.2);
                z.iter_mut()
                    .zip(&self.coefficients)
                    .for_each(|(v, c)| *v *= c);
                let cosines: f64 = z.iter().map(|v| (TAU * v).cos()).sum();
                10.0 * (dim as f64 - cosines) + dot(&z, &z)
            }
            Family::Rosenbrock => {
                let mut z = self.rotation_r.apply(x);
                z.iter_mut()
                    .for_each(|v| *v = self.rosenbrock_scale * *v + 0.5);
                z.windows(2)
                    .map(|w| {
                        let a = w[0] * w[0] - w[1];
                        let b = w[0] - 1.0;
                        100.0 * a * a + b * b
                    })
                    .sum()
            }
            Family::RotatedEllipsoid => {
                let mut z = rotated_shift();
                tosz_in_place(&mut z);
                weighted_squares(&self.coefficients, &z)
            }
            Family::Discus => {
                let mut z = rotated_shift();
                tosz_in_place(&mut z);
                1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>()
            }
            Family::Weierstrass => {
                let mut t = rotated_shift();
                tosz_in_place(&mut t);
                let mut u = self.rotation_q.apply(&t);
                u.iter_mut()
                    .zip(&self.coefficients)
                    .for_each(|(v, c)| *v *= c);
                let z = self.rotation_r.apply(&u);
                let total: f64 = z
                    .iter()
                    .map(|&zi| {
                        (0..WEIERSTRASS_TERMS)
                            .map(|k| 0.5f64.powi(k) * (TAU * 3f64.powi(k) * (zi + 0.5)).cos())
                            .sum::<f64>()
                    })
                    .sum();
                let inner = total / dim as f64 - self.weierstrass_f0;
                10.0 * inner.powi(3) + 10.0 / dim as f64 * f_pen(x)
            }
            Family::Gallagher => {
                let peaks = self.peaks.as_ref().expect("gallagher instance without peaks");
                let mut diff = vec![0.0; dim];
                let mut rotated = vec![0.0; dim];
                let mut best: f64 = 0.0;
                for ((loc, &w), scale) in peaks.locations.iter().zip(&peaks.weights).zip(&peaks.scales) {
                    for ((d, a), b) in diff.iter_mut().zip(x).zip(loc) {
                        *d = a - b;
                    }
                    self.rotation_r.apply_into(&diff, &mut rotated);
                    let quad = weighted_squares(scale, &rotated);
                    best = best.max(w * (-quad / (2.0 * dim as f64)).exp());
                }
                let t = tosz_scalar(10.0 - best);
                t * t + f_pen(x)
            }
        }
    }

    /// Smallest value over `n` uniform samples in `[-5, 5]^D`.
    pub fn sampled_minimum(&self, n: usize) -> f64 {
        let mut stream =
            InstanceStream::for_instance(self.id.function_id, self.id.instance_id, TAG_SANITY);
        let mut x = vec![0.0; self.dimension()];
        let mut lowest = f64::INFINITY;
        for _ in 0..n {
            x.iter_mut().for_each(|v| *v = stream.uniform_in(-5.0, 5.0));
            lowest = lowest.min(self.value_unchecked(&x));
        }
        lowest
    }
}

fn weighted_squares(weights: &[f64], z: &[f64]) -> f64 {
    weights.iter().zip(z).map(|(w, v)| w * v * v).sum()
}

impl Objective for ProblemInstance {
    fn dimension(&self) -> usize {
        self.id.dimension
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value_unchecked(x)
    }
}
