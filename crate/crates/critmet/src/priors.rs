//! Prior distributions over the unknown parameter and the shared
//! discretization grid used by every inference step.
//!
//! The prior family is a near-flat density with smooth edges,
//!
//! ```text
//! p0(x) = (exp[a sin^2(pi (x - lo)/(hi - lo))] - 1)
//!         / ((hi - lo) (e^{a/2} I0(a/2) - 1))
//! ```
//!
//! where `I0` is the order-zero modified Bessel function of the first kind.
//! Strongly negative `a` approaches a box distribution whose density still
//! vanishes smoothly at both ends of the support.

use rand::Rng;

use crate::error::{Error, Result};

/// Smooth-edged near-flat prior on `[lambda_min, lambda_max]`.
#[derive(Clone, Copy, Debug)]
pub struct BesselPrior {
    pub alpha: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl BesselPrior {
    pub fn new(alpha: f64, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::Config(format!("prior alpha must be finite and nonzero, got {alpha}")));
        }
        if !(lambda_min.is_finite() && lambda_max.is_finite()) || lambda_min >= lambda_max {
            return Err(Error::Config(format!(
                "prior support must satisfy lambda_min < lambda_max, got [{lambda_min}, {lambda_max}]"
            )));
        }
        Ok(Self { alpha, lambda_min, lambda_max })
    }

    pub fn width(&self) -> f64 {
        self.lambda_max - self.lambda_min
    }
}

/// Order-zero modified Bessel function of the first kind.
///
/// Power series for |x| <= 30, asymptotic expansion beyond; relative error
/// below 1e-10 on both branches.
pub fn i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_CUTOFF {
        i0_series(ax)
    } else {
        i0_scaled_asymptotic(ax) * ax.exp()
    }
}

/// Exponentially scaled variant `e^{-|x|} I0(x)`; safe for large arguments.
pub fn i0_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_CUTOFF {
        i0_series(ax) * (-ax).exp()
    } else {
        i0_scaled_asymptotic(ax)
    }
}

const SERIES_CUTOFF: f64 = 30.0;

fn i0_series(ax: f64) -> f64 {
    let t = 0.25 * ax * ax;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut j = 1.0f64;
    loop {
        term *= t / (j * j);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        j += 1.0;
    }
}

fn i0_scaled_asymptotic(ax: f64) -> f64 {
    // Divergent series; the first ~12 terms are far below 1e-10 relative
    // for ax > 30.
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 1..=12u32 {
        let tj = (2 * j - 1) as f64;
        term *= tj * tj / (8.0 * j as f64 * ax);
        sum += term;
    }
    sum / (2.0 * std::f64::consts::PI * ax).sqrt()
}

/// `e^{alpha/2} I0(alpha/2)` without overflow for strongly negative alpha.
fn normalizer_bessel_part(alpha: f64) -> f64 {
    let x = 0.5 * alpha;
    if x <= -SERIES_CUTOFF {
        i0_scaled(x)
    } else if x >= SERIES_CUTOFF {
        i0_scaled(x) * (2.0 * x).exp()
    } else {
        x.exp() * i0(x)
    }
}

/// Prior density at `lambda`; exactly zero outside the support.
pub fn bessel_prior_pdf(lambda: f64, prior: &BesselPrior) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("prior density queried at non-finite value {lambda}")));
    }
    if lambda < prior.lambda_min || lambda > prior.lambda_max {
        return Ok(0.0);
    }
    let width = prior.width();
    let u = (lambda - prior.lambda_min) / width;
    let s = (std::f64::consts::PI * u).sin();
    let num = (prior.alpha * s * s).exp_m1();
    let den = width * (normalizer_bessel_part(prior.alpha) - 1.0);
    Ok(num / den)
}

/// Uniform midpoint discretization of a distribution over the parameter.
///
/// Cell centers at `lambda_min + (i + 1/2) step`; `weights` are densities,
/// normalized so that `sum(weights) * step == 1`.
#[derive(Clone, Debug)]
pub struct ParameterGrid {
    lambda_min: f64,
    lambda_max: f64,
    step: f64,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ParameterGrid {
    /// Builds a midpoint grid from raw nonnegative densities and normalizes.
    pub fn from_weights(lambda_min: f64, lambda_max: f64, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("grid needs at least one cell".into()));
        }
        if !(lambda_min.is_finite() && lambda_max.is_finite()) || lambda_min >= lambda_max {
            return Err(Error::Input(format!("bad grid range [{lambda_min}, {lambda_max}]")));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Input("grid weights must be finite and nonnegative".into()));
        }
        let n = weights.len();
        let step = (lambda_max - lambda_min) / n as f64;
        let points = (0..n).map(|i| lambda_min + (i as f64 + 0.5) * step).collect();
        let mut grid = Self { lambda_min, lambda_max, step, points, weights };
        grid.normalize()?;
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Probability mass of cell `i`.
    pub fn mass(&self, i: usize) -> f64 {
        self.weights[i] * self.step
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum::<f64>() * self.step
    }

    pub fn is_normalized(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= 1e-9
    }

    /// Rescales the weights so the total mass is one.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.total_mass();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Numerical(format!("grid cannot be normalized, total mass {total}")));
        }
        for w in &mut self.weights {
            *w /= total;
        }
        Ok(())
    }
}

/// Discretizes a prior onto `n_points` uniform cells.
pub fn grid_from_prior(prior: &BesselPrior, n_points: usize) -> Result<ParameterGrid> {
    if n_points < 16 {
        return Err(Error::Config(format!("grid needs at least 16 points, got {n_points}")));
    }
    let step = prior.width() / n_points as f64;
    let weights = (0..n_points)
        .map(|i| bessel_prior_pdf(prior.lambda_min + (i as f64 + 0.5) * step, prior))
        .collect::<Result<Vec<_>>>()?;
    ParameterGrid::from_weights(prior.lambda_min, prior.lambda_max, weights)
}

/// Inverse-CDF draw from a normalized grid with uniform jitter inside the
/// selected cell, so the sample never sits exactly on a grid node.
pub fn sample_parameter<R: Rng + ?Sized>(grid: &ParameterGrid, rng: &mut R) -> Result<f64> {
    if !grid.is_normalized() {
        return Err(Error::State(format!(
            "sampling requires a normalized grid, total mass {}",
            grid.total_mass()
        )));
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut cell = grid.len() - 1;
    for i in 0..grid.len() {
        acc += grid.mass(i);
        if u < acc {
            cell = i;
            break;
        }
    }
    let jitter: f64 = rng.random::<f64>() - 0.5;
    Ok(grid.points[cell] + jitter * grid.step)
}
