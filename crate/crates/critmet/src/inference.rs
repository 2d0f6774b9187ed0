//! Grid Bayesian engine: posterior updates, estimators, expected mean
//! square distance, the prior Fisher functional, and the Van Trees /
//! fixed-setting bound calculators.
//!
//! All integrals are midpoint sums on the uniform parameter grid.

use crate::error::{Error, Result};
use crate::priors::ParameterGrid;

/// A posterior shares the grid layout; its weights are the current density.
pub type PosteriorGrid = ParameterGrid;

/// Multiplies the posterior by likelihood values evaluated on the grid and
/// renormalizes by the evidence (returned on success).
///
/// When every product underflows to zero the update retries in log space;
/// if the outcome is impossible on the whole grid the update is degenerate
/// and the caller must abandon the trajectory.
pub fn bayes_update_slice(posterior: &mut PosteriorGrid, likelihood: &[f64]) -> Result<f64> {
    if likelihood.len() != posterior.len() {
        return Err(Error::Input(format!(
            "likelihood has {} entries for a grid of {}",
            likelihood.len(),
            posterior.len()
        )));
    }
    if likelihood.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::Input("likelihood values must be finite and nonnegative".into()));
    }
    let step = posterior.step();
    let evidence: f64 =
        posterior.weights().iter().zip(likelihood).map(|(w, l)| w * l).sum::<f64>() * step;
    if evidence.is_finite() && evidence > 0.0 {
        let weights = posterior.weights_mut();
        for (w, l) in weights.iter_mut().zip(likelihood) {
            *w = *w * l / evidence;
        }
        return Ok(evidence);
    }
    // Log-space fallback for pairwise underflow.
    let logs: Vec<f64> = posterior
        .weights()
        .iter()
        .zip(likelihood)
        .map(|(w, l)| w.ln() + l.ln())
        .collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::DegenerateUpdate);
    }
    let weights = posterior.weights_mut();
    for (w, lg) in weights.iter_mut().zip(&logs) {
        *w = (lg - peak).exp();
    }
    posterior.normalize()?;
    Ok(evidence)
}

/// [`bayes_update_slice`] with the likelihood given as a function of the
/// parameter.
pub fn bayes_update<F: Fn(f64) -> f64>(posterior: &mut PosteriorGrid, likelihood: F) -> Result<f64> {
    let values: Vec<f64> = posterior.points().iter().map(|&x| likelihood(x)).collect();
    bayes_update_slice(posterior, &values)
}

/// Posterior-mean estimator.
pub fn posterior_mean(posterior: &PosteriorGrid) -> f64 {
    posterior.points().iter().zip(posterior.weights()).map(|(x, w)| x * w).sum::<f64>()
        * posterior.step()
}

pub fn posterior_variance(posterior: &PosteriorGrid) -> f64 {
    let mean = posterior_mean(posterior);
    posterior
        .points()
        .iter()
        .zip(posterior.weights())
        .map(|(x, w)| (x - mean) * (x - mean) * w)
        .sum::<f64>()
        * posterior.step()
}

pub fn posterior_std(posterior: &PosteriorGrid) -> f64 {
    posterior_variance(posterior).sqrt()
}

/// Fisher information of the prior alone:
/// `F0 = integral of p0 (d/dx log p0)^2`.
///
/// Central differences on the grid; cells below `1e-12 max(p0)` are
/// excluded, where the smooth-edged priors contribute nothing.
pub fn prior_fisher(grid: &ParameterGrid) -> f64 {
    let w = grid.weights();
    let n = w.len();
    if n < 3 {
        return 0.0;
    }
    let peak = w.iter().copied().fold(0.0f64, f64::max);
    let floor = 1e-12 * peak;
    let step = grid.step();
    let mut total = 0.0;
    for i in 1..n - 1 {
        if w[i] < floor {
            continue;
        }
        let d = (w[i + 1] - w[i - 1]) / (2.0 * step);
        total += d * d / w[i];
    }
    total * step
}

/// Expected mean square distance of an ensemble with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct EmsdEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of the Bayesian risk from per-trajectory squared
/// estimator errors `(estimate - true)^2`.
///
/// This is the direct Monte Carlo form of the risk integral: the trajectory
/// supplies one posterior draw (the true parameter) per outcome record.
pub fn emsd_from_square_errors(square_errors: &[f64]) -> Result<EmsdEstimate> {
    if square_errors.is_empty() {
        return Err(Error::Input("EMSD of an empty ensemble".into()));
    }
    let n = square_errors.len() as f64;
    let value = square_errors.iter().sum::<f64>() / n;
    let std_error = if square_errors.len() > 1 {
        let var =
            square_errors.iter().map(|e| (e - value) * (e - value)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(EmsdEstimate { value, std_error })
}

/// EMSD over `(true parameter, final posterior)` pairs with the
/// posterior-mean estimator.
pub fn emsd(ensemble: &[(f64, &PosteriorGrid)]) -> Result<EmsdEstimate> {
    let errors: Vec<f64> = ensemble
        .iter()
        .map(|(truth, posterior)| {
            let e = posterior_mean(posterior) - truth;
            e * e
        })
        .collect();
    emsd_from_square_errors(&errors)
}

/// Right-hand side of the Van Trees inequality `EMSD^{-1} <= F0 + Gamma`.
pub fn van_trees_rhs(f0: f64, gamma: f64) -> f64 {
    f0 + gamma
}

/// Information bound for a fixed setting: `m` times the prior expectation
/// of the Fisher information at that setting.
pub fn gamma_nonadaptive<F: Fn(f64) -> f64>(
    prior: &ParameterGrid,
    fisher_fn: F,
    m: usize,
) -> Result<f64> {
    if m < 1 {
        return Err(Error::Input("gamma bound needs at least one measurement".into()));
    }
    let quad: f64 = prior
        .points()
        .iter()
        .zip(prior.weights())
        .map(|(x, w)| w * fisher_fn(*x))
        .sum::<f64>()
        * prior.step();
    Ok(m as f64 * quad)
}

/// Fitted constants of the finite-size Fisher scaling laws.
///
/// `alpha_c` scales the critical peak `F ~ alpha_c N^{2/(d nu)}`,
/// `alpha_nc` bounds the per-site Fisher information away from the peak,
/// and `c` fixes the critical window half-width `Delta_c = c N^{-1/(d nu)}`.
#[derive(Clone, Copy, Debug)]
pub struct BoundConstants {
    pub alpha_c: f64,
    pub alpha_nc: f64,
    pub c: f64,
    pub d: u32,
    pub nu: f64,
}

/// Shot-noise-limited ceiling on the inverse EMSD of fixed-setting
/// strategies:
/// `F0 + m N (alpha_nc + c alpha_c p0(crit) N^{(1 - d nu)/(d nu)})`.
pub fn non_adaptive_bound(
    f0: f64,
    m: usize,
    n_sites: usize,
    p0_at_critical: f64,
    constants: &BoundConstants,
) -> f64 {
    let dnu = constants.d as f64 * constants.nu;
    let n = n_sites as f64;
    f0 + m as f64
        * n
        * (constants.alpha_nc
            + constants.c * constants.alpha_c * p0_at_critical * n.powf((1.0 - dnu) / dnu))
}

/// One Fisher-information sample on the `(parameter, size)` plane.
#[derive(Clone, Copy, Debug)]
pub struct FisherSample {
    pub lambda: f64,
    pub n_sites: usize,
    pub fisher: f64,
}

/// Fits [`BoundConstants`] from Fisher samples taken at several sizes,
/// inside and outside the critical region.
///
/// Per size: the peak fixes `alpha_c = peak / N^{2/(d nu)}` (geometric mean
/// across sizes) and the half-width at half-maximum fixes
/// `c = HWHM * N^{1/(d nu)}` (mean); `alpha_nc` is the largest per-site
/// value observed outside the fitted window.
pub fn fit_bound_constants(samples: &[FisherSample], d: u32, nu: f64) -> Result<BoundConstants> {
    if !(nu > 0.0) || d == 0 {
        return Err(Error::Input("scaling dimensions must be positive".into()));
    }
    let dnu = d as f64 * nu;
    let mut sizes: Vec<usize> = samples.iter().map(|s| s.n_sites).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 {
        return Err(Error::Input(format!(
            "bound fit needs samples at >= 3 sizes, got {}",
            sizes.len()
        )));
    }
    let mut log_alpha_sum = 0.0;
    let mut c_sum = 0.0;
    let mut peak_positions = Vec::new();
    for &n in &sizes {
        let mut rows: Vec<(f64, f64)> = samples
            .iter()
            .filter(|s| s.n_sites == n)
            .map(|s| (s.lambda, s.fisher))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (peak_pos, peak_val) = rows
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("size present in samples");
        if !(peak_val > 0.0) {
            return Err(Error::Input(format!("no positive Fisher values at N = {n}")));
        }
        log_alpha_sum += (peak_val / (n as f64).powf(2.0 / dnu)).ln();
        c_sum += half_width_at_half_maximum(&rows, peak_pos, peak_val) * (n as f64).powf(1.0 / dnu);
        peak_positions.push((n, peak_pos));
    }
    let alpha_c = (log_alpha_sum / sizes.len() as f64).exp();
    let c = c_sum / sizes.len() as f64;
    let mut alpha_nc = 0.0f64;
    let mut seen_noncritical = false;
    for s in samples {
        let (_, peak_pos) = *peak_positions.iter().find(|(n, _)| *n == s.n_sites).unwrap();
        let window = c * (s.n_sites as f64).powf(-1.0 / dnu);
        if (s.lambda - peak_pos).abs() > window {
            seen_noncritical = true;
            alpha_nc = alpha_nc.max(s.fisher / s.n_sites as f64);
        }
    }
    if !seen_noncritical {
        return Err(Error::Input("no samples outside the critical window".into()));
    }
    Ok(BoundConstants { alpha_c, alpha_nc, c, d, nu })
}

/// Half-width at half-maximum by linear interpolation on the sampled curve;
/// falls back to the sample spacing when the peak is unresolved.
fn half_width_at_half_maximum(rows: &[(f64, f64)], peak_pos: f64, peak_val: f64) -> f64 {
    let half = 0.5 * peak_val;
    let mut left = None;
    let mut right = None;
    for pair in rows.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        if x1 <= peak_pos && y0 < half && y1 >= half {
            left = Some(x0 + (half - y0) / (y1 - y0) * (x1 - x0));
        }
        if x0 >= peak_pos && y0 >= half && y1 < half {
            right = Some(x0 + (half - y0) / (y1 - y0) * (x1 - x0));
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => 0.5 * (r - l),
        (Some(l), None) => peak_pos - l,
        (None, Some(r)) => r - peak_pos,
        (None, None) => {
            if rows.len() > 1 {
                rows[1].0 - rows[0].0
            } else {
                0.0
            }
        }
    }
}
