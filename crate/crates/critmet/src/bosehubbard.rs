//! Surrogate measurement channel for the square-lattice superfluid
//! stiffness: finite-size scaling form, Gaussian outcome model, Fisher
//! information of the hopping parameter, and the smoothed-derivative
//! estimator for tabulated scaling curves.
//!
//! The stiffness obeys `rho_s = N^{-1/2} g((t - t_c) N^nu)` with
//! `t_c = r U`; `g` is size-independent and monotone non-increasing.

pub mod savgol;

use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use crate::error::{Error, Result};
pub use savgol::savgol_derivative;

/// Default chemical potential; fixed metadata of the surrogate.
pub const CHEM_POTENTIAL: f64 = 0.5;

/// Zero-temperature critical hopping ratio `t_c / U`.
pub const CRITICAL_RATIO_T0: f64 = 0.06;
/// Finite-temperature pseudo-critical alternative.
pub const CRITICAL_RATIO_PSEUDO: f64 = 0.572;

/// Universal scaling curve, either parametric or tabulated.
#[derive(Clone, Debug)]
pub enum GCurve {
    /// `g(y) = amplitude / (1 + exp(y / width))`.
    Logistic { amplitude: f64, width: f64 },
    Tabulated(TabulatedCurve),
}

impl GCurve {
    pub fn value(&self, y: f64) -> f64 {
        match self {
            GCurve::Logistic { amplitude, width } => {
                amplitude / (1.0 + (y / width).clamp(-700.0, 700.0).exp())
            }
            GCurve::Tabulated(curve) => curve.value(y),
        }
    }

    pub fn derivative(&self, y: f64) -> Result<f64> {
        match self {
            GCurve::Logistic { amplitude, width } => {
                let e = (y / width).clamp(-700.0, 700.0).exp();
                Ok(-(amplitude / width) * e / ((1.0 + e) * (1.0 + e)))
            }
            GCurve::Tabulated(curve) => curve.derivative(y),
        }
    }
}

/// Scaling curve sampled at arbitrary (sorted) nodes.
///
/// Values interpolate linearly between the original nodes and clamp to the
/// endpoint values outside; the derivative comes from a Savitzky-Golay fit
/// on a uniform resampling and is only defined inside the tabulated range.
#[derive(Clone, Debug)]
pub struct TabulatedCurve {
    y: Vec<f64>,
    g: Vec<f64>,
    deriv_y0: f64,
    deriv_step: f64,
    deriv: Vec<f64>,
}

impl TabulatedCurve {
    /// Builds the curve from `(y, g)` samples. Monotonicity is enforced up
    /// to a small tolerance so mildly noisy sampled curves still ingest.
    pub fn from_points(mut points: Vec<(f64, f64)>, window: usize, order: usize) -> Result<Self> {
        if points.len() < window.max(4) {
            return Err(Error::Input(format!(
                "tabulated curve needs at least {} points, got {}",
                window.max(4),
                points.len()
            )));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut y = Vec::with_capacity(points.len());
        let mut g = Vec::with_capacity(points.len());
        for (yi, gi) in points {
            if !(yi.is_finite() && gi.is_finite()) {
                return Err(Error::Input("tabulated curve values must be finite".into()));
            }
            if let Some(&last) = y.last() {
                if (yi - last).abs() < 1e-12 {
                    let last_g: f64 = *g.last().unwrap();
                    if (gi - last_g).abs() > 1e-9 {
                        return Err(Error::Input(format!(
                            "conflicting curve values at y = {yi}: {last_g} vs {gi}"
                        )));
                    }
                    continue;
                }
            }
            y.push(yi);
            g.push(gi);
        }
        let span: f64 = g.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - g.iter().copied().fold(f64::INFINITY, f64::min);
        let slack = 0.02 * span.max(f64::MIN_POSITIVE);
        for pair in g.windows(2) {
            if pair[1] > pair[0] + slack {
                return Err(Error::Input(format!(
                    "scaling curve must be monotone non-increasing, found rise {} -> {}",
                    pair[0], pair[1]
                )));
            }
        }
        // Uniform resample for the derivative filter.
        let n_resample = (2 * y.len()).max(64);
        let y0 = y[0];
        let step = (y[y.len() - 1] - y0) / (n_resample - 1) as f64;
        let ys: Vec<f64> = (0..n_resample).map(|i| y0 + i as f64 * step).collect();
        let gs: Vec<f64> = ys.iter().map(|&v| linear_interp(&y, &g, v)).collect();
        let deriv = savgol_derivative(&ys, &gs, window, order)?;
        Ok(Self { y, g, deriv_y0: y0, deriv_step: step, deriv })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.y[0], self.y[self.y.len() - 1])
    }

    fn value(&self, y: f64) -> f64 {
        linear_interp(&self.y, &self.g, y)
    }

    fn derivative(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if y < lo || y > hi {
            return Err(Error::TabulatedRange { value: y, lo, hi });
        }
        let pos = (y - self.deriv_y0) / self.deriv_step;
        let i = (pos.floor() as usize).min(self.deriv.len() - 2);
        let f = pos - i as f64;
        Ok(self.deriv[i] * (1.0 - f) + self.deriv[i + 1] * f)
    }
}

/// Piecewise-linear interpolation clamped to the endpoint values.
fn linear_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => return ys[i],
        Err(i) => i - 1,
    };
    let f = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] * (1.0 - f) + ys[i + 1] * f
}

/// Surrogate stiffness channel for one lattice size.
#[derive(Clone, Debug)]
pub struct StiffnessModel {
    critical_ratio: f64,
    nu: f64,
    n_sites: usize,
    sigma0: f64,
    chem_potential: f64,
    g: GCurve,
}

impl StiffnessModel {
    pub fn new(critical_ratio: f64, nu: f64, n_sites: usize, sigma0: f64, g: GCurve) -> Result<Self> {
        if !(critical_ratio > 0.0 && critical_ratio.is_finite()) {
            return Err(Error::Config(format!("critical ratio must be positive, got {critical_ratio}")));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Config(format!("correlation-length exponent must be positive, got {nu}")));
        }
        if n_sites == 0 {
            return Err(Error::Config("lattice must have at least one site".into()));
        }
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::Config(format!("noise scale must be positive, got {sigma0}")));
        }
        if let GCurve::Logistic { amplitude, width } = g {
            if !(amplitude > 0.0 && width > 0.0) {
                return Err(Error::Config(
                    "logistic scaling curve needs positive amplitude and width".into(),
                ));
            }
        }
        Ok(Self { critical_ratio, nu, n_sites, sigma0, chem_potential: CHEM_POTENTIAL, g })
    }

    /// Ingests a stiffness table by collapsing every `(t/U, N, rho_s)` row
    /// onto the universal curve `g(y) = rho_s sqrt(N)` at
    /// `y = (t/U - r) N^nu` (unit repulsion).
    pub fn from_table(
        table: &StiffnessTable,
        critical_ratio: f64,
        nu: f64,
        n_sites: usize,
        sigma0: f64,
        window: usize,
        order: usize,
    ) -> Result<Self> {
        let points: Vec<(f64, f64)> = table
            .rows()
            .iter()
            .map(|row| {
                let y = (row.t_over_u - critical_ratio) * (row.n_sites as f64).powf(nu);
                (y, row.rho_s * (row.n_sites as f64).sqrt())
            })
            .collect();
        let curve = TabulatedCurve::from_points(points, window, order)?;
        Self::new(critical_ratio, nu, n_sites, sigma0, GCurve::Tabulated(curve))
    }

    pub fn critical_ratio(&self) -> f64 {
        self.critical_ratio
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn chem_potential(&self) -> f64 {
        self.chem_potential
    }

    pub fn g_curve(&self) -> &GCurve {
        &self.g
    }

    /// Scaled distance from criticality, `y = (t - r U) N^nu`.
    pub fn scaled_variable(&self, t: f64, repulsion: f64) -> f64 {
        (t - self.critical_ratio * repulsion) * (self.n_sites as f64).powf(self.nu)
    }
}

/// Raw simulation rows `(t/U, N, rho_s)` ingested from CSV.
#[derive(Clone, Debug)]
pub struct StiffnessTable {
    rows: Vec<StiffnessRow>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
pub struct StiffnessRow {
    #[serde(rename = "t_over_U")]
    pub t_over_u: f64,
    #[serde(rename = "N")]
    pub n_sites: usize,
    #[serde(rename = "rho_s")]
    pub rho_s: f64,
}

impl StiffnessTable {
    pub fn from_rows(rows: Vec<StiffnessRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("stiffness table has no rows".into()));
        }
        let mut keys: Vec<(u64, usize)> = Vec::with_capacity(rows.len());
        for row in &rows {
            if !(row.t_over_u.is_finite() && row.rho_s.is_finite()) {
                return Err(Error::Input("stiffness table values must be finite".into()));
            }
            if row.rho_s < 0.0 {
                return Err(Error::Input(format!("negative stiffness {}", row.rho_s)));
            }
            keys.push((row.t_over_u.to_bits(), row.n_sites));
        }
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("duplicate (t/U, N) key in stiffness table".into()));
        }
        Ok(Self { rows })
    }

    /// Reads the CSV schema `t_over_U,N,rho_s`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv_reader = csv::Reader::from_reader(reader);
        let rows = csv_reader.deserialize().collect::<std::result::Result<Vec<StiffnessRow>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn rows(&self) -> &[StiffnessRow] {
        &self.rows
    }
}

/// Superfluid density `N^{-1/2} g((t - r U) N^nu)`.
pub fn stiffness(model: &StiffnessModel, t: f64, repulsion: f64) -> Result<f64> {
    if !(repulsion > 0.0) {
        return Err(Error::Domain(format!("repulsion must be positive, got {repulsion}")));
    }
    let y = model.scaled_variable(t, repulsion);
    Ok((model.n_sites as f64).powf(-0.5) * model.g.value(y))
}

/// One Gaussian stiffness measurement: mean `rho_s`, variance `sigma0^2/N`.
pub fn sample_stiffness_measurement<R: Rng + ?Sized>(
    model: &StiffnessModel,
    t: f64,
    repulsion: f64,
    rng: &mut R,
) -> Result<f64> {
    let mean = stiffness(model, t, repulsion)?;
    let std = model.sigma0 / (model.n_sites as f64).sqrt();
    let normal = Normal::new(mean, std)
        .map_err(|e| Error::Numerical(format!("bad normal parameters: {e}")))?;
    Ok(normal.sample(rng))
}

/// Outcome density of the stiffness measurement.
pub fn measurement_likelihood(model: &StiffnessModel, x: f64, t: f64, repulsion: f64) -> Result<f64> {
    let mean = stiffness(model, t, repulsion)?;
    let n = model.n_sites as f64;
    let var = model.sigma0 * model.sigma0 / n;
    Ok((-0.5 * (x - mean) * (x - mean) / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
}

/// Fisher information for the hopping parameter,
/// `(N / sigma0^2) (d rho_s / d t)^2`.
pub fn fisher_hopping(model: &StiffnessModel, t: f64, repulsion: f64) -> Result<f64> {
    if !(repulsion > 0.0) {
        return Err(Error::Domain(format!("repulsion must be positive, got {repulsion}")));
    }
    let n = model.n_sites as f64;
    let y = model.scaled_variable(t, repulsion);
    let drho_dt = n.powf(model.nu - 0.5) * model.g.derivative(y)?;
    Ok(n / (model.sigma0 * model.sigma0) * drho_dt * drho_dt)
}

/// Repulsion that puts the believed hopping on the critical line:
/// `U = t / r`.
pub fn critical_control_bh(t_estimate: f64, model: &StiffnessModel) -> Result<f64> {
    if !(t_estimate > 0.0) {
        return Err(Error::Domain(format!("hopping estimate must be positive, got {t_estimate}")));
    }
    Ok(t_estimate / model.critical_ratio)
}
