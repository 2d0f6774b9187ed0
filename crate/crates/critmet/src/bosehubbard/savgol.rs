//! Savitzky-Golay smoothed numerical differentiation.
//!
//! Each output sample is the first-derivative coefficient of a local
//! least-squares polynomial fit over a sliding window; endpoints reuse the
//! nearest full window one-sidedly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// First derivative of uniformly sampled data by local polynomial fits.
///
/// `window` must be odd and larger than `order`; `x` must be uniformly
/// spaced.
pub fn savgol_derivative(x: &[f64], y: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::Input(format!("x and y lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Input("derivative filter needs at least two samples".into()));
    }
    if window % 2 == 0 || window <= order {
        return Err(Error::Input(format!(
            "window must be odd and larger than the polynomial order, got window {window}, order {order}"
        )));
    }
    if window > x.len() {
        return Err(Error::Input(format!(
            "window {window} exceeds the {} available samples",
            x.len()
        )));
    }
    let step = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Input("x samples must be increasing".into()));
    }
    for i in 1..x.len() {
        if ((x[i] - x[i - 1]) - step).abs() > 1e-9 * step.abs() {
            return Err(Error::Input(format!(
                "non-uniform spacing at index {i}: {} vs expected {step}",
                x[i] - x[i - 1]
            )));
        }
    }

    let half = window / 2;
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let start = i.saturating_sub(half).min(n - window);
        out[i] = window_derivative(&x[start..start + window], &y[start..start + window], x[i], order);
    }
    Ok(out)
}

/// Least-squares polynomial fit over one window, evaluated as a first
/// derivative at `center`.
fn window_derivative(xs: &[f64], ys: &[f64], center: f64, order: usize) -> f64 {
    let rows = xs.len();
    let cols = order + 1;
    let mut design = DMatrix::zeros(rows, cols);
    for (r, &xv) in xs.iter().enumerate() {
        let t = xv - center;
        let mut p = 1.0;
        for c in 0..cols {
            design[(r, c)] = p;
            p *= t;
        }
    }
    let rhs = DVector::from_column_slice(ys);
    let coeffs = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .expect("small least-squares solve cannot fail");
    coeffs[1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform_x(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn linear_data_is_differentiated_exactly() {
        let x = uniform_x(41, -1.0, 3.0);
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t + 1.0).collect();
        let d = savgol_derivative(&x, &y, 7, 2).unwrap();
        for v in d {
            assert_relative_eq!(v, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cubic_data_is_exact_for_order_three() {
        let x = uniform_x(51, 0.0, 2.0);
        let y: Vec<f64> = x.iter().map(|t| t * t * t).collect();
        let d = savgol_derivative(&x, &y, 9, 3).unwrap();
        for (i, (&xi, &di)) in x.iter().zip(&d).enumerate() {
            let tol = if (4..x.len() - 4).contains(&i) { 1e-11 } else { 1e-9 };
            assert_relative_eq!(di, 3.0 * xi * xi, epsilon = tol);
        }
    }

    #[test]
    fn noisy_sine_stays_within_the_propagated_noise_bound() {
        let n = 201;
        let x = uniform_x(n, 0.0, 2.0 * std::f64::consts::PI);
        let sigma = 0.01;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let y: Vec<f64> = x
            .iter()
            .map(|t| t.sin() + sigma * gaussian(&mut rng))
            .collect();
        let clean: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let (window, order) = (11usize, 3usize);
        let d = savgol_derivative(&x, &y, window, order).unwrap();

        // Independent oracle: per-window normal equations solved by
        // hand-rolled Gaussian elimination give both the smoothing bias on
        // noiseless data and the noise-propagation coefficients.
        let half = window / 2;
        for i in 0..n {
            let start = i.saturating_sub(half).min(n - window);
            let coeffs = oracle_derivative_coefficients(&x[start..start + window], x[i], order);
            let bias: f64 = coeffs
                .iter()
                .zip(&clean[start..start + window])
                .map(|(c, y)| c * y)
                .sum::<f64>()
                - x[i].cos();
            let noise_std = sigma * coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            let bound = bias.abs() + 5.0 * noise_std;
            let err = (d[i] - x[i].cos()).abs();
            assert!(err <= bound, "index {i}: error {err} above bound {bound}");
        }
    }

    #[test]
    fn parameter_validation() {
        let x = uniform_x(21, 0.0, 1.0);
        let y = x.clone();
        assert!(savgol_derivative(&x, &y, 8, 3).is_err()); // even window
        assert!(savgol_derivative(&x, &y, 3, 3).is_err()); // window <= order
        assert!(savgol_derivative(&x, &y, 23, 3).is_err()); // window too large
        let mut bad = x.clone();
        bad[10] += 0.01;
        assert!(savgol_derivative(&bad, &y, 7, 3).is_err()); // non-uniform
    }

    /// Derivative-at-center weights from explicit normal equations,
    /// independent of the production SVD path.
    fn oracle_derivative_coefficients(xs: &[f64], center: f64, order: usize) -> Vec<f64> {
        let cols = order + 1;
        let rows = xs.len();
        // Normal matrix M = A^T A and its inverse row for the slope.
        let mut a = vec![vec![0.0; cols]; rows];
        for (r, &xv) in xs.iter().enumerate() {
            let t = xv - center;
            let mut p = 1.0;
            for c in 0..cols {
                a[r][c] = p;
                p *= t;
            }
        }
        let mut m = vec![vec![0.0; cols]; cols];
        for i in 0..cols {
            for j in 0..cols {
                m[i][j] = (0..rows).map(|r| a[r][i] * a[r][j]).sum();
            }
        }
        let minv = invert(&mut m);
        // coefficient for sample r in the slope estimate: (M^{-1} A^T)[1][r]
        (0..rows).map(|r| (0..cols).map(|c| minv[1][c] * a[r][c]).sum()).collect()
    }

    fn invert(m: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
        let n = m.len();
        let mut inv: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
                .unwrap();
            m.swap(col, pivot);
            inv.swap(col, pivot);
            let p = m[col][col];
            for j in 0..n {
                m[col][j] /= p;
                inv[col][j] /= p;
            }
            for r in 0..n {
                if r != col {
                    let f = m[r][col];
                    for j in 0..n {
                        m[r][j] -= f * m[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
        inv
    }

    fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    proptest! {
        #[test]
        fn any_line_is_reproduced(slope in -5.0f64..5.0, intercept in -5.0f64..5.0) {
            let x = uniform_x(31, 0.0, 1.0);
            let y: Vec<f64> = x.iter().map(|t| slope * t + intercept).collect();
            let d = savgol_derivative(&x, &y, 5, 1).unwrap();
            for v in d {
                prop_assert!((v - slope).abs() < 1e-10);
            }
        }
    }
}
