//! Brute-force exact-diagonalization reference for small chains.
//!
//! Builds the dense Hamiltonian `J sum_i sx_i sx_{i+1} + B sum_i sz_i`
//! (periodic) restricted to the even spin-flip parity sector, where the
//! analytic pair-mode ground state lives, and solves for the lowest
//! eigenpair with LAPACK. Ground truth for pmf, fidelity, and Fisher
//! information tests; never used by the production simulation path.

use std::ffi::c_char;

use crate::error::{Error, Result, ORACLE_MAX_SITES};
use crate::ising::MagnetizationPmf;

use openblas_src as _;

/// Full `2^N` ground-state vector (real amplitudes), `N <= 12`.
#[derive(Clone, Debug)]
pub struct DenseState {
    n_sites: usize,
    energy: f64,
    amplitudes: Vec<f64>,
}

impl DenseState {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }
}

/// Computational-basis convention: bit `i` clear means spin `i` up
/// (`sz = +1`), so a basis state with `p` set bits has magnetization
/// `x = N/2 - p`.
fn popcount(state: usize) -> usize {
    state.count_ones() as usize
}

/// Lowest eigenpair of the even-parity block of the dense Hamiltonian.
pub fn exact_ground_state(n_sites: usize, coupling: f64, total_field: f64) -> Result<DenseState> {
    if n_sites > ORACLE_MAX_SITES {
        return Err(Error::OracleSize(n_sites));
    }
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::Input(format!("oracle chain length must be even and >= 2, got {n_sites}")));
    }
    if !(coupling.is_finite() && total_field.is_finite()) {
        return Err(Error::Input("oracle parameters must be finite".into()));
    }
    let dim = 1usize << n_sites;
    let sector: Vec<usize> = (0..dim).filter(|s| popcount(*s) % 2 == 0).collect();
    let mut position = vec![usize::MAX; dim];
    for (i, &s) in sector.iter().enumerate() {
        position[s] = i;
    }
    let n = sector.len();
    let mut matrix = vec![0.0f64; n * n];
    for (col, &s) in sector.iter().enumerate() {
        let p = popcount(s) as f64;
        matrix[col * n + col] = total_field * (n_sites as f64 - 2.0 * p);
        for site in 0..n_sites {
            let next = (site + 1) % n_sites;
            let flipped = s ^ ((1 << site) | (1 << next));
            let row = position[flipped];
            matrix[col * n + row] += coupling;
        }
    }
    let (energy, sector_vec) = lowest_eigenpair(&mut matrix, n)?;
    let mut amplitudes = vec![0.0; dim];
    for (i, &s) in sector.iter().enumerate() {
        amplitudes[s] = sector_vec[i];
    }
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    Ok(DenseState { n_sites, energy, amplitudes })
}

/// Magnetization distribution of an exact state, resolved over the full
/// outcome ladder `x = N/2 - p` for popcount `p = 0..=N`.
#[derive(Clone, Debug)]
pub struct ExactMagnetizationPmf {
    n_sites: usize,
    probs_by_popcount: Vec<f64>,
}

impl ExactMagnetizationPmf {
    pub fn probs_by_popcount(&self) -> &[f64] {
        &self.probs_by_popcount
    }

    pub fn outcome_value(&self, p: usize) -> f64 {
        (self.n_sites as f64) / 2.0 - p as f64
    }

    /// Restriction to even popcounts, as a pair-excitation pmf comparable
    /// with the analytic magnetization law.
    pub fn pair_pmf(&self) -> MagnetizationPmf {
        let probs = self.probs_by_popcount.iter().copied().step_by(2).collect();
        MagnetizationPmf::from_excitation_probs(self.n_sites, probs)
    }
}

/// Sums squared amplitudes over each magnetization eigenspace.
pub fn exact_magnetization_pmf(state: &DenseState) -> ExactMagnetizationPmf {
    let mut probs = vec![0.0; state.n_sites + 1];
    for (s, amp) in state.amplitudes.iter().enumerate() {
        probs[popcount(s)] += amp * amp;
    }
    ExactMagnetizationPmf { n_sites: state.n_sites, probs_by_popcount: probs }
}

/// Absolute overlap of two exact states.
pub fn exact_fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n_sites != b.n_sites {
        return Err(Error::Input(format!(
            "fidelity between states of different sizes ({} vs {})",
            a.n_sites, b.n_sites
        )));
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x * y).sum::<f64>().abs())
}

/// LAPACK dsyevr, lowest eigenpair only. `matrix` is a full symmetric
/// `n x n` block, destroyed in place.
fn lowest_eigenpair(matrix: &mut [f64], n: usize) -> Result<(f64, Vec<f64>)> {
    assert_eq!(matrix.len(), n * n);
    let ni = n as i32;
    let jobz = b'V' as c_char;
    let range = b'I' as c_char;
    let uplo = b'L' as c_char;
    let (vl, vu) = (0.0f64, 0.0f64);
    let (il, iu) = (1i32, 1i32);
    let abstol = 0.0f64;
    let mut found = 0i32;
    let mut w = vec![0.0f64; n];
    let mut z = vec![0.0f64; n];
    let mut isuppz = vec![0i32; 2];
    let mut info = 0i32;
    let mut wkopt = 0.0f64;
    let mut iwkopt = 0i32;
    let query = -1i32;
    unsafe {
        lapack_sys::dsyevr_(
            &jobz, &range, &uplo, &ni, matrix.as_mut_ptr(), &ni, &vl, &vu, &il, &iu, &abstol,
            &mut found, w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(), &mut wkopt,
            &query, &mut iwkopt, &query, &mut info,
        );
        if info != 0 {
            return Err(Error::Numerical(format!("dsyevr workspace query failed, info {info}")));
        }
        let lwork = wkopt as i32;
        let liwork = iwkopt;
        let mut work = vec![0.0f64; lwork as usize];
        let mut iwork = vec![0i32; liwork as usize];
        lapack_sys::dsyevr_(
            &jobz, &range, &uplo, &ni, matrix.as_mut_ptr(), &ni, &vl, &vu, &il, &iu, &abstol,
            &mut found, w.as_mut_ptr(), z.as_mut_ptr(), &ni, isuppz.as_mut_ptr(),
            work.as_mut_ptr(), &lwork, iwork.as_mut_ptr(), &liwork, &mut info,
        );
        if info != 0 {
            return Err(Error::Numerical(format!("dsyevr failed, info {info}")));
        }
    }
    if found < 1 {
        return Err(Error::Numerical("dsyevr returned no eigenpair".into()));
    }
    Ok((w[0], z))
}

/// Applies the full dense Hamiltonian to a `2^N` amplitude vector.
#[allow(dead_code)]
pub(crate) fn apply_hamiltonian(
    n_sites: usize,
    coupling: f64,
    total_field: f64,
    amplitudes: &[f64],
) -> Vec<f64> {
    let dim = 1usize << n_sites;
    assert_eq!(amplitudes.len(), dim);
    let mut out = vec![0.0; dim];
    for (s, &amp) in amplitudes.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        let p = popcount(s) as f64;
        out[s] += total_field * (n_sites as f64 - 2.0 * p) * amp;
        for site in 0..n_sites {
            let next = (site + 1) % n_sites;
            let flipped = s ^ ((1 << site) | (1 << next));
            out[flipped] += coupling * amp;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{bogoliubov_angles, fidelity, magnetization_pmf, IsingModel};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_oversized_chains() {
        assert!(matches!(exact_ground_state(14, 1.0, 1.0), Err(Error::OracleSize(14))));
        assert!(exact_ground_state(5, 1.0, 1.0).is_err());
    }

    #[test]
    fn two_site_chain_matches_the_closed_form() {
        // Even sector spans {|00>, |11>} with H = [[2B, 2J], [2J, -2B]]
        // (the periodic loop doubles the single bond), so
        // E0 = -2 sqrt(B^2 + J^2).
        let (j, b) = (1.0, 0.7);
        let state = exact_ground_state(2, j, b).unwrap();
        let want_energy = -2.0 * (b * b + j * j).sqrt();
        assert_relative_eq!(state.energy(), want_energy, max_relative = 1e-12);
        let t = (want_energy - 2.0 * b) / (2.0 * j);
        let norm = (1.0 + t * t).sqrt();
        assert_relative_eq!(state.amplitudes()[0].abs(), (1.0 / norm).abs(), epsilon = 1e-10);
        assert_relative_eq!(state.amplitudes()[3].abs(), (t / norm).abs(), epsilon = 1e-10);
        assert_eq!(state.amplitudes()[1], 0.0);
        assert_eq!(state.amplitudes()[2], 0.0);
    }

    #[test]
    fn ground_energy_is_a_lower_bound_for_sector_ritz_values() {
        let (n, j, b) = (8usize, 1.0, 0.8);
        let state = exact_ground_state(n, j, b).unwrap();
        let dim = 1usize << n;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut v = vec![0.0f64; dim];
            for (s, slot) in v.iter_mut().enumerate() {
                if s.count_ones() % 2 == 0 {
                    *slot = rng.random::<f64>() - 0.5;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let hv = apply_hamiltonian(n, j, b, &v);
            let ritz = v.iter().zip(&hv).map(|(x, y)| x * y).sum::<f64>() / (norm * norm);
            assert!(ritz >= state.energy() - 1e-10);
        }
    }

    #[test]
    fn eigenpair_residual_is_tiny() {
        let (n, j, b) = (10usize, 1.0, 1.05);
        let state = exact_ground_state(n, j, b).unwrap();
        let hv = apply_hamiltonian(n, j, b, state.amplitudes());
        let residual: f64 = hv
            .iter()
            .zip(state.amplitudes())
            .map(|(h, a)| (h - state.energy() * a).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(residual < 1e-10, "residual {residual}");
    }

    #[test]
    fn basis_states_give_the_expected_magnetization_laws() {
        let n = 6;
        let mut amplitudes = vec![0.0; 1 << n];
        amplitudes[0] = 1.0;
        let state = DenseState { n_sites: n, energy: 0.0, amplitudes };
        let pmf = exact_magnetization_pmf(&state);
        assert_eq!(pmf.probs_by_popcount()[0], 1.0);
        assert_eq!(pmf.outcome_value(0), 3.0);

        let dim = 1usize << n;
        let uniform = DenseState {
            n_sites: n,
            energy: 0.0,
            amplitudes: vec![(dim as f64).sqrt().recip(); dim],
        };
        let pmf = exact_magnetization_pmf(&uniform);
        for p in 0..=n {
            let binom = binomial(n, p) / dim as f64;
            assert_relative_eq!(pmf.probs_by_popcount()[p], binom, epsilon = 1e-12);
        }
    }

    #[test]
    fn self_overlap_is_one_and_orthogonal_states_vanish() {
        let state = exact_ground_state(6, 1.0, 0.9).unwrap();
        assert_relative_eq!(exact_fidelity(&state, &state).unwrap(), 1.0, epsilon = 1e-12);
        let mut a = vec![0.0; 16];
        let mut b = vec![0.0; 16];
        a[0] = 1.0;
        b[3] = 1.0;
        let sa = DenseState { n_sites: 4, energy: 0.0, amplitudes: a };
        let sb = DenseState { n_sites: 4, energy: 0.0, amplitudes: b };
        assert_eq!(exact_fidelity(&sa, &sb).unwrap(), 0.0);
    }

    #[test]
    fn analytic_pmf_matches_the_oracle_at_eight_sites() {
        let model = IsingModel::new(8, 1.0).unwrap();
        for field in [0.3, 0.5, 1.0, 1.3] {
            let exact = exact_magnetization_pmf(&exact_ground_state(8, 1.0, field).unwrap());
            let analytic = magnetization_pmf(&bogoliubov_angles(&model, field));
            let pair = exact.pair_pmf();
            for m in 0..analytic.probs().len() {
                assert!(
                    (analytic.probs()[m] - pair.probs()[m]).abs() < 1e-10,
                    "B={field} m={m}: {} vs {}",
                    analytic.probs()[m],
                    pair.probs()[m]
                );
            }
        }
    }

    #[test]
    fn analytic_fidelity_matches_the_oracle_at_ten_sites() {
        let model = IsingModel::new(10, 1.0).unwrap();
        let a = exact_ground_state(10, 1.0, 0.4).unwrap();
        let b = exact_ground_state(10, 1.0, 0.6).unwrap();
        let exact = exact_fidelity(&a, &b).unwrap();
        let analytic = fidelity(&model, 0.4, 0.6);
        assert!((exact - analytic).abs() < 1e-9, "{exact} vs {analytic}");
    }

    fn binomial(n: usize, k: usize) -> f64 {
        let mut acc = 1.0;
        for i in 0..k {
            acc *= (n - i) as f64 / (i + 1) as f64;
        }
        acc
    }
}
