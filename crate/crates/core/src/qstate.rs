//! Entanglement of superpositions `|psi> = sum_k alpha_k |N,k>_q`.
//!
//! Substituting the Schmidt decomposition of each `|N,k>_q` gives
//!
//! ```text
//! |psi> = sum_{l, m} alpha_{l+m} sqrt(p_{N,l+m,L,l}) |L,l> (x) |N-L,m>
//! ```
//!
//! with orthonormal `|L,l>` and `|N-L,m>`. Writing that coefficient array as
//! `B[l][m]`, the reduced density matrix is `rho_L = B B^T`, whose entry
//! `(l, l')` is `sum_k alpha_k alpha_{k-l+l'} sqrt(p_{k,l} p_{k-l+l',l'})`:
//! each square root comes from its own `k`-sector.

use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::linalg::{symmetric_eigenvalues, SymmetricMatrix};
use crate::qmath::QParams;
use crate::schmidt::{shannon_bits, Bipartition, SchmidtKernel};

/// Tolerance on `sum alpha_k^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Negative eigenvalues of `rho_L` down to this size are treated as round-off.
pub const CLAMP_TOLERANCE: f64 = 1e-10;
/// More negative than this means `rho_L` was built wrong.
pub const ABORT_TOLERANCE: f64 = 1e-8;

/// Real amplitudes over the q-Dicke basis `|N,0>_q .. |N,N>_q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiSymmetricState {
    alphas: Vec<f64>,
}

impl QuasiSymmetricState {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::domain("a quasi-symmetric state needs N >= 1, i.e. at least 2 amplitudes"));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("amplitudes must be finite"));
        }
        let norm2: f64 = alphas.iter().map(|a| a * a).sum();
        if (norm2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!("state is not normalized: sum alpha^2 = {norm2}")));
        }
        Ok(QuasiSymmetricState { alphas })
    }

    /// The basis state `|N,k>_q`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::domain(format!("k = {k} exceeds N = {n}")));
        }
        let mut alphas = vec![0.0; n + 1];
        alphas[k] = 1.0;
        Self::new(alphas)
    }

    pub fn n(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// `rho_L` as an `(L+1) x (L+1)` symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReducedDensityMatrix {
    matrix: SymmetricMatrix,
}

impl ReducedDensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, l: usize, lp: usize) -> f64 {
        self.matrix.get(l, lp)
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        symmetric_eigenvalues(&self.matrix)
    }
}

pub fn reduced_density_matrix(
    state: &QuasiSymmetricState,
    part: Bipartition,
    params: QParams,
) -> Result<ReducedDensityMatrix> {
    let kernel = SchmidtKernel::new(state.n(), params);
    reduced_density_matrix_with(&kernel, state, part)
}

/// As [`reduced_density_matrix`], reusing a kernel built for the same `N` and `q`.
pub fn reduced_density_matrix_with(
    kernel: &SchmidtKernel,
    state: &QuasiSymmetricState,
    part: Bipartition,
) -> Result<ReducedDensityMatrix> {
    let n = state.n();
    if kernel.n() != n {
        return Err(Error::domain(format!("kernel built for N = {} used with N = {n}", kernel.n())));
    }
    part.check(n)?;
    let cut = part.l();
    let cols = n - cut + 1;
    // B[l][m] = alpha_{l+m} sqrt(p_{l+m, l})
    let mut b = vec![0.0; (cut + 1) * cols];
    for l in 0..=cut {
        for m in 0..cols {
            let alpha = state.alphas[l + m];
            if alpha != 0.0 {
                b[l * cols + m] = alpha * (0.5 * kernel.log_prob(l + m, cut, l)).exp();
            }
        }
    }
    let dim = cut + 1;
    let mut rho = SymmetricMatrix::zeros(dim);
    for l in 0..dim {
        let row_l = &b[l * cols..(l + 1) * cols];
        for lp in 0..=l {
            let row_lp = &b[lp * cols..(lp + 1) * cols];
            let v = crate::linalg::dot(row_l, row_lp);
            rho.set(l, lp, v);
            rho.set(lp, l, v);
        }
    }
    let trace = rho.trace();
    if !((trace - 1.0).abs() <= 1e-9) {
        return Err(Error::consistency(format!("tr rho_L = {trace} for N = {n}, L = {cut}")));
    }
    Ok(ReducedDensityMatrix { matrix: rho })
}

/// Von Neumann entropy (bits) of a spectrum, clamping round-off negatives.
pub fn entropy_of_eigenvalues(values: &[f64]) -> Result<f64> {
    let mut probs = Vec::with_capacity(values.len());
    for &v in values {
        if v < -ABORT_TOLERANCE {
            return Err(Error::consistency(format!("rho_L has eigenvalue {v:e}")));
        }
        probs.push(if v < 0.0 { 0.0 } else { v });
    }
    Ok(shannon_bits(&probs))
}

/// Entanglement entropy of `|psi>` across the cut, in bits.
pub fn state_entropy(state: &QuasiSymmetricState, part: Bipartition, params: QParams) -> Result<f64> {
    let kernel = SchmidtKernel::new(state.n(), params);
    state_entropy_with(&kernel, state, part)
}

pub fn state_entropy_with(kernel: &SchmidtKernel, state: &QuasiSymmetricState, part: Bipartition) -> Result<f64> {
    let rho = reduced_density_matrix_with(kernel, state, part)?;
    entropy_of_eigenvalues(&rho.eigenvalues()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::{basis_entropy, schmidt_spectrum, DickeState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qp(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> QuasiSymmetricState {
        let mut a: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        a.iter_mut().for_each(|x| *x /= norm);
        QuasiSymmetricState::new(a).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(QuasiSymmetricState::new(vec![1.0]).is_err());
        assert!(QuasiSymmetricState::new(vec![1.0, 1.0]).is_err());
        assert!(QuasiSymmetricState::new(vec![f64::NAN, 1.0]).is_err());
        assert!(QuasiSymmetricState::basis(3, 4).is_err());
        let s = QuasiSymmetricState::basis(3, 1).unwrap();
        assert_eq!(s.n(), 3);
        assert!(reduced_density_matrix(&s, Bipartition::new(4), qp(2.0)).is_err());
    }

    #[test]
    fn one_hot_gives_diagonal_schmidt_weights() {
        let s = QuasiSymmetricState::new(vec![0.0, 1.0, 0.0]).unwrap();
        let rho = reduced_density_matrix(&s, Bipartition::new(1), qp(2.0)).unwrap();
        assert!((rho.get(0, 0) - 0.8).abs() < 1e-15);
        assert!((rho.get(1, 1) - 0.2).abs() < 1e-15);
        assert_eq!(rho.get(0, 1), 0.0);

        for (n, k, cut, q) in [(12, 5, 7, 0.7), (40, 3, 20, 2.0), (40, 20, 11, 1.0)] {
            let s = QuasiSymmetricState::basis(n, k).unwrap();
            let rho = reduced_density_matrix(&s, Bipartition::new(cut), qp(q)).unwrap();
            let sp = schmidt_spectrum(DickeState::new(n, k).unwrap(), Bipartition::new(cut), qp(q)).unwrap();
            for l in 0..=cut {
                assert!((rho.get(l, l) - sp.probs()[l]).abs() < 1e-12);
                for lp in 0..=cut {
                    if lp != l {
                        assert_eq!(rho.get(l, lp), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn empty_cut_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(9, &mut rng);
        let rho = reduced_density_matrix(&s, Bipartition::new(0), qp(1.7)).unwrap();
        assert_eq!(rho.dim(), 1);
        assert!((rho.get(0, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_entropy() {
        for q in [0.5, 1.0, 3.0] {
            let s = QuasiSymmetricState::basis(30, 0).unwrap();
            for cut in [0, 1, 15, 30] {
                assert_eq!(state_entropy(&s, Bipartition::new(cut), qp(q)).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn one_hot_entropy_matches_basis_entropy() {
        let s = QuasiSymmetricState::basis(100, 37).unwrap();
        let a = state_entropy(&s, Bipartition::new(30), qp(1.5)).unwrap();
        let b = basis_entropy(DickeState::new(100, 37).unwrap(), Bipartition::new(30), qp(1.5)).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn trace_psd_and_complementarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(1..=60);
            let q = [0.5, 0.9, 1.0, 1.3, 2.0][rng.gen_range(0..5)];
            let s = random_state(n, &mut rng);
            let cut = rng.gen_range(0..=n);
            let rho = reduced_density_matrix(&s, Bipartition::new(cut), qp(q)).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-9);
            let eig = rho.eigenvalues().unwrap();
            assert!(eig.iter().all(|&v| v >= -1e-10));
            // Reflecting the chain maps |N,k>_q to |N,k>_{1/q}.
            let a = state_entropy(&s, Bipartition::new(cut), qp(q)).unwrap();
            let b = state_entropy(&s, Bipartition::new(n - cut), qp(q).inverse()).unwrap();
            assert!((a - b).abs() < 1e-8, "n={n} L={cut} q={q}: {a} vs {b}");
            let a = state_entropy(&s, Bipartition::new(cut), QParams::CLASSICAL).unwrap();
            let b = state_entropy(&s, Bipartition::new(n - cut), QParams::CLASSICAL).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn clamping_and_abort() {
        assert_eq!(entropy_of_eigenvalues(&[1.0, -5e-11]).unwrap(), 0.0);
        assert!(matches!(entropy_of_eigenvalues(&[1.0, -1e-7]), Err(Error::Consistency(_))));
    }
}
