//! Schmidt spectra and entanglement entropy of the basis states `|N,k>_q`.
//!
//! For the cut `A = {1..L}`, `B = {L+1..N}` the state decomposes as
//! `|N,k> = sum_l sqrt(p_l) |L,l> (x) |N-L,k-l>` with the q-hypergeometric
//! weights
//!
//! ```text
//! p_l = q^(kL - Nl) [L choose l] [N-L choose k-l] / [N choose k]
//! ```
//!
//! The `|gamma|` coefficients of the three q-binomials are integers, so the
//! whole exponent of `q` is assembled exactly in integer arithmetic and
//! multiplied by `gamma` once.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{LnQFactorials, QParams};

/// The quasi-symmetric basis state `|N,k>_q`: `N` qubits, `k` excitations.
///
/// Identified with the q-Dicke state `|S = N/2, M = k - N/2>>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DickeState {
    n: usize,
    k: usize,
}

impl DickeState {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("a Dicke state needs at least one qubit"));
        }
        if k > n {
            return Err(Error::domain(format!("excitation number k = {k} exceeds N = {n}")));
        }
        Ok(DickeState { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Magnetic quantum number `M = k - N/2`.
    pub fn m(&self) -> f64 {
        self.k as f64 - self.n as f64 / 2.0
    }
}

/// Cut after site `L`: subsystem A holds sites `1..=L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    l: usize,
}

impl Bipartition {
    pub fn new(l: usize) -> Self {
        Bipartition { l }
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.l > n {
            return Err(Error::domain(format!("bipartition L = {} exceeds N = {n}", self.l)));
        }
        Ok(())
    }
}

/// Schmidt weights `p_l`, `l = 0..=L`. Structural zeros are stored as `0.0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    probs: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Number of nonzero weights.
    pub fn rank(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }

    pub fn entropy_bits(&self) -> f64 {
        shannon_bits(&self.probs)
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    // `0.0 - x` rather than `-x` so a pure state reports +0.
    0.0 - probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Log Schmidt weights for every `(k, L, l)` at fixed `N` and `q`.
///
/// Holds one table of `ln [j]!` for `j <= N`, so each weight costs O(1).
#[derive(Debug, Clone)]
pub struct SchmidtKernel {
    n: usize,
    gamma: f64,
    factorials: LnQFactorials,
}

impl SchmidtKernel {
    pub fn new(n: usize, params: QParams) -> Self {
        SchmidtKernel { n, gamma: params.gamma(), factorials: LnQFactorials::new(n, params) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ln p_{N,k,q,L,l}`, or `-inf` outside the support.
    ///
    /// Caller guarantees `k <= N`, `L <= N`, `l <= L`.
    pub fn log_prob(&self, k: usize, cut: usize, l: usize) -> f64 {
        let n = self.n;
        debug_assert!(k <= n && cut <= n && l <= cut);
        if l > k || k - l > n - cut {
            return f64::NEG_INFINITY;
        }
        let (nn, kk, ll, cc) = (n as i64, k as i64, l as i64, cut as i64);
        let (qa, ra) = self.factorials.ln_binomial_split(cut, l);
        let (qb, rb) = self.factorials.ln_binomial_split(n - cut, k - l);
        let (qn, rn) = self.factorials.ln_binomial_split(n, k);
        let linear = kk * cc - nn * ll;
        let quad = qa + qb - qn;
        // The binomials carry |gamma|; the prefactor carries signed gamma.
        let exponent = if self.gamma >= 0.0 { linear + quad } else { linear - quad };
        self.gamma * exponent as f64 + (ra + rb - rn)
    }

    /// Schmidt weights for one state and cut, renormalized against round-off.
    pub fn spectrum(&self, k: usize, cut: usize) -> Result<SchmidtSpectrum> {
        let mut probs: Vec<f64> = (0..=cut).map(|l| self.log_prob(k, cut, l).exp()).collect();
        let total: f64 = probs.iter().sum();
        if !((total - 1.0).abs() <= 1e-9) {
            return Err(Error::consistency(format!(
                "Schmidt weights for N = {}, k = {k}, L = {cut} sum to {total}",
                self.n
            )));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(SchmidtSpectrum { probs })
    }
}

pub fn schmidt_log_prob(state: DickeState, part: Bipartition, l: usize, params: QParams) -> Result<f64> {
    part.check(state.n)?;
    if l > part.l {
        return Err(Error::domain(format!("Schmidt index l = {l} exceeds L = {}", part.l)));
    }
    Ok(SchmidtKernel::new(state.n, params).log_prob(state.k, part.l, l))
}

pub fn schmidt_spectrum(state: DickeState, part: Bipartition, params: QParams) -> Result<SchmidtSpectrum> {
    part.check(state.n)?;
    SchmidtKernel::new(state.n, params).spectrum(state.k, part.l)
}

/// Entanglement entropy of `|N,k>_q` across the cut, in bits.
pub fn basis_entropy(state: DickeState, part: Bipartition, params: QParams) -> Result<f64> {
    Ok(schmidt_spectrum(state, part, params)?.entropy_bits())
}

/// `(L, S(L))` for every cut `L = 0..=N`.
pub fn entropy_curve(state: DickeState, params: QParams) -> Result<Vec<(usize, f64)>> {
    let kernel = SchmidtKernel::new(state.n, params);
    (0..=state.n).map(|cut| Ok((cut, kernel.spectrum(state.k, cut)?.entropy_bits()))).collect()
}
