//! Brute-force ground truth on the full `2^N` dimensional Hilbert space.
//!
//! Basis index convention: site 1 is the most significant bit, so site `i`
//! of an `N`-qubit word lives in bit `N - i`. A set bit is spin up, `|1>`,
//! with `s_z = +1/2`.
//!
//! The coupled ladder operators are built so that raising `|0...0>` yields
//! exactly the combinatorial states `|N,k>_q`: each site `j` to the left of
//! the flipped site contributes `q^{-s_z(j)}`, each site to the right
//! contributes `q^{+s_z(j)}`. This is the N-fold coproduct with the tensor
//! factors listed from site `N` down to site 1.
//!
//! Everything here is a test fixture: sizes are guarded and no effort goes
//! into speed beyond matrix-free application of the ladder operators.

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::qmath::{ln_q_binomial, q_number, QParams};
use crate::schmidt::{shannon_bits, DickeState, SchmidtKernel};

/// Largest system the oracle will build.
pub const MAX_QUBITS: usize = 14;
/// Largest system for the Casimir commutator check.
pub const MAX_CASIMIR_QUBITS: usize = 10;

fn guard(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::Size { n, max });
    }
    if n == 0 {
        return Err(Error::domain("the oracle needs at least one qubit"));
    }
    Ok(())
}

fn bit(n: usize, site: usize) -> usize {
    1 << (n - site)
}

/// `2^N` real amplitudes, normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    n: usize,
    amplitudes: Vec<f64>,
}

impl FullState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitude_of_word(&self, word: &str) -> Option<f64> {
        let index = usize::from_str_radix(word, 2).ok()?;
        (word.len() == self.n).then(|| self.amplitudes[index])
    }

    fn normalized(n: usize, mut amplitudes: Vec<f64>) -> Option<Self> {
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 1e-300) {
            return None;
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Some(FullState { n, amplitudes })
    }
}

/// Exponent of `q` for the word with ones at the 1-based positions `sites`,
/// written as `-k(N-k)/2 + sum_l (i_l - l)`.
pub(crate) fn word_exponent(n: usize, sites: &[usize]) -> f64 {
    let k = sites.len() as f64;
    let crossings: i64 = sites.iter().enumerate().map(|(l, &i)| i as i64 - (l as i64 + 1)).sum();
    -k * (n as f64 - k) / 2.0 + crossings as f64
}

fn ones(n: usize, index: usize) -> Vec<usize> {
    (1..=n).filter(|&site| index & bit(n, site) != 0).collect()
}

/// `|N,k>_q` assembled word by word from the crossing rule.
pub fn build_state_direct(state: DickeState, params: QParams) -> Result<FullState> {
    let n = state.n();
    guard(n, MAX_QUBITS)?;
    let k = state.k();
    let ln_norm = 0.5 * ln_q_binomial(n as i64, k as i64, params)?;
    let amplitudes = (0..1usize << n)
        .map(|index| {
            if index.count_ones() as usize != k {
                return 0.0;
            }
            let e = word_exponent(n, &ones(n, index));
            (params.gamma() * e - ln_norm).exp()
        })
        .collect();
    FullState::normalized(n, amplitudes).ok_or_else(|| Error::consistency("direct construction produced a zero vector"))
}

/// Sparse operator on the `2^N` space, stored by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FullOperator {
    n: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl FullOperator {
    fn from_columns(n: usize, columns: Vec<Vec<(usize, f64)>>) -> Self {
        FullOperator { n, columns }
    }

    fn diagonal(n: usize, f: impl Fn(usize) -> f64) -> Self {
        let columns = (0..1usize << n)
            .map(|j| {
                let v = f(j);
                if v == 0.0 {
                    Vec::new()
                } else {
                    vec![(j, v)]
                }
            })
            .collect();
        FullOperator { n, columns }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (j, col) in self.columns.iter().enumerate() {
            if v[j] != 0.0 {
                for &(i, a) in col {
                    out[i] += a * v[j];
                }
            }
        }
        out
    }

    /// Matrix element `<row| A |col>`.
    pub fn element(&self, row: usize, col: usize) -> f64 {
        self.columns[col].iter().filter(|(i, _)| *i == row).map(|(_, a)| a).sum()
    }

    /// `self * other`.
    pub fn compose(&self, other: &FullOperator) -> FullOperator {
        let dim = self.dim();
        let mut scratch = vec![0.0; dim];
        let mut touched = Vec::new();
        let columns = other
            .columns
            .iter()
            .map(|col| {
                for &(r, b) in col {
                    for &(i, a) in &self.columns[r] {
                        if scratch[i] == 0.0 {
                            touched.push(i);
                        }
                        scratch[i] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let out = touched.iter().map(|&i| (i, scratch[i])).filter(|(_, v)| *v != 0.0).collect();
                for &i in &touched {
                    scratch[i] = 0.0;
                }
                touched.clear();
                out
            })
            .collect();
        FullOperator { n: self.n, columns }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &FullOperator, b: f64) -> FullOperator {
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(x, y)| {
                let mut merged: Vec<(usize, f64)> =
                    x.iter().map(|&(i, v)| (i, a * v)).chain(y.iter().map(|&(i, v)| (i, b * v))).collect();
                merged.sort_by_key(|&(i, _)| i);
                let mut out: Vec<(usize, f64)> = Vec::with_capacity(merged.len());
                for (i, v) in merged {
                    match out.last_mut() {
                        Some((j, w)) if *j == i => *w += v,
                        _ => out.push((i, v)),
                    }
                }
                out.retain(|(_, v)| *v != 0.0);
                out
            })
            .collect();
        FullOperator { n: self.n, columns }
    }

    pub fn commutator(&self, other: &FullOperator) -> FullOperator {
        self.compose(other).combine(1.0, &other.compose(self), -1.0)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.columns.iter().flatten().fold(0.0, |m, (_, v)| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let dim = self.dim();
        let mut rows = vec![vec![0.0; dim]; dim];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                rows[i][j] += v;
            }
        }
        rows
    }
}

/// `S~z`, `S~+`, `S~-` on `N` coupled q-spins.
#[derive(Debug, Clone)]
pub struct LadderOperators {
    pub sz: FullOperator,
    pub splus: FullOperator,
    pub sminus: FullOperator,
}

fn total_sz(n: usize, index: usize) -> f64 {
    index.count_ones() as f64 - n as f64 / 2.0
}

pub fn build_ladder_operators(n: usize, params: QParams) -> Result<LadderOperators> {
    guard(n, MAX_QUBITS)?;
    let gamma = params.gamma();
    let dim = 1usize << n;
    let spin = |index: usize, site: usize| if index & bit(n, site) != 0 { 0.5 } else { -0.5 };
    // q^{-sum_{j<i} s_j + sum_{j>i} s_j}
    let weight = |index: usize, site: usize| {
        let left: f64 = (1..site).map(|j| spin(index, j)).sum();
        let right: f64 = (site + 1..=n).map(|j| spin(index, j)).sum();
        (gamma * (right - left)).exp()
    };
    let mut plus = Vec::with_capacity(dim);
    let mut minus = Vec::with_capacity(dim);
    for index in 0..dim {
        let mut up = Vec::new();
        let mut down = Vec::new();
        for site in 1..=n {
            let b = bit(n, site);
            if index & b == 0 {
                up.push((index | b, weight(index, site)));
            } else {
                down.push((index & !b, weight(index, site)));
            }
        }
        up.sort_by_key(|&(i, _)| i);
        down.sort_by_key(|&(i, _)| i);
        plus.push(up);
        minus.push(down);
    }
    Ok(LadderOperators {
        sz: FullOperator::diagonal(n, |j| total_sz(n, j)),
        splus: FullOperator::from_columns(n, plus),
        sminus: FullOperator::from_columns(n, minus),
    })
}

/// `(S~+)^k |0...0>`, normalized.
pub fn build_state_ladder(state: DickeState, params: QParams) -> Result<FullState> {
    raise_vacuum(state.n(), state.k(), params)
}

/// Raising `|0...0>` `k` times; `k > N` annihilates the state.
pub fn raise_vacuum(n: usize, k: usize, params: QParams) -> Result<FullState> {
    let ops = build_ladder_operators(n, params)?;
    let mut v = vec![0.0; 1 << n];
    v[0] = 1.0;
    for _ in 0..k {
        v = ops.splus.apply(&v);
    }
    FullState::normalized(n, v).ok_or(Error::Annihilated { n, k })
}

/// `sum_k alpha_k |N,k>_q` on the full space.
pub fn build_superposition(alphas: &[f64], params: QParams) -> Result<FullState> {
    let n = alphas.len().checked_sub(1).filter(|&n| n >= 1).ok_or_else(|| Error::domain("need N >= 1"))?;
    guard(n, MAX_QUBITS)?;
    let mut amplitudes = vec![0.0; 1 << n];
    for (k, &alpha) in alphas.iter().enumerate() {
        if alpha == 0.0 {
            continue;
        }
        let basis = build_state_direct(DickeState::new(n, k)?, params)?;
        for (a, b) in amplitudes.iter_mut().zip(basis.amplitudes()) {
            *a += alpha * b;
        }
    }
    FullState::normalized(n, amplitudes).ok_or_else(|| Error::domain("superposition is the zero vector"))
}

/// Eigenvalues of `tr_B |psi><psi|` for `A = {1..L}`, descending, length `2^L`.
pub fn partial_trace_spectrum(state: &FullState, cut: usize) -> Result<Vec<f64>> {
    let n = state.n;
    if cut > n {
        return Err(Error::domain(format!("bipartition L = {cut} exceeds N = {n}")));
    }
    let rows = 1usize << cut;
    let cols = 1usize << (n - cut);
    let m = |a: usize, b: usize| state.amplitudes[a * cols + b];
    // The nonzero spectrum of M M^T equals that of M^T M; use the smaller one.
    let gram = if rows <= cols {
        SymmetricMatrix::from_fn(rows, |i, j| (0..cols).map(|b| m(i, b) * m(j, b)).sum())
    } else {
        SymmetricMatrix::from_fn(cols, |i, j| (0..rows).map(|a| m(a, i) * m(a, j)).sum())
    };
    let mut values = jacobi_eigenvalues(&gram);
    values.resize(rows, 0.0);
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Entanglement entropy in bits of a full-space state.
pub fn full_entropy(state: &FullState, cut: usize) -> Result<f64> {
    let values: Vec<f64> = partial_trace_spectrum(state, cut)?.into_iter().map(|v| v.max(0.0)).collect();
    Ok(shannon_bits(&values))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(matrix: &SymmetricMatrix) -> Vec<f64> {
    let n = matrix.dim();
    let mut a = matrix.as_row_major().to_vec();
    let frob = matrix.frobenius();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j].powi(2)).sum();
        if off.sqrt() <= 1e-17 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// The q-LMG Hamiltonian on the full space, from the coupled operators.
pub fn full_hamiltonian(n: usize, h: f64, lambda: f64, params: QParams) -> Result<FullOperator> {
    let ops = build_ladder_operators(n, params)?;
    let g = params.gamma();
    let field = FullOperator::diagonal(n, |j| {
        let m = total_sz(n, j);
        if g == 0.0 {
            h * m
        } else {
            h * (2.0 * g * m).sinh() / (4.0 * (g / 2.0).sinh())
        }
    });
    let coupling = lambda / (2.0 * q_number(n as f64, params)?);
    let pairs = ops.splus.compose(&ops.splus).combine(1.0, &ops.sminus.compose(&ops.sminus), 1.0);
    Ok(field.combine(1.0, &pairs, coupling))
}

/// The Casimir `S~- S~+ + [S~z + 1/2]^2 - [1/2]^2`.
pub fn casimir(n: usize, params: QParams) -> Result<FullOperator> {
    let ops = build_ladder_operators(n, params)?;
    let half = q_number(0.5, params)?;
    let shift = FullOperator::diagonal(n, |j| {
        let v = q_number(total_sz(n, j) + 0.5, params).expect("small argument");
        v * v - half * half
    });
    Ok(ops.sminus.compose(&ops.splus).combine(1.0, &shift, 1.0))
}

/// Max-norms of `[H, C]`, `H` and `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorCheck {
    pub commutator: f64,
    pub hamiltonian: f64,
    pub casimir: f64,
}

impl CommutatorCheck {
    /// `||[H,C]|| / (||H|| ||C||)`, or the bare norm when `H` or `C` vanishes.
    pub fn relative(&self) -> f64 {
        let scale = self.hamiltonian * self.casimir;
        if scale > 0.0 {
            self.commutator / scale
        } else {
            self.commutator
        }
    }
}

pub fn casimir_commutation_check(n: usize, h: f64, lambda: f64, params: QParams) -> Result<CommutatorCheck> {
    guard(n, MAX_CASIMIR_QUBITS)?;
    let ham = full_hamiltonian(n, h, lambda, params)?;
    let cas = casimir(n, params)?;
    Ok(CommutatorCheck {
        commutator: ham.commutator(&cas).max_abs(),
        hamiltonian: ham.max_abs(),
        casimir: cas.max_abs(),
    })
}

/// `<N,i| A |N,j>_q` over the `N+1` combinatorial states.
pub fn project_onto_dicke(op: &FullOperator, params: QParams) -> Result<Vec<Vec<f64>>> {
    let n = op.n();
    let basis: Vec<FullState> =
        (0..=n).map(|k| build_state_direct(DickeState::new(n, k)?, params)).collect::<Result<_>>()?;
    let images: Vec<Vec<f64>> = basis.iter().map(|b| op.apply(b.amplitudes())).collect();
    Ok(basis.iter().map(|bra| images.iter().map(|ket| crate::linalg::dot(bra.amplitudes(), ket)).collect()).collect())
}

/// Outcome of one validation suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    /// The first tuple that failed, with the observed discrepancy.
    pub first_failure: Option<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport { name, passed: 0, total: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(describe());
        }
    }

    fn error(&mut self, tuple: String, e: Error) {
        self.record(false, || format!("{tuple}: {e}"));
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Direct and ladder constructions agree entrywise within `tol`.
pub fn route_suite(max_n: usize, q_list: &[f64], tol: f64) -> SuiteReport {
    let mut report = SuiteReport::new("route-equivalence");
    for &q in q_list {
        for n in 1..=max_n {
            for k in 0..=n {
                let tuple = format!("N={n} k={k} q={q}");
                let outcome = QParams::new(q).and_then(|p| {
                    let s = DickeState::new(n, k)?;
                    Ok(max_diff(build_state_direct(s, p)?.amplitudes(), build_state_ladder(s, p)?.amplitudes()))
                });
                match outcome {
                    Ok(d) => report.record(d <= tol, || format!("{tuple}: max difference {d:e}")),
                    Err(e) => report.error(tuple, e),
                }
            }
        }
    }
    report
}

fn algebra_checks(n: usize, p: QParams) -> Result<Vec<(&'static str, f64)>> {
    let ops = build_ladder_operators(n, p)?;
    let two_sz = FullOperator::diagonal(n, |j| q_number(2.0 * total_sz(n, j), p).expect("small argument"));
    let scale = ops.splus.max_abs().max(two_sz.max_abs()).max(1.0);
    let residual = |a: FullOperator, b: &FullOperator| a.combine(1.0, b, -1.0).max_abs() / scale;
    let mut out = vec![
        ("[Sz,S+] = S+", residual(ops.sz.commutator(&ops.splus), &ops.splus)),
        ("[Sz,S-] = -S-", residual(ops.sz.commutator(&ops.sminus), &ops.sminus.combine(-1.0, &ops.sminus, 0.0))),
        ("[S+,S-] = [2Sz]", residual(ops.splus.commutator(&ops.sminus), &two_sz)),
    ];
    // <N,k+1| S+ |N,k> = sqrt([N-k][k+1]), zero elsewhere.
    let projected = project_onto_dicke(&ops.splus, p)?;
    let mut worst: f64 = 0.0;
    for (i, row) in projected.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            let expect =
                if i == k + 1 { (q_number((n - k) as f64, p)? * q_number((k + 1) as f64, p)?).sqrt() } else { 0.0 };
            worst = worst.max((v - expect).abs() / scale);
        }
    }
    out.push(("<k+1|S+|k> = sqrt([N-k][k+1])", worst));
    Ok(out)
}

/// Commutation relations and ladder matrix elements on the full space.
///
/// Residuals are measured relative to `max(1, ||S+||_max, ||[2Sz]||_max)`.
pub fn algebra_suite(max_n: usize, q_list: &[f64], tol: f64) -> SuiteReport {
    let mut report = SuiteReport::new("algebra-relations");
    for &q in q_list {
        for n in 1..=max_n {
            let tuple = format!("N={n} q={q}");
            match QParams::new(q).and_then(|p| algebra_checks(n, p)) {
                Ok(checks) => {
                    for (what, r) in checks {
                        report.record(r <= tol, || format!("{tuple} {what}: residual {r:e}"));
                    }
                }
                Err(e) => report.error(tuple, e),
            }
        }
    }
    report
}

/// Closed-form Schmidt weights against the brute-force partial trace.
pub fn schmidt_suite(max_n: usize, q_list: &[f64], tol: f64) -> SuiteReport {
    let mut report = SuiteReport::new("schmidt-equivalence");
    for &q in q_list {
        for n in 1..=max_n {
            let p = match QParams::new(q) {
                Ok(p) => p,
                Err(e) => {
                    report.error(format!("q={q}"), e);
                    continue;
                }
            };
            let kernel = SchmidtKernel::new(n, p);
            for k in 0..=n {
                let full = match DickeState::new(n, k).and_then(|s| build_state_direct(s, p)) {
                    Ok(f) => f,
                    Err(e) => {
                        report.error(format!("N={n} k={k} q={q}"), e);
                        continue;
                    }
                };
                for cut in 0..=n {
                    let tuple = format!("N={n} k={k} L={cut} q={q}");
                    let outcome = kernel.spectrum(k, cut).and_then(|sp| {
                        let mut analytic = sp.into_probs();
                        analytic.sort_by(|a, b| b.total_cmp(a));
                        let oracle = partial_trace_spectrum(&full, cut)?;
                        analytic.resize(oracle.len(), 0.0);
                        Ok(max_diff(&analytic, &oracle))
                    });
                    match outcome {
                        Ok(d) => report.record(d <= tol, || format!("{tuple}: max difference {d:e}")),
                        Err(e) => report.error(tuple, e),
                    }
                }
            }
        }
    }
    report
}

/// `||[H, C]||` relative to `||H|| ||C||` over a grid of fields and couplings.
pub fn casimir_suite(max_n: usize, h_list: &[f64], lambda_list: &[f64], q_list: &[f64], tol: f64) -> SuiteReport {
    let mut report = SuiteReport::new("casimir-commutation");
    for &q in q_list {
        for n in 2..=max_n.min(MAX_CASIMIR_QUBITS) {
            for &h in h_list {
                for &lambda in lambda_list {
                    let tuple = format!("N={n} h={h} lambda={lambda} q={q}");
                    match QParams::new(q).and_then(|p| casimir_commutation_check(n, h, lambda, p)) {
                        Ok(c) => {
                            let r = c.relative();
                            report.record(r <= tol, || format!("{tuple}: relative commutator {r:e}"))
                        }
                        Err(e) => report.error(tuple, e),
                    }
                }
            }
        }
    }
    report
}
