//! The q-deformed Lipkin-Meshkov-Glick model in its `S = N/2` sector.
//!
//! ```text
//! H_q = h sinh(2 gamma S_z) / (4 sinh(gamma/2)) + lambda/(2[N]) (S_+^2 + S_-^2)
//! ```
//!
//! In the q-Dicke basis `|N,k>`, `M = k - N/2`, the field term is diagonal
//! and the pair terms couple `k` to `k +- 2`, so the `(N+1)`-dimensional
//! sector splits into an even-`k` and an odd-`k` tridiagonal block. At
//! `gamma = 0` the field term reduces to `h S_z`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{SymTridiagonal, SymmetricMatrix};
use crate::qmath::{ln_q_number, QParams};
use crate::qstate::{state_entropy_with, QuasiSymmetricState};
use crate::schmidt::{Bipartition, SchmidtKernel};

/// Even and odd ground energies closer than this (relative) count as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;
/// Points in the local re-sweep around a coarse cusp.
pub const REFINE_POINTS: usize = 10;
/// A cusp's second difference must exceed this multiple of the median.
pub const CUSP_THRESHOLD: f64 = 3.0;
/// Second differences below this fraction of `max |S|` are round-off.
pub const CURVATURE_NOISE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LmgModel {
    n: usize,
    h: f64,
    lambda: f64,
    params: QParams,
}

impl LmgModel {
    pub fn new(n: usize, h: f64, lambda: f64, params: QParams) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("the LMG model needs N >= 2, got {n}")));
        }
        if !h.is_finite() || !lambda.is_finite() {
            return Err(Error::domain(format!("h = {h} and lambda = {lambda} must be finite")));
        }
        Ok(LmgModel { n, h, lambda, params })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn params(&self) -> QParams {
        self.params
    }

    pub fn with_field(&self, h: f64) -> Result<Self> {
        Self::new(self.n, h, self.lambda, self.params)
    }
}

/// Largest `|gamma|` for which `sinh(gamma N)` is finite.
pub fn max_usable_gamma(n: usize) -> f64 {
    f64::MAX.asinh() / n as f64
}

/// The `(N+1) x (N+1)` sector Hamiltonian, bandwidth 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorHamiltonian {
    diag: Vec<f64>,
    /// `offdiag2[k]` couples `k` and `k+2`.
    offdiag2: Vec<f64>,
}

impl SectorHamiltonian {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag2(&self) -> &[f64] {
        &self.offdiag2
    }

    pub fn to_dense(&self) -> SymmetricMatrix {
        let n = self.dim();
        let mut m = SymmetricMatrix::zeros(n);
        for (k, &d) in self.diag.iter().enumerate() {
            m.set(k, k, d);
        }
        for (k, &c) in self.offdiag2.iter().enumerate() {
            m.set(k, k + 2, c);
            m.set(k + 2, k, c);
        }
        m
    }

    /// The even-`k` and odd-`k` blocks after stride-2 reindexing.
    pub fn parity_blocks(&self) -> Result<[SymTridiagonal; 2]> {
        let block = |parity: usize| {
            let diag: Vec<f64> = self.diag.iter().skip(parity).step_by(2).copied().collect();
            let off: Vec<f64> = self.offdiag2.iter().skip(parity).step_by(2).copied().collect();
            SymTridiagonal::new(diag, off)
        };
        Ok([block(0)?, block(1)?])
    }

    /// Inverse of [`SectorHamiltonian::parity_blocks`].
    pub fn from_parity_blocks(blocks: &[SymTridiagonal; 2]) -> Self {
        let dim = blocks[0].dim() + blocks[1].dim();
        let mut diag = vec![0.0; dim];
        let mut offdiag2 = vec![0.0; dim.saturating_sub(2)];
        for (parity, block) in blocks.iter().enumerate() {
            for (i, &d) in block.diag().iter().enumerate() {
                diag[parity + 2 * i] = d;
            }
            for (i, &c) in block.off().iter().enumerate() {
                offdiag2[parity + 2 * i] = c;
            }
        }
        SectorHamiltonian { diag, offdiag2 }
    }
}

fn unrepresentable(model: &LmgModel) -> Error {
    Error::range(format!(
        "parameter region numerically unrepresentable: q = {} (|gamma| = {:.6e}) at N = {}; \
         the largest usable |gamma| for this N is {:.6e}",
        model.params.q(),
        model.params.abs_gamma(),
        model.n,
        max_usable_gamma(model.n)
    ))
}

pub fn build_sector_hamiltonian(model: &LmgModel) -> Result<SectorHamiltonian> {
    let n = model.n;
    let g = model.params.gamma();
    let p = model.params;
    let diag: Vec<f64> = (0..=n)
        .map(|k| {
            let m = k as f64 - n as f64 / 2.0;
            if g == 0.0 {
                model.h * m
            } else {
                model.h * ((2.0 * g * m).sinh() / (4.0 * (g / 2.0).sinh()))
            }
        })
        .collect();
    if g != 0.0 && (g * n as f64).sinh().is_infinite() {
        return Err(unrepresentable(model));
    }
    // <k+2| S_+^2 |k> = sqrt([N-k][k+1][N-k-1][k+2])
    let ln_two_qn = std::f64::consts::LN_2 + ln_q_number(n as f64, p)?;
    let offdiag2 = (0..n - 1)
        .map(|k| {
            let ln = 0.5
                * (ln_q_number((n - k) as f64, p)?
                    + ln_q_number((k + 1) as f64, p)?
                    + ln_q_number((n - k - 1) as f64, p)?
                    + ln_q_number((k + 2) as f64, p)?);
            Ok(model.lambda * (ln - ln_two_qn).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    if diag.iter().chain(&offdiag2).any(|v| !v.is_finite()) {
        return Err(unrepresentable(model));
    }
    Ok(SectorHamiltonian { diag, offdiag2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    pub energy: f64,
    pub state: QuasiSymmetricState,
    /// Distance to the next eigenvalue of the sector, either parity.
    pub gap: f64,
    /// Even and odd block minima coincide; the even one was chosen.
    pub degenerate: bool,
    pub parity: Parity,
    /// `||H v - E v||` for the returned pair.
    pub residual: f64,
}

pub fn ground_state(ham: &SectorHamiltonian) -> Result<GroundState> {
    let blocks = ham.parity_blocks()?;
    let mut lows = [0.0; 2];
    for (i, block) in blocks.iter().enumerate() {
        lows[i] = block.kth_smallest(0).map_err(|e| {
            Error::numeric(format!("{:?} block ({}x{}): {e}", [Parity::Even, Parity::Odd][i], block.dim(), block.dim()))
        })?;
    }
    let scale = lows[0].abs().max(lows[1].abs()).max(1.0);
    let degenerate = (lows[0] - lows[1]).abs() <= DEGENERACY_TOLERANCE * scale;
    let winner = if degenerate || lows[0] < lows[1] { 0 } else { 1 };
    let parity = [Parity::Even, Parity::Odd][winner];
    let block = &blocks[winner];
    let (energy, vector) = block
        .lowest_eigenpair()
        .map_err(|e| Error::numeric(format!("{parity:?} block ({}x{}): {e}", block.dim(), block.dim())))?;

    let mut next = lows[1 - winner];
    if block.dim() > 1 {
        next = next.min(block.kth_smallest(1)?);
    }
    // A degenerate pair can come out a few ulps inverted.
    let gap = (next - lows[winner]).max(0.0);

    let mut alphas = vec![0.0; ham.dim()];
    for (i, &v) in vector.iter().enumerate() {
        alphas[winner + 2 * i] = v;
    }
    let pivot = alphas.iter().fold(0.0f64, |best, &a| if a.abs() > best.abs() { a } else { best });
    if pivot < 0.0 {
        alphas.iter_mut().for_each(|a| *a = -*a);
    }
    let hv = ham.to_dense().mul_vec(&alphas);
    let residual = hv.iter().zip(&alphas).map(|(a, b)| (a - energy * b).powi(2)).sum::<f64>().sqrt();
    Ok(GroundState { energy, state: QuasiSymmetricState::new(alphas)?, gap, degenerate, parity, residual })
}

/// One point of an entropy sweep. Failed points carry `error` and NaN values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: f64,
    pub ground_energy: f64,
    pub entropy: f64,
    pub gap: f64,
    pub degenerate: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn is_valid(&self) -> bool {
        self.error.is_none() && self.entropy.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// `steps` evenly spaced fields from `h_min` to `h_max` inclusive.
pub fn uniform_grid(h_min: f64, h_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !h_min.is_finite() || !h_max.is_finite() {
        return Err(Error::domain("grid needs at least one point and finite bounds"));
    }
    if steps == 1 {
        return Ok(vec![h_min]);
    }
    if !(h_max > h_min) {
        return Err(Error::domain(format!("grid needs h_max > h_min, got [{h_min}, {h_max}]")));
    }
    let step = (h_max - h_min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { h_max } else { h_min + step * i as f64 }).collect())
}

fn evaluate_point(template: &LmgModel, kernel: &SchmidtKernel, part: Bipartition, h: f64) -> SweepRow {
    let outcome = template
        .with_field(h)
        .and_then(|model| build_sector_hamiltonian(&model))
        .and_then(|ham| ground_state(&ham))
        .and_then(|gs| Ok((state_entropy_with(kernel, &gs.state, part)?, gs)));
    match outcome {
        Ok((entropy, gs)) => {
            SweepRow { h, ground_energy: gs.energy, entropy, gap: gs.gap, degenerate: gs.degenerate, error: None }
        }
        Err(e) => SweepRow {
            h,
            ground_energy: f64::NAN,
            entropy: f64::NAN,
            gap: f64::NAN,
            degenerate: false,
            error: Some(e.to_string()),
        },
    }
}

/// Ground-state entropy at each field in `h_grid`; `template.h()` is ignored.
///
/// Points run in parallel on the current rayon pool; row order follows the
/// grid. Per-point failures are recorded in the row.
pub fn entropy_sweep(template: &LmgModel, part: Bipartition, h_grid: &[f64]) -> Result<SweepResult> {
    if h_grid.is_empty() {
        return Err(Error::domain("field grid is empty"));
    }
    if h_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("field grid must be strictly increasing"));
    }
    part.check(template.n)?;
    let kernel = SchmidtKernel::new(template.n, template.params);
    let rows = h_grid.par_iter().map(|&h| evaluate_point(template, &kernel, part, h)).collect();
    Ok(SweepResult { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspEstimate {
    pub h_c: f64,
    /// Winning `|second difference|` over the median one on the coarse grid.
    pub confidence: f64,
    /// Grid spacing at which `h_c` was resolved.
    pub step: f64,
}

struct Curvature {
    h: Vec<f64>,
    d2: Vec<f64>,
    step: f64,
    noise: f64,
}

impl Curvature {
    /// `|S[i-1] - 2 S[i] + S[i+1]|` over the valid rows; `d2[j]` sits at `h[j+1]`.
    fn of(sweep: &SweepResult) -> Result<Self> {
        let valid: Vec<&SweepRow> = sweep.rows.iter().filter(|r| r.is_valid()).collect();
        if valid.len() < 5 {
            return Err(Error::domain(format!("cusp detection needs at least 5 valid rows, got {}", valid.len())));
        }
        let h: Vec<f64> = valid.iter().map(|r| r.h).collect();
        let step = (h[h.len() - 1] - h[0]) / (h.len() - 1) as f64;
        if h.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-6 * step) {
            return Err(Error::domain("cusp detection needs a uniform grid of valid rows"));
        }
        let s: Vec<f64> = valid.iter().map(|r| r.entropy).collect();
        let noise = CURVATURE_NOISE * s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let d2 = s.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).collect();
        Ok(Curvature { h, d2, step, noise })
    }

    fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.d2.iter().enumerate() {
            if v > self.d2[best] {
                best = j;
            }
        }
        best
    }

    fn median(&self) -> f64 {
        let mut sorted = self.d2.clone();
        sorted.sort_by(f64::total_cmp);
        let m = sorted.len();
        if m % 2 == 1 {
            sorted[m / 2]
        } else {
            0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
        }
    }
}

/// Coarse cusp location: the grid point of largest `|second difference|`.
pub fn detect_cusp(sweep: &SweepResult) -> Result<CuspEstimate> {
    let curv = Curvature::of(sweep)?;
    let best = curv.argmax();
    let peak = curv.d2[best];
    let median = curv.median();
    if !(peak > CUSP_THRESHOLD * median && peak > curv.noise) {
        return Err(Error::NoCusp(format!(
            "largest second difference {peak:e} is not above {CUSP_THRESHOLD} x median {median:e} \
             and the round-off level {:e}",
            curv.noise
        )));
    }
    // The noise floor keeps the ratio finite when the curve is piecewise linear.
    let confidence = peak / median.max(curv.noise);
    Ok(CuspEstimate { h_c: curv.h[best + 1], confidence, step: curv.step })
}

/// Number of separate peaks in `|second difference|` reaching `fraction` of
/// the largest one. A clean cusp gives 1.
pub fn count_cusps(sweep: &SweepResult, fraction: f64) -> Result<usize> {
    let curv = Curvature::of(sweep)?;
    let peak = curv.d2[curv.argmax()];
    let level = (fraction * peak).max(CUSP_THRESHOLD * curv.median()).max(curv.noise);
    let mut clusters = 0;
    let mut inside = false;
    for &v in &curv.d2 {
        let above = v >= level && v > 0.0;
        if above && !inside {
            clusters += 1;
        }
        inside = above;
    }
    Ok(clusters)
}

/// Re-sweeps `REFINE_POINTS` fields spanning the coarse neighbours of the
/// cusp and relocates it there. Falls back to the coarse estimate when the
/// local sweep has no resolvable kink.
pub fn refine_cusp(
    template: &LmgModel,
    part: Bipartition,
    sweep: &SweepResult,
    coarse: CuspEstimate,
) -> Result<CuspEstimate> {
    let lo = (coarse.h_c - coarse.step).max(sweep.rows.first().map_or(coarse.h_c, |r| r.h));
    let hi = (coarse.h_c + coarse.step).min(sweep.rows.last().map_or(coarse.h_c, |r| r.h));
    let grid = uniform_grid(lo, hi, REFINE_POINTS)?;
    let local = entropy_sweep(template, part, &grid)?;
    let curv = match Curvature::of(&local) {
        Ok(c) => c,
        Err(_) => return Ok(coarse),
    };
    let best = curv.argmax();
    if !(curv.d2[best] > curv.noise) {
        return Ok(coarse);
    }
    Ok(CuspEstimate { h_c: curv.h[best + 1], confidence: coarse.confidence, step: curv.step })
}

/// Sweep, coarse detection and one refinement level.
pub fn locate_cusp(
    template: &LmgModel,
    part: Bipartition,
    h_grid: &[f64],
) -> Result<(SweepResult, Result<CuspEstimate>)> {
    let sweep = entropy_sweep(template, part, h_grid)?;
    let cusp = detect_cusp(&sweep).and_then(|c| refine_cusp(template, part, &sweep, c));
    Ok((sweep, cusp))
}

/// Mean-field critical field
/// `[N-1]/[N] * 2[1/2] / (1 + 2 sinh^2(gamma (N-1)/2))`.
///
/// The denominator equals `cosh(gamma (N-1))`, evaluated in log form.
pub fn mean_field_hc(n: usize, params: QParams) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let ln = |x: f64| ln_q_number(x, params).expect("positive argument");
    let z = params.abs_gamma() * (n - 1) as f64;
    let ln_cosh = z + (-2.0 * z).exp().ln_1p() - std::f64::consts::LN_2;
    (ln((n - 1) as f64) - ln(n as f64) + std::f64::consts::LN_2 + ln(0.5) - ln_cosh).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub steps: usize,
    pub lambda: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { h_min: 0.0, h_max: 2.0, steps: 201, lambda: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HcScanRow {
    pub q: f64,
    pub hc_entanglement: f64,
    pub hc_meanfield: f64,
    pub confidence: f64,
    pub step: f64,
    pub error: Option<String>,
}

impl HcScanRow {
    pub fn abs_diff(&self) -> f64 {
        (self.hc_entanglement - self.hc_meanfield).abs()
    }
}

/// Entanglement-cusp and mean-field critical fields for each `q`.
pub fn hc_scan(n: usize, part: Bipartition, q_list: &[f64], config: SweepConfig) -> Result<Vec<HcScanRow>> {
    let grid = uniform_grid(config.h_min, config.h_max, config.steps)?;
    Ok(q_list
        .iter()
        .map(|&q| {
            let failed = |e: Error, mf: f64| HcScanRow {
                q,
                hc_entanglement: f64::NAN,
                hc_meanfield: mf,
                confidence: f64::NAN,
                step: f64::NAN,
                error: Some(e.to_string()),
            };
            let params = match QParams::new(q) {
                Ok(p) => p,
                Err(e) => return failed(e, f64::NAN),
            };
            let mf = mean_field_hc(n, params);
            let cusp = LmgModel::new(n, 0.0, config.lambda, params)
                .and_then(|template| locate_cusp(&template, part, &grid))
                .and_then(|(_, cusp)| cusp);
            match cusp {
                Ok(c) => HcScanRow {
                    q,
                    hc_entanglement: c.h_c,
                    hc_meanfield: mf,
                    confidence: c.confidence,
                    step: c.step,
                    error: None,
                },
                Err(e) => failed(e, mf),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::state_entropy;

    fn qp(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> SweepResult {
        let grid = uniform_grid(0.0, 2.0, 201).unwrap();
        SweepResult {
            rows: grid
                .into_iter()
                .map(|h| SweepRow { h, ground_energy: 0.0, entropy: f(h), gap: 0.0, degenerate: false, error: None })
                .collect(),
        }
    }

    #[test]
    fn model_validation() {
        assert!(LmgModel::new(1, 1.0, 1.0, qp(1.0)).is_err());
        assert!(LmgModel::new(4, f64::NAN, 1.0, qp(1.0)).is_err());
        assert!(LmgModel::new(4, 1.0, f64::INFINITY, qp(1.0)).is_err());
    }

    #[test]
    fn classical_field_only() {
        let ham = build_sector_hamiltonian(&LmgModel::new(2, 1.0, 0.0, QParams::CLASSICAL).unwrap()).unwrap();
        assert_eq!(ham.diag(), &[-1.0, 0.0, 1.0]);
        assert_eq!(ham.offdiag2(), &[0.0]);
    }

    #[test]
    fn classical_coupling_only() {
        let ham = build_sector_hamiltonian(&LmgModel::new(2, 0.0, 1.0, QParams::CLASSICAL).unwrap()).unwrap();
        assert_eq!(ham.diag(), &[0.0, 0.0, 0.0]);
        assert!((ham.offdiag2()[0] - 0.5).abs() < 1e-15);
        let gs = ground_state(&ham).unwrap();
        assert!((gs.energy + 0.5).abs() < 1e-14);
        let r = 0.5f64.sqrt();
        let a = gs.state.alphas();
        assert!((a[0] - r).abs() < 1e-12 && a[1] == 0.0 && (a[2] + r).abs() < 1e-12);
        assert_eq!(gs.parity, Parity::Even);
    }

    #[test]
    fn field_only_ground_state_is_polarized() {
        for q in [0.7, 1.0, 1.3] {
            let model = LmgModel::new(12, 0.8, 0.0, qp(q)).unwrap();
            let ham = build_sector_hamiltonian(&model).unwrap();
            let gs = ground_state(&ham).unwrap();
            assert_eq!(gs.energy, ham.diag()[0]);
            let mut expect = [0.0; 13];
            expect[0] = 1.0;
            assert_eq!(gs.state.alphas(), &expect[..]);
            assert_eq!(state_entropy(&gs.state, Bipartition::new(6), qp(q)).unwrap(), 0.0);
        }
    }

    #[test]
    fn parity_blocks_reassemble() {
        for n in [2, 3, 8, 9] {
            let ham = build_sector_hamiltonian(&LmgModel::new(n, 0.4, 1.1, qp(1.2)).unwrap()).unwrap();
            let blocks = ham.parity_blocks().unwrap();
            assert_eq!(blocks[0].dim() + blocks[1].dim(), n + 1);
            assert_eq!(SectorHamiltonian::from_parity_blocks(&blocks), ham);
        }
    }

    #[test]
    fn dense_matrix_is_symmetric() {
        let ham = build_sector_hamiltonian(&LmgModel::new(30, 0.4, 1.1, qp(1.2)).unwrap()).unwrap();
        assert_eq!(ham.to_dense().asymmetry(), 0.0);
    }

    #[test]
    fn unrepresentable_region() {
        let err = build_sector_hamiltonian(&LmgModel::new(1000, 1.0, 1.0, qp(3.0)).unwrap()).unwrap_err();
        match err {
            Error::Range(msg) => assert!(msg.contains("unrepresentable") && msg.contains("largest usable")),
            other => panic!("unexpected {other:?}"),
        }
        let g = max_usable_gamma(1000);
        assert!((g * 1000.0).sinh().is_finite());
        assert!(((g * 1.001) * 1000.0).sinh().is_infinite());
    }

    #[test]
    fn inverse_q_same_energy() {
        for (n, h, l) in [(10, 0.3, 1.0), (25, 1.2, 0.7)] {
            let a =
                ground_state(&build_sector_hamiltonian(&LmgModel::new(n, h, l, qp(1.4)).unwrap()).unwrap()).unwrap();
            let b = ground_state(&build_sector_hamiltonian(&LmgModel::new(n, h, l, qp(1.0 / 1.4)).unwrap()).unwrap())
                .unwrap();
            assert!((a.energy - b.energy).abs() < 1e-12 * a.energy.abs().max(1.0));
        }
    }

    #[test]
    fn ground_state_matches_dense_solver() {
        for (n, h, l, q) in [(9, 0.5, 1.0, 1.0), (20, 0.9, 1.0, 1.05), (21, 0.1, -0.6, 0.8)] {
            let ham = build_sector_hamiltonian(&LmgModel::new(n, h, l, qp(q)).unwrap()).unwrap();
            let gs = ground_state(&ham).unwrap();
            let dense = crate::linalg::symmetric_eigenvalues(&ham.to_dense()).unwrap();
            let lowest = dense[dense.len() - 1];
            assert!((gs.energy - lowest).abs() < 1e-12 * lowest.abs().max(1.0));
            assert!((gs.gap - (dense[dense.len() - 2] - lowest)).abs() < 1e-10);
            assert!(gs.residual < 1e-10 * ham.to_dense().frobenius());
        }
    }

    #[test]
    fn degenerate_choice_is_even() {
        // h = lambda = 0: everything is degenerate.
        let ham = build_sector_hamiltonian(&LmgModel::new(6, 0.0, 0.0, qp(1.0)).unwrap()).unwrap();
        let gs = ground_state(&ham).unwrap();
        assert!(gs.degenerate);
        assert_eq!(gs.parity, Parity::Even);
        assert_eq!(gs.state.alphas()[0], 1.0);
    }

    #[test]
    fn grid_and_sweep_edges() {
        assert_eq!(uniform_grid(0.0, 2.0, 1).unwrap(), vec![0.0]);
        let g = uniform_grid(0.0, 2.0, 201).unwrap();
        assert_eq!(g[200], 2.0);
        assert!((g[70] - 0.7).abs() < 1e-15);
        assert!(uniform_grid(1.0, 1.0, 3).is_err());
        assert!(uniform_grid(0.0, 1.0, 0).is_err());
        let template = LmgModel::new(20, 0.0, 1.0, QParams::CLASSICAL).unwrap();
        assert!(entropy_sweep(&template, Bipartition::new(10), &[]).is_err());
        assert!(entropy_sweep(&template, Bipartition::new(10), &[0.5, 0.4]).is_err());
        let single = entropy_sweep(&template, Bipartition::new(10), &[0.5]).unwrap();
        assert_eq!(single.rows.len(), 1);
        assert!(detect_cusp(&single).is_err());
    }

    #[test]
    fn failed_points_are_marked() {
        let template = LmgModel::new(1000, 0.0, 1.0, qp(3.0)).unwrap();
        let sweep = entropy_sweep(&template, Bipartition::new(500), &[0.0, 1.0]).unwrap();
        assert_eq!(sweep.rows.len(), 2);
        assert!(sweep.rows.iter().all(|r| !r.is_valid() && r.error.as_deref().unwrap().contains("unrepresentable")));
    }

    #[test]
    fn tent_cusp() {
        let sweep = synthetic(|h| 1.0 - (h - 0.7).abs());
        let cusp = detect_cusp(&sweep).unwrap();
        assert!((cusp.h_c - 0.7).abs() <= 0.01 + 1e-12);
        assert!(cusp.confidence >= 5.0);
        assert_eq!(count_cusps(&sweep, 0.25).unwrap(), 1);
    }

    #[test]
    fn smooth_curves_have_no_cusp() {
        for f in [|h: f64| 0.5 * h + 0.1 * h * h, |h: f64| (h / 2.0).exp(), |h: f64| 3.0 - h] {
            assert!(matches!(detect_cusp(&synthetic(f)), Err(Error::NoCusp(_))));
        }
    }

    #[test]
    fn mean_field_values() {
        assert!((mean_field_hc(1000, QParams::CLASSICAL) - 0.999).abs() < 1e-15);
        let a = mean_field_hc(1000, qp(1.01));
        assert!(a < 0.999 && a > 0.0);
        assert!(mean_field_hc(1000, qp(1.02)) < a);
        assert!((mean_field_hc(1000, qp(1.01)) - mean_field_hc(1000, qp(1.0 / 1.01))).abs() < 1e-15 * a);
        for g in [1e-9, -1e-9] {
            let v = mean_field_hc(1000, QParams::from_gamma(g).unwrap());
            assert!((v - 0.999).abs() < 1e-6);
        }
        // Direct evaluation with q-numbers at a moderate size.
        let p = qp(1.1);
        let n = 20.0;
        let qn = |x: f64| crate::qmath::q_number(x, p).unwrap();
        let direct = qn(n - 1.0) / qn(n) * 2.0 * qn(0.5) / (1.0 + 2.0 * (p.gamma() / 2.0 * (n - 1.0)).sinh().powi(2));
        assert!((mean_field_hc(20, p) - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn scan_of_nothing_is_empty() {
        let rows = hc_scan(50, Bipartition::new(25), &[], SweepConfig::default()).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn scan_records_bad_q() {
        let cfg = SweepConfig { steps: 11, ..SweepConfig::default() };
        let rows = hc_scan(20, Bipartition::new(10), &[-1.0], cfg).unwrap();
        assert!(rows[0].error.is_some());
    }
}
