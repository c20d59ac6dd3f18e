//! Dense symmetric and symmetric-tridiagonal eigensolvers.
//!
//! Dense matrices go through Householder reduction to tridiagonal form and
//! implicit-shift QL. For the banded LMG blocks only the lowest eigenpair is
//! needed, so those use Sturm-sequence bisection plus inverse iteration, which
//! is O(n) per eigenvalue instead of O(n^2).

use serde::Serialize;

use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;

/// Relative asymmetry above which a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Square real matrix, row-major, expected to be symmetric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps row-major data. Symmetry is checked by the solvers, not here.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::domain(format!("expected {} entries for a {n}x{n} matrix, got {}", n * n, data.len())));
        }
        Ok(SymmetricMatrix { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        SymmetricMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// Frobenius norm, an upper bound on the spectral norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn check_symmetric(&self) -> Result<()> {
        let scale = self.max_abs();
        let asym = self.asymmetry();
        if asym > SYMMETRY_TOLERANCE * scale || self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "matrix is not symmetric and finite (asymmetry {asym:e}, scale {scale:e})"
            )));
        }
        Ok(())
    }
}

/// Eigenvalues in descending order with unit eigenvectors `vectors[i]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// All eigenvalues of a symmetric matrix, sorted descending.
pub fn symmetric_eigenvalues(matrix: &SymmetricMatrix) -> Result<Vec<f64>> {
    matrix.check_symmetric()?;
    let reduced = householder_tridiagonalize(matrix);
    let mut d = reduced.diag;
    let mut e = reduced.off;
    e.push(0.0);
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// Eigenvalues (descending) and eigenvectors of a symmetric matrix.
pub fn symmetric_eigen(matrix: &SymmetricMatrix) -> Result<SymmetricEigen> {
    matrix.check_symmetric()?;
    let n = matrix.n;
    let reduced = householder_tridiagonalize(matrix);
    let mut d = reduced.diag.clone();
    let mut e = reduced.off.clone();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect();
    implicit_ql(&mut d, &mut e, Some(&mut z))?;
    for v in z.iter_mut() {
        reduced.apply_q(v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        vectors: order.into_iter().map(|i| std::mem::take(&mut z[i])).collect(),
    })
}

struct Tridiagonalization {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Householder vectors; reflector `k` acts on indices `k+1..n`.
    reflectors: Vec<(usize, Vec<f64>, f64)>,
}

impl Tridiagonalization {
    /// `v <- Q v` with `A = Q T Q^T`.
    fn apply_q(&self, v: &mut [f64]) {
        for (start, h, tau) in self.reflectors.iter().rev() {
            let tail = &mut v[*start..];
            let s = tau * dot(h, tail);
            for (t, hi) in tail.iter_mut().zip(h) {
                *t -= s * hi;
            }
        }
    }
}

fn householder_tridiagonalize(matrix: &SymmetricMatrix) -> Tridiagonalization {
    let n = matrix.n;
    let mut a = matrix.data.clone();
    // Work from the lower triangle only.
    for i in 0..n {
        for j in 0..i {
            a[j * n + i] = a[i * n + j];
        }
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    if n == 0 {
        return Tridiagonalization { diag, off, reflectors };
    }
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let m = n - start;
        let mut v: Vec<f64> = (start..n).map(|i| a[i * n + k]).collect();
        let scale = v.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        diag[k] = a[k * n + k];
        if scale == 0.0 {
            off[k] = 0.0;
            continue;
        }
        v.iter_mut().for_each(|x| *x /= scale);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = if v[0] > 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        off[k] = alpha * scale;
        if vtv == 0.0 {
            continue;
        }
        let tau = 2.0 / vtv;
        // p = tau * A22 v
        for (r, pi) in p[..m].iter_mut().enumerate() {
            let row = &a[(start + r) * n + start..(start + r) * n + n];
            *pi = tau * dot(row, &v);
        }
        let kappa = 0.5 * tau * dot(&p[..m], &v);
        for (pi, vi) in p[..m].iter_mut().zip(&v) {
            *pi -= kappa * vi;
        }
        // A22 <- A22 - v w^T - w v^T
        for r in 0..m {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut a[(start + r) * n + start..(start + r) * n + n];
            for ((x, vc), wc) in row.iter_mut().zip(&v).zip(&p[..m]) {
                *x -= vr * wc + wr * vc;
            }
        }
        reflectors.push((start, v, tau));
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    diag[n - 1] = a[(n - 1) * n + n - 1];
    Tridiagonalization { diag, off, reflectors }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal, `e[i]` couples `i` and `i+1` with `e[n-1] = 0`.
/// On return `d` holds the eigenvalues (unsorted). When `z` is given, its rows
/// are rotated along so that row `i` ends up as the eigenvector of `d[i]`
/// expressed in the input basis (start from the identity).
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<Vec<f64>>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    const MAX_ITER: usize = 60;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > EPS * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::numeric(format!(
                        "implicit QL did not converge for eigenvalue {l} of {n} after {MAX_ITER} sweeps"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut(i + 1);
                        let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let t = *b;
                            *b = s * *a + c * t;
                            *a = c * *a - s * t;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Symmetric tridiagonal matrix: `diag[i]`, and `off[i]` coupling `i, i+1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::domain(format!(
                "tridiagonal needs n >= 1 diagonal and n-1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::domain("tridiagonal has non-finite entries"));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Infinity norm (max absolute row sum), an upper bound on `||T||_2`.
    pub fn norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// All eigenvalues, descending, by implicit QL.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        implicit_ql(&mut d, &mut e, None)?;
        d.sort_by(|a, b| b.total_cmp(a));
        Ok(d)
    }

    fn pivmin(&self) -> f64 {
        let emax = self.off.iter().fold(0.0f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE.max(f64::MIN_POSITIVE * emax)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection.
    pub fn kth_smallest(&self, index: usize) -> Result<f64> {
        if index >= self.dim() {
            return Err(Error::domain(format!("eigenvalue index {index} out of range {}", self.dim())));
        }
        let pivmin = self.pivmin();
        let (glo, ghi) = self.gershgorin();
        let pad = 2.0 * EPS * glo.abs().max(ghi.abs()) + 2.0 * pivmin;
        let (mut lo, mut hi) = (glo - pad, ghi + pad);
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * EPS * lo.abs().max(hi.abs()) + pivmin {
                break;
            }
            if self.count_below(mid, pivmin) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit eigenvector for an (accurate) eigenvalue by inverse iteration.
    fn inverse_iteration(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        let lu = ShiftedLu::factor(self, lambda);
        // Deterministic start with no special alignment to any eigenvector.
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_894_9).sin()).collect();
        normalize(&mut x);
        for _ in 0..3 {
            lu.solve(&mut x);
            if !normalize(&mut x) {
                break;
            }
        }
        x
    }

    /// Lowest eigenvalue and its unit eigenvector.
    ///
    /// Off-diagonals that are negligible against their diagonal neighbours
    /// split the matrix; the vector is supported on one unreduced block, the
    /// first one attaining the minimum.
    pub fn lowest_eigenpair(&self) -> Result<(f64, Vec<f64>)> {
        let n = self.dim();
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        let mut start = 0;
        for end in 0..n {
            let split = end + 1 == n || self.off[end].abs() <= EPS * (self.diag[end].abs() + self.diag[end + 1].abs());
            if !split {
                continue;
            }
            let block = SymTridiagonal { diag: self.diag[start..=end].to_vec(), off: self.off[start..end].to_vec() };
            let lambda = block.kth_smallest(0)?;
            if best.as_ref().is_none_or(|(b, _, _)| lambda < *b) {
                let v = block.inverse_iteration(lambda);
                best = Some((lambda, start, v));
            }
            start = end + 1;
        }
        let (_, offset, local) = best.expect("at least one block");
        let mut v = vec![0.0; n];
        v[offset..offset + local.len()].copy_from_slice(&local);
        let tv = self.mul_vec(&v);
        let rayleigh = dot(&v, &tv);
        let residual = tv.iter().zip(&v).map(|(a, b)| (a - rayleigh * b).powi(2)).sum::<f64>().sqrt();
        let norm = self.norm();
        if !(residual <= 1e-10 * norm.max(f64::MIN_POSITIVE)) {
            return Err(Error::numeric(format!(
                "inverse iteration on a {n}x{n} block left residual {residual:e} (norm {norm:e})"
            )));
        }
        Ok((rayleigh, v))
    }
}

/// LU factorization of `T - shift I` with partial pivoting (LAPACK `gttrf`).
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        let tiny = EPS * t.norm().max(f64::MIN_POSITIVE);
        for di in d.iter_mut() {
            if di.abs() < tiny {
                *di = if *di < 0.0 { -tiny } else { tiny };
            }
        }
        ShiftedLu { dl, d, du, du2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scales to unit length; returns false when the vector is not finite or zero.
pub(crate) fn normalize(v: &mut [f64]) -> bool {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(scale.is_finite() && scale > 0.0) {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= scale);
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    true
}
