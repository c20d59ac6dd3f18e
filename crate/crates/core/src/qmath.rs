//! q-numbers, q-factorials and q-binomials.
//!
//! Everything that grows with `N` is evaluated in the log domain. For
//! `gamma = ln q > 0` the q-number factors as
//!
//! ```text
//! ln[x] = gamma (x - 1) + ln((1 - e^{-2 gamma x}) / (1 - e^{-2 gamma}))
//! ```
//!
//! so `ln[n]!` is an exact quadratic `gamma n(n-1)/2` plus a bounded
//! residual sum. Keeping the quadratic part as an integer coefficient lets
//! callers cancel it exactly before multiplying by `gamma`, which is what keeps
//! Schmidt weights accurate to ~1e-12 at `N = 2000, q = 5`.
//!
//! Every function is even in `gamma`, so `q < 1` is handled by the `q <-> 1/q`
//! symmetry and the arithmetic below only ever sees `|gamma|`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this value of `|gamma| * max(|x|, 1)` the sinh ratio is replaced by
/// its second-order series to avoid cancellation near `q = 1`.
pub const SERIES_CROSSOVER: f64 = 1e-8;

/// The deformation parameter `q > 0` together with `gamma = ln q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParams {
    q: f64,
    gamma: f64,
}

impl QParams {
    /// The undeformed algebra, `q = 1`.
    pub const CLASSICAL: QParams = QParams { q: 1.0, gamma: 0.0 };

    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::domain(format!("q must be a positive finite number, got {q}")));
        }
        Ok(QParams { q, gamma: q.ln() })
    }

    pub fn from_gamma(gamma: f64) -> Result<Self> {
        let q = gamma.exp();
        if !(gamma.is_finite() && q.is_finite() && q > 0.0) {
            return Err(Error::domain(format!("gamma = {gamma} does not give a representable q")));
        }
        Ok(QParams { q, gamma })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `|gamma|`, the canonical representative under `q <-> 1/q`.
    pub fn abs_gamma(&self) -> f64 {
        self.gamma.abs()
    }

    pub fn is_classical(&self) -> bool {
        self.gamma == 0.0
    }

    /// The parameters for `1/q`.
    pub fn inverse(&self) -> Self {
        QParams { q: 1.0 / self.q, gamma: -self.gamma }
    }
}

/// Residual `ln[x] - g (x - 1)` for `g = |gamma| >= 0` and `x > 0`.
///
/// Bounded by `|ln x|` plus a constant, which is what makes prefix sums of it
/// accurate.
fn residual(x: f64, g: f64) -> f64 {
    if g == 0.0 {
        x.ln()
    } else if g * x.max(1.0) < SERIES_CROSSOVER {
        x.ln() + (g * g * (x * x - 1.0) / 6.0).ln_1p() - g * (x - 1.0)
    } else {
        (-(-2.0 * g * x).exp_m1()).ln() - (-(-2.0 * g).exp_m1()).ln()
    }
}

/// The q-number `[x] = (q^x - q^-x) / (q - q^-1) = sinh(gamma x) / sinh(gamma)`.
///
/// Returns a range error when `[x]` itself is not representable; use
/// [`ln_q_number`] in that regime.
pub fn q_number(x: f64, params: QParams) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("q-number of NaN"));
    }
    let g = params.abs_gamma();
    if g == 0.0 {
        return Ok(x);
    }
    if g * x.abs().max(1.0) < SERIES_CROSSOVER {
        return Ok(x * (1.0 + g * g * (x * x - 1.0) / 6.0));
    }
    let direct = (g * x).sinh() / g.sinh();
    if direct.is_finite() {
        return Ok(direct);
    }
    let via_log = ln_q_number(x.abs(), params)?.exp();
    if via_log.is_finite() {
        Ok(via_log.copysign(x))
    } else {
        Err(Error::range(format!("[{x}] overflows at q = {} (use the log-domain form)", params.q())))
    }
}

/// `ln [x]` for `x > 0`, computed without forming `[x]`.
pub fn ln_q_number(x: f64, params: QParams) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln [x] requires finite x > 0, got {x}")));
    }
    let g = params.abs_gamma();
    Ok(g * (x - 1.0) + residual(x, g))
}

/// `ln [n]!` with `ln [0]! = 0`.
pub fn ln_q_factorial(n: u64, params: QParams) -> f64 {
    let g = params.abs_gamma();
    let mut sum = Neumaier::default();
    for j in 1..=n {
        sum.add(residual(j as f64, g));
    }
    g * quadratic_factorial(n as i64) as f64 + sum.total()
}

/// `ln` of the q-binomial `[n]! / ([m]! [n-m]!)`.
pub fn ln_q_binomial(n: i64, m: i64, params: QParams) -> Result<f64> {
    if n < 0 || m < 0 || m > n {
        return Err(Error::domain(format!("q-binomial requires 0 <= m <= n, got n = {n}, m = {m}")));
    }
    let g = params.abs_gamma();
    let small = m.min(n - m);
    let mut sum = Neumaier::default();
    for j in 1..=small {
        sum.add(residual((n - small + j) as f64, g) - residual(j as f64, g));
    }
    Ok(g * (m * (n - m)) as f64 + sum.total())
}

/// `n(n-1)/2`, the coefficient of `|gamma|` in `ln [n]!`.
pub(crate) fn quadratic_factorial(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Precomputed `ln [j]!` for `j = 0..=n_max`, stored as residual prefix sums.
///
/// A q-binomial lookup is then O(1): its `|gamma|` coefficient `m(n-m)` is an
/// integer and only the residuals need subtracting.
#[derive(Debug, Clone)]
pub struct LnQFactorials {
    abs_gamma: f64,
    prefix: Vec<f64>,
}

impl LnQFactorials {
    pub fn new(n_max: usize, params: QParams) -> Self {
        let g = params.abs_gamma();
        let mut prefix = Vec::with_capacity(n_max + 1);
        let mut sum = Neumaier::default();
        prefix.push(0.0);
        for j in 1..=n_max {
            sum.add(residual(j as f64, g));
            prefix.push(sum.total());
        }
        LnQFactorials { abs_gamma: g, prefix }
    }

    pub fn n_max(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn ln_factorial(&self, n: usize) -> f64 {
        self.abs_gamma * quadratic_factorial(n as i64) as f64 + self.prefix[n]
    }

    /// `ln [n choose m]` split as `(c, r)` with value `|gamma| c + r`.
    ///
    /// Caller guarantees `m <= n <= n_max`.
    pub(crate) fn ln_binomial_split(&self, n: usize, m: usize) -> (i64, f64) {
        debug_assert!(m <= n && n <= self.n_max());
        let quad = (m * (n - m)) as i64;
        (quad, self.prefix[n] - self.prefix[m] - self.prefix[n - m])
    }

    pub fn ln_binomial(&self, n: usize, m: usize) -> f64 {
        let (quad, rest) = self.ln_binomial_split(n, m);
        self.abs_gamma * quad as f64 + rest
    }
}

/// Compensated (Neumaier) summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qp(q: f64) -> QParams {
        QParams::new(q).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    /// Exact classical binomial via integer arithmetic.
    fn binom_u128(n: u32, m: u32) -> u128 {
        let m = m.min(n - m);
        let mut acc: u128 = 1;
        for j in 0..m {
            acc = acc * (n - j) as u128 / (j + 1) as u128;
        }
        acc
    }

    fn log_sum_exp(a: f64, b: f64) -> f64 {
        let hi = a.max(b);
        hi + ((a - hi).exp() + (b - hi).exp()).ln()
    }

    #[test]
    fn rejects_bad_q() {
        assert!(QParams::new(0.0).is_err());
        assert!(QParams::new(-1.0).is_err());
        assert!(QParams::new(f64::NAN).is_err());
        assert!(QParams::new(f64::INFINITY).is_err());
        assert_eq!(QParams::new(1.0).unwrap().gamma(), 0.0);
    }

    #[test]
    fn q_number_examples() {
        assert_eq!(q_number(4.0, QParams::CLASSICAL).unwrap(), 4.0);
        // 2^3 + 2^1 + 2^-1 + 2^-3
        assert!(rel(q_number(4.0, qp(2.0)).unwrap(), 10.625) < 1e-15);
        for q in [0.3, 1.0, 2.0, 7.0] {
            assert_eq!(q_number(0.0, qp(q)).unwrap(), 0.0);
        }
        assert!(q_number(f64::NAN, qp(2.0)).is_err());
    }

    #[test]
    fn q_number_half_integer() {
        // [1/2] = 1 / (2 cosh(gamma/2))
        let p = qp(3.0);
        let expect = 1.0 / (2.0 * (p.gamma() / 2.0).cosh());
        assert!(rel(q_number(0.5, p).unwrap(), expect) < 1e-15);
        assert_eq!(q_number(0.5, QParams::CLASSICAL).unwrap(), 0.5);
    }

    #[test]
    fn q_number_overflow_is_range_error() {
        let p = qp(1.5);
        assert!(matches!(q_number(3000.0, p), Err(Error::Range(_))));
        // sinh(gamma x) overflows but the ratio does not.
        let p = qp(10.0);
        let v = q_number(308.0, p).unwrap();
        let expect = (ln_q_number(308.0, p).unwrap()).exp();
        assert!(rel(v, expect) < 1e-13);
    }

    #[test]
    fn ln_q_number_examples() {
        assert_eq!(ln_q_number(4.0, QParams::CLASSICAL).unwrap(), 4f64.ln());
        assert!((ln_q_number(4.0, qp(2.0)).unwrap() - 10.625f64.ln()).abs() < 1e-14);
        assert!(ln_q_number(0.0, qp(2.0)).is_err());
        assert!(ln_q_number(-1.0, qp(2.0)).is_err());
    }

    #[test]
    fn ln_q_number_large_argument_matches_extended_precision() {
        // 50-digit evaluation of ln(sinh(1000 ln 1.5) / sinh(ln 1.5)).
        let expect = 405.647_429_664_958_3;
        let p = qp(1.5);
        let got = ln_q_number(1000.0, p).unwrap();
        assert!((got - expect).abs() < 1e-12 * expect);
        assert!(q_number(1000.0, p).is_ok());
        assert!(q_number(2000.0, p).is_err());
        // Half-integer argument at q = 3.
        let got = ln_q_number(3.5, qp(3.0)).unwrap();
        assert!((got - 2.863_856_405_386_373_7).abs() < 1e-14);
    }

    #[test]
    fn ln_q_factorial_examples() {
        assert_eq!(ln_q_factorial(0, qp(2.0)), 0.0);
        assert!((ln_q_factorial(3, QParams::CLASSICAL) - 6f64.ln()).abs() < 1e-15);
        // [3][2][1] at q = 2 is 5.25 * 2.5
        let direct: f64 = (1..=3).map(|x| q_number(x as f64, qp(2.0)).unwrap()).product();
        assert!((direct - 13.125).abs() < 1e-13);
        assert!((ln_q_factorial(3, qp(2.0)) - 13.125f64.ln()).abs() < 1e-14);
        // 50-digit value of ln [300]! at q = 1.7.
        let got = ln_q_factorial(300, qp(1.7));
        assert!(rel(got, 23_925.464_405_547_12) < 1e-14);
    }

    #[test]
    fn ln_q_binomial_examples() {
        assert!((ln_q_binomial(2, 1, QParams::CLASSICAL).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((ln_q_binomial(2, 1, qp(2.0)).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        let p = qp(1.3);
        let a = ln_q_binomial(5, 2, p).unwrap();
        let b = ln_q_binomial(5, 3, p).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(ln_q_binomial(5, 6, p).is_err());
        assert!(ln_q_binomial(5, -1, p).is_err());
        // 50-digit reference.
        let got = ln_q_binomial(200, 73, qp(0.8)).unwrap();
        assert!(rel(got, 2_071.108_754_311_543) < 1e-14);
    }

    #[test]
    fn binomial_edges_are_zero() {
        for q in [0.5, 1.0, 2.0, 5.0] {
            for n in 0..60 {
                assert_eq!(ln_q_binomial(n, 0, qp(q)).unwrap(), 0.0);
                assert_eq!(ln_q_binomial(n, n, qp(q)).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn classical_binomials_exact() {
        for n in 0..=30u32 {
            for m in 0..=n {
                let expect = (binom_u128(n, m) as f64).ln();
                let got = ln_q_binomial(n as i64, m as i64, QParams::CLASSICAL).unwrap();
                assert!((got - expect).abs() <= 1e-13 * expect.max(1.0), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn exp_of_log_matches_direct() {
        for q in [0.5, 0.9, 1.0, 1.1, 2.0] {
            let p = qp(q);
            for n in 1..=50 {
                let x = n as f64;
                let direct = q_number(x, p).unwrap();
                let via_log = ln_q_number(x, p).unwrap().exp();
                assert!(rel(via_log, direct) < 1e-12, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn pascal_recurrence_in_log_domain() {
        // [n, m] = q^m [n-1, m] + q^(m-n) [n-1, m-1]
        for q in [0.5, 0.9, 1.1, 2.0, 3.7] {
            let p = qp(q);
            for n in 1..=40i64 {
                for m in 1..n {
                    let lhs = ln_q_binomial(n, m, p).unwrap();
                    let a = m as f64 * p.gamma() + ln_q_binomial(n - 1, m, p).unwrap();
                    let b = (m - n) as f64 * p.gamma() + ln_q_binomial(n - 1, m - 1, p).unwrap();
                    let rhs = log_sum_exp(a, b);
                    assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0), "q={q} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn smooth_through_classical_limit() {
        for x in [0.5, 1.0, 3.0, 17.0] {
            let at_one = q_number(x, QParams::CLASSICAL).unwrap();
            for g in [1e-12, 1e-10, 1e-9, 2e-9, 1e-8, 1e-7, 1e-6] {
                let v = q_number(x, QParams::from_gamma(g).unwrap()).unwrap();
                assert!((v - at_one).abs() < 1e-9 * at_one, "x={x} g={g}");
                let lv = ln_q_number(x, QParams::from_gamma(g).unwrap()).unwrap();
                assert!((lv - at_one.ln()).abs() < 1e-9, "x={x} g={g}");
            }
        }
    }

    #[test]
    fn table_matches_direct() {
        for q in [0.5, 1.0, 1.01, 2.0, 5.0] {
            let p = qp(q);
            let table = LnQFactorials::new(120, p);
            for n in [0usize, 1, 7, 60, 120] {
                let direct = ln_q_factorial(n as u64, p);
                assert!((table.ln_factorial(n) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
                for m in [0, n / 3, n / 2, n] {
                    let d = ln_q_binomial(n as i64, m as i64, p).unwrap();
                    assert!((table.ln_binomial(n, m) - d).abs() <= 1e-12 * d.abs().max(1.0));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn q_number_inverse_symmetric(x in 0.0f64..200.0, q in 0.05f64..20.0) {
            let p = qp(q);
            let a = q_number(x, p).unwrap();
            let b = q_number(x, p.inverse()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        }

        #[test]
        fn binomial_symmetries(n in 0i64..400, frac in 0.0f64..=1.0, q in 0.05f64..20.0) {
            let m = ((n as f64) * frac).round() as i64;
            let p = qp(q);
            let a = ln_q_binomial(n, m, p).unwrap();
            let b = ln_q_binomial(n, n - m, p).unwrap();
            let c = ln_q_binomial(n, m, p.inverse()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            prop_assert!((a - c).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
