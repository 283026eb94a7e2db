//! Hermite–Kampé de Fériet ("heat") polynomials and their relatives.
//!
//! `H_n` and `H_{m,n}` are evaluated through their normalized three-term
//! recurrences (`H_n / sqrt(n!)`, `H_{m,n} / sqrt(m! n!)`) carried in
//! double-double, then rescaled by an extended-range factorial weight.
//! The explicit sums are the fallback when a recurrence overflows; they run
//! in increasing summation index with compensated accumulation.
//!
//! The crate-internal *weighted* evaluators fold a scale factor into the
//! result, so the unitary and state modules can form `H_n / n!` or
//! `H_n / sqrt(n!)` at indices where `H_n` itself would overflow.

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::error::{FockError, Result};
use crate::numeric::{check_index, dd_is_finite, from_dd, inv_sqrt_dd, sqrt_dd, to_dd, CompensatedSum, ComplexDd};
use crate::scale::Scale;
use twofloat::TwoFloat;

/// Number of entries in the shared `ln k!` table.
pub const LOG_FACTORIAL_TABLE_LEN: usize = 4096;

/// Hard cap on the number of terms summed by the infinite-series routines.
pub const SERIES_CAP: usize = 500;

/// Default threshold on `|1 - 4 y t^2 v|` below which the Mehler kernel is
/// treated as singular.
pub const MEHLER_SINGULAR_EPS: f64 = 1e-12;

/// Series stop when this many consecutive terms fall below
/// `SERIES_REL_TOL * |partial sum|`.
const SERIES_QUIET_TERMS: usize = 3;
const SERIES_REL_TOL: f64 = 1e-16;
const SERIES_GROWTH_LIMIT: usize = 10;

/// Table of `ln k!` for `k = 0..len`.
#[derive(Debug, Clone)]
pub struct LogFactorialTable {
    ln: Vec<f64>,
}

static GLOBAL_TABLE: Lazy<LogFactorialTable> = Lazy::new(|| LogFactorialTable::new(LOG_FACTORIAL_TABLE_LEN - 1));

impl LogFactorialTable {
    /// Builds the table up to and including `max`.
    pub fn new(max: usize) -> Self {
        let mut ln = Vec::with_capacity(max + 1);
        ln.push(0.0);
        // Compensated running sum of ln k keeps the recurrence residual at
        // the rounding level of each entry.
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..=max {
            let y = (k as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            ln.push(sum);
        }
        Self { ln }
    }

    /// The process-wide table shared by all evaluators.
    pub fn global() -> &'static Self {
        &GLOBAL_TABLE
    }

    pub fn max(&self) -> usize {
        self.ln.len() - 1
    }

    pub fn ln_factorial(&self, k: usize) -> Option<f64> {
        self.ln.get(k).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.ln
    }
}

/// `ln k!` from the global table. Panics past the table end; callers
/// bound their indices first.
#[inline]
pub(crate) fn lnf(k: usize) -> f64 {
    GLOBAL_TABLE.ln[k]
}

/// Truncated series value together with the magnitude of the last term kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
    pub last_term: f64,
}

/// `scale · H_n(x, y)`.
///
/// Uses the recurrence `g_{k+1} = (x g_k + 2 sqrt(k) y g_{k-1}) / sqrt(k+1)`
/// for `g_k = H_k/sqrt(k!)`, whose rounding error tracks the size of the
/// result rather than the size of the largest term of the explicit sum.
pub(crate) fn hkdf_times(n: usize, x: Complex64, y: Complex64, scale: Scale) -> Complex64 {
    let g = hkdf_normalized_table_dd(n + 1, x, y)[n];
    if dd_is_finite(g) {
        Scale::sqrt_fact(n).mul(scale).apply_dd(g)
    } else {
        hkdf_weighted_sum(n, x, y, scale)
    }
}

/// Explicit sum with the weight folded into every term.
fn hkdf_weighted_sum(n: usize, x: Complex64, y: Complex64, scale: Scale) -> Complex64 {
    let base = scale.mul(Scale::fact(n));
    let mut acc = CompensatedSum::new();
    for r in 0..=n / 2 {
        let coef = base.div(Scale::fact(n - 2 * r).mul(Scale::fact(r)));
        acc.add(coef.apply(x.powi((n - 2 * r) as i32) * y.powi(r as i32)));
    }
    acc.value()
}

/// `H_n(x, y) / n!`, the Taylor coefficient of `e^{tx + t^2 y}`.
#[inline]
pub(crate) fn hkdf_reduced(n: usize, x: Complex64, y: Complex64) -> Complex64 {
    hkdf_times(n, x, y, Scale::ONE.div(Scale::fact(n)))
}

/// `[H_k(x,y)/sqrt(k!)]` for `k < len`.
pub(crate) fn hkdf_normalized_table(len: usize, x: Complex64, y: Complex64) -> Vec<Complex64> {
    let table = hkdf_normalized_table_dd(len, x, y);
    if table.iter().all(|&v| dd_is_finite(v)) {
        table.into_iter().map(from_dd).collect()
    } else {
        (0..len).map(|k| hkdf_weighted_sum(k, x, y, Scale::sqrt_fact(k).div(Scale::fact(k)))).collect()
    }
}

/// The normalized recurrence carried in double-double; may overflow.
pub(crate) fn hkdf_normalized_table_dd(len: usize, x: Complex64, y: Complex64) -> Vec<ComplexDd> {
    let (x, y) = (to_dd(x), to_dd(y));
    let mut table = Vec::with_capacity(len);
    let mut prev = ComplexDd::default();
    let mut cur = to_dd(Complex64::new(1.0, 0.0));
    for k in 0..len {
        table.push(cur);
        let two_sq = sqrt_dd(k) * TwoFloat::from(2.0);
        let next = (x * cur + y * prev * two_sq) * inv_sqrt_dd(k + 1);
        prev = cur;
        cur = next;
    }
    table
}

/// Two-variable Hermite polynomial
/// `H_n(x,y) = n! Σ_{r ≤ n/2} x^{n-2r} y^r / ((n-2r)! r!)`.
pub fn hkdf(n: usize, x: Complex64, y: Complex64) -> Result<Complex64> {
    check_index(n)?;
    Ok(hkdf_times(n, x, y, Scale::ONE))
}

/// `H_n(x, y) / n!`; finite at every index where `H_n` would overflow.
pub fn hkdf_scaled(n: usize, x: Complex64, y: Complex64) -> Result<Complex64> {
    check_index(n)?;
    Ok(hkdf_reduced(n, x, y))
}

/// `H_n(x, 0) = x^n`.
pub fn hkdf_degenerate(n: usize, x: Complex64) -> Result<Complex64> {
    check_index(n)?;
    Ok(x.powi(n as i32))
}

/// `H_n(0, y)`: `y^{n/2} n!/(n/2)!` for even `n`, zero for odd `n`.
pub fn hkdf_degenerate_y(n: usize, y: Complex64) -> Result<Complex64> {
    check_index(n)?;
    Ok(degenerate_y_weighted(n, y, 0.0))
}

pub(crate) fn degenerate_y_weighted(n: usize, y: Complex64, log_weight: f64) -> Complex64 {
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    y.powi((n / 2) as i32) * (log_weight + lnf(n) - lnf(n / 2)).exp()
}

/// `scale · H_{m,n}(x,y; z,u | tau)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn hkdf2_times(
    m: usize,
    n: usize,
    x: Complex64,
    y: Complex64,
    z: Complex64,
    u: Complex64,
    tau: Complex64,
    scale: Scale,
) -> Complex64 {
    let h = Hkdf2Table::new(m + 1, n + 1, x, y, z, u, tau).get_dd(m, n);
    if dd_is_finite(h) {
        scale.mul(Scale::sqrt_fact(m)).mul(Scale::sqrt_fact(n)).apply_dd(h)
    } else {
        hkdf2_weighted_sum(m, n, x, y, z, u, tau, scale)
    }
}

/// Explicit sum over `r` with the weight folded into every term.
#[allow(clippy::too_many_arguments)]
pub(crate) fn hkdf2_weighted_sum(
    m: usize,
    n: usize,
    x: Complex64,
    y: Complex64,
    z: Complex64,
    u: Complex64,
    tau: Complex64,
    scale: Scale,
) -> Complex64 {
    let gx = hkdf_normalized_table(m + 1, x, y);
    let gz = hkdf_normalized_table(n + 1, z, u);
    let base = scale.mul(Scale::fact(m)).mul(Scale::fact(n));
    let mut acc = CompensatedSum::new();
    for r in 0..=m.min(n) {
        let coef = base.div(Scale::fact(r).mul(Scale::sqrt_fact(m - r)).mul(Scale::sqrt_fact(n - r)));
        acc.add(coef.apply(gx[m - r] * gz[n - r] * tau.powi(r as i32)));
    }
    acc.value()
}

/// `h_{m,n} = H_{m,n}/sqrt(m! n!)` for `m < rows`, `n < cols`, filled with
///
/// `sqrt(n+1) h_{m,n+1} = z h_{m,n} + 2 sqrt(n) u h_{m,n-1} + sqrt(m) τ h_{m-1,n}`,
///
/// which follows from differentiating the generating function
/// `exp(xs + ys² + zt + ut² + τst)` in `t`. Unlike the sum over `r`, it does
/// not cancel large terms against each other.
pub(crate) struct Hkdf2Table {
    cols: usize,
    data: Vec<ComplexDd>,
}

impl Hkdf2Table {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        rows: usize,
        cols: usize,
        x: Complex64,
        y: Complex64,
        z: Complex64,
        u: Complex64,
        tau: Complex64,
    ) -> Self {
        let mut data = vec![ComplexDd::default(); rows * cols];
        for (m, g) in hkdf_normalized_table_dd(rows, x, y).into_iter().enumerate() {
            data[m * cols] = g;
        }
        let (z, u, tau) = (to_dd(z), to_dd(u), to_dd(tau));
        let sq: Vec<TwoFloat> = (0..rows.max(cols)).map(sqrt_dd).collect();
        let inv_sq: Vec<TwoFloat> =
            (0..cols).map(|k| if k == 0 { TwoFloat::from(0.0) } else { inv_sqrt_dd(k) }).collect();
        for n in 0..cols.saturating_sub(1) {
            for m in 0..rows {
                let mut next = z * data[m * cols + n];
                if n > 0 {
                    next += u * data[m * cols + n - 1] * (sq[n] + sq[n]);
                }
                if m > 0 {
                    next += tau * data[(m - 1) * cols + n] * sq[m];
                }
                data[m * cols + n + 1] = next * inv_sq[n + 1];
            }
        }
        Self { cols, data }
    }

    #[inline]
    pub(crate) fn get_dd(&self, m: usize, n: usize) -> ComplexDd {
        self.data[m * self.cols + n]
    }

    /// `h_{m,n}` rounded to double; non-finite if the recurrence overflowed.
    #[inline]
    pub(crate) fn get(&self, m: usize, n: usize) -> Complex64 {
        let v = self.data[m * self.cols + n];
        if dd_is_finite(v) {
            from_dd(v)
        } else {
            Complex64::new(f64::NAN, f64::NAN)
        }
    }
}

/// Two-index polynomial
/// `H_{m,n}(x,y;z,u|τ) = m! n! Σ_r H_{m-r}(x,y) H_{n-r}(z,u) τ^r / ((m-r)! r! (n-r)!)`.
pub fn hkdf2(
    m: usize,
    n: usize,
    x: Complex64,
    y: Complex64,
    z: Complex64,
    u: Complex64,
    tau: Complex64,
) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    Ok(hkdf2_times(m, n, x, y, z, u, tau, Scale::ONE))
}

/// `H_{m,n}(0,0;0,0|X) = δ_{mn} n! X^n`.
pub fn hkdf2_rotation_degenerate(m: usize, n: usize, x_rot: Complex64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    if m != n {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(x_rot.powi(n as i32) * lnf(n).exp())
}

/// Selects the even or odd incomplete Hermite polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl TryFrom<u8> for Parity {
    type Error = FockError;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            other => Err(FockError::InvalidParameter(format!("parity selector must be 0 or 1, got {other}"))),
        }
    }
}

/// Incomplete Hermite polynomial `₂,ε h_{m,n}(x,y|τ)`, evaluated from its
/// explicit double-factorial sum (the operational form is ambiguous when
/// both variables vanish).
pub fn incomplete_hermite(
    parity: Parity,
    m: usize,
    n: usize,
    x: Complex64,
    y: Complex64,
    tau: Complex64,
) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let eps = parity.offset();
    let base = lnf(m + eps) + lnf(n + eps);
    let mut acc = CompensatedSum::new();
    for r in 0..=m.min(n) {
        let coef = (base - lnf(m - r) - lnf(n - r) - lnf(2 * r + eps)).exp();
        acc.add(x.powi((m - r) as i32) * y.powi((n - r) as i32) * tau.powi((2 * r + 2 * eps) as i32) * coef);
    }
    Ok(acc.value())
}

fn check_series_len(n_max: usize) -> Result<()> {
    if n_max > SERIES_CAP {
        Err(FockError::IndexOutOfBounds { index: n_max, max: SERIES_CAP })
    } else {
        Ok(())
    }
}

/// Partial sum `Σ_{n=0}^{N} t^n/n! H_n(x,y)` of the generating function
/// `e^{tx + t^2 y}`. All `N + 1` terms are summed.
pub fn gen_func_truncated(x: Complex64, y: Complex64, t: Complex64, n_max: usize) -> Result<SeriesSum> {
    check_series_len(n_max)?;
    let mut acc = CompensatedSum::new();
    let mut last = 0.0;
    for n in 0..=n_max {
        let term = t.powi(n as i32) * hkdf_reduced(n, x, y);
        acc.add(term);
        last = term.norm();
    }
    Ok(SeriesSum { value: acc.value(), terms: n_max + 1, last_term: last })
}

/// Closed form of `G(x,y;z,v|t) = Σ t^n/n! H_n(x,y) H_n(z,v)`:
/// `(1 - 4yt²v)^{-1/2} exp{(xtz + t²(x²v + yz²)) / (1 - 4yt²v)}`, principal
/// square root.
pub fn mehler_closed(x: Complex64, y: Complex64, z: Complex64, v: Complex64, t: Complex64) -> Result<Complex64> {
    mehler_closed_eps(x, y, z, v, t, MEHLER_SINGULAR_EPS)
}

pub fn mehler_closed_eps(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    v: Complex64,
    t: Complex64,
    eps: f64,
) -> Result<Complex64> {
    let t2 = t * t;
    let denom = Complex64::new(1.0, 0.0) - y * t2 * v * 4.0;
    if denom.norm() < eps {
        return Err(FockError::Singular(denom.norm()));
    }
    let exponent = (x * t * z + t2 * (x * x * v + y * z * z)) / denom;
    Ok(exponent.exp() / denom.sqrt())
}

/// Direct summation of the Mehler series, up to `n_max` terms.
///
/// Stops early once three consecutive terms fall below `1e-16` of the
/// running sum; reports non-convergence if the terms grow for ten
/// consecutive indices.
pub fn mehler_series(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    v: Complex64,
    t: Complex64,
    n_max: usize,
) -> Result<SeriesSum> {
    check_series_len(n_max)?;
    let mut acc = CompensatedSum::new();
    let (mut quiet, mut growing) = (0usize, 0usize);
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    let mut terms = 0;
    for n in 0..=n_max {
        // t^n/n! H_n H_n, with each polynomial scaled by 1/sqrt(n!)
        let half = Scale::ONE.div(Scale::sqrt_fact(n));
        let term = t.powi(n as i32) * hkdf_times(n, x, y, half) * hkdf_times(n, z, v, half);
        acc.add(term);
        terms = n + 1;
        last = term.norm();
        if !last.is_finite() {
            return Err(FockError::NonConvergent { terms, last_term: last });
        }
        growing = if last > prev { growing + 1 } else { 0 };
        prev = last;
        quiet = if last < SERIES_REL_TOL * acc.value().norm() { quiet + 1 } else { 0 };
        if quiet >= SERIES_QUIET_TERMS {
            break;
        }
    }
    // a convergent series may grow for a while before it decays, so only
    // growth that persists up to the truncation point is flagged
    if growing >= SERIES_GROWTH_LIMIT {
        return Err(FockError::NonConvergent { terms, last_term: last });
    }
    Ok(SeriesSum { value: acc.value(), terms, last_term: last })
}

/// Mixed derivative `∂_x^m ∂_y^n e^{ax² + bxy + cy²}` in closed form:
/// `H_{m,n}(2ax+by, a; 2cy+bx, c | b) e^{ax² + bxy + cy²}`.
pub fn mixed_deriv_quadexp(
    m: usize,
    n: usize,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    x: Complex64,
    y: Complex64,
) -> Result<Complex64> {
    let poly = hkdf2(m, n, a * x * 2.0 + b * y, a, c * y * 2.0 + b * x, c, b)?;
    Ok(poly * (a * x * x + b * x * y + c * y * y).exp())
}

/// Generalized Laguerre polynomial
/// `L_n^{(k)}(x) = Σ_j (-1)^j C(n+k, n-j) x^j / j!`, valid for integer
/// `k ≥ -n`.
pub fn laguerre_generalized(n: usize, k: i64, x: Complex64) -> Result<Complex64> {
    check_index(n)?;
    if k < -(n as i64) {
        return Err(FockError::Domain(format!("Laguerre order k = {k} is below -n = -{n}")));
    }
    let top = (n as i64 + k) as usize;
    if top > GLOBAL_TABLE.max() {
        return Err(FockError::IndexOutOfBounds { index: top, max: GLOBAL_TABLE.max() });
    }
    let mut acc = CompensatedSum::new();
    for j in 0..=n {
        let lower = n - j;
        if lower > top {
            continue;
        }
        let coef = (lnf(top) - lnf(lower) - lnf(top - lower) - lnf(j)).exp();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(x.powi(j as i32) * (sign * coef));
    }
    Ok(acc.value())
}
