//! Fock density-matrix elements of noisy Gaussian states
//! `ρ = U ρ_th U†`, `U = S(z) D(α)` (a rotation leaves `ρ_th` unchanged).
//!
//! The closed form factors the density matrix as `ρ = J · K · W · K†` with a
//! scalar `J`, a lower-triangular `K` and a Hermitian positive semidefinite
//! `W`. Raw `K` and `W` entries involve factorials that overflow beyond
//! index ~85, so assembly moves `sqrt(r!)` from `W` into `K` on both sides,
//! which leaves the product unchanged.

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::hlpoly::{self, degenerate_y_weighted, hkdf_normalized_table, hkdf_times, lnf, SeriesSum};
use crate::matrix::ComplexMatrix;
use crate::numeric::{check_index, CompensatedSum};
use crate::scale::Scale;
use crate::unitary::{check_dim, derive_ordering, BosonicParams, OrderingParams, UnitaryTables};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Tail bound above which [`rho_series_coeff`] reports non-convergence.
pub const SERIES_TAIL_TOL: f64 = 1e-12;

/// Displacement `α`, squeeze `z = r e^{iθ}` and mean thermal photon number
/// `N̄` of a noisy Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParams {
    alpha: Complex64,
    r: f64,
    theta: f64,
    nbar: f64,
}

impl StateParams {
    pub fn new(alpha: Complex64, r: f64, theta: f64, nbar: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(FockError::InvalidParameter(format!("mean thermal photon number must be >= 0, got {nbar}")));
        }
        let b = BosonicParams::new(alpha, 0.0, r, theta)?;
        Ok(Self { alpha: b.alpha(), r: b.r(), theta: b.theta(), nbar })
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        Self::new(ZERO, 0.0, 0.0, nbar)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn nbar(&self) -> f64 {
        self.nbar
    }

    /// Thermal ratio `Y = N̄/(N̄+1)`.
    pub fn thermal_ratio(&self) -> f64 {
        self.nbar / (self.nbar + 1.0)
    }

    /// The generating unitary with rotation angle `phi`.
    pub fn bosonic(&self, phi: f64) -> BosonicParams {
        BosonicParams::new(self.alpha, phi, self.r, self.theta).expect("validated on construction")
    }
}

/// Derived quantities of the factored closed form.
///
/// Fields are public so that callers can evaluate the closed form from
/// hand-modified parameters (used by the verification tooling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerived {
    /// `Y = N̄/(N̄+1)`
    pub y_ratio: f64,
    /// `L = 1/(1 - Y² tanh² r)`
    pub l: f64,
    /// `a = L Y² u*`
    pub a: Complex64,
    /// `b = L Y`
    pub b: f64,
    pub j: f64,
    /// Ordering parameters of `S(z) D(α)` (rotation angle zero).
    pub ordering: OrderingParams,
}

impl StateDerived {
    pub fn z_poly(&self) -> Complex64 {
        self.ordering.z_poly
    }

    pub fn u(&self) -> Complex64 {
        self.ordering.u
    }

    /// First polynomial variable of `W`: `2 a z + b z*`.
    pub fn w_first(&self) -> Complex64 {
        let z = self.z_poly();
        self.a * z * 2.0 + z.conj() * self.b
    }

    /// First polynomial variable of `W`: `2 a* z* + b z`.
    pub fn w_second(&self) -> Complex64 {
        let z = self.z_poly();
        self.a.conj() * z.conj() * 2.0 + z * self.b
    }

    /// Exponent `a z² + a* z*² + b |z|²` of the Mehler kernel.
    pub fn kernel_exponent(&self) -> Complex64 {
        let z = self.z_poly();
        self.a * z * z + self.a.conj() * z.conj() * z.conj() + z.norm_sqr() * self.b
    }
}

pub fn derive_state(params: &StateParams) -> Result<StateDerived> {
    let ordering = derive_ordering(&params.bosonic(0.0));
    let y_ratio = params.thermal_ratio();
    let radicand = 1.0 - (y_ratio * params.r.tanh()).powi(2);
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(FockError::Domain(format!(
            "1 - Y² tanh² r = {radicand:e} is not positive; N̄ or r too large for double precision"
        )));
    }
    Ok(StateDerived::from_parts(y_ratio, 1.0 / radicand, ordering))
}

impl StateDerived {
    /// Completes `a`, `b` and `J` from `Y`, `L` and the ordering parameters.
    pub fn from_parts(y_ratio: f64, l: f64, ordering: OrderingParams) -> Self {
        let a = ordering.u.conj() * (l * y_ratio * y_ratio);
        let b = l * y_ratio;
        let mut derived = StateDerived { y_ratio, l, a, b, j: 0.0, ordering };
        let j =
            Complex64::new((1.0 - y_ratio) * ordering.k0.norm_sqr() * l.sqrt(), 0.0) * derived.kernel_exponent().exp();
        debug_assert!(j.im.abs() <= 1e-12 * (1.0 + j.re.abs()), "J = {j} is not real");
        derived.j = j.re;
        derived
    }
}

/// `(ρ_th)_{m,n} = (1 - Y) Y^m δ_{mn}`.
pub fn thermal_coeff(m: usize, n: usize, nbar: f64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(FockError::InvalidParameter(format!("mean thermal photon number must be >= 0, got {nbar}")));
    }
    if m != n {
        return Ok(ZERO);
    }
    let y = nbar / (nbar + 1.0);
    Ok(Complex64::new(y.powi(m as i32) / (nbar + 1.0), 0.0))
}

/// `K_{m,r} = sqrt(m!) H_{m-r}(x,y) X^r / ((m-r)! r!)`, zero above the diagonal.
pub fn k_entry(m: usize, r: usize, d: &StateDerived) -> Result<Complex64> {
    check_index(m)?;
    check_index(r)?;
    if r > m {
        return Ok(ZERO);
    }
    let op = &d.ordering;
    let weight = Scale::sqrt_fact(m).div(Scale::fact(m - r).mul(Scale::fact(r)));
    Ok(hkdf_times(m - r, op.x, op.y, weight) * op.x_rot.powi(r as i32))
}

/// `W_{r,s} = H_{r,s}(2az + bz*, a; 2a*z* + bz, a* | b)`.
pub fn w_entry(r: usize, s: usize, d: &StateDerived) -> Result<Complex64> {
    hlpoly::hkdf2(r, s, d.w_first(), d.a, d.w_second(), d.a.conj(), Complex64::new(d.b, 0.0))
}

/// Closed form of the thermal sum `G_{r,s} = sqrt(L) W_{r,s} e^{az² + a*z*² + b|z|²}`.
pub fn g_closed(r: usize, s: usize, d: &StateDerived) -> Result<Complex64> {
    Ok(w_entry(r, s, d)? * d.kernel_exponent().exp() * d.l.sqrt())
}

/// Direct summation of
/// `G_{r,s} = Σ_{j ≥ max(r,s)} H_{j-r}(z,u) H*_{j-s}(z,u) Y^j j! / ((j-r)! (j-s)!)`
/// up to `j = jmax`.
pub fn g_series(r: usize, s: usize, d: &StateDerived, jmax: usize) -> Result<SeriesSum> {
    check_index(r)?;
    check_index(s)?;
    if jmax > hlpoly::SERIES_CAP {
        return Err(FockError::IndexOutOfBounds { index: jmax, max: hlpoly::SERIES_CAP });
    }
    let (z, u, y) = (d.z_poly(), d.u(), d.y_ratio);
    let start = r.max(s);
    let mut acc = CompensatedSum::new();
    let mut quiet = 0;
    let mut last = 0.0;
    let mut terms = 0;
    for j in start..=jmax.max(start) {
        let term = if y == 0.0 {
            if j == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        } else {
            // split j! Y^j evenly between the two polynomial factors
            let half = Scale::sqrt_fact(j).mul(Scale::from_ln(0.5 * j as f64 * y.ln()));
            hkdf_times(j - r, z, u, half.div(Scale::fact(j - r)))
                * hkdf_times(j - s, z, u, half.div(Scale::fact(j - s))).conj()
        };
        acc.add(term);
        terms += 1;
        last = term.norm();
        quiet = if last < 1e-16 * acc.value().norm() { quiet + 1 } else { 0 };
        if quiet >= 3 {
            return Ok(SeriesSum { value: acc.value(), terms, last_term: last });
        }
    }
    let value = acc.value();
    if last > 1e-12 * value.norm() {
        return Err(FockError::NonConvergent { terms, last_term: last });
    }
    Ok(SeriesSum { value, terms, last_term: last })
}

/// Raw factor matrices `K` (lower triangular) and `W` (Hermitian PSD).
///
/// Raw `W` overflows double precision past index ~85; use [`rho_matrix`]
/// for the assembled density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrices {
    pub k: ComplexMatrix,
    pub w: ComplexMatrix,
}

pub fn factor_matrices(d: &StateDerived, dim: usize) -> Result<FactorMatrices> {
    check_dim(dim)?;
    let k = ComplexMatrix::from_fn_result(dim, dim, |m, r| k_entry(m, r, d))?;
    let w = ComplexMatrix::from_fn_result(dim, dim, |r, s| w_entry(r, s, d))?;
    Ok(FactorMatrices { k, w })
}

/// Balanced factors `K̂ = K·diag(sqrt(r!))` and
/// `Ŵ = diag(sqrt(r!))·W·diag(sqrt(s!))`, so that `K W K† = K̂ Ŵ K̂†`:
///
/// `K̂_{m,r} = sqrt(C(m,r)) g_{m-r}(x,y) X^r`,
/// `Ŵ_{r,s} = Σ_k sqrt(C(r,k) C(s,k)) g_{r-k}(P,a) g_{s-k}(Q,a*) b^k`
///
/// with `g_k = H_k/sqrt(k!)`, `P = 2az + bz*`, `Q = P*`.
struct ScaledFactors {
    k: ComplexMatrix,
    w: ComplexMatrix,
}

fn scaled_factors(d: &StateDerived, dim: usize) -> ScaledFactors {
    let op = &d.ordering;
    let gx = hkdf_normalized_table(dim, op.x, op.y);
    let rot: Vec<Complex64> = (0..dim).map(|r| op.x_rot.powi(r as i32)).collect();
    let k = ComplexMatrix::from_fn(dim, dim, |m, r| {
        if r > m {
            ZERO
        } else {
            Scale::sqrt_binomial(m, r).apply(gx[m - r] * rot[r])
        }
    });
    let gp = hkdf_normalized_table(dim, d.w_first(), d.a);
    let gq = hkdf_normalized_table(dim, d.w_second(), d.a.conj());
    let bpow: Vec<f64> = (0..dim).map(|k| d.b.powi(k as i32)).collect();
    let mut w = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for s in r..dim {
            let mut acc = CompensatedSum::new();
            for k in 0..=r {
                let weight = Scale::sqrt_binomial(r, k).mul(Scale::sqrt_binomial(s, k));
                acc.add(weight.apply(gp[r - k] * gq[s - k] * bpow[k]));
            }
            w[(r, s)] = acc.value();
            w[(s, r)] = acc.value().conj();
        }
    }
    ScaledFactors { k, w }
}

/// `ρ_{m,n} = J Σ_{r ≤ m} Σ_{s ≤ n} K_{m,r} W_{r,s} K*_{n,s}`.
pub fn rho_coeff(m: usize, n: usize, params: &StateParams) -> Result<Complex64> {
    rho_coeff_derived(m, n, &derive_state(params)?)
}

pub fn rho_coeff_derived(m: usize, n: usize, d: &StateDerived) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let f = scaled_factors(d, m.max(n) + 1);
    let mut acc = CompensatedSum::new();
    for r in 0..=m {
        for s in 0..=n {
            acc.add(f.k[(m, r)] * f.w[(r, s)] * f.k[(n, s)].conj());
        }
    }
    Ok(acc.value() * d.j)
}

/// `ρ = J K W K†` on the `dim x dim` block.
pub fn rho_matrix(params: &StateParams, dim: usize) -> Result<ComplexMatrix> {
    rho_matrix_from_derived(&derive_state(params)?, dim)
}

pub fn rho_matrix_from_derived(d: &StateDerived, dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(assemble(d, dim))
}

fn assemble(d: &StateDerived, dim: usize) -> ComplexMatrix {
    let f = scaled_factors(d, dim);
    let kw = f.k.matmul(&f.w).expect("square factors");
    let rho = kw.matmul(&f.k.adjoint()).expect("square factors");
    // W is Hermitian in exact arithmetic; project out the rounding residue
    let sym = rho.add(&rho.adjoint()).expect("square factors");
    sym.scale(Complex64::new(0.5 * d.j, 0.0)).with_trunc_dim(dim)
}

/// `ρ_{m,n} = (1 - Y) Σ_{j ≤ jmax} U_{m,j} Y^j U*_{n,j}` with `U = S(z) D(α)`.
pub fn rho_series_coeff(m: usize, n: usize, params: &StateParams, jmax: usize) -> Result<Complex64> {
    rho_series_with_rotation(m, n, &params.bosonic(0.0), params.nbar, jmax)
}

/// Series representation for a generating unitary with arbitrary rotation.
pub fn rho_series_with_rotation(
    m: usize,
    n: usize,
    unitary: &BosonicParams,
    nbar: f64,
    jmax: usize,
) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let series = ThermalSeries::new(unitary, nbar, m.max(n) + 1, jmax)?;
    Ok(series.entry(m, n))
}

/// Series representation of the whole `dim x dim` block.
pub fn rho_series_matrix(params: &StateParams, dim: usize, jmax: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let series = ThermalSeries::new(&params.bosonic(0.0), params.nbar, dim, jmax)?;
    Ok(ComplexMatrix::from_fn(dim, dim, |m, n| series.entry(m, n)))
}

struct ThermalSeries {
    /// rows of `U_{m,j} sqrt((1-Y) Y^j)`
    rows: Vec<Vec<Complex64>>,
}

impl ThermalSeries {
    fn new(unitary: &BosonicParams, nbar: f64, rows: usize, jmax: usize) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(FockError::InvalidParameter(format!("mean thermal photon number must be >= 0, got {nbar}")));
        }
        if jmax > hlpoly::SERIES_CAP {
            return Err(FockError::IndexOutOfBounds { index: jmax, max: hlpoly::SERIES_CAP });
        }
        let y = nbar / (nbar + 1.0);
        // |U_{m,j}| <= 1, so the neglected tail is at most Y^{jmax+1}
        let tail = y.powi(jmax as i32 + 1);
        if tail > SERIES_TAIL_TOL {
            return Err(FockError::NonConvergent { terms: jmax + 1, last_term: tail });
        }
        let tables = UnitaryTables::new(&derive_ordering(unitary), rows, jmax + 1);
        let weights: Vec<f64> = (0..=jmax).map(|j| (y.powi(j as i32) / (nbar + 1.0)).sqrt()).collect();
        let rows = (0..rows).map(|m| (0..=jmax).map(|j| tables.entry(m, j) * weights[j]).collect()).collect();
        Ok(Self { rows })
    }

    fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.rows[m].iter().zip(&self.rows[n]).map(|(a, b)| a * b.conj()).collect::<CompensatedSum>().value()
    }
}

/// Displaced thermal state (`z = 0`) in Laguerre form, for `n ≥ m`:
///
/// `ρ_{m,n} = e^{-|α|²/(N̄+1)} N̄^n/(N̄+1)^{n+1} sqrt(m!/n!) (α*/N̄)^{n-m}
///  L_m^{(n-m)}(-|α|²/(N̄(N̄+1)))`,
///
/// and `ρ_{m,n} = ρ*_{n,m}` otherwise. The `1/(N̄+1)` normalization is the
/// one that reproduces the thermal state at `α = 0`.
pub fn displaced_helstrom_coeff(m: usize, n: usize, alpha: Complex64, nbar: f64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    if !(nbar.is_finite() && nbar > 0.0) {
        return Err(FockError::Domain(format!("the Laguerre form needs N̄ > 0, got {nbar}")));
    }
    if m > n {
        return Ok(displaced_helstrom_coeff(n, m, alpha, nbar)?.conj());
    }
    let np1 = nbar + 1.0;
    let a2 = alpha.norm_sqr();
    let lag = hlpoly::laguerre_generalized(m, (n - m) as i64, Complex64::new(-a2 / (nbar * np1), 0.0))?;
    let scale = (-a2 / np1).exp() * (nbar / np1).powi(n as i32) / np1 * (0.5 * (lnf(m) - lnf(n))).exp();
    Ok((alpha.conj() / nbar).powi((n - m) as i32) * lag * scale)
}

/// Noisy displaced state (`z = 0`) from the specialised factors
/// `J = (1-Y) e^{-(1-Y)|α|²}`, `K_{m,r} = sqrt(m!) α^{m-r}/((m-r)! r!)` and
/// `W_{r,s} = r! s! α^r α*^s Σ_k (-1)^{r+s} Y^{r+s-k} |α|^{-2k} / ((r-k)! k! (s-k)!)`.
///
/// `α = 0` is rejected; that slice is [`thermal_coeff`].
pub fn displaced_kw_coeff(m: usize, n: usize, alpha: Complex64, nbar: f64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    if alpha == ZERO {
        return Err(FockError::Domain("α = 0 has no displaced factorization; use thermal_coeff".into()));
    }
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(FockError::InvalidParameter(format!("mean thermal photon number must be >= 0, got {nbar}")));
    }
    let y = nbar / (nbar + 1.0);
    let j = (1.0 - y) * (-(1.0 - y) * alpha.norm_sqr()).exp();
    let dim = m.max(n) + 1;
    let apow: Vec<Complex64> = (0..dim).map(|k| alpha.powi(k as i32)).collect();
    let k_scaled = |row: usize, r: usize| apow[row - r] * (0.5 * lnf(row) - lnf(row - r)).exp();
    // α^r α*^s |α|^{-2k} = α^{r-k} α*^{s-k}
    let w_scaled = |r: usize, s: usize| {
        let sign = if (r + s).is_multiple_of(2) { 1.0 } else { -1.0 };
        let sum: CompensatedSum = (0..=r.min(s))
            .map(|k| {
                apow[r - k]
                    * apow[s - k].conj()
                    * (y.powi((r + s - k) as i32) * (-lnf(r - k) - lnf(k) - lnf(s - k)).exp())
            })
            .collect();
        sum.value() * sign
    };
    let mut acc = CompensatedSum::new();
    for r in 0..=m {
        for s in 0..=n {
            acc.add(k_scaled(m, r) * w_scaled(r, s) * k_scaled(n, s).conj());
        }
    }
    Ok(acc.value() * j)
}

/// Noisy squeezed vacuum (`α = 0`), from the degenerate forms
/// `H_n(0, y)` of every polynomial in the factorization. Entries with
/// `m + n` odd vanish.
pub fn squeezed_special_coeff(m: usize, n: usize, r: f64, theta: f64, nbar: f64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let params = StateParams::new(ZERO, r, theta, nbar)?;
    if (m + n) % 2 == 1 {
        return Ok(ZERO);
    }
    let t = Complex64::from_polar(params.r.tanh(), params.theta);
    let s_fac = 1.0 / params.r.cosh();
    let y = params.thermal_ratio();
    let l = 1.0 / (1.0 - (y * params.r.tanh()).powi(2));
    // a = L Y² u*, u* = -T/2
    let a = -t * 0.5 * (l * y * y);
    let b = l * y;
    let j = (1.0 - y) * s_fac * l.sqrt();
    let half_t = t * 0.5;

    let k_scaled = |row: usize, col: usize| -> Complex64 {
        degenerate_y_weighted(row - col, half_t, 0.5 * lnf(row) - lnf(row - col)) * s_fac.powi(col as i32)
    };
    let w_scaled = |rr: usize, ss: usize| -> Complex64 {
        let sum: CompensatedSum = (0..=rr.min(ss))
            .map(|k| {
                let weight = if b == 0.0 {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (k as f64 * b.ln() - lnf(k)).exp()
                };
                degenerate_y_weighted(rr - k, a, -lnf(rr - k))
                    * degenerate_y_weighted(ss - k, a.conj(), -lnf(ss - k))
                    * weight
            })
            .collect();
        sum.value()
    };
    let mut acc = CompensatedSum::new();
    for rr in (m % 2..=m).step_by(2) {
        for ss in (n % 2..=n).step_by(2) {
            acc.add(k_scaled(m, rr) * w_scaled(rr, ss) * k_scaled(n, ss).conj());
        }
    }
    Ok(acc.value() * j)
}

/// Pure state (`N̄ = 0`): `ρ_{m,n} = |K₀|² H_m(x,y) H*_n(x,y) / sqrt(m! n!)`.
pub fn pure_coeff(m: usize, n: usize, alpha: Complex64, r: f64, theta: f64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let op = derive_ordering(&BosonicParams::new(alpha, 0.0, r, theta)?);
    let vm = hkdf_times(m, op.x, op.y, Scale::ONE.div(Scale::sqrt_fact(m)));
    let vn = hkdf_times(n, op.x, op.y, Scale::ONE.div(Scale::sqrt_fact(n)));
    Ok(vm * vn.conj() * op.k0.norm_sqr())
}

/// Photon-number probabilities `ρ_{m,m}`, `m = 0..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub probabilities: Vec<f64>,
    pub partial_trace: f64,
}

impl PhotonDistribution {
    /// Probabilities with magnitudes below `1e-12` set to exactly zero, as
    /// written to output files.
    pub fn clipped(&self) -> Vec<f64> {
        self.probabilities.iter().map(|&p| if p.abs() < 1e-12 { 0.0 } else { p }).collect()
    }
}

pub fn photon_distribution(params: &StateParams, m_max: usize) -> Result<PhotonDistribution> {
    check_index(m_max)?;
    let d = derive_state(params)?;
    let dim = m_max + 1;
    let f = scaled_factors(&d, dim);
    let kw = f.k.matmul(&f.w).expect("square factors");
    let probabilities: Vec<f64> = (0..dim)
        .map(|m| {
            let row: CompensatedSum = kw.row(m).iter().zip(f.k.row(m)).map(|(a, b)| a * b.conj()).collect();
            row.value().re * d.j
        })
        .collect();
    let partial_trace = probabilities.iter().sum();
    Ok(PhotonDistribution { probabilities, partial_trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn figure_params() -> StateParams {
        StateParams::new(c(1.0, 0.3), 1.0, 0.5, 0.5).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(StateParams::new(ZERO, 0.0, 0.0, -1.0).is_err());
        assert!(StateParams::new(ZERO, -0.2, 0.0, 1.0).is_err());
        assert!(StateParams::new(ZERO, 0.0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn vacuum_derivation() {
        let d = derive_state(&StateParams::new(ZERO, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!((d.y_ratio, d.l, d.a, d.b, d.j), (0.0, 1.0, ZERO, 0.0, 1.0));
        let d = derive_state(&StateParams::thermal(1.0).unwrap()).unwrap();
        assert_eq!(d.y_ratio, 0.5);
    }

    #[test]
    fn squeezed_thermal_derivation() {
        let d = derive_state(&StateParams::new(ZERO, 1.0, 0.0, 0.5).unwrap()).unwrap();
        let expected = 1.0 / (1.0 - (1.0f64 / 3.0).powi(2) * 1f64.tanh().powi(2));
        assert_relative_eq!(d.l, expected, max_relative = 1e-15);
        assert_relative_eq!(d.b, d.l / 3.0, max_relative = 1e-15);
        assert!((d.a - d.u().conj() * (d.l / 9.0)).norm() < 1e-16);
    }

    #[test]
    fn derived_relations() {
        let p = figure_params();
        let d = derive_state(&p).unwrap();
        let op = &d.ordering;
        let t = p.r().tanh();
        let expected_z = -(p.alpha() * Complex64::from_polar(t, -p.theta()) + p.alpha().conj());
        assert!((d.z_poly() - expected_z).norm() < 1e-15);
        assert!((d.u() + Complex64::from_polar(0.5 * t, -p.theta())).norm() < 1e-15);
        assert!((op.y + d.u().conj()).norm() < 1e-16);
        assert!((4.0 * d.u().norm_sqr() * d.y_ratio.powi(2) - (d.y_ratio * t).powi(2)).abs() < 1e-15);
        assert!(d.l >= 1.0 && d.j > 0.0);
        assert!(d.kernel_exponent().im.abs() < 1e-15);
    }

    #[test]
    fn thermal_examples() {
        assert_eq!(thermal_coeff(0, 0, 1.0).unwrap(), c(0.5, 0.0));
        assert_eq!(thermal_coeff(2, 3, 0.7).unwrap(), ZERO);
        assert_relative_eq!(thermal_coeff(3, 3, 0.5).unwrap().re, (2.0 / 3.0) / 27.0, max_relative = 1e-15);
        assert!(thermal_coeff(0, 0, -0.1).is_err());
    }

    #[test]
    fn k_entry_examples() {
        let d = derive_state(&figure_params()).unwrap();
        for m in 0..8 {
            let diag = k_entry(m, m, &d).unwrap();
            let expected = d.ordering.x_rot.powi(m as i32) * (-0.5 * lnf(m)).exp();
            assert!((diag - expected).norm() <= 1e-15 * expected.norm());
            assert_eq!(k_entry(m, m + 1, &d).unwrap(), ZERO);
        }
        let d1 = derive_state(&StateParams::new(c(1.0, 0.0), 0.0, 0.0, 0.3).unwrap()).unwrap();
        assert!((k_entry(1, 0, &d1).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        // 60-digit evaluation of the defining sum
        let got = k_entry(4, 1, &d).unwrap();
        let reference = c(0.680_003_493_056_583_3, 0.707_605_717_868_033_1);
        assert!((got - reference).norm() < 1e-14 * reference.norm(), "{got}");
    }

    #[test]
    fn w_entry_examples() {
        let d = derive_state(&figure_params()).unwrap();
        assert_eq!(w_entry(0, 0, &d).unwrap(), c(1.0, 0.0));
        for r in 0..8 {
            for s in 0..8 {
                let a = w_entry(r, s, &d).unwrap();
                let b = w_entry(s, r, &d).unwrap();
                assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
            }
        }
        let series = g_series(2, 1, &d, 300).unwrap().value;
        let closed = g_closed(2, 1, &d).unwrap();
        assert!((series - closed).norm() <= 1e-10 * closed.norm(), "{series} vs {closed}");
    }

    #[test]
    fn w_is_diagonal_without_displacement_and_squeezing() {
        let d = derive_state(&StateParams::thermal(0.8).unwrap()).unwrap();
        for r in 0..10 {
            for s in 0..10 {
                let w = w_entry(r, s, &d).unwrap();
                let expected = if r == s { (lnf(r) + r as f64 * (d.l * d.y_ratio).ln()).exp() } else { 0.0 };
                assert!((w - c(expected, 0.0)).norm() <= 1e-13 * expected.max(1.0));
            }
        }
    }

    #[test]
    fn g_series_examples() {
        let vacuum = derive_state(&StateParams::new(ZERO, 0.0, 0.0, 0.4).unwrap()).unwrap();
        assert_eq!(g_series(0, 0, &vacuum, 50).unwrap().value, c(1.0, 0.0));
        let d = derive_state(&figure_params()).unwrap();
        let s00 = g_series(0, 0, &d, 300).unwrap().value;
        let expected = d.kernel_exponent().exp() * d.l.sqrt();
        assert!((s00 - expected).norm() <= 1e-10 * expected.norm());
        // G_{1,0} = ∂_z F, with F the quadratic exponential in (z, z*)
        let identity =
            crate::hlpoly::mixed_deriv_quadexp(1, 0, d.a, c(d.b, 0.0), d.a.conj(), d.z_poly(), d.z_poly().conj())
                .unwrap()
                * d.l.sqrt();
        let s10 = g_series(1, 0, &d, 300).unwrap().value;
        assert!((s10 - identity).norm() <= 1e-10 * identity.norm());
    }

    #[test]
    fn thermal_state_from_closed_form() {
        for nbar in [0.1, 0.5, 1.0, 3.0] {
            let p = StateParams::thermal(nbar).unwrap();
            for m in 0..=12 {
                for n in 0..=12 {
                    let got = rho_coeff(m, n, &p).unwrap();
                    let expected = thermal_coeff(m, n, nbar).unwrap();
                    assert!((got - expected).norm() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn coherent_state_vacuum_weight() {
        let p = StateParams::new(c(1.0, 0.0), 0.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(rho_coeff(0, 0, &p).unwrap().re, (-1.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(pure_coeff(0, 0, c(1.0, 0.0), 0.0, 0.0).unwrap().re, (-1.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn squeezed_vacuum_examples() {
        let p = StateParams::new(ZERO, 1.0, 0.0, 0.0).unwrap();
        let rho = rho_matrix(&p, 8).unwrap();
        assert_relative_eq!(rho[(0, 0)].re, 1.0 / 1f64.cosh(), max_relative = 1e-14);
        assert_eq!(pure_coeff(0, 1, ZERO, 0.7, 0.2).unwrap(), ZERO);
        assert_relative_eq!(pure_coeff(0, 0, ZERO, 0.7, 0.2).unwrap().re, 1.0 / 0.7f64.cosh(), max_relative = 1e-14);
        assert_eq!(squeezed_special_coeff(0, 1, 0.7, 0.2, 0.5).unwrap(), ZERO);
    }

    #[test]
    fn rho_is_hermitian_with_real_diagonal() {
        let p = figure_params();
        let rho = rho_matrix(&p, 25).unwrap();
        assert!(rho.hermiticity_defect() <= 1e-12);
        for m in 0..25 {
            assert!(rho[(m, m)].im.abs() <= 1e-12 && rho[(m, m)].re >= -1e-12);
            let single = rho_coeff(m, (m * 7) % 25, &p).unwrap();
            assert!((single - rho[(m, (m * 7) % 25)]).norm() <= 1e-13);
        }
    }

    #[test]
    fn series_matches_closed_form() {
        let p = figure_params();
        for (m, n) in [(0, 0), (3, 1), (7, 7), (15, 2)] {
            let closed = rho_coeff(m, n, &p).unwrap();
            let series = rho_series_coeff(m, n, &p, 200).unwrap();
            assert!((closed - series).norm() <= 1e-9 * closed.norm().max(1e-3), "({m},{n})");
        }
        assert!(rho_series_coeff(0, 0, &StateParams::thermal(2.0).unwrap(), 20).is_err());
    }

    #[test]
    fn series_examples() {
        let p = StateParams::thermal(0.9).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                let got = rho_series_coeff(m, n, &p, 200).unwrap();
                assert!((got - thermal_coeff(m, n, 0.9).unwrap()).norm() <= 1e-15);
            }
        }
        let pure = StateParams::new(c(0.4, -0.2), 0.6, 1.1, 0.0).unwrap();
        let op = derive_ordering(&pure.bosonic(0.0));
        for (m, n) in [(0, 0), (2, 5), (4, 1)] {
            let expected = crate::unitary::unitary_coeff(m, 0, &op).unwrap()
                * crate::unitary::unitary_coeff(n, 0, &op).unwrap().conj();
            assert!((rho_series_coeff(m, n, &pure, 0).unwrap() - expected).norm() <= 1e-15);
        }
    }

    #[test]
    fn laguerre_form() {
        for nbar in [0.3, 1.0, 2.0] {
            let got = displaced_helstrom_coeff(0, 0, ZERO, nbar).unwrap();
            assert_relative_eq!(got.re, 1.0 / (nbar + 1.0), max_relative = 1e-15);
        }
        let alpha = c(0.9, 0.0);
        for m in 0..6 {
            let v = displaced_helstrom_coeff(m, m, c(0.7, -0.4), 0.8).unwrap();
            assert!(v.re > 0.0 && v.im.abs() < 1e-16);
        }
        let p = StateParams::new(alpha, 0.0, 0.0, 0.7).unwrap();
        let general = rho_coeff(2, 4, &p).unwrap();
        let lag = displaced_helstrom_coeff(2, 4, alpha, 0.7).unwrap();
        assert!((general - lag).norm() <= 1e-10 * general.norm());
        assert!(matches!(displaced_helstrom_coeff(0, 0, alpha, 0.0), Err(FockError::Domain(_))));
    }

    #[test]
    fn displaced_kw_form() {
        let alpha = c(0.8, -0.5);
        let y = 0.6 / 1.6;
        let expected = (1.0 - y) * (-(1.0 - y) * alpha.norm_sqr()).exp();
        assert_relative_eq!(displaced_kw_coeff(0, 0, alpha, 0.6).unwrap().re, expected, max_relative = 1e-15);
        assert!(matches!(displaced_kw_coeff(1, 0, ZERO, 0.6), Err(FockError::Domain(_))));
        let p = StateParams::new(alpha, 0.0, 0.0, 0.6).unwrap();
        for (m, n) in [(1, 0), (3, 5), (6, 6)] {
            let general = rho_coeff(m, n, &p).unwrap();
            assert!((displaced_kw_coeff(m, n, alpha, 0.6).unwrap() - general).norm() <= 1e-12);
        }
    }

    #[test]
    fn squeezed_special_matches_series() {
        let p = StateParams::new(ZERO, 0.8, 0.4, 0.5).unwrap();
        for (m, n) in [(0, 0), (2, 0), (3, 1), (4, 4)] {
            let special = squeezed_special_coeff(m, n, 0.8, 0.4, 0.5).unwrap();
            let series = rho_series_coeff(m, n, &p, 200).unwrap();
            assert!((special - series).norm() <= 1e-12, "({m},{n}) {special} vs {series}");
        }
    }

    #[test]
    fn pure_state_matches_general_path() {
        let (alpha, r, theta) = (c(1.0, 0.3), 1.0, 0.5);
        let rho = rho_matrix(&StateParams::new(alpha, r, theta, 0.0).unwrap(), 15).unwrap();
        for m in 0..15 {
            for n in 0..15 {
                assert!((pure_coeff(m, n, alpha, r, theta).unwrap() - rho[(m, n)]).norm() <= 1e-11);
            }
        }
    }

    #[test]
    fn photon_distribution_examples() {
        let dist = photon_distribution(&StateParams::thermal(1.0).unwrap(), 3).unwrap();
        for (p, e) in dist.probabilities.iter().zip([0.5, 0.25, 0.125, 0.0625]) {
            assert_relative_eq!(*p, e, max_relative = 1e-14);
        }
        assert_relative_eq!(dist.partial_trace, 15.0 / 16.0, max_relative = 1e-14);

        let dist = photon_distribution(&StateParams::new(c(1.0, 0.0), 0.0, 0.0, 0.0).unwrap(), 30).unwrap();
        for (m, p) in dist.probabilities.iter().enumerate() {
            let poisson = (-1.0 - lnf(m)).exp();
            assert!((p - poisson).abs() <= 1e-14 * poisson.max(1e-300) + 1e-300);
        }
        let clipped = PhotonDistribution { probabilities: vec![0.5, -1e-13, 1e-13, 1e-11], partial_trace: 0.5 };
        assert_eq!(clipped.clipped(), vec![0.5, 0.0, 0.0, 1e-11]);
    }
}
