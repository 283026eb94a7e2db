//! Fock matrix elements of the single-mode Gaussian unitary
//! `U = S(z) D(α) R(φ)`.
//!
//! The closed form is `U_{m,n} = K₀/sqrt(m! n!) · H_{m,n}(x, y; z, u | X)` with
//! the ordering parameters of [`derive_ordering`]. [`appendix_a_coeff`]
//! rebuilds the same element from the normally ordered factors
//! `B(a†) C(a†, a) F(a)` one matrix element at a time and serves as the
//! in-module cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::hlpoly::{self, hkdf_normalized_table_dd, hkdf_times, lnf, Hkdf2Table};
use crate::matrix::ComplexMatrix;
use crate::numeric::{check_index, dd_is_finite, from_dd, sqrt_binomial_dd, to_dd, CompensatedSum, ComplexDd};
use crate::scale::Scale;

/// Maps an angle onto `(-π, π]`.
pub fn reduce_angle(angle: f64) -> f64 {
    let t = angle.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Bosonic parameters `(α, φ, z = r e^{iθ})` of `S(z) D(α) R(φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosonicParams {
    alpha: Complex64,
    phi: f64,
    r: f64,
    theta: f64,
}

impl BosonicParams {
    pub fn new(alpha: Complex64, phi: f64, r: f64, theta: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite() && phi.is_finite() && theta.is_finite()) {
            return Err(FockError::InvalidParameter("bosonic parameters must be finite".into()));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(FockError::InvalidParameter(format!("squeeze magnitude must be >= 0, got {r}")));
        }
        Ok(Self { alpha, phi: reduce_angle(phi), r, theta: reduce_angle(theta) })
    }

    pub fn identity() -> Self {
        Self { alpha: Complex64::new(0.0, 0.0), phi: 0.0, r: 0.0, theta: 0.0 }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Squeeze parameter `z = r e^{iθ}`.
    pub fn squeeze(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// Normal-ordering quantities of `U = K₀ B(a†) C(a†,a) F(a)`.
///
/// `z_poly` is the second polynomial variable, not the squeeze parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingParams {
    /// `T = e^{iθ} tanh r`
    pub t: Complex64,
    /// `S = sech r`
    pub s: f64,
    pub k0: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub z_poly: Complex64,
    pub u: Complex64,
    /// `X = S e^{iφ}`, the diagonal ratio of `C(a†, a)`.
    pub x_rot: Complex64,
}

pub fn derive_ordering(params: &BosonicParams) -> OrderingParams {
    let alpha = params.alpha;
    let t = Complex64::from_polar(params.r.tanh(), params.theta);
    let s = 1.0 / params.r.cosh();
    let rot = Complex64::from_polar(1.0, params.phi);
    let k0 = s.sqrt() * (-(alpha.norm_sqr() + t.conj() * alpha * alpha) * 0.5).exp();
    OrderingParams {
        t,
        s,
        k0,
        x: alpha * s,
        y: t * 0.5,
        z_poly: -(alpha * t.conj() + alpha.conj()) * rot,
        u: -t.conj() * 0.5 * rot * rot,
        x_rot: rot * s,
    }
}

/// `U_{m,n}` from the two-index polynomial.
pub fn unitary_coeff(m: usize, n: usize, op: &OrderingParams) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let weight = Scale::ONE.div(Scale::sqrt_fact(m).mul(Scale::sqrt_fact(n)));
    Ok(op.k0 * hlpoly::hkdf2_times(m, n, op.x, op.y, op.z_poly, op.u, op.x_rot, weight))
}

/// Cached `H_k/k!` tables for fast assembly of many `U_{m,n}`.
/// Tables for evaluating many elements at fixed ordering parameters.
///
/// Each term of the closed form is rewritten as
/// `sqrt(C(m,r) C(n,r)) g_{m-r}(x,y) g_{n-r}(z,u) X^r` with
/// `g_k = H_k/sqrt(k!)`, which stays finite for indices in the hundreds.
pub(crate) struct UnitaryTables {
    k0: Complex64,
    table: Hkdf2Table,
    op: OrderingParams,
}

impl UnitaryTables {
    /// Supports rows `m < rows` and columns `n < cols`.
    pub(crate) fn new(op: &OrderingParams, rows: usize, cols: usize) -> Self {
        Self { k0: op.k0, table: Hkdf2Table::new(rows, cols, op.x, op.y, op.z_poly, op.u, op.x_rot), op: *op }
    }

    pub(crate) fn entry(&self, m: usize, n: usize) -> Complex64 {
        let h = self.table.get(m, n);
        if h.re.is_finite() && h.im.is_finite() {
            self.k0 * h
        } else {
            let op = &self.op;
            let weight = Scale::ONE.div(Scale::sqrt_fact(m).mul(Scale::sqrt_fact(n)));
            self.k0 * hlpoly::hkdf2_weighted_sum(m, n, op.x, op.y, op.z_poly, op.u, op.x_rot, weight)
        }
    }
}

/// `[U_{m,n}]` for `0 ≤ m, n < dim`.
pub fn unitary_matrix(params: &BosonicParams, dim: usize) -> Result<ComplexMatrix> {
    unitary_matrix_from_ordering(&derive_ordering(params), dim)
}

/// As [`unitary_matrix`], from already derived (possibly hand-edited)
/// ordering parameters.
pub fn unitary_matrix_from_ordering(op: &OrderingParams, dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    let tables = UnitaryTables::new(op, dim, dim);
    Ok(ComplexMatrix::from_fn(dim, dim, |m, n| tables.entry(m, n)))
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(FockError::InvalidParameter("dimension must be positive".into()));
    }
    check_index(dim)
}

/// `⟨m| B(a†) |r⟩ = H_{m-r}(x,y)/(m-r)! · sqrt(m!/r!)`, zero for `r > m`.
pub fn creation_factor(m: usize, r: usize, op: &OrderingParams) -> Complex64 {
    if r > m {
        return Complex64::new(0.0, 0.0);
    }
    hkdf_times(m - r, op.x, op.y, Scale::sqrt_fact(m).div(Scale::fact(m - r).mul(Scale::sqrt_fact(r))))
}

/// `⟨r| C(a†, a) |q⟩ = X^r δ_{rq}`.
pub fn diagonal_factor(r: usize, q: usize, op: &OrderingParams) -> Complex64 {
    if r == q {
        op.x_rot.powi(r as i32)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `⟨q| F(a) |n⟩ = H_{n-q}(z,u)/(n-q)! · sqrt(n!/q!)`, zero for `q > n`.
pub fn annihilation_factor(q: usize, n: usize, op: &OrderingParams) -> Complex64 {
    if q > n {
        return Complex64::new(0.0, 0.0);
    }
    hkdf_times(n - q, op.z_poly, op.u, Scale::sqrt_fact(n).div(Scale::fact(n - q).mul(Scale::sqrt_fact(q))))
}

/// `U_{m,n} = K₀ Σ_{r,q} B_{m,r} C_{r,q} F_{q,n}` from the individual
/// normally ordered factors.
///
/// The factors are combined in double-double; for large `|α|` the terms
/// exceed the result by several orders of magnitude.
pub fn appendix_a_coeff(m: usize, n: usize, op: &OrderingParams) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let gx = hkdf_normalized_table_dd(m + 1, op.x, op.y);
    let gz = hkdf_normalized_table_dd(n + 1, op.z_poly, op.u);
    if !gx.iter().chain(&gz).all(|&g| dd_is_finite(g)) {
        return Ok(appendix_a_plain(m, n, op));
    }
    let x_rot = to_dd(op.x_rot);
    let mut c = to_dd(Complex64::new(1.0, 0.0));
    let mut acc = ComplexDd::default();
    for r in 0..=m.min(n) {
        // B_{m,r} = g_{m-r}(x,y) sqrt(C(m,r)), F_{r,n} = g_{n-r}(z,u) sqrt(C(n,r))
        let b = gx[m - r] * sqrt_binomial_dd(m, r);
        let f = gz[n - r] * sqrt_binomial_dd(n, r);
        acc += b * c * f;
        c *= x_rot;
    }
    Ok(op.k0 * from_dd(acc))
}

fn appendix_a_plain(m: usize, n: usize, op: &OrderingParams) -> Complex64 {
    let mut acc = CompensatedSum::new();
    for r in 0..=m {
        for q in 0..=n {
            let c = diagonal_factor(r, q, op);
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc.add(creation_factor(m, r, op) * c * annihilation_factor(q, n, op));
        }
    }
    op.k0 * acc.value()
}

/// `⟨m| D(α) |n⟩` through the generalized Laguerre polynomial.
pub fn displacement_laguerre_coeff(m: usize, n: usize, alpha: Complex64) -> Result<Complex64> {
    check_index(m)?;
    check_index(n)?;
    let a2 = Complex64::new(alpha.norm_sqr(), 0.0);
    let gauss = (-0.5 * alpha.norm_sqr()).exp();
    if m >= n {
        let lag = hlpoly::laguerre_generalized(n, (m - n) as i64, a2)?;
        let ratio = (0.5 * (lnf(n) - lnf(m))).exp();
        Ok(alpha.powi((m - n) as i32) * lag * (ratio * gauss))
    } else {
        let lag = hlpoly::laguerre_generalized(m, (n - m) as i64, a2)?;
        let ratio = (0.5 * (lnf(m) - lnf(n))).exp();
        Ok((-alpha.conj()).powi((n - m) as i32) * lag * (ratio * gauss))
    }
}

/// Truncation suggested for unitarity checks:
/// `max(4⌈|α|²⌉, ⌈10 e^{2r}⌉, 16)`.
pub fn suggested_dim(params: &BosonicParams) -> usize {
    let displaced = 4 * params.alpha.norm_sqr().ceil() as usize;
    let squeezed = (10.0 * (2.0 * params.r).exp()).ceil() as usize;
    displaced.max(squeezed).max(16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_validate_and_reduce_angles() {
        assert!(BosonicParams::new(c(0.0, 0.0), 0.0, -0.1, 0.0).is_err());
        assert!(BosonicParams::new(c(f64::NAN, 0.0), 0.0, 0.1, 0.0).is_err());
        let p = BosonicParams::new(c(0.0, 0.0), 3.0 * PI, 0.2, -PI).unwrap();
        assert_relative_eq!(p.phi(), PI, max_relative = 1e-15);
        assert_relative_eq!(p.theta(), PI, max_relative = 1e-15);
        let p = BosonicParams::new(c(0.0, 0.0), -0.5, 0.0, 7.0).unwrap();
        assert_relative_eq!(p.phi(), -0.5);
        assert_relative_eq!(p.theta(), 7.0 - 2.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn ordering_of_identity() {
        let op = derive_ordering(&BosonicParams::identity());
        let zero = c(0.0, 0.0);
        assert_eq!((op.t, op.s, op.k0), (zero, 1.0, c(1.0, 0.0)));
        assert_eq!([op.x, op.y, op.z_poly, op.u], [zero; 4]);
        assert_eq!(op.x_rot, c(1.0, 0.0));
    }

    #[test]
    fn ordering_of_pure_squeeze() {
        let op = derive_ordering(&BosonicParams::new(c(0.0, 0.0), 0.0, 1.0, 0.0).unwrap());
        assert_relative_eq!(op.t.re, 0.761_594_155_955_764_9, max_relative = 1e-15);
        assert_relative_eq!(op.s, 0.648_054_273_663_885_4, max_relative = 1e-15);
        assert_relative_eq!(op.k0.re, op.s.sqrt(), max_relative = 1e-15);
        assert!((op.t.norm_sqr() + op.s * op.s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ordering_of_pure_displacement() {
        let op = derive_ordering(&BosonicParams::new(c(1.0, 0.0), 0.0, 0.0, 0.0).unwrap());
        assert_relative_eq!(op.k0.re, (-0.5f64).exp(), max_relative = 1e-15);
        assert_eq!(op.x, c(1.0, 0.0));
        assert_eq!(op.z_poly, c(-1.0, 0.0));
    }

    #[test]
    fn identity_matrix_elements() {
        let op = derive_ordering(&BosonicParams::identity());
        for m in 0..8 {
            for n in 0..8 {
                let expected = if m == n { c(1.0, 0.0) } else { c(0.0, 0.0) };
                assert!((unitary_coeff(m, n, &op).unwrap() - expected).norm() < 1e-15);
                assert!((appendix_a_coeff(m, n, &op).unwrap() - expected).norm() < 1e-15);
            }
        }
        let mat = unitary_matrix(&BosonicParams::identity(), 5).unwrap();
        assert!(mat.max_abs_diff(&ComplexMatrix::identity(5)).unwrap() < 1e-15);
    }

    #[test]
    fn rotation_is_diagonal_phase() {
        let phi = 0.83;
        let op = derive_ordering(&BosonicParams::new(c(0.0, 0.0), phi, 0.0, 0.0).unwrap());
        for m in 0..10 {
            for n in 0..10 {
                let u = unitary_coeff(m, n, &op).unwrap();
                if m == n {
                    let fast = hlpoly::hkdf2_rotation_degenerate(m, n, c(phi.cos(), phi.sin())).unwrap() / lnf(n).exp();
                    assert!((u - Complex64::from_polar(1.0, n as f64 * phi)).norm() < 1e-14);
                    assert!((u - fast).norm() < 1e-14);
                } else {
                    assert_eq!(u, c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn displacement_first_column() {
        let alpha = c(0.6, -0.4);
        let op = derive_ordering(&BosonicParams::new(alpha, 0.0, 0.0, 0.0).unwrap());
        let expected = alpha * (-0.5 * alpha.norm_sqr()).exp();
        assert!((unitary_coeff(1, 0, &op).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn squeeze_vacuum_amplitude() {
        let m = unitary_matrix(&BosonicParams::new(c(0.0, 0.0), 0.0, 1.0, 0.0).unwrap(), 6).unwrap();
        assert_relative_eq!(m[(0, 0)].re, (1.0 / 1f64.cosh()).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn factored_vacuum_element() {
        let op = derive_ordering(&BosonicParams::new(c(0.3, 0.9), 0.4, 0.7, -1.2).unwrap());
        assert!((appendix_a_coeff(0, 0, &op).unwrap() - op.k0).norm() < 1e-16);
    }

    #[test]
    fn matrix_and_coefficient_paths_agree() {
        let p = BosonicParams::new(c(0.5, 0.0), 0.3, 0.4, 1.0).unwrap();
        let op = derive_ordering(&p);
        let mat = unitary_matrix(&p, 20).unwrap();
        for m in 0..20 {
            for n in 0..20 {
                let a = appendix_a_coeff(m, n, &op).unwrap();
                assert!((mat[(m, n)] - a).norm() <= 1e-10 * a.norm().max(1.0));
                assert!((mat[(m, n)] - unitary_coeff(m, n, &op).unwrap()).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn laguerre_displacement_path() {
        let alpha = c(0.8, 0.2);
        assert_relative_eq!(
            displacement_laguerre_coeff(0, 0, alpha).unwrap().re,
            (-0.5 * alpha.norm_sqr()).exp(),
            max_relative = 1e-15
        );
        let one = displacement_laguerre_coeff(1, 0, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(one.re, (-0.5f64).exp(), max_relative = 1e-15);
        let op = derive_ordering(&BosonicParams::new(alpha, 0.0, 0.0, 0.0).unwrap());
        for m in 0..15 {
            for n in 0..15 {
                let lag = displacement_laguerre_coeff(m, n, alpha).unwrap();
                let gen = unitary_coeff(m, n, &op).unwrap();
                assert!((lag - gen).norm() <= 1e-11 * gen.norm().max(1e-3), "({m},{n}) {lag} vs {gen}");
            }
        }
    }

    #[test]
    fn suggested_dim_policy() {
        assert_eq!(suggested_dim(&BosonicParams::identity()), 16);
        let p = BosonicParams::new(c(3.0, 0.0), 0.0, 0.0, 0.0).unwrap();
        assert_eq!(suggested_dim(&p), 36);
        let p = BosonicParams::new(c(0.0, 0.0), 0.0, 1.0, 0.0).unwrap();
        assert_eq!(suggested_dim(&p), 74);
    }
}
