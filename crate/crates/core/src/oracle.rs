//! Brute-force reference: dense truncated ladder operators, matrix
//! exponentials and products. Nothing here touches a Hermite polynomial.

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::matrix::ComplexMatrix;
use crate::state::StateParams;
use crate::unitary::BosonicParams;

/// Largest working dimension the oracle accepts.
pub const MAX_PAD_DIM: usize = 2000;

/// Order of the Taylor polynomial in [`matrix_exp`].
pub const TAYLOR_ORDER: usize = 18;

/// Dense operator computed in a padded space and reported on its
/// upper-left `trunc_dim` block.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub matrix: ComplexMatrix,
    pub trunc_dim: usize,
    pub pad_dim: usize,
}

/// Annihilation and creation operators on `span{|0>, ..., |dim-1>}`.
pub fn ladder(dim: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(2..=MAX_PAD_DIM).contains(&dim) {
        return Err(FockError::InvalidParameter(format!("ladder dimension must be in 2..={MAX_PAD_DIM}, got {dim}")));
    }
    let mut a = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let adag = a.adjoint();
    Ok((a, adag))
}

/// Working dimension
/// `max(2t, t + ⌈12 e^{2r}⌉ + ⌈8|α|²⌉, ⌈(t + 2|α|²) e^{2r}⌉ + 20)`.
///
/// Squeezing stretches level `t` to roughly `t cosh 2r`, so the leak grows
/// with `t` as well as `r`; the last term covers that for larger blocks.
pub fn pad_dim_policy(trunc_dim: usize, r: f64, alpha: Complex64) -> usize {
    let squeeze = (12.0 * (2.0 * r).exp()).ceil() as usize;
    let displacement = (8.0 * alpha.norm_sqr()).ceil() as usize;
    let stretched = ((trunc_dim as f64 + 2.0 * alpha.norm_sqr()) * (2.0 * r).exp()).ceil() as usize + 20;
    (2 * trunc_dim).max(trunc_dim + squeeze + displacement).max(stretched)
}

/// `e^M` by scaling and squaring with a Taylor polynomial of order
/// [`TAYLOR_ORDER`].
pub fn matrix_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(FockError::Dimension(format!("exponential of a {}x{} matrix", m.rows(), m.cols())));
    }
    let norm = m.norm1();
    if !norm.is_finite() || norm > 1e12 {
        return Err(FockError::NormOverflow(norm));
    }
    // bring the norm to at most 1/2
    let squarings = if norm > 0.5 { (2.0 * norm).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));

    let dim = m.rows();
    let mut result = ComplexMatrix::identity(dim);
    let mut term = ComplexMatrix::identity(dim);
    for k in 1..=TAYLOR_ORDER {
        term = term.matmul(&scaled)?.scale(Complex64::new(1.0 / k as f64, 0.0));
        result = result.add(&term)?;
    }
    for _ in 0..squarings {
        result = result.matmul(&result)?;
    }
    if result.as_slice().iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(FockError::NormOverflow(norm));
    }
    Ok(result)
}

/// `R(φ) = e^{iφ a†a}`, exact since `a†a` is diagonal.
pub fn rotation(phi: f64, dim: usize) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..dim).map(|n| Complex64::from_polar(1.0, phi * n as f64)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// `D(α) = e^{α a† - α* a}` on the working space.
pub fn displacement(alpha: Complex64, dim: usize) -> Result<ComplexMatrix> {
    let (a, adag) = ladder(dim)?;
    matrix_exp(&adag.scale(alpha).sub(&a.scale(alpha.conj()))?)
}

/// `S(z) = e^{(z a†² - z* a²)/2}` on the working space.
pub fn squeeze(z: Complex64, dim: usize) -> Result<ComplexMatrix> {
    let (a, adag) = ladder(dim)?;
    let a2 = a.matmul(&a)?;
    let adag2 = adag.matmul(&adag)?;
    matrix_exp(&adag2.scale(z * 0.5).sub(&a2.scale(z.conj() * 0.5))?)
}

/// `U = S(z) D(α) R(φ)` on a `pad_dim`-dimensional working space.
pub fn build_unitary(params: &BosonicParams, pad_dim: usize) -> Result<ComplexMatrix> {
    let s = squeeze(params.squeeze(), pad_dim)?;
    let d = displacement(params.alpha(), pad_dim)?;
    s.matmul(&d)?.matmul(&rotation(params.phi(), pad_dim))
}

/// [`build_unitary`] at the default padding, reported on the `trunc_dim` block.
pub fn unitary_brute(params: &BosonicParams, trunc_dim: usize) -> Result<TruncatedOperator> {
    let pad_dim = pad_dim_policy(trunc_dim, params.r(), params.alpha());
    let full = build_unitary(params, pad_dim)?;
    Ok(TruncatedOperator { matrix: full.block(trunc_dim, trunc_dim)?.with_trunc_dim(trunc_dim), trunc_dim, pad_dim })
}

/// `ρ = U ρ_th U†` with the default padding, reported on the `trunc_dim` block.
pub fn rho_brute(params: &StateParams, trunc_dim: usize) -> Result<TruncatedOperator> {
    rho_brute_padded(params, trunc_dim, pad_dim_policy(trunc_dim, params.r(), params.alpha()))
}

/// As [`rho_brute`] with an explicit working dimension. The thermal state is
/// truncated to the working space without renormalization; see
/// [`thermal_truncation_deficit`].
pub fn rho_brute_padded(params: &StateParams, trunc_dim: usize, pad_dim: usize) -> Result<TruncatedOperator> {
    if trunc_dim == 0 || pad_dim < trunc_dim {
        return Err(FockError::InvalidParameter(format!(
            "need 0 < trunc_dim <= pad_dim, got {trunc_dim} and {pad_dim}"
        )));
    }
    let u = build_unitary(&params.bosonic(0.0), pad_dim)?;
    let y = params.thermal_ratio();
    let weights: Vec<f64> = (0..pad_dim).map(|j| y.powi(j as i32) / (params.nbar() + 1.0)).collect();
    let weighted = ComplexMatrix::from_fn(trunc_dim, pad_dim, |m, j| u[(m, j)] * weights[j]);
    let top = u.block(trunc_dim, pad_dim)?;
    let rho = weighted.matmul(&top.adjoint())?;
    Ok(TruncatedOperator { matrix: rho.with_trunc_dim(trunc_dim), trunc_dim, pad_dim })
}

/// Thermal weight `Y^{pad_dim}` dropped by truncating `ρ_th` to `pad_dim` levels.
pub fn thermal_truncation_deficit(nbar: f64, pad_dim: usize) -> f64 {
    (nbar / (nbar + 1.0)).powi(pad_dim as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ladder_action() {
        let (a, adag) = ladder(3).unwrap();
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a[(1, 2)], c(2f64.sqrt(), 0.0));
        let nonzero = a.as_slice().iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert_eq!(adag, a.adjoint());
        assert!(ladder(1).is_err());
    }

    #[test]
    fn number_operator_and_commutator() {
        let (a, adag) = ladder(8).unwrap();
        let n = adag.matmul(&a).unwrap();
        for k in 0..8 {
            assert!((n[(k, k)] - c(k as f64, 0.0)).norm() < 1e-14);
        }
        let comm = a.matmul(&adag).unwrap().sub(&n).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expected = if i != j {
                    0.0
                } else if i == 7 {
                    -7.0
                } else {
                    1.0
                };
                assert!((comm[(i, j)] - c(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn exp_trivial_cases() {
        let zero = ComplexMatrix::zeros(5, 5);
        assert_eq!(matrix_exp(&zero).unwrap(), ComplexMatrix::identity(5));
        let d = [c(0.3, -1.0), c(-2.0, 0.5), c(4.0, 0.0)];
        let e = matrix_exp(&ComplexMatrix::from_diagonal(&d)).unwrap();
        for (k, v) in d.iter().enumerate() {
            assert!((e[(k, k)] - v.exp()).norm() <= 1e-13 * v.exp().norm());
        }
        let bad = ComplexMatrix::from_diagonal(&[c(f64::NAN, 0.0)]);
        assert!(matches!(matrix_exp(&bad), Err(FockError::NormOverflow(_))));
    }

    #[test]
    fn exp_matches_high_precision_series() {
        #[rustfmt::skip]
        let input: [[(f64, f64); 6]; 6] = [
            [(-0.352, -0.698), (0.302, -0.855), (0.072, -0.269), (-0.884, 0.015), (-0.925, -0.133), (-0.86, -0.819)],
            [(0.0, 0.0), (-0.151, 0.654), (-0.752, -0.554), (0.255, 0.895), (0.154, -0.207), (0.953, -0.907)],
            [(0.0, 0.0), (0.0, 0.0), (0.717, -0.421), (-0.711, -0.764), (-0.383, 0.632), (-0.639, 0.163)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.278, -0.255), (0.095, -0.874), (-0.881, -0.588)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.361, -0.145), (-0.372, 0.171)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-0.094, -0.4)],
        ];
        #[rustfmt::skip]
        let expected: [[(f64, f64); 6]; 6] = [
            [(0.538_803_361_353_064, -0.451_988_791_632_819_74), (0.218_597_169_180_243_02, -0.616_226_332_711_855),
             (-0.418_583_930_191_649, -0.024_327_615_649_272_223), (-0.329_711_238_168_812_1, 0.529_424_761_611_81),
             (-0.726_212_244_961_933_7, 0.371_331_090_584_882_8), (-0.627_365_822_829_401_1, -0.774_495_687_195_663_8)],
            [(0.0, 0.0), (0.682_423_879_040_669_8, 0.523_102_011_279_460_8), (-0.954_150_811_316_353_6, -0.760_894_021_263_797_1),
             (0.209_399_826_118_448_65, 1.590_553_147_580_176_9), (1.306_557_654_832_819_5, -0.430_673_953_138_121_2),
             (1.335_656_305_061_589_7, -1.072_524_916_216_014_4)],
            [(0.0, 0.0), (0.0, 0.0), (1.869_424_893_321_354_6, -0.837_077_075_980_650_5),
             (-1.535_130_852_895_682_4, -0.793_864_633_813_701_4), (-0.756_884_216_757_484_7, 1.803_955_750_224_645_5),
             (-0.381_144_524_412_541_5, 0.931_741_006_038_843_4)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.277_786_025_502_627_7, -0.333_086_580_411_064_2),
             (-0.109_904_810_662_416_27, -1.204_828_787_360_488_6), (-1.006_584_082_558_447_1, -0.125_579_670_996_058_07)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.419_706_918_069_247_6, -0.207_312_458_522_226_32),
             (-0.361_888_193_321_95, 0.300_953_650_378_217_6)],
            [(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.838_425_945_813_172_6, -0.354_480_804_303_938_9)],
        ];
        let m = ComplexMatrix::from_fn(6, 6, |i, j| c(input[i][j].0, input[i][j].1));
        let e = matrix_exp(&m).unwrap();
        let reference = ComplexMatrix::from_fn(6, 6, |i, j| c(expected[i][j].0, expected[i][j].1));
        let err = e.max_abs_diff(&reference).unwrap() / reference.max_abs();
        assert!(err <= 1e-12, "relative max-norm error {err:e}");
    }

    #[test]
    fn unitary_trivial_cases() {
        let u = build_unitary(&BosonicParams::identity(), 10).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(10)).unwrap() < 1e-15);
        let rot = build_unitary(&BosonicParams::new(c(0.0, 0.0), 0.7, 0.0, 0.0).unwrap(), 10).unwrap();
        for n in 0..10 {
            assert!((rot[(n, n)] - Complex64::from_polar(1.0, 0.7 * n as f64)).norm() < 1e-14);
        }
    }

    #[test]
    fn inverse_pairs() {
        let alpha = c(1.2, -0.8);
        let pad = pad_dim_policy(20, 0.0, alpha);
        let dd = displacement(alpha, pad).unwrap().matmul(&displacement(-alpha, pad).unwrap()).unwrap();
        assert!(dd.block(20, 20).unwrap().max_abs_diff(&ComplexMatrix::identity(20)).unwrap() <= 1e-9);

        let z = Complex64::from_polar(1.2, 0.4);
        let pad = pad_dim_policy(20, 1.2, c(0.0, 0.0));
        let ss = squeeze(z, pad).unwrap().matmul(&squeeze(-z, pad).unwrap()).unwrap();
        assert!(ss.block(20, 20).unwrap().max_abs_diff(&ComplexMatrix::identity(20)).unwrap() <= 1e-8);
    }

    #[test]
    fn policy_pad_reaches_the_block_edge() {
        // reference value from a 60-digit evaluation of the closed form
        let p = BosonicParams::new(
            c(0.30452155662362196, 0.7135874250453215),
            0.04032531153385399,
            0.7295871223253637,
            -2.073259059193214,
        )
        .unwrap();
        let u = unitary_brute(&p, 20).unwrap();
        let expected = c(0.05743501656280966, 0.11797660572742876);
        assert!((u.matrix[(19, 19)] - expected).norm() <= 1e-13);
    }

    #[test]
    fn unitary_block_is_unitary() {
        let p = BosonicParams::new(c(0.5, 0.0), 0.3, 0.4, 1.0).unwrap();
        let u = unitary_brute(&p, 20).unwrap();
        assert!(u.pad_dim >= 40);
        let full = build_unitary(&p, u.pad_dim).unwrap();
        let gram = full.adjoint().matmul(&full).unwrap().block(20, 20).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(20)).unwrap() <= 1e-8);
    }

    #[test]
    fn state_trivial_cases() {
        let coherent = rho_brute(&StateParams::new(c(1.0, 0.0), 0.0, 0.0, 0.0).unwrap(), 10).unwrap();
        assert!((coherent.matrix[(0, 0)].re - (-1.0f64).exp()).abs() < 1e-13);
        let thermal = rho_brute(&StateParams::thermal(1.0).unwrap(), 6).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                let expected = if m == n { 0.5f64.powi(m as i32 + 1) } else { 0.0 };
                assert!((thermal.matrix[(m, n)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn padding_sufficiency() {
        let p = StateParams::new(c(1.5, 1.0), 1.2, 0.6, 0.5).unwrap();
        let base = rho_brute(&p, 15).unwrap();
        let doubled = rho_brute_padded(&p, 15, 2 * base.pad_dim).unwrap();
        assert!(base.matrix.max_abs_diff(&doubled.matrix).unwrap() <= 1e-9);
    }

    #[test]
    fn deficit() {
        assert_eq!(thermal_truncation_deficit(0.0, 10), 0.0);
        assert!((thermal_truncation_deficit(1.0, 10) - 2f64.powi(-10)).abs() < 1e-18);
    }
}
