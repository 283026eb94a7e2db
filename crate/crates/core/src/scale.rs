//! Extended-range positive scale factors `mant · 2^exp2` with a
//! double-double mantissa.
//!
//! Factorials and their square roots are tabulated once, so a weight such
//! as `sqrt(m! n!) / (r! (m-r)!)` costs a few double-double roundings at any
//! index instead of the `|ln|·ε` error of exponentiating a log-factorial sum,
//! and a value is rounded to a double only once, in [`Scale::apply_dd`].

use num_complex::Complex64;
use once_cell::sync::Lazy;
use twofloat::TwoFloat;

use crate::hlpoly::LOG_FACTORIAL_TABLE_LEN;
use crate::numeric::{div_dd, to_dd, ComplexDd};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scale {
    /// `hi ∈ [1, 2)`
    mant: TwoFloat,
    exp2: i32,
}

struct Tables {
    fact: Vec<Scale>,
    sqrt_fact: Vec<Scale>,
}

static TABLES: Lazy<Tables> = Lazy::new(|| {
    let mut fact = Vec::with_capacity(LOG_FACTORIAL_TABLE_LEN);
    let mut sqrt_fact = Vec::with_capacity(LOG_FACTORIAL_TABLE_LEN);
    let mut f = Scale::ONE;
    for k in 0..LOG_FACTORIAL_TABLE_LEN {
        if k > 0 {
            f = Scale::normalized(f.mant * TwoFloat::from(k as f64), f.exp2);
        }
        fact.push(f);
        let (m, e) = if f.exp2 % 2 != 0 { (f.mant * TwoFloat::from(2.0), f.exp2 - 1) } else { (f.mant, f.exp2) };
        sqrt_fact.push(Scale::normalized(m.sqrt(), e / 2));
    }
    Tables { fact, sqrt_fact }
});

/// Splits a finite non-zero `x` into `m · 2^e` with `|m| ∈ [1, 2)`.
fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE { (x * 2f64.powi(64), -64) } else { (x, 0) };
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
    (m, e + bias)
}

/// `x · 2^e`, applied in steps so that no intermediate power overflows.
fn ldexp(mut x: f64, mut e: i32) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if !x.is_finite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e)
}

/// Exact `x · 2^e` for a double-double whose result stays normal.
fn ldexp_dd(x: TwoFloat, e: i32) -> TwoFloat {
    TwoFloat::new_add(ldexp(x.hi(), e), ldexp(x.lo(), e))
}

impl Scale {
    pub(crate) const ONE: Scale = Scale { mant: TwoFloat::from_f64(1.0), exp2: 0 };

    fn normalized(value: TwoFloat, exp2: i32) -> Self {
        let (_, e) = frexp(value.hi());
        Scale { mant: ldexp_dd(value, -e), exp2: exp2 + e }
    }

    /// `k!`; `k` must be below the factorial table length.
    pub(crate) fn fact(k: usize) -> Self {
        TABLES.fact[k]
    }

    /// `sqrt(k!)`.
    pub(crate) fn sqrt_fact(k: usize) -> Self {
        TABLES.sqrt_fact[k]
    }

    /// `C(n, k)`.
    #[cfg(test)]
    pub(crate) fn binomial(n: usize, k: usize) -> Self {
        Self::fact(n).div(Self::fact(k).mul(Self::fact(n - k)))
    }

    /// `sqrt(C(n, k))`.
    pub(crate) fn sqrt_binomial(n: usize, k: usize) -> Self {
        Self::sqrt_fact(n).div(Self::sqrt_fact(k).mul(Self::sqrt_fact(n - k)))
    }

    /// `e^{ln_value}`, to double accuracy only.
    pub(crate) fn from_ln(ln_value: f64) -> Self {
        let k = (ln_value / std::f64::consts::LN_2).floor();
        let rest = ln_value - k * std::f64::consts::LN_2;
        Self::normalized(TwoFloat::from(rest.exp()), k as i32)
    }

    pub(crate) fn mul(self, other: Scale) -> Self {
        Self::normalized(self.mant * other.mant, self.exp2 + other.exp2)
    }

    pub(crate) fn div(self, other: Scale) -> Self {
        Self::normalized(div_dd(self.mant, other.mant), self.exp2 - other.exp2)
    }

    /// `value · self`, finite whenever the product is representable.
    pub(crate) fn apply(self, value: Complex64) -> Complex64 {
        self.apply_dd(to_dd(value))
    }

    /// `value · self` rounded once to double.
    pub(crate) fn apply_dd(self, value: ComplexDd) -> Complex64 {
        let magnitude = value.re.hi().abs().max(value.im.hi().abs());
        if magnitude == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (_, e) = frexp(magnitude);
        let re = ldexp_dd(value.re, -e) * self.mant;
        let im = ldexp_dd(value.im, -e) * self.mant;
        let total = e + self.exp2;
        Complex64::new(ldexp(re.hi(), total), ldexp(im.hi(), total))
    }

    #[cfg(test)]
    pub(crate) fn to_f64(self) -> f64 {
        ldexp(self.mant.hi(), self.exp2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials_are_exact() {
        let mut f = 1.0f64;
        for k in 0..=22 {
            if k > 0 {
                f *= k as f64;
            }
            assert_eq!(Scale::fact(k).to_f64(), f);
        }
        assert_eq!(Scale::sqrt_fact(4).to_f64(), 24f64.sqrt());
        assert_eq!(Scale::binomial(10, 3).to_f64(), 120.0);
    }

    #[test]
    fn large_factorials() {
        // 170! = 7.257415615307998967e306, ln 300! = 1414.905849945068
        let f170 = Scale::fact(170).to_f64();
        assert!((f170 / 7.257_415_615_307_999e306 - 1.0).abs() < 4e-16);
        let s300 = Scale::sqrt_fact(300);
        let ln = s300.mant.hi().ln() + s300.exp2 as f64 * std::f64::consts::LN_2;
        assert!((ln - 0.5 * 1414.905849945068).abs() < 1e-10);
        assert!(Scale::fact(400).to_f64().is_infinite());
        let ratio = Scale::fact(400).div(Scale::fact(399)).to_f64();
        assert!((ratio - 400.0).abs() < 1e-12);
    }

    #[test]
    fn apply_and_log_construction() {
        let tiny = Complex64::new(3e-300, -1e-300);
        let big = Scale::from_ln(600.0 * std::f64::consts::LN_10);
        let v = big.apply(tiny);
        assert!((v - Complex64::new(3e300, -1e300)).norm() <= 1e-12 * 3e300);
        assert_eq!(Scale::ONE.apply(Complex64::new(0.5, 2.0)), Complex64::new(0.5, 2.0));
        assert_eq!(frexp(12.0), (1.5, 3));
        assert_eq!(ldexp(1.0, -1074), 5e-324);
    }
}
