//! Small numeric helpers shared across modules: compensated summation,
//! the index cap, complex literal parsing and deviation metrics.

use std::str::FromStr;

use num_complex::{Complex, Complex64};
use once_cell::sync::Lazy;
use twofloat::TwoFloat;

use crate::error::{FockError, Result};

/// Default cap on polynomial and Fock indices.
pub const DEFAULT_MAX_INDEX: usize = 120;

/// Largest value accepted from `FOCK_MAX_INDEX`.
pub const HARD_MAX_INDEX: usize = 1000;

/// Environment variable overriding [`DEFAULT_MAX_INDEX`].
pub const MAX_INDEX_ENV: &str = "FOCK_MAX_INDEX";

static MAX_INDEX: Lazy<usize> = Lazy::new(|| max_index_from_env().unwrap_or(DEFAULT_MAX_INDEX));

/// Reads and validates `FOCK_MAX_INDEX`. An unset variable yields the default.
pub fn max_index_from_env() -> Result<usize> {
    match std::env::var(MAX_INDEX_ENV) {
        Err(_) => Ok(DEFAULT_MAX_INDEX),
        Ok(raw) => parse_max_index(&raw),
    }
}

pub fn parse_max_index(raw: &str) -> Result<usize> {
    let value: usize = raw
        .trim()
        .parse()
        .map_err(|_| FockError::InvalidParameter(format!("{MAX_INDEX_ENV}={raw:?} is not an integer")))?;
    if value == 0 || value > HARD_MAX_INDEX {
        return Err(FockError::InvalidParameter(format!(
            "{MAX_INDEX_ENV} must lie in 1..={HARD_MAX_INDEX}, got {value}"
        )));
    }
    Ok(value)
}

/// The configured index cap (read once per process).
pub fn max_index() -> usize {
    *MAX_INDEX
}

pub(crate) fn check_index(index: usize) -> Result<()> {
    let max = max_index();
    if index > max {
        Err(FockError::IndexOutOfBounds { index, max })
    } else {
        Ok(())
    }
}

/// Complex double-double, for recurrences and sums whose terms cancel.
pub(crate) type ComplexDd = Complex<TwoFloat>;

#[inline]
pub(crate) fn to_dd(c: Complex64) -> ComplexDd {
    Complex::new(TwoFloat::from(c.re), TwoFloat::from(c.im))
}

/// Rounds back to the nearest double.
#[inline]
pub(crate) fn from_dd(c: ComplexDd) -> Complex64 {
    Complex64::new(c.re.hi(), c.im.hi())
}

#[inline]
pub(crate) fn dd_is_finite(c: ComplexDd) -> bool {
    c.re.hi().is_finite() && c.im.hi().is_finite() && c.re.lo().is_finite() && c.im.lo().is_finite()
}

/// `a / b` to double-double accuracy. `TwoFloat`'s own division is only
/// good to about one double ulp, so the quotient is refined from the
/// residual, which multiplication and subtraction do carry exactly.
#[inline]
pub(crate) fn div_dd(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

/// `sqrt(k)` to double-double accuracy.
#[inline]
pub(crate) fn sqrt_dd(k: usize) -> TwoFloat {
    TwoFloat::from(k as f64).sqrt()
}

/// `1 / sqrt(k)` to double-double accuracy.
#[inline]
pub(crate) fn inv_sqrt_dd(k: usize) -> TwoFloat {
    div_dd(TwoFloat::from(1.0), sqrt_dd(k))
}

/// `sqrt(C(n, k))` to double-double accuracy.
pub(crate) fn sqrt_binomial_dd(n: usize, k: usize) -> TwoFloat {
    let k = k.min(n - k);
    let mut c = TwoFloat::from(1.0);
    for i in 1..=k {
        c = div_dd(c * TwoFloat::from((n - k + i) as f64), TwoFloat::from(i as f64));
    }
    c.sqrt()
}

/// Neumaier-compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    im: f64,
    re_c: f64,
    im_c: f64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, value: f64) {
    let t = *sum + value;
    if sum.abs() >= value.abs() {
        *comp += (*sum - t) + value;
    } else {
        *comp += (value - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, value.re);
        neumaier(&mut self.im, &mut self.im_c, value.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Deviation `|a - b| / max(1, |b|)`: absolute for entries of modulus up to
/// one, relative above.
pub fn scaled_deviation(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Parses a complex literal of the form `a`, `bi`, `a+bi` or `a-bi`.
///
/// Real and imaginary parts accept anything `f64::from_str` does, including
/// exponents (`1e-3-2.5e1i`). Whitespace is rejected.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || FockError::InvalidParameter(format!("cannot parse complex literal {text:?}"));
    if text.is_empty() || text.chars().any(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = text.strip_suffix('i') else {
        let re = f64::from_str(text).map_err(|_| bad())?;
        return finite(Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => f64::from_str(s).map_err(|_| bad()),
        }
    };
    let value = match split {
        Some(k) => {
            let re = f64::from_str(&body[..k]).map_err(|_| bad())?;
            Complex64::new(re, imag(&body[k..])?)
        }
        None => Complex64::new(0.0, imag(body)?),
    };
    finite(value).ok_or_else(bad)
}

fn finite(z: Complex64) -> Option<Complex64> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Rounds to 15 significant digits and renders with the shortest
/// representation of the rounded value.
pub fn format_real(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let rounded: f64 = format!("{value:.14e}").parse().unwrap_or(value);
    if rounded == 0.0 {
        // avoid "-0"
        return "0".to_string();
    }
    rounded.to_string()
}

/// Renders a complex value as `a+bi`/`a-bi`, or just `a` when purely real.
pub fn format_complex(value: Complex64) -> String {
    let re = format_real(value.re);
    if value.im == 0.0 {
        return re;
    }
    let im = format_real(value.im.abs());
    let sign = if value.im < 0.0 { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_division_is_exact_to_working_precision() {
        let third = div_dd(TwoFloat::from(1.0), TwoFloat::from(3.0));
        let residual = third * TwoFloat::from(3.0) - TwoFloat::from(1.0);
        assert!(residual.hi().abs() < 1e-30);
        let r = inv_sqrt_dd(7) * sqrt_dd(7) - TwoFloat::from(1.0);
        assert!(r.hi().abs() < 1e-30);
        assert_eq!(sqrt_binomial_dd(25, 12).hi(), 5200300f64.sqrt());
    }

    #[test]
    fn parses_literal_forms() {
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("1+0.3i").unwrap(), Complex64::new(1.0, 0.3));
        assert_eq!(parse_complex("-0.5-2i").unwrap(), Complex64::new(-0.5, -2.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2E-1i").unwrap(), Complex64::new(1e-3, 0.2));
        assert_eq!(parse_complex("1-i").unwrap(), Complex64::new(1.0, -1.0));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", "1 + 2i", "abc", "1+2j", "1+xi", "nan", "inf", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn formats_with_fifteen_digits() {
        assert_eq!(format_real(3.0), "3");
        assert_eq!(format_real(0.1 + 0.2), "0.3");
        assert_eq!(format_complex(Complex64::new(1.0, -0.25)), "1-0.25i");
        assert_eq!(format_complex(Complex64::new(-0.0, 0.0)), "0");
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let terms = [1e16, 1.0, -1e16, 1.0].map(|v| Complex64::new(v, -v));
        let s: CompensatedSum = terms.into_iter().collect();
        assert_eq!(s.value(), Complex64::new(2.0, -2.0));
    }

    #[test]
    fn max_index_parsing() {
        assert_eq!(parse_max_index("200").unwrap(), 200);
        assert!(parse_max_index("0").is_err());
        assert!(parse_max_index("5000").is_err());
        assert!(parse_max_index("ten").is_err());
    }
}
