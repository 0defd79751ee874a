//! The deformation parameter and exact-rational helpers.
//!
//! A session fixes a rational base `r` with `0 < r <= 1` and sets `q = r^4`.
//! Every power of `q` the library needs is `q^{k/4} = r^k` for an integer
//! `k`, so the half-integer exponents of type B stay exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.8"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse rational {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = int.abs() * &scale + frac;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Canonical `"num/den"` form; integers keep the `/1`.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Nearest `f64`, robust to numerators and denominators beyond `f64` range.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both parts down to about 900 bits before dividing.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let n = (x.numer() >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift_d).to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32)
}

/// The base `r` of the deformation, with `q = r^4`.
///
/// `r = 1` is the classical (undeformed) point and is accepted so that
/// q → 1 degenerations can be checked with the same pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseParam {
    r: BigRational,
}

impl BaseParam {
    pub fn new(r: BigRational) -> Result<Self> {
        if !r.is_positive() || r > BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "base r must satisfy 0 < r <= 1, got {}",
                format_rational(&r)
            )));
        }
        Ok(Self { r })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_rational(s)?)
    }

    pub fn classical() -> Self {
        Self {
            r: BigRational::one(),
        }
    }

    pub fn r(&self) -> &BigRational {
        &self.r
    }

    pub fn q(&self) -> BigRational {
        self.r_pow(4)
    }

    pub fn is_classical(&self) -> bool {
        self.r.is_one()
    }

    /// `r^k`, i.e. `q^{k/4}`.
    pub fn r_pow(&self, k: i64) -> BigRational {
        if k >= 0 {
            Pow::pow(&self.r, k as u64)
        } else {
            Pow::pow(&self.r, (-k) as u64).recip()
        }
    }

    pub fn r_f64(&self) -> f64 {
        rational_to_f64(&self.r)
    }

    pub fn r_pow_f64(&self, k: i64) -> f64 {
        self.r_f64().powi(k as i32)
    }
}

impl std::fmt::Display for BaseParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_rational(&self.r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 4/5 ").unwrap(), rat(4, 5));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("0.8").unwrap(), rat(4, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn base_param_bounds() {
        assert!(BaseParam::parse("0").is_err());
        assert!(BaseParam::parse("3/2").is_err());
        assert!(BaseParam::parse("1").unwrap().is_classical());
        let p = BaseParam::parse("1/2").unwrap();
        assert_eq!(p.q(), rat(1, 16));
        assert_eq!(p.r_pow(-3), rat(8, 1));
    }

    #[test]
    fn formats_with_denominator() {
        assert_eq!(format_rational(&rat(257, 16)), "257/16");
        assert_eq!(format_rational(&rat(1, 1)), "1/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BaseParam::parse("1/2").unwrap().r_pow(-2000);
        let small = big.recip();
        let x = rational_to_f64(&(big.clone() * rat(3, 1) / big.clone()));
        assert_eq!(x, 3.0);
        assert_eq!(rational_to_f64(&small), 0.0);
    }
}
