//! Exact arithmetic helpers shared by the degree, matching and vicinity code.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Ratio = BigRational;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn ratio(num: u128, den: u128) -> Ratio {
    Ratio::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `a/b` or `a`; integers print without a denominator.
pub fn fraction_string(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, integers and finite decimals (`0.5556`, `.05`, `1e-3`) exactly.
pub fn parse_ratio(text: &str) -> Result<Ratio> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_ratio(p)?;
        let q = parse_ratio(q)?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(p / q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Ratio::from_integer(numer);
    if scale >= 0 {
        value *= Ratio::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= Ratio::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Exact conversion of a finite float (every finite f64 is a dyadic rational).
pub fn from_f64(x: f64) -> Ratio {
    Ratio::from_float(x).unwrap_or_else(Ratio::zero)
}

pub fn check_unit_interval(name: &str, r: &Ratio) -> Result<()> {
    if r.is_negative() || *r > Ratio::one() {
        return Err(Error::InvalidParameter(format!(
            "{name} = {} outside [0, 1]",
            fraction_string(r)
        )));
    }
    Ok(())
}

/// Serializes a rational as its fraction string.
pub fn ser_ratio<S: serde::Serializer>(r: &Ratio, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fraction_string(r))
}

pub fn ser_opt_ratio<S: serde::Serializer>(
    r: &Option<Ratio>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fraction_string(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_ratios<S: serde::Serializer>(rs: &[Ratio], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(fraction_string))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(21, 3), 1330);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_ratio("5/9").unwrap(), ratio(5, 9));
        assert_eq!(parse_ratio(".05").unwrap(), ratio(1, 20));
        assert_eq!(parse_ratio("0.5556").unwrap(), ratio(1389, 2500));
        assert_eq!(parse_ratio("1e-2").unwrap(), ratio(1, 100));
        assert_eq!(parse_ratio("-3").unwrap(), int(-3));
        assert!(parse_ratio("abc").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio(".").is_err());
    }

    #[test]
    fn fraction_strings() {
        assert_eq!(fraction_string(&ratio(3, 2)), "3/2");
        assert_eq!(fraction_string(&ratio(4, 2)), "2");
    }
}
